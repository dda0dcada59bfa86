#include "doc2tool/remote.hpp"

#include <cstdlib>

#include "doc2tool/error.hpp"
#include "doc2tool/model.hpp"

namespace doc2tool {

namespace {

HeaderList auth_headers(const RemoteConfig& config) {
  HeaderList headers;
  if (!config.api_key_env.empty()) {
    if (const char* key = std::getenv(config.api_key_env.c_str()); key && *key)
      headers.emplace_back("Authorization", std::string("Bearer ") + key);
  }
  return headers;
}

std::string host_key(const std::string& url) { return split_url(url).authority; }

}  // namespace

RemoteConfig remote_config_from_json(const nlohmann::json& j) {
  RemoteConfig c;
  c.endpoint_url = j.value("endpoint_url", "");
  c.model = j.value("model", "");
  c.api_key_env = j.value("api_key_env", "");
  c.timeout_seconds = j.value("timeout_seconds", 120);
  c.requests_per_second = j.value("requests_per_second", 0.0);
  c.max_concurrent_requests = j.value("max_concurrent_requests", 4);
  return c;
}

nlohmann::json to_json(const RemoteConfig& c) {
  return {{"endpoint_url", c.endpoint_url},
          {"model", c.model},
          {"api_key_env", c.api_key_env},
          {"timeout_seconds", c.timeout_seconds},
          {"requests_per_second", c.requests_per_second},
          {"max_concurrent_requests", c.max_concurrent_requests}};
}

ChatClient::ChatClient(RemoteConfig config, std::shared_ptr<HttpTransport> transport,
                       TransportOptions options)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      options_(options),
      limiter_(config_.requests_per_second) {
  options_.timeout_seconds = config_.timeout_seconds;
}

ChatReply ChatClient::complete(const std::vector<ChatMessage>& messages,
                               const std::optional<nlohmann::json>& response_schema,
                               const std::string& schema_name) {
  nlohmann::json body = {{"model", config_.model}, {"messages", nlohmann::json::array()}};
  for (const auto& m : messages)
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  if (response_schema) {
    body["response_format"] = {
        {"type", "json_schema"},
        {"json_schema", {{"name", schema_name}, {"schema", *response_schema}}}};
  }

  HttpRequest req;
  req.method = "POST";
  req.url = config_.endpoint_url;
  req.headers = auth_headers(config_);
  req.body = body.dump();

  limiter_.acquire(host_key(config_.endpoint_url));
  HttpResponse res;
  try {
    res = transport_->send(req, options_);
  } catch (const TransportError& e) {
    throw Error(ErrorCode::BackendUnreachable, config_.endpoint_url, e.what());
  }
  if (res.status < 200 || res.status >= 300)
    throw Error(ErrorCode::BackendUnreachable, config_.endpoint_url,
                "status " + std::to_string(res.status));

  auto reply = nlohmann::json::parse(res.body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
      reply["choices"].empty())
    throw Error(ErrorCode::BackendUnreachable, config_.endpoint_url, "malformed reply");
  const auto& message = reply["choices"][0].value("message", nlohmann::json::object());
  if (!message.contains("content") || !message["content"].is_string())
    throw Error(ErrorCode::BackendUnreachable, config_.endpoint_url, "reply without content");

  ChatReply out;
  out.content = message["content"].get<std::string>();
  if (auto usage = reply.find("usage"); usage != reply.end() && usage->is_object())
    out.total_tokens = usage->value("total_tokens", std::int64_t{0});
  return out;
}

EmbeddingClient::EmbeddingClient(RemoteConfig config, std::shared_ptr<HttpTransport> transport,
                                 TransportOptions options)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      options_(options),
      limiter_(config_.requests_per_second) {
  options_.timeout_seconds = config_.timeout_seconds;
}

std::vector<std::vector<double>> EmbeddingClient::embed(const std::vector<std::string>& texts) {
  HttpRequest req;
  req.method = "POST";
  req.url = config_.endpoint_url;
  req.headers = auth_headers(config_);
  req.body = nlohmann::json{{"model", config_.model}, {"input", texts}}.dump();

  limiter_.acquire(host_key(config_.endpoint_url));
  HttpResponse res;
  try {
    res = transport_->send(req, options_);
  } catch (const TransportError& e) {
    throw Error(ErrorCode::EmbeddingUnavailable, config_.endpoint_url, e.what());
  }
  if (res.status < 200 || res.status >= 300)
    throw Error(ErrorCode::EmbeddingUnavailable, config_.endpoint_url,
                "status " + std::to_string(res.status));
  auto reply = nlohmann::json::parse(res.body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("data") || !reply["data"].is_array() ||
      reply["data"].size() != texts.size())
    throw Error(ErrorCode::EmbeddingUnavailable, config_.endpoint_url, "malformed reply");

  std::vector<std::vector<double>> out(texts.size());
  for (size_t i = 0; i < reply["data"].size(); ++i) {
    const auto& item = reply["data"][i];
    size_t index = item.value("index", i);
    if (index >= out.size() || !item.contains("embedding"))
      throw Error(ErrorCode::EmbeddingUnavailable, config_.endpoint_url, "bad item");
    out[index] = item["embedding"].get<std::vector<double>>();
  }
  return out;
}

}  // namespace doc2tool
