#include "doc2tool/testkit/mock_server.hpp"

#include <stdexcept>

#ifdef DOC2TOOL_WITH_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "doc2tool/embedding.hpp"

namespace doc2tool::testkit {

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kGlycanId = "G00048MO";

}  // namespace

MockApiServer::MockApiServer() : server_(std::make_unique<httplib::Server>()) {
  default_chat_reply_ = R"({"parameters": [{"parameter_key": "q", "parameter_guess": "guess"}]})";
  auto& srv = *server_;

  // Recorded before the handler runs so callers see it once they have a response.
  auto recorded = [this](httplib::Server::Handler fn) -> httplib::Server::Handler {
    return [this, fn](const httplib::Request& req, httplib::Response& res) {
      record({req.method, req.path, req.target, req.body});
      fn(req, res);
    };
  };

  srv.Get("/v1/cards", recorded([](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body = {{"data", {{{"id", "xy7-54"}, {"name", "Gardevoir"}, {"hp", "130"}}}},
                           {"query", req.get_param_value("q")}};
    res.set_content(body.dump(), kJson);
  }));

  srv.Get("/v1/search", recorded([](const httplib::Request& req, httplib::Response& res) {
    if (!req.params.empty()) {
      res.status = 400;
      res.set_content(R"({"message": "unsupported parameter"})", kJson);
      return;
    }
    res.set_content(R"({"results": [{"title": "Getting started"}, {"title": "Rate limits"}]})", kJson);
  }));

  srv.Get("/v1/missing", recorded([](const httplib::Request&, httplib::Response& res) {
    res.status = 404;
    res.set_content(R"({"detail": "Not Found"})", kJson);
  }));

  srv.Get("/v1/broken", recorded([](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"error": "invalid query"})", kJson);
  }));

  srv.Get(R"(/v1/glycan/([^/]+))", recorded([](const httplib::Request& req, httplib::Response& res) {
    if (req.matches[1] != kGlycanId) {
      res.status = 404;
      res.set_content(R"({"detail": "unknown accession"})", kJson);
      return;
    }
    nlohmann::json body = {{"glytoucan_id", kGlycanId}, {"mass", 1235.4}, {"composition", "Hex5HexNAc2"}};
    res.set_content(body.dump(), kJson);
  }));

  srv.Get("/v1/structures", recorded([](const httplib::Request& req, httplib::Response& res) {
    std::string id = req.get_param_value("glytoucan_id");
    nlohmann::json body = {{"structures", {{{"glytoucan_id", id}, {"residues", 7}}}}, {"count", 1}};
    res.set_content(body.dump(), kJson);
  }));

  srv.Post("/v1/chat/completions", recorded([this](const httplib::Request&, httplib::Response& res) {
    std::string content;
    int status;
    {
      std::lock_guard lock(mu_);
      status = model_status_;
      if (!chat_replies_.empty()) {
        content = chat_replies_.front();
        chat_replies_.pop_front();
      } else {
        content = default_chat_reply_;
      }
    }
    if (status != 200) {
      res.status = status;
      res.set_content(R"({"error": {"message": "unavailable"}})", kJson);
      return;
    }
    nlohmann::json body = {
        {"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}}},
        {"usage", {{"total_tokens", static_cast<int>(content.size() / 4 + 1)}}}};
    res.set_content(body.dump(), kJson);
  }));

  srv.Post("/v1/embeddings", recorded([this](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(mu_);
      if (model_status_ != 200) {
        res.status = model_status_;
        return;
      }
    }
    auto in = nlohmann::json::parse(req.body, nullptr, false);
    std::vector<std::string> texts;
    if (!in.is_discarded() && in.contains("input")) {
      if (in["input"].is_string()) texts.push_back(in["input"]);
      else for (const auto& t : in["input"]) texts.push_back(t.get<std::string>());
    }
    LexicalEmbedding emb(in.is_discarded() ? 256 : in.value("dimensions", 256));
    auto vecs = emb.embed(texts);
    nlohmann::json data = nlohmann::json::array();
    for (size_t i = 0; i < vecs.size(); ++i) data.push_back({{"index", i}, {"embedding", vecs[i]}});
    res.set_content(nlohmann::json({{"data", data}}).dump(), kJson);
  }));

  // Loopback only.
  port_ = srv.bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw std::runtime_error("mock server could not bind to 127.0.0.1");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

MockApiServer::~MockApiServer() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockApiServer::base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

void MockApiServer::push_chat_reply(std::string content) {
  std::lock_guard lock(mu_);
  chat_replies_.push_back(std::move(content));
}

void MockApiServer::set_default_chat_reply(std::string content) {
  std::lock_guard lock(mu_);
  default_chat_reply_ = std::move(content);
}

void MockApiServer::set_model_status(int status) {
  std::lock_guard lock(mu_);
  model_status_ = status;
}

std::vector<RecordedRequest> MockApiServer::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

size_t MockApiServer::count_requests(const std::string& path_prefix) const {
  std::lock_guard lock(mu_);
  size_t n = 0;
  for (const auto& r : requests_)
    if (r.path.rfind(path_prefix, 0) == 0) ++n;
  return n;
}

void MockApiServer::clear_requests() {
  std::lock_guard lock(mu_);
  requests_.clear();
}

void MockApiServer::record(const RecordedRequest& r) {
  std::lock_guard lock(mu_);
  requests_.push_back(r);
}

}  // namespace doc2tool::testkit
