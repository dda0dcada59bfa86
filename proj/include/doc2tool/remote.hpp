#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doc2tool/http.hpp"

namespace doc2tool {

// A chat-completion style service: POST {model, messages, response_format?}
// and read choices[0].message.content. Credentials are read from the named
// environment variable at request time and never stored.
struct RemoteConfig {
  std::string endpoint_url;
  std::string model;
  std::string api_key_env;
  int timeout_seconds = 120;
  double requests_per_second = 0.0;
  int max_concurrent_requests = 4;
};

RemoteConfig remote_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RemoteConfig& config);

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatReply {
  std::string content;
  std::int64_t total_tokens = 0;
};

class ChatClient {
 public:
  ChatClient(RemoteConfig config, std::shared_ptr<HttpTransport> transport,
             TransportOptions options = {});

  // Throws Error(BackendUnreachable) on transport failure, non-2xx status or
  // a reply without content.
  ChatReply complete(const std::vector<ChatMessage>& messages,
                     const std::optional<nlohmann::json>& response_schema = std::nullopt,
                     const std::string& schema_name = "response");

  const RemoteConfig& config() const { return config_; }

 private:
  RemoteConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  TransportOptions options_;
  RateLimiter limiter_;
};

// Embedding service: POST {model, input: [...]} and read data[i].embedding.
class EmbeddingClient {
 public:
  EmbeddingClient(RemoteConfig config, std::shared_ptr<HttpTransport> transport,
                  TransportOptions options = {});

  // Throws Error(EmbeddingUnavailable).
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts);

 private:
  RemoteConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  TransportOptions options_;
  RateLimiter limiter_;
};

}  // namespace doc2tool
