#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace doc2tool {

// RFC 3986 percent encoding: every byte outside the unreserved set
// (ALPHA / DIGIT / "-" / "." / "_" / "~") becomes "%XX" with uppercase hex.
std::string percent_encode(std::string_view raw);
// Inverse of percent_encode. Malformed escapes are passed through literally.
std::string percent_decode(std::string_view encoded);

using HeaderList = std::vector<std::pair<std::string, std::string>>;

struct HttpRequest {
  std::string method = "GET";
  std::string url;  // absolute, already encoded
  HeaderList headers;
  std::optional<std::string> body;
  std::string content_type = "application/json";
};

struct HttpResponse {
  int status = 0;
  std::string body;
  HeaderList headers;
};

struct TransportOptions {
  int timeout_seconds = 50;
  bool tls_verify = true;
  // Refuse every host that is not loopback.
  bool offline = false;
};

// Raised by transports; `cause` is a short token such as "connect",
// "timeout", "read", "tls" or "offline".
class TransportError : public std::runtime_error {
 public:
  TransportError(std::string cause, const std::string& detail)
      : std::runtime_error(cause + ": " + detail), cause_(std::move(cause)) {}
  const std::string& cause() const noexcept { return cause_; }

 private:
  std::string cause_;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse send(const HttpRequest& request, const TransportOptions& options) = 0;
};

// cpp-httplib backed transport. HTTPS requires the OpenSSL build.
class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse send(const HttpRequest& request, const TransportOptions& options) override;
};

std::shared_ptr<HttpTransport> default_transport();

bool is_loopback_host(std::string_view authority);

// Minimum spacing between requests that share a key (typically the host).
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second = 0.0);

  // Blocks until a request to `key` may start. No-op when unlimited.
  void acquire(const std::string& key);
  double requests_per_second() const { return rps_; }

 private:
  double rps_;
  std::mutex mu_;
  std::map<std::string, std::chrono::steady_clock::time_point> next_slot_;
};

}  // namespace doc2tool
