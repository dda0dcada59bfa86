#include "doc2tool/http.hpp"

#include <thread>

#ifdef DOC2TOOL_WITH_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "doc2tool/model.hpp"
#include "doc2tool/strings.hpp"

namespace doc2tool {

namespace {

bool is_unreserved(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
         c == '-' || c == '.' || c == '_' || c == '~';
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string cause_of(httplib::Error err) {
  switch (err) {
    case httplib::Error::Connection: return "connect";
    case httplib::Error::ConnectionTimeout: return "timeout";
    case httplib::Error::Read: return "read";
    case httplib::Error::Write: return "write";
    case httplib::Error::SSLConnection:
    case httplib::Error::SSLLoadingCerts:
    case httplib::Error::SSLServerVerification:
      return "tls";
    default: return "transport";
  }
}

}  // namespace

std::string percent_encode(std::string_view raw) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(raw.size() * 3);
  for (char ch : raw) {
    auto c = static_cast<unsigned char>(ch);
    if (is_unreserved(c)) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0x0F];
    }
  }
  return out;
}

std::string percent_decode(std::string_view encoded) {
  std::string out;
  out.reserve(encoded.size());
  for (size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] == '%' && i + 2 < encoded.size()) {
      int hi = hex_value(encoded[i + 1]);
      int lo = hex_value(encoded[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>((hi << 4) | lo);
        i += 2;
        continue;
      }
    }
    out += encoded[i];
  }
  return out;
}

bool is_loopback_host(std::string_view authority) {
  std::string host(authority);
  if (auto at = host.rfind('@'); at != std::string::npos) host = host.substr(at + 1);
  if (!host.empty() && host.front() == '[') {
    auto close = host.find(']');
    host = host.substr(1, close == std::string::npos ? std::string::npos : close - 1);
    return host == "::1";
  }
  if (auto colon = host.find(':'); colon != std::string::npos) host = host.substr(0, colon);
  host = str::to_lower(host);
  return host == "localhost" || host.rfind("127.", 0) == 0;
}

HttpResponse HttplibTransport::send(const HttpRequest& request, const TransportOptions& options) {
  UrlParts parts = split_url(request.url);
  if (parts.scheme.empty() || parts.authority.empty())
    throw TransportError("url", "not an absolute URL: " + request.url);
  if (options.offline && !is_loopback_host(parts.authority))
    throw TransportError("offline", "non-loopback host refused: " + parts.authority);
#ifndef DOC2TOOL_WITH_OPENSSL
  if (parts.scheme == "https") throw TransportError("tls", "built without TLS support");
#endif

  httplib::Client client(parts.scheme + "://" + parts.authority);
  client.set_url_encode(false);
  client.set_connection_timeout(options.timeout_seconds, 0);
  client.set_read_timeout(options.timeout_seconds, 0);
  client.set_write_timeout(options.timeout_seconds, 0);
#ifdef DOC2TOOL_WITH_OPENSSL
  client.enable_server_certificate_verification(options.tls_verify);
#endif

  httplib::Request req;
  req.method = request.method;
  req.path = parts.path.empty() ? "/" : parts.path;
  if (!parts.query.empty()) req.path += "?" + parts.query;
  for (const auto& [k, v] : request.headers) req.headers.emplace(k, v);
  if (request.body) {
    req.body = *request.body;
    if (!req.has_header("Content-Type")) req.headers.emplace("Content-Type", request.content_type);
  }

  auto result = client.send(req);
  if (!result) throw TransportError(cause_of(result.error()), httplib::to_string(result.error()));

  HttpResponse response;
  response.status = result->status;
  response.body = result->body;
  for (const auto& [k, v] : result->headers) response.headers.emplace_back(k, v);
  return response;
}

std::shared_ptr<HttpTransport> default_transport() {
  static auto transport = std::make_shared<HttplibTransport>();
  return transport;
}

RateLimiter::RateLimiter(double requests_per_second) : rps_(requests_per_second) {}

void RateLimiter::acquire(const std::string& key) {
  if (rps_ <= 0.0) return;
  const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / rps_));
  std::chrono::steady_clock::time_point start;
  {
    std::lock_guard lock(mu_);
    auto now = std::chrono::steady_clock::now();
    auto& slot = next_slot_[key];
    start = std::max(now, slot);
    slot = start + interval;
  }
  std::this_thread::sleep_until(start);
}

}  // namespace doc2tool
