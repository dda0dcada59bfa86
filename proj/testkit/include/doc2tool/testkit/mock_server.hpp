#pragma once

#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace doc2tool::testkit {

struct RecordedRequest {
  std::string method;
  std::string path;
  std::string target;  // path and query exactly as received
  std::string body;
};

// Deterministic API server on 127.0.0.1 with a random port.
//
//   GET  /v1/cards?q=...            200 with a card list
//   GET  /v1/search                 400 when any query is present, 200 without
//   GET  /v1/missing                404
//   GET  /v1/broken                 200 carrying {"error": "invalid query"}
//   GET  /v1/glycan/{id}            200 only for id G00048MO, otherwise 404
//   GET  /v1/structures?glytoucan_id=...   200 echoing the id
//   POST /v1/chat/completions       scripted replies, see push_chat_reply
//   POST /v1/embeddings             lexical embeddings of the inputs
class MockApiServer {
 public:
  MockApiServer();
  ~MockApiServer();
  MockApiServer(const MockApiServer&) = delete;
  MockApiServer& operator=(const MockApiServer&) = delete;

  int port() const { return port_; }
  // "http://127.0.0.1:<port>"
  std::string base_url() const;

  // Queued contents for the next chat completions, served in order. When the
  // queue is empty the server answers with `default_chat_reply`.
  void push_chat_reply(std::string content);
  void set_default_chat_reply(std::string content);
  // Status for every chat/embedding call; anything but 200 simulates an outage.
  void set_model_status(int status);

  std::vector<RecordedRequest> requests() const;
  size_t count_requests(const std::string& path_prefix) const;
  void clear_requests();

 private:
  void record(const RecordedRequest& r);

  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mu_;
  std::vector<RecordedRequest> requests_;
  std::deque<std::string> chat_replies_;
  std::string default_chat_reply_;
  int model_status_ = 200;
};

}  // namespace doc2tool::testkit
