#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doc2tool/ingestion.hpp"
#include "doc2tool/model.hpp"
#include "doc2tool/remote.hpp"

namespace doc2tool {

enum class BackendKind { RemoteChat, RemoteStructured, Heuristic, Replay };

std::string_view to_string(BackendKind kind);
std::optional<BackendKind> parse_backend_kind(std::string_view s);

struct OneShotExample {
  std::string document_text;
  std::string spec_json;
};

// Recorded model outputs keyed by source_id.
class ReplayStore {
 public:
  ReplayStore() = default;
  explicit ReplayStore(std::map<std::string, std::string> outputs) : outputs_(std::move(outputs)) {}

  // Either a JSON-lines file of {source_id, raw_output} or a directory of
  // {source_id}.json / {source_id}.txt files holding raw outputs.
  static ReplayStore load(const std::filesystem::path& path);

  void put(std::string source_id, std::string raw_output);
  std::optional<std::string> get(const std::string& source_id) const;
  size_t size() const { return outputs_.size(); }

 private:
  std::map<std::string, std::string> outputs_;
};

struct ExtractionBackend {
  BackendKind kind = BackendKind::Heuristic;
  std::optional<RemoteConfig> remote;
  std::optional<OneShotExample> one_shot;
  std::shared_ptr<const ReplayStore> replay;

  // Throws Error(ConfigInvalid) when a kind lacks what it needs.
  void check() const;
};

struct ExtractionResult {
  std::string source_id;
  std::string raw_output;
  std::optional<ApiSpec> spec;
  bool valid = false;
  std::vector<std::string> violations;
  std::string backend_kind;
  std::int64_t token_or_byte_cost = 0;
};

nlohmann::json to_json(const ExtractionResult& r);
ExtractionResult extraction_result_from_json(const nlohmann::json& j);

// Produces raw model-style output for one document.
class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual BackendKind kind() const = 0;
  // Throws Error(BackendUnreachable) on transport failure.
  virtual ChatReply generate(const ApiDocument& doc) = 0;
};

std::unique_ptr<Extractor> make_extractor(const ExtractionBackend& backend,
                                          std::shared_ptr<HttpTransport> transport = nullptr,
                                          TransportOptions options = {});

// Never throws for per-document failures; they are recorded in the result.
ExtractionResult extract_spec(const ApiDocument& doc, Extractor& extractor);
ExtractionResult extract_spec(const ApiDocument& doc, const ExtractionBackend& backend);

std::vector<ExtractionResult> extract_corpus(const std::vector<ApiDocument>& docs,
                                             Extractor& extractor, size_t workers);

// The offline extractor: recognizes "VERB url" lines, the table that follows
// them and query strings embedded in documented URLs.
ApiSpec heuristic_extract(const std::string& text);

// The message list sent to remote backends.
std::vector<ChatMessage> extraction_messages(const ApiDocument& doc,
                                             const std::optional<OneShotExample>& one_shot);

}  // namespace doc2tool
