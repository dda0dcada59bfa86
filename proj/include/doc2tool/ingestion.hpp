#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doc2tool/http.hpp"
#include "doc2tool/judge.hpp"

namespace doc2tool {

struct ApiDocument {
  std::string source_id;
  std::string origin;
  std::string raw;
  std::string text;
  std::optional<DocCategory> category;
  std::optional<std::string> analysis;
  bool truncated = false;
};

struct LoadOptions {
  std::shared_ptr<HttpTransport> transport;  // defaults to the httplib transport
  TransportOptions transport_options{};
  // Cleaned text beyond this many bytes is dropped from the tail.
  size_t max_text_bytes = 512 * 1024;
};

// Reads a local file or fetches an http(s) URL, then cleans it.
// Throws Error(FetchFailed) or Error(EmptyDocument).
ApiDocument load_and_clean(const std::string& source_id, const std::string& origin,
                           const LoadOptions& options = {});

// Cleans markup already in memory.
ApiDocument clean_document(const std::string& source_id, const std::string& origin,
                           std::string raw, size_t max_text_bytes = 512 * 1024);

bool filter_api_pages(const ApiDocument& doc, JudgeBackend& judge);
DocClassification classify_document(const ApiDocument& doc, JudgeBackend& judge);

struct ManifestEntry {
  std::string source_id;
  std::string origin;
};

// Manifest: JSON array of {source_id, origin}. Relative file origins are
// resolved against the manifest's directory. Duplicate ids are rejected.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest);

struct CorpusItem {
  ManifestEntry entry;
  std::optional<ApiDocument> document;
  std::string error;  // set when document is absent
  bool is_api_page = false;
};

// Loads, filters and classifies every manifest entry on a bounded pool.
std::vector<CorpusItem> ingest_corpus(const std::vector<ManifestEntry>& entries,
                                      JudgeBackend& judge, const LoadOptions& options,
                                      size_t workers);

nlohmann::json to_json(const ApiDocument& doc, bool include_content = false);
ApiDocument api_document_from_json(const nlohmann::json& j);

}  // namespace doc2tool
