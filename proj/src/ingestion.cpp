#include "doc2tool/ingestion.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "doc2tool/error.hpp"
#include "doc2tool/html.hpp"
#include "doc2tool/model.hpp"
#include "doc2tool/parallel.hpp"
#include "doc2tool/strings.hpp"

namespace doc2tool {

namespace {

bool is_remote(const std::string& origin) {
  return str::starts_with_icase(origin, "http://") || str::starts_with_icase(origin, "https://");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FetchFailed, path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Cuts at a UTF-8 character boundary no later than `limit`.
void truncate_utf8(std::string& s, size_t limit) {
  if (s.size() <= limit) return;
  size_t cut = limit;
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
  s.resize(cut);
}

}  // namespace

ApiDocument clean_document(const std::string& source_id, const std::string& origin,
                           std::string raw, size_t max_text_bytes) {
  ApiDocument doc;
  doc.source_id = source_id;
  doc.origin = origin;
  doc.text = html_to_text(raw);
  doc.raw = std::move(raw);
  if (doc.text.empty()) throw Error(ErrorCode::EmptyDocument, source_id);
  if (doc.text.size() > max_text_bytes) {
    truncate_utf8(doc.text, max_text_bytes);
    doc.truncated = true;
  }
  return doc;
}

ApiDocument load_and_clean(const std::string& source_id, const std::string& origin,
                           const LoadOptions& options) {
  std::string raw;
  if (is_remote(origin)) {
    auto transport = options.transport ? options.transport : default_transport();
    HttpRequest req;
    req.url = origin;
    HttpResponse res;
    try {
      res = transport->send(req, options.transport_options);
    } catch (const TransportError& e) {
      throw Error(ErrorCode::FetchFailed, origin, e.what());
    }
    if (res.status != 200)
      throw Error(ErrorCode::FetchFailed, origin, "status " + std::to_string(res.status));
    raw = std::move(res.body);
  } else {
    raw = read_file(origin);
  }
  return clean_document(source_id, origin, std::move(raw), options.max_text_bytes);
}

bool filter_api_pages(const ApiDocument& doc, JudgeBackend& judge) {
  return judge.is_api_page(doc.text);
}

DocClassification classify_document(const ApiDocument& doc, JudgeBackend& judge) {
  auto c = judge.classify(doc.text);
  if (c.analysis.size() > 300) c.analysis.resize(300);
  return c;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::ConfigInvalid, manifest.string(), "cannot open manifest");
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array())
    throw Error(ErrorCode::ConfigInvalid, manifest.string(), "manifest must be a JSON array");
  std::vector<ManifestEntry> out;
  std::set<std::string> seen;
  const auto base = manifest.parent_path();
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("source_id") || !item.contains("origin"))
      throw Error(ErrorCode::ConfigInvalid, manifest.string(), "entry needs source_id and origin");
    ManifestEntry e{item["source_id"].get<std::string>(), item["origin"].get<std::string>()};
    if (!seen.insert(e.source_id).second)
      throw Error(ErrorCode::ConfigInvalid, e.source_id, "duplicate source_id");
    if (!is_remote(e.origin) && std::filesystem::path(e.origin).is_relative())
      e.origin = (base / e.origin).lexically_normal().string();
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CorpusItem> ingest_corpus(const std::vector<ManifestEntry>& entries,
                                      JudgeBackend& judge, const LoadOptions& options,
                                      size_t workers) {
  return parallel_map(entries, workers, [&](const ManifestEntry& entry) {
    CorpusItem item;
    item.entry = entry;
    try {
      auto doc = load_and_clean(entry.source_id, entry.origin, options);
      item.is_api_page = filter_api_pages(doc, judge);
      auto c = classify_document(doc, judge);
      doc.category = c.category;
      doc.analysis = c.analysis;
      item.document = std::move(doc);
    } catch (const Error& e) {
      item.error = e.what();
    }
    return item;
  });
}

nlohmann::json to_json(const ApiDocument& doc, bool include_content) {
  nlohmann::json j = {{"source_id", doc.source_id}, {"origin", doc.origin}, {"truncated", doc.truncated}};
  j["category"] = doc.category ? nlohmann::json(std::string(to_string(*doc.category))) : nlohmann::json();
  j["analysis"] = doc.analysis ? nlohmann::json(*doc.analysis) : nlohmann::json();
  if (include_content) {
    j["raw"] = doc.raw;
    j["text"] = doc.text;
  }
  return j;
}

ApiDocument api_document_from_json(const nlohmann::json& j) {
  ApiDocument doc;
  doc.source_id = j.at("source_id").get<std::string>();
  doc.origin = j.value("origin", "");
  doc.raw = j.value("raw", "");
  doc.text = j.value("text", "");
  doc.truncated = j.value("truncated", false);
  if (j.contains("category") && j["category"].is_string())
    doc.category = parse_doc_category(j["category"].get<std::string>());
  if (j.contains("analysis") && j["analysis"].is_string()) doc.analysis = j["analysis"];
  return doc;
}

}  // namespace doc2tool
