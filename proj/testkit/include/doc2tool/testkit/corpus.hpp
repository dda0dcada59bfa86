#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "doc2tool/model.hpp"

namespace doc2tool::testkit {

// An HTML page the heuristic extractor reads back into `spec`: a heading per
// endpoint, a "METHOD url" line and a parameter table.
std::string render_reference_document(const ApiSpec& spec);

struct SyntheticCorpus {
  std::filesystem::path root;
  std::filesystem::path manifest;
  std::filesystem::path config;
  std::filesystem::path output_dir;
  std::map<std::string, ApiSpec> specs;  // by source_id
};

// Three documents against the mock server covering a passing tool, a tool
// that needs the retry without params, a 404, an error body, a URL without
// a base and a gated path parameter with no documented value.
SyntheticCorpus write_e2e_corpus(const std::filesystem::path& dir, const std::string& base_url);

// Two sources that both pass validation; each one's gated value can be
// recovered only from the other source.
SyntheticCorpus write_two_source_corpus(const std::filesystem::path& dir, const std::string& base_url);

// The card search page and its recorded extraction output.
inline constexpr const char* kPokemonSourceId = "pokemon";
std::string pokemon_document_text();
std::string pokemon_extraction_output();
ApiSpec pokemon_spec();

// Contents of a file under data/golden.
std::string read_golden(const std::string& name);

// A fresh empty directory under the system temp dir.
std::filesystem::path make_temp_dir(const std::string& prefix);

}  // namespace doc2tool::testkit
