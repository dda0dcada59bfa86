#include "doc2tool/testkit/corpus.hpp"

#include <cstdlib>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "doc2tool/io.hpp"

#ifndef DOC2TOOL_GOLDEN_DIR
#error "DOC2TOOL_GOLDEN_DIR must point at data/golden"
#endif

namespace fs = std::filesystem;

namespace doc2tool::testkit {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string cell(const std::optional<Scalar>& v) { return v ? escape(scalar_to_string(*v)) : ""; }

void render_params(std::string& out, const std::vector<Parameter>& params, const char* required) {
  for (const auto& p : params) {
    out += "<tr><td>" + escape(p.name) + "</td><td>" + escape(p.type_hint.value_or("")) + "</td><td>" +
           required + "</td><td>" + escape(p.description.value_or("")) + "</td><td>" +
           cell(p.default_value) + "</td><td>" + cell(p.example_value) + "</td></tr>\n";
  }
}

Parameter param(std::string name, std::string type, std::string description,
                std::optional<Scalar> example = std::nullopt) {
  Parameter p;
  p.name = std::move(name);
  p.type_hint = std::move(type);
  p.description = std::move(description);
  p.example_value = std::move(example);
  return p;
}

Endpoint endpoint(std::string name, std::string description, std::string url,
                  std::vector<Parameter> required, std::vector<Parameter> optional = {}) {
  Endpoint e;
  e.name = std::move(name);
  e.description = std::move(description);
  e.method = "GET";
  e.url = {std::move(url)};
  e.required_parameters = std::move(required);
  e.optional_parameters = std::move(optional);
  return e;
}

SyntheticCorpus write_corpus(const fs::path& dir, std::map<std::string, ApiSpec> specs,
                             bool leave_one_out) {
  SyntheticCorpus c;
  c.root = dir;
  c.manifest = dir / "manifest.json";
  c.config = dir / "config.json";
  c.output_dir = dir / "out";
  fs::create_directories(dir / "docs");
  fs::create_directories(dir / "ground_truth");

  nlohmann::json manifest = nlohmann::json::array();
  for (const auto& [id, spec] : specs) {
    io::write_text(dir / "docs" / (id + ".html"), render_reference_document(spec));
    io::write_json(dir / "ground_truth" / (id + ".json"), to_json(spec));
    manifest.push_back({{"source_id", id}, {"origin", "docs/" + id + ".html"}});
  }
  io::write_json(c.manifest, manifest);
  io::write_json(c.config, {{"corpus_manifest", "manifest.json"},
                            {"output_dir", "out"},
                            {"ground_truth_dir", "ground_truth"},
                            {"rate_limit_per_host", 0.0},
                            {"max_concurrency", 2},
                            {"offline", true},
                            {"leave_one_out", leave_one_out},
                            {"seed", 7}});
  c.specs = std::move(specs);
  return c;
}

}  // namespace

std::string render_reference_document(const ApiSpec& spec) {
  std::string out = "<html><body>\n";
  out += "<h1>" + escape(spec.title.value_or("API Reference")) + "</h1>\n";
  for (const auto& e : spec.endpoints) {
    out += "<h2>" + escape(e.name) + "</h2>\n";
    if (e.description) out += "<p>" + escape(*e.description) + "</p>\n";
    out += "<pre>" + escape(e.method) + " " + escape(e.url.empty() ? "" : e.url.front()) + "</pre>\n";
    for (const auto& h : e.headers) out += "<p>Header: " + escape(h) + "</p>\n";
    if (e.required_parameters.empty() && e.optional_parameters.empty()) continue;
    out += "<table>\n<tr><th>Name</th><th>Type</th><th>Required</th><th>Description</th>"
           "<th>Default</th><th>Example</th></tr>\n";
    render_params(out, e.required_parameters, "required");
    render_params(out, e.optional_parameters, "optional");
    out += "</table>\n";
  }
  out += "</body></html>\n";
  return out;
}

SyntheticCorpus write_e2e_corpus(const fs::path& dir, const std::string& base_url) {
  std::map<std::string, ApiSpec> specs;

  ApiSpec cards;
  cards.title = "Card Catalog API";
  cards.endpoints = {
      endpoint("Search Cards", "Find cards by name.", base_url + "/v1/cards",
               {param("q", "string", "Search query.", Scalar{std::string("name:gardevoir")})}),
      endpoint("Search Articles", "Full text search over help articles.", base_url + "/v1/search",
               {param("q", "string", "Search terms.", Scalar{std::string("rate limits")})}),
      endpoint("Get Missing Item", "Fetch an archived item.", base_url + "/v1/missing",
               {param("id", "string", "Item identifier.", Scalar{std::string("item-7")})}),
  };
  specs["cards"] = cards;

  ApiSpec status;
  status.title = "Status Service API";
  status.endpoints = {
      endpoint("Broken Lookup", "Look up a status record.", base_url + "/v1/broken",
               {param("q", "string", "Record query.", Scalar{std::string("abc")})}),
      endpoint("Relative Lookup", "Look up relative status.", "/v1/relative", {},
               {param("verbose", "boolean", "Include details.", Scalar{true})}),
  };
  specs["status"] = status;

  ApiSpec glyco;
  glyco.title = "Glycan Repository API";
  glyco.endpoints = {
      endpoint("List Structures", "List structures for a glycan accession.", base_url + "/v1/structures",
               {param("glytoucan_id", "string", "GlyTouCan accession of the glycan.",
                      Scalar{std::string("G00048MO")})}),
      endpoint("Get Glycan", "Fetch one glycan record.", base_url + "/v1/glycan/{glytoucan_id}",
               {param("glytoucan_id", "string", "GlyTouCan accession of the glycan.")}),
  };
  specs["glyco"] = glyco;

  return write_corpus(dir, std::move(specs), false);
}

SyntheticCorpus write_two_source_corpus(const fs::path& dir, const std::string& base_url) {
  std::map<std::string, ApiSpec> specs;

  ApiSpec glycan_db;
  glycan_db.title = "Glycan Database API";
  glycan_db.endpoints = {endpoint("Get Glycan", "Fetch one glycan record.",
                                  base_url + "/v1/glycan/{glytoucan_id}",
                                  {param("glytoucan_id", "string", "GlyTouCan accession of the glycan.",
                                         Scalar{std::string("G00048MO")})})};
  specs["glycan_db"] = glycan_db;

  ApiSpec structure_db;
  structure_db.title = "Structure Database API";
  structure_db.endpoints = {endpoint("List Structures", "List structures for a glycan accession.",
                                     base_url + "/v1/structures",
                                     {param("glytoucan_id", "string", "GlyTouCan accession of the glycan.",
                                            Scalar{std::string("G00048MO")})})};
  specs["structure_db"] = structure_db;

  return write_corpus(dir, std::move(specs), true);
}

std::string pokemon_document_text() {
  std::string s = read_golden("pokemon_page.txt");
  while (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

std::string pokemon_extraction_output() { return read_golden("pokemon_output.json"); }

ApiSpec pokemon_spec() {
  auto v = validate_spec(nlohmann::json::parse(pokemon_extraction_output()));
  if (!v.ok()) throw std::runtime_error("pokemon golden output does not validate");
  return *v.spec;
}

std::string read_golden(const std::string& name) {
  return io::read_text(fs::path(DOC2TOOL_GOLDEN_DIR) / name);
}

fs::path make_temp_dir(const std::string& prefix) {
  std::string tmpl = (fs::temp_directory_path() / (prefix + "-XXXXXX")).string();
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed for " + tmpl);
  return fs::path(buf.data());
}

}  // namespace doc2tool::testkit
