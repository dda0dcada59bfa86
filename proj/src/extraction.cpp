#include "doc2tool/extraction.hpp"

#include <cctype>
#include <set>

#include "doc2tool/error.hpp"
#include "doc2tool/http.hpp"
#include "doc2tool/io.hpp"
#include "doc2tool/json_repair.hpp"
#include "doc2tool/parallel.hpp"
#include "doc2tool/prompts.hpp"
#include "doc2tool/strings.hpp"

namespace doc2tool {

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::RemoteChat: return "remote_chat";
    case BackendKind::RemoteStructured: return "remote_structured";
    case BackendKind::Heuristic: return "heuristic";
    case BackendKind::Replay: return "replay";
  }
  return "heuristic";
}

std::optional<BackendKind> parse_backend_kind(std::string_view s) {
  std::string k = str::to_lower(s);
  if (k == "remote_chat" || k == "chat") return BackendKind::RemoteChat;
  if (k == "remote_structured" || k == "structured") return BackendKind::RemoteStructured;
  if (k == "heuristic") return BackendKind::Heuristic;
  if (k == "replay") return BackendKind::Replay;
  return std::nullopt;
}

ReplayStore ReplayStore::load(const std::filesystem::path& path) {
  ReplayStore store;
  if (std::filesystem::is_directory(path)) {
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (!entry.is_regular_file()) continue;
      auto ext = entry.path().extension().string();
      if (ext != ".json" && ext != ".txt") continue;
      store.put(entry.path().stem().string(), io::read_text(entry.path()));
    }
    return store;
  }
  for (const auto& row : io::read_jsonl(path)) {
    if (!row.contains("source_id") || !row.contains("raw_output"))
      throw Error(ErrorCode::ConfigInvalid, path.string(), "replay rows need source_id and raw_output");
    store.put(row["source_id"].get<std::string>(), row["raw_output"].get<std::string>());
  }
  return store;
}

void ReplayStore::put(std::string source_id, std::string raw_output) {
  outputs_[std::move(source_id)] = std::move(raw_output);
}

std::optional<std::string> ReplayStore::get(const std::string& source_id) const {
  auto it = outputs_.find(source_id);
  if (it == outputs_.end()) return std::nullopt;
  return it->second;
}

void ExtractionBackend::check() const {
  switch (kind) {
    case BackendKind::RemoteChat:
    case BackendKind::RemoteStructured:
      if (!remote || remote->endpoint_url.empty() || remote->model.empty())
        throw Error(ErrorCode::ConfigInvalid, std::string(to_string(kind)),
                    "remote backends need endpoint_url and model");
      break;
    case BackendKind::Replay:
      if (!replay) throw Error(ErrorCode::ConfigInvalid, "replay", "replay backend needs a store");
      break;
    case BackendKind::Heuristic:
      break;
  }
}

nlohmann::json to_json(const ExtractionResult& r) {
  nlohmann::json j = {{"source_id", r.source_id},
                      {"raw_output", r.raw_output},
                      {"valid", r.valid},
                      {"violations", r.violations},
                      {"backend_kind", r.backend_kind},
                      {"token_or_byte_cost", r.token_or_byte_cost}};
  j["spec"] = r.spec ? to_json(*r.spec) : nlohmann::json();
  return j;
}

ExtractionResult extraction_result_from_json(const nlohmann::json& j) {
  ExtractionResult r;
  r.source_id = j.value("source_id", "");
  r.raw_output = j.value("raw_output", "");
  r.valid = j.value("valid", false);
  r.violations = j.value("violations", std::vector<std::string>{});
  r.backend_kind = j.value("backend_kind", "");
  r.token_or_byte_cost = j.value("token_or_byte_cost", std::int64_t{0});
  if (j.contains("spec") && !j["spec"].is_null()) {
    auto v = validate_spec(j["spec"]);
    if (v.ok()) r.spec = std::move(v.spec);
  }
  r.valid = r.valid && r.spec.has_value();
  return r;
}

namespace {

const std::set<std::string>& verbs() {
  static const std::set<std::string> v = {"GET", "POST", "PUT", "PATCH", "DELETE", "HEAD", "OPTIONS"};
  return v;
}

std::vector<std::string> line_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string clean_url_token(std::string tok) {
  while (!tok.empty() && std::string("(\"'`<").find(tok.front()) != std::string::npos)
    tok.erase(tok.begin());
  while (!tok.empty() && std::string(")\"'`>,.;").find(tok.back()) != std::string::npos)
    tok.pop_back();
  return tok;
}

bool looks_like_url(const std::string& tok) {
  return str::starts_with_icase(tok, "http://") || str::starts_with_icase(tok, "https://") ||
         (tok.size() > 1 && tok[0] == '/' && tok[1] != '/');
}

struct VerbLine {
  std::string method;
  std::string url;
};

std::optional<VerbLine> parse_verb_line(const std::string& line) {
  auto toks = line_tokens(line);
  for (size_t i = 0; i + 1 < toks.size(); ++i) {
    if (!verbs().count(toks[i])) continue;
    std::string url = clean_url_token(toks[i + 1]);
    if (looks_like_url(url)) return VerbLine{toks[i], url};
  }
  return std::nullopt;
}

bool is_table_row(const std::string& line) { return line.rfind("|", 0) == 0; }

std::vector<std::string> table_cells(const std::string& line) {
  auto parts = str::split(line, '|');
  std::vector<std::string> cells;
  for (size_t i = 1; i < parts.size(); ++i) cells.push_back(str::trim(parts[i]));
  return cells;
}

std::optional<Scalar> parse_cell_scalar(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  if (cell == "true") return Scalar{true};
  if (cell == "false") return Scalar{false};
  bool numeric = cell.size() <= 18;
  for (size_t i = 0; i < cell.size() && numeric; ++i) {
    char c = cell[i];
    if (!(std::isdigit(static_cast<unsigned char>(c)) || (i == 0 && c == '-' && cell.size() > 1)))
      numeric = false;
  }
  if (numeric && !(cell.size() > 1 && cell[0] == '0') && !(cell.size() > 2 && cell.rfind("-0", 0) == 0))
    return Scalar{static_cast<std::int64_t>(std::stoll(cell))};
  return Scalar{cell};
}

struct Columns {
  int name = -1, type = -1, required = -1, description = -1, def = -1, example = -1;
};

std::optional<Columns> header_columns(const std::vector<std::string>& cells) {
  Columns c;
  for (size_t i = 0; i < cells.size(); ++i) {
    std::string h = str::to_lower(cells[i]);
    int idx = static_cast<int>(i);
    if (h == "name" || h == "parameter" || h == "param") c.name = idx;
    else if (h == "type") c.type = idx;
    else if (h == "required") c.required = idx;
    else if (h == "description") c.description = idx;
    else if (h == "default") c.def = idx;
    else if (h == "example") c.example = idx;
  }
  if (c.name < 0) return std::nullopt;
  return c;
}

std::string cell_at(const std::vector<std::string>& cells, int idx) {
  if (idx < 0 || static_cast<size_t>(idx) >= cells.size()) return {};
  return cells[static_cast<size_t>(idx)];
}

void absorb_query(Endpoint& e) {
  std::string& url = e.url.front();
  auto q = url.find('?');
  if (q == std::string::npos) return;
  std::string query = url.substr(q + 1);
  url.resize(q);
  std::set<std::string> known;
  for (const auto& p : e.required_parameters) known.insert(p.name);
  for (const auto& p : e.optional_parameters) known.insert(p.name);
  for (const auto& pair : str::split(query, '&')) {
    if (pair.empty()) continue;
    auto eq = pair.find('=');
    std::string key = percent_decode(pair.substr(0, eq));
    if (key.empty() || known.count(key) || key.find_first_of(" \t") != std::string::npos) continue;
    Parameter p;
    p.name = key;
    if (eq != std::string::npos && eq + 1 < pair.size())
      p.example_value = Scalar{percent_decode(pair.substr(eq + 1))};
    known.insert(key);
    e.required_parameters.push_back(std::move(p));
  }
}

}  // namespace

ApiSpec heuristic_extract(const std::string& text) {
  auto lines = str::split(text, '\n');
  for (auto& l : lines) l = str::trim(l);

  ApiSpec spec;
  size_t region_start = 0;
  if (!lines.empty() && !lines[0].empty() && !parse_verb_line(lines[0]) && !is_table_row(lines[0])) {
    spec.title = lines[0];
    region_start = 1;
  }

  size_t i = region_start;
  while (i < lines.size()) {
    auto verb = parse_verb_line(lines[i]);
    if (!verb) {
      ++i;
      continue;
    }
    Endpoint e;
    e.method = verb->method;
    e.url.push_back(verb->url);

    std::vector<std::string> region;
    for (size_t k = region_start; k < i; ++k)
      if (!lines[k].empty()) region.push_back(lines[k]);
    if (!region.empty() && region.size() <= 3) {
      e.name = region.front();
      std::vector<std::string> rest(region.begin() + 1, region.end());
      if (!rest.empty()) e.description = str::join(rest, " ");
    } else {
      auto parts = split_url(verb->url);
      e.name = verb->method + " " + (parts.path.empty() ? "/" : parts.path);
      if (!region.empty()) e.description = region.back();
    }

    size_t j = i + 1;
    while (j < lines.size() && str::starts_with_icase(lines[j], "Header:")) {
      e.headers.push_back(str::trim(lines[j].substr(7)));
      ++j;
    }
    if (j < lines.size() && is_table_row(lines[j])) {
      if (auto cols = header_columns(table_cells(lines[j]))) {
        ++j;
        while (j < lines.size() && is_table_row(lines[j])) {
          auto cells = table_cells(lines[j]);
          ++j;
          Parameter p;
          p.name = cell_at(cells, cols->name);
          if (p.name.empty() || p.name.find_first_of(" \t") != std::string::npos) continue;
          if (auto t = cell_at(cells, cols->type); !t.empty()) p.type_hint = t;
          if (auto d = cell_at(cells, cols->description); !d.empty()) p.description = d;
          p.default_value = parse_cell_scalar(cell_at(cells, cols->def));
          p.example_value = parse_cell_scalar(cell_at(cells, cols->example));
          std::string req = str::to_lower(cell_at(cells, cols->required));
          bool required = cols->required < 0 || req == "required" || req == "yes" || req == "true";
          (required ? e.required_parameters : e.optional_parameters).push_back(std::move(p));
        }
      }
    }
    absorb_query(e);
    spec.endpoints.push_back(std::move(e));
    region_start = j;
    i = j;
  }
  return spec;
}

std::vector<ChatMessage> extraction_messages(const ApiDocument& doc,
                                             const std::optional<OneShotExample>& one_shot) {
  std::string prompt(prompts::kExtractionInstruction);
  if (one_shot) {
    prompt += "\n\nExample API documentation:\n" + one_shot->document_text +
              "\n\nExample output:\n" + one_shot->spec_json;
  }
  prompt += "\n\nAPI documentation:\n" + doc.text;
  return {{"user", prompt}};
}

namespace {

class HeuristicExtractor final : public Extractor {
 public:
  BackendKind kind() const override { return BackendKind::Heuristic; }
  ChatReply generate(const ApiDocument& doc) override {
    return {io::dump(to_json(heuristic_extract(doc.text))),
            static_cast<std::int64_t>(doc.text.size())};
  }
};

class ReplayExtractor final : public Extractor {
 public:
  explicit ReplayExtractor(std::shared_ptr<const ReplayStore> store) : store_(std::move(store)) {}
  BackendKind kind() const override { return BackendKind::Replay; }
  ChatReply generate(const ApiDocument& doc) override {
    auto out = store_->get(doc.source_id);
    if (!out) throw Error(ErrorCode::BackendUnreachable, doc.source_id, "no recorded response");
    return {*out, static_cast<std::int64_t>(out->size())};
  }

 private:
  std::shared_ptr<const ReplayStore> store_;
};

class RemoteExtractor final : public Extractor {
 public:
  RemoteExtractor(BackendKind kind, std::unique_ptr<ChatClient> client,
                  std::optional<OneShotExample> one_shot)
      : kind_(kind), client_(std::move(client)), one_shot_(std::move(one_shot)) {}
  BackendKind kind() const override { return kind_; }
  ChatReply generate(const ApiDocument& doc) override {
    std::optional<nlohmann::json> schema;
    if (kind_ == BackendKind::RemoteStructured) schema = prompts::api_extraction_schema();
    auto reply = client_->complete(extraction_messages(doc, one_shot_), schema, "API");
    if (reply.total_tokens == 0) reply.total_tokens = static_cast<std::int64_t>(reply.content.size());
    return reply;
  }

 private:
  BackendKind kind_;
  std::unique_ptr<ChatClient> client_;
  std::optional<OneShotExample> one_shot_;
};

}  // namespace

std::unique_ptr<Extractor> make_extractor(const ExtractionBackend& backend,
                                          std::shared_ptr<HttpTransport> transport,
                                          TransportOptions options) {
  backend.check();
  switch (backend.kind) {
    case BackendKind::Heuristic:
      return std::make_unique<HeuristicExtractor>();
    case BackendKind::Replay:
      return std::make_unique<ReplayExtractor>(backend.replay);
    case BackendKind::RemoteChat:
    case BackendKind::RemoteStructured:
      return std::make_unique<RemoteExtractor>(
          backend.kind,
          std::make_unique<ChatClient>(*backend.remote, transport ? transport : default_transport(),
                                       options),
          backend.one_shot);
  }
  throw Error(ErrorCode::ConfigInvalid, "extraction backend");
}

ExtractionResult extract_spec(const ApiDocument& doc, Extractor& extractor) {
  ExtractionResult r;
  r.source_id = doc.source_id;
  r.backend_kind = std::string(to_string(extractor.kind()));
  ChatReply reply;
  try {
    reply = extractor.generate(doc);
  } catch (const Error& e) {
    r.violations.push_back(e.what());
    return r;
  }
  r.raw_output = reply.content;
  r.token_or_byte_cost = reply.total_tokens;

  nlohmann::json parsed;
  try {
    parsed = repair_json(r.raw_output);
  } catch (const Error& e) {
    r.violations.push_back(e.what());
    return r;
  }
  auto v = validate_spec(parsed);
  for (const auto& violation : v.violations) r.violations.push_back(violation.describe());
  if (v.ok()) {
    r.spec = std::move(v.spec);
    r.valid = true;
  }
  return r;
}

ExtractionResult extract_spec(const ApiDocument& doc, const ExtractionBackend& backend) {
  auto extractor = make_extractor(backend);
  return extract_spec(doc, *extractor);
}

std::vector<ExtractionResult> extract_corpus(const std::vector<ApiDocument>& docs,
                                             Extractor& extractor, size_t workers) {
  return parallel_map(docs, workers,
                      [&](const ApiDocument& doc) { return extract_spec(doc, extractor); });
}

}  // namespace doc2tool
