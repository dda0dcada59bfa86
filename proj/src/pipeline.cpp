#include "doc2tool/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <set>

#include "doc2tool/error.hpp"
#include "doc2tool/evaluation.hpp"
#include "doc2tool/inference.hpp"
#include "doc2tool/ingestion.hpp"
#include "doc2tool/io.hpp"
#include "doc2tool/strings.hpp"
#include "doc2tool/toolgen.hpp"
#include "doc2tool/validation.hpp"

namespace fs = std::filesystem;

namespace doc2tool {

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Extract: return "extract";
    case Stage::Evaluate: return "evaluate";
    case Stage::Generate: return "generate";
    case Stage::Validate: return "validate";
    case Stage::Infer: return "infer";
    case Stage::Report: return "report";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view s) {
  std::string k = str::to_lower(str::trim(s));
  for (auto stage : kAllStages)
    if (k == to_string(stage)) return stage;
  return std::nullopt;
}

std::vector<Stage> parse_stage_list(std::string_view list) {
  std::set<Stage> chosen;
  for (const auto& part : str::split(list, ',')) {
    if (str::trim(part).empty()) continue;
    auto s = parse_stage(part);
    if (!s) throw Error(ErrorCode::ConfigInvalid, "stage", "unknown stage '" + part + "'");
    chosen.insert(*s);
  }
  return {chosen.begin(), chosen.end()};
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

const std::set<std::string>& secret_keys() {
  static const std::set<std::string> keys = {"api_key", "apikey", "key", "token", "access_token",
                                             "secret", "password", "authorization", "bearer"};
  return keys;
}

void reject_secrets(const nlohmann::json& j, const std::string& path) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (secret_keys().count(str::to_lower(k)))
        throw Error(ErrorCode::ConfigInvalid, path + k,
                    "credentials belong in environment variables; name one with api_key_env");
      reject_secrets(v, path + k + ".");
    }
  } else if (j.is_array()) {
    for (const auto& v : j) reject_secrets(v, path);
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

}  // namespace

ProjectConfig config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "config", "expected an object");
  reject_secrets(j, "");
  ProjectConfig c;
  c.base_dir = base_dir;
  try {
    c.corpus_manifest = resolve(base_dir, j.at("corpus_manifest").get<std::string>());
    c.output_dir = resolve(base_dir, j.value("output_dir", "out"));
    if (j.contains("ground_truth_dir") && j["ground_truth_dir"].is_string())
      c.ground_truth_dir = resolve(base_dir, j["ground_truth_dir"].get<std::string>());
    if (j.contains("extraction")) c.extraction = j["extraction"];
    if (j.contains("judge")) c.judge = j["judge"];
    if (j.contains("embedding")) c.embedding = j["embedding"];
    c.rate_limit_per_host = j.value("rate_limit_per_host", 1.0);
    c.max_concurrency = j.value("max_concurrency", size_t{4});
    c.tls_verify = j.value("tls_verify", true);
    c.timeout_seconds = j.value("timeout_seconds", 50);
    c.offline = j.value("offline", false);
    c.max_doc_bytes = j.value("max_doc_bytes", size_t{512 * 1024});
    c.error_phrases = j.value("error_phrases", std::vector<std::string>{});
    c.leave_one_out = j.value("leave_one_out", false);
    if (j.contains("seed") && j["seed"].is_number_integer()) c.seed = j["seed"].get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, "config", e.what());
  }

  if (!fs::exists(c.corpus_manifest))
    throw Error(ErrorCode::ConfigInvalid, c.corpus_manifest.string(), "corpus manifest not found");
  if (c.ground_truth_dir && !fs::is_directory(*c.ground_truth_dir))
    throw Error(ErrorCode::ConfigInvalid, c.ground_truth_dir->string(), "ground truth directory not found");
  if (!parse_backend_kind(c.extraction.value("backend", "heuristic")))
    throw Error(ErrorCode::ConfigInvalid, "extraction.backend", c.extraction.value("backend", ""));
  if (auto b = c.judge.value("backend", "heuristic"); b != "heuristic" && b != "remote")
    throw Error(ErrorCode::ConfigInvalid, "judge.backend", b);
  if (auto b = c.embedding.value("backend", "lexical"); b != "lexical" && b != "remote")
    throw Error(ErrorCode::ConfigInvalid, "embedding.backend", b);
  if (c.max_concurrency == 0) c.max_concurrency = 1;
  return c;
}

ProjectConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::ConfigInvalid, path.string(), "config file not found");
  nlohmann::json j;
  try {
    j = io::read_json(path);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, path.string(), e.what());
  }
  return config_from_json(j, fs::absolute(path).parent_path());
}

Services make_services(const ProjectConfig& config, const PipelineOptions& options) {
  Services s;
  s.transport = options.transport ? options.transport : default_transport();
  s.transport_options.timeout_seconds = config.timeout_seconds;
  s.transport_options.tls_verify = config.tls_verify;
  s.transport_options.offline = config.offline || options.offline;

  auto heuristic = std::make_shared<HeuristicJudge>(
      config.error_phrases.empty() ? default_error_phrases() : config.error_phrases);
  if (config.judge.value("backend", "heuristic") == "remote") {
    auto client = std::make_shared<ChatClient>(
        remote_config_from_json(config.judge.value("remote", nlohmann::json::object())), s.transport,
        s.transport_options);
    s.judge = std::make_shared<FallbackJudge>(std::make_shared<RemoteJudge>(client), heuristic);
  } else {
    s.judge = heuristic;
  }

  const size_t dim = config.embedding.value("dimension", size_t{256});
  if (config.embedding.value("backend", "lexical") == "remote") {
    auto client = std::make_shared<EmbeddingClient>(
        remote_config_from_json(config.embedding.value("remote", nlohmann::json::object())),
        s.transport, s.transport_options);
    s.embedding = std::make_shared<RemoteEmbedding>(client, dim);
  } else {
    s.embedding = std::make_shared<LexicalEmbedding>(dim);
  }

  std::string backend = options.backend_override ? *options.backend_override
                                                  : config.extraction.value("backend", "heuristic");
  auto kind = parse_backend_kind(backend);
  if (!kind) throw Error(ErrorCode::ConfigInvalid, "backend", backend);
  s.extraction.kind = *kind;
  if (config.extraction.contains("remote"))
    s.extraction.remote = remote_config_from_json(config.extraction["remote"]);
  if (config.extraction.contains("one_shot")) {
    const auto& os = config.extraction["one_shot"];
    s.extraction.one_shot = OneShotExample{
        io::read_text(resolve(config.base_dir, os.at("document").get<std::string>())),
        io::read_text(resolve(config.base_dir, os.at("spec").get<std::string>()))};
  }
  if (config.extraction.contains("replay"))
    s.extraction.replay = std::make_shared<const ReplayStore>(
        ReplayStore::load(resolve(config.base_dir, config.extraction["replay"].get<std::string>())));
  s.extraction.check();
  return s;
}

// ---------------------------------------------------------------------------
// Stages

namespace {

struct Layout {
  fs::path root;
  fs::path docs() const { return root / "docs"; }
  fs::path specs() const { return root / "specs"; }
  fs::path metrics() const { return root / "metrics"; }
  fs::path tools() const { return root / "tools"; }
  fs::path exports() const { return root / "exports"; }
  fs::path validation() const { return root / "validation"; }
  fs::path kb() const { return root / "kb"; }
  fs::path reports() const { return root / "reports"; }

  fs::path doc_index() const { return docs() / "index.json"; }
  fs::path spec_results() const { return specs() / "results.jsonl"; }
  fs::path tool_index() const { return tools() / "index.jsonl"; }
  fs::path validation_reports() const { return validation() / "reports.jsonl"; }
};

void require(const fs::path& p, Stage stage) {
  if (!fs::exists(p)) throw Error(ErrorCode::MissingStageInput, std::string(to_string(stage)), p.string());
}

std::string file_safe(std::string_view s) {
  std::string out;
  for (unsigned char c : s) out += std::isalnum(c) || c == '-' || c == '_' || c == '.' ? char(c) : '_';
  return out.empty() ? "_" : out;
}

std::vector<ToolDescriptor> read_tools(const fs::path& path) {
  std::vector<ToolDescriptor> out;
  for (const auto& j : io::read_jsonl(path)) out.push_back(tool_from_json(j));
  return out;
}

std::vector<ValidationReport> read_reports(const fs::path& path) {
  std::vector<ValidationReport> out;
  for (const auto& j : io::read_jsonl(path)) out.push_back(validation_report_from_json(j));
  return out;
}

void stage_ingest(const ProjectConfig& config, Services& s, const Layout& out, std::ostream& log) {
  auto entries = read_manifest(config.corpus_manifest);
  LoadOptions load;
  load.transport = s.transport;
  load.transport_options = s.transport_options;
  load.max_text_bytes = config.max_doc_bytes;
  auto items = ingest_corpus(entries, *s.judge, load, config.max_concurrency);

  nlohmann::json index = nlohmann::json::array();
  size_t kept = 0;
  for (const auto& item : items) {
    nlohmann::json row = {{"source_id", item.entry.source_id},
                          {"origin", item.entry.origin},
                          {"is_api_page", item.is_api_page},
                          {"error", item.error.empty() ? nlohmann::json() : nlohmann::json(item.error)}};
    if (item.document) {
      io::write_json(out.docs() / (file_safe(item.entry.source_id) + ".json"), to_json(*item.document, true));
      row["category"] = to_json(*item.document)["category"];
      if (item.is_api_page) ++kept;
    }
    index.push_back(std::move(row));
  }
  io::write_json(out.doc_index(), index);
  log << "ingest: " << items.size() << " document(s), " << kept << " API page(s)\n";
}

void stage_extract(const ProjectConfig& config, Services& s, const Layout& out, std::ostream& log) {
  require(out.doc_index(), Stage::Extract);
  std::vector<ApiDocument> docs;
  for (const auto& row : io::read_json(out.doc_index())) {
    if (!row.value("is_api_page", false)) continue;
    auto path = out.docs() / (file_safe(row.at("source_id").get<std::string>()) + ".json");
    if (fs::exists(path)) docs.push_back(api_document_from_json(io::read_json(path)));
  }
  auto extractor = make_extractor(s.extraction, s.transport, s.transport_options);
  auto results = extract_corpus(docs, *extractor, config.max_concurrency);

  std::vector<nlohmann::json> rows;
  size_t valid = 0;
  for (const auto& r : results) {
    rows.push_back(to_json(r));
    if (r.valid && r.spec) {
      ++valid;
      io::write_json(out.specs() / (file_safe(r.source_id) + ".json"), to_json(*r.spec));
    }
  }
  io::write_jsonl(out.spec_results(), rows);
  log << "extract: " << valid << "/" << results.size() << " valid spec(s) via "
      << to_string(s.extraction.kind) << "\n";
}

void stage_evaluate(const ProjectConfig& config, Services& s, const Layout& out, std::ostream& log) {
  require(out.spec_results(), Stage::Evaluate);
  if (!config.ground_truth_dir) {
    log << "evaluate: warning: no ground_truth_dir configured, skipping\n";
    return;
  }
  std::vector<ExtractionResult> results;
  for (const auto& j : io::read_jsonl(out.spec_results())) results.push_back(extraction_result_from_json(j));

  std::map<std::string, ApiSpec> truth;
  for (const auto& r : results) {
    auto path = *config.ground_truth_dir / (r.source_id + ".json");
    if (!fs::exists(path)) continue;
    auto v = validate_spec(io::read_json(path));
    if (v.ok()) truth[r.source_id] = *v.spec;
    else log << "evaluate: warning: ground truth for " << r.source_id << " is invalid\n";
  }
  if (truth.empty() || results.empty()) {
    log << "evaluate: warning: no ground truth matches the extracted documents, skipping\n";
    return;
  }
  auto metrics = compute_metrics(results, truth, *s.embedding);
  io::write_json(out.metrics() / "metrics.json", to_json(metrics));
  io::write_text(out.metrics() / "table.txt",
                 format_metrics_table(metrics, std::string(to_string(s.extraction.kind))));
  log << "evaluate: " << metrics.matched_endpoints << " matched endpoint(s)\n";
}

void stage_generate(const ProjectConfig& config, Services&, const Layout& out, std::ostream& log) {
  require(out.spec_results(), Stage::Generate);
  std::vector<ToolDescriptor> all;
  for (const auto& j : io::read_jsonl(out.spec_results())) {
    auto r = extraction_result_from_json(j);
    if (!r.valid || !r.spec) continue;
    for (auto& t : generate_tools(*r.spec, r.source_id)) {
      t.timeout_seconds = config.timeout_seconds;
      t.tls_verify = config.tls_verify;
      io::write_json(out.tools() / file_safe(r.source_id) / (t.tool_name + ".tool.json"), to_json(t));
      io::write_text(out.exports() / file_safe(r.source_id) / (t.tool_name + ".py"),
                     export_function_source(t));
      all.push_back(std::move(t));
    }
  }
  std::vector<nlohmann::json> rows;
  for (const auto& t : all) rows.push_back(to_json(t));
  io::write_jsonl(out.tool_index(), rows);
  for (const auto& [origin, tools] : group_by_host(all))
    io::write_text(out.exports() / (file_safe(tools.front().url.authority) + ".openapi.yaml"),
                   export_openapi(tools));
  log << "generate: " << all.size() << " tool(s)\n";
}

void stage_validate(const ProjectConfig& config, Services& s, const Layout& out, std::ostream& log) {
  require(out.tool_index(), Stage::Validate);
  auto tools = read_tools(out.tool_index());
  auto ctx = make_validation_context(s.transport, s.transport_options, config.rate_limit_per_host);
  auto reports = validate_tools(tools, *s.judge, ctx, config.max_concurrency);

  std::vector<nlohmann::json> rows;
  for (const auto& r : reports) rows.push_back(to_json(r));
  io::write_jsonl(out.validation_reports(), rows);

  auto counts = count_errors(reports);
  auto causes = estimate_causes(counts);
  nlohmann::json summary = {{"tools", reports.size()}};
  for (auto t : kAllErrorTypes) summary["counts"][std::string(to_string(t))] = counts[t];
  for (auto c : kAllCauses) summary["causes"][std::string(display_name(c))] = format_range(causes.at(c));
  io::write_json(out.validation() / "summary.json", summary);
  log << "validate: " << counts[ErrorType::PassedValidation] << "/" << reports.size() << " passed\n";
}

void stage_infer(const ProjectConfig& config, Services& s, const Layout& out, std::ostream& log) {
  require(out.validation_reports(), Stage::Infer);
  require(out.tool_index(), Stage::Infer);
  auto tools = read_tools(out.tool_index());
  auto reports = read_reports(out.validation_reports());
  auto ctx = make_validation_context(s.transport, s.transport_options, config.rate_limit_per_host);

  ParameterKb kb = build_kb(reports, tools, *s.embedding);
  std::vector<nlohmann::json> outcomes;
  std::vector<nlohmann::json> updated;
  size_t successes = 0;
  for (const auto& r : reports) {
    if (r.error_type != ErrorType::NoParameterValue && r.error_type != ErrorType::WrongParameterValue)
      continue;
    auto it = std::find_if(tools.begin(), tools.end(), [&](const ToolDescriptor& t) {
      return t.tool_name == r.tool_name && t.source_id == r.source_id;
    });
    if (it == tools.end()) continue;
    ToolDescriptor tool = *it;
    auto o = infer_parameters(tool, kb, *s.judge, ctx, *s.embedding);
    if (o.success) {
      ++successes;
      updated.push_back(to_json(tool));
    }
    outcomes.push_back(to_json(o));
  }

  std::vector<nlohmann::json> kb_rows;
  for (const auto& e : kb.entries()) kb_rows.push_back(to_json(e));
  io::write_jsonl(out.kb() / "kb.jsonl", kb_rows);
  io::write_jsonl(out.kb() / "inferred_tools.jsonl", updated);
  io::write_json(out.kb() / "inference.json",
                 {{"outcomes", outcomes}, {"attempted", outcomes.size()}, {"successes", successes}});
  log << "infer: " << successes << "/" << outcomes.size() << " tool(s) repaired, kb has " << kb.size()
      << " entries\n";

  if (config.leave_one_out) {
    std::set<std::string> sources;
    for (const auto& t : tools) sources.insert(t.source_id);
    if (sources.size() < 2) {
      log << "infer: warning: leave-one-out needs at least two sources, skipping\n";
    } else {
      auto summary = leave_one_api_out(tools, reports, *s.embedding, *s.judge, ctx);
      io::write_json(out.kb() / "leave_one_out.json", to_json(summary));
      log << "infer: leave-one-out " << summary.successes << "/" << summary.outcomes.size() << "\n";
    }
  }
}

void stage_report(const ProjectConfig&, Services& s, const Layout& out, std::ostream& log) {
  require(out.validation_reports(), Stage::Report);
  std::string text;
  if (fs::exists(out.metrics() / "table.txt")) text += "Extraction\n" + io::read_text(out.metrics() / "table.txt") + "\n";
  auto reports = read_reports(out.validation_reports());
  text += format_error_tables({{std::string(to_string(s.extraction.kind)), count_errors(reports)}});
  if (fs::exists(out.kb() / "inference.json")) {
    auto inf = io::read_json(out.kb() / "inference.json");
    text += "\nParameter inference: " + std::to_string(inf.value("successes", 0)) + "/" +
            std::to_string(inf.value("attempted", 0)) + " tool(s) repaired\n";
  }
  if (fs::exists(out.kb() / "leave_one_out.json")) {
    auto loo = io::read_json(out.kb() / "leave_one_out.json");
    text += "Leave-one-out: " + std::to_string(loo.value("successes", 0)) + "/" +
            std::to_string(loo.value("tools", 0)) + " tool(s), mean attempts " +
            nlohmann::json(loo.value("mean_attempts", 0.0)).dump() + "\n";
  }
  io::write_text(out.reports() / "report.txt", text);
  log << text;
}

}  // namespace

void run_stage(Stage stage, const ProjectConfig& config, Services& services, std::ostream& log) {
  Layout out{config.output_dir};
  switch (stage) {
    case Stage::Ingest: return stage_ingest(config, services, out, log);
    case Stage::Extract: return stage_extract(config, services, out, log);
    case Stage::Evaluate: return stage_evaluate(config, services, out, log);
    case Stage::Generate: return stage_generate(config, services, out, log);
    case Stage::Validate: return stage_validate(config, services, out, log);
    case Stage::Infer: return stage_infer(config, services, out, log);
    case Stage::Report: return stage_report(config, services, out, log);
  }
}

PipelineResult run_pipeline(const std::vector<Stage>& stages, const ProjectConfig& config,
                            const PipelineOptions& options, std::ostream& log) {
  PipelineResult result;
  std::set<Stage> wanted(stages.begin(), stages.end());
  try {
    Services services = make_services(config, options);
    if (auto seed = options.seed ? options.seed : config.seed) log << "seed: " << *seed << "\n";
    for (auto stage : kAllStages) {
      if (!wanted.count(stage)) continue;
      run_stage(stage, config, services, log);
      result.messages.push_back(std::string(to_string(stage)) + ": ok");
    }
  } catch (const Error& e) {
    result.exit_code = 1;
    result.messages.push_back(e.what());
    log << "error: " << e.what() << "\n";
  }
  return result;
}

}  // namespace doc2tool
