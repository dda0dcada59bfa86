// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "doc2tool/embedding.hpp"
#include "doc2tool/evaluation.hpp"
#include "doc2tool/extraction.hpp"
#include "doc2tool/http.hpp"
#include "doc2tool/inference.hpp"
#include "doc2tool/io.hpp"
#include "doc2tool/pipeline.hpp"
#include "doc2tool/testkit/corpus.hpp"
#include "doc2tool/testkit/mock_server.hpp"
#include "doc2tool/toolgen.hpp"
#include "doc2tool/url_template.hpp"
#include "doc2tool/validation.hpp"

using namespace doc2tool;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Filled by the end-to-end run and reused by the partition check.
std::vector<std::vector<ValidationReport>> g_validation_runs;

struct Failure {
  std::string why;
};

void require(bool ok, const std::string& why) {
  if (!ok) throw Failure{why};
}

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

ErrorCounts counts_of(std::int64_t mep, std::int64_t mbu, std::int64_t fv, std::int64_t ar, std::int64_t npv,
                      std::int64_t wpv) {
  return {{ErrorType::MissingEndpointPath, mep}, {ErrorType::MissingBaseUrl, mbu},
          {ErrorType::FailedValidation, fv},     {ErrorType::AbnormalResponse, ar},
          {ErrorType::NoParameterValue, npv},    {ErrorType::WrongParameterValue, wpv}};
}

std::string ranges(const CauseEstimate& e) {
  std::string out;
  for (auto c : kAllCauses) out += (out.empty() ? "" : " ") + format_range(e.at(c));
  return out;
}

std::string cause_estimation() {
  auto start = Clock::now();
  auto gt = estimate_causes(counts_of(0, 4, 9, 23, 14, 10));
  auto one_shot = estimate_causes(counts_of(0, 1, 4, 5, 0, 1));
  double ms = ms_since(start);
  require(ranges(gt) == "0-18 0-4 19-56 0-32", "ground truth row gave " + ranges(gt));
  require(ranges(one_shot) == "0-1 0-1 5-10 0-9", "one-shot row gave " + ranges(one_shot));
  require(ms < 1.0, "took " + std::to_string(ms) + " ms");
  return ranges(gt) + " | " + ranges(one_shot);
}

std::string golden_round_trip() {
  ApiDocument doc;
  doc.source_id = testkit::kPokemonSourceId;
  doc.text = testkit::pokemon_document_text();
  ExtractionBackend backend;
  backend.kind = BackendKind::Replay;
  auto store = std::make_shared<ReplayStore>();
  store->put(doc.source_id, testkit::pokemon_extraction_output());
  backend.replay = store;

  auto r = extract_spec(doc, backend);
  require(r.valid && r.spec, "replayed output did not validate");
  require(*r.spec == testkit::pokemon_spec(), "spec differs from the recorded one");
  auto tool = generate_tool(r.spec->endpoints.at(0), doc.source_id);
  require(tool.tool_name == "search_cards", "tool name " + tool.tool_name);
  const ToolArg* q = tool.find_arg("q");
  require(q && q->required && q->location == ArgLocation::Query, "q is not a required query arg");
  require(q->example_value && scalar_to_string(*q->example_value) == "name:gardevoir", "q example");
  auto src = export_function_source(tool);
  require(src.find("Missing required parameter: q") != std::string::npos, "assert message missing");
  require(src.find("timeout=50") != std::string::npos, "timeout=50 missing");
  return "search_cards(q='name:gardevoir'), timeout=50";
}

std::string url_templates() {
  auto start = Clock::now();
  std::set<std::string> canon;
  for (const char* u : {"https://h.example/u/:x/v", "https://h.example/u/{x}/v", "https://h.example/u/<x>/v"})
    canon.insert(parse_url_template(u).canonical());
  require(canon.size() == 1 && *canon.begin() == "https://h.example/u/{x}/v", "syntaxes disagree");

  std::mt19937_64 rng(42);
  const std::string name_first = "abcdefghijklmnopqrstuvwxyz_", name_rest = "abcdefghijklmnopqrstuvwxyz0123456789_";
  const std::string lit = "abcdefghijklmnopqrstuvwxyz0123456789-._~";
  size_t failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::string input = rng() % 5 ? "https://api" + std::to_string(trial) + ".example" : "";
    std::string normalized = input;
    for (size_t s = 0, n = 1 + rng() % 5; s < n; ++s) {
      input += "/";
      normalized += "/";
      if (rng() % 2) {
        std::string t;
        for (size_t i = 0, k = 1 + rng() % 8; i < k; ++i) t += lit[rng() % lit.size()];
        input += t;
        normalized += t;
        continue;
      }
      std::string name(1, name_first[rng() % name_first.size()]);
      for (size_t i = 0, k = rng() % 6; i < k; ++i) name += name_rest[rng() % name_rest.size()];
      const int syntax = static_cast<int>(rng() % 3);
      input += syntax == 0 ? ":" + name : syntax == 1 ? "{" + name + "}" : "<" + name + ">";
      normalized += "{" + name + "}";
    }
    if (parse_url_template(input).render({}) != normalized) ++failures;
  }
  double ms = ms_since(start);
  require(failures == 0, std::to_string(failures) + " round-trip failures");
  require(ms < 1000.0, "took " + std::to_string(ms) + " ms");
  return "1000 templates, 0 failures";
}

std::string percent_encoding() {
  size_t failures = 0;
  for (int b = 0; b < 256; ++b) {
    std::string v(1, static_cast<char>(b));
    if (percent_decode(percent_encode(v)) != v) ++failures;
  }
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    std::string v;
    for (size_t n = rng() % 64; n > 0; --n) v += static_cast<char>(rng() % 256);
    if (percent_decode(percent_encode(v)) != v) ++failures;
  }
  require(failures == 0, std::to_string(failures) + " round-trip failures");
  require(percent_encode("+") == "%2B" && percent_encode("=") == "%3D", "+ or = not escaped");

  Endpoint e;
  e.name = "Q";
  e.method = "GET";
  e.url = {"https://h.example/q"};
  Parameter p;
  p.name = "q";
  p.example_value = Scalar{std::string("a+b=c")};
  e.required_parameters = {p};
  auto req = build_request(generate_tool(e, "s"), {{"q", Scalar{std::string("a+b=c")}}});
  require(req.url == "https://h.example/q?q=a%2Bb%3Dc", "query value encoded as " + req.url);
  return "1256 values, '+' -> %2B, '=' -> %3D";
}

std::string metrics_oracle() {
  std::mt19937_64 rng(2024);
  LexicalEmbedding emb;
  const std::vector<std::string> pool = {"q", "page", "limit", "id", "sort", "lang", "format", "key2"};
  auto make = [&](size_t index) {
    Endpoint e;
    e.name = "endpoint " + std::to_string(index);
    e.method = "GET";
    e.url = {"https://h.example/r" + std::to_string(index)};
    for (const auto& n : pool) {
      Parameter p;
      p.name = n;
      switch (rng() % 3) {
        case 1: e.required_parameters.push_back(p); break;
        case 2: e.optional_parameters.push_back(p); break;
        default: break;
      }
    }
    return e;
  };
  auto names = [](const Endpoint& e) {
    std::set<std::string> s;
    for (const auto& p : e.required_parameters) s.insert(p.name);
    for (const auto& p : e.optional_parameters) s.insert(p.name);
    return s;
  };

  size_t mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ExtractionResult> results;
    std::map<std::string, ApiSpec> truth;
    size_t valid = 0, pred_n = 0, truth_n = 0, common = 0;
    for (size_t d = 0, docs = 1 + rng() % 3; d < docs; ++d) {
      ApiSpec t, p;
      for (size_t i = 0, n = 1 + rng() % 3; i < n; ++i) {
        t.endpoints.push_back(make(i));
        p.endpoints.push_back(make(i));
      }
      std::shuffle(p.endpoints.begin(), p.endpoints.end(), rng);
      std::string id = "doc" + std::to_string(d);
      truth[id] = t;
      ExtractionResult r;
      r.source_id = id;
      r.valid = rng() % 4 != 0;
      if (r.valid) r.spec = p;
      results.push_back(r);
      if (!r.valid) continue;
      ++valid;
      for (const auto& te : t.endpoints) {
        auto pe = std::find_if(p.endpoints.begin(), p.endpoints.end(), [&](const Endpoint& x) { return x.url == te.url; });
        auto ts = names(te), ps = names(*pe);
        truth_n += ts.size();
        pred_n += ps.size();
        for (const auto& n : ts) common += ps.count(n);
      }
    }
    auto m = compute_metrics(results, truth, emb);
    if (m.valid_ratio != static_cast<double>(valid) / static_cast<double>(results.size())) ++mismatches;
    if (valid == 0) continue;
    double precision = pred_n ? static_cast<double>(common) / pred_n : (truth_n ? 0.0 : 1.0);
    double recall = truth_n ? static_cast<double>(common) / truth_n : (pred_n ? 0.0 : 1.0);
    if (m.param_precision != precision || m.param_recall != recall) ++mismatches;
  }
  require(mismatches == 0, std::to_string(mismatches) + " oracle mismatches");

  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Vector a(32), b(32);
    for (auto& x : a) x = normal(rng);
    for (auto& x : b) x = normal(rng);
    Vector scaled = a;
    for (auto& x : scaled) x *= 37.5;
    require(std::abs(cosine_similarity(a, a) - 1.0) <= 1e-9, "identity");
    require(std::abs(cosine_similarity(scaled, b) - cosine_similarity(a, b)) <= 1e-9, "scale invariance");
  }
  Vector x = {1, 0, 0, 0}, y = {0, 0, 3, 0};
  require(std::abs(cosine_similarity(x, y)) <= 1e-9, "orthogonality");
  return "200 spec pairs, cosine identity/orthogonality/scale";
}

std::string end_to_end() {
  testkit::MockApiServer server;
  auto dir = testkit::make_temp_dir("d2t-accept-e2e");
  auto corpus = testkit::write_e2e_corpus(dir, server.base_url());
  auto config = load_config(corpus.config);
  const std::vector<Stage> stages(std::begin(kAllStages), std::end(kAllStages));

  auto start = Clock::now();
  std::ostringstream log;
  auto result = run_pipeline(stages, config, {}, log);
  double ms = ms_since(start);
  require(result.exit_code == 0, "pipeline failed: " + log.str());

  std::vector<ValidationReport> reports;
  for (const auto& j : io::read_jsonl(corpus.output_dir / "validation" / "reports.jsonl"))
    reports.push_back(validation_report_from_json(j));
  g_validation_runs.push_back(reports);
  auto counts = count_errors(reports);
  bool retried = false;
  for (const auto& r : reports)
    for (const auto& a : r.attempts) retried |= a.retried_without_params;

  // A second run must label every tool the same way.
  std::ostringstream log2;
  require(run_pipeline({Stage::Validate}, config, {}, log2).exit_code == 0, "rerun failed");
  std::vector<ValidationReport> rerun;
  for (const auto& j : io::read_jsonl(corpus.output_dir / "validation" / "reports.jsonl"))
    rerun.push_back(validation_report_from_json(j));
  g_validation_runs.push_back(rerun);
  require(rerun.size() == reports.size(), "rerun size differs");
  for (size_t i = 0; i < rerun.size(); ++i)
    require(rerun[i].error_type == reports[i].error_type, "rerun label differs for " + rerun[i].tool_name);
  fs::remove_all(dir);

  require(reports.size() >= 3, "too few tools");
  require(counts[ErrorType::PassedValidation] >= 1, "no PassedValidation");
  require(counts[ErrorType::AbnormalResponse] >= 1, "no AbnormalResponse");
  require(counts[ErrorType::FailedValidation] >= 1, "no FailedValidation");
  require(counts[ErrorType::NoParameterValue] >= 1, "no NoParameterValue");
  require(retried, "no retry without params observed");
  require(ms < 30000.0, "took " + std::to_string(ms) + " ms");

  std::ostringstream summary;
  summary << reports.size() << " tools:";
  for (auto t : kAllErrorTypes)
    if (counts[t]) summary << " " << to_string(t) << "=" << counts[t];
  summary << ", retry observed, " << static_cast<long>(ms) << " ms";
  return summary.str();
}

std::string inference_oracle() {
  testkit::MockApiServer server;
  auto dir = testkit::make_temp_dir("d2t-accept-loo");
  auto corpus = testkit::write_two_source_corpus(dir, server.base_url());
  std::vector<ToolDescriptor> tools;
  for (const auto& [id, spec] : corpus.specs)
    for (auto& t : generate_tools(spec, id)) tools.push_back(std::move(t));
  HeuristicJudge judge;
  LexicalEmbedding emb;
  auto ctx = make_validation_context();
  auto reports = validate_tools(tools, judge, ctx, 2);
  g_validation_runs.push_back(reports);
  fs::remove_all(dir);

  auto summary = leave_one_api_out(tools, reports, emb, judge, ctx);
  const InferenceOutcome* gated = nullptr;
  for (const auto& o : summary.outcomes)
    if (o.tool_name == "get_glycan") gated = &o;
  require(gated != nullptr, "gated tool was not evaluated");
  require(gated->success, "gated tool not recovered");
  require(gated->attempts <= 20, "attempts " + std::to_string(gated->attempts));
  for (const auto& o : summary.outcomes)
    for (const auto& pc : o.candidates) {
      require(pc.candidates.size() <= 10, "more than 10 candidates for " + pc.param);
      for (const auto& c : pc.candidates) {
        require(c.similarity >= 0.5, "candidate below 0.5");
        require(c.source_id != o.source_id, "same-source candidate for " + o.tool_name);
      }
    }

  std::mt19937_64 rng(99);
  size_t spaces = 0;
  for (int trial = 0; trial < 300; ++trial, ++spaces) {
    std::vector<std::vector<double>> sims(1 + rng() % 4);
    for (auto& list : sims) {
      list.resize(1 + rng() % 6);
      for (auto& s : list) s = trial % 2 ? 0.5 + 0.1 * static_cast<double>(rng() % 6) : 0.5 + (rng() % 997) / 1994.0;
    }
    std::vector<RankedAssignment> all;
    std::vector<size_t> choice(sims.size(), 0);
    while (true) {
      double score = 0.0;
      for (size_t i = 0; i < sims.size(); ++i) score += std::log(std::max(sims[i][choice[i]], 1e-300));
      all.push_back({choice, score});
      size_t i = 0;
      while (i < sims.size() && ++choice[i] == sims[i].size()) choice[i++] = 0;
      if (i == sims.size()) break;
    }
    std::sort(all.begin(), all.end(), [](const RankedAssignment& a, const RankedAssignment& b) {
      return a.log_score != b.log_score ? a.log_score > b.log_score : a.choice < b.choice;
    });
    if (all.size() > 20) all.resize(20);
    require(rank_combinations(sims, 20) == all, "rank mismatch on space " + std::to_string(trial));
  }
  return "get_glycan recovered in " + std::to_string(gated->attempts) + " attempt(s); " +
         std::to_string(spaces) + " rank spaces match";
}

std::string taxonomy_partition() {
  require(!g_validation_runs.empty(), "no validation runs recorded");
  for (const auto& run : g_validation_runs) {
    auto counts = count_errors(run);
    std::int64_t total = 0;
    for (auto t : kAllErrorTypes) total += counts.at(t);
    require(total == static_cast<std::int64_t>(run.size()), "counts do not sum to the tool count");
  }
  std::mt19937_64 rng(10000);
  for (int i = 0; i < 10000; ++i) {
    ErrorCounts c;
    for (auto t : kAllErrorTypes) c[t] = static_cast<std::int64_t>(rng() % 100000);
    auto e = estimate_causes(c);
    for (auto cause : kAllCauses)
      require(e.at(cause).conservative <= e.at(cause).aggressive, "conservative > aggressive");
  }
  return std::to_string(g_validation_runs.size()) + " validation runs, 10000 random count vectors";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
      {"cause estimation fidelity", cause_estimation},
      {"golden extraction round trip", golden_round_trip},
      {"url template suite", url_templates},
      {"percent encoding", percent_encoding},
      {"metrics oracle", metrics_oracle},
      {"end-to-end mock run", end_to_end},
      {"inference oracle", inference_oracle},
      {"taxonomy partition", taxonomy_partition},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    std::string status = "PASS", detail;
    try {
      detail = criteria[i].second();
    } catch (const Failure& f) {
      status = "FAIL";
      detail = f.why;
    } catch (const std::exception& e) {
      status = "FAIL";
      detail = std::string("exception: ") + e.what();
    }
    if (status == "FAIL") ++failed;
    std::cout << "[" << status << "] " << (i + 1) << ". " << criteria[i].first << ": " << detail << std::endl;
  }
  return failed ? 1 : 0;
}
