#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <sys/wait.h>
#include <sstream>

#include "doc2tool/error.hpp"
#include "doc2tool/io.hpp"
#include "doc2tool/pipeline.hpp"
#include "doc2tool/testkit/corpus.hpp"
#include "doc2tool/testkit/mock_server.hpp"
#include "doc2tool/validation.hpp"

using namespace doc2tool;
namespace fs = std::filesystem;

namespace {

std::vector<Stage> all_stages() { return {std::begin(kAllStages), std::end(kAllStages)}; }

std::map<std::string, ValidationReport> reports_by_tool(const fs::path& out) {
  std::map<std::string, ValidationReport> m;
  for (const auto& j : io::read_jsonl(out / "validation" / "reports.jsonl")) {
    auto r = validation_report_from_json(j);
    m[r.tool_name] = r;
  }
  return m;
}

int run_cli(const std::string& args, const fs::path& log) {
  std::string cmd = std::string(DOC2TOOL_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = testkit::make_temp_dir("d2t-pipeline"); }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST(Stages, ParseLists) {
  EXPECT_EQ(parse_stage("Extract"), Stage::Extract);
  EXPECT_FALSE(parse_stage("deploy"));
  EXPECT_EQ(parse_stage_list("report, ingest"), (std::vector<Stage>{Stage::Ingest, Stage::Report}));
  EXPECT_THROW(parse_stage_list("ingest,deploy"), Error);
}

TEST_F(PipelineTest, ConfigRejectsInlineCredentials) {
  io::write_json(dir_ / "m.json", nlohmann::json::array());
  nlohmann::json cfg = {{"corpus_manifest", "m.json"},
                        {"judge", {{"backend", "remote"}, {"remote", {{"endpoint_url", "x"}, {"api_key", "sk-1"}}}}}};
  try {
    config_from_json(cfg, dir_);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid);
    EXPECT_EQ(e.subject(), "judge.remote.api_key");
  }
  cfg["judge"]["remote"].erase("api_key");
  cfg["judge"]["remote"]["api_key_env"] = "JUDGE_KEY";
  EXPECT_NO_THROW(config_from_json(cfg, dir_));
}

TEST_F(PipelineTest, ConfigDefaultsAndErrors) {
  io::write_json(dir_ / "m.json", nlohmann::json::array());
  auto c = config_from_json({{"corpus_manifest", "m.json"}}, dir_);
  EXPECT_TRUE(c.tls_verify);
  EXPECT_EQ(c.timeout_seconds, 50);
  EXPECT_EQ(c.output_dir, dir_ / "out");
  EXPECT_THROW(config_from_json({{"corpus_manifest", "nope.json"}}, dir_), Error);
  EXPECT_THROW(config_from_json({{"corpus_manifest", "m.json"}, {"extraction", {{"backend", "magic"}}}}, dir_),
               Error);
  EXPECT_THROW(load_config(dir_ / "missing.json"), Error);
}

TEST_F(PipelineTest, FullRunOnSyntheticCorpus) {
  testkit::MockApiServer server;
  auto corpus = testkit::write_e2e_corpus(dir_, server.base_url());
  auto config = load_config(corpus.config);
  std::ostringstream log;
  auto result = run_pipeline(all_stages(), config, {}, log);
  ASSERT_EQ(result.exit_code, 0) << log.str();

  const fs::path out = corpus.output_dir;
  for (const char* sub : {"docs", "specs", "metrics", "tools", "exports", "validation", "kb", "reports"})
    EXPECT_TRUE(fs::is_directory(out / sub)) << sub;
  std::string authority = split_url(server.base_url()).authority;
  std::replace(authority.begin(), authority.end(), ':', '_');
  EXPECT_TRUE(fs::exists(out / "exports" / (authority + ".openapi.yaml")));

  auto metrics = io::read_json(out / "metrics" / "metrics.json");
  EXPECT_EQ(metrics["valid_ratio"], 1.0);
  EXPECT_EQ(metrics["param_precision"], 1.0);
  EXPECT_EQ(metrics["param_recall"], 1.0);
  EXPECT_EQ(metrics["matched_endpoints"], 7);

  auto reports = reports_by_tool(out);
  ASSERT_EQ(reports.size(), 7u);
  EXPECT_EQ(reports["search_cards"].error_type, ErrorType::PassedValidation);
  EXPECT_EQ(reports["search_articles"].error_type, ErrorType::PassedValidation);
  EXPECT_TRUE(reports["search_articles"].attempts.at(0).retried_without_params);
  EXPECT_EQ(reports["get_missing_item"].error_type, ErrorType::AbnormalResponse);
  EXPECT_EQ(reports["broken_lookup"].error_type, ErrorType::FailedValidation);
  EXPECT_EQ(reports["relative_lookup"].error_type, ErrorType::MissingBaseUrl);
  EXPECT_EQ(reports["list_structures"].error_type, ErrorType::PassedValidation);
  EXPECT_EQ(reports["get_glycan"].error_type, ErrorType::NoParameterValue);

  auto inference = io::read_json(out / "kb" / "inference.json");
  EXPECT_EQ(inference["attempted"], 1);
  EXPECT_EQ(inference["successes"], 1);
  auto repaired = io::read_jsonl(out / "kb" / "inferred_tools.jsonl");
  ASSERT_EQ(repaired.size(), 1u);
  EXPECT_EQ(repaired[0]["tool_name"], "get_glycan");

  auto report = io::read_text(out / "reports" / "report.txt");
  EXPECT_NE(report.find("Error Cause"), std::string::npos);
  EXPECT_NE(report.find("Parameter inference: 1/1"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "exports" / "cards" / "search_cards.py"));
  EXPECT_NE(log.str().find("seed: 7"), std::string::npos);

  // Rerunning a deterministic stage rewrites identical artifacts.
  auto first = io::read_text(out / "tools" / "index.jsonl");
  Services services = make_services(config);
  std::ostringstream again;
  run_stage(Stage::Generate, config, services, again);
  EXPECT_EQ(io::read_text(out / "tools" / "index.jsonl"), first);
}

TEST_F(PipelineTest, StagesRequireTheirInputs) {
  testkit::MockApiServer server;
  auto corpus = testkit::write_e2e_corpus(dir_, server.base_url());
  auto config = load_config(corpus.config);
  Services services = make_services(config);
  std::ostringstream log;
  try {
    run_stage(Stage::Extract, config, services, log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingStageInput);
    EXPECT_EQ(e.subject(), "extract");
  }
  auto result = run_pipeline({Stage::Validate}, config, {}, log);
  EXPECT_EQ(result.exit_code, 1);
  EXPECT_FALSE(fs::exists(corpus.output_dir / "validation"));
}

TEST_F(PipelineTest, ReportOnPublishedCounts) {
  io::write_json(dir_ / "m.json", nlohmann::json::array());
  auto config = config_from_json({{"corpus_manifest", "m.json"}}, dir_);
  const std::vector<std::pair<ErrorType, int>> counts = {
      {ErrorType::MissingEndpointPath, 0}, {ErrorType::MissingBaseUrl, 4},    {ErrorType::FailedValidation, 9},
      {ErrorType::AbnormalResponse, 23},   {ErrorType::NoParameterValue, 14}, {ErrorType::WrongParameterValue, 10}};
  std::vector<nlohmann::json> rows;
  for (const auto& [type, n] : counts)
    for (int i = 0; i < n; ++i) {
      ValidationReport r;
      r.tool_name = "t" + std::to_string(rows.size());
      r.error_type = type;
      rows.push_back(to_json(r));
    }
  io::write_jsonl(config.output_dir / "validation" / "reports.jsonl", rows);
  std::ostringstream log;
  auto result = run_pipeline({Stage::Report}, config, {}, log);
  ASSERT_EQ(result.exit_code, 0) << log.str();
  auto report = io::read_text(config.output_dir / "reports" / "report.txt");
  EXPECT_NE(report.find("0-18"), std::string::npos);
  EXPECT_NE(report.find("19-56"), std::string::npos);
  EXPECT_NE(report.find("0-32"), std::string::npos);
}

TEST_F(PipelineTest, ReplayBackendFromConfig) {
  io::write_text(dir_ / "docs" / "pokemon.txt", testkit::pokemon_document_text());
  io::write_json(dir_ / "manifest.json", {{{"source_id", "pokemon"}, {"origin", "docs/pokemon.txt"}}});
  io::write_jsonl(dir_ / "replay.jsonl",
                  {{{"source_id", "pokemon"}, {"raw_output", testkit::pokemon_extraction_output()}}});
  io::write_json(dir_ / "config.json", {{"corpus_manifest", "manifest.json"},
                                        {"extraction", {{"backend", "heuristic"}, {"replay", "replay.jsonl"}}},
                                        {"offline", true}});
  auto config = load_config(dir_ / "config.json");
  PipelineOptions options;
  options.backend_override = "replay";
  std::ostringstream log;
  auto result = run_pipeline({Stage::Ingest, Stage::Extract, Stage::Generate}, config, options, log);
  ASSERT_EQ(result.exit_code, 0) << log.str();
  auto src = io::read_text(config.output_dir / "exports" / "pokemon" / "search_cards.py");
  EXPECT_NE(src.find("'Missing required parameter: q'"), std::string::npos);
  EXPECT_NE(src.find("timeout=50"), std::string::npos);
  EXPECT_NE(src.find("verify=True"), std::string::npos);
  EXPECT_TRUE(fs::exists(config.output_dir / "exports" / "api.pokemontcg.io.openapi.yaml"));
}

TEST_F(PipelineTest, CommandLine) {
  testkit::MockApiServer server;
  auto corpus = testkit::write_e2e_corpus(dir_, server.base_url());
  const auto log = dir_ / "cli.log";
  const std::string cfg = "--config " + corpus.config.string();

  EXPECT_EQ(run_cli("extract " + cfg, log), 1);
  EXPECT_NE(io::read_text(log).find("MissingStageInput"), std::string::npos);

  EXPECT_EQ(run_cli("run " + cfg + " --stage-filter ingest,extract,generate,validate --seed 3 --offline", log), 0)
      << io::read_text(log);
  auto text = io::read_text(log);
  EXPECT_NE(text.find("seed: 3"), std::string::npos);
  EXPECT_NE(text.find("validate: 3/7 passed"), std::string::npos);
  EXPECT_FALSE(fs::exists(corpus.output_dir / "kb"));

  EXPECT_EQ(run_cli("report " + cfg, log), 0);
  EXPECT_NE(io::read_text(log).find("Error Type"), std::string::npos);

  EXPECT_EQ(run_cli("run " + cfg + " --stage-filter deploy", log), 2);
  EXPECT_EQ(run_cli("--config " + (dir_ / "none.json").string() + " ingest", log), 2);
  EXPECT_NE(run_cli("", log), 0);
}
