#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doc2tool/embedding.hpp"
#include "doc2tool/extraction.hpp"
#include "doc2tool/http.hpp"
#include "doc2tool/judge.hpp"

namespace doc2tool {

enum class Stage { Ingest, Extract, Evaluate, Generate, Validate, Infer, Report };

inline constexpr Stage kAllStages[] = {Stage::Ingest,   Stage::Extract, Stage::Evaluate, Stage::Generate,
                                       Stage::Validate, Stage::Infer,   Stage::Report};

std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view s);
// Comma separated stage names; throws Error(ConfigInvalid) on unknown names.
std::vector<Stage> parse_stage_list(std::string_view list);

struct ProjectConfig {
  std::filesystem::path corpus_manifest;
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> ground_truth_dir;

  // {"backend": "heuristic" | "replay" | "remote_chat" | "remote_structured",
  //  "replay": path, "remote": {...}, "one_shot": {"document": path, "spec": path}}
  nlohmann::json extraction = {{"backend", "heuristic"}};
  // {"backend": "heuristic" | "remote", "remote": {...}}
  nlohmann::json judge = {{"backend", "heuristic"}};
  // {"backend": "lexical" | "remote", "dimension": 256, "remote": {...}}
  nlohmann::json embedding = {{"backend", "lexical"}};

  double rate_limit_per_host = 1.0;
  size_t max_concurrency = 4;
  bool tls_verify = true;
  int timeout_seconds = 50;
  bool offline = false;
  size_t max_doc_bytes = 512 * 1024;
  std::vector<std::string> error_phrases;
  bool leave_one_out = false;
  std::optional<std::int64_t> seed;

  // Directory relative paths inside the config were resolved against.
  std::filesystem::path base_dir;
};

// Relative paths resolve against the config file's directory. Throws
// Error(ConfigInvalid) for missing files, unknown backends or any field
// that looks like an inline credential.
ProjectConfig load_config(const std::filesystem::path& path);
ProjectConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

struct PipelineOptions {
  std::optional<std::string> backend_override;
  std::optional<std::int64_t> seed;
  bool offline = false;
  // Replaces the network for every stage; used by tests.
  std::shared_ptr<HttpTransport> transport;
};

struct Services {
  std::shared_ptr<HttpTransport> transport;
  TransportOptions transport_options;
  std::shared_ptr<JudgeBackend> judge;
  std::shared_ptr<EmbeddingProvider> embedding;
  ExtractionBackend extraction;
};

Services make_services(const ProjectConfig& config, const PipelineOptions& options = {});

struct PipelineResult {
  int exit_code = 0;
  std::vector<std::string> messages;
};

// Runs the given stages in pipeline order. Stage-level failures such as
// Error(MissingStageInput) stop the run with a non-zero exit code; per
// document problems are recorded in the artifacts instead.
PipelineResult run_pipeline(const std::vector<Stage>& stages, const ProjectConfig& config,
                            const PipelineOptions& options, std::ostream& log);

// The same, throwing the first stage error instead of recording it.
void run_stage(Stage stage, const ProjectConfig& config, Services& services, std::ostream& log);

}  // namespace doc2tool
