#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "doc2tool/error.hpp"
#include "doc2tool/pipeline.hpp"

using namespace doc2tool;

int main(int argc, char** argv) {
  CLI::App app{"doc2tool: turn REST API documentation into validated, callable tools"};
  app.require_subcommand(1);
  // Global options may follow the subcommand.
  app.fallthrough();

  std::string config_path = "doc2tool.json";
  std::string stage_filter;
  std::string backend;
  std::int64_t seed = 0;
  bool offline = false;

  app.add_option("--config", config_path, "Project configuration (JSON)");
  app.add_option("--backend", backend, "Extraction backend: heuristic, replay, remote_chat, remote_structured");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized sampling");
  app.add_flag("--offline", offline, "Refuse every non-loopback host");

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"ingest", "Fetch, clean, filter and classify the corpus"},
      {"extract", "Extract structured specs from ingested documents"},
      {"evaluate", "Score extracted specs against ground truth"},
      {"generate", "Generate tool descriptors and exports"},
      {"validate", "Call every tool and label the outcome"},
      {"infer", "Infer missing parameter values from the knowledge base"},
      {"report", "Render the metrics and error tables"},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help);
  auto* run = app.add_subcommand("run", "Run every stage in order");
  run->add_option("--stage-filter", stage_filter, "Comma separated subset of stages to run");

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<Stage> stages;
    if (run->parsed()) {
      stages = stage_filter.empty() ? std::vector<Stage>(std::begin(kAllStages), std::end(kAllStages))
                                    : parse_stage_list(stage_filter);
    } else {
      stages.push_back(*parse_stage(app.get_subcommands().front()->get_name()));
    }

    ProjectConfig config = load_config(config_path);
    PipelineOptions options;
    if (!backend.empty()) options.backend_override = backend;
    if (seed_opt->count()) options.seed = seed;
    options.offline = offline;

    PipelineResult result = run_pipeline(stages, config, options, std::cout);
    return result.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
