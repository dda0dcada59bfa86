// Python entry points; structured values cross the boundary as JSON text.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "doc2tool/error.hpp"
#include "doc2tool/extraction.hpp"
#include "doc2tool/http.hpp"
#include "doc2tool/inference.hpp"
#include "doc2tool/pipeline.hpp"
#include "doc2tool/toolgen.hpp"
#include "doc2tool/url_template.hpp"
#include "doc2tool/validation.hpp"

namespace py = pybind11;
using namespace doc2tool;
using nlohmann::json;

namespace {

ApiSpec parse_spec(const std::string& text) {
  auto v = validate_spec(json::parse(text));
  if (!v.ok()) {
    std::string detail;
    for (const auto& violation : v.violations) detail += (detail.empty() ? "" : "; ") + violation.describe();
    throw Error(ErrorCode::ConfigInvalid, "spec", detail);
  }
  return *v.spec;
}

std::vector<ToolDescriptor> parse_tools(const std::string& text) {
  std::vector<ToolDescriptor> tools;
  for (const auto& j : json::parse(text)) tools.push_back(tool_from_json(j));
  return tools;
}

std::string validate_spec_json(const std::string& text) {
  auto v = validate_spec(json::parse(text));
  json out = {{"ok", v.ok()}, {"violations", json::array()}};
  for (const auto& violation : v.violations)
    out["violations"].push_back(
        {{"kind", to_string(violation.kind)}, {"path", violation.path}, {"detail", violation.detail}});
  if (v.spec) out["spec"] = to_json(*v.spec);
  return out.dump();
}

std::string generate_tools_json(const std::string& spec, const std::string& source_id) {
  json out = json::array();
  for (const auto& t : generate_tools(parse_spec(spec), source_id)) out.push_back(to_json(t));
  return out.dump();
}

std::string export_source(const std::string& tool) { return export_function_source(tool_from_json(json::parse(tool))); }

std::string export_openapi_yaml(const std::string& tools, const std::string& title) {
  return export_openapi(parse_tools(tools), title);
}

std::map<std::string, std::pair<std::int64_t, std::int64_t>> causes(const std::map<std::string, std::int64_t>& counts) {
  ErrorCounts c;
  for (auto t : kAllErrorTypes) c[t] = 0;
  for (const auto& [name, n] : counts) {
    auto t = parse_error_type(name);
    if (!t) throw Error(ErrorCode::ConfigInvalid, "error_type", name);
    c[*t] = n;
  }
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> out;
  auto e = estimate_causes(c);
  for (auto cause : kAllCauses) out[std::string(display_name(cause))] = {e.at(cause).conservative, e.at(cause).aggressive};
  return out;
}

std::string canonical_url(const std::string& url) { return parse_url_template(url).canonical(); }

std::string heuristic_extract_json(const std::string& text) { return to_json(heuristic_extract(text)).dump(); }

std::vector<std::pair<std::vector<size_t>, double>> rank(const std::vector<std::vector<double>>& sims, size_t limit) {
  std::vector<std::pair<std::vector<size_t>, double>> out;
  for (const auto& a : rank_combinations(sims, limit)) out.emplace_back(a.choice, a.log_score);
  return out;
}

std::pair<int, std::string> run(const std::string& config_path, const std::vector<std::string>& stages,
                                std::optional<std::string> backend, std::optional<std::int64_t> seed, bool offline) {
  auto config = load_config(config_path);
  std::vector<Stage> list;
  if (stages.empty()) {
    list.assign(std::begin(kAllStages), std::end(kAllStages));
  } else {
    for (const auto& s : stages) {
      auto stage = parse_stage(s);
      if (!stage) throw Error(ErrorCode::ConfigInvalid, "stage", s);
      list.push_back(*stage);
    }
  }
  PipelineOptions options;
  options.backend_override = std::move(backend);
  options.seed = seed;
  options.offline = offline;
  std::ostringstream log;
  PipelineResult result;
  {
    py::gil_scoped_release release;
    result = run_pipeline(list, config, options, log);
  }
  return {result.exit_code, log.str()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "doc2tool core bindings";
  py::register_exception<Error>(m, "Doc2ToolError", PyExc_ValueError);
  m.def("validate_spec", &validate_spec_json, py::arg("spec_json"));
  m.def("heuristic_extract", &heuristic_extract_json, py::arg("text"));
  m.def("generate_tools", &generate_tools_json, py::arg("spec_json"), py::arg("source_id"));
  m.def("export_function_source", &export_source, py::arg("tool_json"));
  m.def("export_openapi", &export_openapi_yaml, py::arg("tools_json"), py::arg("title") = "");
  m.def("estimate_causes", &causes, py::arg("counts"));
  m.def("canonical_url", &canonical_url, py::arg("url"));
  m.def("percent_encode", [](const py::bytes& raw) { return percent_encode(std::string(raw)); }, py::arg("raw"));
  m.def("percent_decode", [](const std::string& s) { return py::bytes(percent_decode(s)); }, py::arg("encoded"));
  m.def("rank_combinations", &rank, py::arg("similarities"), py::arg("limit") = kMaxAssignments);
  m.def("run_pipeline", &run, py::arg("config_path"), py::arg("stages") = std::vector<std::string>{},
        py::arg("backend") = std::nullopt, py::arg("seed") = std::nullopt, py::arg("offline") = false);
}
