#include "doc2tool/validation.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <sstream>

#include "doc2tool/error.hpp"
#include "doc2tool/parallel.hpp"
#include "doc2tool/strings.hpp"

namespace doc2tool {

std::string_view to_string(ErrorType t) {
  switch (t) {
    case ErrorType::PassedValidation: return "PassedValidation";
    case ErrorType::MissingEndpointPath: return "MissingEndpointPath";
    case ErrorType::MissingBaseUrl: return "MissingBaseUrl";
    case ErrorType::FailedValidation: return "FailedValidation";
    case ErrorType::AbnormalResponse: return "AbnormalResponse";
    case ErrorType::NoParameterValue: return "NoParameterValue";
    case ErrorType::WrongParameterValue: return "WrongParameterValue";
  }
  return "?";
}

std::string_view display_name(ErrorType t) {
  switch (t) {
    case ErrorType::PassedValidation: return "Passed Validation";
    case ErrorType::MissingEndpointPath: return "Missing Endpoint Path";
    case ErrorType::MissingBaseUrl: return "Missing Base URL";
    case ErrorType::FailedValidation: return "Failed Validation";
    case ErrorType::AbnormalResponse: return "Abnormal Response";
    case ErrorType::NoParameterValue: return "No Parameter Value";
    case ErrorType::WrongParameterValue: return "Wrong Parameter Value";
  }
  return "?";
}

std::optional<ErrorType> parse_error_type(std::string_view s) {
  for (auto t : kAllErrorTypes)
    if (s == to_string(t) || s == display_name(t)) return t;
  return std::nullopt;
}

ArgValues default_arg_values(const ToolDescriptor& tool) {
  ArgValues out;
  for (const auto& a : tool.args)
    if (auto v = a.value()) out[a.name] = *v;
  return out;
}

HttpRequest BuiltRequest::to_http(bool without_params) const {
  HttpRequest r;
  r.method = method;
  r.url = without_params ? base_url : url;
  r.headers = headers;
  if (!without_params) r.body = body;
  return r;
}

BuiltRequest build_request(const ToolDescriptor& tool, const ArgValues& args) {
  for (const auto& a : tool.args)
    if (a.required && !args.count(a.name)) throw Error(ErrorCode::MissingRequiredParameter, a.name);

  std::map<std::string, std::string> bindings;
  for (const auto& name : tool.url.path_params()) {
    auto it = args.find(name);
    if (it == args.end()) throw Error(ErrorCode::UnboundPathParam, name);
    bindings[name] = scalar_to_string(it->second);
  }

  BuiltRequest req;
  req.method = tool.method;
  req.base_url = tool.url.render(bindings);
  for (const auto& h : tool.headers)
    if (h.parsed) req.headers.emplace_back(h.name, h.value);

  nlohmann::json body = nlohmann::json::object();
  for (const auto& a : tool.args) {
    if (a.location != ArgLocation::Query) continue;
    auto it = args.find(a.name);
    if (it == args.end()) continue;
    req.query.emplace_back(a.name, scalar_to_string(it->second));
    body[a.name] = scalar_to_json(it->second);
  }

  req.url = req.base_url;
  if (sends_query(tool.method)) {
    std::string qs;
    for (const auto& [k, v] : req.query) {
      if (!qs.empty()) qs += '&';
      qs += percent_encode(k) + "=" + percent_encode(v);
    }
    if (!qs.empty()) req.url += (tool.url.query_base ? "&" : "?") + qs;
  } else if (!req.query.empty()) {
    req.body = body.dump();
  }
  return req;
}

nlohmann::json to_json(const InvocationRecord& r) {
  nlohmann::json j = {{"status_code", r.status_code ? nlohmann::json(*r.status_code) : nlohmann::json()},
                      {"text", r.text},
                      {"json", r.json_body ? *r.json_body : nlohmann::json()},
                      {"content", r.content},
                      {"transport_error", r.transport_error ? nlohmann::json(*r.transport_error) : nlohmann::json()},
                      {"retried_without_params", r.retried_without_params},
                      {"requests_sent", r.requests_sent},
                      {"elapsed_ms", r.elapsed_ms},
                      {"url", r.url}};
  return j;
}

InvocationRecord invocation_record_from_json(const nlohmann::json& j) {
  InvocationRecord r;
  if (j.contains("status_code") && j["status_code"].is_number_integer()) r.status_code = j["status_code"].get<int>();
  r.text = j.value("text", "");
  if (j.contains("json") && !j["json"].is_null()) r.json_body = j["json"];
  r.content = j.value("content", "");
  if (j.contains("transport_error") && j["transport_error"].is_string())
    r.transport_error = j["transport_error"].get<std::string>();
  r.retried_without_params = j.value("retried_without_params", false);
  r.requests_sent = j.value("requests_sent", 0);
  r.elapsed_ms = j.value("elapsed_ms", 0.0);
  r.url = j.value("url", "");
  return r;
}

ValidationContext make_validation_context(std::shared_ptr<HttpTransport> transport,
                                          TransportOptions options,
                                          double requests_per_second_per_host) {
  ValidationContext ctx;
  ctx.transport = transport ? std::move(transport) : default_transport();
  ctx.options = options;
  ctx.limiter = std::make_shared<RateLimiter>(requests_per_second_per_host);
  return ctx;
}

InvocationRecord invoke_tool(const ToolDescriptor& tool, const BuiltRequest& request,
                             ValidationContext& ctx) {
  InvocationRecord rec;
  TransportOptions opts = ctx.options;
  opts.timeout_seconds = tool.timeout_seconds;
  opts.tls_verify = ctx.options.tls_verify && tool.tls_verify;
  const std::string host = split_url(request.url).authority;
  auto transport = ctx.transport ? ctx.transport : default_transport();
  const auto start = std::chrono::steady_clock::now();

  auto send = [&](bool without_params) {
    HttpRequest http = request.to_http(without_params);
    rec.url = http.url;
    if (ctx.limiter) ctx.limiter->acquire(host);
    ++rec.requests_sent;
    try {
      HttpResponse resp = transport->send(http, opts);
      rec.status_code = resp.status;
      rec.text = resp.body;
      rec.transport_error.reset();
    } catch (const TransportError& e) {
      rec.status_code.reset();
      rec.text.clear();
      rec.transport_error = e.cause();
    }
  };

  send(false);
  const bool sent_params = !request.query.empty() || request.body.has_value();
  if (rec.status_code && *rec.status_code != 200 && sent_params) {
    send(true);
    rec.retried_without_params = true;
  }

  rec.content = rec.text;
  if (rec.status_code && !rec.text.empty()) {
    auto parsed = nlohmann::json::parse(rec.text, nullptr, false);
    if (!parsed.is_discarded()) rec.json_body = std::move(parsed);
  }
  rec.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

nlohmann::json to_json(const ValidationReport& r) {
  nlohmann::json args = nlohmann::json::object();
  for (const auto& [k, v] : r.args) args[k] = scalar_to_json(v);
  nlohmann::json attempts = nlohmann::json::array();
  for (const auto& a : r.attempts) attempts.push_back(to_json(a));
  nlohmann::json verdict;
  if (r.judge_verdict)
    verdict = {{"pass", r.judge_verdict->pass}, {"rationale", r.judge_verdict->rationale}};
  return {{"tool_name", r.tool_name},
          {"source_id", r.source_id},
          {"args", args},
          {"attempts", attempts},
          {"error_type", std::string(to_string(r.error_type))},
          {"judge_verdict", verdict},
          {"detail", r.detail},
          {"passed", r.passed}};
}

ValidationReport validation_report_from_json(const nlohmann::json& j) {
  ValidationReport r;
  r.tool_name = j.value("tool_name", "");
  r.source_id = j.value("source_id", "");
  const auto args = j.value("args", nlohmann::json::object());
  for (const auto& [k, v] : args.items())
    if (auto s = scalar_from_json(v)) r.args[k] = *s;
  for (const auto& a : j.value("attempts", nlohmann::json::array()))
    r.attempts.push_back(invocation_record_from_json(a));
  auto type = parse_error_type(j.value("error_type", ""));
  if (!type) throw Error(ErrorCode::ConfigInvalid, "error_type", j.value("error_type", ""));
  r.error_type = *type;
  if (j.contains("judge_verdict") && j["judge_verdict"].is_object())
    r.judge_verdict = Verdict{j["judge_verdict"].value("pass", false),
                              j["judge_verdict"].value("rationale", "")};
  r.detail = j.value("detail", "");
  r.passed = j.value("passed", false);
  return r;
}

namespace {

bool path_is_empty(const UrlTemplate& t) {
  std::string path = t.canonical_path();
  return path.empty() || path == "/";
}

bool has_flag_prefix(const ToolDescriptor& tool, std::string_view prefix) {
  return std::any_of(tool.flags.begin(), tool.flags.end(),
                     [&](const std::string& f) { return f.rfind(prefix, 0) == 0; });
}

// Pre-request labels; nullopt when the tool may be called.
std::optional<ErrorType> static_outcome(const ToolDescriptor& tool, const ArgValues& args) {
  if (!tool.url.has_scheme()) return ErrorType::MissingBaseUrl;
  if (path_is_empty(tool.url) && !tool.args.empty()) return ErrorType::MissingEndpointPath;
  if (has_flag_prefix(tool, "MalformedUrl")) return ErrorType::MissingEndpointPath;
  // A placeholder no documented parameter explains, and nothing bound it.
  for (const auto& a : tool.args)
    if (a.synthesized && !args.count(a.name)) return ErrorType::MissingEndpointPath;
  for (const auto& a : tool.args)
    if (a.required && !args.count(a.name)) return ErrorType::NoParameterValue;
  return std::nullopt;
}

}  // namespace

ErrorType classify_outcome(const ToolDescriptor& tool, const ArgValues& args,
                           const std::optional<InvocationRecord>& record,
                           const std::optional<Verdict>& verdict, bool build_failed) {
  if (auto pre = static_outcome(tool, args)) return *pre;
  if (build_failed || !record || record->transport_error || !record->status_code)
    return ErrorType::WrongParameterValue;
  if (*record->status_code == 200)
    return verdict && verdict->pass ? ErrorType::PassedValidation : ErrorType::FailedValidation;
  return ErrorType::AbnormalResponse;
}

ValidationReport validate_tool(const ToolDescriptor& tool, JudgeBackend& judge,
                               ValidationContext& ctx, const std::optional<ArgValues>& args) {
  ValidationReport report;
  report.tool_name = tool.tool_name;
  report.source_id = tool.source_id;
  report.args = args ? *args : default_arg_values(tool);

  auto finish = [&](ErrorType type) {
    report.error_type = type;
    report.passed = type == ErrorType::PassedValidation;
    return report;
  };

  if (auto pre = static_outcome(tool, report.args)) {
    for (const auto& a : tool.args)
      if (a.required && !report.args.count(a.name)) {
        report.detail = "no value for " + a.name;
        break;
      }
    return finish(*pre);
  }

  BuiltRequest request;
  try {
    request = build_request(tool, report.args);
  } catch (const Error& e) {
    report.detail = e.what();
    return finish(classify_outcome(tool, report.args, std::nullopt, std::nullopt, true));
  }

  InvocationRecord rec = invoke_tool(tool, request, ctx);
  if (rec.transport_error) report.detail = "transport: " + *rec.transport_error;
  std::optional<Verdict> verdict;
  if (rec.status_code && *rec.status_code == 200) {
    verdict = judge.judge_response(tool.description, rec.text);
    report.judge_verdict = verdict;
  } else if (rec.status_code) {
    report.detail = "HTTP " + std::to_string(*rec.status_code);
  }
  report.attempts.push_back(rec);
  return finish(classify_outcome(tool, report.args, rec, verdict));
}

std::vector<ValidationReport> validate_tools(const std::vector<ToolDescriptor>& tools,
                                             JudgeBackend& judge, ValidationContext& ctx,
                                             size_t workers) {
  return parallel_map(tools, workers,
                      [&](const ToolDescriptor& t) { return validate_tool(t, judge, ctx); });
}

ErrorCounts count_errors(const std::vector<ValidationReport>& reports) {
  ErrorCounts counts;
  for (auto t : kAllErrorTypes) counts[t] = 0;
  for (const auto& r : reports) ++counts[r.error_type];
  return counts;
}

std::string_view display_name(Cause c) {
  switch (c) {
    case Cause::MissingApiDocDetails: return "Missing API Doc Details";
    case Cause::IncorrectUrlPath: return "Incorrectly Extracted URL Path";
    case Cause::IncorrectParameterValues: return "Incorrect Parameter Values";
    case Cause::ServerSide: return "Server-side Errors";
  }
  return "?";
}

CauseEstimate estimate_causes(const ErrorCounts& counts) {
  auto n = [&](ErrorType t) -> std::int64_t {
    auto it = counts.find(t);
    return it == counts.end() ? 0 : it->second;
  };
  for (const auto& [t, v] : counts)
    if (v < 0) throw Error(ErrorCode::NegativeCount, std::string(to_string(t)), std::to_string(v));

  const auto mep = n(ErrorType::MissingEndpointPath), mbu = n(ErrorType::MissingBaseUrl),
             fv = n(ErrorType::FailedValidation), ar = n(ErrorType::AbnormalResponse),
             npv = n(ErrorType::NoParameterValue), wpv = n(ErrorType::WrongParameterValue);
  CauseEstimate e;
  e.ranges[Cause::MissingApiDocDetails] = {0, mbu + npv};
  e.ranges[Cause::IncorrectUrlPath] = {mep, mep + mbu};
  e.ranges[Cause::IncorrectParameterValues] = {wpv + fv, wpv + fv + npv + ar};
  e.ranges[Cause::ServerSide] = {0, fv + ar};
  return e;
}

std::string format_range(const CauseRange& r) {
  return std::to_string(r.conservative) + "-" + std::to_string(r.aggressive);
}

namespace {

std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> width;
  for (const auto& row : rows)
    for (size_t i = 0; i < row.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], row[i].size());
    }
  std::string out;
  for (const auto& row : rows) {
    std::ostringstream line;
    for (size_t i = 0; i < row.size(); ++i)
      line << (i ? "  " : "") << std::left << std::setw(static_cast<int>(width[i])) << row[i];
    std::string s = line.str();
    while (!s.empty() && s.back() == ' ') s.pop_back();
    out += s + "\n";
  }
  return out;
}

}  // namespace

std::string format_error_tables(const std::vector<std::pair<std::string, ErrorCounts>>& rows) {
  std::vector<std::vector<std::string>> counts{{""}};
  for (auto t : kAllErrorTypes)
    if (t != ErrorType::PassedValidation) counts[0].push_back(std::string(display_name(t)));
  counts[0].push_back("Passed Validation");
  for (const auto& [label, c] : rows) {
    std::vector<std::string> row{label};
    auto get = [&](ErrorType t) {
      auto it = c.find(t);
      return std::to_string(it == c.end() ? 0 : it->second);
    };
    for (auto t : kAllErrorTypes)
      if (t != ErrorType::PassedValidation) row.push_back(get(t));
    row.push_back(get(ErrorType::PassedValidation));
    counts.push_back(std::move(row));
  }

  std::vector<std::vector<std::string>> causes{{""}};
  for (auto c : kAllCauses) causes[0].push_back(std::string(display_name(c)));
  for (const auto& [label, c] : rows) {
    auto est = estimate_causes(c);
    std::vector<std::string> row{label};
    for (auto cause : kAllCauses) row.push_back(format_range(est.at(cause)));
    causes.push_back(std::move(row));
  }
  return "Error Type\n" + render_table(counts) + "\nError Cause\n" + render_table(causes);
}

}  // namespace doc2tool
