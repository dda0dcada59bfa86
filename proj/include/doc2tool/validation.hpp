#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "doc2tool/http.hpp"
#include "doc2tool/judge.hpp"
#include "doc2tool/toolgen.hpp"

namespace doc2tool {

enum class ErrorType {
  PassedValidation,
  MissingEndpointPath,
  MissingBaseUrl,
  FailedValidation,
  AbnormalResponse,
  NoParameterValue,
  WrongParameterValue,
};

inline constexpr std::array<ErrorType, 7> kAllErrorTypes = {
    ErrorType::PassedValidation,  ErrorType::MissingEndpointPath, ErrorType::MissingBaseUrl,
    ErrorType::FailedValidation,  ErrorType::AbnormalResponse,    ErrorType::NoParameterValue,
    ErrorType::WrongParameterValue};

std::string_view to_string(ErrorType t);
// "Missing Base URL" style label used in report tables.
std::string_view display_name(ErrorType t);
std::optional<ErrorType> parse_error_type(std::string_view s);

using ArgValues = std::map<std::string, Scalar>;

// Example values, falling back to defaults, for every arg that has one.
ArgValues default_arg_values(const ToolDescriptor& tool);

struct BuiltRequest {
  std::string method;
  std::string url;  // rendered template plus encoded query
  std::string base_url;  // rendered template without the per-call query
  std::vector<std::pair<std::string, std::string>> query;  // raw, unencoded
  std::optional<std::string> body;  // JSON object for non-GET verbs
  HeaderList headers;

  // The request as sent; without_params drops the query and the body.
  HttpRequest to_http(bool without_params = false) const;
};

// Throws Error(MissingRequiredParameter) or Error(UnboundPathParam).
BuiltRequest build_request(const ToolDescriptor& tool, const ArgValues& args);

struct InvocationRecord {
  std::optional<int> status_code;
  std::string text;
  std::optional<nlohmann::json> json_body;
  std::string content;
  std::optional<std::string> transport_error;
  bool retried_without_params = false;
  int requests_sent = 0;
  double elapsed_ms = 0.0;
  std::string url;
};

nlohmann::json to_json(const InvocationRecord& r);
InvocationRecord invocation_record_from_json(const nlohmann::json& j);

// Shared by every validation in a run.
struct ValidationContext {
  std::shared_ptr<HttpTransport> transport;
  TransportOptions options{};
  // Keyed by host; may be shared across threads.
  std::shared_ptr<RateLimiter> limiter;
};

ValidationContext make_validation_context(std::shared_ptr<HttpTransport> transport = nullptr,
                                          TransportOptions options = {},
                                          double requests_per_second_per_host = 0.0);

// At most two requests: the call, and one retry without params when the
// first answer is not 200. Failures are recorded, never thrown.
InvocationRecord invoke_tool(const ToolDescriptor& tool, const BuiltRequest& request,
                             ValidationContext& ctx);

struct ValidationReport {
  std::string tool_name;
  std::string source_id;
  ArgValues args;
  std::vector<InvocationRecord> attempts;
  ErrorType error_type = ErrorType::NoParameterValue;
  std::optional<Verdict> judge_verdict;
  std::string detail;
  bool passed = false;
};

nlohmann::json to_json(const ValidationReport& r);
ValidationReport validation_report_from_json(const nlohmann::json& j);

// Decides the label from what has been recorded so far. `build_failed` marks
// a client side failure while preparing the request.
ErrorType classify_outcome(const ToolDescriptor& tool, const ArgValues& args,
                           const std::optional<InvocationRecord>& record,
                           const std::optional<Verdict>& verdict, bool build_failed = false);

// Build, invoke, judge and classify. `args` defaults to default_arg_values.
ValidationReport validate_tool(const ToolDescriptor& tool, JudgeBackend& judge,
                               ValidationContext& ctx,
                               const std::optional<ArgValues>& args = std::nullopt);

std::vector<ValidationReport> validate_tools(const std::vector<ToolDescriptor>& tools,
                                             JudgeBackend& judge, ValidationContext& ctx,
                                             size_t workers);

using ErrorCounts = std::map<ErrorType, std::int64_t>;

ErrorCounts count_errors(const std::vector<ValidationReport>& reports);

enum class Cause { MissingApiDocDetails, IncorrectUrlPath, IncorrectParameterValues, ServerSide };

inline constexpr std::array<Cause, 4> kAllCauses = {
    Cause::MissingApiDocDetails, Cause::IncorrectUrlPath, Cause::IncorrectParameterValues,
    Cause::ServerSide};

std::string_view display_name(Cause c);

struct CauseRange {
  std::int64_t conservative = 0;
  std::int64_t aggressive = 0;

  bool operator==(const CauseRange&) const = default;
};

struct CauseEstimate {
  std::map<Cause, CauseRange> ranges;

  const CauseRange& at(Cause c) const { return ranges.at(c); }
};

// Throws Error(NegativeCount). Missing types count as zero.
CauseEstimate estimate_causes(const ErrorCounts& counts);

// "a-b"
std::string format_range(const CauseRange& r);

// Two aligned tables: error-type counts per row, then the cause ranges.
std::string format_error_tables(const std::vector<std::pair<std::string, ErrorCounts>>& rows);

}  // namespace doc2tool
