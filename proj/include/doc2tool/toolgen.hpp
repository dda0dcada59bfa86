#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doc2tool/model.hpp"
#include "doc2tool/url_template.hpp"

namespace doc2tool {

enum class ArgLocation { Path, Query };

std::string_view to_string(ArgLocation loc);

struct ToolArg {
  std::string name;
  ArgLocation location = ArgLocation::Query;
  bool required = false;
  std::optional<std::string> type_hint;
  std::optional<std::string> description;
  std::optional<Scalar> example_value;
  std::optional<Scalar> default_value;
  // Created for a placeholder that no documented parameter names.
  bool synthesized = false;

  // The value a call would send: example first, then default.
  std::optional<Scalar> value() const { return example_value ? example_value : default_value; }
  bool value_missing() const { return required && !value(); }

  bool operator==(const ToolArg&) const = default;
};

struct ToolHeader {
  std::string name;
  std::string value;
  // False when the source string had no "Name: value" shape; name then holds it verbatim.
  bool parsed = true;

  bool operator==(const ToolHeader&) const = default;
};

ToolHeader parse_header(const std::string& raw);

struct ToolDescriptor {
  std::string tool_name;
  std::string description;
  std::string method = "GET";
  UrlTemplate url;
  // Required args first, then optional ones, each in documentation order.
  std::vector<ToolArg> args;
  std::vector<ToolHeader> headers;
  std::string source_id;
  int timeout_seconds = 50;
  bool tls_verify = true;
  // Notes produced during generation, e.g. "UnboundPathParam:id".
  std::vector<std::string> flags;

  const ToolArg* find_arg(const std::string& name) const;
  ToolArg* find_arg(const std::string& name);

  bool operator==(const ToolDescriptor&) const = default;
};

nlohmann::json to_json(const ToolDescriptor& tool);
ToolDescriptor tool_from_json(const nlohmann::json& j);

// Lowercase, non-alphanumerics to "_", runs collapsed, edges stripped and an
// "f_" prefix before a leading digit. Never empty.
std::string sanitize_tool_name(std::string_view name);

// Total: malformed URLs fall back to a literal template and are flagged.
ToolDescriptor generate_tool(const Endpoint& endpoint, const std::string& source_id);

// One descriptor per endpoint; colliding names get "_2", "_3"...
std::vector<ToolDescriptor> generate_tools(const ApiSpec& spec, const std::string& source_id);

// Standalone script function in the usual generated-tool layout.
std::string export_function_source(const ToolDescriptor& tool);

// Groups scheme-bearing tools by origin; tools without a scheme are skipped.
std::map<std::string, std::vector<ToolDescriptor>> group_by_host(
    const std::vector<ToolDescriptor>& tools);

// OpenAPI 3 document for tools that share one origin. Throws
// Error(MixedHosts) otherwise, including for scheme-less tools.
std::string export_openapi(const std::vector<ToolDescriptor>& tools, const std::string& title = {});

// Whether parameters travel in the query string (true) or a JSON body.
bool sends_query(const std::string& method);

}  // namespace doc2tool
