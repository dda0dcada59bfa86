#pragma once

// Typed form of the extraction schema: an API is a title plus a list of
// endpoints, each endpoint a method, one or more URLs and two parameter lists.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace doc2tool {

using Json = nlohmann::json;

// Default/example values. JSON null is represented by an absent optional;
// arrays and objects are kept as their compact JSON text.
using Scalar = std::variant<bool, std::int64_t, double, std::string>;

std::optional<Scalar> scalar_from_json(const Json& j);
Json scalar_to_json(const Scalar& s);
// The form a value takes on the wire.
std::string scalar_to_string(const Scalar& s);

struct Parameter {
  std::string name;
  std::optional<std::string> type_hint;
  std::optional<std::string> description;
  std::optional<Scalar> default_value;
  std::optional<Scalar> example_value;

  bool operator==(const Parameter&) const = default;
};

struct Endpoint {
  std::string name;
  std::optional<std::string> description;
  std::string method;
  std::vector<std::string> url;
  // Remembers whether the source wrote url as an array, for faithful output.
  bool url_is_list = false;
  std::vector<std::string> headers;
  std::vector<Parameter> required_parameters;
  std::vector<Parameter> optional_parameters;

  bool method_recognized() const;

  bool operator==(const Endpoint&) const = default;
};

struct ApiSpec {
  std::optional<std::string> title;
  std::vector<Endpoint> endpoints;

  bool operator==(const ApiSpec&) const = default;
};

enum class ViolationKind { MissingRequiredField, WrongValueKind, NotAnObject, InvalidValue };

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string path;
  std::string detail;

  std::string describe() const;
  bool operator==(const Violation&) const = default;
};

struct SpecValidation {
  std::optional<ApiSpec> spec;
  std::vector<Violation> violations;

  bool ok() const { return spec.has_value() && violations.empty(); }
};

// Accepts both the wrapped form {"API": {...}} and a bare API object.
// Unknown fields are ignored.
SpecValidation validate_spec(const Json& document);

// Serializes in the wrapped on-disk form {"API": {...}}.
Json to_json(const ApiSpec& spec);
Json to_json(const Endpoint& endpoint);
Json to_json(const Parameter& parameter);

std::string normalize_method(std::string_view method);
bool is_known_method(std::string_view normalized);

// Canonical spelling of a free-text type label: {string,str}, {integer,int},
// {number,float,double}, {boolean,bool}; anything else is lowercased.
std::string canonical_type(std::string_view type);

struct ResolvedUrl {
  std::string primary;
  std::vector<std::string> alternates;
  bool has_scheme = false;
  bool path_is_empty = false;

  bool operator==(const ResolvedUrl&) const = default;
};

ResolvedUrl resolve_url(const Endpoint& endpoint);
ResolvedUrl resolve_url(std::string_view url);

// Splits "scheme://host:port/path?query" into origin and path+query.
// For scheme-less URLs the origin is empty unless the URL starts with a host.
struct UrlParts {
  std::string scheme;     // "http" / "https" or empty
  std::string authority;  // host[:port]
  std::string path;       // begins with '/' or is empty
  std::string query;      // without '?'
};

UrlParts split_url(std::string_view url);

}  // namespace doc2tool
