#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace doc2tool {

struct UrlSegment {
  enum class Kind { Literal, PathParam };
  Kind kind = Kind::Literal;
  std::string text;  // literal text, or the parameter name

  bool operator==(const UrlSegment&) const = default;
};

// A URL whose path may contain placeholders. ":id", "{id}" and "<id>" (also
// "<int:id>") all become PathParam("id"). The origin (scheme and authority)
// is kept apart from the path segments.
struct UrlTemplate {
  std::string raw;
  std::string scheme;
  std::string authority;
  std::vector<UrlSegment> segments;
  std::optional<std::string> query_base;

  bool has_scheme() const { return !scheme.empty(); }
  std::string origin() const;
  // Distinct placeholder names in order of first appearance.
  std::vector<std::string> path_params() const;
  // Path with every placeholder written as {name}.
  std::string canonical_path() const;
  // origin + canonical_path + ?query_base
  std::string canonical() const;
  // Substitutes percent-encoded values; unbound placeholders stay as {name}.
  std::string render(const std::map<std::string, std::string>& bindings) const;

  bool operator==(const UrlTemplate&) const = default;
};

// Throws Error(MalformedUrl) for empty input, unclosed or empty
// placeholders and placeholder names outside [A-Za-z0-9_.-].
UrlTemplate parse_url_template(std::string_view url);

nlohmann::json to_json(const UrlTemplate& t);
UrlTemplate url_template_from_json(const nlohmann::json& j);

}  // namespace doc2tool
