#include "doc2tool/url_template.hpp"

#include <algorithm>
#include <cctype>

#include "doc2tool/error.hpp"
#include "doc2tool/http.hpp"
#include "doc2tool/model.hpp"
#include "doc2tool/strings.hpp"

namespace doc2tool {

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::string checked_name(std::string_view inner, std::string_view url) {
  std::string name = str::trim(inner);
  // Flask style "<int:id>" carries a converter before the colon.
  if (auto colon = name.rfind(':'); colon != std::string::npos) name = name.substr(colon + 1);
  if (name.empty()) throw Error(ErrorCode::MalformedUrl, std::string(url), "empty placeholder");
  if (!std::all_of(name.begin(), name.end(), is_name_char))
    throw Error(ErrorCode::MalformedUrl, std::string(url), "bad placeholder name '" + name + "'");
  return name;
}

void push_literal(std::vector<UrlSegment>& segs, char c) {
  if (segs.empty() || segs.back().kind != UrlSegment::Kind::Literal)
    segs.push_back({UrlSegment::Kind::Literal, {}});
  segs.back().text += c;
}

}  // namespace

std::string UrlTemplate::origin() const {
  if (scheme.empty()) return authority;
  return scheme + "://" + authority;
}

std::vector<std::string> UrlTemplate::path_params() const {
  std::vector<std::string> out;
  for (const auto& s : segments)
    if (s.kind == UrlSegment::Kind::PathParam &&
        std::find(out.begin(), out.end(), s.text) == out.end())
      out.push_back(s.text);
  return out;
}

std::string UrlTemplate::canonical_path() const {
  std::string out;
  for (const auto& s : segments)
    out += s.kind == UrlSegment::Kind::Literal ? s.text : "{" + s.text + "}";
  return out;
}

std::string UrlTemplate::canonical() const {
  std::string out = origin() + canonical_path();
  if (query_base) out += "?" + *query_base;
  return out;
}

std::string UrlTemplate::render(const std::map<std::string, std::string>& bindings) const {
  std::string out = origin();
  for (const auto& s : segments) {
    if (s.kind == UrlSegment::Kind::Literal) {
      out += s.text;
    } else if (auto it = bindings.find(s.text); it != bindings.end()) {
      out += percent_encode(it->second);
    } else {
      out += "{" + s.text + "}";
    }
  }
  if (query_base) out += "?" + *query_base;
  return out;
}

UrlTemplate parse_url_template(std::string_view url) {
  std::string trimmed = str::trim(url);
  if (trimmed.empty()) throw Error(ErrorCode::MalformedUrl, "", "empty URL");

  UrlParts parts = split_url(trimmed);
  UrlTemplate t;
  t.raw = trimmed;
  t.scheme = parts.scheme;
  t.authority = parts.authority;
  if (!parts.query.empty()) t.query_base = parts.query;

  const std::string& path = parts.path;
  for (size_t i = 0; i < path.size(); ++i) {
    char c = path[i];
    if (c == '{' || c == '<') {
      char close = c == '{' ? '}' : '>';
      size_t end = path.find(close, i + 1);
      if (end == std::string::npos)
        throw Error(ErrorCode::MalformedUrl, trimmed, std::string("unclosed '") + c + "'");
      t.segments.push_back({UrlSegment::Kind::PathParam,
                            checked_name(std::string_view(path).substr(i + 1, end - i - 1), trimmed)});
      i = end;
      continue;
    }
    if (c == ':' && (i == 0 || path[i - 1] == '/') && i + 1 < path.size() &&
        (std::isalpha(static_cast<unsigned char>(path[i + 1])) || path[i + 1] == '_')) {
      size_t end = i + 1;
      while (end < path.size() &&
             (std::isalnum(static_cast<unsigned char>(path[end])) || path[end] == '_'))
        ++end;
      t.segments.push_back({UrlSegment::Kind::PathParam, path.substr(i + 1, end - i - 1)});
      i = end - 1;
      continue;
    }
    if (c == '}' || c == '>')
      throw Error(ErrorCode::MalformedUrl, trimmed, std::string("stray '") + c + "'");
    push_literal(t.segments, c);
  }
  return t;
}

nlohmann::json to_json(const UrlTemplate& t) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : t.segments)
    segs.push_back({{s.kind == UrlSegment::Kind::Literal ? "literal" : "param", s.text}});
  nlohmann::json j = {{"raw", t.raw}, {"scheme", t.scheme}, {"authority", t.authority}, {"segments", segs}};
  j["query_base"] = t.query_base ? nlohmann::json(*t.query_base) : nlohmann::json();
  return j;
}

UrlTemplate url_template_from_json(const nlohmann::json& j) {
  UrlTemplate t;
  t.raw = j.value("raw", "");
  t.scheme = j.value("scheme", "");
  t.authority = j.value("authority", "");
  for (const auto& s : j.value("segments", nlohmann::json::array())) {
    if (s.contains("literal")) t.segments.push_back({UrlSegment::Kind::Literal, s["literal"]});
    else t.segments.push_back({UrlSegment::Kind::PathParam, s.value("param", "")});
  }
  if (j.contains("query_base") && j["query_base"].is_string()) t.query_base = j["query_base"];
  return t;
}

}  // namespace doc2tool
