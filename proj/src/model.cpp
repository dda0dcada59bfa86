#include "doc2tool/model.hpp"

#include <array>
#include <cmath>
#include <set>

#include "doc2tool/strings.hpp"

namespace doc2tool {

std::optional<Scalar> scalar_from_json(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null:
    case Json::value_t::discarded:
      return std::nullopt;
    case Json::value_t::boolean:
      return Scalar{j.get<bool>()};
    case Json::value_t::number_integer:
      return Scalar{j.get<std::int64_t>()};
    case Json::value_t::number_unsigned: {
      auto u = j.get<std::uint64_t>();
      if (u <= static_cast<std::uint64_t>(INT64_MAX)) return Scalar{static_cast<std::int64_t>(u)};
      return Scalar{static_cast<double>(u)};
    }
    case Json::value_t::number_float:
      return Scalar{j.get<double>()};
    case Json::value_t::string:
      return Scalar{j.get<std::string>()};
    default:
      return Scalar{j.dump()};
  }
}

Json scalar_to_json(const Scalar& s) {
  return std::visit([](const auto& v) { return Json(v); }, s);
}

std::string scalar_to_string(const Scalar& s) {
  struct Visitor {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const {
      if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 1e15)
        return std::to_string(static_cast<std::int64_t>(d));
      return Json(d).dump();
    }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, s);
}

namespace {

constexpr std::array<std::string_view, 9> kKnownMethods = {
    "GET", "POST", "PUT", "PATCH", "DELETE", "HEAD", "OPTIONS", "TRACE", "CONNECT"};

class Validator {
 public:
  std::vector<Violation> violations;

  void add(ViolationKind kind, std::string path, std::string detail = {}) {
    violations.push_back({kind, std::move(path), std::move(detail)});
  }

  std::optional<std::string> optional_string(const Json& obj, const std::string& key,
                                             const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) {
      add(ViolationKind::WrongValueKind, path + "." + key, "expected string");
      return std::nullopt;
    }
    return it->get<std::string>();
  }

  std::optional<std::string> required_string(const Json& obj, const std::string& key,
                                             const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
      add(ViolationKind::MissingRequiredField, path + "." + key);
      return std::nullopt;
    }
    if (!it->is_string()) {
      add(ViolationKind::WrongValueKind, path + "." + key, "expected string");
      return std::nullopt;
    }
    return it->get<std::string>();
  }

  std::optional<Parameter> parameter(const Json& j, const std::string& path) {
    if (!j.is_object()) {
      add(ViolationKind::NotAnObject, path);
      return std::nullopt;
    }
    auto name = required_string(j, "name", path);
    Parameter p;
    if (name) {
      p.name = str::trim(*name);
      if (p.name.empty()) {
        add(ViolationKind::InvalidValue, path + ".name", "empty parameter name");
      } else if (p.name.find_first_of(" \t\r\n") != std::string::npos) {
        add(ViolationKind::InvalidValue, path + ".name", "whitespace in parameter name");
      }
    }
    p.type_hint = optional_string(j, "type", path);
    p.description = optional_string(j, "description", path);
    if (auto it = j.find("default"); it != j.end()) p.default_value = scalar_from_json(*it);
    if (auto it = j.find("example"); it != j.end()) p.example_value = scalar_from_json(*it);
    if (!name) return std::nullopt;
    return p;
  }

  std::vector<Parameter> parameter_list(const Json& obj, const std::string& key,
                                        const std::string& path) {
    std::vector<Parameter> out;
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return out;
    if (!it->is_array()) {
      add(ViolationKind::WrongValueKind, path + "." + key, "expected array");
      return out;
    }
    for (size_t i = 0; i < it->size(); ++i) {
      if (auto p = parameter((*it)[i], path + "." + key + "[" + std::to_string(i) + "]"))
        out.push_back(std::move(*p));
    }
    return out;
  }

  std::optional<Endpoint> endpoint(const Json& j, const std::string& path) {
    if (!j.is_object()) {
      add(ViolationKind::NotAnObject, path);
      return std::nullopt;
    }
    const size_t before = violations.size();
    Endpoint e;
    auto name = required_string(j, "name", path);
    auto method = required_string(j, "method", path);
    e.description = optional_string(j, "description", path);

    auto url = j.find("url");
    if (url == j.end() || url->is_null()) {
      add(ViolationKind::MissingRequiredField, path + ".url");
    } else if (url->is_string()) {
      e.url.push_back(url->get<std::string>());
    } else if (url->is_array()) {
      e.url_is_list = true;
      for (size_t i = 0; i < url->size(); ++i) {
        const auto& u = (*url)[i];
        if (!u.is_string()) {
          add(ViolationKind::WrongValueKind, path + ".url[" + std::to_string(i) + "]",
              "expected string");
        } else {
          e.url.push_back(u.get<std::string>());
        }
      }
      if (url->empty()) add(ViolationKind::InvalidValue, path + ".url", "empty url list");
    } else {
      add(ViolationKind::WrongValueKind, path + ".url", "expected string or array");
    }

    if (auto h = j.find("headers"); h != j.end() && !h->is_null()) {
      if (!h->is_array()) {
        add(ViolationKind::WrongValueKind, path + ".headers", "expected array");
      } else {
        for (size_t i = 0; i < h->size(); ++i) {
          const auto& v = (*h)[i];
          if (!v.is_string()) {
            add(ViolationKind::WrongValueKind, path + ".headers[" + std::to_string(i) + "]",
                "expected string");
          } else {
            e.headers.push_back(v.get<std::string>());
          }
        }
      }
    }

    e.required_parameters = parameter_list(j, "required_parameters", path);
    e.optional_parameters = parameter_list(j, "optional_parameters", path);

    std::set<std::string> required_names;
    for (const auto& p : e.required_parameters) required_names.insert(p.name);
    for (size_t i = 0; i < e.optional_parameters.size(); ++i) {
      if (required_names.count(e.optional_parameters[i].name)) {
        add(ViolationKind::InvalidValue,
            path + ".optional_parameters[" + std::to_string(i) + "].name",
            "parameter '" + e.optional_parameters[i].name + "' is also required");
      }
    }

    if (name) e.name = *name;
    if (method) e.method = normalize_method(*method);
    if (violations.size() != before) return std::nullopt;
    return e;
  }

  std::optional<ApiSpec> api(const Json& j, const std::string& path) {
    if (!j.is_object()) {
      add(ViolationKind::NotAnObject, path.empty() ? "$" : path);
      return std::nullopt;
    }
    const std::string prefix = path.empty() ? "" : path + ".";
    ApiSpec spec;
    if (auto t = j.find("title"); t != j.end() && !t->is_null()) {
      if (t->is_string()) {
        spec.title = t->get<std::string>();
      } else {
        add(ViolationKind::WrongValueKind, prefix + "title", "expected string");
      }
    }
    auto eps = j.find("endpoints");
    if (eps == j.end() || eps->is_null()) {
      add(ViolationKind::MissingRequiredField, prefix + "endpoints");
      return std::nullopt;
    }
    if (!eps->is_array()) {
      add(ViolationKind::WrongValueKind, prefix + "endpoints", "expected array");
      return std::nullopt;
    }
    for (size_t i = 0; i < eps->size(); ++i) {
      if (auto e = endpoint((*eps)[i], prefix + "endpoints[" + std::to_string(i) + "]"))
        spec.endpoints.push_back(std::move(*e));
    }
    return spec;
  }
};

}  // namespace

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::MissingRequiredField: return "MissingRequiredField";
    case ViolationKind::WrongValueKind: return "WrongValueKind";
    case ViolationKind::NotAnObject: return "NotAnObject";
    case ViolationKind::InvalidValue: return "InvalidValue";
  }
  return "Unknown";
}

std::string Violation::describe() const {
  std::string out = std::string(to_string(kind)) + "(\"" + path + "\")";
  if (!detail.empty()) out += ": " + detail;
  return out;
}

SpecValidation validate_spec(const Json& document) {
  Validator v;
  SpecValidation result;
  if (!document.is_object()) {
    v.add(ViolationKind::NotAnObject, "$");
  } else if (auto it = document.find("API"); it != document.end()) {
    result.spec = v.api(*it, "API");
  } else {
    result.spec = v.api(document, "");
  }
  result.violations = std::move(v.violations);
  if (!result.violations.empty()) result.spec.reset();
  return result;
}

Json to_json(const Parameter& p) {
  Json j = {{"name", p.name}};
  if (p.type_hint) j["type"] = *p.type_hint;
  if (p.description) j["description"] = *p.description;
  j["default"] = p.default_value ? scalar_to_json(*p.default_value) : Json(nullptr);
  j["example"] = p.example_value ? scalar_to_json(*p.example_value) : Json(nullptr);
  return j;
}

Json to_json(const Endpoint& e) {
  Json j = {{"name", e.name}};
  if (e.description) j["description"] = *e.description;
  j["method"] = e.method;
  if (e.url_is_list || e.url.size() != 1) {
    j["url"] = e.url;
  } else {
    j["url"] = e.url.front();
  }
  j["headers"] = e.headers;
  j["required_parameters"] = Json::array();
  for (const auto& p : e.required_parameters) j["required_parameters"].push_back(to_json(p));
  j["optional_parameters"] = Json::array();
  for (const auto& p : e.optional_parameters) j["optional_parameters"].push_back(to_json(p));
  return j;
}

Json to_json(const ApiSpec& spec) {
  Json api = Json::object();
  if (spec.title) api["title"] = *spec.title;
  api["endpoints"] = Json::array();
  for (const auto& e : spec.endpoints) api["endpoints"].push_back(to_json(e));
  return Json{{"API", api}};
}

std::string normalize_method(std::string_view method) {
  return str::to_upper(str::trim(method));
}

std::string canonical_type(std::string_view type) {
  std::string t = str::to_lower(str::trim(type));
  if (t == "str") return "string";
  if (t == "int") return "integer";
  if (t == "float" || t == "double") return "number";
  if (t == "bool") return "boolean";
  return t;
}

bool is_known_method(std::string_view normalized) {
  for (auto m : kKnownMethods)
    if (m == normalized) return true;
  return false;
}

bool Endpoint::method_recognized() const { return is_known_method(method); }

UrlParts split_url(std::string_view url) {
  UrlParts parts;
  std::string_view rest = url;
  if (auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
  if (str::starts_with_icase(rest, "http://")) {
    parts.scheme = "http";
    rest.remove_prefix(7);
  } else if (str::starts_with_icase(rest, "https://")) {
    parts.scheme = "https";
    rest.remove_prefix(8);
  }
  if (auto q = rest.find('?'); q != std::string_view::npos) {
    parts.query = std::string(rest.substr(q + 1));
    rest = rest.substr(0, q);
  }
  if (!parts.scheme.empty()) {
    auto slash = rest.find('/');
    parts.authority = std::string(rest.substr(0, slash));
    parts.path = slash == std::string_view::npos ? "" : std::string(rest.substr(slash));
  } else if (!rest.empty() && rest.front() != '/') {
    auto slash = rest.find('/');
    auto head = rest.substr(0, slash);
    if (head.find('.') != std::string_view::npos) {
      parts.authority = std::string(head);
      parts.path = slash == std::string_view::npos ? "" : std::string(rest.substr(slash));
    } else {
      parts.path = std::string(rest);
    }
  } else {
    parts.path = std::string(rest);
  }
  return parts;
}

ResolvedUrl resolve_url(std::string_view url) {
  UrlParts parts = split_url(str::trim(url));
  std::string path;
  for (char c : parts.path) {
    if (c == '/' && !path.empty() && path.back() == '/') continue;
    path += c;
  }
  ResolvedUrl r;
  if (!parts.scheme.empty()) r.primary = parts.scheme + "://";
  r.primary += parts.authority + path;
  if (!parts.query.empty()) r.primary += "?" + parts.query;
  r.has_scheme = r.primary.rfind("http://", 0) == 0 || r.primary.rfind("https://", 0) == 0;
  r.path_is_empty = path.empty() || path == "/";
  return r;
}

ResolvedUrl resolve_url(const Endpoint& endpoint) {
  if (endpoint.url.empty()) return ResolvedUrl{};
  ResolvedUrl r = resolve_url(endpoint.url.front());
  for (size_t i = 1; i < endpoint.url.size(); ++i)
    r.alternates.push_back(resolve_url(endpoint.url[i]).primary);
  return r;
}

}  // namespace doc2tool
