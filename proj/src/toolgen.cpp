#include "doc2tool/toolgen.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "doc2tool/error.hpp"
#include "doc2tool/strings.hpp"

namespace doc2tool {

std::string_view to_string(ArgLocation loc) { return loc == ArgLocation::Path ? "path" : "query"; }

ToolHeader parse_header(const std::string& raw) {
  auto colon = raw.find(':');
  if (colon == std::string::npos) return {raw, "", false};
  std::string name = str::trim(std::string_view(raw).substr(0, colon));
  std::string value = str::trim(std::string_view(raw).substr(colon + 1));
  if (name.empty() || name.find_first_of(" \t") != std::string::npos) return {raw, "", false};
  return {name, value, true};
}

const ToolArg* ToolDescriptor::find_arg(const std::string& name) const {
  for (const auto& a : args)
    if (a.name == name) return &a;
  return nullptr;
}

ToolArg* ToolDescriptor::find_arg(const std::string& name) {
  for (auto& a : args)
    if (a.name == name) return &a;
  return nullptr;
}

namespace {

nlohmann::json optional_scalar(const std::optional<Scalar>& v) {
  return v ? scalar_to_json(*v) : nlohmann::json();
}

std::optional<std::string> optional_text(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

std::optional<Scalar> optional_value(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return std::nullopt;
  return scalar_from_json(*it);
}

}  // namespace

nlohmann::json to_json(const ToolDescriptor& tool) {
  nlohmann::json args = nlohmann::json::array();
  for (const auto& a : tool.args) {
    nlohmann::json arg = {{"name", a.name},
                          {"location", std::string(to_string(a.location))},
                          {"required", a.required},
                          {"type", a.type_hint ? nlohmann::json(*a.type_hint) : nlohmann::json()},
                          {"description", a.description ? nlohmann::json(*a.description) : nlohmann::json()},
                          {"example", optional_scalar(a.example_value)},
                          {"default", optional_scalar(a.default_value)}};
    if (a.synthesized) arg["synthesized"] = true;
    args.push_back(std::move(arg));
  }
  nlohmann::json headers = nlohmann::json::array();
  for (const auto& h : tool.headers)
    headers.push_back(h.parsed ? nlohmann::json(h.name + ": " + h.value) : nlohmann::json(h.name));
  return {{"tool_name", tool.tool_name},
          {"description", tool.description},
          {"method", tool.method},
          {"url", tool.url.raw},
          {"template", to_json(tool.url)},
          {"args", args},
          {"headers", headers},
          {"source_id", tool.source_id},
          {"timeout_seconds", tool.timeout_seconds},
          {"tls_verify", tool.tls_verify},
          {"flags", tool.flags}};
}

ToolDescriptor tool_from_json(const nlohmann::json& j) {
  ToolDescriptor t;
  t.tool_name = j.at("tool_name").get<std::string>();
  t.description = j.value("description", "");
  t.method = normalize_method(j.value("method", "GET"));
  if (j.contains("template")) {
    t.url = url_template_from_json(j["template"]);
  } else {
    t.url = parse_url_template(j.at("url").get<std::string>());
  }
  for (const auto& a : j.value("args", nlohmann::json::array())) {
    ToolArg arg;
    arg.name = a.at("name").get<std::string>();
    arg.location = a.value("location", "query") == "path" ? ArgLocation::Path : ArgLocation::Query;
    arg.required = a.value("required", false);
    arg.type_hint = optional_text(a, "type");
    arg.description = optional_text(a, "description");
    arg.example_value = optional_value(a, "example");
    arg.default_value = optional_value(a, "default");
    arg.synthesized = a.value("synthesized", false);
    t.args.push_back(std::move(arg));
  }
  for (const auto& h : j.value("headers", nlohmann::json::array()))
    if (h.is_string()) t.headers.push_back(parse_header(h.get<std::string>()));
  t.source_id = j.value("source_id", "");
  t.timeout_seconds = j.value("timeout_seconds", 50);
  t.tls_verify = j.value("tls_verify", true);
  t.flags = j.value("flags", std::vector<std::string>{});
  return t;
}

std::string sanitize_tool_name(std::string_view name) {
  std::string out;
  for (unsigned char c : name) {
    if (std::isalnum(c) && c < 0x80) {
      out += static_cast<char>(std::tolower(c));
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  if (out.empty()) return "tool";
  if (std::isdigit(static_cast<unsigned char>(out[0]))) out = "f_" + out;
  return out;
}

ToolDescriptor generate_tool(const Endpoint& endpoint, const std::string& source_id) {
  ToolDescriptor t;
  t.tool_name = sanitize_tool_name(endpoint.name);
  t.description = endpoint.description ? *endpoint.description : endpoint.name;
  t.method = normalize_method(endpoint.method);
  t.source_id = source_id;
  if (!endpoint.method_recognized()) t.flags.push_back("UnknownMethod:" + endpoint.method);

  std::string url = endpoint.url.empty() ? "" : resolve_url(endpoint).primary;
  try {
    t.url = parse_url_template(url);
  } catch (const Error& e) {
    t.flags.push_back("MalformedUrl");
    UrlParts parts = split_url(url);
    t.url.raw = url;
    t.url.scheme = parts.scheme;
    t.url.authority = parts.authority;
    if (!parts.path.empty()) t.url.segments.push_back({UrlSegment::Kind::Literal, parts.path});
    if (!parts.query.empty()) t.url.query_base = parts.query;
  }

  const auto path_params = t.url.path_params();
  auto is_path = [&](const std::string& n) {
    return std::find(path_params.begin(), path_params.end(), n) != path_params.end();
  };
  auto make_arg = [&](const Parameter& p, bool required) {
    ToolArg a;
    a.name = p.name;
    a.location = is_path(p.name) ? ArgLocation::Path : ArgLocation::Query;
    // A path segment cannot be left out of the URL.
    a.required = required || a.location == ArgLocation::Path;
    a.type_hint = p.type_hint;
    a.description = p.description;
    a.example_value = p.example_value;
    a.default_value = p.default_value;
    return a;
  };

  std::vector<ToolArg> required, optional;
  for (const auto& p : endpoint.required_parameters) required.push_back(make_arg(p, true));
  for (const auto& p : endpoint.optional_parameters) {
    ToolArg a = make_arg(p, false);
    (a.required ? required : optional).push_back(std::move(a));
  }
  for (const auto& name : path_params) {
    bool bound = std::any_of(required.begin(), required.end(),
                             [&](const ToolArg& a) { return a.name == name; });
    if (bound) continue;
    ToolArg a;
    a.name = name;
    a.location = ArgLocation::Path;
    a.required = true;
    a.synthesized = true;
    required.push_back(std::move(a));
    t.flags.push_back("UnboundPathParam:" + name);
  }
  t.args = std::move(required);
  for (auto& a : optional) t.args.push_back(std::move(a));

  for (const auto& h : endpoint.headers) t.headers.push_back(parse_header(h));
  return t;
}

std::vector<ToolDescriptor> generate_tools(const ApiSpec& spec, const std::string& source_id) {
  std::vector<ToolDescriptor> out;
  std::set<std::string> taken;
  for (const auto& e : spec.endpoints) {
    ToolDescriptor t = generate_tool(e, source_id);
    std::string base = t.tool_name;
    for (int n = 2; taken.count(t.tool_name); ++n) t.tool_name = base + "_" + std::to_string(n);
    taken.insert(t.tool_name);
    out.push_back(std::move(t));
  }
  return out;
}

bool sends_query(const std::string& method) { return normalize_method(method) == "GET"; }

// ---------------------------------------------------------------------------
// Script export

namespace {

const std::set<std::string>& python_keywords() {
  static const std::set<std::string> kw = {
      "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class",
      "continue", "def", "del", "elif", "else", "except", "finally", "for", "from", "global",
      "if", "import", "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return",
      "try", "while", "with", "yield", "requests", "json"};
  return kw;
}

std::string python_identifier(const std::string& name) {
  std::string out;
  for (unsigned char c : name) out += (std::isalnum(c) && c < 0x80) || c == '_' ? char(c) : '_';
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "p_" + out;
  if (python_keywords().count(out)) out += "_";
  return out;
}

std::string python_single_quoted(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\\' || c == '\'') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "'";
}

std::string python_literal(const Scalar& v) {
  struct Visitor {
    std::string operator()(bool b) const { return b ? "True" : "False"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return nlohmann::json(d).dump(); }
    std::string operator()(const std::string& s) const {
      std::string body;
      for (char c : s) {
        if (c == '\\') body += "\\\\";
        else if (c == '\'') body += "\\'";
        else body += c;
      }
      return "'''" + body + "'''";
    }
  };
  return std::visit(Visitor{}, v);
}

std::string fstring_literal(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '{' || c == '}') out += c;
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string export_function_source(const ToolDescriptor& tool) {
  std::map<std::string, std::string> ident;
  std::set<std::string> used;
  for (const auto& a : tool.args) {
    std::string id = python_identifier(a.name);
    std::string base = id;
    for (int n = 2; used.count(id); ++n) id = base + "_" + std::to_string(n);
    used.insert(id);
    ident[a.name] = id;
  }

  std::string url_expr = fstring_literal(tool.url.origin());
  for (const auto& s : tool.url.segments) {
    if (s.kind == UrlSegment::Kind::Literal) url_expr += fstring_literal(s.text);
    else url_expr += "{" + (ident.count(s.text) ? ident[s.text] : python_identifier(s.text)) + "}";
  }
  if (tool.url.query_base) url_expr += "?" + fstring_literal(*tool.url.query_base);

  std::string verb = str::to_lower(tool.method);
  const bool query = sends_query(tool.method);
  const std::string params_kw = query ? "params" : "json";
  const std::string verify = tool.tls_verify ? "True" : "False";
  const std::string timeout = std::to_string(tool.timeout_seconds);

  std::ostringstream src;
  src << "import requests\n\n\n";

  std::vector<std::string> sig;
  for (const auto& a : tool.args) sig.push_back(ident[a.name] + "=None");
  src << "def " << tool.tool_name << "(" << str::join(sig, ", ") << "):\n";
  src << "    api_url = f\"" << url_expr << "\"\n";

  src << "    querystring = {";
  for (const auto& a : tool.args)
    if (a.location == ArgLocation::Query) src << python_single_quoted(a.name) << ": " << ident[a.name] << ", ";
  src << "}\n";

  std::string header_kw;
  if (!tool.headers.empty()) {
    src << "    headers = {";
    for (const auto& h : tool.headers)
      if (h.parsed) src << python_single_quoted(h.name) << ": " << python_single_quoted(h.value) << ", ";
    src << "}\n";
    header_kw = ", headers=headers";
  }

  for (const auto& a : tool.args)
    if (a.required)
      src << "    assert " << ident[a.name] << " is not None, 'Missing required parameter: " << a.name
          << "'\n";
  src << "    \n";
  src << "    response = requests." << verb << "(url=api_url, " << params_kw << "=querystring" << header_kw
      << ", timeout=" << timeout << ", verify=" << verify << ")\n";
  src << "    if response.status_code != 200:\n";
  src << "        response2 = requests." << verb << "(url=api_url" << header_kw << ", timeout=" << timeout
      << ") # in case API can't handle redundant params\n";
  src << "        response = response2\n";
  src << "    return response\n";
  src << "    # print(response.json())\n\n";

  std::vector<std::string> call;
  for (const auto& a : tool.args)
    if (auto v = a.value()) call.push_back(ident[a.name] + "=" + python_literal(*v));
  src << "if __name__ == '__main__':\n";
  src << "    r = " << tool.tool_name << "(" << str::join(call, ", ") << ")\n";
  src << "    r_json = None\n";
  src << "    try:\n";
  src << "        r_json = r.json()\n";
  src << "    except:\n";
  src << "        pass\n";
  src << "    import json\n";
  src << "    result_dict = dict()\n";
  src << "    result_dict['status_code'] = r.status_code\n";
  src << "    result_dict['text'] = r.text\n";
  src << "    result_dict['json'] = r_json\n";
  src << "    result_dict['content'] = r.content.decode(\"utf-8\")\n";
  return src.str();
}

// ---------------------------------------------------------------------------
// OpenAPI export

std::map<std::string, std::vector<ToolDescriptor>> group_by_host(
    const std::vector<ToolDescriptor>& tools) {
  std::map<std::string, std::vector<ToolDescriptor>> out;
  for (const auto& t : tools)
    if (t.url.has_scheme()) out[str::to_lower(t.url.origin())].push_back(t);
  return out;
}

namespace {

std::string schema_type(const std::optional<std::string>& hint) {
  if (!hint) return "string";
  std::string t = canonical_type(*hint);
  static const std::set<std::string> known = {"string", "integer", "number", "boolean", "array", "object"};
  return known.count(t) ? t : "string";
}

void emit_scalar(YAML::Emitter& out, const Scalar& v) {
  std::visit([&](const auto& x) { out << x; }, v);
}

void emit_schema(YAML::Emitter& out, const ToolArg& a) {
  out << YAML::Key << "schema" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "type" << YAML::Value << schema_type(a.type_hint);
  if (a.default_value) {
    out << YAML::Key << "default" << YAML::Value;
    emit_scalar(out, *a.default_value);
  }
  out << YAML::EndMap;
}

void emit_operation(YAML::Emitter& out, const ToolDescriptor& t) {
  out << YAML::Key << str::to_lower(t.method) << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "operationId" << YAML::Value << t.tool_name;
  out << YAML::Key << "summary" << YAML::Value << t.tool_name;
  out << YAML::Key << "description" << YAML::Value << t.description;

  const bool query = sends_query(t.method);
  std::vector<const ToolArg*> params, body;
  for (const auto& a : t.args) (a.location == ArgLocation::Path || query ? params : body).push_back(&a);

  if (!params.empty()) {
    out << YAML::Key << "parameters" << YAML::Value << YAML::BeginSeq;
    for (const auto* a : params) {
      out << YAML::BeginMap;
      out << YAML::Key << "name" << YAML::Value << a->name;
      out << YAML::Key << "in" << YAML::Value << std::string(to_string(a->location));
      out << YAML::Key << "required" << YAML::Value << a->required;
      if (a->description) out << YAML::Key << "description" << YAML::Value << *a->description;
      emit_schema(out, *a);
      if (a->example_value) {
        out << YAML::Key << "example" << YAML::Value;
        emit_scalar(out, *a->example_value);
      }
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }

  if (!body.empty()) {
    out << YAML::Key << "requestBody" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "content" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "application/json" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "schema" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "type" << YAML::Value << "object";
    std::vector<std::string> required;
    out << YAML::Key << "properties" << YAML::Value << YAML::BeginMap;
    for (const auto* a : body) {
      if (a->required) required.push_back(a->name);
      out << YAML::Key << a->name << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "type" << YAML::Value << schema_type(a->type_hint);
      if (a->description) out << YAML::Key << "description" << YAML::Value << *a->description;
      if (a->example_value) {
        out << YAML::Key << "example" << YAML::Value;
        emit_scalar(out, *a->example_value);
      }
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
    if (!required.empty()) out << YAML::Key << "required" << YAML::Value << required;
    out << YAML::EndMap << YAML::EndMap << YAML::EndMap << YAML::EndMap;
  }

  out << YAML::Key << "responses" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "200" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "description" << YAML::Value << "Successful response";
  out << YAML::EndMap << YAML::EndMap;
  out << YAML::EndMap;
}

}  // namespace

std::string export_openapi(const std::vector<ToolDescriptor>& tools, const std::string& title) {
  if (tools.empty()) throw Error(ErrorCode::MixedHosts, "", "no tools");
  for (const auto& t : tools)
    if (!t.url.has_scheme()) throw Error(ErrorCode::MixedHosts, t.tool_name, "URL has no scheme");
  const std::string origin = str::to_lower(tools.front().url.origin());
  for (const auto& t : tools)
    if (str::to_lower(t.url.origin()) != origin)
      throw Error(ErrorCode::MixedHosts, t.tool_name, t.url.origin() + " vs " + origin);

  // Path items in first-seen order, each holding its operations.
  std::vector<std::pair<std::string, std::vector<const ToolDescriptor*>>> paths;
  for (const auto& t : tools) {
    std::string path = t.url.canonical_path();
    if (path.empty()) path = "/";
    auto it = std::find_if(paths.begin(), paths.end(), [&](const auto& p) { return p.first == path; });
    if (it == paths.end()) paths.push_back({path, {&t}});
    else it->second.push_back(&t);
  }

  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "openapi" << YAML::Value << "3.0.3";
  out << YAML::Key << "info" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "title" << YAML::Value << (title.empty() ? tools.front().url.authority : title);
  out << YAML::Key << "version" << YAML::Value << YAML::DoubleQuoted << "1.0.0";
  out << YAML::EndMap;
  out << YAML::Key << "servers" << YAML::Value << YAML::BeginSeq << YAML::BeginMap;
  out << YAML::Key << "url" << YAML::Value << tools.front().url.origin();
  out << YAML::EndMap << YAML::EndSeq;
  out << YAML::Key << "paths" << YAML::Value << YAML::BeginMap;
  for (const auto& [path, ops] : paths) {
    out << YAML::Key << path << YAML::Value << YAML::BeginMap;
    std::set<std::string> verbs;
    for (const auto* t : ops) {
      // OpenAPI allows one operation per verb and path; later duplicates are dropped.
      if (!verbs.insert(str::to_lower(t->method)).second) continue;
      emit_operation(out, *t);
    }
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace doc2tool
