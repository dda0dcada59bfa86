#include "doc2tool/judge.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "doc2tool/error.hpp"
#include "doc2tool/json_repair.hpp"
#include "doc2tool/model.hpp"
#include "doc2tool/prompts.hpp"
#include "doc2tool/strings.hpp"

namespace doc2tool {

std::string_view to_string(DocCategory c) {
  switch (c) {
    case DocCategory::FullyOrganized: return "Fully Organized";
    case DocCategory::SemiOrganized: return "Semi-Organized";
    case DocCategory::Unorganized: return "Unorganized";
  }
  return "Unorganized";
}

std::optional<DocCategory> parse_doc_category(std::string_view s) {
  std::string key;
  for (char c : s)
    if (std::isalpha(static_cast<unsigned char>(c)))
      key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (key == "fullyorganized") return DocCategory::FullyOrganized;
  if (key == "semiorganized") return DocCategory::SemiOrganized;
  if (key == "unorganized") return DocCategory::Unorganized;
  return std::nullopt;
}

std::vector<std::string> default_error_phrases() {
  return {"not found", "invalid", "unauthorized", "error occurred"};
}

namespace signals {

namespace {

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string_view strip_wrapping(std::string_view tok) {
  while (!tok.empty() && (tok.front() == '(' || tok.front() == '"' || tok.front() == '\'' ||
                          tok.front() == '`' || tok.front() == '<'))
    tok.remove_prefix(1);
  return tok;
}

bool is_path_token(std::string_view tok) {
  tok = strip_wrapping(tok);
  if (tok.size() < 2 || tok.front() != '/') return false;
  if (tok[1] == '/') return false;
  bool has_alnum = false;
  for (char c : tok) {
    if (std::isalnum(static_cast<unsigned char>(c))) has_alnum = true;
  }
  return has_alnum;
}

bool is_url_token(std::string_view tok) {
  tok = strip_wrapping(tok);
  return (str::starts_with_icase(tok, "http://") && tok.size() > 7) ||
         (str::starts_with_icase(tok, "https://") && tok.size() > 8) || is_path_token(tok);
}

bool is_verb(std::string_view tok) {
  static constexpr std::array<std::string_view, 7> kVerbs = {"GET",    "POST", "PUT",    "PATCH",
                                                             "DELETE", "HEAD", "OPTIONS"};
  for (auto v : kVerbs)
    if (tok == v) return true;
  return false;
}

}  // namespace

bool has_url_token(std::string_view text) {
  for (const auto& line : str::split(text, '\n'))
    for (auto tok : tokens(line))
      if (is_url_token(tok)) return true;
  return false;
}

size_t count_verb_url_lines(std::string_view text) {
  size_t count = 0;
  for (const auto& line : str::split(text, '\n')) {
    auto toks = tokens(line);
    for (size_t i = 0; i + 1 < toks.size(); ++i) {
      if (is_verb(toks[i]) && is_url_token(toks[i + 1])) {
        ++count;
        break;
      }
    }
  }
  return count;
}

bool has_parameter_keyword(std::string_view text) {
  static constexpr std::array<std::string_view, 6> kKeywords = {
      "parameter", "query string", "querystring", "endpoint", "curl ", "request body"};
  std::string lower = str::to_lower(text);
  for (auto k : kKeywords)
    if (lower.find(k) != std::string::npos) return true;
  for (const auto& line : str::split(text, '\n'))
    for (auto tok : tokens(line)) {
      if (!is_url_token(tok)) continue;
      auto q = tok.find('?');
      if (q != std::string_view::npos && tok.find('=', q) != std::string_view::npos) return true;
    }
  return false;
}

}  // namespace signals

HeuristicJudge::HeuristicJudge(std::vector<std::string> error_phrases)
    : error_phrases_(std::move(error_phrases)) {}

bool HeuristicJudge::is_api_page(std::string_view text) {
  if (!signals::has_url_token(text)) return false;
  return signals::count_verb_url_lines(text) > 0 || signals::has_parameter_keyword(text);
}

DocClassification HeuristicJudge::classify(std::string_view text) {
  size_t verb_lines = signals::count_verb_url_lines(text);
  size_t table_rows = 0;
  size_t example_markers = 0;
  for (const auto& line : str::split(text, '\n')) {
    if (line.rfind("| ", 0) == 0 && std::count(line.begin(), line.end(), '|') >= 3) ++table_rows;
    std::string lower = str::to_lower(line);
    if (lower.find("example") != std::string::npos || lower.find("curl ") != std::string::npos ||
        lower.find("import requests") != std::string::npos ||
        lower.rfind("{", 0) == 0)
      ++example_markers;
  }
  bool url = signals::has_url_token(text);
  bool params = table_rows > 0 || signals::has_parameter_keyword(text);

  DocClassification out;
  if (verb_lines > 0 && table_rows > 0 && example_markers >= verb_lines) {
    out.category = DocCategory::FullyOrganized;
  } else if ((verb_lines > 0 || url) && (params || example_markers > 0)) {
    out.category = DocCategory::SemiOrganized;
  } else {
    out.category = DocCategory::Unorganized;
  }
  out.analysis = std::to_string(verb_lines) + " endpoint line(s), " + std::to_string(table_rows) +
                 " parameter table row(s), " + std::to_string(example_markers) +
                 " example marker(s); " + (url ? "URLs present" : "no URLs") + ", " +
                 (params ? "parameters documented" : "no parameter documentation") + ".";
  if (out.analysis.size() > 300) out.analysis.resize(300);
  return out;
}

Verdict HeuristicJudge::judge_response(std::string_view, std::string_view response_text) {
  std::string body = str::trim(response_text);
  if (body.empty()) return {false, "empty response body"};

  auto matches_phrase = [&](std::string_view s) -> std::optional<std::string> {
    std::string lower = str::to_lower(s);
    for (const auto& p : error_phrases_)
      if (!p.empty() && lower.find(str::to_lower(p)) != std::string::npos) return p;
    return std::nullopt;
  };

  auto json = Json::parse(body, nullptr, false);
  if (!json.is_discarded()) {
    if (json.is_null() || (json.is_object() && json.empty()) || (json.is_array() && json.empty()))
      return {false, "empty JSON payload"};
    if (json.is_object()) {
      for (const char* key : {"error", "errors"}) {
        auto it = json.find(key);
        if (it == json.end()) continue;
        bool signalled = !(it->is_null() || (it->is_boolean() && !it->get<bool>()) ||
                           ((it->is_array() || it->is_object() || it->is_string()) && it->empty()));
        if (signalled) return {false, std::string("top-level '") + key + "' field present"};
      }
      for (const char* key : {"status", "code", "statusCode"}) {
        auto it = json.find(key);
        if (it != json.end() && it->is_number_integer()) {
          auto v = it->get<std::int64_t>();
          if (v >= 400 && v < 600) return {false, std::string("'") + key + "' is " + std::to_string(v)};
        }
      }
      for (auto it = json.begin(); it != json.end(); ++it) {
        if (!it->is_string()) continue;
        const auto& key = it.key();
        if (key != "message" && key != "detail" && key != "status" && key != "msg") continue;
        auto text = it->get<std::string>();
        if (auto p = matches_phrase(text)) return {false, "'" + key + "' reads as an error (" + *p + ")"};
        for (size_t i = 0; i + 3 <= text.size(); ++i) {
          if (text[i] == '4' && std::isdigit(static_cast<unsigned char>(text[i + 1])) &&
              std::isdigit(static_cast<unsigned char>(text[i + 2])) &&
              (i == 0 || !std::isdigit(static_cast<unsigned char>(text[i - 1]))) &&
              (i + 3 == text.size() || !std::isdigit(static_cast<unsigned char>(text[i + 3]))))
            return {false, "'" + key + "' carries a 4xx status"};
        }
      }
    }
    return {true, "structured payload without error signals"};
  }
  if (auto p = matches_phrase(body)) return {false, "body matches error phrase '" + *p + "'"};
  return {true, "non-empty body without error signals"};
}

RemoteJudge::RemoteJudge(std::shared_ptr<ChatClient> client) : client_(std::move(client)) {}

namespace {

Json ask(ChatClient& client, const std::string& prompt, const Json& schema,
         const std::string& schema_name) {
  try {
    auto reply = client.complete({{"user", prompt}}, std::optional<Json>(schema), schema_name);
    try {
      return repair_json(reply.content);
    } catch (const Error&) {
      return Json(reply.content);
    }
  } catch (const Error& e) {
    throw Error(ErrorCode::JudgeUnavailable, client.config().endpoint_url, e.what());
  }
}

}  // namespace

bool RemoteJudge::is_api_page(std::string_view text) {
  auto answer = ask(*client_, prompts::render(prompts::kPageFilter, {{"page", std::string(text)}}),
                    prompts::page_filter_schema(), "PageFilter");
  std::string s = answer.is_object() ? answer.value("answer", "") : answer.is_string() ? answer.get<std::string>() : "";
  s = str::to_lower(str::trim(s));
  if (s.rfind("yes", 0) == 0) return true;
  if (s.rfind("no", 0) == 0) return false;
  throw Error(ErrorCode::JudgeUnavailable, client_->config().endpoint_url, "unparsable answer");
}

DocClassification RemoteJudge::classify(std::string_view text) {
  auto answer = ask(*client_,
                    prompts::render(prompts::kDocumentClassification, {{"API_DOC", std::string(text)}}),
                    prompts::classification_schema(), "Classification");
  if (!answer.is_object())
    throw Error(ErrorCode::JudgeUnavailable, client_->config().endpoint_url, "unparsable answer");
  auto category = parse_doc_category(answer.value("category", ""));
  if (!category)
    throw Error(ErrorCode::JudgeUnavailable, client_->config().endpoint_url, "unknown category");
  DocClassification out{*category, answer.value("analysis", "")};
  if (out.analysis.size() > 300) out.analysis.resize(300);
  return out;
}

Verdict RemoteJudge::judge_response(std::string_view tool_description,
                                    std::string_view response_text) {
  auto answer = ask(*client_,
                    prompts::render(prompts::kResponseValidation,
                                    {{"description", std::string(tool_description)},
                                     {"response", std::string(response_text)}}),
                    prompts::verdict_schema(), "Verdict");
  std::string judgement;
  std::string rationale;
  if (answer.is_object()) {
    judgement = str::to_lower(answer.value("judgement", ""));
    rationale = answer.value("rationale", "");
  } else if (answer.is_string()) {
    rationale = answer.get<std::string>();
    std::string lower = str::to_lower(rationale);
    if (lower.find("error") != std::string::npos) judgement = "error";
    else if (lower.find("information") != std::string::npos) judgement = "information";
  }
  if (judgement == "information") return {true, rationale};
  if (judgement == "error") return {false, rationale};
  throw Error(ErrorCode::JudgeUnavailable, client_->config().endpoint_url, "unparsable verdict");
}

FallbackJudge::FallbackJudge(std::shared_ptr<JudgeBackend> primary,
                             std::shared_ptr<HeuristicJudge> fallback)
    : primary_(std::move(primary)), fallback_(std::move(fallback)) {}

bool FallbackJudge::is_api_page(std::string_view text) {
  try {
    return primary_->is_api_page(text);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::JudgeUnavailable) throw;
    return fallback_->is_api_page(text);
  }
}

DocClassification FallbackJudge::classify(std::string_view text) {
  try {
    return primary_->classify(text);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::JudgeUnavailable) throw;
    return fallback_->classify(text);
  }
}

Verdict FallbackJudge::judge_response(std::string_view tool_description,
                                      std::string_view response_text) {
  try {
    return primary_->judge_response(tool_description, response_text);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::JudgeUnavailable) throw;
    auto v = fallback_->judge_response(tool_description, response_text);
    v.rationale = "[heuristic fallback: judge unavailable] " + v.rationale;
    return v;
  }
}

}  // namespace doc2tool
