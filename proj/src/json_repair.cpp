#include "doc2tool/json_repair.hpp"

#include "doc2tool/error.hpp"

namespace doc2tool {

namespace {

// Removes ``` fence lines (``` or ```json) while keeping their contents.
std::string strip_fences(std::string_view raw) {
  std::string out;
  size_t i = 0;
  while (i < raw.size()) {
    size_t fence = raw.find("```", i);
    if (fence == std::string_view::npos) {
      out.append(raw.substr(i));
      break;
    }
    out.append(raw.substr(i, fence - i));
    size_t eol = raw.find('\n', fence);
    // A fence opener may carry a language tag up to the end of its line.
    size_t tag_end = fence + 3;
    while (tag_end < raw.size() && raw[tag_end] != '\n' && raw[tag_end] != '{' &&
           raw[tag_end] != '[' && raw[tag_end] != '`')
      ++tag_end;
    i = (eol != std::string_view::npos && eol == tag_end) ? eol + 1 : tag_end;
  }
  return out;
}

}  // namespace

nlohmann::json repair_json(std::string_view raw) {
  const std::string text = strip_fences(raw);

  size_t start = text.find('{');
  if (start == std::string::npos) throw Error(ErrorCode::RepairFailure, "no-object");

  std::string last_parse_error;
  while (start != std::string::npos) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    size_t end = std::string::npos;
    for (size_t i = start; i < text.size(); ++i) {
      char c = text[i];
      if (in_string) {
        if (escaped) escaped = false;
        else if (c == '\\') escaped = true;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '{') ++depth;
      else if (c == '}') {
        if (--depth == 0) {
          end = i;
          break;
        }
      }
    }
    if (end == std::string::npos) {
      if (!last_parse_error.empty()) break;
      throw Error(ErrorCode::RepairFailure, "unbalanced");
    }
    auto parsed = nlohmann::json::parse(text.begin() + static_cast<std::ptrdiff_t>(start),
                                        text.begin() + static_cast<std::ptrdiff_t>(end) + 1,
                                        nullptr, false);
    if (!parsed.is_discarded()) return parsed;
    last_parse_error = "balanced span at offset " + std::to_string(start) + " is not JSON";
    start = text.find('{', end + 1);
  }
  throw Error(ErrorCode::RepairFailure, "parse", last_parse_error);
}

}  // namespace doc2tool
