#include "doc2tool/html.hpp"

#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>

#include "doc2tool/strings.hpp"

namespace doc2tool {

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

const std::map<std::string, std::uint32_t, std::less<>>& named_entities() {
  static const std::map<std::string, std::uint32_t, std::less<>> table = {
      {"amp", '&'},     {"lt", '<'},       {"gt", '>'},      {"quot", '"'},
      {"apos", '\''},   {"nbsp", 0xA0},    {"copy", 0xA9},   {"reg", 0xAE},
      {"trade", 0x2122}, {"hellip", 0x2026}, {"mdash", 0x2014}, {"ndash", 0x2013},
      {"lsquo", 0x2018}, {"rsquo", 0x2019}, {"ldquo", 0x201C}, {"rdquo", 0x201D},
      {"bull", 0x2022}, {"middot", 0xB7},  {"eacute", 0xE9}, {"Eacute", 0xC9},
      {"laquo", 0xAB},  {"raquo", 0xBB},   {"times", 0xD7},  {"rarr", 0x2192},
      {"larr", 0x2190},
  };
  return table;
}

bool is_block_tag(std::string_view name) {
  static constexpr std::array<std::string_view, 33> kBlock = {
      "p",      "div",     "br",     "h1",       "h2",    "h3",     "h4",
      "h5",     "h6",      "li",     "ul",       "ol",    "pre",    "table",
      "tr",     "section", "article", "header",  "footer", "nav",   "blockquote",
      "dt",     "dd",      "dl",     "hr",       "title", "main",   "aside",
      "form",   "thead",   "tbody",  "figure",   "caption"};
  for (auto b : kBlock)
    if (b == name) return true;
  return false;
}

bool is_raw_text_tag(std::string_view name) {
  return name == "script" || name == "style" || name == "noscript" || name == "template";
}

struct Tag {
  std::string name;
  bool closing = false;
  std::map<std::string, std::string> attrs;
};

// Parses a tag starting at html[pos] == '<'. Returns the tag and advances pos
// past '>' or nullopt when the '<' does not begin a tag.
std::optional<Tag> parse_tag(std::string_view html, size_t& pos) {
  size_t i = pos + 1;
  Tag tag;
  if (i < html.size() && html[i] == '/') {
    tag.closing = true;
    ++i;
  }
  if (i >= html.size() || !std::isalpha(static_cast<unsigned char>(html[i]))) return std::nullopt;
  while (i < html.size() && (std::isalnum(static_cast<unsigned char>(html[i])) || html[i] == '-'))
    tag.name += static_cast<char>(std::tolower(static_cast<unsigned char>(html[i++])));
  while (i < html.size() && html[i] != '>') {
    if (std::isspace(static_cast<unsigned char>(html[i])) || html[i] == '/') {
      ++i;
      continue;
    }
    std::string key;
    while (i < html.size() && html[i] != '=' && html[i] != '>' &&
           !std::isspace(static_cast<unsigned char>(html[i])) && html[i] != '/')
      key += static_cast<char>(std::tolower(static_cast<unsigned char>(html[i++])));
    while (i < html.size() && std::isspace(static_cast<unsigned char>(html[i]))) ++i;
    std::string value;
    if (i < html.size() && html[i] == '=') {
      ++i;
      while (i < html.size() && std::isspace(static_cast<unsigned char>(html[i]))) ++i;
      if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
        char quote = html[i++];
        while (i < html.size() && html[i] != quote) value += html[i++];
        if (i < html.size()) ++i;
      } else {
        while (i < html.size() && html[i] != '>' &&
               !std::isspace(static_cast<unsigned char>(html[i])))
          value += html[i++];
      }
    }
    if (!key.empty()) tag.attrs[key] = decode_entities(value);
  }
  pos = i < html.size() ? i + 1 : html.size();
  return tag;
}

size_t find_icase(std::string_view hay, std::string_view needle, size_t from) {
  for (size_t i = from; i + needle.size() <= hay.size(); ++i) {
    if (str::starts_with_icase(hay.substr(i), needle)) return i;
  }
  return std::string_view::npos;
}

}  // namespace

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out += '&';
      continue;
    }
    std::string_view body = s.substr(i + 1, semi - i - 1);
    if (!body.empty() && body[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
      std::string_view digits = body.substr(hex ? 2 : 1);
      bool ok = !digits.empty();
      for (char c : digits) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else { ok = false; break; }
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
        if (cp > 0x10FFFF) { ok = false; break; }
      }
      if (!ok) {
        out += '&';
        continue;
      }
      append_utf8(out, cp);
      i = semi;
      continue;
    }
    const auto& table = named_entities();
    if (auto it = table.find(body); it != table.end()) {
      append_utf8(out, it->second);
      i = semi;
    } else {
      out += '&';
    }
  }
  return out;
}

std::string html_to_text(std::string_view html) {
  std::string buf;
  buf.reserve(html.size());
  int pre_depth = 0;
  std::vector<std::string> hrefs;

  auto emit_text = [&](std::string_view raw) {
    std::string text = decode_entities(raw);
    for (size_t p = text.find("\xC2\xA0"); p != std::string::npos; p = text.find("\xC2\xA0", p))
      text.replace(p, 2, " ");
    for (char c : text) {
      if (pre_depth == 0 && (c == '\n' || c == '\r' || c == '\t')) {
        buf += ' ';
      } else if (c == '\r') {
        continue;
      } else {
        buf += c;
      }
    }
  };

  size_t i = 0;
  while (i < html.size()) {
    if (html[i] != '<') {
      size_t next = html.find('<', i);
      if (next == std::string_view::npos) next = html.size();
      emit_text(html.substr(i, next - i));
      i = next;
      continue;
    }
    if (html.compare(i, 4, "<!--") == 0) {
      size_t end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
      size_t end = html.find('>', i);
      i = end == std::string_view::npos ? html.size() : end + 1;
      continue;
    }
    size_t pos = i;
    auto tag = parse_tag(html, pos);
    if (!tag) {
      buf += '<';
      ++i;
      continue;
    }
    i = pos;
    if (!tag->closing && is_raw_text_tag(tag->name)) {
      size_t end = find_icase(html, "</" + tag->name, i);
      if (end == std::string_view::npos) {
        i = html.size();
      } else {
        size_t close = html.find('>', end);
        i = close == std::string_view::npos ? html.size() : close + 1;
      }
      continue;
    }
    const std::string& name = tag->name;
    if (name == "pre") pre_depth += tag->closing ? (pre_depth > 0 ? -1 : 0) : 1;
    if (name == "td" || name == "th") {
      if (!tag->closing) buf += " | ";
      continue;
    }
    if (name == "a") {
      if (!tag->closing) {
        auto it = tag->attrs.find("href");
        std::string href = it == tag->attrs.end() ? "" : str::trim(it->second);
        if (href.empty() || href[0] == '#' || str::starts_with_icase(href, "javascript:") ||
            str::starts_with_icase(href, "mailto:"))
          href.clear();
        hrefs.push_back(href);
        if (!href.empty()) hrefs.back() += '\x01' + std::to_string(buf.size());
      } else if (!hrefs.empty()) {
        std::string rec = hrefs.back();
        hrefs.pop_back();
        if (!rec.empty()) {
          auto sep = rec.find('\x01');
          std::string href = rec.substr(0, sep);
          size_t start = std::stoul(rec.substr(sep + 1));
          std::string anchor_text = str::trim(buf.substr(std::min(start, buf.size())));
          if (anchor_text != href) buf += " (" + href + ")";
        }
      }
      continue;
    }
    if (is_block_tag(name)) buf += '\n';
  }

  // Collapse whitespace, then drop blank lines and fix cell separators.
  std::string collapsed = str::collapse_spaces(buf);
  std::string out;
  for (auto& line : str::split(collapsed, '\n')) {
    std::string t = str::trim(line);
    if (t.empty()) continue;
    if (t.rfind("|", 0) == 0) {
      // " | a | b" -> "| a | b"
      t = str::collapse_spaces(t);
    }
    if (!out.empty()) out += '\n';
    out += t;
  }
  return out;
}

}  // namespace doc2tool
