#pragma once

#include <string>
#include <string_view>

namespace doc2tool {

// Converts HTML markup to plain text.
//
//  - script, style, noscript and template contents are dropped along with
//    comments;
//  - block elements (p, div, li, headings, table rows, br...) end a line;
//  - table cells are introduced by "| " so a row reads "| a | b | c";
//  - anchor targets are kept inline after the link text as "text (href)";
//  - character references are decoded to UTF-8;
//  - whitespace runs collapse to one space, blank lines are dropped, and
//    <pre> blocks keep their line breaks.
std::string html_to_text(std::string_view html);

// Decodes named and numeric character references.
std::string decode_entities(std::string_view s);

}  // namespace doc2tool
