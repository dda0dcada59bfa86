#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace doc2tool::str {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
bool starts_with_icase(std::string_view s, std::string_view prefix);
bool contains_icase(std::string_view haystack, std::string_view needle);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Collapses runs of spaces/tabs into one space and trims each line.
std::string collapse_spaces(std::string_view s);

}  // namespace doc2tool::str
