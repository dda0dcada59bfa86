#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace doc2tool {

// Recovers a JSON value from free-form model output: strips ``` fences,
// locates the outermost balanced {...} span (string-aware) and parses it.
// Throws Error(RepairFailure) with reason "no-object", "unbalanced" or
// "parse" when nothing usable is found. Truncated output is never salvaged.
nlohmann::json repair_json(std::string_view raw);

}  // namespace doc2tool
