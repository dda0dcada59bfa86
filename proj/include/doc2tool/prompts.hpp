#pragma once

#include <map>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace doc2tool::prompts {

// Prompt templates. Placeholders are written {name} and filled by render().
// The texts are reproduced exactly, including the leading and trailing
// newline of the original triple-quoted strings.

inline constexpr std::string_view kResponseValidation =
    "\n"
    "Decide if the following API response is an information or an error message.\n"
    "\n"
    "API Description:\n"
    "{description}\n"
    "\n"
    "API Response:\n"
    "{response}\n";

inline constexpr std::string_view kParameterGeneration =
    "\n"
    "You will be provided with the information of an API and its parameters. The example "
    "values of the parameters are missing. You need to guess the parameter values.\n"
    "You may have failed severl times before. If you guess with similar values, you may fail "
    "again. Please be innovative and try different values and formats.\n"
    "\n"
    "Your previous failed guesses:\n"
    "***history start\n"
    "{history}\n"
    "***history end\n"
    "\n"
    "API Description:\n"
    "{description}\n"
    "\n"
    "Parameter Description:\n"
    "{param_description}\n"
    "\n"
    "Your Guess:\n";

inline constexpr std::string_view kDocumentClassification =
    "\n"
    "You need to group the API documentation with the following standards:\n"
    "\n"
    "Fully Organized: The documentation follows a well defined template, most likely to be "
    "from an API platform. It is well-structured, clear, and easy to understand. It includes "
    "detailed descriptions, example code, and explanations of how to use the API.\n"
    "Semi-Organized: Lacks some structure, but still includes most of the necessary "
    "information. It may be missing some examples or descriptions, making it slightly more "
    "difficult to understand how to use the API.\n"
    "Unorganized: Missing example or description, or the structure is unclear, making it "
    "difficult to understand how to use the API.\n"
    "\n"
    "===\n"
    "API Documentation:\n"
    "{API_DOC}\n";

inline constexpr std::string_view kExtractionInstruction =
    "You will be given an API documentation. Extract the API endpoints and output in JSON "
    "format.";

// Not part of the published prompt set; used by the remote page filter.
inline constexpr std::string_view kPageFilter =
    "Does the following web page document callable REST API endpoints (a URL together with "
    "how to call it), as opposed to an index, product or marketing page? Answer yes or no.\n"
    "\n"
    "Page:\n"
    "{page}\n";

// Single pass substitution; values are never re-scanned for placeholders.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values);

// Structured-output schemas matching the prompt output classes.
nlohmann::json parameter_list_schema();
nlohmann::json classification_schema();
nlohmann::json verdict_schema();
nlohmann::json page_filter_schema();
// The extraction schema as a JSON Schema document.
nlohmann::json api_extraction_schema();

}  // namespace doc2tool::prompts
