#include "doc2tool/prompts.hpp"

namespace doc2tool::prompts {

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      size_t close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

nlohmann::json parameter_list_schema() {
  return {
      {"type", "object"},
      {"properties",
       {{"parameters",
         {{"type", "array"},
          {"minItems", 1},
          {"description", "The list of parameters and their guesses."},
          {"items",
           {{"type", "object"},
            {"properties",
             {{"parameter_key", {{"type", "string"}}},
              {"parameter_guess",
               {{"type", "string"}, {"description", "The guessed values of the parameter."}}}}},
            {"required", {"parameter_key", "parameter_guess"}}}}}}}},
      {"required", {"parameters"}}};
}

nlohmann::json classification_schema() {
  return {{"type", "object"},
          {"properties",
           {{"analysis",
             {{"type", "string"},
              {"description",
               "The analysis of the API documentation. Make it within 300 characters."}}},
            {"category",
             {{"type", "string"},
              {"enum", {"Fully Organized", "Semi-Organized", "Unorganized"}}}}}},
          {"required", {"analysis", "category"}}};
}

nlohmann::json verdict_schema() {
  return {{"type", "object"},
          {"properties",
           {{"judgement", {{"type", "string"}, {"enum", {"information", "error"}}}},
            {"rationale", {{"type", "string"}}}}},
          {"required", {"judgement", "rationale"}}};
}

nlohmann::json page_filter_schema() {
  return {{"type", "object"},
          {"properties", {{"answer", {{"type", "string"}, {"enum", {"yes", "no"}}}}}},
          {"required", {"answer"}}};
}

nlohmann::json api_extraction_schema() {
  using nlohmann::json;
  json parameters = {
      {"type", "object"},
      {"properties",
       {{"name", {{"type", "string"}, {"description", "Name of the parameter"}}},
        {"type", {{"type", "string"}, {"description", "Type of the parameter"}}},
        {"description",
         {{"type", "string"},
          {"description",
           "Description of the parameter. If the parameter is categorical, please list all "
           "possible values."}}},
        {"default", {{"description", "Default value of the parameter"}}},
        {"example", {{"description", "Example value of the parameter"}}}}},
      {"required", {"name"}}};
  json endpoint = {
      {"type", "object"},
      {"properties",
       {{"name", {{"type", "string"}, {"description", "Name of the endpoint"}}},
        {"description", {{"type", "string"}, {"description", "Description of the endpoint"}}},
        {"method", {{"type", "string"}, {"description", "Method of the endpoint"}}},
        {"url",
         {{"oneOf",
           {{{"type", "string"}}, {{"type", "array"}, {"items", {{"type", "string"}}}}}},
          {"description", "URL of the endpoint, start with http:// or https://"}}},
        {"headers",
         {{"type", "array"},
          {"items", {{"type", "string"}}},
          {"description", "Headers of the endpoint"},
          {"default", json::array()}}},
        {"required_parameters",
         {{"type", "array"}, {"items", {{"$ref", "#/definitions/Parameters"}}}}},
        {"optional_parameters",
         {{"type", "array"}, {"items", {{"$ref", "#/definitions/Parameters"}}}}}}},
      {"required", {"name", "method", "url"}}};
  json api = {{"type", "object"},
              {"properties",
               {{"title", {{"type", "string"}, {"description", "Title of the API"}}},
                {"endpoints", {{"type", "array"}, {"items", {{"$ref", "#/definitions/Endpoint"}}}}}}},
              {"required", {"endpoints"}}};
  return {{"$schema", "http://json-schema.org/draft-07/schema#"},
          {"definitions", {{"Parameters", parameters}, {"Endpoint", endpoint}, {"API", api}}},
          {"type", "object"},
          {"properties", {{"API", {{"$ref", "#/definitions/API"}}}}}};
}

}  // namespace doc2tool::prompts
