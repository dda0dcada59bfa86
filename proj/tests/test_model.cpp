#include <gtest/gtest.h>

#include "doc2tool/error.hpp"
#include "doc2tool/io.hpp"
#include "doc2tool/model.hpp"
#include "doc2tool/strings.hpp"
#include "doc2tool/testkit/corpus.hpp"

using namespace doc2tool;
using nlohmann::json;

namespace {

json pokemon_like() {
  return json::parse(R"({
    "API": {
      "title": "Cards",
      "endpoints": [{
        "name": "Search Cards",
        "method": "get",
        "url": "https://api.example.com/v2/cards",
        "headers": [],
        "required_parameters": [{"name": "q", "type": "string", "default": null, "example": "name:x"}],
        "optional_parameters": [{"name": "page", "example": 2}, {"name": "tags", "example": ["a", "b"]}]
      }]
    }
  })");
}

}  // namespace

TEST(Spec, AcceptsWrappedAndBareForms) {
  auto wrapped = validate_spec(pokemon_like());
  ASSERT_TRUE(wrapped.ok());
  auto bare = validate_spec(pokemon_like()["API"]);
  ASSERT_TRUE(bare.ok());
  EXPECT_EQ(*wrapped.spec, *bare.spec);
  EXPECT_EQ(wrapped.spec->endpoints[0].method, "GET");
}

TEST(Spec, NullBecomesAbsentAndCompoundBecomesText) {
  auto spec = *validate_spec(pokemon_like()).spec;
  const auto& q = spec.endpoints[0].required_parameters[0];
  EXPECT_FALSE(q.default_value.has_value());
  EXPECT_EQ(std::get<std::string>(*q.example_value), "name:x");
  const auto& page = spec.endpoints[0].optional_parameters[0];
  EXPECT_EQ(std::get<std::int64_t>(*page.example_value), 2);
  const auto& tags = spec.endpoints[0].optional_parameters[1];
  EXPECT_EQ(std::get<std::string>(*tags.example_value), R"(["a","b"])");
}

TEST(Spec, RoundTripsThroughJson) {
  auto spec = *validate_spec(pokemon_like()).spec;
  auto again = validate_spec(to_json(spec));
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(*again.spec, spec);
}

TEST(Spec, ReportsViolationsWithPaths) {
  auto j = pokemon_like();
  j["API"]["endpoints"][0].erase("url");
  j["API"]["endpoints"][0]["required_parameters"][0]["name"] = "has space";
  auto v = validate_spec(j);
  EXPECT_FALSE(v.ok());
  ASSERT_EQ(v.violations.size(), 2u);
  EXPECT_EQ(v.violations[0].kind, ViolationKind::MissingRequiredField);
  EXPECT_EQ(v.violations[0].path, "API.endpoints[0].url");
  EXPECT_EQ(v.violations[1].kind, ViolationKind::InvalidValue);
}

TEST(Spec, RejectsNonObjectsAndMissingEndpoints) {
  EXPECT_EQ(validate_spec(json::array()).violations.at(0).kind, ViolationKind::NotAnObject);
  EXPECT_EQ(validate_spec(json{{"title", "x"}}).violations.at(0).kind, ViolationKind::MissingRequiredField);
  auto bad = validate_spec(json{{"endpoints", json::array({1})}});
  EXPECT_EQ(bad.violations.at(0).kind, ViolationKind::NotAnObject);
}

TEST(Spec, RequiredAndOptionalNamesMustNotOverlap) {
  auto j = pokemon_like();
  j["API"]["endpoints"][0]["optional_parameters"][0]["name"] = "q";
  auto v = validate_spec(j);
  ASSERT_FALSE(v.ok());
  EXPECT_EQ(v.violations[0].kind, ViolationKind::InvalidValue);
}

TEST(Spec, UrlListIsPreserved) {
  auto j = pokemon_like();
  j["API"]["endpoints"][0]["url"] = {"/a", "https://h.example/a"};
  auto spec = *validate_spec(j).spec;
  EXPECT_TRUE(spec.endpoints[0].url_is_list);
  EXPECT_TRUE(to_json(spec)["API"]["endpoints"][0]["url"].is_array());
  auto r = resolve_url(spec.endpoints[0]);
  EXPECT_FALSE(r.has_scheme);
  EXPECT_EQ(r.primary, "/a");
  EXPECT_EQ(r.alternates, std::vector<std::string>{"https://h.example/a"});
}

TEST(Scalars, WireForm) {
  EXPECT_EQ(scalar_to_string(Scalar{true}), "true");
  EXPECT_EQ(scalar_to_string(Scalar{std::int64_t{42}}), "42");
  EXPECT_EQ(scalar_to_string(Scalar{std::string("x y")}), "x y");
  EXPECT_FALSE(scalar_from_json(json()).has_value());
}

TEST(Types, CanonicalSpelling) {
  EXPECT_EQ(canonical_type("str"), "string");
  EXPECT_EQ(canonical_type(" Int "), "integer");
  EXPECT_EQ(canonical_type("double"), "number");
  EXPECT_EQ(canonical_type("bool"), "boolean");
  EXPECT_EQ(canonical_type("Array"), "array");
}

TEST(Urls, SplitsOriginPathAndQuery) {
  auto p = split_url("HTTPS://Api.Example.com:8443/v1/x?y=1#frag");
  EXPECT_EQ(p.scheme, "https");
  EXPECT_EQ(p.authority, "Api.Example.com:8443");
  EXPECT_EQ(p.path, "/v1/x");
  EXPECT_EQ(p.query, "y=1");
  auto rel = split_url("/v1/x");
  EXPECT_TRUE(rel.scheme.empty());
  EXPECT_EQ(rel.path, "/v1/x");
  EXPECT_TRUE(resolve_url("https://h.example").path_is_empty);
}

TEST(Strings, Basics) {
  EXPECT_EQ(str::trim("  a b \n"), "a b");
  EXPECT_EQ(str::split("a,,b", ',').size(), 3u);
  EXPECT_TRUE(str::contains_icase("Not Found", "not found"));
  EXPECT_EQ(str::collapse_spaces("a   b\t c"), "a b c");
}

TEST(Io, JsonLinesRoundTrip) {
  auto dir = testkit::make_temp_dir("d2t-io");
  std::vector<json> rows = {{{"a", 1}}, {{"b", "\xC3\xA9"}}};
  io::write_jsonl(dir / "sub" / "x.jsonl", rows);
  EXPECT_EQ(io::read_jsonl(dir / "sub" / "x.jsonl"), rows);
  // Invalid UTF-8 must not abort serialization.
  EXPECT_NO_THROW(io::dump(json("\xFF")));
  std::filesystem::remove_all(dir);
}

TEST(Errors, CarryCodeAndSubject) {
  Error e(ErrorCode::MissingStageInput, "extract", "no docs");
  EXPECT_EQ(e.code(), ErrorCode::MissingStageInput);
  EXPECT_EQ(e.subject(), "extract");
  EXPECT_EQ(to_string(ErrorCode::MixedHosts), "MixedHosts");
}
