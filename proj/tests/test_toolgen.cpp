#include <gtest/gtest.h>

#include <random>

#include <yaml-cpp/yaml.h>

#include "doc2tool/error.hpp"
#include "doc2tool/http.hpp"
#include "doc2tool/testkit/corpus.hpp"
#include "doc2tool/toolgen.hpp"
#include "doc2tool/url_template.hpp"

using namespace doc2tool;

namespace {

Endpoint make_endpoint(std::string name, std::string method, std::string url) {
  Endpoint e;
  e.name = std::move(name);
  e.method = std::move(method);
  e.url = {std::move(url)};
  return e;
}

Parameter make_param(std::string name, std::optional<Scalar> example = std::nullopt) {
  Parameter p;
  p.name = std::move(name);
  p.example_value = std::move(example);
  return p;
}

std::string random_name(std::mt19937_64& rng) {
  static const std::string first = "abcdefghijklmnopqrstuvwxyz_";
  static const std::string rest = "abcdefghijklmnopqrstuvwxyz0123456789_";
  std::string s(1, first[rng() % first.size()]);
  for (size_t i = 0, n = rng() % 8; i < n; ++i) s += rest[rng() % rest.size()];
  return s;
}

std::string random_literal(std::mt19937_64& rng) {
  static const std::string chars = "abcdefghijklmnopqrstuvwxyz0123456789-._~";
  std::string s;
  for (size_t i = 0, n = 1 + rng() % 10; i < n; ++i) s += chars[rng() % chars.size()];
  return s;
}

}  // namespace

TEST(UrlTemplate, ThreePlaceholderSyntaxesAgree) {
  auto a = parse_url_template("https://h.example/users/:id/posts");
  auto b = parse_url_template("https://h.example/users/{id}/posts");
  auto c = parse_url_template("https://h.example/users/<id>/posts");
  auto d = parse_url_template("https://h.example/users/<int:id>/posts");
  EXPECT_EQ(a.canonical(), "https://h.example/users/{id}/posts");
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(a.canonical(), c.canonical());
  EXPECT_EQ(a.canonical(), d.canonical());
  EXPECT_EQ(a.segments, b.segments);
  EXPECT_EQ(a.path_params(), std::vector<std::string>{"id"});
}

TEST(UrlTemplate, RandomRoundTrips) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    std::string origin = rng() % 5 == 0 ? "" : (rng() % 2 ? "https://" : "http://") + random_literal(rng) + ".example";
    std::string input = origin, normalized = origin;
    std::map<std::string, std::string> bindings;
    std::string bound = origin;
    for (size_t s = 0, n = 1 + rng() % 5; s < n; ++s) {
      input += "/";
      normalized += "/";
      bound += "/";
      if (rng() % 2) {
        std::string lit = random_literal(rng);
        input += lit;
        normalized += lit;
        bound += lit;
        continue;
      }
      std::string name = random_name(rng);
      switch (rng() % 3) {
        case 0: input += ":" + name; break;
        case 1: input += "{" + name + "}"; break;
        default: input += "<" + name + ">"; break;
      }
      normalized += "{" + name + "}";
      if (!bindings.count(name)) bindings[name] = "v " + name + "/+";
      bound += percent_encode(bindings[name]);
    }
    if (rng() % 4 == 0) {
      input += "?fixed=1";
      normalized += "?fixed=1";
      bound += "?fixed=1";
    }
    auto t = parse_url_template(input);
    ASSERT_EQ(t.render({}), normalized) << input;
    ASSERT_EQ(t.canonical(), normalized) << input;
    ASSERT_EQ(t.render(bindings), bound) << input;
    ASSERT_EQ(url_template_from_json(to_json(t)), t) << input;
  }
}

TEST(UrlTemplate, MalformedInputs) {
  for (const char* bad : {"", "https://h.example/{", "https://h.example/{}", "https://h.example/<a b>",
                          "https://h.example/x}"}) {
    try {
      parse_url_template(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedUrl) << bad;
    }
  }
  // Ports and mid-segment colons are not placeholders.
  auto t = parse_url_template("http://127.0.0.1:8080/v1/a:b");
  EXPECT_TRUE(t.path_params().empty());
  EXPECT_EQ(t.authority, "127.0.0.1:8080");
}

TEST(Toolgen, SanitizesNames) {
  EXPECT_EQ(sanitize_tool_name("Search Cards"), "search_cards");
  EXPECT_EQ(sanitize_tool_name("  --Get/User (v2)--"), "get_user_v2");
  EXPECT_EQ(sanitize_tool_name("3D Models"), "f_3d_models");
  EXPECT_EQ(sanitize_tool_name("!!!"), "tool");
}

TEST(Toolgen, PathParametersAreBoundAndRequired) {
  auto e = make_endpoint("Get User", "get", "https://h.example/users/{id}/items/:item");
  e.optional_parameters = {make_param("id", Scalar{std::string("7")}), make_param("verbose")};
  auto tool = generate_tool(e, "src");
  EXPECT_EQ(tool.tool_name, "get_user");
  EXPECT_EQ(tool.method, "GET");
  const ToolArg* id = tool.find_arg("id");
  ASSERT_NE(id, nullptr);
  EXPECT_EQ(id->location, ArgLocation::Path);
  EXPECT_TRUE(id->required);
  EXPECT_FALSE(id->synthesized);
  const ToolArg* item = tool.find_arg("item");
  ASSERT_NE(item, nullptr);
  EXPECT_TRUE(item->synthesized);
  EXPECT_TRUE(item->value_missing());
  EXPECT_NE(std::find(tool.flags.begin(), tool.flags.end(), "UnboundPathParam:item"), tool.flags.end());
  EXPECT_EQ(tool.find_arg("verbose")->location, ArgLocation::Query);
  EXPECT_EQ(tool_from_json(to_json(tool)), tool);
}

TEST(Toolgen, TotalOverBadInput) {
  auto malformed = generate_tool(make_endpoint("X", "FETCH", "https://h.example/{oops"), "s");
  EXPECT_NE(std::find(malformed.flags.begin(), malformed.flags.end(), "MalformedUrl"), malformed.flags.end());
  bool unknown = false;
  for (const auto& f : malformed.flags) unknown |= f.rfind("UnknownMethod:", 0) == 0;
  EXPECT_TRUE(unknown);
  auto relative = generate_tool(make_endpoint("Y", "GET", "/v1/y"), "s");
  EXPECT_FALSE(relative.url.has_scheme());
}

TEST(Toolgen, CollidingNamesGetSuffixes) {
  ApiSpec spec;
  spec.endpoints = {make_endpoint("List", "GET", "https://h.example/a"),
                    make_endpoint("list", "GET", "https://h.example/b"),
                    make_endpoint("LIST", "GET", "https://h.example/c")};
  auto tools = generate_tools(spec, "s");
  ASSERT_EQ(tools.size(), 3u);
  EXPECT_EQ(tools[0].tool_name, "list");
  EXPECT_EQ(tools[1].tool_name, "list_2");
  EXPECT_EQ(tools[2].tool_name, "list_3");
}

TEST(Toolgen, HeadersParse) {
  EXPECT_EQ(parse_header("X-Api-Key: abc"), (ToolHeader{"X-Api-Key", "abc", true}));
  EXPECT_FALSE(parse_header("Bearer token required").parsed);
}

TEST(Export, MatchesTheGeneratedToolLayout) {
  auto tool = generate_tool(testkit::pokemon_spec().endpoints.at(0), testkit::kPokemonSourceId);
  tool.tls_verify = false;
  EXPECT_EQ(export_function_source(tool), testkit::read_golden("search_cards.py"));
}

TEST(Export, BodyVerbsHeadersAndPathArgs) {
  auto e = make_endpoint("Create Item", "POST", "https://h.example/lists/{list_id}/items");
  e.required_parameters = {make_param("list_id", Scalar{std::int64_t{3}}),
                           make_param("title", Scalar{std::string("it's")})};
  e.headers = {"Authorization: Bearer {TOKEN}"};
  auto src = export_function_source(generate_tool(e, "s"));
  EXPECT_NE(src.find("def create_item(list_id=None, title=None):"), std::string::npos);
  EXPECT_NE(src.find("api_url = f\"https://h.example/lists/{list_id}/items\""), std::string::npos);
  EXPECT_NE(src.find("querystring = {'title': title, }"), std::string::npos);
  EXPECT_NE(src.find("headers = {'Authorization': 'Bearer {TOKEN}', }"), std::string::npos);
  EXPECT_NE(src.find("requests.post(url=api_url, json=querystring, headers=headers, timeout=50, verify=True)"),
            std::string::npos);
  EXPECT_NE(src.find("r = create_item(list_id=3, title='''it\\'s''')"), std::string::npos);
}

TEST(OpenApi, ReparsesWithExpectedStructure) {
  auto get = make_endpoint("Get Glycan", "GET", "https://h.example/v1/glycan/{id}");
  get.required_parameters = {make_param("id", Scalar{std::string("G00048MO")})};
  get.optional_parameters = {make_param("limit", Scalar{std::int64_t{5}})};
  get.optional_parameters[0].type_hint = "int";
  auto post = make_endpoint("Add Note", "POST", "https://H.example/v1/notes");
  post.required_parameters = {make_param("text")};
  ApiSpec spec;
  spec.endpoints = {get, post};
  auto tools = generate_tools(spec, "s");
  auto doc = YAML::Load(export_openapi(tools, "Glycans"));

  EXPECT_EQ(doc["openapi"].as<std::string>(), "3.0.3");
  EXPECT_EQ(doc["info"]["title"].as<std::string>(), "Glycans");
  EXPECT_EQ(doc["servers"][0]["url"].as<std::string>(), "https://h.example");
  auto op = doc["paths"]["/v1/glycan/{id}"]["get"];
  ASSERT_TRUE(op);
  EXPECT_EQ(op["operationId"].as<std::string>(), "get_glycan");
  EXPECT_EQ(op["parameters"][0]["in"].as<std::string>(), "path");
  EXPECT_TRUE(op["parameters"][0]["required"].as<bool>());
  EXPECT_EQ(op["parameters"][0]["example"].as<std::string>(), "G00048MO");
  EXPECT_EQ(op["parameters"][1]["in"].as<std::string>(), "query");
  EXPECT_EQ(op["parameters"][1]["schema"]["type"].as<std::string>(), "integer");
  EXPECT_TRUE(op["responses"]["200"]);
  auto body = doc["paths"]["/v1/notes"]["post"]["requestBody"]["content"]["application/json"]["schema"];
  EXPECT_EQ(body["properties"]["text"]["type"].as<std::string>(), "string");
  EXPECT_EQ(body["required"][0].as<std::string>(), "text");
}

TEST(OpenApi, RejectsMixedOrSchemeLessHosts) {
  ApiSpec spec;
  spec.endpoints = {make_endpoint("A", "GET", "https://a.example/x"), make_endpoint("B", "GET", "https://b.example/y"),
                    make_endpoint("C", "GET", "/z")};
  auto tools = generate_tools(spec, "s");
  try {
    export_openapi(tools);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MixedHosts);
  }
  EXPECT_THROW(export_openapi({tools[2]}), Error);
  auto groups = group_by_host(tools);
  EXPECT_EQ(groups.size(), 2u);
  for (const auto& [origin, group] : groups) EXPECT_NO_THROW(export_openapi(group));
}

TEST(Toolgen, OnlyGetSendsQuery) {
  EXPECT_TRUE(sends_query("GET"));
  EXPECT_FALSE(sends_query("POST"));
  EXPECT_FALSE(sends_query("DELETE"));
}
