#include <gtest/gtest.h>

#include "doc2tool/error.hpp"
#include "doc2tool/extraction.hpp"
#include "doc2tool/html.hpp"
#include "doc2tool/io.hpp"
#include "doc2tool/ingestion.hpp"
#include "doc2tool/testkit/corpus.hpp"
#include "doc2tool/testkit/mock_server.hpp"
#include "doc2tool/toolgen.hpp"

using namespace doc2tool;
namespace fs = std::filesystem;

namespace {

ApiDocument doc_of(const std::string& id, const std::string& text) {
  ApiDocument d;
  d.source_id = id;
  d.origin = "mem";
  d.text = text;
  return d;
}

ExtractionBackend replay_backend() {
  auto store = std::make_shared<ReplayStore>();
  store->put(testkit::kPokemonSourceId, testkit::pokemon_extraction_output());
  ExtractionBackend b;
  b.kind = BackendKind::Replay;
  b.replay = store;
  return b;
}

}  // namespace

TEST(Heuristic, RecoversRenderedReferenceDocuments) {
  auto dir = testkit::make_temp_dir("d2t-extract");
  auto corpus = testkit::write_e2e_corpus(dir, "http://127.0.0.1:9");
  for (const auto& [id, spec] : corpus.specs) {
    auto text = html_to_text(testkit::render_reference_document(spec));
    EXPECT_EQ(heuristic_extract(text), spec) << id << "\n" << text;
  }
  fs::remove_all(dir);
}

TEST(Heuristic, ReadsEmbeddedQueryStrings) {
  auto spec = heuristic_extract(testkit::pokemon_document_text());
  ASSERT_FALSE(spec.endpoints.empty());
  const auto& e = spec.endpoints.front();
  EXPECT_EQ(e.method, "GET");
  EXPECT_EQ(e.url.front(), "https://api.pokemontcg.io/v2/cards");
  ASSERT_EQ(e.required_parameters.size(), 1u);
  EXPECT_EQ(e.required_parameters[0].name, "q");
  EXPECT_EQ(std::get<std::string>(*e.required_parameters[0].example_value), "name:gardevoir");
}

TEST(Heuristic, HeaderLinesAndMissingRequiredColumn) {
  auto spec = heuristic_extract(
      "Api\nList\nLists things.\nPOST /v1/things\nHeader: X-Key: abc\n| Name | Type |\n| a | int |\n| b | str |");
  ASSERT_EQ(spec.endpoints.size(), 1u);
  const auto& e = spec.endpoints[0];
  EXPECT_EQ(e.name, "List");
  EXPECT_EQ(e.description, "Lists things.");
  EXPECT_EQ(e.headers, std::vector<std::string>{"X-Key: abc"});
  EXPECT_EQ(e.required_parameters.size(), 2u);
  EXPECT_TRUE(e.optional_parameters.empty());
}

TEST(Replay, PokemonGoldenValidates) {
  auto doc = doc_of(testkit::kPokemonSourceId, testkit::pokemon_document_text());
  auto r = extract_spec(doc, replay_backend());
  ASSERT_TRUE(r.valid) << r.raw_output;
  EXPECT_EQ(*r.spec, testkit::pokemon_spec());
  EXPECT_EQ(r.spec->title, "Pok\xC3\xA9mon TCG API Documentation");
  EXPECT_EQ(r.backend_kind, "replay");
  auto tool = generate_tool(r.spec->endpoints.at(0), r.source_id);
  EXPECT_EQ(tool.tool_name, "search_cards");
}

TEST(Replay, MissingRecordIsAPerDocumentFailure) {
  auto r = extract_spec(doc_of("other", "x"), replay_backend());
  EXPECT_FALSE(r.valid);
  ASSERT_FALSE(r.violations.empty());
  EXPECT_NE(r.violations[0].find("BackendUnreachable"), std::string::npos);
}

TEST(Replay, LoadsJsonLinesAndDirectories) {
  auto dir = testkit::make_temp_dir("d2t-replay");
  io::write_jsonl(dir / "r.jsonl", {{{"source_id", "a"}, {"raw_output", "{}"}}});
  EXPECT_EQ(ReplayStore::load(dir / "r.jsonl").get("a"), "{}");
  io::write_text(dir / "d" / "b.txt", "out");
  EXPECT_EQ(ReplayStore::load(dir / "d").get("b"), "out");
  io::write_jsonl(dir / "bad.jsonl", {{{"id", "a"}}});
  EXPECT_THROW(ReplayStore::load(dir / "bad.jsonl"), Error);
  fs::remove_all(dir);
}

TEST(Extraction, InvalidOutputKeepsRawTextAndViolations) {
  auto store = std::make_shared<ReplayStore>();
  store->put("a", "Here you go: {\"API\": {\"endpoints\": [{\"name\": \"x\"}]}}");
  store->put("b", "I could not find any endpoints.");
  ExtractionBackend b;
  b.kind = BackendKind::Replay;
  b.replay = store;
  auto extractor = make_extractor(b);
  auto results = extract_corpus({doc_of("a", ""), doc_of("b", "")}, *extractor, 2);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_FALSE(results[0].valid);
  EXPECT_EQ(results[0].violations.size(), 2u);  // method and url
  EXPECT_FALSE(results[1].valid);
  EXPECT_NE(results[1].violations.at(0).find("no-object"), std::string::npos);

  auto again = extraction_result_from_json(to_json(results[0]));
  EXPECT_EQ(again.raw_output, results[0].raw_output);
  EXPECT_FALSE(again.valid);
}

TEST(Extraction, BackendsCheckTheirConfiguration) {
  ExtractionBackend b;
  b.kind = BackendKind::RemoteChat;
  EXPECT_THROW(b.check(), Error);
  b.kind = BackendKind::Replay;
  EXPECT_THROW(b.check(), Error);
  EXPECT_EQ(parse_backend_kind("structured"), BackendKind::RemoteStructured);
  EXPECT_FALSE(parse_backend_kind("magic"));
}

TEST(Remote, ChatBackendUsesOneShotAndRepairsOutput) {
  testkit::MockApiServer server;
  ExtractionBackend b;
  b.kind = BackendKind::RemoteStructured;
  b.remote = RemoteConfig{server.base_url() + "/v1/chat/completions", "model-x", "", 10, 0.0, 2};
  b.one_shot = OneShotExample{testkit::pokemon_document_text(), testkit::pokemon_extraction_output()};
  server.push_chat_reply("```json\n" + testkit::pokemon_extraction_output() + "\n```");
  auto r = extract_spec(doc_of("pokemon", "doc"), b);
  ASSERT_TRUE(r.valid);
  EXPECT_GT(r.token_or_byte_cost, 0);

  auto reqs = server.requests();
  ASSERT_EQ(reqs.size(), 1u);
  auto body = nlohmann::json::parse(reqs[0].body);
  EXPECT_EQ(body["model"], "model-x");
  EXPECT_TRUE(body.contains("response_format"));
  std::string prompt = body["messages"][0]["content"];
  EXPECT_NE(prompt.find("Example output:"), std::string::npos);
  EXPECT_NE(prompt.find("Search Cards"), std::string::npos);

  server.set_model_status(500);
  auto failed = extract_spec(doc_of("pokemon", "doc"), b);
  EXPECT_FALSE(failed.valid);
}

TEST(Remote, MessagesWithoutOneShot) {
  auto msgs = extraction_messages(doc_of("a", "DOC TEXT"), std::nullopt);
  ASSERT_EQ(msgs.size(), 1u);
  EXPECT_EQ(msgs[0].content.find("Example output"), std::string::npos);
  EXPECT_NE(msgs[0].content.find("DOC TEXT"), std::string::npos);
}
