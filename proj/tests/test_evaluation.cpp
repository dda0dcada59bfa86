#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "doc2tool/embedding.hpp"
#include "doc2tool/error.hpp"
#include "doc2tool/evaluation.hpp"
#include "doc2tool/testkit/mock_server.hpp"

using namespace doc2tool;

TEST(Embedding, LexicalIsNormalizedAndDeterministic) {
  LexicalEmbedding emb(64);
  auto v = emb.embed({"glytoucan_id", "glytoucan_id", ""});
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0].size(), 64u);
  EXPECT_EQ(v[0], v[1]);
  EXPECT_NEAR(cosine_similarity(v[0], v[0]), 1.0, 1e-12);
  EXPECT_EQ(cosine_similarity(v[0], v[2]), 0.0);
  EXPECT_GT(cosine_similarity(emb.embed_one("card name"), emb.embed_one("Card Name")), 0.999);
}

TEST(Embedding, CosineProperties) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Vector a(16), b(16);
    for (auto& x : a) x = n(rng);
    for (auto& x : b) x = n(rng);
    EXPECT_NEAR(cosine_similarity(a, a), 1.0, 1e-9);
    Vector scaled = a;
    for (auto& x : scaled) x *= 1e3 * (trial + 1);
    EXPECT_NEAR(cosine_similarity(scaled, b), cosine_similarity(a, b), 1e-9);
  }
  Vector x = {1, 0, 0}, y = {0, 2, 0};
  EXPECT_NEAR(cosine_similarity(x, y), 0.0, 1e-12);
  Vector shorter = {1, 0};
  EXPECT_THROW(cosine_similarity(x, shorter), Error);
}

TEST(Embedding, RemoteProviderCachesAndChecksDimension) {
  testkit::MockApiServer server;
  RemoteConfig cfg{server.base_url() + "/v1/embeddings", "emb", "", 10, 0.0, 2};
  auto client = std::make_shared<EmbeddingClient>(cfg, default_transport());
  RemoteEmbedding emb(client, 256);
  auto a = emb.embed({"alpha", "beta"});
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0], LexicalEmbedding(256).embed_one("alpha"));
  emb.embed({"alpha"});
  EXPECT_EQ(server.count_requests("/v1/embeddings"), 1u);

  RemoteEmbedding wrong(client, 32);
  EXPECT_THROW(wrong.embed({"gamma"}), Error);
  server.set_model_status(500);
  EXPECT_THROW(emb.embed({"delta"}), Error);
}

TEST(Matching, KeyIgnoresQueryAndPlaceholderNames) {
  Endpoint a;
  a.method = "get";
  a.url = {"https://API.example.com/users/{id}/?x=1"};
  Endpoint b;
  b.method = "GET";
  b.url = {"https://api.example.com/users/:user_id"};
  EXPECT_EQ(endpoint_match_key(a), endpoint_match_key(b));
  EXPECT_EQ(endpoint_match_key(a), "GET https://api.example.com/users/{}");
}

TEST(Matching, GreedyOneToOne) {
  LexicalEmbedding emb;
  ApiSpec truth, pred;
  for (auto name : {"List Cards", "Get Card"}) {
    Endpoint e;
    e.name = name;
    e.method = "GET";
    e.url = {std::string("https://h.example/") + name[0]};
    truth.endpoints.push_back(e);
  }
  pred.endpoints = {truth.endpoints[1], truth.endpoints[0]};
  pred.endpoints[0].url = {"https://h.example/other"};
  auto pairs = match_endpoints(pred, truth, emb);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].truth_index, 0u);
  EXPECT_EQ(pairs[0].pred_index, 1u);
  EXPECT_EQ(pairs[0].score, 1.0);
  EXPECT_EQ(pairs[1].pred_index, 0u);
  EXPECT_NEAR(pairs[1].score, 1.0, 1e-9);  // same name, different URL
}

namespace {

// Brute-force reference: matched endpoints share URLs, so the counts follow
// from plain set arithmetic over parameter names.
struct Oracle {
  size_t valid = 0, total = 0, pred = 0, truth = 0, common = 0;
};

std::set<std::string> names_of(const Endpoint& e) {
  std::set<std::string> s;
  for (const auto& p : e.required_parameters) s.insert(p.name);
  for (const auto& p : e.optional_parameters) s.insert(p.name);
  return s;
}

Endpoint random_endpoint(std::mt19937_64& rng, size_t index, const std::vector<std::string>& pool) {
  Endpoint e;
  e.name = "endpoint " + std::to_string(index);
  e.method = "GET";
  e.url = {"https://h.example/r" + std::to_string(index)};
  for (const auto& n : pool) {
    int roll = static_cast<int>(rng() % 3);
    Parameter p;
    p.name = n;
    p.type_hint = "string";
    if (roll == 1) e.required_parameters.push_back(p);
    if (roll == 2) e.optional_parameters.push_back(p);
  }
  return e;
}

}  // namespace

TEST(Metrics, MatchSetArithmeticOracle) {
  std::mt19937_64 rng(2024);
  const std::vector<std::string> pool = {"q", "page", "limit", "id", "sort", "lang", "format", "key2"};
  LexicalEmbedding emb;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ExtractionResult> results;
    std::map<std::string, ApiSpec> truth;
    Oracle o;
    size_t docs = 1 + rng() % 4;
    for (size_t d = 0; d < docs; ++d) {
      std::string id = "doc" + std::to_string(d);
      ApiSpec t, p;
      size_t eps = 1 + rng() % 3;
      for (size_t i = 0; i < eps; ++i) {
        t.endpoints.push_back(random_endpoint(rng, i, pool));
        p.endpoints.push_back(random_endpoint(rng, i, pool));
      }
      std::shuffle(p.endpoints.begin(), p.endpoints.end(), rng);
      truth[id] = t;

      ExtractionResult r;
      r.source_id = id;
      r.valid = rng() % 5 != 0;
      if (r.valid) r.spec = p;
      results.push_back(r);
      ++o.total;
      if (!r.valid) continue;
      ++o.valid;
      for (const auto& te : t.endpoints) {
        const auto& pe = *std::find_if(p.endpoints.begin(), p.endpoints.end(),
                                       [&](const Endpoint& e) { return e.url == te.url; });
        auto ts = names_of(te), ps = names_of(pe);
        std::vector<std::string> inter;
        std::set_intersection(ts.begin(), ts.end(), ps.begin(), ps.end(), std::back_inserter(inter));
        o.truth += ts.size();
        o.pred += ps.size();
        o.common += inter.size();
      }
    }
    auto m = compute_metrics(results, truth, emb);
    EXPECT_EQ(m.valid_ratio, static_cast<double>(o.valid) / static_cast<double>(o.total));
    if (o.valid == 0) continue;
    double precision = o.pred ? static_cast<double>(o.common) / o.pred : (o.truth ? 0.0 : 1.0);
    double recall = o.truth ? static_cast<double>(o.common) / o.truth : (o.pred ? 0.0 : 1.0);
    EXPECT_EQ(m.param_precision, precision) << "trial " << trial;
    EXPECT_EQ(m.param_recall, recall) << "trial " << trial;
    EXPECT_EQ(m.method_accuracy, 1.0);
    EXPECT_EQ(m.type_accuracy, o.common ? 1.0 : 0.0);
  }
}

TEST(Metrics, IndependentOfResultOrder) {
  LexicalEmbedding emb;
  std::mt19937_64 rng(5);
  std::vector<std::string> pool = {"a", "b", "c"};
  std::vector<ExtractionResult> results;
  std::map<std::string, ApiSpec> truth;
  for (int d = 0; d < 4; ++d) {
    ApiSpec t, p;
    t.endpoints = {random_endpoint(rng, 0, pool)};
    p.endpoints = {random_endpoint(rng, 0, pool)};
    p.endpoints[0].description = "d" + std::to_string(d);
    t.endpoints[0].description = "dd" + std::to_string(d);
    truth["s" + std::to_string(d)] = t;
    results.push_back({"s" + std::to_string(d), "", p, true, {}, "heuristic", 0});
  }
  auto a = to_json(compute_metrics(results, truth, emb));
  std::reverse(results.begin(), results.end());
  auto b = to_json(compute_metrics(results, truth, emb));
  EXPECT_EQ(a, b);
}

TEST(Metrics, EmptyCorpusAndTable) {
  LexicalEmbedding emb;
  EXPECT_THROW(compute_metrics({}, {}, emb), Error);
  MetricsReport m;
  m.valid_ratio = 0.5;
  auto table = format_metrics_table(m, "heuristic");
  EXPECT_NE(table.find("Valid Ratio"), std::string::npos);
  EXPECT_NE(table.find("0.50"), std::string::npos);
}
