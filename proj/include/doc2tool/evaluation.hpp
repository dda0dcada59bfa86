#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "doc2tool/embedding.hpp"
#include "doc2tool/extraction.hpp"
#include "doc2tool/model.hpp"

namespace doc2tool {

inline constexpr double kNameMatchThreshold = 0.8;

// Method plus normalized URL template with anonymous placeholders, e.g.
// "GET https://a.example/users/{}". Query strings and trailing slashes are
// ignored and the origin is lowercased.
std::string endpoint_match_key(const Endpoint& e);

struct EndpointPair {
  size_t pred_index;
  size_t truth_index;
  double score;
};

// Greedy one-to-one matching over descending score. Score is 1.0 when the
// match keys agree, otherwise the cosine of the name embeddings; pairs below
// kNameMatchThreshold are never matched.
std::vector<EndpointPair> match_endpoints(const ApiSpec& pred, const ApiSpec& truth,
                                          EmbeddingProvider& emb);

struct EndpointScore {
  std::string source_id;
  size_t pred_index = 0;
  size_t truth_index = 0;
  size_t predicted_params = 0;
  size_t truth_params = 0;
  size_t common_params = 0;
  double precision = 0.0;
  double recall = 0.0;
};

struct MetricsReport {
  double valid_ratio = 0.0;
  size_t matched_endpoints = 0;
  size_t truth_endpoints = 0;
  double name_similarity = 0.0;
  double description_similarity = 0.0;
  double method_accuracy = 0.0;
  double param_precision = 0.0;
  double param_recall = 0.0;
  double param_description_similarity = 0.0;
  double type_accuracy = 0.0;
  std::vector<EndpointScore> per_endpoint;
};

// Micro-averaged metric suite; see README for the exact definitions.
// Throws Error(EmptyCorpus) when `results` is empty.
MetricsReport compute_metrics(const std::vector<ExtractionResult>& results,
                              const std::map<std::string, ApiSpec>& truth,
                              EmbeddingProvider& emb);

nlohmann::json to_json(const MetricsReport& m);
// Aligned text table with one header row and one value row.
std::string format_metrics_table(const MetricsReport& m, const std::string& label = "model");

}  // namespace doc2tool
