#include "doc2tool/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "doc2tool/error.hpp"
#include "doc2tool/strings.hpp"
#include "doc2tool/url_template.hpp"

namespace doc2tool {

std::string endpoint_match_key(const Endpoint& e) {
  std::string url = e.url.empty() ? "" : resolve_url(e).primary;
  std::string key;
  try {
    UrlTemplate t = parse_url_template(url);
    std::string path;
    for (const auto& s : t.segments) path += s.kind == UrlSegment::Kind::Literal ? s.text : "{}";
    while (path.size() > 1 && path.back() == '/') path.pop_back();
    if (path == "/") path.clear();
    key = str::to_lower(t.origin()) + path;
  } catch (const Error&) {
    key = url.substr(0, url.find('?'));
  }
  return normalize_method(e.method) + " " + key;
}

std::vector<EndpointPair> match_endpoints(const ApiSpec& pred, const ApiSpec& truth,
                                          EmbeddingProvider& emb) {
  std::vector<EndpointPair> candidates;
  if (pred.endpoints.empty() || truth.endpoints.empty()) return {};

  std::vector<std::string> pred_names, truth_names, pred_keys, truth_keys;
  for (const auto& e : pred.endpoints) {
    pred_names.push_back(e.name);
    pred_keys.push_back(endpoint_match_key(e));
  }
  for (const auto& e : truth.endpoints) {
    truth_names.push_back(e.name);
    truth_keys.push_back(endpoint_match_key(e));
  }
  auto pv = emb.embed(pred_names);
  auto tv = emb.embed(truth_names);

  for (size_t i = 0; i < pred.endpoints.size(); ++i) {
    for (size_t j = 0; j < truth.endpoints.size(); ++j) {
      double score = pred_keys[i] == truth_keys[j] ? 1.0 : cosine_similarity(pv[i], tv[j]);
      if (score >= kNameMatchThreshold) candidates.push_back({i, j, score});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const EndpointPair& a, const EndpointPair& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.pred_index != b.pred_index) return a.pred_index < b.pred_index;
    return a.truth_index < b.truth_index;
  });

  std::vector<bool> pred_used(pred.endpoints.size()), truth_used(truth.endpoints.size());
  std::vector<EndpointPair> pairs;
  for (const auto& c : candidates) {
    if (pred_used[c.pred_index] || truth_used[c.truth_index]) continue;
    pred_used[c.pred_index] = truth_used[c.truth_index] = true;
    pairs.push_back(c);
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const EndpointPair& a, const EndpointPair& b) { return a.truth_index < b.truth_index; });
  return pairs;
}

namespace {

struct Mean {
  double sum = 0.0;
  size_t n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  double value() const { return n ? sum / static_cast<double>(n) : 0.0; }
};

double ratio(size_t num, size_t den, size_t other_den) {
  if (den == 0) return other_den == 0 ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

double text_similarity(EmbeddingProvider& emb, const std::optional<std::string>& pred,
                       const std::string& truth) {
  if (!pred) return 0.0;
  auto v = emb.embed({*pred, truth});
  return cosine_similarity(v[0], v[1]);
}

std::map<std::string, const Parameter*> params_by_name(const Endpoint& e) {
  std::map<std::string, const Parameter*> out;
  for (const auto& p : e.required_parameters) out.emplace(p.name, &p);
  for (const auto& p : e.optional_parameters) out.emplace(p.name, &p);
  return out;
}

}  // namespace

MetricsReport compute_metrics(const std::vector<ExtractionResult>& results,
                              const std::map<std::string, ApiSpec>& truth, EmbeddingProvider& emb) {
  if (results.empty()) throw Error(ErrorCode::EmptyCorpus, "results");

  // Fixed reduction order makes the report independent of input order.
  std::vector<const ExtractionResult*> ordered;
  for (const auto& r : results) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    if (a->source_id != b->source_id) return a->source_id < b->source_id;
    return a->raw_output < b->raw_output;
  });

  MetricsReport m;
  size_t valid = 0;
  Mean name_sim, desc_sim, method_acc, pdesc_sim, type_acc;
  size_t sum_pred = 0, sum_truth = 0, sum_common = 0;
  std::set<std::string> counted_truth;

  for (const auto* r : ordered) {
    if (r->valid && r->spec) ++valid;
    auto t = truth.find(r->source_id);
    if (t == truth.end()) continue;
    if (counted_truth.insert(r->source_id).second) m.truth_endpoints += t->second.endpoints.size();
    if (!r->valid || !r->spec) continue;

    const ApiSpec& pred = *r->spec;
    for (const auto& pair : match_endpoints(pred, t->second, emb)) {
      const Endpoint& pe = pred.endpoints[pair.pred_index];
      const Endpoint& te = t->second.endpoints[pair.truth_index];
      ++m.matched_endpoints;

      auto names = emb.embed({pe.name, te.name});
      name_sim.add(cosine_similarity(names[0], names[1]));
      if (te.description) desc_sim.add(text_similarity(emb, pe.description, *te.description));
      method_acc.add(normalize_method(pe.method) == normalize_method(te.method) ? 1.0 : 0.0);

      auto pp = params_by_name(pe);
      auto tp = params_by_name(te);
      EndpointScore score{r->source_id, pair.pred_index, pair.truth_index, pp.size(), tp.size(), 0, 0, 0};
      for (const auto& [name, truth_param] : tp) {
        auto it = pp.find(name);
        if (it == pp.end()) continue;
        ++score.common_params;
        if (truth_param->description)
          pdesc_sim.add(text_similarity(emb, it->second->description, *truth_param->description));
        if (truth_param->type_hint) {
          bool same = it->second->type_hint &&
                      canonical_type(*it->second->type_hint) == canonical_type(*truth_param->type_hint);
          type_acc.add(same ? 1.0 : 0.0);
        }
      }
      score.precision = ratio(score.common_params, score.predicted_params, score.truth_params);
      score.recall = ratio(score.common_params, score.truth_params, score.predicted_params);
      sum_pred += score.predicted_params;
      sum_truth += score.truth_params;
      sum_common += score.common_params;
      m.per_endpoint.push_back(score);
    }
  }

  m.valid_ratio = static_cast<double>(valid) / static_cast<double>(results.size());
  m.name_similarity = name_sim.value();
  m.description_similarity = desc_sim.value();
  m.method_accuracy = method_acc.value();
  m.param_description_similarity = pdesc_sim.value();
  m.type_accuracy = type_acc.value();
  if (m.matched_endpoints > 0) {
    m.param_precision = ratio(sum_common, sum_pred, sum_truth);
    m.param_recall = ratio(sum_common, sum_truth, sum_pred);
  }
  return m;
}

nlohmann::json to_json(const MetricsReport& m) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& s : m.per_endpoint) {
    per.push_back({{"source_id", s.source_id},
                   {"pred_index", s.pred_index},
                   {"truth_index", s.truth_index},
                   {"predicted_params", s.predicted_params},
                   {"truth_params", s.truth_params},
                   {"common_params", s.common_params},
                   {"precision", s.precision},
                   {"recall", s.recall}});
  }
  return {{"valid_ratio", m.valid_ratio},
          {"matched_endpoints", m.matched_endpoints},
          {"truth_endpoints", m.truth_endpoints},
          {"name_similarity", m.name_similarity},
          {"description_similarity", m.description_similarity},
          {"method_accuracy", m.method_accuracy},
          {"param_precision", m.param_precision},
          {"param_recall", m.param_recall},
          {"param_description_similarity", m.param_description_similarity},
          {"type_accuracy", m.type_accuracy},
          {"per_endpoint", per}};
}

std::string format_metrics_table(const MetricsReport& m, const std::string& label) {
  const std::vector<std::string> headers = {
      "Model", "Valid Ratio", "# Matched", "Name Sim", "Desc Sim", "Method Acc",
      "Param Precision", "Param Recall", "Param Desc Sim", "Type Acc"};
  auto fmt = [](double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(2) << v;
    return ss.str();
  };
  const std::vector<std::string> values = {
      label, fmt(m.valid_ratio), std::to_string(m.matched_endpoints), fmt(m.name_similarity),
      fmt(m.description_similarity), fmt(m.method_accuracy), fmt(m.param_precision),
      fmt(m.param_recall), fmt(m.param_description_similarity), fmt(m.type_accuracy)};
  std::ostringstream out;
  for (size_t i = 0; i < headers.size(); ++i) {
    size_t w = std::max(headers[i].size(), values[i].size());
    out << (i ? "  " : "") << std::left << std::setw(static_cast<int>(w)) << headers[i];
  }
  out << "\n";
  for (size_t i = 0; i < headers.size(); ++i) {
    size_t w = std::max(headers[i].size(), values[i].size());
    out << (i ? "  " : "") << std::left << std::setw(static_cast<int>(w)) << values[i];
  }
  out << "\n";
  return out.str();
}

}  // namespace doc2tool
