#include "doc2tool/inference.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <queue>
#include <stdexcept>

#include "doc2tool/error.hpp"
#include "doc2tool/json_repair.hpp"
#include "doc2tool/prompts.hpp"
#include "doc2tool/strings.hpp"

namespace doc2tool {

std::string_view to_string(KbProvenance p) {
  return p == KbProvenance::FromDocumentation ? "FromDocumentation" : "FromResponseJson";
}

nlohmann::json to_json(const KbEntry& e) {
  return {{"param_key", e.key},
          {"description", e.description ? nlohmann::json(*e.description) : nlohmann::json()},
          {"value", scalar_to_json(e.value)},
          {"source_id", e.source_id},
          {"provenance", std::string(to_string(e.provenance))},
          {"key_embedding", e.key_embedding},
          {"description_embedding",
           e.description_embedding ? nlohmann::json(*e.description_embedding) : nlohmann::json()}};
}

KbEntry kb_entry_from_json(const nlohmann::json& j) {
  KbEntry e;
  e.key = j.at("param_key").get<std::string>();
  if (j.contains("description") && j["description"].is_string()) e.description = j["description"];
  auto v = scalar_from_json(j.at("value"));
  if (!v) throw Error(ErrorCode::ConfigInvalid, "kb entry", "null value for " + e.key);
  e.value = *v;
  e.source_id = j.value("source_id", "");
  e.provenance = j.value("provenance", "") == "FromResponseJson" ? KbProvenance::FromResponseJson
                                                                   : KbProvenance::FromDocumentation;
  e.key_embedding = j.value("key_embedding", Vector{});
  if (j.contains("description_embedding") && j["description_embedding"].is_array())
    e.description_embedding = j["description_embedding"].get<Vector>();
  return e;
}

namespace {

std::string value_key(const Scalar& v) { return scalar_to_json(v).dump(); }

}  // namespace

bool ParameterKb::add(KbEntry entry) {
  if (!index_.emplace(entry.key, value_key(entry.value), entry.source_id).second) return false;
  entries_.push_back(std::move(entry));
  return true;
}

bool ParameterKb::contains(const std::string& key, const Scalar& value,
                           const std::string& source_id) const {
  return index_.count({key, value_key(value), source_id}) > 0;
}

std::set<std::string> ParameterKb::sources() const {
  std::set<std::string> out;
  for (const auto& e : entries_) out.insert(e.source_id);
  return out;
}

KbEntry make_kb_entry(std::string key, std::optional<std::string> description, Scalar value,
                      std::string source_id, KbProvenance provenance, EmbeddingProvider& emb) {
  KbEntry e;
  e.key = std::move(key);
  if (description && str::trim(*description).empty()) description.reset();
  e.description = std::move(description);
  e.value = std::move(value);
  e.source_id = std::move(source_id);
  e.provenance = provenance;
  std::vector<std::string> texts{e.key};
  if (e.description) texts.push_back(*e.description);
  auto vecs = emb.embed(texts);
  e.key_embedding = std::move(vecs[0]);
  if (e.description) e.description_embedding = std::move(vecs[1]);
  return e;
}

std::vector<std::pair<std::string, Scalar>> harvest_response_values(const nlohmann::json& body) {
  constexpr int kMaxDepth = 3;
  constexpr size_t kMaxKey = 40;
  constexpr size_t kMaxEntries = 50;
  std::vector<std::pair<std::string, Scalar>> out;

  auto walk = [&](auto&& self, const nlohmann::json& j, const std::string& key, int depth) -> void {
    if (out.size() >= kMaxEntries || depth > kMaxDepth) return;
    if (j.is_object()) {
      for (const auto& [k, v] : j.items()) self(self, v, k, depth + 1);
    } else if (j.is_array()) {
      // Array elements inherit the array's key and stay at its depth.
      for (const auto& v : j) {
        if (v.is_structured()) self(self, v, key, depth + 1);
        else self(self, v, key, depth);
      }
    } else if (!j.is_null() && !key.empty() && key.size() <= kMaxKey) {
      if (auto s = scalar_from_json(j)) out.emplace_back(key, *s);
    }
  };
  walk(walk, body, "", 0);
  return out;
}

ParameterKb build_kb(const std::vector<ValidationReport>& reports,
                     const std::vector<ToolDescriptor>& tools, EmbeddingProvider& emb) {
  ParameterKb kb;
  auto add = [&](std::string key, std::optional<std::string> desc, Scalar value,
                 const std::string& source, KbProvenance prov) {
    if (kb.contains(key, value, source)) return;
    try {
      kb.add(make_kb_entry(std::move(key), std::move(desc), std::move(value), source, prov, emb));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmbeddingUnavailable) throw;
      ++kb.skipped;
      std::cerr << "kb: skipped entry: " << e.what() << "\n";
    }
  };

  for (const auto& r : reports) {
    if (!r.passed) continue;
    auto tool = std::find_if(tools.begin(), tools.end(), [&](const ToolDescriptor& t) {
      return t.tool_name == r.tool_name && t.source_id == r.source_id;
    });
    for (const auto& [name, value] : r.args) {
      std::optional<std::string> desc;
      if (tool != tools.end())
        if (const ToolArg* a = tool->find_arg(name)) desc = a->description;
      add(name, desc, value, r.source_id, KbProvenance::FromDocumentation);
    }
    if (!r.attempts.empty() && r.attempts.back().json_body)
      for (auto& [k, v] : harvest_response_values(*r.attempts.back().json_body))
        add(k, std::nullopt, v, r.source_id, KbProvenance::FromResponseJson);
  }
  return kb;
}

std::vector<Candidate> retrieve_candidates(const ParamQuery& query, const ParameterKb& kb,
                                           EmbeddingProvider& emb,
                                           const std::optional<std::string>& exclude_source) {
  std::vector<const KbEntry*> pool;
  for (const auto& e : kb.entries())
    if (!exclude_source || e.source_id != *exclude_source) pool.push_back(&e);
  if (pool.empty()) return {};

  using Scored = std::pair<double, size_t>;
  auto top = [&](auto similarity) {
    std::vector<Scored> scored;
    for (size_t i = 0; i < pool.size(); ++i)
      if (auto s = similarity(*pool[i])) scored.emplace_back(*s, i);
    std::stable_sort(scored.begin(), scored.end(),
                     [](const Scored& a, const Scored& b) { return a.first > b.first; });
    if (scored.size() > kTopPerChannel) scored.resize(kTopPerChannel);
    return scored;
  };

  std::vector<Scored> picked;
  if (query.description && !str::trim(*query.description).empty()) {
    Vector qd = emb.embed_one(*query.description);
    auto by_desc = top([&](const KbEntry& e) -> std::optional<double> {
      if (!e.description_embedding) return std::nullopt;
      return cosine_similarity(qd, *e.description_embedding);
    });
    picked.insert(picked.end(), by_desc.begin(), by_desc.end());
  }
  Vector qk = emb.embed_one(query.key);
  auto by_key = top([&](const KbEntry& e) -> std::optional<double> {
    return cosine_similarity(qk, e.key_embedding);
  });
  picked.insert(picked.end(), by_key.begin(), by_key.end());

  std::map<std::pair<std::string, std::string>, Candidate> merged;
  for (const auto& [sim, i] : picked) {
    const KbEntry& e = *pool[i];
    auto id = std::make_pair(e.key, value_key(e.value));
    auto it = merged.find(id);
    if (it == merged.end()) merged.emplace(id, Candidate{e.key, e.value, e.source_id, sim});
    else if (sim > it->second.similarity) it->second = Candidate{e.key, e.value, e.source_id, sim};
  }

  std::vector<Candidate> out;
  for (auto& [id, c] : merged)
    if (c.similarity >= kMinCandidateSimilarity) out.push_back(std::move(c));
  std::stable_sort(out.begin(), out.end(),
                   [](const Candidate& a, const Candidate& b) { return a.similarity > b.similarity; });
  return out;
}

std::vector<RankedAssignment> rank_combinations(const std::vector<std::vector<double>>& similarities,
                                                size_t limit) {
  const size_t n = similarities.size();
  for (size_t i = 0; i < n; ++i)
    if (similarities[i].empty()) throw Error(ErrorCode::NoCandidates, std::to_string(i));
  if (n == 0 || limit == 0) return {};

  // Work on each list in descending order; ties keep the original order so
  // that stepping forward never makes the choice lexicographically smaller.
  std::vector<std::vector<size_t>> order(n);
  std::vector<std::vector<double>> logs(n);
  for (size_t i = 0; i < n; ++i) {
    order[i].resize(similarities[i].size());
    for (size_t k = 0; k < order[i].size(); ++k) order[i][k] = k;
    std::stable_sort(order[i].begin(), order[i].end(), [&](size_t a, size_t b) {
      return similarities[i][a] > similarities[i][b];
    });
    for (size_t k : order[i]) logs[i].push_back(std::log(std::max(similarities[i][k], 1e-300)));
  }

  struct Node {
    double score;
    std::vector<size_t> pos;     // positions in the sorted lists
    std::vector<size_t> choice;  // original indices
  };
  auto make = [&](std::vector<size_t> pos) {
    Node node{0.0, std::move(pos), std::vector<size_t>(n)};
    for (size_t i = 0; i < n; ++i) {
      node.score += logs[i][node.pos[i]];
      node.choice[i] = order[i][node.pos[i]];
    }
    return node;
  };
  auto worse = [](const Node& a, const Node& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.choice > b.choice;
  };

  std::priority_queue<Node, std::vector<Node>, decltype(worse)> frontier(worse);
  std::set<std::vector<size_t>> seen;
  std::vector<size_t> start(n, 0);
  seen.insert(start);
  frontier.push(make(start));

  std::vector<RankedAssignment> out;
  while (!frontier.empty() && out.size() < limit) {
    Node best = frontier.top();
    frontier.pop();
    out.push_back({best.choice, best.score});
    for (size_t i = 0; i < n; ++i) {
      if (best.pos[i] + 1 >= logs[i].size()) continue;
      std::vector<size_t> next = best.pos;
      ++next[i];
      if (seen.insert(next).second) frontier.push(make(std::move(next)));
    }
  }
  return out;
}

nlohmann::json to_json(const InferenceOutcome& o) {
  auto args_json = [](const ArgValues& a) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : a) j[k] = scalar_to_json(v);
    return j;
  };
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& pc : o.candidates) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& c : pc.candidates)
      list.push_back({{"key", c.key},
                      {"value", scalar_to_json(c.value)},
                      {"source_id", c.source_id},
                      {"similarity", c.similarity}});
    cands.push_back({{"param", pc.param}, {"candidates", list}});
  }
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& g : o.failed_guesses) failed.push_back(args_json(g));
  return {{"tool_name", o.tool_name},
          {"source_id", o.source_id},
          {"success", o.success},
          {"status", o.status},
          {"assignment", o.assignment ? args_json(*o.assignment) : nlohmann::json()},
          {"attempts", o.attempts},
          {"candidates_considered", o.candidates_considered},
          {"candidates", cands},
          {"failed_guesses", failed}};
}

std::vector<std::string> inference_targets(const ToolDescriptor& tool) {
  std::vector<std::string> missing, required;
  for (const auto& a : tool.args) {
    if (!a.required) continue;
    required.push_back(a.name);
    if (a.value_missing()) missing.push_back(a.name);
  }
  return missing.empty() ? required : missing;
}

namespace {

void write_back(ToolDescriptor& tool, const ArgValues& assignment) {
  for (const auto& [name, value] : assignment)
    if (ToolArg* a = tool.find_arg(name)) a->example_value = value;
}

}  // namespace

InferenceOutcome infer_parameters(ToolDescriptor& tool, ParameterKb& kb, JudgeBackend& judge,
                                  ValidationContext& ctx, EmbeddingProvider& emb,
                                  const InferenceOptions& options) {
  InferenceOutcome out;
  out.tool_name = tool.tool_name;
  out.source_id = tool.source_id;

  const auto targets = inference_targets(tool);
  if (targets.empty()) {
    out.status = "NoTargets";
    return out;
  }

  std::vector<std::vector<double>> sims;
  for (const auto& name : targets) {
    const ToolArg* arg = tool.find_arg(name);
    ParamCandidates pc{name, retrieve_candidates({name, arg ? arg->description : std::nullopt}, kb,
                                                 emb, options.exclude_source)};
    if (options.exclude_source)
      for (const auto& c : pc.candidates)
        if (c.source_id == *options.exclude_source)
          throw std::logic_error("leave-one-out isolation violated for " + tool.tool_name);
    out.candidates_considered += pc.candidates.size();
    std::vector<double> s;
    for (const auto& c : pc.candidates) s.push_back(c.similarity);
    sims.push_back(std::move(s));
    out.candidates.push_back(std::move(pc));
  }
  for (const auto& pc : out.candidates) {
    if (pc.candidates.empty()) {
      out.status = "NoCandidates";
      return out;
    }
  }

  const ArgValues base = default_arg_values(tool);
  for (const auto& ranked : rank_combinations(sims, options.max_assignments)) {
    ArgValues assignment;
    for (size_t i = 0; i < targets.size(); ++i)
      assignment[targets[i]] = out.candidates[i].candidates[ranked.choice[i]].value;
    ArgValues args = base;
    for (const auto& [k, v] : assignment) args[k] = v;

    ++out.attempts;
    ValidationReport report = validate_tool(tool, judge, ctx, args);
    if (!report.passed) continue;

    out.success = true;
    out.status = "success";
    out.assignment = assignment;
    write_back(tool, assignment);
    if (options.update_kb) {
      for (const auto& [name, value] : assignment) {
        if (kb.contains(name, value, tool.source_id)) continue;
        const ToolArg* a = tool.find_arg(name);
        kb.add(make_kb_entry(name, a ? a->description : std::nullopt, value, tool.source_id,
                             KbProvenance::FromDocumentation, emb));
      }
    }
    return out;
  }
  out.status = "Exhausted";
  return out;
}

std::string baseline_prompt(const ToolDescriptor& tool, const std::vector<std::string>& targets,
                            const std::vector<ArgValues>& history) {
  std::vector<std::string> hist;
  for (const auto& guess : history) {
    std::vector<std::string> parts;
    for (const auto& [k, v] : guess) parts.push_back(k + "=" + scalar_to_string(v));
    hist.push_back(str::join(parts, ", "));
  }
  std::vector<std::string> params;
  for (const auto& name : targets) {
    const ToolArg* a = tool.find_arg(name);
    std::string line = name;
    if (a && a->type_hint) line += " (" + *a->type_hint + ")";
    if (a && a->description) line += ": " + *a->description;
    params.push_back(line);
  }
  return prompts::render(prompts::kParameterGeneration,
                         {{"history", str::join(hist, "\n")},
                          {"description", tool.description},
                          {"param_description", str::join(params, "\n")}});
}

InferenceOutcome llm_guess_baseline(ToolDescriptor& tool, JudgeBackend& judge,
                                    ValidationContext& ctx, ChatClient& client, int rounds) {
  InferenceOutcome out;
  out.tool_name = tool.tool_name;
  out.source_id = tool.source_id;
  const auto targets = inference_targets(tool);
  if (targets.empty()) {
    out.status = "NoTargets";
    return out;
  }
  const ArgValues base = default_arg_values(tool);

  for (int round = 0; round < rounds; ++round) {
    std::string prompt = baseline_prompt(tool, targets, out.failed_guesses);
    ChatReply reply = client.complete({{"user", prompt}},
                                      std::optional<nlohmann::json>(prompts::parameter_list_schema()),
                                      "ParameterList");

    ArgValues guess;
    try {
      nlohmann::json parsed = repair_json(reply.content);
      for (const auto& p : parsed.value("parameters", nlohmann::json::array())) {
        std::string key = p.value("parameter_key", "");
        if (std::find(targets.begin(), targets.end(), key) == targets.end()) continue;
        if (auto v = scalar_from_json(p.value("parameter_guess", nlohmann::json()))) guess[key] = *v;
      }
    } catch (const Error&) {
      // An unusable reply still costs a round.
    }
    out.candidates_considered += guess.size();

    ArgValues args = base;
    for (const auto& [k, v] : guess) args[k] = v;
    ++out.attempts;
    if (validate_tool(tool, judge, ctx, args).passed) {
      out.success = true;
      out.status = "success";
      out.assignment = guess;
      write_back(tool, guess);
      return out;
    }
    out.failed_guesses.push_back(guess);
  }
  out.status = "Exhausted";
  return out;
}

nlohmann::json to_json(const LeaveOneOutSummary& s) {
  nlohmann::json outcomes = nlohmann::json::array();
  for (const auto& o : s.outcomes) outcomes.push_back(to_json(o));
  return {{"outcomes", outcomes},
          {"tools", s.outcomes.size()},
          {"successes", s.successes},
          {"mean_attempts", s.mean_attempts}};
}

LeaveOneOutSummary leave_one_api_out(const std::vector<ToolDescriptor>& tools,
                                     const std::vector<ValidationReport>& reports,
                                     EmbeddingProvider& emb, JudgeBackend& judge,
                                     ValidationContext& ctx) {
  std::set<std::string> sources;
  for (const auto& t : tools) sources.insert(t.source_id);
  if (sources.size() < 2)
    throw Error(ErrorCode::InsufficientCorpus, "sources", std::to_string(sources.size()) + " source(s)");

  const ParameterKb base_kb = build_kb(reports, tools, emb);
  LeaveOneOutSummary summary;
  size_t total_attempts = 0;

  for (const auto& r : reports) {
    if (!r.passed) continue;
    auto it = std::find_if(tools.begin(), tools.end(), [&](const ToolDescriptor& t) {
      return t.tool_name == r.tool_name && t.source_id == r.source_id;
    });
    if (it == tools.end()) continue;
    if (std::none_of(it->args.begin(), it->args.end(), [](const ToolArg& a) { return a.required; }))
      continue;

    ToolDescriptor blind = *it;
    for (auto& a : blind.args) {
      a.example_value.reset();
      a.default_value.reset();
    }
    ParameterKb kb = base_kb;
    InferenceOptions opts;
    opts.exclude_source = blind.source_id;
    InferenceOutcome o = infer_parameters(blind, kb, judge, ctx, emb, opts);
    total_attempts += static_cast<size_t>(o.attempts);
    if (o.success) ++summary.successes;
    summary.outcomes.push_back(std::move(o));
  }
  if (!summary.outcomes.empty())
    summary.mean_attempts = static_cast<double>(total_attempts) / static_cast<double>(summary.outcomes.size());
  return summary;
}

}  // namespace doc2tool
