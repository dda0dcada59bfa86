#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "doc2tool/embedding.hpp"
#include "doc2tool/judge.hpp"
#include "doc2tool/remote.hpp"
#include "doc2tool/toolgen.hpp"
#include "doc2tool/validation.hpp"

namespace doc2tool {

enum class KbProvenance { FromDocumentation, FromResponseJson };

std::string_view to_string(KbProvenance p);

struct KbEntry {
  std::string key;
  std::optional<std::string> description;
  Scalar value;
  std::string source_id;
  Vector key_embedding;
  std::optional<Vector> description_embedding;
  KbProvenance provenance = KbProvenance::FromDocumentation;
};

nlohmann::json to_json(const KbEntry& e);
KbEntry kb_entry_from_json(const nlohmann::json& j);

// Known parameter values. Entries are unique on (key, value, source_id).
class ParameterKb {
 public:
  // Returns false for a duplicate.
  bool add(KbEntry entry);
  bool contains(const std::string& key, const Scalar& value, const std::string& source_id) const;

  const std::vector<KbEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::set<std::string> sources() const;

  // Entries that could not be embedded and were left out.
  size_t skipped = 0;

 private:
  std::vector<KbEntry> entries_;
  std::set<std::tuple<std::string, std::string, std::string>> index_;
};

// Embeds key and description; throws Error(EmbeddingUnavailable).
KbEntry make_kb_entry(std::string key, std::optional<std::string> description, Scalar value,
                      std::string source_id, KbProvenance provenance, EmbeddingProvider& emb);

// Scalar leaves of a JSON body: depth <= 3, key length <= 40, at most 50.
std::vector<std::pair<std::string, Scalar>> harvest_response_values(const nlohmann::json& body);

// Uses only passing reports: their argument values and the scalar leaves of
// their final responses.
ParameterKb build_kb(const std::vector<ValidationReport>& reports,
                     const std::vector<ToolDescriptor>& tools, EmbeddingProvider& emb);

struct ParamQuery {
  std::string key;
  std::optional<std::string> description;
};

struct Candidate {
  std::string key;
  Scalar value;
  std::string source_id;
  double similarity = 0.0;
};

inline constexpr size_t kTopPerChannel = 5;
inline constexpr double kMinCandidateSimilarity = 0.5;
inline constexpr size_t kMaxAssignments = 20;

// Top five by description similarity (skipped without a description) joined
// with the top five by key similarity, deduplicated on (key, value), then
// filtered at 0.5 and sorted by similarity.
std::vector<Candidate> retrieve_candidates(const ParamQuery& query, const ParameterKb& kb,
                                           EmbeddingProvider& emb,
                                           const std::optional<std::string>& exclude_source = std::nullopt);

struct RankedAssignment {
  std::vector<size_t> choice;  // candidate index per parameter
  double log_score = 0.0;

  bool operator==(const RankedAssignment&) const = default;
};

// Best-first enumeration of the cross product by descending sum of
// log-similarities; ties go to the lexicographically smaller choice.
// Throws Error(NoCandidates) naming the index of an empty list.
std::vector<RankedAssignment> rank_combinations(const std::vector<std::vector<double>>& similarities,
                                                size_t limit = kMaxAssignments);

struct ParamCandidates {
  std::string param;
  std::vector<Candidate> candidates;
};

struct InferenceOutcome {
  std::string tool_name;
  std::string source_id;
  bool success = false;
  // "success", "NoCandidates", "Exhausted" or "NoTargets".
  std::string status;
  std::optional<ArgValues> assignment;
  int attempts = 0;
  size_t candidates_considered = 0;
  std::vector<ParamCandidates> candidates;
  // Every guess that failed, in order (baseline only).
  std::vector<ArgValues> failed_guesses;
};

nlohmann::json to_json(const InferenceOutcome& o);

struct InferenceOptions {
  std::optional<std::string> exclude_source;
  size_t max_assignments = kMaxAssignments;
  // Insert winning values into the KB.
  bool update_kb = true;
};

// Required args still lacking a value, or every required arg when none lack one.
std::vector<std::string> inference_targets(const ToolDescriptor& tool);

// On success the winning values become the args' example values.
InferenceOutcome infer_parameters(ToolDescriptor& tool, ParameterKb& kb, JudgeBackend& judge,
                                  ValidationContext& ctx, EmbeddingProvider& emb,
                                  const InferenceOptions& options = {});

inline constexpr int kBaselineRounds = 10;

// The guessing prompt for one round.
std::string baseline_prompt(const ToolDescriptor& tool, const std::vector<std::string>& targets,
                            const std::vector<ArgValues>& history);

// Asks the model for values, up to `rounds` times, feeding back failures.
// Throws Error(BackendUnreachable).
InferenceOutcome llm_guess_baseline(ToolDescriptor& tool, JudgeBackend& judge,
                                    ValidationContext& ctx, ChatClient& client,
                                    int rounds = kBaselineRounds);

struct LeaveOneOutSummary {
  std::vector<InferenceOutcome> outcomes;
  size_t successes = 0;
  double mean_attempts = 0.0;
};

nlohmann::json to_json(const LeaveOneOutSummary& s);

// For each passing tool with required args: forget its values, then infer
// them from a KB that excludes its own source. Throws
// Error(InsufficientCorpus) with fewer than two sources.
LeaveOneOutSummary leave_one_api_out(const std::vector<ToolDescriptor>& tools,
                                     const std::vector<ValidationReport>& reports,
                                     EmbeddingProvider& emb, JudgeBackend& judge,
                                     ValidationContext& ctx);

}  // namespace doc2tool
