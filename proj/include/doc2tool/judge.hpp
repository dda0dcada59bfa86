#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "doc2tool/remote.hpp"

namespace doc2tool {

enum class DocCategory { FullyOrganized, SemiOrganized, Unorganized };

std::string_view to_string(DocCategory c);
std::optional<DocCategory> parse_doc_category(std::string_view s);

struct DocClassification {
  DocCategory category = DocCategory::Unorganized;
  std::string analysis;  // at most 300 characters
};

struct Verdict {
  bool pass = false;
  std::string rationale;
};

// Decides the three yes/no style questions of the pipeline: is this page
// API documentation, how organized is it, and does a 200 response carry
// information or an error message.
class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;
  virtual std::string name() const = 0;
  virtual bool is_api_page(std::string_view text) = 0;
  virtual DocClassification classify(std::string_view text) = 0;
  virtual Verdict judge_response(std::string_view tool_description,
                                 std::string_view response_text) = 0;
};

std::vector<std::string> default_error_phrases();

// Deterministic, offline rules; pure functions of their inputs.
class HeuristicJudge final : public JudgeBackend {
 public:
  explicit HeuristicJudge(std::vector<std::string> error_phrases = default_error_phrases());

  std::string name() const override { return "heuristic"; }
  bool is_api_page(std::string_view text) override;
  DocClassification classify(std::string_view text) override;
  Verdict judge_response(std::string_view tool_description,
                         std::string_view response_text) override;

 private:
  std::vector<std::string> error_phrases_;
};

// Model-backed judge. Every method throws Error(JudgeUnavailable) when the
// service cannot be reached or answers out of contract.
class RemoteJudge final : public JudgeBackend {
 public:
  explicit RemoteJudge(std::shared_ptr<ChatClient> client);

  std::string name() const override { return "remote"; }
  bool is_api_page(std::string_view text) override;
  DocClassification classify(std::string_view text) override;
  Verdict judge_response(std::string_view tool_description,
                         std::string_view response_text) override;

 private:
  std::shared_ptr<ChatClient> client_;
};

// Uses the primary judge and falls back to the heuristic one when it is
// unavailable; the fallback is noted in verdict rationales.
class FallbackJudge final : public JudgeBackend {
 public:
  FallbackJudge(std::shared_ptr<JudgeBackend> primary, std::shared_ptr<HeuristicJudge> fallback);

  std::string name() const override { return primary_->name() + "+fallback"; }
  bool is_api_page(std::string_view text) override;
  DocClassification classify(std::string_view text) override;
  Verdict judge_response(std::string_view tool_description,
                         std::string_view response_text) override;

 private:
  std::shared_ptr<JudgeBackend> primary_;
  std::shared_ptr<HeuristicJudge> fallback_;
};

// Shared text signals used by the heuristic judge and extractor.
namespace signals {
bool has_url_token(std::string_view text);
// Lines of the form "VERB url" where VERB is an HTTP method.
size_t count_verb_url_lines(std::string_view text);
bool has_parameter_keyword(std::string_view text);
}  // namespace signals

}  // namespace doc2tool
