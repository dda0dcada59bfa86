#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace doc2tool {

enum class ErrorCode {
  FetchFailed,
  EmptyDocument,
  JudgeUnavailable,
  BackendUnreachable,
  RepairFailure,
  DimensionMismatch,
  EmptyCorpus,
  MalformedUrl,
  MixedHosts,
  MissingRequiredParameter,
  UnboundPathParam,
  NegativeCount,
  NoCandidates,
  InsufficientCorpus,
  EmbeddingUnavailable,
  MissingStageInput,
  ConfigInvalid,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code and the subject it
// concerns (a path, a parameter name, a stage name...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string subject, const std::string& detail = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace doc2tool
