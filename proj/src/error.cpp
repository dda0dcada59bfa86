#include "doc2tool/error.hpp"

namespace doc2tool {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FetchFailed: return "FetchFailed";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::JudgeUnavailable: return "JudgeUnavailable";
    case ErrorCode::BackendUnreachable: return "BackendUnreachable";
    case ErrorCode::RepairFailure: return "RepairFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::MalformedUrl: return "MalformedUrl";
    case ErrorCode::MixedHosts: return "MixedHosts";
    case ErrorCode::MissingRequiredParameter: return "MissingRequiredParameter";
    case ErrorCode::UnboundPathParam: return "UnboundPathParam";
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::InsufficientCorpus: return "InsufficientCorpus";
    case ErrorCode::EmbeddingUnavailable: return "EmbeddingUnavailable";
    case ErrorCode::MissingStageInput: return "MissingStageInput";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& subject,
                    const std::string& detail) {
  std::string msg(to_string(code));
  msg += "(" + subject + ")";
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

Error::Error(ErrorCode code, std::string subject, const std::string& detail)
    : std::runtime_error(compose(code, subject, detail)),
      code_(code),
      subject_(std::move(subject)) {}

}  // namespace doc2tool
