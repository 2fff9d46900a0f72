#include "recognet/error.hpp"

namespace recognet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateNode: return "DuplicateNode";
    case ErrorCode::DuplicateArc: return "DuplicateArc";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::CptMismatch: return "CptMismatch";
    case ErrorCode::InvalidEvidence: return "InvalidEvidence";
    case ErrorCode::NoSuchArc: return "NoSuchArc";
    case ErrorCode::WouldCreateCycle: return "WouldCreateCycle";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotInstantiated: return "NotInstantiated";
    case ErrorCode::NotPolytree: return "NotPolytree";
    case ErrorCode::NotTree: return "NotTree";
    case ErrorCode::EvidenceOnInternalNode: return "EvidenceOnInternalNode";
    case ErrorCode::InconsistentEvidence: return "InconsistentEvidence";
    case ErrorCode::NotSharedLeafPair: return "NotSharedLeafPair";
    case ErrorCode::UninstantiatedLeaf: return "UninstantiatedLeaf";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ZeroProbabilityEvidence: return "ZeroProbabilityEvidence";
    case ErrorCode::LevelViolation: return "LevelViolation";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::BadEpsilon: return "BadEpsilon";
    case ErrorCode::SolverInapplicable: return "SolverInapplicable";
    case ErrorCode::Usage: return "Usage";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace recognet
