#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace recognet {

enum class ErrorCode {
  ParseError,
  DuplicateNode,
  DuplicateArc,
  UnknownNode,
  CycleDetected,
  CptMismatch,
  InvalidEvidence,
  NoSuchArc,
  WouldCreateCycle,
  WrongArity,
  DimensionMismatch,
  NotInstantiated,
  NotPolytree,
  NotTree,
  EvidenceOnInternalNode,
  InconsistentEvidence,
  NotSharedLeafPair,
  UninstantiatedLeaf,
  NonConvergence,
  DegenerateSpectrum,
  TooLarge,
  ZeroProbabilityEvidence,
  LevelViolation,
  InvalidSpec,
  BadEpsilon,
  SolverInapplicable,
  Usage,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure in the library is reported through this type. `code()` is
/// stable and machine readable; `what()` is "<Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace recognet
