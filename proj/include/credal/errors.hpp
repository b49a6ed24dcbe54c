#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace credal {

// Every failure the library reports carries one of these codes. The CLI maps
// them onto stable exit codes (see cli.hpp).
enum class ErrorCode {
  InvalidModel,
  CyclicGraph,
  ExogenousWithParents,
  MultipleExogenousParents,
  OrphanExogenous,
  NonSurjectiveEquation,
  CardinalityOverflow,
  InvalidDistribution,
  EmptyDataset,
  NonPositiveCell,
  ZeroConditioningEvent,
  NotMarkovian,
  NotQuasiMarkovian,
  InfeasibleIdentification,
  DimensionMismatch,
  Infeasible,
  Unbounded,
  VertexExplosion,
  DenominatorVanishes,
  MismatchedIdentification,
  InterveneExogenous,
  LikelihoodOutOfRange,
  InvalidQuery,
  ZeroEvidenceProbability,
  ZeroEvidenceEverywhere,
  Timeout,
  EmptyRecords,
  InvalidConfig,
  ParseError,
};

std::string_view to_string(ErrorCode code);

class CredalError : public std::runtime_error {
 public:
  CredalError(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace credal
