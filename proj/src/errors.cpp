#include "credal/errors.hpp"

namespace credal {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::CyclicGraph: return "CyclicGraph";
    case ErrorCode::ExogenousWithParents: return "ExogenousWithParents";
    case ErrorCode::MultipleExogenousParents: return "MultipleExogenousParents";
    case ErrorCode::OrphanExogenous: return "OrphanExogenous";
    case ErrorCode::NonSurjectiveEquation: return "NonSurjectiveEquation";
    case ErrorCode::CardinalityOverflow: return "CardinalityOverflow";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::NonPositiveCell: return "NonPositiveCell";
    case ErrorCode::ZeroConditioningEvent: return "ZeroConditioningEvent";
    case ErrorCode::NotMarkovian: return "NotMarkovian";
    case ErrorCode::NotQuasiMarkovian: return "NotQuasiMarkovian";
    case ErrorCode::InfeasibleIdentification: return "InfeasibleIdentification";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::VertexExplosion: return "VertexExplosion";
    case ErrorCode::DenominatorVanishes: return "DenominatorVanishes";
    case ErrorCode::MismatchedIdentification: return "MismatchedIdentification";
    case ErrorCode::InterveneExogenous: return "InterveneExogenous";
    case ErrorCode::LikelihoodOutOfRange: return "LikelihoodOutOfRange";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::ZeroEvidenceProbability: return "ZeroEvidenceProbability";
    case ErrorCode::ZeroEvidenceEverywhere: return "ZeroEvidenceEverywhere";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::EmptyRecords: return "EmptyRecords";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

CredalError::CredalError(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw CredalError(code, message); }

}  // namespace credal
