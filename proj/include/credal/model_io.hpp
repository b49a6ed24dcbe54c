#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "credal/credal_network.hpp"
#include "credal/empirical.hpp"
#include "credal/identification.hpp"
#include "credal/scm.hpp"

namespace credal {

// Contents of a model file. Only `model` is mandatory.
//
// {
//   "variables":   [{"id": "X1", "kind": "endogenous", "cardinality": 2}, ...],
//   "equations":   [{"child": "X1", "parents": ["U1"], "table": [0, 1, 1]}, ...],
//   "exogenous_pmfs": {"U1": [0.2, 0.3, 0.5], ...},
//   "empirical":   {"variable_order": ["X1", "X2"], "probabilities": [...], "floor": 0.01},
//   "expert_constraints": [{"exogenous": "U1", "coefficients": [...], "relation": ">=", "rhs": 0.1}],
//   "identification": {"U1": {"dimension": 3, "constraints": [{"coefficients": [...], "relation": "=", "rhs": 0.3}]}}
// }
//
// Ids may not contain the twin suffix "'". States are 0-based.
struct ModelDocument {
  CausalModel model;
  std::optional<std::vector<std::vector<double>>> exogenous_pmfs;  // aligned with model.exogenous()
  std::optional<EmpiricalDistribution> empirical;                   // as stored, floor not applied
  double empirical_floor = 0.0;
  std::vector<ExpertConstraint> expert_constraints;
  std::optional<IdentificationResult> identification;
};

// Throws ParseError for malformed JSON or schema violations, and the model's
// own validation errors for inconsistent contents.
ModelDocument parse_model(std::string_view text);
ModelDocument load_model(const std::filesystem::path& path);
std::string serialize_model(const ModelDocument& document);

// The empirical PMF with the document's floor applied.
EmpiricalDistribution document_empirical(const ModelDocument& document);
// The PSCM of a document with exogenous PMFs; throws InvalidConfig otherwise.
ProbabilisticSCM document_pscm(const ModelDocument& document);

// Credal networks: one entry per node with either "cpt" or "ccpt" (a
// constraint system in the identification format).
std::string serialize_network(const CredalNetwork& network);
CredalNetwork parse_network(std::string_view text);

// Reads a whole file; throws ParseError when it cannot be read.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace credal
