#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "credal/constraints.hpp"
#include "credal/empirical.hpp"
#include "credal/scm.hpp"

namespace credal {

struct SystemDiagnostics {
  std::size_t constraint_count = 0;
  std::size_t rank = 0;  // of equalities plus sum-to-one
  bool feasible = true;
  double phase_one_residual = 0.0;
};

// One credal set per exogenous variable, aligned with model.exogenous().
struct IdentificationResult {
  std::vector<std::string> exogenous;
  std::vector<LinearConstraintSystem> systems;
  std::vector<SystemDiagnostics> diagnostics;

  // Throws MismatchedIdentification for an unknown id.
  const LinearConstraintSystem& system_of(std::string_view id) const;
  LinearConstraintSystem& system_of(std::string_view id);
};

// Per endogenous X and endogenous-parent row pa:
//   sum over f^-1_{X|pa}(x) of P(u) = P~(x | pa)   for every x.
// Rows are ordered with x outer and pa inner.
IdentificationResult identify_markovian(const CausalModel& model, const MarginalSource& empirical);
IdentificationResult identify_markovian(const CausalModel& model, const EmpiricalDistribution& empirical);

// Per exogenous U with children X^1..X^n in topological order: one row per
// child-state tuple (outer) and free endogenous-parent configuration (inner).
// A child that is also a parent of a later child takes its state from the
// child tuple. The right-hand side is the chained product of empirical
// conditionals. Requires only the conditioning events that are reached to
// have positive probability (ZeroConditioningEvent otherwise).
IdentificationResult identify_quasi_markovian(const CausalModel& model, const MarginalSource& empirical);
IdentificationResult identify_quasi_markovian(const CausalModel& model, const EmpiricalDistribution& empirical);

// Recomputes the diagnostics of every system; throws
// InfeasibleIdentification if one is empty.
void finalize_identification(IdentificationResult& result);

// Validates the model and dispatches on its class.
IdentificationResult identify(const CausalModel& model, const MarginalSource& source);
IdentificationResult identify(const CausalModel& model, const EmpiricalDistribution& empirical);

// Union of constraints; throws InfeasibleIdentification if the result is empty.
LinearConstraintSystem add_constraints(LinearConstraintSystem system, std::span<const LinearConstraint> extra);

struct ExpertConstraint {
  std::string exogenous;
  LinearConstraint constraint;

  bool operator==(const ExpertConstraint&) const = default;
};

IdentificationResult add_expert_constraints(IdentificationResult result, std::span<const ExpertConstraint> extra);

// Singleton credal sets pinning each exogenous PMF of a PSCM.
IdentificationResult precise_identification(const ProbabilisticSCM& pscm);

struct VerificationReport {
  std::size_t samples = 0;
  double max_deviation = 0.0;  // L-infinity between induced and empirical joints
  std::optional<double> ground_truth_violation;
  bool ground_truth_member = true;
};

// Samples points of every K(U), pushes them through the equations and
// measures the distance to the empirical joint. Reports, never throws on
// mismatch.
VerificationReport verify_identification(const CausalModel& model, const EmpiricalDistribution& empirical,
                                         const IdentificationResult& result, std::size_t samples,
                                         std::uint64_t seed = 0,
                                         const std::vector<std::vector<double>>* ground_truth = nullptr);

// Largest absolute difference between two joints over the same variables,
// aligning their variable orders through the model.
double joint_distance(const CausalModel& model, const EmpiricalDistribution& a, const EmpiricalDistribution& b);

}  // namespace credal
