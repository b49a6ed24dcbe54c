#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace credal {

enum class VariableKind { endogenous, exogenous };

struct Variable {
  std::string id;
  VariableKind kind = VariableKind::endogenous;
  int cardinality = 1;

  bool operator==(const Variable&) const = default;
};

// Deterministic map from the parent states to the child state. `table` is
// row-major over `parents` in declared order (the first parent varies slowest).
struct StructuralEquation {
  std::string child;
  std::vector<std::string> parents;
  std::vector<int> table;

  bool operator==(const StructuralEquation&) const = default;
};

// States of every model variable, indexed by variable index.
using Assignment = std::vector<int>;

enum class ModelClass { markovian, quasi_markovian };

std::string_view to_string(ModelClass c);

// A structural equation with parents resolved to variable indices.
struct ResolvedEquation {
  int child = -1;
  std::vector<int> parents;
  std::vector<std::size_t> strides;      // row-major strides of `parents`
  std::vector<int> exogenous_parents;    // positions of exogenous ids in `parents`
  std::vector<int> endogenous_parents;   // variable indices, declared order
  std::vector<int> table;

  std::size_t row_count() const { return table.size(); }
};

// Variables plus one structural equation per endogenous variable. Construction
// checks shape only (ids, table sizes, state ranges); causal-class invariants
// are checked by validate_model().
class CausalModel {
 public:
  CausalModel() = default;
  CausalModel(std::vector<Variable> variables, std::vector<StructuralEquation> equations);

  std::size_t size() const { return variables_.size(); }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<StructuralEquation>& equations() const { return equations_; }
  const Variable& variable(int index) const { return variables_[static_cast<std::size_t>(index)]; }
  int cardinality(int index) const { return variable(index).cardinality; }
  bool is_exogenous(int index) const { return variable(index).kind == VariableKind::exogenous; }

  std::optional<int> find(std::string_view id) const;
  // Throws InvalidModel for unknown ids.
  int index_of(std::string_view id) const;

  const std::vector<int>& endogenous() const { return endogenous_; }
  const std::vector<int>& exogenous() const { return exogenous_; }

  // nullptr when the variable has no equation.
  const ResolvedEquation* equation_of(int variable) const;

  // Exogenous parent of an endogenous variable (first one if several).
  int exogenous_parent(int endogenous_variable) const;
  // Endogenous children of any variable, in declaration order.
  std::vector<int> children(int variable) const;

  // Child state produced by the equation of `child` under a full assignment.
  int evaluate(int child, const Assignment& state) const;

 private:
  std::vector<Variable> variables_;
  std::vector<StructuralEquation> equations_;
  std::vector<ResolvedEquation> resolved_;
  std::vector<int> equation_index_;
  std::vector<int> endogenous_;
  std::vector<int> exogenous_;
  std::unordered_map<std::string, int> index_;
};

// Rejects models outside the quasi-Markovian class and non-surjective
// equations; otherwise reports whether every confounder has a single child.
ModelClass validate_model(const CausalModel& model);

// Endogenous variables with parents first; ties broken by declaration order.
std::vector<int> topological_order(const CausalModel& model);
std::vector<std::string> topological_order_ids(const CausalModel& model);

// `exogenous_states` is aligned with model.exogenous(). Returns the full
// assignment (exogenous entries copied through).
Assignment eval_equations(const CausalModel& model, std::span<const int> exogenous_states);

// {u : f_X(u, pa) = x}. `endogenous_parent_states` follows the declared order
// of the endogenous parents of X.
std::vector<int> restricted_inverse(const CausalModel& model, int variable,
                                    std::span<const int> endogenous_parent_states, int state);

// Endogenous variables whose equation, restricted to some endogenous-parent
// configuration, does not reach every child state. Informational only.
std::vector<std::string> non_surjective_restrictions(const CausalModel& model);

// Degenerate CPT of an equation: entry [row * card + state] is 1 when the
// equation maps parent row `row` to `state`.
std::vector<double> equation_cpt(const CausalModel& model, int variable);

inline constexpr std::uint64_t kDefaultCanonicalCap = 1u << 20;

struct CanonicalEquation {
  int exogenous_cardinality = 0;
  StructuralEquation equation;
};

// Exogenous variable enumerating every deterministic map from the endogenous
// parents to the child. The parents of the returned equation are
// [exogenous, endogenous...]. Writing u in base `child_cardinality`, digit j
// (least significant first) is the child state for endogenous-parent row j.
CanonicalEquation canonical_equation(const std::string& child, int child_cardinality,
                                     const std::string& exogenous,
                                     const std::vector<std::pair<std::string, int>>& endogenous_parents,
                                     std::uint64_t cap = kDefaultCanonicalCap);

// Function table (child state per endogenous-parent row) encoded by a
// canonical exogenous state.
std::vector<int> decode_canonical_state(std::uint64_t u, int child_cardinality, std::size_t rows);

class EmpiricalDistribution;

// A causal model paired with one PMF per exogenous variable (aligned with
// model.exogenous()).
class ProbabilisticSCM {
 public:
  ProbabilisticSCM(CausalModel model, std::vector<std::vector<double>> exogenous_pmfs);

  const CausalModel& model() const { return model_; }
  const std::vector<std::vector<double>>& exogenous_pmfs() const { return pmfs_; }
  const std::vector<double>& pmf_of(int exogenous_variable) const;

 private:
  CausalModel model_;
  std::vector<std::vector<double>> pmfs_;
};

// Joint endogenous PMF obtained by pushing the exogenous PMFs through the
// equations. Enumerates the exogenous joint space.
EmpiricalDistribution induced_joint(const ProbabilisticSCM& pscm);

}  // namespace credal
