#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "credal/dense.hpp"

namespace credal {

enum class Relation { equal, less_equal, greater_equal };

std::string_view to_string(Relation r);
Relation parse_relation(std::string_view text);

struct LinearConstraint {
  std::vector<double> coefficients;
  Relation relation = Relation::equal;
  double rhs = 0.0;
  std::string label;  // optional, e.g. the configuration that produced it

  bool operator==(const LinearConstraint&) const = default;
};

// A credal set over one exogenous PMF in H-representation. Nonnegativity and
// sum-to-one are implicit and never stored.
class LinearConstraintSystem {
 public:
  LinearConstraintSystem() = default;
  explicit LinearConstraintSystem(std::size_t dimension) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }
  const std::vector<LinearConstraint>& equalities() const { return equalities_; }
  const std::vector<LinearConstraint>& inequalities() const { return inequalities_; }
  std::size_t constraint_count() const { return equalities_.size() + inequalities_.size(); }

  // Throws DimensionMismatch on a wrong-length vector, InvalidConfig on a
  // non-finite right-hand side.
  void add(LinearConstraint c);
  void add_equality(std::vector<double> coefficients, double rhs, std::string label = {});
  void add_inequality(std::vector<double> coefficients, Relation relation, double rhs, std::string label = {});

  // Largest violation over all constraints including the simplex.
  double max_violation(std::span<const double> p) const;
  bool contains(std::span<const double> p, double tolerance = 1e-8) const;

  // Equalities plus the sum-to-one row, row-reduced.
  RowEchelon reduced_equalities() const;

  bool operator==(const LinearConstraintSystem&) const = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<LinearConstraint> equalities_;
  std::vector<LinearConstraint> inequalities_;
};

}  // namespace credal
