#include "credal/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "credal/errors.hpp"

namespace credal {

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::equal: return "==";
    case Relation::less_equal: return "<=";
    case Relation::greater_equal: return ">=";
  }
  return "?";
}

Relation parse_relation(std::string_view text) {
  if (text == "==" || text == "=") return Relation::equal;
  if (text == "<=") return Relation::less_equal;
  if (text == ">=") return Relation::greater_equal;
  fail(ErrorCode::ParseError, "unknown relation '" + std::string(text) + "'");
}

void LinearConstraintSystem::add(LinearConstraint c) {
  if (c.coefficients.size() != dimension_)
    fail(ErrorCode::DimensionMismatch, "constraint has " + std::to_string(c.coefficients.size()) +
                                           " coefficients, system dimension is " + std::to_string(dimension_));
  if (!std::isfinite(c.rhs)) fail(ErrorCode::InvalidConfig, "constraint right-hand side is not finite");
  for (double v : c.coefficients)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidConfig, "constraint coefficient is not finite");
  (c.relation == Relation::equal ? equalities_ : inequalities_).push_back(std::move(c));
}

void LinearConstraintSystem::add_equality(std::vector<double> coefficients, double rhs, std::string label) {
  add({std::move(coefficients), Relation::equal, rhs, std::move(label)});
}

void LinearConstraintSystem::add_inequality(std::vector<double> coefficients, Relation relation, double rhs,
                                            std::string label) {
  add({std::move(coefficients), relation, rhs, std::move(label)});
}

double LinearConstraintSystem::max_violation(std::span<const double> p) const {
  if (p.size() != dimension_) fail(ErrorCode::DimensionMismatch, "point has wrong dimension");
  double worst = 0.0;
  double total = 0.0;
  for (double v : p) {
    worst = std::max(worst, -v);
    total += v;
  }
  worst = std::max(worst, std::abs(total - 1.0));
  auto lhs = [&](const LinearConstraint& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < dimension_; ++i) s += c.coefficients[i] * p[i];
    return s;
  };
  for (const auto& c : equalities_) worst = std::max(worst, std::abs(lhs(c) - c.rhs));
  for (const auto& c : inequalities_) {
    const double d = lhs(c) - c.rhs;
    worst = std::max(worst, c.relation == Relation::less_equal ? d : -d);
  }
  return worst;
}

bool LinearConstraintSystem::contains(std::span<const double> p, double tolerance) const {
  return max_violation(p) <= tolerance;
}

RowEchelon LinearConstraintSystem::reduced_equalities() const {
  Matrix a(0, dimension_);
  std::vector<double> b;
  for (const auto& c : equalities_) {
    a.append_row(c.coefficients);
    b.push_back(c.rhs);
  }
  a.append_row(std::vector<double>(dimension_, 1.0));
  b.push_back(1.0);
  return row_reduce(std::move(a), std::move(b));
}

}  // namespace credal
