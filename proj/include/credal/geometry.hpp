#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "credal/constraints.hpp"
#include "credal/dense.hpp"

namespace credal {

enum class Direction { minimize, maximize };

struct LpResult {
  double value = 0.0;
  std::vector<double> argument;
};

// Optimizes objective·p over {p : constraints, p >= 0, sum p = 1}.
// Throws Infeasible, or Unbounded (which cannot happen on a simplex).
LpResult lp_optimize(const LinearConstraintSystem& system, std::span<const double> objective, Direction direction);

// Phase-one test; `residual` receives the phase-one objective.
bool is_feasible(const LinearConstraintSystem& system, double* residual = nullptr);

struct VertexOptions {
  std::size_t max_vertices = 100000;
  std::uint64_t max_bases = 50'000'000;
  double feasibility_tolerance = 1e-9;
  double dedup_tolerance = 1e-7;
};

struct VertexSet {
  std::vector<std::vector<double>> vertices;  // sorted lexicographically
  double dedup_tolerance = 1e-7;
  std::uint64_t bases_examined = 0;
};

// Extreme points by basic-solution enumeration. Inequalities get slack
// columns; the equality system (with sum-to-one) is rank-reduced first, then
// every choice of rank-many columns is solved and kept when nonnegative.
// Output is independent of the number of threads.
VertexSet vertex_enumeration(const LinearConstraintSystem& system, const VertexOptions& options = {});
// Single-threaded reference for the same enumeration.
VertexSet vertex_enumeration_serial(const LinearConstraintSystem& system, const VertexOptions& options = {});

// A point of the polytope: Dirichlet(1) combination of the vertices, or the
// optimum of a random objective when the vertices are too many.
std::vector<double> sample_point(const LinearConstraintSystem& system, std::uint64_t seed,
                                 const VertexOptions& options = {});

class Polytope;
std::vector<double> sample_point(const Polytope& polytope, std::uint64_t seed);

// coefficients·p + constant
struct AffineForm {
  std::vector<double> coefficients;
  double constant = 0.0;

  double operator()(std::span<const double> p) const;
};

// Optimizes numerator/denominator by the Charnes-Cooper substitution
// y = t p, t = 1/denominator. Throws DenominatorVanishes when the denominator
// reaches 1e-12 or less somewhere on the polytope.
LpResult linear_fractional_optimize(const LinearConstraintSystem& system, const AffineForm& numerator,
                                    const AffineForm& denominator, Direction direction);

// Polytope over one constraint system, with the reduced equality basis
// computed eagerly and the vertex list computed once on first use. Copies
// share the cache.
class Polytope {
 public:
  explicit Polytope(LinearConstraintSystem system, VertexOptions options = {});

  const LinearConstraintSystem& system() const { return system_; }
  const RowEchelon& reduced_equalities() const { return reduced_; }
  std::size_t dimension() const { return system_.dimension(); }
  bool empty() const { return empty_; }

  // Thread-safe; rethrows the enumeration error on every call if it failed.
  const VertexSet& vertices() const;

 private:
  struct Cache {
    std::once_flag once;
    VertexSet vertices;
    std::exception_ptr error;
  };

  LinearConstraintSystem system_;
  VertexOptions options_;
  RowEchelon reduced_;
  bool empty_ = false;
  std::shared_ptr<Cache> cache_;
};

}  // namespace credal
