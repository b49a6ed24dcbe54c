#pragma once

#include <cstddef>
#include <vector>

#include "credal/constraints.hpp"
#include "credal/dense.hpp"

namespace credal {

// minimize objective·x  s.t.  a x (relations) b,  x >= 0
struct LpProblem {
  std::vector<double> objective;
  Matrix a;
  std::vector<Relation> relations;
  std::vector<double> b;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  std::vector<double> x;
  double phase_one_residual = 0.0;
  int iterations = 0;
};

struct SimplexOptions {
  double pivot_tolerance = 1e-10;
  double feasibility_tolerance = 1e-7;  // phase-one objective above this means infeasible
  int max_iterations = 100000;
};

// Dense two-phase primal simplex. Dantzig pricing, switching to Bland's rule
// after a run of degenerate pivots so the method terminates.
LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options = {});

}  // namespace credal
