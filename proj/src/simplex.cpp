#include "credal/simplex.hpp"

#include <cmath>
#include <limits>

#include "credal/errors.hpp"

namespace credal {

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_(rows, cols + 1), basis_(rows, 0) {}

  double& at(std::size_t i, std::size_t j) { return t_(i, j); }
  double rhs(std::size_t i) const { return t_(i, n_); }
  double& rhs(std::size_t i) { return t_(i, n_); }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const double inv = 1.0 / t_(r, c);
    for (std::size_t j = 0; j <= n_; ++j) t_(r, j) *= inv;
    t_(r, c) = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) {
        double v = t_(i, j) - f * t_(r, j);
        t_(i, j) = std::abs(v) < 1e-14 ? 0.0 : v;
      }
      t_(i, c) = 0.0;
    }
    basis_[r] = c;
  }

  // Minimizes cost over the columns for which `allowed` is true.
  // Returns false when unbounded.
  bool optimize(const std::vector<double>& cost, const std::vector<char>& allowed, const SimplexOptions& opt,
                int& iterations) {
    int degenerate_run = 0;
    bool bland = false;
    std::vector<double> reduced(n_);
    while (true) {
      if (++iterations > opt.max_iterations) fail(ErrorCode::Infeasible, "simplex iteration limit reached");
      for (std::size_t j = 0; j < n_; ++j) {
        double z = cost[j];
        for (std::size_t i = 0; i < m_; ++i) z -= cost[basis_[i]] * t_(i, j);
        reduced[j] = z;
      }
      std::size_t enter = n_;
      double best = -opt.pivot_tolerance;
      for (std::size_t j = 0; j < n_; ++j) {
        if (!allowed[j] || reduced[j] >= -opt.pivot_tolerance) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (reduced[j] < best) {
          best = reduced[j];
          enter = j;
        }
      }
      if (enter == n_) return true;

      std::size_t leave = m_;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = t_(i, enter);
        if (a <= opt.pivot_tolerance) continue;
        const double r = rhs(i) / a;
        if (r < ratio - 1e-12 || (std::abs(r - ratio) <= 1e-12 && leave < m_ && basis_[i] < basis_[leave])) {
          ratio = r;
          leave = i;
        }
      }
      if (leave == m_) return false;
      degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;
      if (degenerate_run > 50) bland = true;
      pivot(leave, enter);
    }
  }

 private:
  std::size_t m_;
  std::size_t n_;
  Matrix t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options) {
  const std::size_t m = problem.a.rows();
  const std::size_t n = problem.objective.size();
  if (problem.a.cols() != n || problem.relations.size() != m || problem.b.size() != m)
    fail(ErrorCode::DimensionMismatch, "inconsistent LP dimensions");

  // Normalize rows to a nonnegative right-hand side.
  std::vector<Relation> rel = problem.relations;
  std::vector<double> sign(m, 1.0);
  std::size_t slack_count = 0;
  std::size_t artificial_count = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (problem.b[i] < 0.0) {
      sign[i] = -1.0;
      if (rel[i] == Relation::less_equal) rel[i] = Relation::greater_equal;
      else if (rel[i] == Relation::greater_equal) rel[i] = Relation::less_equal;
    }
    if (rel[i] != Relation::equal) ++slack_count;
    if (rel[i] != Relation::less_equal) ++artificial_count;
  }

  const std::size_t total = n + slack_count + artificial_count;
  Tableau tab(m, total);
  std::size_t next_slack = n;
  std::size_t next_art = n + slack_count;
  std::vector<char> is_artificial(total, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = sign[i] * problem.a(i, j);
    tab.rhs(i) = sign[i] * problem.b[i];
    if (rel[i] == Relation::less_equal) {
      tab.at(i, next_slack) = 1.0;
      tab.basis()[i] = next_slack++;
    } else {
      if (rel[i] == Relation::greater_equal) tab.at(i, next_slack++) = -1.0;
      tab.at(i, next_art) = 1.0;
      is_artificial[next_art] = 1;
      tab.basis()[i] = next_art++;
    }
  }

  LpSolution sol;
  std::vector<char> allowed(total, 1);
  if (artificial_count > 0) {
    std::vector<double> cost(total, 0.0);
    for (std::size_t j = 0; j < total; ++j) cost[j] = is_artificial[j] ? 1.0 : 0.0;
    tab.optimize(cost, allowed, options, sol.iterations);
    double residual = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (is_artificial[tab.basis()[i]]) residual += tab.rhs(i);
    sol.phase_one_residual = residual;
    if (residual > options.feasibility_tolerance) {
      sol.status = LpStatus::infeasible;
      return sol;
    }
    // Drive remaining artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_artificial[tab.basis()[i]]) continue;
      for (std::size_t j = 0; j < total; ++j) {
        if (!is_artificial[j] && std::abs(tab.at(i, j)) > options.pivot_tolerance) {
          tab.pivot(i, j);
          break;
        }
      }
    }
    for (std::size_t j = 0; j < total; ++j)
      if (is_artificial[j]) allowed[j] = 0;
  }

  std::vector<double> cost(total, 0.0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = problem.objective[j];
  if (!tab.optimize(cost, allowed, options, sol.iterations)) {
    sol.status = LpStatus::unbounded;
    return sol;
  }
  sol.status = LpStatus::optimal;
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t b = tab.basis()[i];
    if (b < n) sol.x[b] = std::max(0.0, tab.rhs(i));
  }
  sol.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.value += problem.objective[j] * sol.x[j];
  return sol;
}

}  // namespace credal
