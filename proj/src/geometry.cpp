#include "credal/geometry.hpp"

#include <cmath>
#include <random>

#include "credal/errors.hpp"
#include "credal/simplex.hpp"

namespace credal {

namespace {

// Constraint rows plus sum-to-one, in the LP's own column space.
LpProblem base_problem(const LinearConstraintSystem& system) {
  const std::size_t n = system.dimension();
  LpProblem lp;
  lp.a = Matrix(0, n);
  for (const auto& c : system.equalities()) {
    lp.a.append_row(c.coefficients);
    lp.relations.push_back(Relation::equal);
    lp.b.push_back(c.rhs);
  }
  for (const auto& c : system.inequalities()) {
    lp.a.append_row(c.coefficients);
    lp.relations.push_back(c.relation);
    lp.b.push_back(c.rhs);
  }
  lp.a.append_row(std::vector<double>(n, 1.0));
  lp.relations.push_back(Relation::equal);
  lp.b.push_back(1.0);
  lp.objective.assign(n, 0.0);
  return lp;
}

}  // namespace

LpResult lp_optimize(const LinearConstraintSystem& system, std::span<const double> objective, Direction direction) {
  const std::size_t n = system.dimension();
  if (objective.size() != n) fail(ErrorCode::DimensionMismatch, "objective length differs from system dimension");
  LpProblem lp = base_problem(system);
  const double sign = direction == Direction::maximize ? -1.0 : 1.0;
  for (std::size_t j = 0; j < n; ++j) lp.objective[j] = sign * objective[j];
  LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::infeasible) fail(ErrorCode::Infeasible, "constraint system is infeasible");
  if (sol.status == LpStatus::unbounded) fail(ErrorCode::Unbounded, "LP unbounded over a simplex");
  LpResult out;
  out.argument = std::move(sol.x);
  out.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) out.value += objective[j] * out.argument[j];
  return out;
}

bool is_feasible(const LinearConstraintSystem& system, double* residual) {
  LpSolution sol = solve_lp(base_problem(system));
  if (residual) *residual = sol.phase_one_residual;
  return sol.status != LpStatus::infeasible;
}

std::vector<double> sample_point(const LinearConstraintSystem& system, std::uint64_t seed,
                                 const VertexOptions& options) {
  std::mt19937_64 rng(seed);
  VertexSet vs;
  bool enumerable = true;
  try {
    vs = vertex_enumeration(system, options);
  } catch (const CredalError& e) {
    if (e.code() != ErrorCode::VertexExplosion) throw;
    enumerable = false;
  }
  const std::size_t n = system.dimension();
  if (!enumerable) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> objective(n);
    for (double& c : objective) c = unit(rng);
    return lp_optimize(system, objective, Direction::maximize).argument;
  }
  std::exponential_distribution<double> gamma1(1.0);
  std::vector<double> weights(vs.vertices.size());
  double total = 0.0;
  for (double& w : weights) total += (w = gamma1(rng));
  std::vector<double> point(n, 0.0);
  for (std::size_t v = 0; v < weights.size(); ++v)
    for (std::size_t j = 0; j < n; ++j) point[j] += weights[v] / total * vs.vertices[v][j];
  return point;
}

std::vector<double> sample_point(const Polytope& polytope, std::uint64_t seed) {
  const VertexSet* vs = nullptr;
  try {
    vs = &polytope.vertices();
  } catch (const CredalError& e) {
    if (e.code() != ErrorCode::VertexExplosion) throw;
    return sample_point(polytope.system(), seed);
  }
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gamma1(1.0);
  std::vector<double> point(polytope.dimension(), 0.0);
  std::vector<double> weights(vs->vertices.size());
  double total = 0.0;
  for (double& w : weights) total += (w = gamma1(rng));
  for (std::size_t v = 0; v < weights.size(); ++v)
    for (std::size_t j = 0; j < point.size(); ++j) point[j] += weights[v] / total * vs->vertices[v][j];
  return point;
}

double AffineForm::operator()(std::span<const double> p) const {
  double s = constant;
  for (std::size_t j = 0; j < coefficients.size(); ++j) s += coefficients[j] * p[j];
  return s;
}

LpResult linear_fractional_optimize(const LinearConstraintSystem& system, const AffineForm& numerator,
                                    const AffineForm& denominator, Direction direction) {
  const std::size_t n = system.dimension();
  if (numerator.coefficients.size() != n || denominator.coefficients.size() != n)
    fail(ErrorCode::DimensionMismatch, "affine form length differs from system dimension");

  // On the simplex the constants fold into the linear parts.
  std::vector<double> num(n), den(n);
  for (std::size_t j = 0; j < n; ++j) {
    num[j] = numerator.coefficients[j] + numerator.constant;
    den[j] = denominator.coefficients[j] + denominator.constant;
  }
  const double den_min = lp_optimize(system, den, Direction::minimize).value;
  if (den_min <= 1e-12) fail(ErrorCode::DenominatorVanishes, "denominator reaches zero on the polytope");

  // Columns y_0..y_{n-1}, t.
  LpProblem lp;
  lp.a = Matrix(0, n + 1);
  std::vector<double> row(n + 1);
  auto push = [&](Relation rel, double rhs) {
    lp.a.append_row(row);
    lp.relations.push_back(rel);
    lp.b.push_back(rhs);
  };
  for (const auto& c : system.equalities()) {
    std::copy(c.coefficients.begin(), c.coefficients.end(), row.begin());
    row[n] = -c.rhs;
    push(Relation::equal, 0.0);
  }
  for (const auto& c : system.inequalities()) {
    std::copy(c.coefficients.begin(), c.coefficients.end(), row.begin());
    row[n] = -c.rhs;
    push(c.relation, 0.0);
  }
  std::fill(row.begin(), row.end(), 1.0);
  row[n] = -1.0;
  push(Relation::equal, 0.0);
  std::copy(den.begin(), den.end(), row.begin());
  row[n] = 0.0;
  push(Relation::equal, 1.0);

  const double sign = direction == Direction::maximize ? -1.0 : 1.0;
  lp.objective.assign(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) lp.objective[j] = sign * num[j];
  LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::infeasible) fail(ErrorCode::Infeasible, "constraint system is infeasible");
  if (sol.status == LpStatus::unbounded) fail(ErrorCode::Unbounded, "linear-fractional program unbounded");

  const double t = sol.x[n];
  if (!(t > 0.0)) fail(ErrorCode::DenominatorVanishes, "degenerate Charnes-Cooper scale");
  LpResult out;
  out.argument.resize(n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) total += (out.argument[j] = sol.x[j] / t);
  for (double& v : out.argument) v /= total;
  double nv = 0.0, dv = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    nv += num[j] * out.argument[j];
    dv += den[j] * out.argument[j];
  }
  out.value = nv / dv;
  return out;
}

Polytope::Polytope(LinearConstraintSystem system, VertexOptions options)
    : system_(std::move(system)),
      options_(options),
      reduced_(system_.reduced_equalities()),
      cache_(std::make_shared<Cache>()) {
  empty_ = !reduced_.consistent || !is_feasible(system_);
}

const VertexSet& Polytope::vertices() const {
  Cache& c = *cache_;
  std::call_once(c.once, [&] {
    try {
      if (empty_) fail(ErrorCode::Infeasible, "empty polytope has no vertices");
      c.vertices = vertex_enumeration(system_, options_);
    } catch (...) {
      c.error = std::current_exception();
    }
  });
  if (c.error) std::rethrow_exception(c.error);
  return c.vertices;
}

}  // namespace credal
