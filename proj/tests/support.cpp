#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "credal/empirical.hpp"
#include "credal/errors.hpp"
#include "credal/simplex.hpp"

#ifndef CREDAL_MODELS_DIR
#define CREDAL_MODELS_DIR "models"
#endif

namespace testing {

using namespace credal;

std::string model_path(const std::string& name) { return std::string(CREDAL_MODELS_DIR) + "/" + name; }

std::optional<ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const CredalError& e) {
    return e.code();
  }
  return std::nullopt;
}

std::vector<double> dirichlet(Rng& rng, std::size_t n) {
  std::gamma_distribution<double> g(1.0, 1.0);
  std::vector<double> p(n);
  double total = 0.0;
  for (double& x : p) total += (x = g(rng) + 1e-3);
  for (double& x : p) x /= total;
  return p;
}

ProbabilisticSCM random_pscm(Rng& rng, const RandomModelOptions& o) {
  std::uniform_int_distribution<int> size_dist(o.min_endogenous, o.max_endogenous);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const int n = size_dist(rng);
    std::vector<std::vector<int>> endo_parents(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j)
        if (static_cast<int>(endo_parents[i].size()) < o.max_endogenous_parents && unit(rng) < 0.45)
          endo_parents[i].push_back(j);

    std::vector<std::vector<int>> groups;
    for (int i = 0; i < n; ++i) {
      if (!o.markovian && !groups.empty() && static_cast<int>(groups.back().size()) < o.max_group && unit(rng) < 0.5)
        groups.back().push_back(i);
      else
        groups.push_back({i});
    }

    std::vector<Variable> vars;
    for (int i = 0; i < n; ++i) vars.push_back({"X" + std::to_string(i + 1), VariableKind::endogenous, 2});
    std::vector<int> group_of(static_cast<std::size_t>(n));
    std::vector<int> exo_card;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const int lo = std::max(1 << groups[g].size(), o.min_exogenous_cardinality);
      const int hi = std::max(lo, o.max_exogenous_cardinality);
      exo_card.push_back(std::uniform_int_distribution<int>(lo, hi)(rng));
      vars.push_back({"U" + std::to_string(g + 1), VariableKind::exogenous, exo_card.back()});
      for (int i : groups[g]) group_of[static_cast<std::size_t>(i)] = static_cast<int>(g);
    }

    std::vector<StructuralEquation> eqs;
    for (int i = 0; i < n; ++i) {
      const int g = group_of[static_cast<std::size_t>(i)];
      StructuralEquation e;
      e.child = vars[static_cast<std::size_t>(i)].id;
      e.parents.push_back("U" + std::to_string(g + 1));
      for (int p : endo_parents[static_cast<std::size_t>(i)]) e.parents.push_back(vars[static_cast<std::size_t>(p)].id);
      const std::size_t rows = std::size_t{1} << endo_parents[static_cast<std::size_t>(i)].size();
      const int card = exo_card[static_cast<std::size_t>(g)];
      e.table.assign(static_cast<std::size_t>(card) * rows, 0);
      for (std::size_t r = 0; r < rows; ++r) {
        // every endogenous-parent row reaches both states
        std::vector<int> column(static_cast<std::size_t>(card));
        for (int& v : column) v = static_cast<int>(rng() & 1);
        std::vector<int> us(static_cast<std::size_t>(card));
        std::iota(us.begin(), us.end(), 0);
        std::shuffle(us.begin(), us.end(), rng);
        column[static_cast<std::size_t>(us[0])] = 0;
        column[static_cast<std::size_t>(us[1])] = 1;
        for (int u = 0; u < card; ++u) e.table[static_cast<std::size_t>(u) * rows + r] = column[static_cast<std::size_t>(u)];
      }
      eqs.push_back(std::move(e));
    }

    try {
      CausalModel model(vars, eqs);
      validate_model(model);
      std::vector<std::vector<double>> pmfs;
      for (int c : exo_card) pmfs.push_back(dirichlet(rng, static_cast<std::size_t>(c)));
      const auto joint = brute_joint(model, pmfs);
      if (*std::min_element(joint.begin(), joint.end()) <= 1e-6) continue;
      return ProbabilisticSCM(std::move(model), std::move(pmfs));
    } catch (const CredalError&) {
      continue;
    }
  }
  throw std::runtime_error("random_pscm: no positive model found");
}

std::vector<int> solve_world(const CausalModel& model, const std::vector<int>& exogenous_states,
                             const std::map<int, int>& forced) {
  Assignment state(model.size(), -1);
  const auto& exo = model.exogenous();
  for (std::size_t k = 0; k < exo.size(); ++k) state[static_cast<std::size_t>(exo[k])] = exogenous_states[k];
  for (const auto& [v, s] : forced) state[static_cast<std::size_t>(v)] = s;
  bool progress = true;
  while (progress) {
    progress = false;
    for (int x : model.endogenous()) {
      if (state[static_cast<std::size_t>(x)] >= 0) continue;
      const ResolvedEquation* eq = model.equation_of(x);
      const bool ready = std::all_of(eq->parents.begin(), eq->parents.end(),
                                     [&](int p) { return state[static_cast<std::size_t>(p)] >= 0; });
      if (!ready) continue;
      std::size_t row = 0;
      for (int p : eq->parents) row = row * static_cast<std::size_t>(model.cardinality(p)) + static_cast<std::size_t>(state[static_cast<std::size_t>(p)]);
      state[static_cast<std::size_t>(x)] = eq->table[row];
      progress = true;
    }
  }
  return state;
}

namespace {

// Calls f(exogenous_states, weight) for every exogenous joint state.
template <class F>
void for_each_exogenous(const CausalModel& model, const std::vector<std::vector<double>>& pmfs, F&& f) {
  std::vector<int> cards;
  for (int u : model.exogenous()) cards.push_back(model.cardinality(u));
  std::vector<int> us(cards.size(), 0);
  do {
    double w = 1.0;
    for (std::size_t k = 0; k < us.size(); ++k) w *= pmfs[k][static_cast<std::size_t>(us[k])];
    if (w > 0.0) f(us, w);
  } while (next_configuration(us, cards));
}

bool matches(const CausalModel& model, const std::vector<int>& world, const StateMap& m) {
  for (const auto& [id, s] : m)
    if (world[static_cast<std::size_t>(model.index_of(id))] != s) return false;
  return true;
}

std::map<int, int> to_indices(const CausalModel& model, const StateMap& m) {
  std::map<int, int> out;
  for (const auto& [id, s] : m) out[model.index_of(id)] = s;
  return out;
}

}  // namespace

std::vector<double> brute_joint(const CausalModel& model, const std::vector<std::vector<double>>& pmfs) {
  std::vector<int> cards;
  for (int x : model.endogenous()) cards.push_back(model.cardinality(x));
  std::vector<double> joint(state_space_size(cards), 0.0);
  for_each_exogenous(model, pmfs, [&](const std::vector<int>& us, double w) {
    const auto world = solve_world(model, us);
    std::size_t idx = 0;
    for (int x : model.endogenous()) idx = idx * static_cast<std::size_t>(model.cardinality(x)) + static_cast<std::size_t>(world[static_cast<std::size_t>(x)]);
    joint[idx] += w;
  });
  return joint;
}

std::optional<double> brute_query(const CausalModel& model, const std::vector<std::vector<double>>& pmfs,
                                  const StateMap& interventions, const StateMap& evidence, const std::string& target,
                                  int state) {
  const auto forced = to_indices(model, interventions);
  const int t = model.index_of(target);
  double num = 0.0, den = 0.0;
  for_each_exogenous(model, pmfs, [&](const std::vector<int>& us, double w) {
    const auto world = solve_world(model, us, forced);
    if (!matches(model, world, evidence)) return;
    den += w;
    if (world[static_cast<std::size_t>(t)] == state) num += w;
  });
  if (den <= 1e-12) return std::nullopt;
  return num / den;
}

std::optional<double> brute_counterfactual(const CausalModel& model, const std::vector<std::vector<double>>& pmfs,
                                           const StateMap& observed, const StateMap& hypothetical,
                                           const std::string& target, int state) {
  const auto forced = to_indices(model, hypothetical);
  const int t = model.index_of(target);
  double num = 0.0, den = 0.0;
  for_each_exogenous(model, pmfs, [&](const std::vector<int>& us, double w) {
    const auto factual = solve_world(model, us);
    if (!matches(model, factual, observed)) return;
    den += w;
    const auto alternative = solve_world(model, us, forced);
    if (alternative[static_cast<std::size_t>(t)] == state) num += w;
  });
  if (den <= 1e-12) return std::nullopt;
  return num / den;
}

std::vector<std::vector<double>> lp_extreme_points(const LinearConstraintSystem& system, Rng& rng, int directions) {
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
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> points;
  for (int d = 0; d < directions; ++d) {
    lp.objective.assign(n, 0.0);
    for (double& c : lp.objective) c = normal(rng);
    const LpSolution s = solve_lp(lp);
    if (s.status != LpStatus::optimal) continue;
    std::vector<double> x(s.x.begin(), s.x.begin() + static_cast<std::ptrdiff_t>(n));
    const bool seen = std::any_of(points.begin(), points.end(), [&](const auto& p) { return same_point(p, x, 1e-7); });
    if (!seen) points.push_back(std::move(x));
  }
  return points;
}

std::vector<double> convex_sample(const std::vector<std::vector<double>>& points, Rng& rng) {
  const auto w = dirichlet(rng, points.size());
  std::vector<double> p(points.front().size(), 0.0);
  for (std::size_t k = 0; k < points.size(); ++k)
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += w[k] * points[k][i];
  return p;
}

bool same_point(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

bool same_point_set(const std::vector<std::vector<double>>& actual, const std::vector<std::vector<double>>& expected,
                    double tol) {
  auto covered = [&](const auto& from, const auto& in) {
    return std::all_of(from.begin(), from.end(), [&](const auto& p) {
      return std::any_of(in.begin(), in.end(), [&](const auto& q) { return same_point(p, q, tol); });
    });
  };
  return covered(actual, expected) && covered(expected, actual);
}

}  // namespace testing
