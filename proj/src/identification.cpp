#include "credal/identification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "credal/errors.hpp"
#include "credal/geometry.hpp"

namespace credal {

namespace {

std::string describe(const CausalModel& model, std::span<const int> vars, const Assignment& a) {
  std::ostringstream os;
  for (std::size_t i = 0; i < vars.size(); ++i)
    os << (i ? "," : "") << model.variable(vars[i]).id << "=" << a[static_cast<std::size_t>(vars[i])];
  return os.str();
}

// Table lookup for a marginal over `vars` at the states in `a`.
struct MarginalTable {
  std::vector<int> vars;
  std::vector<std::size_t> strides;
  std::vector<double> table;

  MarginalTable(const CausalModel& model, const MarginalSource& source, std::vector<int> variables)
      : vars(std::move(variables)) {
    std::vector<int> cards;
    for (int v : vars) cards.push_back(model.cardinality(v));
    strides = row_major_strides(cards);
    table = source.marginal(vars);
  }

  double at(const Assignment& a) const {
    std::size_t i = 0;
    for (std::size_t k = 0; k < vars.size(); ++k) i += static_cast<std::size_t>(a[static_cast<std::size_t>(vars[k])]) * strides[k];
    return table[i];
  }
};

void finalize(IdentificationResult& result) {
  result.diagnostics.clear();
  for (std::size_t i = 0; i < result.systems.size(); ++i) {
    const LinearConstraintSystem& s = result.systems[i];
    SystemDiagnostics d;
    d.constraint_count = s.constraint_count();
    const RowEchelon re = s.reduced_equalities();
    d.rank = re.pivots.size();
    d.feasible = re.consistent && is_feasible(s, &d.phase_one_residual);
    if (!d.feasible)
      fail(ErrorCode::InfeasibleIdentification,
           "no PMF of '" + result.exogenous[i] + "' is consistent with the empirical distribution");
    result.diagnostics.push_back(d);
  }
}

std::vector<int> topological_positions(const CausalModel& model) {
  std::vector<int> pos(model.size(), -1);
  const std::vector<int> order = topological_order(model);
  for (std::size_t k = 0; k < order.size(); ++k) pos[static_cast<std::size_t>(order[k])] = static_cast<int>(k);
  return pos;
}

}  // namespace

const LinearConstraintSystem& IdentificationResult::system_of(std::string_view id) const {
  for (std::size_t i = 0; i < exogenous.size(); ++i)
    if (exogenous[i] == id) return systems[i];
  fail(ErrorCode::MismatchedIdentification, "no credal set for '" + std::string(id) + "'");
}

LinearConstraintSystem& IdentificationResult::system_of(std::string_view id) {
  return const_cast<LinearConstraintSystem&>(std::as_const(*this).system_of(id));
}

IdentificationResult identify_markovian(const CausalModel& model, const MarginalSource& empirical) {
  if (validate_model(model) != ModelClass::markovian)
    fail(ErrorCode::NotMarkovian, "model has a confounder; use the quasi-Markovian identification");
  IdentificationResult result;
  for (int u : model.exogenous()) {
    const int x = model.children(u).front();
    const ResolvedEquation& eq = *model.equation_of(x);
    const int card = model.cardinality(x);
    std::vector<int> family = eq.endogenous_parents;
    family.push_back(x);
    const std::vector<double> joint = empirical.marginal(family);
    std::vector<int> pa_cards;
    for (int p : eq.endogenous_parents) pa_cards.push_back(model.cardinality(p));
    const std::size_t rows = state_space_size(pa_cards);

    LinearConstraintSystem system(static_cast<std::size_t>(model.cardinality(u)));
    Assignment a(model.size(), 0);
    for (int s = 0; s < card; ++s) {
      std::vector<int> pa(pa_cards.size(), 0);
      for (std::size_t row = 0; row < rows; ++row, next_configuration(pa, pa_cards)) {
        double den = 0.0;
        for (int t = 0; t < card; ++t) den += joint[row * static_cast<std::size_t>(card) + static_cast<std::size_t>(t)];
        for (std::size_t i = 0; i < pa.size(); ++i) a[static_cast<std::size_t>(eq.endogenous_parents[i])] = pa[i];
        if (!(den > 0.0))
          fail(ErrorCode::ZeroConditioningEvent,
               "empirical probability of (" + describe(model, eq.endogenous_parents, a) + ") is zero");
        const double rhs = joint[row * static_cast<std::size_t>(card) + static_cast<std::size_t>(s)] / den;
        std::vector<double> coef(static_cast<std::size_t>(model.cardinality(u)), 0.0);
        for (int v : restricted_inverse(model, x, pa, s)) coef[static_cast<std::size_t>(v)] = 1.0;
        std::string label = model.variable(x).id + "=" + std::to_string(s);
        if (!pa.empty()) label += " | " + describe(model, eq.endogenous_parents, a);
        system.add_equality(std::move(coef), rhs, std::move(label));
      }
    }
    result.exogenous.push_back(model.variable(u).id);
    result.systems.push_back(std::move(system));
  }
  finalize(result);
  return result;
}

IdentificationResult identify_markovian(const CausalModel& model, const EmpiricalDistribution& empirical) {
  return identify_markovian(model, EmpiricalMarginals(model, empirical));
}

IdentificationResult identify_quasi_markovian(const CausalModel& model, const MarginalSource& empirical) {
  try {
    validate_model(model);
  } catch (const CredalError& e) {
    if (e.code() == ErrorCode::MultipleExogenousParents) fail(ErrorCode::NotQuasiMarkovian, e.what());
    throw;
  }
  const std::vector<int> pos = topological_positions(model);
  auto by_position = [&](int a, int b) { return pos[static_cast<std::size_t>(a)] < pos[static_cast<std::size_t>(b)]; };
  auto sorted_unique = [&](std::vector<int> v) {
    std::sort(v.begin(), v.end(), by_position);
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };

  IdentificationResult result;
  for (int u : model.exogenous()) {
    std::vector<int> children = model.children(u);
    std::sort(children.begin(), children.end(), by_position);
    const std::size_t n = children.size();

    // V_k = {X^1..X^k} plus their parents; D_k = V_k without X^k.
    std::vector<MarginalTable> numer, denom;
    std::vector<int> scope;
    for (std::size_t k = 0; k < n; ++k) {
      const ResolvedEquation& eq = *model.equation_of(children[k]);
      scope.insert(scope.end(), eq.endogenous_parents.begin(), eq.endogenous_parents.end());
      scope.push_back(children[k]);
      scope = sorted_unique(scope);
      std::vector<int> d = scope;
      d.erase(std::find(d.begin(), d.end(), children[k]));
      numer.emplace_back(model, empirical, scope);
      denom.emplace_back(model, empirical, d);
    }
    std::vector<int> free;
    for (int v : scope)
      if (std::find(children.begin(), children.end(), v) == children.end()) free.push_back(v);

    std::vector<int> child_cards, free_cards;
    for (int c : children) child_cards.push_back(model.cardinality(c));
    for (int f : free) free_cards.push_back(model.cardinality(f));

    const int ucard = model.cardinality(u);
    LinearConstraintSystem system(static_cast<std::size_t>(ucard));
    Assignment a(model.size(), 0);
    std::vector<int> xs(n, 0);
    do {
      for (std::size_t k = 0; k < n; ++k) a[static_cast<std::size_t>(children[k])] = xs[k];
      std::vector<int> fs(free.size(), 0);
      do {
        for (std::size_t k = 0; k < free.size(); ++k) a[static_cast<std::size_t>(free[k])] = fs[k];
        double rhs = 1.0;
        for (std::size_t k = 0; k < n && rhs > 0.0; ++k) {
          const double den = denom[k].at(a);
          if (!(den > 0.0))
            fail(ErrorCode::ZeroConditioningEvent,
                 "empirical probability of (" + describe(model, denom[k].vars, a) + ") is zero");
          rhs *= numer[k].at(a) / den;
        }
        std::vector<double> coef(static_cast<std::size_t>(ucard), 0.0);
        for (int s = 0; s < ucard; ++s) {
          a[static_cast<std::size_t>(u)] = s;
          bool all = true;
          for (std::size_t k = 0; k < n && all; ++k) all = model.evaluate(children[k], a) == xs[k];
          if (all) coef[static_cast<std::size_t>(s)] = 1.0;
        }
        std::string label = describe(model, children, a);
        if (!free.empty()) label += " | " + describe(model, free, a);
        system.add_equality(std::move(coef), rhs, std::move(label));
      } while (next_configuration(fs, free_cards));
    } while (next_configuration(xs, child_cards));

    result.exogenous.push_back(model.variable(u).id);
    result.systems.push_back(std::move(system));
  }
  finalize(result);
  return result;
}

IdentificationResult identify_quasi_markovian(const CausalModel& model, const EmpiricalDistribution& empirical) {
  return identify_quasi_markovian(model, EmpiricalMarginals(model, empirical));
}

void finalize_identification(IdentificationResult& result) { finalize(result); }

IdentificationResult identify(const CausalModel& model, const MarginalSource& source) {
  if (validate_model(model) == ModelClass::markovian) return identify_markovian(model, source);
  return identify_quasi_markovian(model, source);
}

IdentificationResult identify(const CausalModel& model, const EmpiricalDistribution& empirical) {
  return identify(model, EmpiricalMarginals(model, empirical));
}

LinearConstraintSystem add_constraints(LinearConstraintSystem system, std::span<const LinearConstraint> extra) {
  for (const LinearConstraint& c : extra) system.add(c);
  if (!system.reduced_equalities().consistent || !is_feasible(system))
    fail(ErrorCode::InfeasibleIdentification, "added constraints leave an empty credal set");
  return system;
}

IdentificationResult add_expert_constraints(IdentificationResult result, std::span<const ExpertConstraint> extra) {
  for (std::size_t i = 0; i < result.systems.size(); ++i) {
    std::vector<LinearConstraint> mine;
    for (const ExpertConstraint& e : extra)
      if (e.exogenous == result.exogenous[i]) mine.push_back(e.constraint);
    if (!mine.empty()) result.systems[i] = add_constraints(std::move(result.systems[i]), mine);
  }
  for (const ExpertConstraint& e : extra) result.system_of(e.exogenous);  // unknown ids
  finalize(result);
  return result;
}

IdentificationResult precise_identification(const ProbabilisticSCM& pscm) {
  const CausalModel& model = pscm.model();
  IdentificationResult result;
  for (std::size_t i = 0; i < model.exogenous().size(); ++i) {
    const std::vector<double>& p = pscm.exogenous_pmfs()[i];
    LinearConstraintSystem system(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
      std::vector<double> e(p.size(), 0.0);
      e[j] = 1.0;
      system.add_equality(std::move(e), p[j]);
    }
    result.exogenous.push_back(model.variable(model.exogenous()[i]).id);
    result.systems.push_back(std::move(system));
  }
  finalize(result);
  return result;
}

double joint_distance(const CausalModel& model, const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  const EmpiricalMarginals mb(model, b);
  std::vector<int> vars;
  for (const std::string& id : a.variable_order()) vars.push_back(model.index_of(id));
  const std::vector<double> aligned = mb.marginal(vars);
  double worst = 0.0;
  for (std::size_t i = 0; i < aligned.size(); ++i) worst = std::max(worst, std::abs(aligned[i] - a[i]));
  return worst;
}

VerificationReport verify_identification(const CausalModel& model, const EmpiricalDistribution& empirical,
                                         const IdentificationResult& result, std::size_t samples,
                                         std::uint64_t seed, const std::vector<std::vector<double>>* ground_truth) {
  std::vector<Polytope> polytopes;
  std::vector<int> ucards;
  for (int u : model.exogenous()) {
    polytopes.emplace_back(result.system_of(model.variable(u).id));
    ucards.push_back(model.cardinality(u));
  }
  VerificationReport report;
  report.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<std::vector<double>> pmfs;
    for (std::size_t i = 0; i < polytopes.size(); ++i)
      pmfs.push_back(sample_point(polytopes[i], seed + 1000003ULL * s + i));
    const ProbabilisticSCM pscm(model, std::move(pmfs));
    report.max_deviation = std::max(report.max_deviation, joint_distance(model, empirical, induced_joint(pscm)));
  }
  if (ground_truth) {
    double worst = 0.0;
    for (std::size_t i = 0; i < polytopes.size(); ++i)
      worst = std::max(worst, polytopes[i].system().max_violation((*ground_truth)[i]));
    report.ground_truth_violation = worst;
    report.ground_truth_member = worst <= 1e-8;
  }
  return report;
}

}  // namespace credal
