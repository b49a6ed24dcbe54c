#include "credal/scm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "credal/empirical.hpp"
#include "credal/errors.hpp"

namespace credal {

std::string_view to_string(ModelClass c) {
  return c == ModelClass::markovian ? "markovian" : "quasi_markovian";
}

CausalModel::CausalModel(std::vector<Variable> variables, std::vector<StructuralEquation> equations)
    : variables_(std::move(variables)), equations_(std::move(equations)) {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const Variable& v = variables_[i];
    if (v.id.empty()) fail(ErrorCode::InvalidModel, "variable with empty id");
    if (v.cardinality < 1) fail(ErrorCode::InvalidModel, "variable '" + v.id + "' has cardinality < 1");
    if (!index_.emplace(v.id, static_cast<int>(i)).second)
      fail(ErrorCode::InvalidModel, "duplicate variable id '" + v.id + "'");
    (v.kind == VariableKind::exogenous ? exogenous_ : endogenous_).push_back(static_cast<int>(i));
  }

  equation_index_.assign(variables_.size(), -1);
  resolved_.reserve(equations_.size());
  for (const StructuralEquation& eq : equations_) {
    ResolvedEquation r;
    r.child = index_of(eq.child);
    if (equation_index_[static_cast<std::size_t>(r.child)] >= 0)
      fail(ErrorCode::InvalidModel, "two equations for '" + eq.child + "'");
    std::set<int> seen;
    std::vector<int> cards;
    for (const std::string& p : eq.parents) {
      const int pi = index_of(p);
      if (pi == r.child) fail(ErrorCode::CyclicGraph, "'" + eq.child + "' is its own parent");
      if (!seen.insert(pi).second) fail(ErrorCode::InvalidModel, "repeated parent '" + p + "' of '" + eq.child + "'");
      if (is_exogenous(pi)) {
        r.exogenous_parents.push_back(static_cast<int>(r.parents.size()));
      } else {
        r.endogenous_parents.push_back(pi);
      }
      r.parents.push_back(pi);
      cards.push_back(cardinality(pi));
    }
    r.strides = row_major_strides(cards);
    const std::size_t rows = state_space_size(cards);
    if (eq.table.size() != rows) {
      std::ostringstream os;
      os << "equation of '" << eq.child << "' has " << eq.table.size() << " entries, expected " << rows;
      fail(ErrorCode::InvalidModel, os.str());
    }
    const int child_card = cardinality(r.child);
    for (int s : eq.table) {
      if (s < 0 || s >= child_card)
        fail(ErrorCode::InvalidModel, "equation of '" + eq.child + "' produces out-of-range state");
    }
    r.table = eq.table;
    equation_index_[static_cast<std::size_t>(r.child)] = static_cast<int>(resolved_.size());
    resolved_.push_back(std::move(r));
  }
  for (int x : endogenous_) {
    if (equation_index_[static_cast<std::size_t>(x)] < 0)
      fail(ErrorCode::InvalidModel, "endogenous '" + variable(x).id + "' has no equation");
  }
}

std::optional<int> CausalModel::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int CausalModel::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  fail(ErrorCode::InvalidModel, "unknown variable '" + std::string(id) + "'");
}

const ResolvedEquation* CausalModel::equation_of(int variable) const {
  const int e = equation_index_[static_cast<std::size_t>(variable)];
  return e < 0 ? nullptr : &resolved_[static_cast<std::size_t>(e)];
}

int CausalModel::exogenous_parent(int endogenous_variable) const {
  const ResolvedEquation* eq = equation_of(endogenous_variable);
  if (eq == nullptr || eq->exogenous_parents.empty())
    fail(ErrorCode::MultipleExogenousParents, "'" + variable(endogenous_variable).id + "' has no exogenous parent");
  return eq->parents[static_cast<std::size_t>(eq->exogenous_parents.front())];
}

std::vector<int> CausalModel::children(int v) const {
  std::vector<int> out;
  for (int x : endogenous_) {
    const ResolvedEquation* eq = equation_of(x);
    if (std::find(eq->parents.begin(), eq->parents.end(), v) != eq->parents.end()) out.push_back(x);
  }
  return out;
}

int CausalModel::evaluate(int child, const Assignment& state) const {
  const ResolvedEquation& eq = *equation_of(child);
  std::size_t row = 0;
  for (std::size_t i = 0; i < eq.parents.size(); ++i)
    row += static_cast<std::size_t>(state[static_cast<std::size_t>(eq.parents[i])]) * eq.strides[i];
  return eq.table[row];
}

std::vector<int> topological_order(const CausalModel& model) {
  const std::size_t n = model.size();
  std::vector<int> pending(n, 0);
  std::vector<std::vector<int>> out_edges(n);
  for (int x : model.endogenous()) {
    for (int p : model.equation_of(x)->endogenous_parents) {
      ++pending[static_cast<std::size_t>(x)];
      out_edges[static_cast<std::size_t>(p)].push_back(x);
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int x : model.endogenous())
    if (pending[static_cast<std::size_t>(x)] == 0) ready.push(x);
  std::vector<int> order;
  order.reserve(model.endogenous().size());
  while (!ready.empty()) {
    const int x = ready.top();
    ready.pop();
    order.push_back(x);
    for (int c : out_edges[static_cast<std::size_t>(x)])
      if (--pending[static_cast<std::size_t>(c)] == 0) ready.push(c);
  }
  if (order.size() != model.endogenous().size())
    fail(ErrorCode::CyclicGraph, "the endogenous graph has a directed cycle");
  return order;
}

std::vector<std::string> topological_order_ids(const CausalModel& model) {
  std::vector<std::string> ids;
  for (int x : topological_order(model)) ids.push_back(model.variable(x).id);
  return ids;
}

namespace {

bool is_surjective(const CausalModel& model, const ResolvedEquation& eq) {
  std::vector<char> hit(static_cast<std::size_t>(model.cardinality(eq.child)), 0);
  for (int s : eq.table) hit[static_cast<std::size_t>(s)] = 1;
  return std::all_of(hit.begin(), hit.end(), [](char h) { return h != 0; });
}

}  // namespace

ModelClass validate_model(const CausalModel& model) {
  for (int u : model.exogenous()) {
    if (model.equation_of(u) != nullptr)
      fail(ErrorCode::ExogenousWithParents, "exogenous '" + model.variable(u).id + "' has an equation");
  }
  for (int x : model.endogenous()) {
    const std::size_t n = model.equation_of(x)->exogenous_parents.size();
    if (n != 1) {
      fail(ErrorCode::MultipleExogenousParents,
           "'" + model.variable(x).id + "' has " + std::to_string(n) + " exogenous parents");
    }
  }
  topological_order(model);  // throws CyclicGraph

  bool markovian = true;
  for (int u : model.exogenous()) {
    const std::size_t k = model.children(u).size();
    if (k == 0) fail(ErrorCode::OrphanExogenous, "exogenous '" + model.variable(u).id + "' has no children");
    if (k > 1) markovian = false;
  }
  for (int x : model.endogenous()) {
    if (!is_surjective(model, *model.equation_of(x)))
      fail(ErrorCode::NonSurjectiveEquation, "equation of '" + model.variable(x).id + "' is not surjective");
  }
  return markovian ? ModelClass::markovian : ModelClass::quasi_markovian;
}

Assignment eval_equations(const CausalModel& model, std::span<const int> exogenous_states) {
  if (exogenous_states.size() != model.exogenous().size())
    fail(ErrorCode::DimensionMismatch, "exogenous assignment has wrong length");
  Assignment state(model.size(), 0);
  for (std::size_t i = 0; i < exogenous_states.size(); ++i)
    state[static_cast<std::size_t>(model.exogenous()[i])] = exogenous_states[i];
  for (int x : topological_order(model)) state[static_cast<std::size_t>(x)] = model.evaluate(x, state);
  return state;
}

std::vector<int> restricted_inverse(const CausalModel& model, int variable,
                                    std::span<const int> endogenous_parent_states, int state) {
  const ResolvedEquation* eq = model.equation_of(variable);
  if (eq == nullptr) fail(ErrorCode::InvalidModel, "'" + model.variable(variable).id + "' has no equation");
  if (endogenous_parent_states.size() != eq->endogenous_parents.size())
    fail(ErrorCode::DimensionMismatch, "wrong number of endogenous parent states");
  const int u = model.exogenous_parent(variable);
  Assignment a(model.size(), 0);
  for (std::size_t i = 0; i < eq->endogenous_parents.size(); ++i)
    a[static_cast<std::size_t>(eq->endogenous_parents[i])] = endogenous_parent_states[i];
  std::vector<int> out;
  for (int s = 0; s < model.cardinality(u); ++s) {
    a[static_cast<std::size_t>(u)] = s;
    if (model.evaluate(variable, a) == state) out.push_back(s);
  }
  return out;
}

std::vector<std::string> non_surjective_restrictions(const CausalModel& model) {
  std::vector<std::string> flagged;
  for (int x : model.endogenous()) {
    const ResolvedEquation& eq = *model.equation_of(x);
    std::vector<int> cards;
    for (int p : eq.endogenous_parents) cards.push_back(model.cardinality(p));
    std::vector<int> pa(cards.size(), 0);
    bool ok = true;
    do {
      for (int s = 0; s < model.cardinality(x) && ok; ++s)
        ok = !restricted_inverse(model, x, pa, s).empty();
    } while (ok && next_configuration(pa, cards));
    if (!ok) flagged.push_back(model.variable(x).id);
  }
  return flagged;
}

std::vector<double> equation_cpt(const CausalModel& model, int variable) {
  const ResolvedEquation& eq = *model.equation_of(variable);
  const auto card = static_cast<std::size_t>(model.cardinality(variable));
  std::vector<double> cpt(eq.table.size() * card, 0.0);
  for (std::size_t row = 0; row < eq.table.size(); ++row)
    cpt[row * card + static_cast<std::size_t>(eq.table[row])] = 1.0;
  return cpt;
}

std::vector<int> decode_canonical_state(std::uint64_t u, int child_cardinality, std::size_t rows) {
  std::vector<int> f(rows);
  const auto base = static_cast<std::uint64_t>(child_cardinality);
  for (std::size_t j = 0; j < rows; ++j) {
    f[j] = static_cast<int>(u % base);
    u /= base;
  }
  return f;
}

CanonicalEquation canonical_equation(const std::string& child, int child_cardinality,
                                     const std::string& exogenous,
                                     const std::vector<std::pair<std::string, int>>& endogenous_parents,
                                     std::uint64_t cap) {
  if (child_cardinality < 1) fail(ErrorCode::InvalidModel, "child cardinality < 1");
  std::uint64_t rows = 1;
  for (const auto& [id, card] : endogenous_parents) {
    if (card < 1) fail(ErrorCode::InvalidModel, "parent '" + id + "' has cardinality < 1");
    rows *= static_cast<std::uint64_t>(card);
    if (rows > 64) fail(ErrorCode::CardinalityOverflow, "too many parent configurations");
  }
  std::uint64_t states = 1;
  for (std::uint64_t j = 0; j < rows; ++j) {
    states *= static_cast<std::uint64_t>(child_cardinality);
    if (states > cap)
      fail(ErrorCode::CardinalityOverflow, "canonical exogenous cardinality exceeds " + std::to_string(cap));
  }

  CanonicalEquation out;
  out.exogenous_cardinality = static_cast<int>(states);
  out.equation.child = child;
  out.equation.parents.push_back(exogenous);
  for (const auto& p : endogenous_parents) out.equation.parents.push_back(p.first);
  out.equation.table.reserve(states * rows);
  for (std::uint64_t u = 0; u < states; ++u) {
    const std::vector<int> f = decode_canonical_state(u, child_cardinality, rows);
    out.equation.table.insert(out.equation.table.end(), f.begin(), f.end());
  }
  return out;
}

ProbabilisticSCM::ProbabilisticSCM(CausalModel model, std::vector<std::vector<double>> exogenous_pmfs)
    : model_(std::move(model)), pmfs_(std::move(exogenous_pmfs)) {
  if (pmfs_.size() != model_.exogenous().size())
    fail(ErrorCode::DimensionMismatch, "one PMF per exogenous variable is required");
  for (std::size_t i = 0; i < pmfs_.size(); ++i) {
    const int u = model_.exogenous()[i];
    const std::vector<double>& p = pmfs_[i];
    if (p.size() != static_cast<std::size_t>(model_.cardinality(u)))
      fail(ErrorCode::DimensionMismatch, "PMF of '" + model_.variable(u).id + "' has wrong length");
    double total = 0.0;
    for (double v : p) {
      if (!(v >= 0.0) || !std::isfinite(v))
        fail(ErrorCode::InvalidDistribution, "PMF of '" + model_.variable(u).id + "' has a negative entry");
      total += v;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance)
      fail(ErrorCode::InvalidDistribution, "PMF of '" + model_.variable(u).id + "' does not sum to 1");
  }
}

const std::vector<double>& ProbabilisticSCM::pmf_of(int exogenous_variable) const {
  const auto& ex = model_.exogenous();
  auto it = std::find(ex.begin(), ex.end(), exogenous_variable);
  if (it == ex.end()) fail(ErrorCode::InvalidModel, "not an exogenous variable");
  return pmfs_[static_cast<std::size_t>(it - ex.begin())];
}

EmpiricalDistribution induced_joint(const ProbabilisticSCM& pscm) {
  const CausalModel& model = pscm.model();
  std::vector<int> exo_cards;
  for (int u : model.exogenous()) exo_cards.push_back(model.cardinality(u));
  std::vector<int> endo_cards;
  std::vector<std::string> order;
  for (int x : model.endogenous()) {
    endo_cards.push_back(model.cardinality(x));
    order.push_back(model.variable(x).id);
  }
  const std::vector<std::size_t> strides = row_major_strides(endo_cards);
  std::vector<double> joint(state_space_size(endo_cards), 0.0);
  if (state_space_size(exo_cards) > (std::size_t{1} << 26))
    fail(ErrorCode::CardinalityOverflow, "exogenous joint space too large to enumerate");

  const std::vector<int> topo = topological_order(model);
  Assignment state(model.size(), 0);
  std::vector<int> u(exo_cards.size(), 0);
  do {
    double w = 1.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      state[static_cast<std::size_t>(model.exogenous()[i])] = u[i];
      w *= pscm.exogenous_pmfs()[i][static_cast<std::size_t>(u[i])];
    }
    if (w == 0.0) continue;
    for (int x : topo) state[static_cast<std::size_t>(x)] = model.evaluate(x, state);
    std::size_t cell = 0;
    for (std::size_t i = 0; i < model.endogenous().size(); ++i)
      cell += static_cast<std::size_t>(state[static_cast<std::size_t>(model.endogenous()[i])]) * strides[i];
    joint[cell] += w;
  } while (next_configuration(u, exo_cards));

  const double total = std::accumulate(joint.begin(), joint.end(), 0.0);
  for (double& p : joint) p /= total;
  return EmpiricalDistribution(std::move(order), std::move(endo_cards), std::move(joint));
}

}  // namespace credal
