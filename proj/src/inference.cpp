#include "credal/inference.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <string>

#include "credal/elimination_plan.hpp"
#include "credal/errors.hpp"
#include "credal/factor.hpp"
#include "credal/geometry.hpp"
#include "credal/random.hpp"

namespace credal {

std::string_view to_string(Method m) { return m == Method::exact ? "exact" : "approx"; }

Method parse_method(std::string_view text) {
  if (text == "exact") return Method::exact;
  if (text == "approx") return Method::approx;
  fail(ErrorCode::InvalidConfig, "unknown method '" + std::string(text) + "' (expected exact or approx)");
}

namespace {

std::map<int, int> evidence_indices(const CredalNetwork& net, const StateMap& evidence) {
  std::map<int, int> out;
  for (const auto& [id, s] : evidence) out.emplace(net.index_of(id), s);
  return out;
}

Factor node_factor(const CredalNetwork& net, int v) {
  const CredalNode& node = net.node(v);
  if (node.is_credal())
    fail(ErrorCode::InvalidQuery, "node '" + node.id + "' is credal; precise elimination needs precise CPTs");
  std::vector<int> scope = node.parents, cards;
  scope.push_back(v);
  for (int p : node.parents) cards.push_back(net.node(p).cardinality);
  cards.push_back(node.cardinality);
  return Factor(std::move(scope), std::move(cards), *node.cpt);
}

}  // namespace

std::vector<double> ve_precise_distribution(const CredalNetwork& network, const CausalQuery& query) {
  check_query(network, query);
  const CredalNetwork net = intervene(network, query.interventions);
  const auto evidence = evidence_indices(net, query.evidence);
  const int target = net.index_of(query.target);
  std::vector<Factor> factors;
  for (int v : relevant_nodes(net, evidence, target)) {
    Factor f = node_factor(net, v);
    if (auto it = evidence.find(v); it != evidence.end()) f = f.observe(v, it->second);
    factors.push_back(std::move(f));
  }
  const int keep[] = {target};
  const int cards[] = {net.node(target).cardinality};
  std::vector<double> joint = eliminate(std::move(factors), keep, cards).table();
  double total = 0.0;
  for (double p : joint) total += p;
  if (!(total > 0.0)) fail(ErrorCode::ZeroEvidenceProbability, "the evidence has probability zero");
  for (double& p : joint) p /= total;
  return joint;
}

double ve_precise(const CredalNetwork& network, const CausalQuery& query) {
  return ve_precise_distribution(network, query)[static_cast<std::size_t>(query.target_state)];
}

namespace {

struct RestartOutcome {
  bool found = false;
  double value = 0.0;
  std::size_t iterations = 0;
};

class CoordinateAscent {
 public:
  CoordinateAscent(const CredalNetwork& net, const EliminationPlan& plan, int target_state, const ApproxConfig& config)
      : plan_(plan), state_(static_cast<std::size_t>(target_state)), config_(config) {
    for (int r : plan.credal_roots()) {
      const Polytope& k = *net.node(r).credal;
      if (k.empty()) fail(ErrorCode::Infeasible, "credal set of '" + net.node(r).id + "' is empty");
      polytopes_.push_back(&k);
    }
  }

  RestartOutcome run(Direction direction, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    const std::size_t m = polytopes_.size();
    auto ws = plan_.make_workspace();
    std::vector<double> joint(static_cast<std::size_t>(plan_.target_cardinality()));
    std::vector<std::vector<double>> selection(m);
    std::vector<const double*> pointers(m);

    auto value_of = [&](double& evidence) {
      for (std::size_t i = 0; i < m; ++i) pointers[i] = selection[i].data();
      plan_.evaluate(pointers, ws, joint);
      evidence = 0.0;
      for (double p : joint) evidence += p;
      return evidence > kEvidenceFloor ? joint[state_] / evidence : 0.0;
    };

    RestartOutcome out;
    double evidence = 0.0;
    double value = 0.0;
    constexpr int kAttempts = 20;
    for (int attempt = 0; attempt < kAttempts && !out.found; ++attempt) {
      for (std::size_t i = 0; i < m; ++i) selection[i] = initial_point(*polytopes_[i], rng);
      value = value_of(evidence);
      out.found = evidence > kEvidenceFloor;
    }
    if (!out.found) return out;

    const bool maximize = direction == Direction::maximize;
    auto better = [&](double a, double b) { return maximize ? a > b : a < b; };
    for (int iter = 0; iter < config_.max_iters; ++iter) {
      if (config_.deadline && Clock::now() > *config_.deadline) fail(ErrorCode::Timeout, "approximate bounds timed out");
      const double previous = value;
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t card = selection[i].size();
        AffineForm numerator{std::vector<double>(card), 0.0};
        AffineForm denominator{std::vector<double>(card), 0.0};
        std::vector<double> unit(card, 0.0);
        for (std::size_t j = 0; j < m; ++j) pointers[j] = selection[j].data();
        pointers[i] = unit.data();
        for (std::size_t s = 0; s < card; ++s) {
          unit[s] = 1.0;
          plan_.evaluate(pointers, ws, joint);
          unit[s] = 0.0;
          numerator.coefficients[s] = joint[state_];
          for (double p : joint) denominator.coefficients[s] += p;
        }
        LinearConstraintSystem domain = polytopes_[i]->system();
        domain.add_inequality(denominator.coefficients, Relation::greater_equal, 1e-9, "evidence");
        std::vector<double> candidate;
        try {
          candidate = linear_fractional_optimize(domain, numerator, denominator, direction).argument;
        } catch (const CredalError& e) {
          if (e.code() != ErrorCode::Infeasible && e.code() != ErrorCode::DenominatorVanishes) throw;
          continue;
        }
        double total = 0.0;
        for (double& p : candidate) total += (p = std::max(p, 0.0));
        for (double& p : candidate) p /= total;
        std::vector<double> kept = std::move(selection[i]);
        selection[i] = std::move(candidate);
        double candidate_evidence = 0.0;
        const double candidate_value = value_of(candidate_evidence);
        if (candidate_evidence > kEvidenceFloor && better(candidate_value, value)) {
          value = candidate_value;
        } else {
          selection[i] = std::move(kept);
        }
      }
      ++out.iterations;
      if (std::abs(value - previous) < config_.tol) break;
    }
    out.value = value;
    return out;
  }

 private:
  static std::vector<double> initial_point(const Polytope& k, std::mt19937_64& rng) {
    try {
      const auto& vertices = k.vertices().vertices;
      if (!vertices.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, vertices.size() - 1);
        return vertices[pick(rng)];
      }
    } catch (const CredalError& e) {
      if (e.code() != ErrorCode::VertexExplosion) throw;
    }
    // Too many vertices: the optimum of a random objective is one.
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> objective(k.dimension());
    for (double& c : objective) c = unit(rng);
    return lp_optimize(k.system(), objective, Direction::maximize).argument;
  }

  const EliminationPlan& plan_;
  std::size_t state_;
  ApproxConfig config_;
  std::vector<const Polytope*> polytopes_;
};

}  // namespace

IntervalResult bounds_approx(const CredalNetwork& network, const CausalQuery& query, const ApproxConfig& config) {
  check_query(network, query);
  if (config.restarts < 1 || config.max_iters < 1 || !(config.tol > 0.0))
    fail(ErrorCode::InvalidConfig, "approximation needs restarts >= 1, max_iters >= 1 and tol > 0");
  const CredalNetwork net = intervene(network, query.interventions);
  const int target = net.index_of(query.target);
  const EliminationPlan plan(net, evidence_indices(net, query.evidence), target);
  const CoordinateAscent ascent(net, plan, query.target_state, config);

  const int tasks = 2 * config.restarts;
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(tasks));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(tasks));
#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < tasks; ++t) {
    const Direction d = t % 2 == 0 ? Direction::minimize : Direction::maximize;
    const std::uint64_t seed = splitmix64(config.seed ^ splitmix64(static_cast<std::uint64_t>(t) + 1));
    try {
      outcomes[static_cast<std::size_t>(t)] = ascent.run(d, seed);
    } catch (...) {
      errors[static_cast<std::size_t>(t)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  IntervalResult result;
  result.method = Method::approx;
  bool have_lower = false, have_upper = false;
  double lower = 1.0, upper = 0.0;
  for (int t = 0; t < tasks; ++t) {
    const RestartOutcome& o = outcomes[static_cast<std::size_t>(t)];
    if (!o.found) continue;
    result.iterations += o.iterations;
    ++result.restarts;
    if (t % 2 == 0) {
      lower = have_lower ? std::min(lower, o.value) : o.value;
      have_lower = true;
    } else {
      upper = have_upper ? std::max(upper, o.value) : o.value;
      have_upper = true;
    }
  }
  if (!have_lower || !have_upper)
    fail(ErrorCode::ZeroEvidenceEverywhere, "no sampled selection gives the evidence positive probability");
  result.lower = std::clamp(lower, 0.0, 1.0);
  result.upper = std::clamp(std::max(upper, lower), 0.0, 1.0);
  result.point = result.width() < kPointTolerance;
  return result;
}

std::pair<CredalNetwork, CausalQuery> counterfactual_network(const CredalNetwork& network,
                                                             const CounterfactualQuery& query) {
  auto replica_of = [&](const std::string& id) {
    const CredalNode& node = network.node(network.index_of(id));
    return node.role == NodeRole::endogenous ? twin_id(id) : id;
  };
  CausalQuery q;
  for (const auto& [id, s] : query.hypothetical) {
    if (network.node(network.index_of(id)).role != NodeRole::endogenous)
      fail(ErrorCode::InterveneExogenous, "hypothetical interventions apply to endogenous nodes, not '" + id + "'");
    q.interventions[twin_id(id)] = s;
  }
  for (const auto& [id, s] : query.observed) {
    network.index_of(id);
    q.evidence[id] = s;
  }
  q.target = replica_of(query.target);
  q.target_state = query.target_state;
  return {twin(network), std::move(q)};
}

IntervalResult counterfactual_bounds(const CredalNetwork& network, const CounterfactualQuery& query, Method method,
                                     const ExactConfig& exact, const ApproxConfig& approx) {
  const auto [net, q] = counterfactual_network(network, query);
  return method == Method::exact ? bounds_exact(net, q, exact) : bounds_approx(net, q, approx);
}

PscmMarginals::PscmMarginals(const ProbabilisticSCM& pscm) : network_(compile_precise(pscm)) {}

std::vector<double> PscmMarginals::marginal(std::span<const int> variables) const {
  std::vector<int> cards;
  for (int v : variables) cards.push_back(network_.node(v).cardinality);
  std::vector<Factor> factors;
  for (std::size_t v = 0; v < network_.size(); ++v) factors.push_back(node_factor(network_, static_cast<int>(v)));
  return eliminate(std::move(factors), variables, cards).table();
}

}  // namespace credal
