#include <algorithm>
#include <atomic>
#include <limits>
#include <memory>
#include <string>

#include "credal/elimination_plan.hpp"
#include "credal/errors.hpp"
#include "credal/inference.hpp"

namespace credal {

namespace {

struct ExactProblem {
  CredalNetwork net;
  std::unique_ptr<EliminationPlan> plan;
  std::vector<const std::vector<std::vector<double>>*> vertices;  // per credal root
  std::vector<std::size_t> counts;
  std::uint64_t total = 1;
};

ExactProblem prepare(const CredalNetwork& network, const CausalQuery& query, const ExactConfig& config) {
  check_query(network, query);
  ExactProblem p;
  p.net = intervene(network, query.interventions);
  std::map<int, int> evidence;
  for (const auto& [id, s] : query.evidence) evidence.emplace(p.net.index_of(id), s);
  p.plan = std::make_unique<EliminationPlan>(p.net, evidence, p.net.index_of(query.target));
  for (int r : p.plan->credal_roots()) {
    const Polytope& k = *p.net.node(r).credal;
    if (k.empty()) fail(ErrorCode::Infeasible, "credal set of '" + p.net.node(r).id + "' is empty");
    const auto& vs = k.vertices().vertices;
    p.vertices.push_back(&vs);
    p.counts.push_back(vs.size());
    if (vs.empty()) fail(ErrorCode::Infeasible, "credal set of '" + p.net.node(r).id + "' has no vertices");
    if (p.total > config.max_combinations / vs.size())
      fail(ErrorCode::VertexExplosion, "more than " + std::to_string(config.max_combinations) + " vertex combinations");
    p.total *= vs.size();
  }
  return p;
}

struct Accumulator {
  std::vector<double> lower, upper;
  std::uint64_t combinations = 0;
  std::uint64_t skipped = 0;

  explicit Accumulator(std::size_t states)
      : lower(states, std::numeric_limits<double>::infinity()), upper(states, -std::numeric_limits<double>::infinity()) {}

  void add(std::span<const double> joint) {
    ++combinations;
    double evidence = 0.0;
    for (double v : joint) evidence += v;
    if (!(evidence > kEvidenceFloor)) {
      ++skipped;
      return;
    }
    for (std::size_t t = 0; t < joint.size(); ++t) {
      const double q = joint[t] / evidence;
      lower[t] = std::min(lower[t], q);
      upper[t] = std::max(upper[t], q);
    }
  }

  void merge(const Accumulator& other) {
    combinations += other.combinations;
    skipped += other.skipped;
    for (std::size_t t = 0; t < lower.size(); ++t) {
      lower[t] = std::min(lower[t], other.lower[t]);
      upper[t] = std::max(upper[t], other.upper[t]);
    }
  }
};

std::vector<IntervalResult> finish(const Accumulator& acc) {
  if (acc.combinations == acc.skipped)
    fail(ErrorCode::ZeroEvidenceEverywhere, "every vertex combination gives the evidence probability zero");
  std::vector<IntervalResult> out(acc.lower.size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    IntervalResult& r = out[t];
    r.method = Method::exact;
    r.lower = std::clamp(acc.lower[t], 0.0, 1.0);
    r.upper = std::clamp(acc.upper[t], r.lower, 1.0);
    r.point = r.width() < kPointTolerance;
    r.combinations = acc.combinations;
    r.skipped = acc.skipped;
  }
  return out;
}

// Mixed-radix digits of a combination index, last root fastest.
void decode(std::uint64_t index, const std::vector<std::size_t>& counts, std::vector<std::size_t>& digits) {
  for (std::size_t r = counts.size(); r-- > 0;) {
    digits[r] = static_cast<std::size_t>(index % counts[r]);
    index /= counts[r];
  }
}

void advance(const std::vector<std::size_t>& counts, std::vector<std::size_t>& digits) {
  for (std::size_t r = counts.size(); r-- > 0;) {
    if (++digits[r] < counts[r]) return;
    digits[r] = 0;
  }
}

bool expired(const ExactConfig& config) { return config.deadline && Clock::now() > *config.deadline; }

}  // namespace

std::vector<IntervalResult> bounds_exact_all(const CredalNetwork& network, const CausalQuery& query,
                                             const ExactConfig& config) {
  const ExactProblem p = prepare(network, query, config);
  const std::size_t roots = p.counts.size();
  const auto states = static_cast<std::size_t>(p.plan->target_cardinality());
  constexpr std::uint64_t kChunk = 256;
  const auto chunks = static_cast<std::int64_t>((p.total + kChunk - 1) / kChunk);
  Accumulator total(states);
  std::atomic<bool> stop{false};
#pragma omp parallel
  {
    Accumulator local(states);
    auto ws = p.plan->make_workspace();
    std::vector<std::size_t> digits(roots);
    std::vector<const double*> pointers(roots);
    std::vector<double> joint(states);
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t c = 0; c < chunks; ++c) {
      if (stop.load(std::memory_order_relaxed)) continue;
      if (expired(config)) {
        stop.store(true, std::memory_order_relaxed);
        continue;
      }
      const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunk;
      const std::uint64_t end = std::min(p.total, begin + kChunk);
      decode(begin, p.counts, digits);
      for (std::uint64_t i = begin; i < end; ++i) {
        for (std::size_t r = 0; r < roots; ++r) pointers[r] = (*p.vertices[r])[digits[r]].data();
        p.plan->evaluate(pointers, ws, joint);
        local.add(joint);
        advance(p.counts, digits);
      }
    }
#pragma omp critical(credal_exact_merge)
    total.merge(local);
  }
  if (stop.load()) fail(ErrorCode::Timeout, "exact bounds timed out");
  return finish(total);
}

std::vector<IntervalResult> bounds_exact_all_serial(const CredalNetwork& network, const CausalQuery& query,
                                                    const ExactConfig& config) {
  const ExactProblem p = prepare(network, query, config);
  const std::size_t roots = p.counts.size();
  Accumulator acc(static_cast<std::size_t>(p.plan->target_cardinality()));
  auto ws = p.plan->make_workspace();
  std::vector<std::size_t> digits(roots, 0);
  std::vector<const double*> pointers(roots);
  std::vector<double> joint(acc.lower.size());
  for (std::uint64_t i = 0; i < p.total; ++i) {
    if (i % 4096 == 0 && expired(config)) fail(ErrorCode::Timeout, "exact bounds timed out");
    for (std::size_t r = 0; r < roots; ++r) pointers[r] = (*p.vertices[r])[digits[r]].data();
    p.plan->evaluate(pointers, ws, joint);
    acc.add(joint);
    advance(p.counts, digits);
  }
  return finish(acc);
}

IntervalResult bounds_exact(const CredalNetwork& network, const CausalQuery& query, const ExactConfig& config) {
  return bounds_exact_all(network, query, config)[static_cast<std::size_t>(query.target_state)];
}

}  // namespace credal
