#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "credal/credal_network.hpp"
#include "credal/empirical.hpp"
#include "credal/scm.hpp"

namespace credal {

enum class Method { exact, approx };

std::string_view to_string(Method m);
// Throws InvalidConfig for anything other than "exact" or "approx".
Method parse_method(std::string_view text);

// Width below which an interval is reported as a point.
inline constexpr double kPointTolerance = 1e-6;
// Evidence probabilities at or below this are treated as zero.
inline constexpr double kEvidenceFloor = 1e-12;

using Clock = std::chrono::steady_clock;

struct IntervalResult {
  double lower = 0.0;
  double upper = 1.0;
  Method method = Method::exact;
  bool point = false;
  // exact: vertex combinations evaluated and skipped for zero evidence
  std::uint64_t combinations = 0;
  std::uint64_t skipped = 0;
  // approx: total sweeps and restarts that produced a value
  std::size_t iterations = 0;
  std::size_t restarts = 0;

  double width() const { return upper - lower; }
};

struct ExactConfig {
  std::uint64_t max_combinations = 50'000'000;
  std::optional<Clock::time_point> deadline;
};

struct ApproxConfig {
  int restarts = 10;
  int max_iters = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  std::optional<Clock::time_point> deadline;
};

// P(target = target_state | evidence) after surgery on a network without
// credal nodes, by sum-product elimination along a min-degree order.
// Throws ZeroEvidenceProbability.
double ve_precise(const CredalNetwork& network, const CausalQuery& query);
// The whole conditional distribution of the target.
std::vector<double> ve_precise_distribution(const CredalNetwork& network, const CausalQuery& query);

// Exact bounds by enumerating every combination of vertices of the relevant
// credal roots. Combinations giving the evidence probability <= 1e-12 are
// skipped. Throws VertexExplosion, ZeroEvidenceEverywhere, Timeout.
IntervalResult bounds_exact(const CredalNetwork& network, const CausalQuery& query, const ExactConfig& config = {});
// One interval per target state from a single enumeration.
std::vector<IntervalResult> bounds_exact_all(const CredalNetwork& network, const CausalQuery& query,
                                             const ExactConfig& config = {});
// Single-threaded reference of the same enumeration.
std::vector<IntervalResult> bounds_exact_all_serial(const CredalNetwork& network, const CausalQuery& query,
                                                    const ExactConfig& config = {});

// Inner approximation by coordinate ascent: with all other roots fixed the
// query is linear-fractional in one root's PMF, so each step solves a
// linear-fractional program over that root's credal set. Restarts begin at
// random vertex selections. Throws ZeroEvidenceEverywhere when no restart
// finds a selection with positive evidence probability, and Timeout.
IntervalResult bounds_approx(const CredalNetwork& network, const CausalQuery& query, const ApproxConfig& config = {});

// Twin network with the hypothetical interventions on the replicas, the
// observations on the originals, and the replica of the target as target.
std::pair<CredalNetwork, CausalQuery> counterfactual_network(const CredalNetwork& network,
                                                             const CounterfactualQuery& query);

IntervalResult counterfactual_bounds(const CredalNetwork& network, const CounterfactualQuery& query, Method method,
                                     const ExactConfig& exact = {}, const ApproxConfig& approx = {});

// Marginals of the joint a PSCM induces, computed by variable elimination.
class PscmMarginals final : public MarginalSource {
 public:
  explicit PscmMarginals(const ProbabilisticSCM& pscm);
  std::vector<double> marginal(std::span<const int> variables) const override;

 private:
  CredalNetwork network_;
};

}  // namespace credal
