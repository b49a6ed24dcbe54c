#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "credal/scm.hpp"

namespace credal {

inline constexpr double kNormalizationTolerance = 1e-9;

// Row-major index helpers shared by tables, factors and enumerations.
std::size_t state_space_size(std::span<const int> cardinalities);
std::vector<std::size_t> row_major_strides(std::span<const int> cardinalities);
// Advances `states` to the next row-major configuration; false after the last.
bool next_configuration(std::vector<int>& states, std::span<const int> cardinalities);
std::vector<int> decode_index(std::size_t index, std::span<const int> cardinalities);

// Observed joint PMF over endogenous variables, flat and row-major in
// `variable_order` (the first variable varies slowest).
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  EmpiricalDistribution(std::vector<std::string> variable_order, std::vector<int> cardinalities,
                        std::vector<double> probabilities);

  const std::vector<std::string>& variable_order() const { return order_; }
  const std::vector<int>& cardinalities() const { return cards_; }
  const std::vector<double>& probabilities() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  bool strictly_positive() const;
  // Throws NonPositiveCell naming the first empty configuration.
  void require_strictly_positive() const;

  // Every cell raised to at least `floor`, then renormalized.
  EmpiricalDistribution with_floor(double floor) const;

  // Marginal table over positions of variable_order(), row-major in the
  // given position order.
  std::vector<double> marginal(std::span<const int> positions) const;

 private:
  std::vector<std::string> order_;
  std::vector<int> cards_;
  std::vector<double> probs_;
};

// Builds an empirical PMF for `model` with states listed in `variable_order`
// (every endogenous variable exactly once).
EmpiricalDistribution make_empirical(const CausalModel& model, std::vector<std::string> variable_order,
                                     std::vector<double> probabilities);

// Relative frequencies of complete records. With floor == 0 a configuration
// that never occurs is an error; with floor > 0 it is lifted to the floor.
EmpiricalDistribution empirical_from_data(const std::vector<std::vector<int>>& records,
                                          std::vector<std::string> variable_order,
                                          std::vector<int> cardinalities, double floor = 0.0);

// Source of marginal probabilities over endogenous model variables. The
// identification algorithms only ever need marginals, so a source may be a
// flat joint or an inference engine over a known model.
class MarginalSource {
 public:
  virtual ~MarginalSource() = default;
  // Table over the given model variable indices, row-major in that order.
  virtual std::vector<double> marginal(std::span<const int> variables) const = 0;
};

class EmpiricalMarginals final : public MarginalSource {
 public:
  EmpiricalMarginals(const CausalModel& model, const EmpiricalDistribution& empirical);
  std::vector<double> marginal(std::span<const int> variables) const override;

 private:
  const EmpiricalDistribution* empirical_;
  std::vector<int> position_of_;  // model index -> position in variable order, -1 if absent
};

}  // namespace credal
