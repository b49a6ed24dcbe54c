#include "credal/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "credal/errors.hpp"

namespace credal {

std::size_t state_space_size(std::span<const int> cardinalities) {
  std::size_t n = 1;
  for (int c : cardinalities) n *= static_cast<std::size_t>(c);
  return n;
}

std::vector<std::size_t> row_major_strides(std::span<const int> cardinalities) {
  std::vector<std::size_t> strides(cardinalities.size(), 1);
  for (std::size_t i = cardinalities.size(); i-- > 1;)
    strides[i - 1] = strides[i] * static_cast<std::size_t>(cardinalities[i]);
  return strides;
}

bool next_configuration(std::vector<int>& states, std::span<const int> cardinalities) {
  for (std::size_t i = states.size(); i-- > 0;) {
    if (++states[i] < cardinalities[i]) return true;
    states[i] = 0;
  }
  return false;
}

std::vector<int> decode_index(std::size_t index, std::span<const int> cardinalities) {
  std::vector<int> states(cardinalities.size(), 0);
  for (std::size_t i = cardinalities.size(); i-- > 0;) {
    const auto c = static_cast<std::size_t>(cardinalities[i]);
    states[i] = static_cast<int>(index % c);
    index /= c;
  }
  return states;
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<std::string> variable_order,
                                             std::vector<int> cardinalities,
                                             std::vector<double> probabilities)
    : order_(std::move(variable_order)), cards_(std::move(cardinalities)), probs_(std::move(probabilities)) {
  if (order_.size() != cards_.size())
    fail(ErrorCode::DimensionMismatch, "variable order and cardinalities differ in length");
  if (probs_.size() != state_space_size(cards_)) {
    std::ostringstream os;
    os << "empirical PMF has " << probs_.size() << " entries, expected " << state_space_size(cards_);
    fail(ErrorCode::DimensionMismatch, os.str());
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) fail(ErrorCode::InvalidDistribution, "empirical PMF has a negative entry");
    total += p;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance)
    fail(ErrorCode::InvalidDistribution, "empirical PMF does not sum to 1");
}

bool EmpiricalDistribution::strictly_positive() const {
  return std::all_of(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; });
}

void EmpiricalDistribution::require_strictly_positive() const {
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (probs_[i] > 0.0) continue;
    const std::vector<int> states = decode_index(i, cards_);
    std::ostringstream os;
    os << "empty cell (";
    for (std::size_t k = 0; k < states.size(); ++k) os << (k ? "," : "") << order_[k] << "=" << states[k];
    os << ")";
    fail(ErrorCode::NonPositiveCell, os.str());
  }
}

EmpiricalDistribution EmpiricalDistribution::with_floor(double floor) const {
  if (!(floor >= 0.0)) fail(ErrorCode::InvalidDistribution, "floor must be nonnegative");
  std::vector<double> lifted = probs_;
  for (double& p : lifted) p = std::max(p, floor);
  const double total = std::accumulate(lifted.begin(), lifted.end(), 0.0);
  for (double& p : lifted) p /= total;
  return EmpiricalDistribution(order_, cards_, std::move(lifted));
}

std::vector<double> EmpiricalDistribution::marginal(std::span<const int> positions) const {
  std::vector<int> sub_cards;
  for (int p : positions) sub_cards.push_back(cards_[static_cast<std::size_t>(p)]);
  const std::vector<std::size_t> sub_strides = row_major_strides(sub_cards);
  std::vector<double> out(state_space_size(sub_cards), 0.0);
  std::vector<int> states(cards_.size(), 0);
  std::size_t cell = 0;
  do {
    std::size_t j = 0;
    for (std::size_t k = 0; k < positions.size(); ++k)
      j += static_cast<std::size_t>(states[static_cast<std::size_t>(positions[k])]) * sub_strides[k];
    out[j] += probs_[cell++];
  } while (next_configuration(states, cards_));
  return out;
}

EmpiricalDistribution make_empirical(const CausalModel& model, std::vector<std::string> variable_order,
                                     std::vector<double> probabilities) {
  std::vector<int> cards;
  std::vector<char> seen(model.size(), 0);
  for (const std::string& id : variable_order) {
    const int i = model.index_of(id);
    if (model.is_exogenous(i)) fail(ErrorCode::InvalidDistribution, "'" + id + "' is exogenous");
    if (seen[static_cast<std::size_t>(i)]++) fail(ErrorCode::InvalidDistribution, "'" + id + "' listed twice");
    cards.push_back(model.cardinality(i));
  }
  if (variable_order.size() != model.endogenous().size())
    fail(ErrorCode::InvalidDistribution, "empirical PMF must cover every endogenous variable");
  return EmpiricalDistribution(std::move(variable_order), std::move(cards), std::move(probabilities));
}

EmpiricalDistribution empirical_from_data(const std::vector<std::vector<int>>& records,
                                          std::vector<std::string> variable_order,
                                          std::vector<int> cardinalities, double floor) {
  if (records.empty()) fail(ErrorCode::EmptyDataset, "no records");
  if (!(floor >= 0.0)) fail(ErrorCode::InvalidDistribution, "floor must be nonnegative");
  const std::vector<std::size_t> strides = row_major_strides(cardinalities);
  std::vector<double> counts(state_space_size(cardinalities), 0.0);
  for (const std::vector<int>& r : records) {
    if (r.size() != cardinalities.size()) fail(ErrorCode::DimensionMismatch, "incomplete record");
    std::size_t cell = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (r[k] < 0 || r[k] >= cardinalities[k]) fail(ErrorCode::InvalidDistribution, "record state out of range");
      cell += static_cast<std::size_t>(r[k]) * strides[k];
    }
    counts[cell] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(records.size());
  EmpiricalDistribution freq(std::move(variable_order), std::move(cardinalities), std::move(counts));
  if (floor > 0.0) return freq.with_floor(floor);
  freq.require_strictly_positive();
  return freq;
}

EmpiricalMarginals::EmpiricalMarginals(const CausalModel& model, const EmpiricalDistribution& empirical)
    : empirical_(&empirical), position_of_(model.size(), -1) {
  const auto& order = empirical.variable_order();
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int i = model.index_of(order[k]);
    if (empirical.cardinalities()[k] != model.cardinality(i))
      fail(ErrorCode::DimensionMismatch, "empirical cardinality of '" + order[k] + "' disagrees with the model");
    position_of_[static_cast<std::size_t>(i)] = static_cast<int>(k);
  }
  for (int x : model.endogenous()) {
    if (position_of_[static_cast<std::size_t>(x)] < 0)
      fail(ErrorCode::InvalidDistribution, "empirical PMF misses '" + model.variable(x).id + "'");
  }
}

std::vector<double> EmpiricalMarginals::marginal(std::span<const int> variables) const {
  std::vector<int> positions;
  for (int v : variables) {
    const int p = position_of_[static_cast<std::size_t>(v)];
    if (p < 0) fail(ErrorCode::InvalidDistribution, "marginal over a variable outside the empirical PMF");
    positions.push_back(p);
  }
  return empirical_->marginal(positions);
}

}  // namespace credal
