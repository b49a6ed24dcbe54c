#include "credal/factor.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "credal/empirical.hpp"
#include "credal/errors.hpp"

namespace credal {

Factor::Factor(std::vector<int> scope, std::vector<int> cardinalities, std::vector<double> table)
    : scope_(std::move(scope)), cards_(std::move(cardinalities)), table_(std::move(table)) {
  if (scope_.size() != cards_.size()) fail(ErrorCode::DimensionMismatch, "factor scope and cardinalities differ");
  if (table_.size() != state_space_size(cards_)) fail(ErrorCode::DimensionMismatch, "factor table has wrong size");
}

bool Factor::contains(int variable) const {
  return std::find(scope_.begin(), scope_.end(), variable) != scope_.end();
}

namespace {

// Stride of each `target` variable inside a factor with `scope`; 0 if absent.
std::vector<std::size_t> strides_in(const std::vector<int>& target, const std::vector<int>& scope,
                                    const std::vector<int>& cards) {
  const std::vector<std::size_t> own = row_major_strides(cards);
  std::vector<std::size_t> out(target.size(), 0);
  for (std::size_t i = 0; i < target.size(); ++i)
    for (std::size_t j = 0; j < scope.size(); ++j)
      if (scope[j] == target[i]) out[i] = own[j];
  return out;
}

}  // namespace

Factor Factor::multiply(const Factor& other) const {
  std::vector<int> scope = scope_;
  std::vector<int> cards = cards_;
  for (std::size_t j = 0; j < other.scope_.size(); ++j) {
    if (!contains(other.scope_[j])) {
      scope.push_back(other.scope_[j]);
      cards.push_back(other.cards_[j]);
    }
  }
  const auto sa = strides_in(scope, scope_, cards_);
  const auto sb = strides_in(scope, other.scope_, other.cards_);
  std::vector<double> table(state_space_size(cards));
  std::vector<int> states(scope.size(), 0);
  std::size_t ia = 0, ib = 0;
  for (double& cell : table) {
    cell = table_[ia] * other.table_[ib];
    for (std::size_t i = scope.size(); i-- > 0;) {
      if (++states[i] < cards[i]) {
        ia += sa[i];
        ib += sb[i];
        break;
      }
      ia -= sa[i] * static_cast<std::size_t>(cards[i] - 1);
      ib -= sb[i] * static_cast<std::size_t>(cards[i] - 1);
      states[i] = 0;
    }
  }
  return Factor(std::move(scope), std::move(cards), std::move(table));
}

Factor Factor::sum_out(int variable) const {
  const auto it = std::find(scope_.begin(), scope_.end(), variable);
  if (it == scope_.end()) return *this;
  const auto pos = static_cast<std::size_t>(it - scope_.begin());
  std::vector<int> scope = scope_, cards = cards_;
  scope.erase(scope.begin() + static_cast<std::ptrdiff_t>(pos));
  cards.erase(cards.begin() + static_cast<std::ptrdiff_t>(pos));
  const auto card = static_cast<std::size_t>(cards_[pos]);
  std::size_t inner = 1;
  for (std::size_t j = pos + 1; j < cards_.size(); ++j) inner *= static_cast<std::size_t>(cards_[j]);
  const std::size_t outer = table_.size() / (inner * card);
  std::vector<double> table(outer * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t s = 0; s < card; ++s)
      for (std::size_t i = 0; i < inner; ++i) table[o * inner + i] += table_[(o * card + s) * inner + i];
  return Factor(std::move(scope), std::move(cards), std::move(table));
}

Factor Factor::observe(int variable, int state) const {
  const auto it = std::find(scope_.begin(), scope_.end(), variable);
  if (it == scope_.end()) return *this;
  const auto pos = static_cast<std::size_t>(it - scope_.begin());
  const auto card = static_cast<std::size_t>(cards_[pos]);
  std::size_t inner = 1;
  for (std::size_t j = pos + 1; j < cards_.size(); ++j) inner *= static_cast<std::size_t>(cards_[j]);
  std::vector<double> table = table_;
  for (std::size_t k = 0; k < table.size(); ++k)
    if ((k / inner) % card != static_cast<std::size_t>(state)) table[k] = 0.0;
  return Factor(scope_, cards_, std::move(table));
}

Factor Factor::reorder(std::span<const int> order) const {
  std::vector<int> scope(order.begin(), order.end());
  if (scope.size() != scope_.size()) fail(ErrorCode::DimensionMismatch, "reorder is not a permutation");
  std::vector<int> cards;
  for (int v : scope) {
    const auto it = std::find(scope_.begin(), scope_.end(), v);
    if (it == scope_.end()) fail(ErrorCode::DimensionMismatch, "reorder is not a permutation");
    cards.push_back(cards_[static_cast<std::size_t>(it - scope_.begin())]);
  }
  const auto src = strides_in(scope, scope_, cards_);
  std::vector<double> table(table_.size());
  std::vector<int> states(scope.size(), 0);
  std::size_t k = 0;
  do {
    std::size_t i = 0;
    for (std::size_t j = 0; j < scope.size(); ++j) i += static_cast<std::size_t>(states[j]) * src[j];
    table[k++] = table_[i];
  } while (next_configuration(states, cards));
  return Factor(std::move(scope), std::move(cards), std::move(table));
}

std::vector<int> min_degree_order(const std::vector<std::vector<int>>& scopes, std::span<const int> keep) {
  std::map<int, std::set<int>> adjacency;
  for (const auto& s : scopes)
    for (int a : s) {
      adjacency[a];
      for (int b : s)
        if (a != b) adjacency[a].insert(b);
    }
  for (int k : keep) adjacency.erase(k);
  std::set<int> kept(keep.begin(), keep.end());
  std::vector<int> order;
  while (!adjacency.empty()) {
    int best = -1;
    std::size_t degree = 0;
    for (const auto& [v, nb] : adjacency) {
      if (best < 0 || nb.size() < degree) {
        best = v;
        degree = nb.size();
      }
    }
    const std::set<int> nb = adjacency[best];
    for (int a : nb) {
      auto it = adjacency.find(a);
      if (it == adjacency.end()) continue;  // kept variable
      it->second.erase(best);
      for (int b : nb)
        if (a != b) it->second.insert(b);
    }
    adjacency.erase(best);
    order.push_back(best);
  }
  return order;
}

Factor eliminate(std::vector<Factor> factors, std::span<const int> keep, std::span<const int> cardinalities_of_keep) {
  std::vector<std::vector<int>> scopes;
  for (const Factor& f : factors) scopes.push_back(f.scope());
  for (int v : min_degree_order(scopes, keep)) {
    Factor product;
    std::vector<Factor> rest;
    for (Factor& f : factors) {
      if (f.contains(v)) product = product.multiply(f);
      else rest.push_back(std::move(f));
    }
    rest.push_back(product.sum_out(v));
    factors = std::move(rest);
  }
  Factor result;
  for (const Factor& f : factors) result = result.multiply(f);
  // Kept variables absent from every factor contribute a uniform 1.
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (!result.contains(keep[i]))
      result = result.multiply(Factor({keep[i]}, {cardinalities_of_keep[i]},
                                      std::vector<double>(static_cast<std::size_t>(cardinalities_of_keep[i]), 1.0)));
  }
  return result.reorder(keep);
}

}  // namespace credal
