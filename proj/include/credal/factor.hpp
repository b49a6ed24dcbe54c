#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace credal {

// Nonnegative table over a scope of variable indices, row-major in scope
// order (first variable slowest). The empty scope holds one scalar.
class Factor {
 public:
  Factor() : table_{1.0} {}
  Factor(std::vector<int> scope, std::vector<int> cardinalities, std::vector<double> table);

  const std::vector<int>& scope() const { return scope_; }
  const std::vector<int>& cardinalities() const { return cards_; }
  const std::vector<double>& table() const { return table_; }
  std::size_t size() const { return table_.size(); }
  double operator[](std::size_t i) const { return table_[i]; }
  bool contains(int variable) const;

  Factor multiply(const Factor& other) const;
  Factor sum_out(int variable) const;
  // Zeroes every entry where `variable` differs from `state`.
  Factor observe(int variable, int state) const;
  // Same values with the scope permuted to `order` (a permutation of scope()).
  Factor reorder(std::span<const int> order) const;

 private:
  std::vector<int> scope_;
  std::vector<int> cards_;
  std::vector<double> table_;
};

// Greedy min-degree elimination order over the interaction graph of the
// scopes, ties broken by smaller variable index. Variables in `keep` are
// never eliminated.
std::vector<int> min_degree_order(const std::vector<std::vector<int>>& scopes, std::span<const int> keep);

// Multiplies the factors and sums out everything outside `keep`; the result
// is ordered as `keep`.
Factor eliminate(std::vector<Factor> factors, std::span<const int> keep, std::span<const int> cardinalities_of_keep);

}  // namespace credal
