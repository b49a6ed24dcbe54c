#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "credal/credal_network.hpp"

namespace credal {

// Nodes that can influence P(target, evidence): ancestors of the target and
// the evidence nodes, themselves included. Sorted by index.
std::vector<int> relevant_nodes(const CredalNetwork& network, const std::map<int, int>& evidence, int target);

// Variable elimination compiled once for a fixed network structure, evidence
// and target, then evaluated many times with different PMFs at the credal
// roots. The network must already carry any interventions.
class EliminationPlan {
 public:
  EliminationPlan(const CredalNetwork& network, const std::map<int, int>& evidence, int target);

  // Relevant credal roots, sorted by node index; evaluate() takes one PMF
  // per entry in this order.
  const std::vector<int>& credal_roots() const { return roots_; }
  const std::vector<int>& root_cardinalities() const { return root_cards_; }
  int target() const { return target_; }
  int target_cardinality() const { return target_card_; }
  // Largest intermediate table, a proxy for the plan's cost.
  std::size_t max_table_size() const { return max_table_; }

  struct Workspace {
    std::vector<std::vector<double>> buffers;
    std::vector<const double*> tables;
  };
  Workspace make_workspace() const;

  // Writes the unnormalized P(target = t, evidence) for every state t into
  // `out` (length target_cardinality()).
  void evaluate(std::span<const double* const> root_pmfs, Workspace& workspace, std::span<double> out) const;
  std::vector<double> evaluate(std::span<const std::vector<double>> root_pmfs) const;

 private:
  struct RootInput {
    int buffer = 0;
    std::vector<double> mask;  // evidence indicator over the root's states
  };
  struct Step {
    std::vector<int> inputs;                   // buffer ids
    std::vector<std::vector<std::uint32_t>> maps;  // per input: union index -> input index
    int output = 0;
    std::size_t union_size = 0;
    std::size_t summed_cardinality = 1;        // 1 when nothing is summed out
  };

  std::vector<int> roots_;
  std::vector<int> root_cards_;
  std::vector<RootInput> root_inputs_;
  std::vector<std::vector<double>> fixed_;  // initial contents of each buffer
  std::vector<std::size_t> buffer_sizes_;
  std::vector<Step> steps_;
  int result_buffer_ = 0;
  int target_ = -1;
  int target_card_ = 0;
  std::size_t max_table_ = 0;
};

}  // namespace credal
