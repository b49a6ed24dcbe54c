#include "credal/elimination_plan.hpp"

#include <algorithm>

#include "credal/empirical.hpp"
#include "credal/errors.hpp"
#include "credal/factor.hpp"

namespace credal {

std::vector<int> relevant_nodes(const CredalNetwork& network, const std::map<int, int>& evidence, int target) {
  std::vector<char> seen(network.size(), 0);
  std::vector<int> stack{target};
  for (const auto& [node, state] : evidence) stack.push_back(node);
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (seen[static_cast<std::size_t>(v)]) continue;
    seen[static_cast<std::size_t>(v)] = 1;
    for (int p : network.node(v).parents) stack.push_back(p);
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (seen[i]) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

struct Symbolic {
  std::vector<int> scope;
  std::vector<int> cards;
  int buffer = 0;
};

bool in_scope(const Symbolic& f, int v) { return std::find(f.scope.begin(), f.scope.end(), v) != f.scope.end(); }

// For each configuration of the union scope (row-major), the offset into a
// table over `scope`.
std::vector<std::uint32_t> index_map(const std::vector<int>& union_scope, const std::vector<int>& union_cards,
                                     const Symbolic& input) {
  const auto own = row_major_strides(input.cards);
  std::vector<std::size_t> stride(union_scope.size(), 0);
  for (std::size_t i = 0; i < union_scope.size(); ++i)
    for (std::size_t j = 0; j < input.scope.size(); ++j)
      if (input.scope[j] == union_scope[i]) stride[i] = own[j];
  std::vector<std::uint32_t> map;
  map.reserve(state_space_size(union_cards));
  std::vector<int> states(union_scope.size(), 0);
  do {
    std::size_t k = 0;
    for (std::size_t i = 0; i < states.size(); ++i) k += static_cast<std::size_t>(states[i]) * stride[i];
    map.push_back(static_cast<std::uint32_t>(k));
  } while (next_configuration(states, union_cards));
  return map;
}

}  // namespace

EliminationPlan::EliminationPlan(const CredalNetwork& network, const std::map<int, int>& evidence, int target)
    : target_(target), target_card_(network.node(target).cardinality) {
  std::vector<Symbolic> live;
  auto new_buffer = [&](std::size_t size, std::vector<double> contents) {
    fixed_.push_back(std::move(contents));
    buffer_sizes_.push_back(size);
    max_table_ = std::max(max_table_, size);
    return static_cast<int>(fixed_.size()) - 1;
  };

  for (int v : relevant_nodes(network, evidence, target)) {
    const CredalNode& node = network.node(v);
    const auto ev = evidence.find(v);
    Symbolic f;
    if (node.is_credal()) {
      f.scope = {v};
      f.cards = {node.cardinality};
      f.buffer = new_buffer(static_cast<std::size_t>(node.cardinality), {});
      RootInput input;
      input.buffer = f.buffer;
      input.mask.assign(static_cast<std::size_t>(node.cardinality), 1.0);
      if (ev != evidence.end())
        for (int s = 0; s < node.cardinality; ++s)
          if (s != ev->second) input.mask[static_cast<std::size_t>(s)] = 0.0;
      roots_.push_back(v);
      root_cards_.push_back(node.cardinality);
      root_inputs_.push_back(std::move(input));
    } else {
      f.scope = node.parents;
      f.scope.push_back(v);
      for (int p : node.parents) f.cards.push_back(network.node(p).cardinality);
      f.cards.push_back(node.cardinality);
      Factor table(f.scope, f.cards, *node.cpt);
      if (ev != evidence.end()) table = table.observe(v, ev->second);
      f.buffer = new_buffer(table.size(), table.table());
    }
    live.push_back(std::move(f));
  }

  std::vector<std::vector<int>> scopes;
  for (const auto& f : live) scopes.push_back(f.scope);
  const int keep[] = {target};

  auto emit = [&](const std::vector<Symbolic>& inputs, std::vector<int> union_scope, std::vector<int> union_cards,
                  std::size_t summed) {
    Step step;
    step.union_size = state_space_size(union_cards);
    step.summed_cardinality = summed;
    for (const auto& in : inputs) {
      step.inputs.push_back(in.buffer);
      step.maps.push_back(index_map(union_scope, union_cards, in));
    }
    max_table_ = std::max(max_table_, step.union_size);
    Symbolic out;
    if (summed > 1) {
      union_scope.pop_back();
      union_cards.pop_back();
    }
    out.scope = std::move(union_scope);
    out.cards = std::move(union_cards);
    step.output = new_buffer(step.union_size / summed, {});
    out.buffer = step.output;
    steps_.push_back(std::move(step));
    return out;
  };

  for (int v : min_degree_order(scopes, keep)) {
    std::vector<Symbolic> with, rest;
    for (auto& f : live) (in_scope(f, v) ? with : rest).push_back(std::move(f));
    std::vector<int> union_scope, union_cards;
    int card_v = 1;
    for (const auto& f : with)
      for (std::size_t j = 0; j < f.scope.size(); ++j) {
        if (f.scope[j] == v) {
          card_v = f.cards[j];
          continue;
        }
        if (std::find(union_scope.begin(), union_scope.end(), f.scope[j]) == union_scope.end()) {
          union_scope.push_back(f.scope[j]);
          union_cards.push_back(f.cards[j]);
        }
      }
    union_scope.push_back(v);
    union_cards.push_back(card_v);
    rest.push_back(emit(with, std::move(union_scope), std::move(union_cards), static_cast<std::size_t>(card_v)));
    live = std::move(rest);
  }
  // Everything left is over the target alone or scalar.
  result_buffer_ = emit(live, {target}, {target_card_}, 1).buffer;
}

EliminationPlan::Workspace EliminationPlan::make_workspace() const {
  Workspace ws;
  ws.buffers.resize(fixed_.size());
  ws.tables.resize(fixed_.size());
  for (std::size_t b = 0; b < fixed_.size(); ++b) {
    if (fixed_[b].empty()) {
      ws.buffers[b].assign(buffer_sizes_[b], 0.0);
      ws.tables[b] = ws.buffers[b].data();
    } else {
      ws.tables[b] = fixed_[b].data();
    }
  }
  return ws;
}

void EliminationPlan::evaluate(std::span<const double* const> root_pmfs, Workspace& ws, std::span<double> out) const {
  if (root_pmfs.size() != roots_.size()) fail(ErrorCode::DimensionMismatch, "one PMF per credal root expected");
  if (out.size() != static_cast<std::size_t>(target_card_)) fail(ErrorCode::DimensionMismatch, "output length");
  for (std::size_t r = 0; r < roots_.size(); ++r) {
    const RootInput& in = root_inputs_[r];
    double* buf = ws.buffers[static_cast<std::size_t>(in.buffer)].data();
    for (std::size_t s = 0; s < in.mask.size(); ++s) buf[s] = root_pmfs[r][s] * in.mask[s];
  }
  for (const Step& step : steps_) {
    auto& output = ws.buffers[static_cast<std::size_t>(step.output)];
    std::fill(output.begin(), output.end(), 0.0);
    const std::size_t n_in = step.inputs.size();
    for (std::size_t u = 0; u < step.union_size; ++u) {
      double product = 1.0;
      for (std::size_t j = 0; j < n_in; ++j)
        product *= ws.tables[static_cast<std::size_t>(step.inputs[j])][step.maps[j][u]];
      output[u / step.summed_cardinality] += product;
    }
  }
  const auto& result = ws.buffers[static_cast<std::size_t>(result_buffer_)];
  std::copy(result.begin(), result.end(), out.begin());
}

std::vector<double> EliminationPlan::evaluate(std::span<const std::vector<double>> root_pmfs) const {
  std::vector<const double*> pointers;
  for (std::size_t r = 0; r < root_pmfs.size(); ++r) {
    if (r < root_cards_.size() && root_pmfs[r].size() != static_cast<std::size_t>(root_cards_[r]))
      fail(ErrorCode::DimensionMismatch, "root PMF has the wrong length");
    pointers.push_back(root_pmfs[r].data());
  }
  Workspace ws = make_workspace();
  std::vector<double> out(static_cast<std::size_t>(target_card_));
  evaluate(pointers, ws, out);
  return out;
}

}  // namespace credal
