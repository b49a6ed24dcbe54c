#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "credal/geometry.hpp"
#include "credal/identification.hpp"
#include "credal/scm.hpp"

namespace credal {

enum class NodeRole { endogenous, exogenous, auxiliary };

std::string_view to_string(NodeRole role);

// A node carries either a precise CPT or, at a root, a credal set.
// CPT layout is [parent_row * cardinality + state] with parent rows row-major
// over `parents`, i.e. row-major over (parents..., node).
struct CredalNode {
  std::string id;
  NodeRole role = NodeRole::endogenous;
  int cardinality = 1;
  std::vector<int> parents;
  std::shared_ptr<const std::vector<double>> cpt;
  std::shared_ptr<const Polytope> credal;
  bool intervened = false;

  bool is_credal() const { return credal != nullptr; }
};

// Immutable after construction by the free functions below; copies share CPT
// and polytope storage.
class CredalNetwork {
 public:
  CredalNetwork() = default;

  // Checks parents exist, CPT shape and normalization, credal only at roots.
  int add_node(CredalNode node);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<CredalNode>& nodes() const { return nodes_; }
  const CredalNode& node(int index) const { return nodes_[static_cast<std::size_t>(index)]; }
  std::optional<int> find(std::string_view id) const;
  // Throws InvalidQuery for unknown ids.
  int index_of(std::string_view id) const;
  std::vector<int> children(int index) const;
  std::size_t arc_count() const;

  // Replaces a node's CPT and parents; used by surgery.
  void replace(int index, CredalNode node);

 private:
  std::vector<CredalNode> nodes_;
  std::unordered_map<std::string, int> index_;
};

// One node per model variable in declaration order: SE-derived degenerate
// CPTs for endogenous nodes, K(U) at exogenous roots.
CredalNetwork compile(const CausalModel& model, const IdentificationResult& identification,
                      const VertexOptions& options = {});

// The PSCM as a Bayesian network (precise exogenous PMFs).
CredalNetwork compile_precise(const ProbabilisticSCM& pscm);

using StateMap = std::map<std::string, int>;

// Surgery: each target loses its parents and becomes a constant.
CredalNetwork intervene(const CredalNetwork& network, const StateMap& interventions);

inline constexpr std::string_view kTwinSuffix = "'";
std::string twin_id(std::string_view id);

// Adds a replica X' of every endogenous node, sharing exogenous parents and
// CPTs; replicas follow the original node order.
CredalNetwork twin(const CredalNetwork& network);

// Binary child Z of U with P(Z = 1 | u) = likelihood[u]; state 1 is the
// positive observation.
CredalNetwork attach_virtual_evidence(const CredalNetwork& network, std::string_view exogenous,
                                      const std::vector<double>& likelihood, std::string node_id = {});

// Replaces credal roots by precise PMFs (e.g. a vertex selection).
CredalNetwork with_root_pmfs(const CredalNetwork& network, const std::map<int, std::vector<double>>& pmfs);

struct CausalQuery {
  StateMap interventions;
  StateMap evidence;
  std::string target;
  int target_state = 0;
};

// Checks ids, state ranges and disjointness of interventions and evidence.
void check_query(const CredalNetwork& network, const CausalQuery& query);

struct CounterfactualQuery {
  StateMap observed;      // factual world evidence, unprimed ids
  StateMap hypothetical;  // interventions in the hypothetical world, unprimed ids
  std::string target;     // unprimed id; the replica is queried
  int target_state = 0;
};

}  // namespace credal
