#include "credal/credal_network.hpp"

#include <algorithm>
#include <cmath>

#include "credal/empirical.hpp"
#include "credal/errors.hpp"

namespace credal {

std::string_view to_string(NodeRole role) {
  switch (role) {
    case NodeRole::endogenous: return "endogenous";
    case NodeRole::exogenous: return "exogenous";
    case NodeRole::auxiliary: return "auxiliary";
  }
  return "?";
}

namespace {

std::size_t parent_rows(const CredalNetwork& net, const CredalNode& node) {
  std::size_t rows = 1;
  for (int p : node.parents) rows *= static_cast<std::size_t>(net.node(p).cardinality);
  return rows;
}

void check_node(const CredalNetwork& net, const CredalNode& node, int self) {
  if (node.id.empty()) fail(ErrorCode::InvalidModel, "node without id");
  if (node.cardinality < 1) fail(ErrorCode::InvalidModel, "node '" + node.id + "' has cardinality < 1");
  for (int p : node.parents) {
    if (p < 0 || static_cast<std::size_t>(p) >= net.size() || p == self)
      fail(ErrorCode::InvalidModel, "node '" + node.id + "' has an invalid parent");
  }
  if (node.is_credal()) {
    if (!node.parents.empty()) fail(ErrorCode::InvalidModel, "credal node '" + node.id + "' is not a root");
    if (node.credal->dimension() != static_cast<std::size_t>(node.cardinality))
      fail(ErrorCode::DimensionMismatch, "credal set of '" + node.id + "' has the wrong dimension");
    return;
  }
  if (!node.cpt) fail(ErrorCode::InvalidModel, "node '" + node.id + "' has neither CPT nor credal set");
  const std::size_t rows = parent_rows(net, node);
  const auto card = static_cast<std::size_t>(node.cardinality);
  if (node.cpt->size() != rows * card) fail(ErrorCode::DimensionMismatch, "CPT of '" + node.id + "' has wrong size");
  for (std::size_t r = 0; r < rows; ++r) {
    double total = 0.0;
    for (std::size_t s = 0; s < card; ++s) {
      const double v = (*node.cpt)[r * card + s];
      if (!(v >= 0.0)) fail(ErrorCode::InvalidDistribution, "CPT of '" + node.id + "' has a negative entry");
      total += v;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance)
      fail(ErrorCode::InvalidDistribution, "CPT column of '" + node.id + "' does not sum to 1");
  }
}

std::shared_ptr<const std::vector<double>> constant_cpt(int cardinality, int state) {
  auto cpt = std::make_shared<std::vector<double>>(static_cast<std::size_t>(cardinality), 0.0);
  (*cpt)[static_cast<std::size_t>(state)] = 1.0;
  return cpt;
}

}  // namespace

int CredalNetwork::add_node(CredalNode node) {
  const int self = static_cast<int>(nodes_.size());
  check_node(*this, node, self);
  if (index_.count(node.id)) fail(ErrorCode::InvalidModel, "duplicate node id '" + node.id + "'");
  index_.emplace(node.id, self);
  nodes_.push_back(std::move(node));
  return self;
}

void CredalNetwork::replace(int index, CredalNode node) {
  check_node(*this, node, index);
  if (node.id != nodes_[static_cast<std::size_t>(index)].id) fail(ErrorCode::InvalidModel, "replace changes the id");
  nodes_[static_cast<std::size_t>(index)] = std::move(node);
}

std::optional<int> CredalNetwork::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int CredalNetwork::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  fail(ErrorCode::InvalidQuery, "unknown node '" + std::string(id) + "'");
}

std::vector<int> CredalNetwork::children(int index) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    for (int p : nodes_[i].parents)
      if (p == index) {
        out.push_back(static_cast<int>(i));
        break;
      }
  return out;
}

std::size_t CredalNetwork::arc_count() const {
  std::size_t n = 0;
  for (const auto& node : nodes_) n += node.parents.size();
  return n;
}

namespace {

template <typename RootFn>
CredalNetwork build_from_model(const CausalModel& model, RootFn&& root) {
  validate_model(model);
  std::vector<CredalNode> nodes(model.size());
  for (int v = 0; v < static_cast<int>(model.size()); ++v) {
    CredalNode& node = nodes[static_cast<std::size_t>(v)];
    node.id = model.variable(v).id;
    node.cardinality = model.cardinality(v);
    if (model.is_exogenous(v)) {
      node.role = NodeRole::exogenous;
      root(v, node);
    } else {
      node.role = NodeRole::endogenous;
      node.parents = model.equation_of(v)->parents;
      node.cpt = std::make_shared<const std::vector<double>>(equation_cpt(model, v));
    }
  }
  // Parents may be declared after their children: add every node as a
  // parentless placeholder, then install the real families.
  CredalNetwork net;
  for (const CredalNode& node : nodes) {
    CredalNode placeholder = node;
    placeholder.parents.clear();
    if (!placeholder.is_credal()) placeholder.cpt = constant_cpt(node.cardinality, 0);
    net.add_node(std::move(placeholder));
  }
  for (std::size_t v = 0; v < nodes.size(); ++v) net.replace(static_cast<int>(v), nodes[v]);
  return net;
}

}  // namespace

CredalNetwork compile(const CausalModel& model, const IdentificationResult& identification,
                      const VertexOptions& options) {
  if (identification.exogenous.size() != model.exogenous().size())
    fail(ErrorCode::MismatchedIdentification, "identification covers a different set of exogenous variables");
  return build_from_model(model, [&](int u, CredalNode& node) {
    const LinearConstraintSystem& system = identification.system_of(model.variable(u).id);
    if (system.dimension() != static_cast<std::size_t>(model.cardinality(u)))
      fail(ErrorCode::MismatchedIdentification, "credal set of '" + node.id + "' has the wrong dimension");
    node.credal = std::make_shared<const Polytope>(system, options);
  });
}

CredalNetwork compile_precise(const ProbabilisticSCM& pscm) {
  const CausalModel& model = pscm.model();
  return build_from_model(model, [&](int u, CredalNode& node) {
    node.cpt = std::make_shared<const std::vector<double>>(pscm.pmf_of(u));
  });
}

CredalNetwork intervene(const CredalNetwork& network, const StateMap& interventions) {
  CredalNetwork out = network;
  for (const auto& [id, state] : interventions) {
    const int i = out.index_of(id);
    CredalNode node = out.node(i);
    if (node.role == NodeRole::exogenous)
      fail(ErrorCode::InterveneExogenous, "cannot intervene on exogenous '" + id + "'");
    if (node.role != NodeRole::endogenous)
      fail(ErrorCode::InvalidQuery, "cannot intervene on auxiliary node '" + id + "'");
    if (state < 0 || state >= node.cardinality)
      fail(ErrorCode::InvalidQuery, "state " + std::to_string(state) + " out of range for '" + id + "'");
    node.parents.clear();
    node.cpt = constant_cpt(node.cardinality, state);
    node.intervened = true;
    out.replace(i, std::move(node));
  }
  return out;
}

std::string twin_id(std::string_view id) { return std::string(id) + std::string(kTwinSuffix); }

CredalNetwork twin(const CredalNetwork& network) {
  CredalNetwork out = network;
  std::vector<int> replica(network.size(), -1);
  int next = static_cast<int>(network.size());
  for (std::size_t i = 0; i < network.size(); ++i)
    if (network.node(static_cast<int>(i)).role == NodeRole::endogenous) replica[i] = next++;
  // Replica parents may point at replicas not yet added, so add
  // placeholders first and install the families afterwards.
  std::vector<CredalNode> copies;
  for (std::size_t i = 0; i < network.size(); ++i) {
    if (replica[i] < 0) continue;
    CredalNode copy = network.node(static_cast<int>(i));
    copy.id = twin_id(copy.id);
    for (int& p : copy.parents)
      if (replica[static_cast<std::size_t>(p)] >= 0) p = replica[static_cast<std::size_t>(p)];
    copies.push_back(std::move(copy));
  }
  for (const CredalNode& c : copies) {
    CredalNode placeholder = c;
    placeholder.parents.clear();
    placeholder.cpt = constant_cpt(c.cardinality, 0);
    out.add_node(std::move(placeholder));
  }
  for (const CredalNode& c : copies) out.replace(out.index_of(c.id), c);
  return out;
}

CredalNetwork attach_virtual_evidence(const CredalNetwork& network, std::string_view exogenous,
                                      const std::vector<double>& likelihood, std::string node_id) {
  const int u = network.index_of(exogenous);
  const CredalNode& root = network.node(u);
  if (root.role != NodeRole::exogenous)
    fail(ErrorCode::InvalidQuery, "virtual evidence attaches to exogenous nodes, '" + root.id + "' is not");
  if (likelihood.size() != static_cast<std::size_t>(root.cardinality))
    fail(ErrorCode::DimensionMismatch, "likelihood length differs from the cardinality of '" + root.id + "'");
  auto cpt = std::make_shared<std::vector<double>>();
  for (double l : likelihood) {
    if (!(l >= 0.0 && l <= 1.0)) fail(ErrorCode::LikelihoodOutOfRange, "likelihood outside [0, 1]");
    cpt->push_back(1.0 - l);
    cpt->push_back(l);
  }
  CredalNode z;
  z.id = node_id.empty() ? "Z_" + root.id : std::move(node_id);
  z.role = NodeRole::auxiliary;
  z.cardinality = 2;
  z.parents = {u};
  z.cpt = std::move(cpt);
  CredalNetwork out = network;
  out.add_node(std::move(z));
  return out;
}

CredalNetwork with_root_pmfs(const CredalNetwork& network, const std::map<int, std::vector<double>>& pmfs) {
  CredalNetwork out = network;
  for (const auto& [i, pmf] : pmfs) {
    CredalNode node = out.node(i);
    if (!node.is_credal()) fail(ErrorCode::InvalidQuery, "'" + node.id + "' is not a credal root");
    node.credal.reset();
    node.cpt = std::make_shared<const std::vector<double>>(pmf);
    out.replace(i, std::move(node));
  }
  return out;
}

void check_query(const CredalNetwork& network, const CausalQuery& query) {
  auto check_state = [&](const std::string& id, int state) {
    const int i = network.index_of(id);
    if (state < 0 || state >= network.node(i).cardinality)
      fail(ErrorCode::InvalidQuery, "state " + std::to_string(state) + " out of range for '" + id + "'");
  };
  for (const auto& [id, s] : query.interventions) check_state(id, s);
  for (const auto& [id, s] : query.evidence) {
    check_state(id, s);
    if (query.interventions.count(id))
      fail(ErrorCode::InvalidQuery, "'" + id + "' is both intervened and observed");
  }
  check_state(query.target, query.target_state);
  if (query.evidence.count(query.target)) fail(ErrorCode::InvalidQuery, "target '" + query.target + "' is observed");
}

}  // namespace credal
