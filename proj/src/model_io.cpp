#include "credal/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "credal/errors.hpp"

namespace credal {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema(const std::string& message) { fail(ErrorCode::ParseError, message); }

const Json& member(const Json& object, const char* key, const std::string& where) {
  if (!object.is_object()) schema(where + " must be an object");
  auto it = object.find(key);
  if (it == object.end()) schema(where + " lacks \"" + key + "\"");
  return *it;
}

void check_id(const std::string& id) {
  if (id.empty()) fail(ErrorCode::InvalidModel, "empty id");
  if (id.find(kTwinSuffix) != std::string::npos)
    fail(ErrorCode::InvalidModel, "id '" + id + "' contains the reserved suffix " + std::string(kTwinSuffix));
}

Json constraint_to_json(const LinearConstraint& c) {
  Json j;
  j["coefficients"] = c.coefficients;
  j["relation"] = std::string(to_string(c.relation));
  j["rhs"] = c.rhs;
  if (!c.label.empty()) j["label"] = c.label;
  return j;
}

LinearConstraint constraint_from_json(const Json& j, const std::string& where) {
  LinearConstraint c;
  c.coefficients = member(j, "coefficients", where).get<std::vector<double>>();
  c.relation = j.contains("relation") ? parse_relation(j.at("relation").get<std::string>()) : Relation::equal;
  c.rhs = member(j, "rhs", where).get<double>();
  if (j.contains("label")) c.label = j.at("label").get<std::string>();
  return c;
}

Json system_to_json(const LinearConstraintSystem& s) {
  Json j;
  j["dimension"] = s.dimension();
  Json rows = Json::array();
  for (const auto& c : s.equalities()) rows.push_back(constraint_to_json(c));
  for (const auto& c : s.inequalities()) rows.push_back(constraint_to_json(c));
  j["constraints"] = std::move(rows);
  return j;
}

LinearConstraintSystem system_from_json(const Json& j, const std::string& where) {
  LinearConstraintSystem s(member(j, "dimension", where).get<std::size_t>());
  const Json& rows = member(j, "constraints", where);
  if (!rows.is_array()) schema(where + ".constraints must be an array");
  for (const Json& row : rows) s.add(constraint_from_json(row, where));
  return s;
}

std::string_view kind_name(VariableKind k) { return k == VariableKind::endogenous ? "endogenous" : "exogenous"; }

VariableKind parse_kind(const std::string& text) {
  if (text == "endogenous") return VariableKind::endogenous;
  if (text == "exogenous") return VariableKind::exogenous;
  schema("unknown variable kind '" + text + "'");
}

NodeRole parse_role(const std::string& text) {
  if (text == "endogenous") return NodeRole::endogenous;
  if (text == "exogenous") return NodeRole::exogenous;
  if (text == "auxiliary") return NodeRole::auxiliary;
  schema("unknown node role '" + text + "'");
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::exception& e) {
    schema(std::string("malformed JSON: ") + e.what());
  }
}

ModelDocument document_from_json(const Json& root) {
  if (!root.is_object()) schema("model file must hold a JSON object");
  ModelDocument doc;
  std::vector<Variable> variables;
  for (const Json& v : member(root, "variables", "model")) {
    Variable var;
    var.id = member(v, "id", "variable").get<std::string>();
    check_id(var.id);
    var.kind = parse_kind(member(v, "kind", "variable '" + var.id + "'").get<std::string>());
    var.cardinality = member(v, "cardinality", "variable '" + var.id + "'").get<int>();
    variables.push_back(std::move(var));
  }
  std::vector<StructuralEquation> equations;
  for (const Json& e : member(root, "equations", "model")) {
    StructuralEquation eq;
    eq.child = member(e, "child", "equation").get<std::string>();
    eq.parents = member(e, "parents", "equation of '" + eq.child + "'").get<std::vector<std::string>>();
    eq.table = member(e, "table", "equation of '" + eq.child + "'").get<std::vector<int>>();
    equations.push_back(std::move(eq));
  }
  doc.model = CausalModel(std::move(variables), std::move(equations));
  const CausalModel& model = doc.model;

  if (root.contains("exogenous_pmfs")) {
    const Json& pmfs = root.at("exogenous_pmfs");
    if (!pmfs.is_object()) schema("exogenous_pmfs must be an object");
    std::vector<std::vector<double>> aligned;
    for (int u : model.exogenous()) {
      const std::string& id = model.variable(u).id;
      aligned.push_back(member(pmfs, id.c_str(), "exogenous_pmfs").get<std::vector<double>>());
    }
    for (const auto& [id, value] : pmfs.items()) {
      const auto i = model.find(id);
      if (!i || !model.is_exogenous(*i)) fail(ErrorCode::InvalidModel, "exogenous_pmfs names unknown '" + id + "'");
    }
    ProbabilisticSCM check(model, aligned);
    doc.exogenous_pmfs = std::move(aligned);
  }
  if (root.contains("empirical")) {
    const Json& e = root.at("empirical");
    doc.empirical = make_empirical(model, member(e, "variable_order", "empirical").get<std::vector<std::string>>(),
                                   member(e, "probabilities", "empirical").get<std::vector<double>>());
    if (e.contains("floor")) {
      doc.empirical_floor = e.at("floor").get<double>();
      if (!(doc.empirical_floor >= 0.0)) fail(ErrorCode::InvalidDistribution, "empirical floor must be nonnegative");
    }
  }
  if (root.contains("expert_constraints")) {
    for (const Json& c : root.at("expert_constraints")) {
      ExpertConstraint ec;
      ec.exogenous = member(c, "exogenous", "expert constraint").get<std::string>();
      const auto u = model.find(ec.exogenous);
      if (!u || !model.is_exogenous(*u))
        fail(ErrorCode::InvalidModel, "expert constraint on unknown exogenous '" + ec.exogenous + "'");
      ec.constraint = constraint_from_json(c, "expert constraint");
      if (ec.constraint.coefficients.size() != static_cast<std::size_t>(model.cardinality(*u)))
        fail(ErrorCode::DimensionMismatch, "expert constraint on '" + ec.exogenous + "' has the wrong length");
      doc.expert_constraints.push_back(std::move(ec));
    }
  }
  if (root.contains("identification")) {
    const Json& annex = root.at("identification");
    if (!annex.is_object()) schema("identification must be an object");
    IdentificationResult ident;
    for (int u : model.exogenous()) {
      const std::string& id = model.variable(u).id;
      if (!annex.contains(id)) fail(ErrorCode::MismatchedIdentification, "identification lacks '" + id + "'");
      LinearConstraintSystem s = system_from_json(member(annex, id.c_str(), "identification"), "identification." + id);
      if (s.dimension() != static_cast<std::size_t>(model.cardinality(u)))
        fail(ErrorCode::MismatchedIdentification, "identification of '" + id + "' has the wrong dimension");
      ident.exogenous.push_back(id);
      ident.systems.push_back(std::move(s));
    }
    if (annex.size() != ident.exogenous.size())
      fail(ErrorCode::MismatchedIdentification, "identification names variables that are not exogenous");
    finalize_identification(ident);
    doc.identification = std::move(ident);
  }
  return doc;
}

}  // namespace

ModelDocument parse_model(std::string_view text) {
  const Json root = parse_json(text);
  try {
    return document_from_json(root);
  } catch (const Json::exception& e) {
    schema(std::string("model file: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot read '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ModelDocument load_model(const std::filesystem::path& path) { return parse_model(read_text_file(path)); }

std::string serialize_model(const ModelDocument& doc) {
  const CausalModel& model = doc.model;
  Json root;
  Json variables = Json::array();
  for (const Variable& v : model.variables())
    variables.push_back({{"id", v.id}, {"kind", std::string(kind_name(v.kind))}, {"cardinality", v.cardinality}});
  root["variables"] = std::move(variables);
  Json equations = Json::array();
  for (const StructuralEquation& e : model.equations())
    equations.push_back({{"child", e.child}, {"parents", e.parents}, {"table", e.table}});
  root["equations"] = std::move(equations);
  if (doc.exogenous_pmfs) {
    Json pmfs = Json::object();
    for (std::size_t i = 0; i < model.exogenous().size(); ++i)
      pmfs[model.variable(model.exogenous()[i]).id] = (*doc.exogenous_pmfs)[i];
    root["exogenous_pmfs"] = std::move(pmfs);
  }
  if (doc.empirical) {
    Json e;
    e["variable_order"] = doc.empirical->variable_order();
    e["probabilities"] = doc.empirical->probabilities();
    if (doc.empirical_floor > 0.0) e["floor"] = doc.empirical_floor;
    root["empirical"] = std::move(e);
  }
  if (!doc.expert_constraints.empty()) {
    Json list = Json::array();
    for (const ExpertConstraint& ec : doc.expert_constraints) {
      Json c;
      c["exogenous"] = ec.exogenous;
      for (auto& [k, v] : constraint_to_json(ec.constraint).items()) c[k] = v;
      list.push_back(std::move(c));
    }
    root["expert_constraints"] = std::move(list);
  }
  if (doc.identification) {
    Json annex = Json::object();
    for (std::size_t i = 0; i < doc.identification->exogenous.size(); ++i)
      annex[doc.identification->exogenous[i]] = system_to_json(doc.identification->systems[i]);
    root["identification"] = std::move(annex);
  }
  return root.dump(2) + "\n";
}

EmpiricalDistribution document_empirical(const ModelDocument& doc) {
  if (!doc.empirical) fail(ErrorCode::InvalidConfig, "the model file has no empirical distribution");
  return doc.empirical_floor > 0.0 ? doc.empirical->with_floor(doc.empirical_floor) : *doc.empirical;
}

ProbabilisticSCM document_pscm(const ModelDocument& doc) {
  if (!doc.exogenous_pmfs) fail(ErrorCode::InvalidConfig, "the model file has no exogenous PMFs");
  return ProbabilisticSCM(doc.model, *doc.exogenous_pmfs);
}

std::string serialize_network(const CredalNetwork& network) {
  Json nodes = Json::array();
  for (const CredalNode& node : network.nodes()) {
    Json j;
    j["id"] = node.id;
    j["role"] = std::string(to_string(node.role));
    j["cardinality"] = node.cardinality;
    Json parents = Json::array();
    for (int p : node.parents) parents.push_back(network.node(p).id);
    j["parents"] = std::move(parents);
    if (node.intervened) j["intervened"] = true;
    if (node.is_credal()) j["ccpt"] = system_to_json(node.credal->system());
    else j["cpt"] = *node.cpt;
    nodes.push_back(std::move(j));
  }
  Json root;
  root["nodes"] = std::move(nodes);
  return root.dump(2) + "\n";
}

CredalNetwork parse_network(std::string_view text) {
  const Json root = parse_json(text);
  try {
    std::vector<CredalNode> nodes;
    std::vector<std::vector<std::string>> parent_ids;
    for (const Json& j : member(root, "nodes", "network")) {
      CredalNode node;
      node.id = member(j, "id", "node").get<std::string>();
      node.role = parse_role(member(j, "role", "node '" + node.id + "'").get<std::string>());
      node.cardinality = member(j, "cardinality", "node '" + node.id + "'").get<int>();
      node.intervened = j.value("intervened", false);
      if (j.contains("ccpt")) {
        node.credal = std::make_shared<const Polytope>(system_from_json(j.at("ccpt"), "node '" + node.id + "'"));
      } else {
        node.cpt = std::make_shared<const std::vector<double>>(
            member(j, "cpt", "node '" + node.id + "'").get<std::vector<double>>());
      }
      parent_ids.push_back(member(j, "parents", "node '" + node.id + "'").get<std::vector<std::string>>());
      nodes.push_back(std::move(node));
    }
    // Parents may come later in the list: placeholders first.
    CredalNetwork net;
    for (const CredalNode& node : nodes) {
      CredalNode placeholder = node;
      if (!placeholder.is_credal()) {
        auto cpt = std::make_shared<std::vector<double>>(static_cast<std::size_t>(std::max(node.cardinality, 1)), 0.0);
        (*cpt)[0] = 1.0;
        placeholder.cpt = std::move(cpt);
      }
      net.add_node(std::move(placeholder));
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (const std::string& p : parent_ids[i]) {
        const auto idx = net.find(p);
        if (!idx) fail(ErrorCode::InvalidModel, "node '" + nodes[i].id + "' has unknown parent '" + p + "'");
        nodes[i].parents.push_back(*idx);
      }
      net.replace(static_cast<int>(i), nodes[i]);
    }
    return net;
  } catch (const Json::exception& e) {
    schema(std::string("network file: ") + e.what());
  }
}

}  // namespace credal
