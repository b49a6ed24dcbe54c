#include "credal/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "credal/bench.hpp"
#include "credal/credal_network.hpp"
#include "credal/identification.hpp"
#include "credal/inference.hpp"
#include "credal/model_io.hpp"

namespace credal::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidQuery:
    case ErrorCode::InterveneExogenous:
    case ErrorCode::LikelihoodOutOfRange:
      return kUsage;
    case ErrorCode::ParseError:
      return kParse;
    case ErrorCode::InvalidModel:
    case ErrorCode::CyclicGraph:
    case ErrorCode::ExogenousWithParents:
    case ErrorCode::MultipleExogenousParents:
    case ErrorCode::OrphanExogenous:
    case ErrorCode::NonSurjectiveEquation:
    case ErrorCode::CardinalityOverflow:
    case ErrorCode::InvalidDistribution:
    case ErrorCode::EmptyDataset:
    case ErrorCode::NonPositiveCell:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NotMarkovian:
    case ErrorCode::NotQuasiMarkovian:
    case ErrorCode::MismatchedIdentification:
      return kValidation;
    case ErrorCode::InfeasibleIdentification:
    case ErrorCode::ZeroConditioningEvent:
    case ErrorCode::Infeasible:
      return kInfeasible;
    case ErrorCode::Unbounded:
    case ErrorCode::VertexExplosion:
    case ErrorCode::DenominatorVanishes:
    case ErrorCode::ZeroEvidenceProbability:
    case ErrorCode::ZeroEvidenceEverywhere:
    case ErrorCode::Timeout:
      return kInference;
    case ErrorCode::EmptyRecords:
      return kOther;
  }
  return kOther;
}

namespace {

// Reads option values from a JSON object; nested objects address
// subcommands, e.g. {"seed": 3, "query": {"target": "X3"}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    nlohmann::ordered_json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames()[0];
      if (opt->count() > 0) {
        const auto& results = opt->results();
        if (results.size() == 1) j[name] = results[0];
        else j[name] = results;
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      const auto nested = nlohmann::ordered_json::parse(to_config(sub, default_also, false, ""));
      if (!nested.empty()) j[sub->get_name()] = nested;
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v, const std::string& name) {
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
      return buf;
    }
    if (v.is_string()) return v.get<std::string>();
    throw CLI::ConversionError("cannot read config value of '" + name + "'");
  }

  static void collect(const nlohmann::json& j, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_object()) {
        auto nested = parents;
        nested.push_back(it.key());
        collect(*it, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it->is_array()) {
        for (const auto& v : *it) item.inputs.push_back(scalar(v, it.key()));
      } else {
        item.inputs.push_back(scalar(*it, it.key()));
      }
      items.push_back(std::move(item));
    }
  }
};

std::pair<std::string, int> parse_assignment(const std::string& text) {
  const auto eq = text.rfind('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
    fail(ErrorCode::InvalidConfig, "expected ID=STATE, got '" + text + "'");
  int state = 0;
  const char* first = text.data() + eq + 1;
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, state);
  if (ec != std::errc{} || ptr != last) fail(ErrorCode::InvalidConfig, "state in '" + text + "' is not an integer");
  return {text.substr(0, eq), state};
}

StateMap parse_assignments(const std::vector<std::string>& items) {
  StateMap out;
  for (const std::string& item : items) {
    auto [id, state] = parse_assignment(item);
    if (!out.emplace(id, state).second) fail(ErrorCode::InvalidConfig, "'" + id + "' given twice");
  }
  return out;
}

// "Z" or "Z=k"
std::pair<std::string, std::optional<int>> parse_target(const std::string& text) {
  if (text.find('=') == std::string::npos) return {text, std::nullopt};
  auto [id, state] = parse_assignment(text);
  return {id, state};
}

EmpiricalDistribution read_data_csv(const std::filesystem::path& path, const CausalModel& model, double floor) {
  std::istringstream in(read_text_file(path));
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) {
      cell.erase(0, cell.find_first_not_of(" \t\r"));
      cell.erase(cell.find_last_not_of(" \t\r") + 1);
      cells.push_back(cell);
    }
    return cells;
  };
  if (!std::getline(in, line)) fail(ErrorCode::EmptyDataset, "data file '" + path.string() + "' is empty");
  const std::vector<std::string> header = split(line);
  std::vector<int> cards;
  for (const std::string& id : header) {
    const auto i = model.find(id);
    if (!i || model.is_exogenous(*i)) fail(ErrorCode::ParseError, "data column '" + id + "' is not endogenous");
    cards.push_back(model.cardinality(*i));
  }
  std::vector<std::vector<int>> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      fail(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": wrong number of fields");
    std::vector<int> record;
    for (const std::string& c : cells) {
      int v = 0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc{} || ptr != c.data() + c.size())
        fail(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": '" + c + "' is not a state");
      record.push_back(v);
    }
    records.push_back(std::move(record));
  }
  return empirical_from_data(records, header, cards, floor);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10f", v);
  return buf;
}

struct Inputs {
  std::string model_path;
  std::string data_path;
  std::optional<double> floor;
};

struct Pipeline {
  ModelDocument doc;
  IdentificationResult ident;
  CredalNetwork network;
};

IdentificationResult identification_of(const ModelDocument& doc, const Inputs& in) {
  const CausalModel& model = doc.model;
  IdentificationResult ident;
  if (!in.data_path.empty()) {
    const auto empirical = read_data_csv(in.data_path, model, in.floor.value_or(0.0));
    ident = identify(model, empirical);
  } else if (doc.empirical) {
    const double floor = in.floor.value_or(doc.empirical_floor);
    const auto empirical = floor > 0.0 ? doc.empirical->with_floor(floor) : *doc.empirical;
    ident = identify(model, empirical);
  } else if (doc.identification) {
    ident = *doc.identification;
  } else if (doc.exogenous_pmfs) {
    ident = identify(model, PscmMarginals(document_pscm(doc)));
  } else {
    fail(ErrorCode::InvalidConfig, "no data: give --data, or an empirical, identification or exogenous_pmfs block");
  }
  if (!doc.expert_constraints.empty()) ident = add_expert_constraints(std::move(ident), doc.expert_constraints);
  return ident;
}

Pipeline build(const Inputs& in) {
  Pipeline p{load_model(in.model_path), {}, {}};
  validate_model(p.doc.model);
  p.ident = identification_of(p.doc, in);
  p.network = compile(p.doc.model, p.ident);
  return p;
}

struct InferenceOptions {
  std::string method = "exact";
  int restarts = 10;
  int max_iters = 100;
  double tol = 1e-6;
  double timeout = 0.0;
  std::uint64_t max_combinations = 50'000'000;
};

void print_interval(std::ostream& out, const std::string& target, int state, const IntervalResult& r) {
  out << "target: " << target << '\n'
      << "state: " << state << '\n'
      << "lower: " << fmt(r.lower) << '\n'
      << "upper: " << fmt(r.upper) << '\n'
      << "width: " << fmt(r.width()) << '\n'
      << "point: " << (r.point ? "true" : "false") << '\n'
      << "method: " << to_string(r.method) << '\n';
  if (r.method == Method::exact) {
    out << "combinations: " << r.combinations << '\n' << "skipped: " << r.skipped << '\n';
  } else {
    out << "iterations: " << r.iterations << '\n' << "restarts: " << r.restarts << '\n';
  }
}

// Bounds for one target state or all of them, printed as records.
void answer(std::ostream& out, const CredalNetwork& net, CausalQuery q, std::optional<int> state,
            const std::string& shown_target, const InferenceOptions& o, std::uint64_t seed) {
  const Method method = parse_method(o.method);
  std::optional<Clock::time_point> deadline;
  if (o.timeout > 0.0)
    deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(o.timeout));
  const int card = net.node(net.index_of(q.target)).cardinality;
  if (state && (*state < 0 || *state >= card))
    fail(ErrorCode::InvalidQuery, "state " + std::to_string(*state) + " out of range for '" + q.target + "'");
  q.target_state = state.value_or(0);
  check_query(net, q);
  std::vector<std::pair<int, IntervalResult>> results;
  if (method == Method::exact) {
    ExactConfig ec;
    ec.max_combinations = o.max_combinations;
    ec.deadline = deadline;
    const auto all = bounds_exact_all(net, q, ec);
    for (int t = 0; t < card; ++t)
      if (!state || *state == t) results.emplace_back(t, all[static_cast<std::size_t>(t)]);
  } else {
    ApproxConfig ac;
    ac.restarts = o.restarts;
    ac.max_iters = o.max_iters;
    ac.tol = o.tol;
    ac.seed = seed;
    ac.deadline = deadline;
    for (int t = 0; t < card; ++t) {
      if (state && *state != t) continue;
      q.target_state = t;
      results.emplace_back(t, bounds_approx(net, q, ac));
    }
  }
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (i > 0) out << '\n';
    print_interval(out, shown_target, results[i].first, results[i].second);
  }
}

void add_inference_options(CLI::App* cmd, InferenceOptions& o) {
  cmd->add_option("--method", o.method, "exact or approx")->check(CLI::IsMember({"exact", "approx"}));
  cmd->add_option("--restarts", o.restarts, "approx: restarts per bound")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", o.max_iters, "approx: sweeps per restart")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", o.tol, "approx: stop when a sweep improves less")->check(CLI::PositiveNumber);
  cmd->add_option("--timeout", o.timeout, "seconds, 0 for none")->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-combinations", o.max_combinations, "exact: vertex combination cap");
}

void add_inputs(CLI::App* cmd, Inputs& in) {
  cmd->add_option("model", in.model_path, "model file (JSON)")->required();
  cmd->add_option("--data", in.data_path, "CSV of complete records, header of endogenous ids");
  cmd->add_option("--floor", in.floor, "lift every empirical cell to at least this, then renormalize")
      ->check(CLI::NonNegativeNumber);
}

void cmd_validate(std::ostream& out, const std::string& path) {
  const ModelDocument doc = load_model(path);
  const CausalModel& m = doc.model;
  const ModelClass c = validate_model(m);
  auto ids = [&](const std::vector<int>& v) {
    std::string s;
    for (int i : v) s += (s.empty() ? "" : " ") + m.variable(i).id;
    return s;
  };
  out << "classification: " << to_string(c) << '\n'
      << "variables: " << m.size() << '\n'
      << "endogenous: " << ids(m.endogenous()) << '\n'
      << "exogenous: " << ids(m.exogenous()) << '\n'
      << "equations: " << m.equations().size() << '\n'
      << "topological_order: " << ids(topological_order(m)) << '\n';
  const auto partial = non_surjective_restrictions(m);
  if (!partial.empty()) {
    out << "non_surjective_restrictions:";
    for (const auto& id : partial) out << ' ' << id;
    out << '\n';
  }
  if (doc.exogenous_pmfs) out << "exogenous_pmfs: present\n";
  if (doc.empirical) out << "empirical: present\n";
  if (doc.identification) out << "identification: present\n";
  if (!doc.expert_constraints.empty()) out << "expert_constraints: " << doc.expert_constraints.size() << '\n';
}

void cmd_identify(std::ostream& out, const Inputs& in, bool vertices, const std::string& output) {
  ModelDocument doc = load_model(in.model_path);
  validate_model(doc.model);
  const IdentificationResult ident = identification_of(doc, in);
  for (std::size_t i = 0; i < ident.exogenous.size(); ++i) {
    const LinearConstraintSystem& s = ident.systems[i];
    const SystemDiagnostics& d = ident.diagnostics[i];
    if (i > 0) out << '\n';
    out << "exogenous: " << ident.exogenous[i] << '\n'
        << "cardinality: " << s.dimension() << '\n'
        << "constraints: " << d.constraint_count << '\n'
        << "rank: " << d.rank << '\n'
        << "feasible: " << (d.feasible ? "true" : "false") << '\n';
    auto print_row = [&](const LinearConstraint& c) {
      out << "constraint:";
      for (double v : c.coefficients) out << ' ' << fmt(v);
      out << ' ' << to_string(c.relation) << ' ' << fmt(c.rhs);
      if (!c.label.empty()) out << "  # " << c.label;
      out << '\n';
    };
    for (const auto& c : s.equalities()) print_row(c);
    for (const auto& c : s.inequalities()) print_row(c);
    if (vertices) {
      const VertexSet vs = vertex_enumeration(s);
      out << "vertices: " << vs.vertices.size() << '\n';
      for (const auto& v : vs.vertices) {
        out << "vertex:";
        for (double x : v) out << ' ' << fmt(x);
        out << '\n';
      }
    }
  }
  if (!output.empty()) {
    doc.identification = ident;
    std::ofstream file(output, std::ios::binary);
    if (!file) fail(ErrorCode::InvalidConfig, "cannot write '" + output + "'");
    file << serialize_model(doc);
  }
}

struct BenchOptions {
  std::string topology = "tree";
  std::vector<int> lengths{4, 5, 6, 7, 8, 9, 10};
  int iterations = 100;
  std::string method = "both";
  double timeout = 300.0;
  int endo_card = 2;
  int exo_card = 6;
  std::string out_dir = ".";
};

void cmd_bench(std::ostream& out, std::ostream& err, const BenchOptions& o, const InferenceOptions& io,
               std::uint64_t seed) {
  BenchConfig base;
  base.topology = parse_topology(o.topology);
  base.iterations = o.iterations;
  base.endo_cardinality = o.endo_card;
  base.exo_cardinality = o.exo_card;
  base.timeout_seconds = o.timeout;
  base.seed = seed;
  base.approx.restarts = io.restarts;
  base.approx.max_iters = io.max_iters;
  base.approx.tol = io.tol;
  if (o.method == "both") base.methods = {Method::exact, Method::approx};
  else base.methods = {parse_method(o.method)};
  for (int l : o.lengths) {
    BenchConfig c = base;
    c.length = l;
    validate_config(c);
  }
  std::vector<BenchRecord> records;
  for (int l : o.lengths) {
    BenchConfig c = base;
    c.length = l;
    auto part = run_benchmark(c);
    records.insert(records.end(), part.begin(), part.end());
  }
  const auto rows = summarize(records);
  std::filesystem::create_directories(o.out_dir);
  const auto records_path = std::filesystem::path(o.out_dir) / "records.csv";
  const auto summary_path = std::filesystem::path(o.out_dir) / "summary.csv";
  std::ofstream rf(records_path), sf(summary_path);
  if (!rf || !sf) fail(ErrorCode::InvalidConfig, "cannot write into '" + o.out_dir + "'");
  write_records_csv(rf, records);
  write_summary_csv(sf, rows);
  write_summary_csv(out, rows);
  err << "wrote " << records.size() << " records to " << records_path.string() << " and " << rows.size()
      << " summary rows to " << summary_path.string() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Causal bounds from structural causal models and observational data via credal networks", "credal"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option values");
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  int workers = 0;
  app.add_option("--seed", seed, "random seed (default: $CREDAL_SEED or 0)")->envname("CREDAL_SEED");
  app.add_option("--workers", workers, "worker threads (default: available parallelism)")
      ->check(CLI::NonNegativeNumber);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a model file and report its class");
  validate->add_option("model", validate_path, "model file (JSON)")->required();

  Inputs identify_in;
  bool show_vertices = false;
  std::string identify_output;
  auto* identify_cmd = app.add_subcommand("identify", "compute the credal set of every exogenous variable");
  add_inputs(identify_cmd, identify_in);
  identify_cmd->add_flag("--vertices", show_vertices, "also enumerate vertices");
  identify_cmd->add_option("--output", identify_output, "write the model with an identification block");

  Inputs query_in;
  InferenceOptions query_opts;
  std::vector<std::string> query_do, query_evidence;
  std::string query_target;
  auto* query = app.add_subcommand("query", "bound P(target | do(...), evidence)");
  add_inputs(query, query_in);
  add_inference_options(query, query_opts);
  query->add_option("--do", query_do, "intervention ID=STATE (repeatable)");
  query->add_option("--evidence", query_evidence, "observation ID=STATE (repeatable)");
  query->add_option("--target", query_target, "target ID or ID=STATE")->required();

  Inputs cf_in;
  InferenceOptions cf_opts;
  std::vector<std::string> cf_observed, cf_do;
  std::string cf_target;
  auto* counterfactual = app.add_subcommand("counterfactual", "bound a counterfactual through the twin network");
  add_inputs(counterfactual, cf_in);
  add_inference_options(counterfactual, cf_opts);
  counterfactual->add_option("--observed", cf_observed, "factual observation ID=STATE (repeatable)");
  counterfactual->add_option("--do-prime", cf_do, "hypothetical intervention ID=STATE (repeatable)");
  counterfactual->add_option("--target-prime", cf_target, "hypothetical-world target ID or ID=STATE")->required();

  BenchOptions bench_opts;
  InferenceOptions bench_inference;
  auto* bench = app.add_subcommand("bench", "run the random-model benchmark and write CSV files");
  bench->add_option("--topology", bench_opts.topology, "tree, polytree or multiply_connected")
      ->check(CLI::IsMember({"tree", "polytree", "multiply_connected"}));
  bench->add_option("--length", bench_opts.lengths, "model lengths (repeatable)");
  bench->add_option("--iterations", bench_opts.iterations, "models per length")->check(CLI::PositiveNumber);
  bench->add_option("--method", bench_opts.method, "exact, approx or both")
      ->check(CLI::IsMember({"exact", "approx", "both"}));
  bench->add_option("--timeout", bench_opts.timeout, "seconds per query")->check(CLI::PositiveNumber);
  bench->add_option("--endo-card", bench_opts.endo_card, "endogenous cardinality");
  bench->add_option("--exo-card", bench_opts.exo_card, "exogenous cardinality");
  bench->add_option("--out-dir", bench_opts.out_dir, "directory for records.csv and summary.csv");
  bench->add_option("--restarts", bench_inference.restarts, "approx: restarts per bound")->check(CLI::PositiveNumber);
  bench->add_option("--max-iters", bench_inference.max_iters, "approx: sweeps per restart")->check(CLI::PositiveNumber);
  bench->add_option("--tol", bench_inference.tol, "approx: stop when a sweep improves less")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  if (workers > 0) omp_set_num_threads(workers);

  try {
    if (validate->parsed()) {
      cmd_validate(out, validate_path);
    } else if (identify_cmd->parsed()) {
      cmd_identify(out, identify_in, show_vertices, identify_output);
    } else if (query->parsed()) {
      const auto [target, state] = parse_target(query_target);
      CausalQuery q;
      q.interventions = parse_assignments(query_do);
      q.evidence = parse_assignments(query_evidence);
      q.target = target;
      if (q.interventions.count(target)) fail(ErrorCode::InvalidConfig, "--do on the target '" + target + "'");
      const Pipeline p = build(query_in);
      answer(out, p.network, q, state, target, query_opts, seed);
    } else if (counterfactual->parsed()) {
      const auto [target, state] = parse_target(cf_target);
      CounterfactualQuery cq;
      cq.observed = parse_assignments(cf_observed);
      cq.hypothetical = parse_assignments(cf_do);
      cq.target = target;
      if (cq.hypothetical.count(target)) fail(ErrorCode::InvalidConfig, "--do-prime on the target '" + target + "'");
      const Pipeline p = build(cf_in);
      const auto [twin_net, q] = counterfactual_network(p.network, cq);
      answer(out, twin_net, q, state, q.target, cf_opts, seed);
    } else if (bench->parsed()) {
      cmd_bench(out, err, bench_opts, bench_inference, seed);
    }
  } catch (const CredalError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOk;
}

}  // namespace credal::cli
