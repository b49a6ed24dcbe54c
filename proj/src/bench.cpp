#include "credal/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include "credal/empirical.hpp"
#include "credal/errors.hpp"
#include "credal/identification.hpp"
#include "credal/random.hpp"

namespace credal {

std::string_view to_string(Topology t) {
  switch (t) {
    case Topology::tree: return "tree";
    case Topology::polytree: return "polytree";
    case Topology::multiply_connected: return "multiply_connected";
  }
  return "?";
}

Topology parse_topology(std::string_view text) {
  if (text == "tree") return Topology::tree;
  if (text == "polytree") return Topology::polytree;
  if (text == "multiply_connected") return Topology::multiply_connected;
  fail(ErrorCode::InvalidConfig, "unknown topology '" + std::string(text) + "'");
}

void validate_config(const BenchConfig& c) {
  const int l = c.length;
  switch (c.topology) {
    case Topology::tree:
      if (l < 3) fail(ErrorCode::InvalidConfig, "tree length must be at least 3");
      break;
    case Topology::polytree:
      if (l < 4 || l % 4 != 0) fail(ErrorCode::InvalidConfig, "polytree length must be a positive multiple of 4");
      break;
    case Topology::multiply_connected:
      if (l < 4 || l % 2 != 0) fail(ErrorCode::InvalidConfig, "multiply connected length must be even and at least 4");
      break;
  }
  if (c.iterations < 1) fail(ErrorCode::InvalidConfig, "iterations must be positive");
  if (c.endo_cardinality < 2) fail(ErrorCode::InvalidConfig, "endogenous cardinality must be at least 2");
  if (c.exo_cardinality < c.endo_cardinality * c.endo_cardinality)
    fail(ErrorCode::InvalidConfig, "exogenous cardinality cannot cover a confounded pair");
  if (c.methods.empty()) fail(ErrorCode::InvalidConfig, "no method selected");
  if (!(c.timeout_seconds > 0.0)) fail(ErrorCode::InvalidConfig, "timeout must be positive");
}

std::uint64_t iteration_seed(std::uint64_t master, int iteration) {
  return splitmix64(master + static_cast<std::uint64_t>(iteration));
}

namespace {

// Endogenous node k (0-based, named X<k+1>) of a generated structure.
struct Slot {
  std::vector<int> parents;  // endogenous, increasing
  int group = 0;
  std::string role;          // template key
};

// Children of one exogenous variable, in index order (which is topological).
struct Group {
  std::vector<int> members;
  std::string kind;
};

struct Structure {
  std::vector<Slot> slots;
  std::vector<Group> groups;
};

Structure build_structure(Topology topology, int l) {
  Structure s;
  s.slots.resize(static_cast<std::size_t>(l));
  auto arc = [&](int from, int to) { s.slots[static_cast<std::size_t>(to)].parents.push_back(from); };
  // Pairs [a, b] or singletons; kind names tell the template family apart.
  auto group = [&](std::vector<int> members, const std::string& kind) {
    const int g = static_cast<int>(s.groups.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      Slot& slot = s.slots[static_cast<std::size_t>(members[i])];
      slot.group = g;
      slot.role = kind + (i == 0 ? ".a" : ".b");
    }
    s.groups.push_back({std::move(members), kind});
  };
  switch (topology) {
    case Topology::tree:
      for (int k = 1; k < l; ++k) arc(k - 1, k);
      for (int k = 0; k + 1 < l; k += 2) group({k, k + 1}, k == 0 ? "first" : "pair");
      if (l % 2 == 1) group({l - 1}, "single");
      break;
    case Topology::polytree: {
      const int n = l / 2;  // tops are even 0-based indices, bottoms odd
      for (int i = 0; i < n; ++i) {
        if (i > 0) arc(2 * (i - 1), 2 * i);
        arc(2 * i + 1, 2 * i);
      }
      for (int i = 0; i < n; i += 2) group({2 * i, 2 * (i + 1)}, i == 0 ? "top_first" : "top");
      for (int i = 0; i < n; ++i) group({2 * i + 1}, "bottom");
      break;
    }
    case Topology::multiply_connected: {
      const int n = l / 2;
      for (int i = 0; i < n; ++i) {
        if (i > 0) {
          arc(2 * (i - 1), 2 * i);
          arc(2 * i - 1, 2 * i + 1);
        }
        arc(2 * i, 2 * i + 1);
      }
      for (int i = 0; i + 1 < n; i += 2) group({2 * i, 2 * (i + 1)}, i == 0 ? "top_first" : "top");
      for (int i = 0; i + 1 < n; i += 2) group({2 * i + 1, 2 * (i + 1) + 1}, i == 0 ? "bottom_first" : "bottom");
      if (n % 2 == 1) {
        group({2 * (n - 1)}, "top_single");
        group({2 * (n - 1) + 1}, "bottom_single");
      }
      break;
    }
  }
  for (Slot& slot : s.slots) std::sort(slot.parents.begin(), slot.parents.end());
  // Exogenous variables are declared in order of their first child.
  std::stable_sort(s.groups.begin(), s.groups.end(),
                   [](const Group& a, const Group& b) { return a.members.front() < b.members.front(); });
  for (std::size_t g = 0; g < s.groups.size(); ++g)
    for (int m : s.groups[g].members) s.slots[static_cast<std::size_t>(m)].group = static_cast<int>(g);
  return s;
}

// Template tables: [u * rows + parent_row] -> child state.
using Templates = std::map<std::string, std::vector<int>>;

std::size_t parent_rows(const Slot& slot, int endo_card) {
  std::size_t rows = 1;
  for (std::size_t i = 0; i < slot.parents.size(); ++i) rows *= static_cast<std::size_t>(endo_card);
  return rows;
}

// For every configuration of the parents outside the group, each
// exogenous state yields one joint state of the members; calls `visit`
// with (external configuration, u, member-tuple code).
template <typename Visit>
void for_each_response(const Structure& s, const Group& g, const Templates& t, int endo_card, int exo_card,
                       Visit&& visit) {
  std::vector<int> external;
  for (int m : g.members)
    for (int p : s.slots[static_cast<std::size_t>(m)].parents)
      if (std::find(g.members.begin(), g.members.end(), p) == g.members.end() &&
          std::find(external.begin(), external.end(), p) == external.end())
        external.push_back(p);
  std::vector<int> ext_cards(external.size(), endo_card);
  std::vector<int> ext_states(external.size(), 0);
  std::map<int, int> state;
  std::size_t config = 0;
  do {
    for (std::size_t i = 0; i < external.size(); ++i) state[external[i]] = ext_states[i];
    for (int u = 0; u < exo_card; ++u) {
      std::size_t code = 0;
      for (int m : g.members) {
        const Slot& slot = s.slots[static_cast<std::size_t>(m)];
        std::size_t row = 0;
        for (int p : slot.parents) row = row * static_cast<std::size_t>(endo_card) + static_cast<std::size_t>(state[p]);
        const int x = t.at(slot.role)[static_cast<std::size_t>(u) * parent_rows(slot, endo_card) + row];
        state[m] = x;
        code = code * static_cast<std::size_t>(endo_card) + static_cast<std::size_t>(x);
      }
      visit(config, u, code);
    }
    ++config;
  } while (next_configuration(ext_states, ext_cards));
}

std::size_t member_states(const Group& g, int endo_card) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < g.members.size(); ++i) n *= static_cast<std::size_t>(endo_card);
  return n;
}

// Every joint state of the members is reachable under every external
// configuration: the surjectivity of the joint equation of a confounder.
bool jointly_surjective(const Structure& s, const Group& g, const Templates& t, int endo_card, int exo_card) {
  std::map<std::size_t, std::set<std::size_t>> reached;
  for_each_response(s, g, t, endo_card, exo_card,
                    [&](std::size_t config, int, std::size_t code) { reached[config].insert(code); });
  const std::size_t need = member_states(g, endo_card);
  for (const auto& [config, codes] : reached)
    if (codes.size() != need) return false;
  return true;
}

// Smallest probability of a member joint state under any external
// configuration; positive iff the induced joint is strictly positive.
double least_response_mass(const Structure& s, const Group& g, const Templates& t, int endo_card, int exo_card,
                           const std::vector<double>& pmf) {
  std::map<std::size_t, std::vector<double>> mass;
  const std::size_t need = member_states(g, endo_card);
  for_each_response(s, g, t, endo_card, exo_card, [&](std::size_t config, int u, std::size_t code) {
    auto& m = mass[config];
    if (m.empty()) m.assign(need, 0.0);
    m[code] += pmf[static_cast<std::size_t>(u)];
  });
  double least = 1.0;
  for (const auto& [config, m] : mass)
    for (double v : m) least = std::min(least, v);
  return least;
}

}  // namespace

GeneratedModel generate_model(const BenchConfig& config, std::uint64_t seed) {
  validate_config(config);
  const int l = config.length;
  const int ec = config.endo_cardinality;
  const int uc = config.exo_cardinality;
  const Structure s = build_structure(config.topology, l);
  std::mt19937_64 rng(seed);

  // Templates are sampled kind by kind; a kind's groups share its tables,
  // so rejection on one kind never disturbs another.
  Templates templates;
  std::map<std::string, std::vector<const Group*>> kinds;
  for (const Group& g : s.groups) kinds[g.kind].push_back(&g);
  std::uniform_int_distribution<int> state(0, ec - 1);
  constexpr int kMaxTemplateDraws = 1'000'000;
  for (const auto& [kind, groups] : kinds) {
    std::set<std::string> roles;
    for (const Group* g : groups)
      for (int m : g->members) roles.insert(s.slots[static_cast<std::size_t>(m)].role);
    bool ok = false;
    for (int draw = 0; draw < kMaxTemplateDraws && !ok; ++draw) {
      for (const std::string& role : roles) {
        const Slot* shape = nullptr;
        for (const Slot& slot : s.slots)
          if (slot.role == role) shape = &slot;
        std::vector<int> table(static_cast<std::size_t>(uc) * parent_rows(*shape, ec));
        for (int& x : table) x = state(rng);
        templates[role] = std::move(table);
      }
      ok = std::all_of(groups.begin(), groups.end(),
                       [&](const Group* g) { return jointly_surjective(s, *g, templates, ec, uc); });
    }
    if (!ok) fail(ErrorCode::InvalidModel, "no jointly surjective equations found for role '" + kind + "'");
  }

  std::vector<Variable> variables;
  for (int k = 0; k < l; ++k) variables.push_back({"X" + std::to_string(k + 1), VariableKind::endogenous, ec});
  auto exo_id = [&](const Group& g) { return "U" + std::to_string(g.members.front() + 1); };
  for (const Group& g : s.groups) variables.push_back({exo_id(g), VariableKind::exogenous, uc});
  std::vector<StructuralEquation> equations;
  for (int k = 0; k < l; ++k) {
    const Slot& slot = s.slots[static_cast<std::size_t>(k)];
    StructuralEquation eq;
    eq.child = "X" + std::to_string(k + 1);
    eq.parents.push_back(exo_id(s.groups[static_cast<std::size_t>(slot.group)]));
    for (int p : slot.parents) eq.parents.push_back("X" + std::to_string(p + 1));
    eq.table = templates.at(slot.role);
    equations.push_back(std::move(eq));
  }
  CausalModel model(std::move(variables), std::move(equations));

  std::exponential_distribution<double> gamma1(1.0);
  constexpr int kMaxResamples = 50;
  for (int resample = 0; resample <= kMaxResamples; ++resample) {
    std::vector<std::vector<double>> pmfs;
    bool positive = true;
    for (const Group& g : s.groups) {
      std::vector<double> p(static_cast<std::size_t>(uc));
      double total = 0.0;
      for (double& v : p) total += (v = gamma1(rng));
      for (double& v : p) v /= total;
      positive = positive && least_response_mass(s, g, templates, ec, uc, p) > kEvidenceFloor;
      pmfs.push_back(std::move(p));
    }
    if (positive) return {ProbabilisticSCM(std::move(model), std::move(pmfs)), resample};
  }
  fail(ErrorCode::InvalidModel, "no strictly positive model after 50 resamples");
}

CausalQuery bench_query(const BenchConfig& config) {
  const int l = config.length;
  CausalQuery q;
  q.interventions["X1"] = 0;
  int target = 2, observed = l;
  switch (config.topology) {
    case Topology::tree: target = std::max(2, l / 2); break;
    case Topology::polytree:
      target = std::max(2, l / 4);
      observed = l - 1;
      break;
    case Topology::multiply_connected: target = std::max(2, l / 4); break;
  }
  q.evidence["X" + std::to_string(observed)] = 0;
  q.target = "X" + std::to_string(target);
  q.target_state = 0;
  return q;
}

std::vector<BenchRecord> run_benchmark(const BenchConfig& config) {
  validate_config(config);
  const CausalQuery query = bench_query(config);
  const std::size_t methods = config.methods.size();
  std::vector<BenchRecord> records(static_cast<std::size_t>(config.iterations) * methods);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(config.iterations));
#pragma omp parallel for schedule(dynamic, 1)
  for (int it = 0; it < config.iterations; ++it) {
    try {
      const std::uint64_t seed = iteration_seed(config.seed, it);
      const GeneratedModel gen = generate_model(config, seed);
      const CausalModel& model = gen.pscm.model();
      const IdentificationResult ident = identify(model, PscmMarginals(gen.pscm));
      for (std::size_t m = 0; m < methods; ++m) {
        BenchRecord& r = records[static_cast<std::size_t>(it) * methods + m];
        r.topology = config.topology;
        r.length = config.length;
        r.iteration = it;
        r.method = config.methods[m];
        r.resamples = gen.resamples;
        // A fresh network per method so no vertex list is shared between runs.
        const CredalNetwork network = compile(model, ident);
        const auto start = Clock::now();
        const auto deadline =
            start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(config.timeout_seconds));
        try {
          IntervalResult result;
          if (r.method == Method::exact) {
            ExactConfig ec;
            ec.deadline = deadline;
            result = bounds_exact(network, query, ec);
          } else {
            ApproxConfig ac = config.approx;
            ac.seed = seed;
            ac.deadline = deadline;
            result = bounds_approx(network, query, ac);
          }
          r.lower = result.lower;
          r.upper = result.upper;
          r.width = result.width();
        } catch (const CredalError& e) {
          if (e.code() != ErrorCode::Timeout && e.code() != ErrorCode::VertexExplosion) throw;
          r.timed_out = true;
          r.lower = r.upper = r.width = std::nan("");
        }
        r.runtime_s = std::chrono::duration<double>(Clock::now() - start).count();
      }
    } catch (...) {
      errors[static_cast<std::size_t>(it)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<BenchRecord>& records) {
  if (records.empty()) fail(ErrorCode::EmptyRecords, "no benchmark records to summarize");
  using Key = std::tuple<int, int, int>;  // topology, length, method
  std::map<Key, std::vector<const BenchRecord*>> groups;
  std::map<std::tuple<int, int, int>, const BenchRecord*> exact_of;  // topology, length, iteration
  for (const BenchRecord& r : records) {
    groups[{static_cast<int>(r.topology), r.length, static_cast<int>(r.method)}].push_back(&r);
    if (r.method == Method::exact && !r.timed_out)
      exact_of[{static_cast<int>(r.topology), r.length, r.iteration}] = &r;
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, members] : groups) {
    SummaryRow row;
    row.topology = static_cast<Topology>(std::get<0>(key));
    row.length = std::get<1>(key);
    row.method = static_cast<Method>(std::get<2>(key));
    row.records = members.size();
    double squared = 0.0;
    std::size_t matched = 0;
    for (const BenchRecord* r : members) {
      if (r->timed_out) continue;
      ++row.completed;
      row.mean_runtime_s += r->runtime_s;
      row.mean_width += r->width;
      if (r->method == Method::approx) {
        auto it = exact_of.find({std::get<0>(key), r->length, r->iteration});
        if (it != exact_of.end()) {
          squared += std::pow(r->lower - it->second->lower, 2) + std::pow(r->upper - it->second->upper, 2);
          matched += 2;
        }
      }
    }
    if (row.completed > 0) {
      row.mean_runtime_s /= static_cast<double>(row.completed);
      row.mean_width /= static_cast<double>(row.completed);
    }
    if (row.method == Method::approx && matched > 0) row.endpoint_rmse = std::sqrt(squared / static_cast<double>(matched));
    row.timeout_rate = static_cast<double>(row.records - row.completed) / static_cast<double>(row.records);
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << kRecordsHeader << '\n';
  for (const BenchRecord& r : records) {
    out << to_string(r.topology) << ',' << r.length << ',' << r.iteration << ',' << to_string(r.method) << ','
        << number(r.runtime_s) << ',' << number(r.lower) << ',' << number(r.upper) << ',' << number(r.width) << ','
        << (r.timed_out ? "true" : "false") << ',' << r.resamples << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const SummaryRow& r : rows) {
    out << to_string(r.topology) << ',' << r.length << ',' << to_string(r.method) << ',' << r.records << ','
        << r.completed << ',' << number(r.mean_runtime_s) << ',' << number(r.mean_width) << ','
        << (r.endpoint_rmse ? number(*r.endpoint_rmse) : std::string()) << ',' << number(r.timeout_rate) << '\n';
  }
}

}  // namespace credal
