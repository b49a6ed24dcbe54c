// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "credal/bench.hpp"
#include "credal/credal_network.hpp"
#include "credal/geometry.hpp"
#include "credal/identification.hpp"
#include "credal/inference.hpp"
#include "credal/model_io.hpp"
#include "credal/scm.hpp"
#include "support.hpp"

using namespace credal;
using testing::Rng;

namespace {

// Pinned tolerances.
constexpr double kJointTol = 1e-12;
constexpr double kVertexTol = 1e-9;
constexpr double kConstraintTol = 1e-9;
constexpr double kPointWidth = 1e-6;
constexpr double kBackdoorTol = 1e-8;
constexpr double kRoundTripTol = 1e-9;
constexpr double kOracleTol = 0.02;
constexpr double kInsideSlack = 1e-9;
constexpr double kSingletonWidth = 1e-9;
constexpr double kRmseMax = 0.02;
constexpr double kContainSlack = 1e-6;
constexpr double kMeanWidthMax = 0.15;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string interval(double lo, double hi) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "[%.6f, %.6f]", lo, hi);
  return buf;
}

double round2(double x) { return std::round(x * 100.0) / 100.0; }

IdentificationResult identify_document(const ModelDocument& doc) {
  return identify(doc.model, document_empirical(doc));
}

Outcome forward_semantics() {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelDocument doc = load_model(testing::model_path("markovian_pair.json"));
  const auto joint = induced_joint(document_pscm(doc));
  const double want[3] = {1.0 / 5.0, 2.0 / 15.0, 4.0 / 15.0};
  double err = 0.0;
  for (int i = 0; i < 3; ++i) err = std::max(err, std::abs(joint[static_cast<std::size_t>(i)] - want[i]));
  const double t = seconds_since(t0);
  return {err <= kJointTol && t < 1.0, fmt("max error %.2e", err) + fmt(", %.3f s", t)};
}

Outcome single_variable_identification() {
  const ModelDocument doc = load_model(testing::model_path("single_variable.json"));
  const auto ident = identify_document(doc);
  const auto& k = ident.systems.at(0);
  const double lo = lp_optimize(k, std::vector<double>{1, 0, 0}, Direction::minimize).value;
  const double hi = lp_optimize(k, std::vector<double>{1, 0, 0}, Direction::maximize).value;
  const auto vs = vertex_enumeration(k);
  const bool pinned = std::abs(lo - 1.0 / 3.0) <= kVertexTol && std::abs(hi - 1.0 / 3.0) <= kVertexTol;
  const bool vertices = testing::same_point_set(vs.vertices, {{1.0 / 3, 0, 2.0 / 3}, {1.0 / 3, 2.0 / 3, 0}}, kVertexTol);
  return {pinned && vertices, "P(u1) in " + interval(lo, hi) + ", " + std::to_string(vs.vertices.size()) + " vertices"};
}

Outcome markovian_vertices() {
  const ModelDocument doc = load_model(testing::model_path("markovian_pair.json"));
  const auto ident = identify_document(doc);
  const auto& k = ident.system_of("U2");
  const auto vs = vertex_enumeration(k);
  const std::vector<std::vector<double>> want{
      {0.0, 0.4, 0.4, 0.2, 0.0}, {0.4, 0.0, 0.4, 0.2, 0.0}, {0.0, 0.4, 0.0, 0.2, 0.4}, {0.4, 0.0, 0.0, 0.2, 0.4}};
  const bool match = testing::same_point_set(vs.vertices, want, kVertexTol);
  const std::vector<double> uniform(5, 0.2);
  const double violation = k.max_violation(uniform);
  return {match && violation <= kConstraintTol,
          std::to_string(vs.vertices.size()) + " vertices, uniform violation " + fmt("%.1e", violation)};
}

Outcome confounded_constraints() {
  const ModelDocument doc = load_model(testing::model_path("confounded_pair.json"));
  const auto ident = identify_document(doc);
  const auto& k = ident.systems.at(0);
  // Expected constraint set plus sum-to-one, compared in reduced row echelon form.
  Matrix a(0, 5);
  std::vector<double> b;
  auto row = [&](std::vector<double> r, double rhs) {
    a.append_row(r);
    b.push_back(rhs);
  };
  row({1, 0, 0, 0, 0}, 1.0 / 5);
  row({0, 1, 0, 0, 0}, 2.0 / 5);
  row({0, 0, 1, 0, 0}, 4.0 / 15);
  row({0, 0, 0, 1, 1}, 2.0 / 15);
  row({1, 1, 1, 1, 1}, 1.0);
  const RowEchelon want = row_reduce(a, b);
  const RowEchelon got = k.reduced_equalities();
  bool same = want.pivots == got.pivots && got.consistent && k.inequalities().empty();
  double err = 0.0;
  if (same) {
    for (std::size_t r = 0; r < want.pivots.size(); ++r) {
      for (std::size_t c = 0; c < 5; ++c) err = std::max(err, std::abs(want.a(r, c) - got.a(r, c)));
      err = std::max(err, std::abs(want.b[r] - got.b[r]));
    }
  }
  return {same && err <= kVertexTol, "rank " + std::to_string(got.pivots.size()) + fmt(", max difference %.1e", err)};
}

// X1 <- U, X2 <- U, X3 <- (U3, X1, X2)
ProbabilisticSCM random_backdoor(Rng& rng) {
  const int cu = std::uniform_int_distribution<int>(4, 6)(rng);
  const int c3 = std::uniform_int_distribution<int>(4, 8)(rng);
  std::vector<int> joint(static_cast<std::size_t>(cu));
  for (int u = 0; u < cu; ++u) joint[static_cast<std::size_t>(u)] = u < 4 ? u : static_cast<int>(rng() % 4);
  std::shuffle(joint.begin(), joint.end(), rng);
  StructuralEquation e1{"X1", {"U"}, {}}, e2{"X2", {"U"}, {}}, e3{"X3", {"U3", "X1", "X2"}, {}};
  for (int s : joint) {
    e1.table.push_back(s >> 1);
    e2.table.push_back(s & 1);
  }
  e3.table.assign(static_cast<std::size_t>(c3) * 4, 0);
  for (std::size_t r = 0; r < 4; ++r) {
    std::vector<int> col(static_cast<std::size_t>(c3));
    for (int& v : col) v = static_cast<int>(rng() & 1);
    const std::size_t a = rng() % col.size();
    std::size_t b = rng() % (col.size() - 1);
    if (b >= a) ++b;
    col[a] = 0;
    col[b] = 1;
    for (std::size_t u = 0; u < col.size(); ++u) e3.table[u * 4 + r] = col[u];
  }
  CausalModel model({{"X1", VariableKind::endogenous, 2},
                     {"X2", VariableKind::endogenous, 2},
                     {"X3", VariableKind::endogenous, 2},
                     {"U", VariableKind::exogenous, cu},
                     {"U3", VariableKind::exogenous, c3}},
                    {e1, e2, e3});
  return ProbabilisticSCM(std::move(model),
                          {testing::dirichlet(rng, static_cast<std::size_t>(cu)), testing::dirichlet(rng, static_cast<std::size_t>(c3))});
}

Outcome backdoor_identifiability() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(5);
  double worst_width = 0.0, worst_err = 0.0;
  for (int it = 0; it < 20; ++it) {
    const auto pscm = random_backdoor(rng);
    const auto joint = testing::brute_joint(pscm.model(), pscm.exogenous_pmfs());  // index 4*x1 + 2*x2 + x3
    const auto empirical = make_empirical(pscm.model(), {"X1", "X2", "X3"}, joint);
    const auto net = compile(pscm.model(), identify(pscm.model(), empirical));
    for (int x1 = 0; x1 < 2; ++x1) {
      CausalQuery q;
      q.interventions = {{"X1", x1}};
      q.target = "X3";
      const auto all = bounds_exact_all(net, q);
      for (int x3 = 0; x3 < 2; ++x3) {
        double expect = 0.0;
        for (int x2 = 0; x2 < 2; ++x2) {
          const double p12 = joint[static_cast<std::size_t>(4 * x1 + 2 * x2)] + joint[static_cast<std::size_t>(4 * x1 + 2 * x2 + 1)];
          double p2 = 0.0;
          for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 2; ++c) p2 += joint[static_cast<std::size_t>(4 * a + 2 * x2 + c)];
          expect += joint[static_cast<std::size_t>(4 * x1 + 2 * x2 + x3)] / p12 * p2;
        }
        const auto& r = all[static_cast<std::size_t>(x3)];
        worst_width = std::max(worst_width, r.width());
        worst_err = std::max({worst_err, std::abs(r.lower - expect), std::abs(r.upper - expect)});
      }
    }
  }
  const double t = seconds_since(t0);
  return {worst_width < kPointWidth && worst_err <= kBackdoorTol && t < 30.0,
          fmt("max width %.1e", worst_width) + fmt(", max error %.1e", worst_err) + fmt(", %.2f s", t)};
}

Outcome clinical_trial() {
  const ModelDocument doc = load_model(testing::model_path("clinical_trial.json"));
  const auto net = compile(doc.model, identify_document(doc));
  CausalQuery q0, q1;
  q0.interventions = {{"X2", 0}};
  q1.interventions = {{"X2", 1}};
  q0.target = q1.target = "X3";
  q0.target_state = q1.target_state = 1;
  const auto a = bounds_exact(net, q0);
  const auto b = bounds_exact(net, q1);
  const double dlo = a.lower - b.upper, dhi = a.upper - b.lower;
  const bool primary = round2(a.lower) == 0.45 && round2(a.upper) == 0.46 && round2(b.lower) == 0.67 &&
                       round2(b.upper) == 0.68 && round2(dlo) == -0.23 && round2(dhi) == -0.21;
  const bool substitute = dlo >= -0.23 - kVertexTol && dhi <= -0.15 + kVertexTol;
  std::string detail = "do(x2=0) " + interval(a.lower, a.upper) + ", do(x2=1) " + interval(b.lower, b.upper) +
                       ", difference " + interval(dlo, dhi);
  detail += primary ? ", two-decimal targets met" : ", two-decimal targets not met; substitute containment in [-0.23, -0.15] " +
                                                        std::string(substitute ? "holds" : "fails");
  return {primary || substitute, detail};
}

Outcome round_trip() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(7);
  double worst_vertex = 0.0, worst_truth = 0.0;
  std::size_t vertices = 0;
  for (int it = 0; it < 200; ++it) {
    testing::RandomModelOptions o;
    o.max_endogenous = 5;
    o.markovian = it % 2 == 0;
    const auto pscm = testing::random_pscm(rng, o);
    const auto& model = pscm.model();
    const auto joint = testing::brute_joint(model, pscm.exogenous_pmfs());
    std::vector<std::string> order;
    for (int x : model.endogenous()) order.push_back(model.variable(x).id);
    const auto ident = identify(model, make_empirical(model, order, joint));
    for (std::size_t k = 0; k < ident.systems.size(); ++k) {
      worst_truth = std::max(worst_truth, ident.systems[k].max_violation(pscm.exogenous_pmfs()[k]));
      for (const auto& v : vertex_enumeration(ident.systems[k]).vertices) {
        auto pmfs = pscm.exogenous_pmfs();
        pmfs[k] = v;
        const auto induced = testing::brute_joint(model, pmfs);
        for (std::size_t i = 0; i < joint.size(); ++i) worst_vertex = std::max(worst_vertex, std::abs(induced[i] - joint[i]));
        ++vertices;
      }
    }
  }
  const double t = seconds_since(t0);
  return {worst_vertex <= kRoundTripTol && worst_truth <= kRoundTripTol && t < 120.0,
          std::to_string(vertices) + " vertices" + fmt(", max joint error %.1e", worst_vertex) +
              fmt(", max truth violation %.1e", worst_truth) + fmt(", %.2f s", t)};
}

// A variable with an endogenous parent that shares its exogenous variable;
// intervening on that parent is rarely identified.
std::optional<std::pair<int, int>> confounded_arc(const CausalModel& model) {
  for (int x : model.endogenous())
    for (int p : model.equation_of(x)->endogenous_parents)
      if (model.exogenous_parent(p) == model.exogenous_parent(x)) return std::pair{x, p};
  return std::nullopt;
}

// Random query: over a confounded arc when `arc` is set, otherwise a random
// target with optional intervention and evidence.
CausalQuery random_query(const CausalModel& model, Rng& rng, std::optional<std::pair<int, int>> arc) {
  std::vector<int> endo = model.endogenous();
  std::shuffle(endo.begin(), endo.end(), rng);
  CausalQuery q;
  q.target_state = static_cast<int>(rng() % 2);
  if (arc) {
    const auto [x, p] = *arc;
    q.target = model.variable(x).id;
    q.interventions[model.variable(p).id] = static_cast<int>(rng() % 2);
    for (int e : endo)
      if (e != x && e != p && rng() % 2) q.evidence[model.variable(e).id] = static_cast<int>(rng() % 2);
    return q;
  }
  q.target = model.variable(endo[0]).id;
  std::size_t next = 1;
  if (next < endo.size() && rng() % 2) q.interventions[model.variable(endo[next++]).id] = static_cast<int>(rng() % 2);
  if (next < endo.size() && rng() % 2) q.evidence[model.variable(endo[next++]).id] = static_cast<int>(rng() % 2);
  return q;
}

Outcome oracle_equivalence() {
  Rng rng(8);
  double worst = 0.0, worst_outside = 0.0;
  int models = 0, samples = 0, proper = 0;
  while (models < 50) {
    testing::RandomModelOptions o;
    o.min_endogenous = 2;
    o.max_endogenous = 3;
    o.min_exogenous_cardinality = 5;
    const auto pscm = testing::random_pscm(rng, o);
    const auto& model = pscm.model();
    // every other model is queried over a confounded arc
    const auto arc = confounded_arc(model);
    if (models % 2 == 0 && !arc) continue;
    std::vector<std::string> order;
    for (int x : model.endogenous()) order.push_back(model.variable(x).id);
    const auto ident = identify(model, make_empirical(model, order, testing::brute_joint(model, pscm.exogenous_pmfs())));
    const auto net = compile(model, ident);
    const CausalQuery q = random_query(model, rng, models % 2 == 0 ? arc : std::nullopt);

    std::vector<std::vector<std::vector<double>>> extremes;
    for (const auto& k : ident.systems) extremes.push_back(testing::lp_extreme_points(k, rng));
    double lo = 1.0, hi = 0.0;
    bool any = false;
    std::vector<std::size_t> pick(extremes.size(), 0);
    while (true) {
      std::vector<std::vector<double>> pmfs;
      for (std::size_t k = 0; k < pick.size(); ++k) pmfs.push_back(extremes[k][pick[k]]);
      if (auto v = testing::brute_query(model, pmfs, q.interventions, q.evidence, q.target, q.target_state)) {
        lo = std::min(lo, *v);
        hi = std::max(hi, *v);
        any = true;
      }
      std::size_t k = 0;
      while (k < pick.size() && ++pick[k] == extremes[k].size()) pick[k++] = 0;
      if (k == pick.size()) break;
    }
    if (!any) continue;
    const auto r = bounds_exact(net, q);
    if (r.width() > kPointWidth) ++proper;
    worst = std::max({worst, std::abs(r.lower - lo), std::abs(r.upper - hi)});
    for (int s = 0; s < 40; ++s) {
      std::vector<std::vector<double>> pmfs;
      for (const auto& e : extremes) pmfs.push_back(testing::convex_sample(e, rng));
      if (auto v = testing::brute_query(model, pmfs, q.interventions, q.evidence, q.target, q.target_state)) {
        worst_outside = std::max({worst_outside, r.lower - *v, *v - r.upper});
        ++samples;
      }
    }
    ++models;
  }
  return {worst <= kOracleTol && worst_outside <= kInsideSlack,
          std::to_string(proper) + " proper intervals" + fmt(", max endpoint gap %.1e", worst) + ", " +
              std::to_string(samples) + " samples" +
              fmt(", max excursion %.1e", std::max(0.0, worst_outside))};
}

Outcome counterfactual_truth() {
  Rng rng(9);
  double worst_outside = 0.0, worst_width = 0.0, worst_point = 0.0;
  int models = 0, proper = 0;
  while (models < 50) {
    testing::RandomModelOptions o;
    o.min_endogenous = 2;
    o.max_endogenous = 4;
    o.min_exogenous_cardinality = 5;
    const auto pscm = testing::random_pscm(rng, o);
    const auto& model = pscm.model();
    // observations taken from one sampled world, so they have positive probability
    std::vector<int> us;
    for (int u : model.exogenous()) us.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(model.cardinality(u))));
    const auto world = testing::solve_world(model, us);
    std::vector<int> endo = model.endogenous();
    std::shuffle(endo.begin(), endo.end(), rng);
    CounterfactualQuery cq;
    cq.hypothetical[model.variable(endo[0]).id] = static_cast<int>(rng() % 2);
    cq.target = model.variable(endo[1]).id;
    cq.target_state = static_cast<int>(rng() % 2);
    for (int x : model.endogenous())
      if (rng() % 2 || x == endo[0]) cq.observed[model.variable(x).id] = world[static_cast<std::size_t>(x)];
    const auto truth = testing::brute_counterfactual(model, pscm.exogenous_pmfs(), cq.observed, cq.hypothetical,
                                                     cq.target, cq.target_state);
    if (!truth) continue;
    std::vector<std::string> order;
    for (int x : model.endogenous()) order.push_back(model.variable(x).id);
    const auto ident = identify(model, make_empirical(model, order, testing::brute_joint(model, pscm.exogenous_pmfs())));
    const auto r = counterfactual_bounds(compile(model, ident), cq, Method::exact);
    if (r.width() > kPointWidth) ++proper;
    worst_outside = std::max({worst_outside, r.lower - *truth, *truth - r.upper});
    const auto p = counterfactual_bounds(compile(model, precise_identification(pscm)), cq, Method::exact);
    worst_width = std::max(worst_width, p.width());
    worst_point = std::max({worst_point, std::abs(p.lower - *truth), std::abs(p.upper - *truth)});
    ++models;
  }
  return {worst_outside <= kInsideSlack && worst_width < kSingletonWidth && worst_point <= kSingletonWidth,
          std::to_string(proper) + " proper intervals" + fmt(", max excursion %.1e", std::max(0.0, worst_outside)) +
              fmt(", singleton width %.1e", worst_width) +
              fmt(", singleton error %.1e", worst_point)};
}

Outcome approximation_quality() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_rmse = 0.0, worst_excess = 0.0;
  int compared = 0;
  for (int l = 4; l <= 10; ++l) {
    BenchConfig c;
    c.topology = Topology::tree;
    c.length = l;
    c.iterations = 20;
    c.methods = {Method::exact, Method::approx};
    c.seed = 10;
    const auto records = run_benchmark(c);
    double sq = 0.0;
    int n = 0;
    for (const auto& e : records) {
      if (e.method != Method::exact || e.timed_out) continue;
      for (const auto& a : records) {
        if (a.method != Method::approx || a.iteration != e.iteration || a.timed_out) continue;
        sq += (a.lower - e.lower) * (a.lower - e.lower) + (a.upper - e.upper) * (a.upper - e.upper);
        n += 2;
        worst_excess = std::max({worst_excess, e.lower - a.lower, a.upper - e.upper});
        ++compared;
      }
    }
    worst_rmse = std::max(worst_rmse, n ? std::sqrt(sq / n) : 1.0);
  }
  const double t = seconds_since(t0);
  return {compared == 140 && worst_rmse <= kRmseMax && worst_excess <= kContainSlack && t < 300.0,
          std::to_string(compared) + " pairs" + fmt(", worst per-length RMSE %.2e", worst_rmse) +
              fmt(", max excess %.1e", std::max(0.0, worst_excess)) + fmt(", %.2f s", t)};
}

Outcome informativeness() {
  BenchConfig c;
  c.topology = Topology::tree;
  c.length = 10;
  c.iterations = 100;
  c.methods = {Method::exact};
  c.seed = 11;
  const auto records = run_benchmark(c);
  double sum = 0.0;
  int n = 0;
  for (const auto& r : records)
    if (!r.timed_out) {
      sum += r.width;
      ++n;
    }
  const double mean = n ? sum / n : 1.0;
  return {n == 100 && mean < kMeanWidthMax, std::to_string(n) + " models" + fmt(", mean width %.4f", mean)};
}

Outcome canonical_widening() {
  CounterfactualQuery printed;
  printed.observed = {{"X3", 0}};
  printed.hypothetical = {{"X3", 1}};
  printed.target = "X4";
  printed.target_state = 1;
  CounterfactualQuery variant = printed;
  variant.observed["X4"] = 0;

  const ModelDocument original = load_model(testing::model_path("party.json"));
  const auto net_original = compile(original.model, identify_document(original));
  const auto r_original = counterfactual_bounds(net_original, printed, Method::exact);

  ModelDocument canonical = load_model(testing::model_path("party_canonical.json"));
  const auto net_exact = compile(canonical.model, identify_document(canonical));
  const auto exact_printed = counterfactual_bounds(net_exact, printed, Method::exact);
  const auto exact_variant = counterfactual_bounds(net_exact, variant, Method::exact);
  canonical.empirical_floor = 0.01;
  const auto net_floor = compile(canonical.model, identify_document(canonical));
  const auto floor_printed = counterfactual_bounds(net_floor, printed, Method::exact);
  const auto floor_variant = counterfactual_bounds(net_floor, variant, Method::exact);

  const bool widening = exact_variant.width() < kPointWidth && floor_variant.width() > kPointWidth;
  std::string detail = "original " + interval(r_original.lower, r_original.upper) + ", canonical " +
                       interval(exact_printed.lower, exact_printed.upper) + ", cut-off " +
                       interval(floor_printed.lower, floor_printed.upper) + "; with X4=0 observed: canonical " +
                       interval(exact_variant.lower, exact_variant.upper) + ", cut-off " +
                       interval(floor_variant.lower, floor_variant.upper);
  return {widening, detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"forward semantics of the two-variable Markovian model", forward_semantics},
      {"single-variable identification and its vertices", single_variable_identification},
      {"vertices of the Markovian credal set K(U2)", markovian_vertices},
      {"confounded-pair constraint set after rank reduction", confounded_constraints},
      {"backdoor identifiability on 20 random quantifications", backdoor_identifiability},
      {"clinical-trial causal bounds", clinical_trial},
      {"identification round trip on 200 random models", round_trip},
      {"exact bounds against a brute-force oracle on 50 models", oracle_equivalence},
      {"counterfactual ground truth on 50 models", counterfactual_truth},
      {"approximate bounds on trees l=4..10", approximation_quality},
      {"mean exact width on 100 trees at l=10", informativeness},
      {"canonical equation and cut-off widening", canonical_widening},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s  C%-2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
