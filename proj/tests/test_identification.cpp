#include <doctest.h>

#include "credal/errors.hpp"
#include "credal/geometry.hpp"
#include "credal/identification.hpp"
#include "credal/model_io.hpp"
#include "support.hpp"

using namespace credal;
using testing::code_of;

namespace {

bool has_row(const LinearConstraintSystem& s, const std::vector<double>& a, double rhs) {
  for (const auto& c : s.equalities())
    if (testing::same_point(c.coefficients, a, 1e-12) && std::abs(c.rhs - rhs) <= 1e-12) return true;
  return false;
}

}  // namespace

TEST_CASE("Markovian identification rows") {
  const auto doc = load_model(testing::model_path("markovian_pair.json"));
  const auto ident = identify_markovian(doc.model, document_empirical(doc));
  REQUIRE(ident.exogenous == std::vector<std::string>{"U1", "U2"});
  const auto& u1 = ident.system_of("U1");
  CHECK(u1.equalities().size() == 2);
  CHECK(has_row(u1, {1, 0, 0}, 1.0 / 3));
  CHECK(has_row(u1, {0, 1, 1}, 2.0 / 3));
  const auto& u2 = ident.system_of("U2");
  REQUIRE(u2.equalities().size() == 4);
  // x outer, endogenous-parent row inner
  CHECK(testing::same_point(u2.equalities()[0].coefficients, {0, 0, 1, 1, 1}, 0));
  CHECK(u2.equalities()[0].rhs == doctest::Approx(0.6));
  CHECK(testing::same_point(u2.equalities()[1].coefficients, {0, 0, 1, 0, 1}, 0));
  CHECK(u2.equalities()[1].rhs == doctest::Approx(0.4));
  CHECK(testing::same_point(u2.equalities()[2].coefficients, {1, 1, 0, 0, 0}, 0));
  CHECK(u2.equalities()[2].rhs == doctest::Approx(0.4));
  CHECK(testing::same_point(u2.equalities()[3].coefficients, {1, 1, 0, 1, 0}, 0));
  CHECK(u2.equalities()[3].rhs == doctest::Approx(0.6));
  CHECK(u2.contains(std::vector<double>(5, 0.2)));
  CHECK(ident.diagnostics[1].rank == 3);  // row 4 = row 1 + row 3 - row 2
  CHECK(ident.diagnostics[1].feasible);
  CHECK(code_of([&] { ident.system_of("U9"); }) == ErrorCode::MismatchedIdentification);
}

TEST_CASE("confounded pair identification") {
  const auto doc = load_model(testing::model_path("confounded_pair.json"));
  CHECK(code_of([&] { identify_markovian(doc.model, document_empirical(doc)); }) == ErrorCode::NotMarkovian);
  const auto ident = identify(doc.model, document_empirical(doc));
  const auto& k = ident.systems.at(0);
  CHECK(k.equalities().size() == 4);
  const auto vs = vertex_enumeration(k);
  CHECK(testing::same_point_set(vs.vertices,
                                {{0.2, 0.4, 4.0 / 15, 0.0, 2.0 / 15}, {0.2, 0.4, 4.0 / 15, 2.0 / 15, 0.0}}, 1e-9));
}

TEST_CASE("random models: every vertex reproduces the joint") {
  testing::Rng rng(11);
  for (int it = 0; it < 40; ++it) {
    const auto pscm = testing::random_pscm(rng);
    const auto& m = pscm.model();
    std::vector<std::string> order;
    for (int x : m.endogenous()) order.push_back(m.variable(x).id);
    const auto joint = testing::brute_joint(m, pscm.exogenous_pmfs());
    const auto empirical = make_empirical(m, order, joint);
    const auto ident = identify(m, empirical);
    const auto report = verify_identification(m, empirical, ident, 5, 1, &pscm.exogenous_pmfs());
    CHECK(report.max_deviation <= 1e-9);
    CHECK(report.ground_truth_member);
    for (std::size_t k = 0; k < ident.systems.size(); ++k) {
      for (const auto& v : vertex_enumeration(ident.systems[k]).vertices) {
        auto pmfs = pscm.exogenous_pmfs();
        pmfs[k] = v;
        const auto induced = testing::brute_joint(m, pmfs);
        for (std::size_t i = 0; i < joint.size(); ++i) CHECK(induced[i] == doctest::Approx(joint[i]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("zero conditioning event") {
  const auto doc = load_model(testing::model_path("markovian_pair.json"));
  const auto e = make_empirical(doc.model, {"X1", "X2"}, {0.5, 0.5, 0.0, 0.0});
  CHECK(code_of([&] { identify(doc.model, e); }) == ErrorCode::ZeroConditioningEvent);
}

TEST_CASE("infeasible identification") {
  const CausalModel m({{"X1", VariableKind::endogenous, 2},
                       {"X2", VariableKind::endogenous, 2},
                       {"U", VariableKind::exogenous, 2}},
                      {{"X1", {"U"}, {0, 1}}, {"X2", {"U"}, {0, 1}}});
  const auto e = make_empirical(m, {"X1", "X2"}, {0.4, 0.1, 0.1, 0.4});
  CHECK(code_of([&] { identify(m, e); }) == ErrorCode::InfeasibleIdentification);
}

TEST_CASE("expert constraints narrow or empty the set") {
  const auto doc = load_model(testing::model_path("markovian_pair.json"));
  const auto ident = identify(doc.model, document_empirical(doc));
  const ExpertConstraint narrow{"U2", {{1, 0, 0, 0, 0}, Relation::greater_equal, 0.1, "expert"}};
  const auto narrowed = add_expert_constraints(ident, std::vector<ExpertConstraint>{narrow});
  const auto& k = narrowed.system_of("U2");
  CHECK(k.inequalities().size() == 1);
  const double lo = lp_optimize(k, std::vector<double>{1, 0, 0, 0, 0}, Direction::minimize).value;
  CHECK(lo == doctest::Approx(0.1));
  const ExpertConstraint impossible{"U2", {{0, 0, 0, 1, 0}, Relation::greater_equal, 0.5, ""}};
  CHECK(code_of([&] { add_expert_constraints(ident, std::vector<ExpertConstraint>{impossible}); }) ==
        ErrorCode::InfeasibleIdentification);
  const ExpertConstraint unknown{"U7", {{1, 0, 0}, Relation::equal, 0.5, ""}};
  CHECK(code_of([&] { add_expert_constraints(ident, std::vector<ExpertConstraint>{unknown}); }) == ErrorCode::MismatchedIdentification);
}

TEST_CASE("precise identification pins the PMFs") {
  const auto doc = load_model(testing::model_path("markovian_pair.json"));
  const auto pscm = document_pscm(doc);
  const auto ident = precise_identification(pscm);
  for (std::size_t k = 0; k < ident.systems.size(); ++k) {
    const auto vs = vertex_enumeration(ident.systems[k]);
    REQUIRE(vs.vertices.size() == 1);
    CHECK(testing::same_point(vs.vertices[0], pscm.exogenous_pmfs()[k], 1e-9));
  }
}
