#include <doctest.h>

#include "credal/credal_network.hpp"
#include "credal/errors.hpp"
#include "credal/factor.hpp"
#include "credal/identification.hpp"
#include "credal/inference.hpp"
#include "credal/model_io.hpp"
#include "support.hpp"

using namespace credal;
using testing::code_of;

namespace {

CredalNetwork network_of(const std::string& file) {
  const auto doc = load_model(testing::model_path(file));
  return compile(doc.model, identify(doc.model, document_empirical(doc)));
}

}  // namespace

TEST_CASE("compiled network mirrors the model") {
  const auto doc = load_model(testing::model_path("markovian_pair.json"));
  const auto net = network_of("markovian_pair.json");
  REQUIRE(net.size() == 4);
  CHECK(net.arc_count() == 3);
  const auto& x2 = net.node(net.index_of("X2"));
  CHECK(x2.role == NodeRole::endogenous);
  CHECK_FALSE(x2.is_credal());
  CHECK(*x2.cpt == equation_cpt(doc.model, doc.model.index_of("X2")));
  const auto& u2 = net.node(net.index_of("U2"));
  CHECK(u2.role == NodeRole::exogenous);
  CHECK(u2.is_credal());
  CHECK(u2.credal->vertices().vertices.size() == 4);
  CHECK(net.children(net.index_of("U2")) == std::vector<int>{net.index_of("X2")});
}

TEST_CASE("network construction checks") {
  CredalNetwork net;
  CredalNode a;
  a.id = "A";
  a.cardinality = 2;
  a.cpt = std::make_shared<std::vector<double>>(std::vector<double>{0.3, 0.6});
  CHECK(code_of([&] { net.add_node(a); }) == ErrorCode::InvalidDistribution);
  a.cpt = std::make_shared<std::vector<double>>(std::vector<double>{0.3, 0.7});
  net.add_node(a);
  CHECK(code_of([&] { net.add_node(a); }) == ErrorCode::InvalidModel);
  CredalNode b;
  b.id = "B";
  b.cardinality = 2;
  b.parents = {5};
  b.cpt = std::make_shared<std::vector<double>>(std::vector<double>{0.5, 0.5, 0.5, 0.5});
  CHECK(code_of([&] { net.add_node(b); }) == ErrorCode::InvalidModel);
  CHECK(code_of([&] { net.index_of("Z"); }) == ErrorCode::InvalidQuery);
}

TEST_CASE("surgery") {
  const auto net = network_of("markovian_pair.json");
  const auto cut = intervene(net, {{"X2", 1}});
  const auto& x2 = cut.node(cut.index_of("X2"));
  CHECK(x2.parents.empty());
  CHECK(x2.intervened);
  CHECK(*x2.cpt == std::vector<double>{0, 1});
  CHECK(net.node(net.index_of("X2")).parents.size() == 2);  // original untouched
  try {
    intervene(net, {{"U1", 0}});
    FAIL("expected InterveneExogenous");
  } catch (const CredalError& e) {
    CHECK(e.code() == ErrorCode::InterveneExogenous);
  }
  CHECK(code_of([&] { intervene(net, {{"X1", 2}}); }) == ErrorCode::InvalidQuery);
}

TEST_CASE("twin network") {
  const auto net = network_of("party.json");
  const auto t = twin(net);
  CHECK(t.size() == net.size() + 4);
  for (const std::string id : {"X1", "X2", "X3", "X4"}) {
    const auto& orig = t.node(t.index_of(id));
    const auto& rep = t.node(t.index_of(twin_id(id)));
    CHECK(rep.cpt == orig.cpt);
    REQUIRE(rep.parents.size() == orig.parents.size());
    CHECK(rep.parents[0] == orig.parents[0]);  // shared exogenous parent
    for (std::size_t k = 1; k < rep.parents.size(); ++k)
      CHECK(t.node(rep.parents[k]).id == twin_id(t.node(orig.parents[k]).id));
  }
  CHECK(t.arc_count() == 2 * net.arc_count());
}

TEST_CASE("virtual evidence") {
  const auto net = network_of("single_variable.json");
  const auto with_z = attach_virtual_evidence(net, "U", {1.0, 0.5, 0.5});
  CausalQuery q;
  q.evidence = {{"Z_U", 1}};
  q.target = "U";
  const auto r = bounds_exact(with_z, q);
  // (1/3) / (1/3 + 0.5 * 2/3) for every member of K(U)
  CHECK(r.lower == doctest::Approx(0.5));
  CHECK(r.upper == doctest::Approx(0.5));
  CHECK(r.point);
  try {
    attach_virtual_evidence(net, "U", {1.5, 0.5, 0.5});
    FAIL("expected LikelihoodOutOfRange");
  } catch (const CredalError& e) {
    CHECK(e.code() == ErrorCode::LikelihoodOutOfRange);
  }
  CHECK(code_of([&] { attach_virtual_evidence(net, "X", {1.0, 0.5}); }) == ErrorCode::InvalidQuery);
  CHECK(code_of([&] { attach_virtual_evidence(net, "U", {1.0, 0.5}); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("query checks") {
  const auto net = network_of("markovian_pair.json");
  CausalQuery q;
  q.target = "X2";
  q.evidence = {{"X2", 0}};
  CHECK(code_of([&] { check_query(net, q); }) == ErrorCode::InvalidQuery);
  q.evidence = {{"X1", 0}};
  q.interventions = {{"X1", 1}};
  CHECK(code_of([&] { check_query(net, q); }) == ErrorCode::InvalidQuery);
  q.interventions.clear();
  q.target_state = 3;
  CHECK(code_of([&] { check_query(net, q); }) == ErrorCode::InvalidQuery);
  q.target_state = 1;
  CHECK_NOTHROW(check_query(net, q));
}

TEST_CASE("factor operations against direct computation") {
  // f(A,B) with |A|=2, |B|=3 and g(B,C) with |C|=2
  const Factor f({0, 1}, {2, 3}, {1, 2, 3, 4, 5, 6});
  const Factor g({1, 2}, {3, 2}, {1, 0, 2, 1, 0, 3});
  const Factor h = f.multiply(g);
  REQUIRE(h.scope().size() == 3);
  const auto ordered = h.reorder(std::vector<int>{0, 1, 2});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 2; ++c)
        CHECK(ordered[static_cast<std::size_t>(a * 6 + b * 2 + c)] ==
              f[static_cast<std::size_t>(a * 3 + b)] * g[static_cast<std::size_t>(b * 2 + c)]);
  const Factor s = f.sum_out(1);
  CHECK(s.table() == std::vector<double>{6, 15});
  const Factor o = f.observe(1, 2);
  CHECK(o.table() == std::vector<double>{0, 0, 3, 0, 0, 6});
  const Factor r = f.reorder(std::vector<int>{1, 0});
  CHECK(r.table() == std::vector<double>{1, 4, 2, 5, 3, 6});
  const Factor e = eliminate({f, g}, std::vector<int>{2}, std::vector<int>{2});
  // sum_{a,b} f(a,b) g(b,c)
  CHECK(e.table() == std::vector<double>{(1 + 4) * 1 + (2 + 5) * 2 + (3 + 6) * 0, (1 + 4) * 0 + (2 + 5) * 1 + (3 + 6) * 3});
  const Factor kept = eliminate({f}, std::vector<int>{1, 7}, std::vector<int>{3, 2});
  CHECK(kept.table() == std::vector<double>{5, 5, 7, 7, 9, 9});
}

TEST_CASE("min-degree order") {
  // chain 0-1-2-3: endpoints have degree 1; ties by index
  const std::vector<std::vector<int>> scopes{{0, 1}, {1, 2}, {2, 3}};
  CHECK(min_degree_order(scopes, std::vector<int>{}) == std::vector<int>{0, 1, 2, 3});
  CHECK(min_degree_order(scopes, std::vector<int>{0}) == std::vector<int>{3, 2, 1});
}
