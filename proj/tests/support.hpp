#pragma once

// Independent oracles for the test suites: brute-force enumeration over the
// exogenous joint space, extreme points found by LP in random directions,
// and a random quasi-Markovian model generator.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "credal/constraints.hpp"
#include "credal/credal_network.hpp"
#include "credal/errors.hpp"
#include "credal/scm.hpp"

namespace testing {

using Rng = std::mt19937_64;

std::string model_path(const std::string& name);

// Code of the CredalError thrown by f; nullopt when nothing is thrown.
std::optional<credal::ErrorCode> code_of(const std::function<void()>& f);

std::vector<double> dirichlet(Rng& rng, std::size_t n);

struct RandomModelOptions {
  int min_endogenous = 2;
  int max_endogenous = 5;
  int min_exogenous_cardinality = 2;
  int max_exogenous_cardinality = 6;
  int max_group = 2;          // children per exogenous variable
  bool markovian = false;     // every group a singleton
  int max_endogenous_parents = 2;
};

// Random PSCM over binary endogenous variables whose induced joint is
// strictly positive (min cell above 1e-6).
credal::ProbabilisticSCM random_pscm(Rng& rng, const RandomModelOptions& options = {});

// Endogenous states by brute force: repeated passes over the equations.
// `forced` holds do() values by variable index.
std::vector<int> solve_world(const credal::CausalModel& model, const std::vector<int>& exogenous_states,
                             const std::map<int, int>& forced = {});

// Joint over the endogenous variables in declaration order, row-major.
std::vector<double> brute_joint(const credal::CausalModel& model, const std::vector<std::vector<double>>& pmfs);

// P(target = state | do(interventions), evidence); nullopt when P(evidence)
// is at most 1e-12.
std::optional<double> brute_query(const credal::CausalModel& model, const std::vector<std::vector<double>>& pmfs,
                                  const credal::StateMap& interventions, const credal::StateMap& evidence,
                                  const std::string& target, int state);

// P(target in the hypothetical world = state | observed in the factual world),
// both worlds sharing every exogenous state.
std::optional<double> brute_counterfactual(const credal::CausalModel& model,
                                           const std::vector<std::vector<double>>& pmfs,
                                           const credal::StateMap& observed, const credal::StateMap& hypothetical,
                                           const std::string& target, int state);

// Distinct optima of `directions` random linear objectives.
std::vector<std::vector<double>> lp_extreme_points(const credal::LinearConstraintSystem& system, Rng& rng,
                                                   int directions = 60);

// Random convex combination of the given points.
std::vector<double> convex_sample(const std::vector<std::vector<double>>& points, Rng& rng);

bool same_point(const std::vector<double>& a, const std::vector<double>& b, double tol);

// Every point of `expected` matched by one of `actual` and vice versa.
bool same_point_set(const std::vector<std::vector<double>>& actual,
                    const std::vector<std::vector<double>>& expected, double tol);

}  // namespace testing
