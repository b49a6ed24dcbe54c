#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "credal/credal_network.hpp"
#include "credal/inference.hpp"
#include "credal/scm.hpp"

namespace credal {

enum class Topology { tree, polytree, multiply_connected };

std::string_view to_string(Topology t);
// Throws InvalidConfig.
Topology parse_topology(std::string_view text);

struct BenchConfig {
  Topology topology = Topology::tree;
  int length = 4;  // number of endogenous variables
  int iterations = 100;
  int endo_cardinality = 2;
  int exo_cardinality = 6;
  std::vector<Method> methods{Method::exact};
  double timeout_seconds = 300.0;
  std::uint64_t seed = 0;
  ApproxConfig approx{};
};

// Throws InvalidConfig: trees need l >= 3, polytrees l divisible by 4,
// multiply connected models even l >= 4; every confounded pair must be
// reachable, i.e. exo_cardinality >= endo_cardinality^2.
void validate_config(const BenchConfig& config);

// Seed of iteration i: splitmix64(master + i).
std::uint64_t iteration_seed(std::uint64_t master, int iteration);

struct GeneratedModel {
  ProbabilisticSCM pscm;
  int resamples = 0;  // exogenous PMF draws rejected for positivity
};

// Random stationary quasi-Markovian model. Variables X1..Xl then the
// exogenous variables, each named U<k> after its first child Xk. Equations
// list the exogenous parent first, then endogenous parents by index. One
// random table per structural role is reused at every position of that role.
GeneratedModel generate_model(const BenchConfig& config, std::uint64_t seed);

// The topology's query, all states 0:
//   tree              P(X_a | do(X1), X_l),      a = max(2, l/2)
//   polytree          P(X_a | do(X1), X_{l-1}),  a = max(2, l/4)
//   multiply_connected P(X_a | do(X1), X_l),     a = max(2, l/4)
CausalQuery bench_query(const BenchConfig& config);

struct BenchRecord {
  Topology topology = Topology::tree;
  int length = 0;
  int iteration = 0;
  Method method = Method::exact;
  double runtime_s = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double width = 0.0;
  bool timed_out = false;
  int resamples = 0;
};

// Iterations run in parallel; the records (runtimes aside) depend only on
// the configuration. Sorted by iteration, then method order in the config.
std::vector<BenchRecord> run_benchmark(const BenchConfig& config);

struct SummaryRow {
  Topology topology = Topology::tree;
  int length = 0;
  Method method = Method::exact;
  std::size_t records = 0;
  std::size_t completed = 0;
  double mean_runtime_s = 0.0;  // over completed records
  double mean_width = 0.0;      // over completed records
  std::optional<double> endpoint_rmse;  // approx rows: both endpoints vs exact, matched iterations
  double timeout_rate = 0.0;
};

// One row per (topology, length, method), sorted. Throws EmptyRecords.
std::vector<SummaryRow> summarize(const std::vector<BenchRecord>& records);

inline constexpr std::string_view kRecordsHeader =
    "topology,length,iteration,method,runtime_s,lower,upper,width,timed_out,resamples";
inline constexpr std::string_view kSummaryHeader =
    "topology,length,method,records,completed,mean_runtime_s,mean_width,endpoint_rmse,timeout_rate";

void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace credal
