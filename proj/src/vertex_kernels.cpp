#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>

#include "credal/errors.hpp"
#include "credal/geometry.hpp"

namespace credal {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();
constexpr std::uint64_t kChunk = 1024;

// Equality form over columns (p, slacks), rank-reduced.
struct BasisProblem {
  std::size_t dimension = 0;  // number of p columns
  std::size_t columns = 0;    // p plus slacks
  RowEchelon reduced;
};

BasisProblem prepare(const LinearConstraintSystem& system) {
  const std::size_t n = system.dimension();
  const std::size_t m_ineq = system.inequalities().size();
  BasisProblem bp;
  bp.dimension = n;
  bp.columns = n + m_ineq;
  Matrix a(0, bp.columns);
  std::vector<double> b;
  std::vector<double> row(bp.columns);
  for (const auto& c : system.equalities()) {
    std::fill(row.begin(), row.end(), 0.0);
    std::copy(c.coefficients.begin(), c.coefficients.end(), row.begin());
    a.append_row(row);
    b.push_back(c.rhs);
  }
  for (std::size_t i = 0; i < m_ineq; ++i) {
    const auto& c = system.inequalities()[i];
    std::fill(row.begin(), row.end(), 0.0);
    std::copy(c.coefficients.begin(), c.coefficients.end(), row.begin());
    row[n + i] = c.relation == Relation::less_equal ? 1.0 : -1.0;
    a.append_row(row);
    b.push_back(c.rhs);
  }
  std::fill(row.begin(), row.end(), 0.0);
  std::fill(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n), 1.0);
  a.append_row(row);
  b.push_back(1.0);
  bp.reduced = row_reduce(std::move(a), std::move(b));
  if (!bp.reduced.consistent) fail(ErrorCode::Infeasible, "equality constraints are inconsistent");
  return bp;
}

std::vector<std::vector<std::uint64_t>> binomials(std::size_t n) {
  std::vector<std::vector<std::uint64_t>> c(n + 1, std::vector<std::uint64_t>(n + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) {
    c[i][0] = 1;
    for (std::size_t k = 1; k <= i; ++k) {
      const std::uint64_t x = c[i - 1][k - 1], y = c[i - 1][k];
      c[i][k] = (x == kSaturated || y == kSaturated || x > kSaturated - y) ? kSaturated : x + y;
    }
  }
  return c;
}

// Lexicographic rank -> combination of r out of n.
std::vector<std::size_t> unrank(std::uint64_t index, std::size_t n, std::size_t r,
                                const std::vector<std::vector<std::uint64_t>>& c) {
  std::vector<std::size_t> comb(r);
  std::size_t next = 0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t v = next;; ++v) {
      const std::uint64_t block = c[n - v - 1][r - i - 1];
      if (index < block) {
        comb[i] = v;
        next = v + 1;
        break;
      }
      index -= block;
    }
  }
  return comb;
}

bool advance(std::vector<std::size_t>& comb, std::size_t n) {
  const std::size_t r = comb.size();
  for (std::size_t i = r; i-- > 0;) {
    if (comb[i] < n - r + i) {
      ++comb[i];
      for (std::size_t j = i + 1; j < r; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

using Key = std::vector<std::int64_t>;

Key key_of(const std::vector<double>& p) {
  Key k(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) k[j] = std::llround(p[j] * 1e9);
  return k;
}

// Vertex for one basis choice, or nothing when singular or infeasible.
bool basic_point(const BasisProblem& bp, const std::vector<std::size_t>& basis, double tolerance,
                 std::vector<double>& out) {
  const std::size_t r = basis.size();
  Matrix m(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < r; ++k) m(i, k) = bp.reduced.a(i, basis[k]);
  auto z = solve_square(std::move(m), bp.reduced.b);
  if (!z) return false;
  for (double v : *z)
    if (v < -tolerance) return false;
  out.assign(bp.dimension, 0.0);
  for (std::size_t k = 0; k < r; ++k)
    if (basis[k] < bp.dimension) out[basis[k]] = (*z)[k];
  double total = 0.0;
  for (double& v : out) {
    if (std::abs(v) < 1e-12 || v < 0.0) v = 0.0;
    total += v;
  }
  if (!(total > 0.0)) return false;
  for (double& v : out) v /= total;
  return true;
}

struct ChunkResult {
  std::vector<std::vector<double>> points;  // first representative per key, in visit order
  std::set<Key> keys;
};

void scan(const BasisProblem& bp, std::uint64_t begin, std::uint64_t end,
          const std::vector<std::vector<std::uint64_t>>& c, double tolerance, ChunkResult& result) {
  const std::size_t r = bp.reduced.pivots.size();
  std::vector<std::size_t> comb = unrank(begin, bp.columns, r, c);
  std::vector<double> point;
  for (std::uint64_t i = begin; i < end; ++i) {
    if (basic_point(bp, comb, tolerance, point)) {
      Key k = key_of(point);
      if (result.keys.insert(std::move(k)).second) result.points.push_back(point);
    }
    if (i + 1 < end) advance(comb, bp.columns);
  }
}

std::uint64_t basis_count(const BasisProblem& bp, const std::vector<std::vector<std::uint64_t>>& c,
                          const VertexOptions& options) {
  const std::uint64_t total = c[bp.columns][bp.reduced.pivots.size()];
  if (total > options.max_bases)
    fail(ErrorCode::VertexExplosion, "basis enumeration over " + std::to_string(bp.columns) + " columns choose " +
                                         std::to_string(bp.reduced.pivots.size()) + " exceeds the cap");
  return total;
}

VertexSet finish(std::vector<ChunkResult>& chunks, std::uint64_t examined, const VertexOptions& options) {
  std::set<Key> seen;
  std::vector<std::vector<double>> unique;
  for (ChunkResult& chunk : chunks) {
    for (std::vector<double>& p : chunk.points) {
      if (seen.insert(key_of(p)).second) unique.push_back(std::move(p));
      if (unique.size() > options.max_vertices)
        fail(ErrorCode::VertexExplosion, "vertex count exceeds the cap of " + std::to_string(options.max_vertices));
    }
  }
  if (unique.empty()) fail(ErrorCode::Infeasible, "polytope has no basic feasible solution");
  std::sort(unique.begin(), unique.end());

  // Merge neighbours closer than the dedup tolerance in L-infinity.
  VertexSet out;
  out.dedup_tolerance = options.dedup_tolerance;
  out.bases_examined = examined;
  for (std::vector<double>& p : unique) {
    bool duplicate = false;
    for (std::size_t k = out.vertices.size(); k-- > 0;) {
      const auto& q = out.vertices[k];
      if (p[0] - q[0] > options.dedup_tolerance) break;
      double d = 0.0;
      for (std::size_t j = 0; j < p.size(); ++j) d = std::max(d, std::abs(p[j] - q[j]));
      if (d <= options.dedup_tolerance) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) out.vertices.push_back(std::move(p));
  }
  return out;
}

}  // namespace

VertexSet vertex_enumeration_serial(const LinearConstraintSystem& system, const VertexOptions& options) {
  if (system.dimension() == 0) fail(ErrorCode::DimensionMismatch, "zero-dimensional system");
  const BasisProblem bp = prepare(system);
  const auto c = binomials(bp.columns);
  const std::uint64_t total = basis_count(bp, c, options);
  std::vector<ChunkResult> chunks(1);
  scan(bp, 0, total, c, options.feasibility_tolerance, chunks[0]);
  return finish(chunks, total, options);
}

VertexSet vertex_enumeration(const LinearConstraintSystem& system, const VertexOptions& options) {
  if (system.dimension() == 0) fail(ErrorCode::DimensionMismatch, "zero-dimensional system");
  const BasisProblem bp = prepare(system);
  const auto c = binomials(bp.columns);
  const std::uint64_t total = basis_count(bp, c, options);
  const auto chunk_count = static_cast<std::int64_t>((total + kChunk - 1) / kChunk);
  std::vector<ChunkResult> chunks(static_cast<std::size_t>(chunk_count));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t k = 0; k < chunk_count; ++k) {
    const std::uint64_t begin = static_cast<std::uint64_t>(k) * kChunk;
    const std::uint64_t end = std::min(total, begin + kChunk);
    scan(bp, begin, end, c, options.feasibility_tolerance, chunks[static_cast<std::size_t>(k)]);
  }
  return finish(chunks, total, options);
}

}  // namespace credal
