#include "credal/dense.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "credal/errors.hpp"

namespace credal {

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) fail(ErrorCode::DimensionMismatch, "row length differs from matrix width");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

RowEchelon row_reduce(Matrix a, std::vector<double> b, double pivot_tolerance, double consistency_tolerance) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < m; ++c) {
    std::size_t best = r;
    for (std::size_t i = r + 1; i < m; ++i)
      if (std::abs(a(i, c)) > std::abs(a(best, c))) best = i;
    if (std::abs(a(best, c)) <= pivot_tolerance) continue;
    if (best != r) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(r, j), a(best, j));
      std::swap(b[r], b[best]);
    }
    const double inv = 1.0 / a(r, c);
    for (std::size_t j = 0; j < n; ++j) a(r, j) *= inv;
    b[r] *= inv;
    a(r, c) = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r) continue;
      const double f = a(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) a(i, j) -= f * a(r, j);
      a(i, c) = 0.0;
      b[i] -= f * b[r];
    }
    pivots.push_back(c);
    ++r;
  }

  RowEchelon out;
  for (std::size_t i = r; i < m; ++i) out.max_residual = std::max(out.max_residual, std::abs(b[i]));
  out.consistent = out.max_residual <= consistency_tolerance;
  out.a = Matrix(r, n);
  out.b.assign(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(r));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < n; ++j) out.a(i, j) = std::abs(a(i, j)) <= pivot_tolerance ? 0.0 : a(i, j);
  out.pivots = std::move(pivots);
  return out;
}

std::optional<std::vector<double>> solve_square(Matrix a, std::vector<double> b, double pivot_tolerance) {
  const std::size_t n = a.rows();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t best = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(a(i, c)) > std::abs(a(best, c))) best = i;
    if (std::abs(a(best, c)) <= pivot_tolerance) return std::nullopt;
    if (best != c) {
      for (std::size_t j = c; j < n; ++j) std::swap(a(c, j), a(best, j));
      std::swap(b[c], b[best]);
    }
    for (std::size_t i = c + 1; i < n; ++i) {
      const double f = a(i, c) / a(c, c);
      if (f == 0.0) continue;
      for (std::size_t j = c; j < n; ++j) a(i, j) -= f * a(c, j);
      b[i] -= f * b[c];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

}  // namespace credal
