#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace credal {

// Small row-major dense matrix for the polytope routines. Sizes here are at
// most a few hundred entries per side.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  void append_row(std::span<const double> values);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Reduced row echelon form of [A | b]. Rows that reduce to zero are dropped;
// a dropped row whose right-hand side stays above `tolerance` marks the system
// inconsistent.
struct RowEchelon {
  Matrix a;
  std::vector<double> b;
  std::vector<std::size_t> pivots;  // pivot column of each kept row
  bool consistent = true;
  double max_residual = 0.0;        // largest |rhs| among dropped rows
};

RowEchelon row_reduce(Matrix a, std::vector<double> b, double pivot_tolerance = 1e-9,
                      double consistency_tolerance = 1e-7);

// Solves the square system by Gaussian elimination with partial pivoting.
// nullopt when a pivot falls below `pivot_tolerance`.
std::optional<std::vector<double>> solve_square(Matrix a, std::vector<double> b, double pivot_tolerance = 1e-10);

}  // namespace credal
