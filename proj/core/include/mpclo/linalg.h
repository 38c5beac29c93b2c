#pragma once

// Dense kernels for the small matrices that appear in mpCLO instances.
// Everything is row-major double precision; no sparse formats.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mpclo::linalg {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  // Builds a matrix from a row-major buffer; throws when sizes disagree.
  static Matrix from_rows(std::size_t rows, std::size_t cols, Vector entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  const Vector& entries() const noexcept { return data_; }

  Matrix transpose() const;
  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

Vector multiply(const Matrix& a, std::span<const double> x);
// aᵀ·x without forming the transpose.
Vector multiply_transposed(const Matrix& a, std::span<const double> x);
// Stacks a on top of b (both must have the same column count).
Matrix vstack(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
double frobenius(const Matrix& a);
Vector axpy(double alpha, std::span<const double> x, std::span<const double> y);
Vector scaled(double alpha, std::span<const double> x);
Vector subtract(std::span<const double> a, std::span<const double> b);
bool is_symmetric(const Matrix& m, double rel_tol = 1e-12);

// Symmetric-pivoted Cholesky: P·m·Pᵀ = L·Lᵀ.
struct SpdFactor {
  std::size_t dimension = 0;
  Matrix lower;
  std::vector<std::size_t> permutation;  // row k of L corresponds to m's row permutation[k]
};

// Throws NotPositiveDefinite when a pivot is ≤ n·1e-13·max|diag|.
SpdFactor factor_spd(const Matrix& m);
Vector solve(const SpdFactor& factor, std::span<const double> rhs);
Matrix reconstruct(const SpdFactor& factor);

struct SymEig {
  Vector values;   // descending
  Matrix vectors;  // column k pairs with values[k]
};

// Cyclic Jacobi with a 30-sweep budget; throws NoConvergence beyond it.
SymEig sym_eig(const Matrix& m);
double min_eigenvalue(const Matrix& m);

struct Svd {
  Matrix u;
  Vector sigma;  // descending
  Matrix v;
};

// One-sided Jacobi SVD of a square matrix; keeps high relative accuracy
// for tiny singular values, which the NT scaling needs near convergence.
Svd svd(const Matrix& m);

// Numerical rank from column-pivoted Householder QR.
std::size_t rank(const Matrix& m, double tol = 1e-9);

// Orthonormal basis of {x : m·x = 0}, returned as rows.
Matrix null_space_rows(const Matrix& m, double tol = 1e-9);

// LU with partial pivoting; throws Singular when a pivot vanishes.
Vector solve_symmetric_indefinite(const Matrix& m, std::span<const double> rhs);

}  // namespace mpclo::linalg
