#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mpclo/error.h"
#include "mpclo/linalg.h"

namespace mpclo::linalg {
namespace {

// Laplace expansion along the first row; fine for the orders used here.
double cofactor_det(const Matrix& m) {
  const std::size_t n = m.rows();
  if (n == 1) return m(0, 0);
  double det = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    Matrix minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t k = 0, c = 0; k < n; ++k)
        if (k != j) minor(i - 1, c++) = m(i, k);
    det += (j % 2 == 0 ? 1.0 : -1.0) * m(0, j) * cofactor_det(minor);
  }
  return det;
}

Matrix random_symmetric(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = dist(rng);
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

TEST(Linalg, EigenvaluesAreRootsOfTheCharacteristicPolynomial) {
  std::mt19937_64 rng(11);
  for (std::size_t n = 1; n <= 5; ++n) {
    const Matrix a = random_symmetric(rng, n);
    const SymEig e = sym_eig(a);
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += a(i, i);
    double sum = 0.0, prod = 1.0;
    for (double v : e.values) {
      const Matrix shifted = a - v * Matrix::identity(n);
      EXPECT_NEAR(cofactor_det(shifted), 0.0, 1e-10);
      sum += v;
      prod *= v;
    }
    EXPECT_NEAR(sum, trace, 1e-12);
    EXPECT_NEAR(prod, cofactor_det(a), 1e-12);
    for (std::size_t i = 1; i < n; ++i) EXPECT_GE(e.values[i - 1], e.values[i]);
  }
}

TEST(Linalg, EigenvectorsReconstructTheMatrix) {
  std::mt19937_64 rng(3);
  const Matrix a = random_symmetric(rng, 6);
  const SymEig e = sym_eig(a);
  const Matrix back = e.vectors * Matrix::diagonal(e.values) * e.vectors.transpose();
  EXPECT_LT(max_abs_diff(back, a), 1e-13);
  EXPECT_LT(max_abs_diff(e.vectors.transpose() * e.vectors, Matrix::identity(6)), 1e-13);
}

TEST(Linalg, DiagonalEigenvaluesComeBackSorted) {
  const SymEig e = sym_eig(Matrix::diagonal(Vector{1.0, 3.0, 2.0}));
  EXPECT_EQ(e.values, (Vector{3.0, 2.0, 1.0}));
  EXPECT_DOUBLE_EQ(min_eigenvalue(Matrix{{2, 1}, {1, 2}}), 1.0);
}

TEST(Linalg, CholeskyReconstructsAndSolves) {
  const Matrix m{{4, 2, 0}, {2, 5, 1}, {0, 1, 3}};
  const SpdFactor f = factor_spd(m);
  EXPECT_LT(max_abs_diff(reconstruct(f), m), 1e-14);
  const Vector x = solve(f, Vector{2, 8, 4});
  const Vector back = multiply(m, x);
  EXPECT_NEAR(back[0], 2, 1e-13);
  EXPECT_NEAR(back[1], 8, 1e-13);
  EXPECT_NEAR(back[2], 4, 1e-13);
}

TEST(Linalg, CholeskyRejectsIndefinite) {
  try {
    factor_spd(Matrix{{1, 2}, {2, 1}});
    FAIL() << "expected NotPositiveDefinite";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotPositiveDefinite);
  }
}

TEST(Linalg, SvdReconstructsIncludingTinySingularValues) {
  const Matrix m{{1, 0, 0}, {0, 1e-9, 0}, {0, 0, 1e-14}};
  const Svd s = svd(m);
  EXPECT_NEAR(s.sigma[0], 1.0, 1e-15);
  EXPECT_NEAR(s.sigma[1] / 1e-9, 1.0, 1e-12);
  EXPECT_NEAR(s.sigma[2] / 1e-14, 1.0, 1e-12);

  std::mt19937_64 rng(5);
  const Matrix a = random_symmetric(rng, 4) * random_symmetric(rng, 4);
  const Svd f = svd(a);
  const Matrix back = f.u * Matrix::diagonal(f.sigma) * f.v.transpose();
  EXPECT_LT(max_abs_diff(back, a), 1e-13);
  EXPECT_NEAR(f.sigma[0] * f.sigma[1] * f.sigma[2] * f.sigma[3], std::abs(cofactor_det(a)), 1e-12);
}

TEST(Linalg, SvdOfRankDeficientMatrix) {
  const Matrix a{{1, 2, 0}, {2, 4, 0}, {0, 0, 0}};
  const Svd f = svd(a);
  EXPECT_NEAR(f.sigma[0], 5.0, 1e-13);
  EXPECT_NEAR(f.sigma[1], 0.0, 1e-13);
  EXPECT_NEAR(f.sigma[2], 0.0, 1e-13);
}

TEST(Linalg, RankAndNullSpace) {
  const Matrix a{{1, 0, 1, 0}, {0, 1, 0, 1}, {1, 1, 1, 1}};
  EXPECT_EQ(rank(a), 2u);
  const Matrix n = null_space_rows(a);
  ASSERT_EQ(n.rows(), 2u);
  for (std::size_t k = 0; k < n.rows(); ++k) {
    const Vector z = multiply(a, n.row(k));
    EXPECT_LT(norm_inf(z), 1e-13);
    EXPECT_NEAR(norm2(n.row(k)), 1.0, 1e-13);
  }
  EXPECT_NEAR(dot(n.row(0), n.row(1)), 0.0, 1e-13);
  EXPECT_EQ(rank(Matrix(2, 3)), 0u);
  EXPECT_THROW(rank(a, 0.0), Error);
}

TEST(Linalg, IndefiniteSolve) {
  const Matrix m{{0, 1}, {1, 0}};
  const Vector x = solve_symmetric_indefinite(m, Vector{3, 5});
  EXPECT_DOUBLE_EQ(x[0], 5);
  EXPECT_DOUBLE_EQ(x[1], 3);
  EXPECT_THROW(solve_symmetric_indefinite(Matrix{{1, 1}, {1, 1}}, Vector{1, 2}), Error);
}

TEST(Linalg, ShapeErrors) {
  EXPECT_THROW((Matrix{{1, 2}} * Matrix{{1, 2}}), Error);
  EXPECT_THROW(dot(Vector{1}, Vector{1, 2}), Error);
  EXPECT_THROW(Matrix::from_rows(2, 2, Vector{1, 2, 3}), Error);
  EXPECT_TRUE(is_symmetric(Matrix{{1, 2}, {2, 1}}));
  EXPECT_FALSE(is_symmetric(Matrix{{1, 2}, {2.1, 1}}));
}

}  // namespace
}  // namespace mpclo::linalg
