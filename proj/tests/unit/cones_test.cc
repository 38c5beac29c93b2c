#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mpclo/cones.h"
#include "mpclo/error.h"
#include "test_support.h"

namespace mpclo::cones {
namespace {

constexpr double kR2 = 1.4142135623730951;

Matrix random_spd(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = g(rng);
  return b * b.transpose() + 0.1 * Matrix::identity(n);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

TEST(Cones, SvecLayoutOrderThree) {
  const Matrix x{{1, 2, 3}, {2, 4, 5}, {3, 5, 6}};
  const Vector v = svec(x);
  const Vector expect{1, 2 * kR2, 3 * kR2, 4, 5 * kR2, 6};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(v[i], expect[i], 1e-15);
  EXPECT_EQ(svec_index(1, 2, 3), 4u);
  EXPECT_EQ(svec_index(2, 1, 3), 4u);
  EXPECT_EQ(max_abs_diff(smat(v, 3), x) < 1e-15, true);
}

TEST(Cones, SvecPreservesTraceInnerProduct) {
  std::mt19937_64 rng(2);
  const Matrix a = random_spd(rng, 4);
  const Matrix b = random_spd(rng, 4);
  double tr = 0.0;
  const Matrix ab = a * b;
  for (std::size_t i = 0; i < 4; ++i) tr += ab(i, i);
  EXPECT_NEAR(linalg::dot(svec(a), svec(b)), tr, 1e-12);
}

TEST(Cones, BlockRoundTrip) {
  const ConeSpec cone({{BlockKind::kOrthant, 2}, {BlockKind::kPsd, 2}});
  EXPECT_EQ(cone.dim(), 5u);
  EXPECT_EQ(cone.degree(), 4u);
  const std::vector<BlockValue> blocks{Vector{1, 2}, Matrix{{3, 1}, {1, 4}}};
  const Vector v = to_svec(blocks, cone);
  EXPECT_EQ(v.size(), 5u);
  const auto back = from_svec(v, cone);
  EXPECT_EQ(std::get<Vector>(back[0]), (Vector{1, 2}));
  EXPECT_LT(max_abs_diff(std::get<Matrix>(back[1]), Matrix{{3, 1}, {1, 4}}), 1e-15);
  EXPECT_EQ(identity_point(cone), (Vector{1, 1, 1, 0, 1}));
}

TEST(Cones, InteriorMarginAndBoundary) {
  const ConeSpec psd2 = ConeSpec::psd(2);
  EXPECT_NEAR(interior_margin(svec(Matrix{{2, 0}, {0, 3}}), psd2), 2.0, 1e-14);
  EXPECT_NEAR(interior_margin(svec(Matrix{{1, 1}, {1, 1}}), psd2), 0.0, 1e-14);
  EXPECT_TRUE(on_boundary(svec(Matrix{{1, 1}, {1, 1}}), psd2));
  EXPECT_LT(interior_margin(svec(Matrix{{1, 2}, {2, 1}}), psd2), 0.0);
  EXPECT_DOUBLE_EQ(interior_margin(Vector{3, -1, 2}, ConeSpec::orthant(3)), -1.0);
}

TEST(Cones, IntervalOrthantClosedForm) {
  // c + λa > 0 with c = (1, 2), a = (1, -1): λ ∈ (−1, 2).
  const ConeInterval iv = cone_interval(Vector{1, 2}, Vector{1, -1}, ConeSpec::orthant(2));
  ASSERT_FALSE(iv.empty);
  EXPECT_NEAR(iv.lower, -1.0, 1e-8);
  EXPECT_NEAR(iv.upper, 2.0, 1e-8);
  EXPECT_TRUE(iv.contains(0.0));
  EXPECT_FALSE(iv.contains(2.5));
}

TEST(Cones, IntervalUnboundedAndEmpty) {
  const ConeSpec psd2 = ConeSpec::psd(2);
  const ConeInterval up = cone_interval(svec(Matrix::identity(2)), svec(Matrix::identity(2)), psd2);
  ASSERT_FALSE(up.empty);
  EXPECT_NEAR(up.lower, -1.0, 1e-8);
  EXPECT_TRUE(std::isinf(up.upper));
  const ConeInterval none = cone_interval(svec(Matrix{{1, 0}, {0, -1}}), svec(Matrix{{0, 0}, {0, 0}}), psd2);
  EXPECT_TRUE(none.empty);
}

TEST(Cones, IntervalMatchesDenseSampling) {
  std::mt19937_64 rng(17);
  for (BlockKind kind : {BlockKind::kOrthant, BlockKind::kPsd}) {
    for (std::size_t n = 1; n <= 3; ++n) {
      const ConeSpec cone({{kind, n}});
      for (int t = 0; t < 10; ++t) {
        const auto [c, a] = test::random_pair(rng, cone);
        const ConeInterval iv = cone_interval(c, a, cone);
        const auto oracle = test::sampled_interval(c, a, cone, 4001);
        if (!oracle) {
          EXPECT_TRUE(iv.empty || std::min(iv.upper, 10.0) - std::max(iv.lower, -10.0) < 1e-2);
          continue;
        }
        ASSERT_FALSE(iv.empty);
        EXPECT_NEAR(std::clamp(iv.lower, -10.0, 10.0), oracle->first, 5e-3);
        EXPECT_NEAR(std::clamp(iv.upper, -10.0, 10.0), oracle->second, 5e-3);
      }
    }
  }
}

TEST(Cones, NtScalingOrthant) {
  const NtScaling s = nt_scaling(Vector{4, 1}, Vector{1, 4}, ConeSpec::orthant(2));
  EXPECT_NEAR(s.blocks[0].w[0], 2.0, 1e-15);
  EXPECT_NEAR(s.blocks[0].w[1], 0.5, 1e-15);
  EXPECT_NEAR(s.blocks[0].lambda[0], 2.0, 1e-15);
  EXPECT_NEAR(s.blocks[0].lambda[1], 2.0, 1e-15);
}

TEST(Cones, NtScalingPsdIdentities) {
  std::mt19937_64 rng(9);
  for (std::size_t n = 2; n <= 4; ++n) {
    const Matrix x = random_spd(rng, n);
    const Matrix y = random_spd(rng, n);
    const NtScaling s = nt_scaling(svec(x), svec(y), ConeSpec::psd(n));
    const BlockScaling& b = s.blocks[0];
    EXPECT_LT(max_abs_diff(b.W * y * b.W, x), 1e-10 * (1 + linalg::frobenius(x)));
    const Matrix lam = Matrix::diagonal(b.lambda);
    EXPECT_LT(max_abs_diff(b.R.transpose() * y * b.R, lam), 1e-10);
    EXPECT_LT(max_abs_diff(b.R_inv * x * b.R_inv.transpose(), lam), 1e-10);
    EXPECT_LT(max_abs_diff(b.R * b.R_inv, Matrix::identity(n)), 1e-10);
  }
}

TEST(Cones, NtScalingRejectsBoundaryPoints) {
  EXPECT_THROW(nt_scaling(Vector{1, 0}, Vector{1, 1}, ConeSpec::orthant(2)), Error);
}

}  // namespace
}  // namespace mpclo::cones
