#include <gtest/gtest.h>

#include <cmath>

#include "mpclo/error.h"
#include "mpclo/mappings.h"
#include "test_support.h"

namespace mpclo {
namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

// Optimal value of P(u) for the elliptope: for fixed x12 = a, x13 = b the
// best x23 is ab + √((1−a²)(1−b²)), leaving a 2-d search over [−1, 1]².
double elliptope_value_oracle(double u1, double u2) {
  const auto f = [&](double a, double b) {
    return -(a * b + std::sqrt((1 - a * a) * (1 - b * b))) + u1 * a - u2 * b;
  };
  double best = INFINITY, ba = 0, bb = 0;
  const int n = 801;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double a = -1 + 2.0 * i / (n - 1), b = -1 + 2.0 * j / (n - 1);
      if (const double v = f(a, b); v < best) best = v, ba = a, bb = b;
    }
  double h = 2.0 / (n - 1);
  while (h > 1e-9) {
    for (int i = -4; i <= 4; ++i)
      for (int j = -4; j <= 4; ++j) {
        const double a = std::clamp(ba + h * i / 4, -1.0, 1.0);
        const double b = std::clamp(bb + h * j / 4, -1.0, 1.0);
        if (const double v = f(a, b); v < best) best = v, ba = a, bb = b;
      }
    h /= 2;
  }
  return best;
}

TEST(Mappings, SingleParameterPhi) {
  const ProblemData p = test::single_param();
  for (double u : {0.25, 1.0, 4.0}) {
    const MappingValue mv = eval_phi(p, Vector{u});
    EXPECT_TRUE(mv.singleton);
    EXPECT_NEAR(mv.witness[0], 1 / std::sqrt(u) - 1, 1e-7);
    EXPECT_NEAR(mv.optimal_value, 2 * std::sqrt(u), 1e-8);
  }
  EXPECT_EQ(code_of([&] { eval_phi(p, Vector{0.0}); }), ErrorCode::kBoundaryUndefined);
  EXPECT_EQ(code_of([&] { eval_phi(p, Vector{-1.0}); }), ErrorCode::kOutsideDomain);
}

TEST(Mappings, MembershipSingleParameter) {
  const ProblemData p = test::single_param();
  EXPECT_EQ(membership_theta_d(p, Vector{1.0}).status, Membership::kInterior);
  EXPECT_EQ(membership_theta_d(p, Vector{0.0}).status, Membership::kBoundary);
  EXPECT_EQ(membership_theta_d(p, Vector{-0.5}).status, Membership::kOutside);
}

TEST(Mappings, MembershipElliptopePrimal) {
  const ProblemData p = test::elliptope();
  EXPECT_EQ(membership_theta_p(p, Vector{0.5, 0.5}).status, Membership::kInterior);
  EXPECT_EQ(membership_theta_p(p, Vector{1.0, 0.3}).status, Membership::kBoundary);
  EXPECT_EQ(membership_theta_p(p, Vector{1.5, 0.0}).status, Membership::kOutside);
  EXPECT_EQ(membership_theta_d(p, Vector{-3.0, 2.0}).status, Membership::kInterior);
}

TEST(Mappings, ElliptopeLinearitySetImages) {
  const ProblemData p = test::elliptope();
  const std::vector<std::pair<Vector, Vector>> cases{
      {{-3, -3}, {1, 1}}, {{3, 3}, {-1, -1}}, {{-0.5, 0.5}, {1, -1}}, {{0.5, -0.5}, {-1, 1}}};
  for (const auto& [u, v] : cases) {
    const MappingValue mv = eval_phi(p, u);
    EXPECT_TRUE(mv.singleton) << u[0] << "," << u[1];
    EXPECT_NEAR(mv.witness[0], v[0], 1e-6);
    EXPECT_NEAR(mv.witness[1], v[1], 1e-6);
  }
}

TEST(Mappings, ElliptopeTransitionPointHasSegmentImage) {
  const ProblemData p = test::elliptope();
  const MappingValue mv = eval_phi(p, Vector{0, 0});
  EXPECT_FALSE(mv.singleton);
  ASSERT_EQ(mv.extents.size(), 4u);
  // Φ(0) = {(t, −t) : |t| ≤ 1}; along (1, −1)/√2 that is [−√2, √2].
  EXPECT_NEAR(mv.extents[3].lower, -std::sqrt(2.0), 1e-4);
  EXPECT_NEAR(mv.extents[3].upper, std::sqrt(2.0), 1e-4);
  EXPECT_NEAR(mv.extents[2].width(), 0.0, 1e-4);
}

TEST(Mappings, ElliptopeClosedForms) {
  const ProblemData p = test::elliptope();
  for (const auto& [u1, u2] : {std::pair{0.5, 0.4}, {-0.7, -2.0}, {1.5, 0.9}}) {
    const MappingValue mv = eval_phi(p, Vector{u1, u2});
    const Vector v = test::elliptope_phi(u1, u2);
    EXPECT_TRUE(mv.singleton);
    EXPECT_NEAR(mv.witness[0], v[0], 1e-6);
    EXPECT_NEAR(mv.witness[1], v[1], 1e-6);
  }
  for (const auto& [v1, v2] : {std::pair{-0.65, 0.3125}, {-0.2, 0.05}, {0.6, 0.3}}) {
    const MappingValue mv = eval_psi(p, Vector{v1, v2});
    const Vector u = test::elliptope_psi(v1, v2);
    EXPECT_TRUE(mv.singleton);
    EXPECT_NEAR(mv.witness[0], u[0], 1e-6);
    EXPECT_NEAR(mv.witness[1], u[1], 1e-6);
  }
}

TEST(Mappings, ElliptopeOptimalValueMatchesSearch) {
  const ProblemData p = test::elliptope();
  for (const auto& [u1, u2] : {std::pair{0.5, 0.4}, {-3.0, -3.0}, {0.3, -1.2}}) {
    const MappingValue mv = eval_phi(p, Vector{u1, u2});
    EXPECT_NEAR(mv.optimal_value, elliptope_value_oracle(u1, u2), 1e-6);
  }
}

TEST(Mappings, PsiDomain) {
  const ProblemData p = test::elliptope();
  EXPECT_EQ(code_of([&] { eval_psi(p, Vector{1.5, 0.0}); }), ErrorCode::kOutsideDomain);
  const MappingValue corner = eval_psi(p, Vector{1.0, 1.0});
  EXPECT_EQ(corner.slater, SlaterStatus::kMarginal);
  EXPECT_EQ(corner.membership, Membership::kBoundary);
}

TEST(Mappings, KktResidualVanishesAtSolutions) {
  const ProblemData p = test::elliptope();
  const Vector u{0.5, 0.4};
  const MappingValue mv = eval_phi(p, u);
  const ConicSolution& s = mv.solution;
  EXPECT_LT(mpkkt_residual(p, u, mv.witness, s.x, s.w, s.y).max(), 1e-8);
  const Vector off{mv.witness[0] + 0.1, mv.witness[1]};
  EXPECT_GT(mpkkt_residual(p, u, off, s.x, s.w, s.y).max(), 1e-2);
}

TEST(Mappings, WitnessOnlyMode) {
  MappingOptions opt;
  opt.extents = false;
  const MappingValue mv = eval_phi(test::elliptope(), Vector{0.5, 0.4}, {}, opt);
  EXPECT_TRUE(mv.extents.empty());
  EXPECT_EQ(mv.witness.size(), 2u);
}

TEST(Mappings, DefaultDirections) {
  EXPECT_EQ(default_directions(1).size(), 1u);
  const auto d = default_directions(2);
  ASSERT_EQ(d.size(), 4u);
  EXPECT_NEAR(d[3][0], 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(d[3][1], -1 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(default_directions(3).size(), 3u);
}

}  // namespace
}  // namespace mpclo
