#include <gtest/gtest.h>

#include "mpclo/error.h"
#include "mpclo/problem.h"
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

TEST(Problem, FixturesValidate) {
  for (const ProblemData& p : {test::elliptope(), test::single_param(), test::square_lp()}) {
    const ValidationReport r = validate(p);
    EXPECT_TRUE(r.ok()) << p.name;
    EXPECT_EQ(r.rank_a, p.m());
    EXPECT_EQ(r.rank_m, p.r());
    EXPECT_EQ(r.rank_stacked, p.m() + p.r());
  }
}

TEST(Problem, SingleParameterDualSlaterOnlyAwayFromZero) {
  const ValidationReport r = validate(test::single_param());
  EXPECT_EQ(r.primal_slater, SlaterStatus::kStrict);
  EXPECT_EQ(r.dual_slater, SlaterStatus::kStrict);
  // u = 0 sits on the boundary of the dual parameter set.
  EXPECT_EQ(r.dual_slater_at_zero, SlaterStatus::kMarginal);
}

TEST(Problem, RankFailuresNameTheAssumption) {
  ProblemData p = test::square_lp();
  p.M = Matrix{{1, 0, 0, 0}, {2, 0, 0, 0}};
  EXPECT_EQ(code_of([&] { validate(p); }), ErrorCode::kRankDeficient);

  p = test::square_lp();
  p.M = Matrix{{1, 0, 1, 0}, {0, 1, 0, 0}};  // first row equals a row of A
  try {
    validate(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRankDeficient);
    EXPECT_NE(std::string(e.what()).find("[A; M]"), std::string::npos);
  }

  p = test::square_lp();
  p.A = Matrix{{1, 0, 1, 0}, {2, 0, 2, 0}};
  EXPECT_EQ(code_of([&] { validate(p); }), ErrorCode::kRankDeficient);
}

TEST(Problem, DimensionChecks) {
  ProblemData p = test::elliptope();
  p.c.pop_back();
  EXPECT_EQ(code_of([&] { check_dimensions(p); }), ErrorCode::kDimensionMismatch);
  p = test::elliptope();
  p.b = {1, 1};
  EXPECT_EQ(code_of([&] { check_dimensions(p); }), ErrorCode::kDimensionMismatch);
}

TEST(Problem, PrimalSlaterFailsOnThinFeasibleSet) {
  // x ≥ 0 with x1 + x2 = 0 leaves only the origin.
  ProblemData p;
  p.cone = cones::ConeSpec::orthant(3);
  p.A = Matrix{{1, 1, 0}};
  p.b = {0};
  p.c = {1, 1, 1};
  p.M = Matrix{{0, 0, 1}};
  p.d = {0, 0, 1};
  const ValidationReport r = validate(p);
  EXPECT_NE(r.primal_slater, SlaterStatus::kStrict);
  EXPECT_FALSE(r.ok());
}

TEST(Problem, AssemblyShapes) {
  const ProblemData p = test::elliptope();
  const SolverInstance a = assemble_primal(p, Vector{0.5, -0.25});
  EXPECT_EQ(a.G.rows(), 3u);
  EXPECT_EQ(a.leading_rows, 3u);
  const Vector mtu = linalg::multiply_transposed(p.M, Vector{0.5, -0.25});
  for (std::size_t i = 0; i < p.q(); ++i) EXPECT_DOUBLE_EQ(a.g[i], p.c[i] + mtu[i]);

  const SolverInstance b = assemble_primal_rhs(p, Vector{0.1, 0.2});
  EXPECT_EQ(b.G.rows(), 5u);
  EXPECT_EQ(b.leading_rows, 3u);
  const Vector md = linalg::multiply(p.M, p.d);
  EXPECT_DOUBLE_EQ(b.h[3], md[0] + 0.1);
  EXPECT_DOUBLE_EQ(b.h[4], md[1] + 0.2);
  EXPECT_EQ(b.g, p.c);
}

TEST(Problem, ProjectParameters) {
  const ProblemData p = test::elliptope();
  const ProblemData s = project_parameters(p, Matrix{{1, 0}, {0, 0}});
  EXPECT_EQ(s.M.rows(), 2u);
  for (std::size_t j = 0; j < p.q(); ++j) {
    EXPECT_DOUBLE_EQ(s.M(0, j), p.M(0, j));
    EXPECT_DOUBLE_EQ(s.M(1, j), 0.0);
  }
}

}  // namespace
}  // namespace mpclo
