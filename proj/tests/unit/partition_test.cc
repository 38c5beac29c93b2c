#include <gtest/gtest.h>

#include <cmath>

#include "mpclo/error.h"
#include "mpclo/io.h"
#include "mpclo/partition.h"
#include "test_support.h"

namespace mpclo {
namespace {

GridSpec grid(Side side, double lo, double hi, std::size_t res, std::size_t r = 2) {
  GridSpec g;
  g.side = side;
  g.rectangle.assign(r, {lo, hi});
  g.resolution = res;
  return g;
}

TEST(Partition, GridGeometry) {
  const GridSpec g = grid(Side::kDualThetaD, -1, 1, 5);
  EXPECT_EQ(g.cell_count(), 25u);
  const Vector pt = g.point(0, 4);
  EXPECT_DOUBLE_EQ(pt[0], -1.0);
  EXPECT_DOUBLE_EQ(pt[1], 1.0);
  EXPECT_EQ(grid(Side::kDualThetaD, 0, 1, 4, 1).cell_count(), 4u);
}

TEST(Partition, CheckGridRejectsBadSpecs) {
  EXPECT_THROW(check_grid(grid(Side::kDualThetaD, -1, 1, 2), 2), Error);
  EXPECT_THROW(check_grid(grid(Side::kDualThetaD, 1, 1, 5), 2), Error);
  EXPECT_THROW(check_grid(grid(Side::kDualThetaD, -1, 1, 5, 3), 3), Error);
  EXPECT_THROW(check_grid(grid(Side::kDualThetaD, -1, 1, 5, 1), 2), Error);
  EXPECT_NO_THROW(check_grid(grid(Side::kDualThetaD, -1, 1, 5), 2));
}

TEST(Partition, SquareLpHasOnlyLinearitySets) {
  const PartitionReport rep = classify_grid(test::square_lp(), grid(Side::kDualThetaD, -1, 1, 11));
  EXPECT_EQ(rep.summary.nonlinearity_cells, 0u);
  EXPECT_EQ(rep.summary.nonlinearity_regions, 0u);
  EXPECT_EQ(rep.summary.linearity_regions, 4u);
  EXPECT_EQ(rep.summary.outside_cells, 0u);
  for (const CellClass& c : rep.cells) EXPECT_TRUE(c.diagnostic.empty()) << c.diagnostic;
}

TEST(Partition, SingleParameterIsOneNonlinearitySet) {
  const PartitionReport rep =
      classify_grid(test::single_param(), grid(Side::kDualThetaD, 0.1, 4, 9, 1));
  EXPECT_EQ(rep.summary.nonlinearity_regions, 1u);
  EXPECT_EQ(rep.summary.nonlinearity_cells, 9u);
  EXPECT_EQ(rep.summary.linearity_regions, 0u);
}

TEST(Partition, ElliptopeCellClasses) {
  const ProblemData p = test::elliptope();
  EXPECT_EQ(classify_point(p, Side::kDualThetaD, Vector{0.5, 0.4}).tag, CellTag::kNonlinearity);
  const CellClass lin = classify_point(p, Side::kDualThetaD, Vector{-3, -3});
  EXPECT_TRUE(lin.linearity_type);
  EXPECT_NEAR(lin.image[0], 1.0, 1e-6);
  EXPECT_NEAR(lin.image[1], 1.0, 1e-6);
  EXPECT_EQ(classify_point(p, Side::kPrimalThetaP, Vector{1.5, 0}).tag,
            CellTag::kBoundaryOrOutside);
}

TEST(Partition, ResultIndependentOfWorkerCount) {
  const ProblemData p = test::elliptope();
  const GridSpec g = grid(Side::kDualThetaD, -2, 2, 7);
  PartitionOptions one, three;
  one.workers = 1;
  three.workers = 3;
  EXPECT_EQ(io::partition_csv(classify_grid(p, g, one)), io::partition_csv(classify_grid(p, g, three)));
}

TEST(Partition, RefinementKeepsSquareLpRegions) {
  const RefineReport r = refine_check(test::square_lp(), grid(Side::kDualThetaD, -1, 1, 9), 2);
  EXPECT_EQ(r.fine_resolution, 17u);
  EXPECT_TRUE(r.stable);
  EXPECT_EQ(r.coarse.linearity_regions, r.fine.linearity_regions);
}

TEST(Partition, VertexCensus) {
  EXPECT_EQ(vertex_census(test::elliptope(), 200, 7).size(), 4u);
  EXPECT_EQ(vertex_census(test::square_lp(), 200, 7).size(), 4u);
  EXPECT_EQ(vertex_census(test::single_param(), 200, 7).size(), 0u);
  const auto v = vertex_census(test::square_lp(), 200, 7);
  std::size_t total = 0;
  for (const Vertex& x : v) {
    total += x.cluster_size;
    EXPECT_NEAR(std::abs(x.image[0]), 0.5, 1e-7);
    EXPECT_NEAR(std::abs(x.image[1]), 0.5, 1e-7);
  }
  EXPECT_GT(total, 0u);
}

TEST(Partition, CurvatureOfValueFunction) {
  // Optimal value 2√u has second derivative −u^(−3/2)/2.
  const double k = value_curvature(test::single_param(), Side::kDualThetaD, Vector{1.0}, Vector{1.0});
  EXPECT_NEAR(k, -0.5, 1e-3);
  const double flat =
      value_curvature(test::square_lp(), Side::kDualThetaD, Vector{0.5, 0.5}, Vector{1.0, 0.0});
  EXPECT_NEAR(flat, 0.0, 1e-6);
}

}  // namespace
}  // namespace mpclo
