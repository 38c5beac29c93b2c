#pragma once

// Grid classification of a parameter rectangle into nonlinearity sets,
// linearity sets and transition faces, plus a vertex census of the
// primal feasible set.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mpclo/mappings.h"

namespace mpclo {

enum class Side { kPrimalThetaP, kDualThetaD };

std::string_view to_string(Side s);

struct GridSpec {
  Side side = Side::kDualThetaD;
  // One closed interval per parameter coordinate (r = 1 or 2).
  std::vector<std::pair<double, double>> rectangle;
  std::size_t resolution = 3;

  std::size_t dimension() const { return rectangle.size(); }
  std::size_t cell_count() const;
  Vector point(std::size_t i, std::size_t j) const;
};

// Throws InvalidArgument on resolution < 3, degenerate rectangles, or r ∉ {1, 2}.
void check_grid(const GridSpec& g, std::size_t r);

enum class CellTag { kNonlinearity, kLinearity, kTransitionFace, kBoundaryOrOutside };

std::string_view to_string(CellTag t);

struct CellClass {
  std::size_t index_i = 0;
  std::size_t index_j = 0;
  Vector point;
  CellTag tag = CellTag::kBoundaryOrOutside;
  // Non-singleton somewhere in the round trip; refined into Linearity or
  // TransitionFace once regions are known.
  bool linearity_type = false;
  int region_id = -1;
  int face_dim = -1;
  Vector image;  // forward witness
  std::vector<Interval> extents;  // forward extents along the default directions
  double extent_width_max = 0.0;
  double curvature = 0.0;  // NaN when not computed
  std::string diagnostic;
};

struct Region {
  int id = 0;
  CellTag tag = CellTag::kLinearity;
  Vector image;  // image of the first member cell
  int dim = 0;
  std::size_t cell_count = 0;
};

struct PartitionSummary {
  std::size_t nonlinearity_regions = 0;
  std::size_t linearity_regions = 0;  // full-dimensional only
  std::size_t transition_regions = 0;
  std::size_t nonlinearity_cells = 0;
  std::size_t linearity_cells = 0;
  std::size_t transition_cells = 0;
  std::size_t outside_cells = 0;
};

struct PartitionReport {
  GridSpec grid;
  std::vector<CellClass> cells;  // row-major in (index_i, index_j)
  std::vector<Region> regions;
  PartitionSummary summary;
};

struct PartitionOptions {
  MappingOptions mapping;
  bool curvature = true;
  // 0 picks the number of available processors.
  unsigned workers = 0;
  double roundtrip_tol = 1e-5;
  double witness_tol = 1e-4;
  double variance_ratio = 1e-6;
};

CellClass classify_point(const ProblemData& p, Side side, std::span<const double> point,
                         const PartitionOptions& options = {});

PartitionReport classify_grid(const ProblemData& p, const GridSpec& g,
                              const PartitionOptions& options = {});

// Groups classified cells into regions and finalizes tags. Exposed for
// callers that classify cells themselves.
void extract_regions(PartitionReport& report, std::size_t r, const PartitionOptions& options);

// Averaged second central difference of the optimal value along `direction`
// with steps 1e-3, 2e-3, 3e-3. NaN when no step could be evaluated.
double value_curvature(const ProblemData& p, Side side, std::span<const double> point,
                       std::span<const double> direction);

struct Vertex {
  Vector x;
  Vector image;          // M(x − d)
  Vector parameter;      // one u that produced it
  std::size_t cluster_size = 0;
};

std::vector<Vertex> vertex_census(const ProblemData& p, std::size_t samples, std::uint64_t seed);

struct RefineReport {
  PartitionSummary coarse;
  PartitionSummary fine;
  std::size_t fine_resolution = 0;
  // Full-dimensional region counts (linearity and nonlinearity) unchanged.
  bool stable = false;
};

// Fine resolution is factor·(res − 1) + 1 so the coarse grid stays nested.
RefineReport refine_check(const ProblemData& p, const GridSpec& g, std::size_t factor,
                          const PartitionOptions& options = {});
RefineReport refine_check(const ProblemData& p, const PartitionReport& coarse, std::size_t factor,
                          const PartitionOptions& options = {});

}  // namespace mpclo
