#include "mpclo/partition.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "detail.h"
#include "mpclo/error.h"

namespace mpclo {
namespace {

using detail::unit_draw;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kCurvatureSteps[] = {1e-3, 2e-3, 3e-3};

std::optional<double> optimal_value(const ProblemData& p, Side side, std::span<const double> pt) {
  const SolverInstance inst =
      side == Side::kDualThetaD ? assemble_primal(p, pt) : assemble_primal_rhs(p, pt);
  const ConicSolution sol = solve(inst);
  if (!sol.optimal()) return std::nullopt;
  return sol.primal_obj;
}

double curvature_along(const ProblemData& p, Side side, std::span<const double> pt, double f0,
                       std::span<const double> dir) {
  double sum = 0.0;
  int used = 0;
  Vector probe(pt.begin(), pt.end());
  for (double h : kCurvatureSteps) {
    for (std::size_t k = 0; k < pt.size(); ++k) probe[k] = pt[k] + h * dir[k];
    const auto fp = optimal_value(p, side, probe);
    for (std::size_t k = 0; k < pt.size(); ++k) probe[k] = pt[k] - h * dir[k];
    const auto fm = optimal_value(p, side, probe);
    if (!fp || !fm) continue;
    sum += (*fp - 2.0 * f0 + *fm) / (h * h);
    ++used;
  }
  return used == 0 ? kNan : sum / used;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  // The smaller index stays the root so labels do not depend on merge order.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

int affine_dimension(const std::vector<std::pair<double, double>>& pts, std::size_t r,
                     double ratio) {
  if (pts.size() < 2) return 0;
  double mi = 0.0, mj = 0.0;
  for (const auto& [a, b] : pts) {
    mi += a;
    mj += b;
  }
  mi /= static_cast<double>(pts.size());
  mj /= static_cast<double>(pts.size());
  double sii = 0.0, sjj = 0.0, sij = 0.0;
  for (const auto& [a, b] : pts) {
    sii += (a - mi) * (a - mi);
    sjj += (b - mj) * (b - mj);
    sij += (a - mi) * (b - mj);
  }
  if (r == 1) return sii > 0.0 ? 1 : 0;
  const linalg::SymEig e = linalg::sym_eig(Matrix{{sii, sij}, {sij, sjj}});
  if (!(e.values[0] > 0.0)) return 0;
  int dim = 0;
  for (double v : e.values)
    if (v > ratio * e.values[0]) ++dim;
  return dim;
}

Vector sphere_point(std::mt19937_64& rng, std::size_t r, double radius) {
  Vector u(r);
  if (r == 1) {
    u[0] = unit_draw(rng) < 0.5 ? -radius : radius;
    return u;
  }
  double norm = 0.0;
  do {
    for (std::size_t k = 0; k < r; k += 2) {
      // Box–Muller pairs.
      const double a = std::max(unit_draw(rng), 1e-300);
      const double b = unit_draw(rng);
      const double rad = std::sqrt(-2.0 * std::log(a));
      u[k] = rad * std::cos(2.0 * std::numbers::pi * b);
      if (k + 1 < r) u[k + 1] = rad * std::sin(2.0 * std::numbers::pi * b);
    }
    norm = linalg::norm2(u);
  } while (!(norm > 1e-12));
  for (double& x : u) x *= radius / norm;
  return u;
}

}  // namespace

std::string_view to_string(Side s) {
  return s == Side::kPrimalThetaP ? "theta_p" : "theta_d";
}

std::string_view to_string(CellTag t) {
  switch (t) {
    case CellTag::kNonlinearity: return "nonlinearity";
    case CellTag::kLinearity: return "linearity";
    case CellTag::kTransitionFace: return "transition";
    case CellTag::kBoundaryOrOutside: return "outside";
  }
  return "unknown";
}

std::size_t GridSpec::cell_count() const {
  return rectangle.size() == 1 ? resolution : resolution * resolution;
}

Vector GridSpec::point(std::size_t i, std::size_t j) const {
  const auto coord = [&](std::size_t axis, std::size_t k) {
    const auto [lo, hi] = rectangle[axis];
    if (k == resolution - 1) return hi;
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(resolution - 1);
  };
  Vector pt{coord(0, i)};
  if (rectangle.size() == 2) pt.push_back(coord(1, j));
  return pt;
}

void check_grid(const GridSpec& g, std::size_t r) {
  if (r != 1 && r != 2) {
    throw Error(ErrorCode::kInvalidArgument, "grids support one or two parameters");
  }
  if (g.rectangle.size() != r) {
    throw Error(ErrorCode::kDimensionMismatch, "grid rectangle has " +
                                                   std::to_string(g.rectangle.size()) +
                                                   " intervals for " + std::to_string(r) +
                                                   " parameters");
  }
  if (g.resolution < 3) throw Error(ErrorCode::kInvalidArgument, "grid resolution below 3");
  for (const auto& [lo, hi] : g.rectangle) {
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw Error(ErrorCode::kInvalidArgument, "degenerate grid interval");
    }
  }
}

double value_curvature(const ProblemData& p, Side side, std::span<const double> point,
                       std::span<const double> direction) {
  if (direction.size() != point.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "curvature direction length");
  }
  const auto f0 = optimal_value(p, side, point);
  if (!f0) return kNan;
  const double n = linalg::norm2(direction);
  if (!(n > 0.0)) throw Error(ErrorCode::kInvalidArgument, "zero curvature direction");
  return curvature_along(p, side, point, *f0, linalg::scaled(1.0 / n, direction));
}

CellClass classify_point(const ProblemData& p, Side side, std::span<const double> point,
                         const PartitionOptions& options) {
  CellClass cell;
  cell.point.assign(point.begin(), point.end());
  cell.curvature = kNan;
  const bool dual_side = side == Side::kDualThetaD;
  double f0 = 0.0;
  try {
    const MappingValue fwd = dual_side ? eval_phi(p, point, {}, options.mapping)
                                       : eval_psi(p, point, {}, options.mapping);
    cell.image = fwd.witness;
    cell.extents = fwd.extents;
    cell.extent_width_max = fwd.max_width();
    f0 = fwd.optimal_value;
    if (fwd.membership != Membership::kInterior) {
      cell.diagnostic = "point on the boundary of the parameter set";
      return cell;
    }
    if (!fwd.singleton) {
      cell.linearity_type = true;
    } else {
      const MembershipResult back_mem = dual_side ? membership_theta_p(p, fwd.witness)
                                                  : membership_theta_d(p, fwd.witness);
      if (back_mem.status != Membership::kInterior) {
        // A boundary image has an unbounded preimage, so the map back is set-valued.
        cell.linearity_type = true;
      } else {
        const MappingValue back = dual_side ? eval_psi(p, fwd.witness, {}, options.mapping)
                                            : eval_phi(p, fwd.witness, {}, options.mapping);
        if (!back.singleton) {
          cell.linearity_type = true;
        } else if (linalg::norm2(linalg::subtract(back.witness, point)) <= options.roundtrip_tol) {
          cell.tag = CellTag::kNonlinearity;
        } else {
          cell.diagnostic = "round trip returned a different point";
          return cell;
        }
      }
    }
  } catch (const Error& e) {
    cell.diagnostic = e.what();
    return cell;
  }
  if (cell.linearity_type) cell.tag = CellTag::kLinearity;

  if (options.curvature) {
    double worst = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < point.size(); ++k) {
      Vector axis(point.size(), 0.0);
      axis[k] = 1.0;
      const double c = curvature_along(p, side, point, f0, axis);
      if (std::isnan(c)) continue;
      worst = std::max(worst, std::abs(c));
      any = true;
    }
    cell.curvature = any ? worst : kNan;
  }
  return cell;
}

void extract_regions(PartitionReport& report, std::size_t r, const PartitionOptions& options) {
  const std::size_t ni = report.grid.resolution;
  const std::size_t nj = r == 2 ? report.grid.resolution : 1;
  auto& cells = report.cells;
  const auto at = [&](std::size_t i, std::size_t j) { return i * nj + j; };
  const auto lin = [&](std::size_t k) { return cells[k].linearity_type; };
  const auto nonlin = [&](std::size_t k) { return cells[k].tag == CellTag::kNonlinearity; };
  // Cells on one face share the whole image set, so compare extents when
  // present; witnesses inside a non-singleton image need not agree.
  const auto close = [&](double x, double y) {
    if (std::isinf(x) || std::isinf(y)) return x == y;
    return std::abs(x - y) <= options.witness_tol;
  };
  const auto same_image = [&](std::size_t a, std::size_t b) {
    const auto& ea = cells[a].extents;
    const auto& eb = cells[b].extents;
    if (ea.empty() || ea.size() != eb.size()) {
      return linalg::norm2(linalg::subtract(cells[a].image, cells[b].image)) <= options.witness_tol;
    }
    for (std::size_t k = 0; k < ea.size(); ++k)
      if (!close(ea[k].lower, eb[k].lower) || !close(ea[k].upper, eb[k].upper)) return false;
    return true;
  };

  DisjointSets sets(cells.size());
  // Linearity-type cells: 8-neighborhood plus image agreement.
  for (std::size_t i = 0; i < ni; ++i)
    for (std::size_t j = 0; j < nj; ++j) {
      const std::size_t a = at(i, j);
      if (!lin(a)) continue;
      for (int di = 0; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj <= 0) continue;
          const long ii = static_cast<long>(i) + di;
          const long jj = static_cast<long>(j) + dj;
          if (ii >= static_cast<long>(ni) || jj < 0 || jj >= static_cast<long>(nj)) continue;
          const std::size_t b = at(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
          if (lin(b) && same_image(a, b)) sets.unite(a, b);
        }
    }
  // Nonlinearity cells: edge neighbors, and corner neighbors unless the
  // two cells across the corner belong to one linearity-type region.
  for (std::size_t i = 0; i < ni; ++i)
    for (std::size_t j = 0; j < nj; ++j) {
      const std::size_t a = at(i, j);
      if (!nonlin(a)) continue;
      if (j + 1 < nj && nonlin(at(i, j + 1))) sets.unite(a, at(i, j + 1));
      if (i + 1 < ni && nonlin(at(i + 1, j))) sets.unite(a, at(i + 1, j));
      if (i + 1 >= ni) continue;
      for (int dj : {-1, 1}) {
        const long jj = static_cast<long>(j) + dj;
        if (jj < 0 || jj >= static_cast<long>(nj)) continue;
        const std::size_t b = at(i + 1, static_cast<std::size_t>(jj));
        if (!nonlin(b)) continue;
        const std::size_t c1 = at(i, static_cast<std::size_t>(jj));
        const std::size_t c2 = at(i + 1, j);
        const bool walled = lin(c1) && lin(c2) && sets.find(c1) == sets.find(c2);
        if (!walled) sets.unite(a, b);
      }
    }

  report.regions.clear();
  std::vector<int> region_of_root(cells.size(), -1);
  std::vector<std::vector<std::pair<double, double>>> members;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (cells[k].tag == CellTag::kBoundaryOrOutside) continue;
    const std::size_t root = sets.find(k);
    if (region_of_root[root] < 0) {
      region_of_root[root] = static_cast<int>(report.regions.size());
      Region reg;
      reg.id = region_of_root[root];
      reg.tag = cells[k].tag;
      reg.image = cells[k].image;
      report.regions.push_back(reg);
      members.emplace_back();
    }
    const int id = region_of_root[root];
    cells[k].region_id = id;
    report.regions[static_cast<std::size_t>(id)].cell_count++;
    members[static_cast<std::size_t>(id)].emplace_back(static_cast<double>(cells[k].index_i),
                                                       static_cast<double>(cells[k].index_j));
  }
  for (Region& reg : report.regions) {
    reg.dim = affine_dimension(members[static_cast<std::size_t>(reg.id)], r, options.variance_ratio);
    if (reg.tag == CellTag::kLinearity && reg.dim < static_cast<int>(r)) {
      reg.tag = CellTag::kTransitionFace;
    }
  }

  PartitionSummary sum;
  for (CellClass& c : cells) {
    if (c.region_id < 0) {
      c.face_dim = -1;
      ++sum.outside_cells;
      continue;
    }
    const Region& reg = report.regions[static_cast<std::size_t>(c.region_id)];
    c.tag = reg.tag;
    c.face_dim = reg.dim;
    switch (c.tag) {
      case CellTag::kNonlinearity: ++sum.nonlinearity_cells; break;
      case CellTag::kLinearity: ++sum.linearity_cells; break;
      case CellTag::kTransitionFace: ++sum.transition_cells; break;
      case CellTag::kBoundaryOrOutside: break;
    }
  }
  for (const Region& reg : report.regions) {
    switch (reg.tag) {
      case CellTag::kNonlinearity: ++sum.nonlinearity_regions; break;
      case CellTag::kLinearity: ++sum.linearity_regions; break;
      case CellTag::kTransitionFace: ++sum.transition_regions; break;
      case CellTag::kBoundaryOrOutside: break;
    }
  }
  report.summary = sum;
}

PartitionReport classify_grid(const ProblemData& p, const GridSpec& g,
                              const PartitionOptions& options) {
  check_dimensions(p);
  check_grid(g, p.r());
  PartitionReport report;
  report.grid = g;
  const std::size_t r = p.r();
  const std::size_t nj = r == 2 ? g.resolution : 1;
  const std::size_t total = g.cell_count();
  report.cells.resize(total);

  detail::parallel_for(total, options.workers, [&](std::size_t k) {
    const std::size_t i = k / nj;
    const std::size_t j = k % nj;
    CellClass cell = classify_point(p, g.side, g.point(i, j), options);
    cell.index_i = i;
    cell.index_j = j;
    report.cells[k] = std::move(cell);
  });
  extract_regions(report, r, options);
  return report;
}

std::vector<Vertex> vertex_census(const ProblemData& p, std::size_t samples, std::uint64_t seed) {
  if (samples < 10) throw Error(ErrorCode::kInvalidArgument, "vertex census needs ≥ 10 samples");
  check_dimensions(p);
  constexpr double kRadius = 3.0;
  constexpr double kClusterTol = 1e-4;
  constexpr double kProbe = 0.005;
  constexpr std::size_t kProducersTried = 5;

  struct Cluster {
    Vector x;
    std::vector<Vector> producers;
  };
  std::vector<Cluster> clusters;
  std::mt19937_64 rng(seed);
  for (std::size_t n = 0; n < samples; ++n) {
    const Vector u = sphere_point(rng, p.r(), kRadius);
    const ConicSolution sol = solve(assemble_primal(p, u));
    if (!sol.optimal()) continue;
    auto hit = std::find_if(clusters.begin(), clusters.end(), [&](const Cluster& c) {
      return linalg::norm2(linalg::subtract(c.x, sol.x)) <= kClusterTol;
    });
    if (hit == clusters.end()) {
      clusters.push_back({sol.x, {u}});
    } else {
      hit->producers.push_back(u);
    }
  }

  // A vertex keeps the same optimizer under every small parameter probe,
  // so its normal cone is full-dimensional.
  const auto stable_at = [&](const Cluster& c, const Vector& u) {
    for (std::size_t k = 0; k < p.r(); ++k)
      for (double sign : {-1.0, 1.0}) {
        Vector probe = u;
        probe[k] += sign * kProbe;
        const ConicSolution sol = solve(assemble_primal(p, probe));
        if (!sol.optimal()) return false;
        if (linalg::norm2(linalg::subtract(c.x, sol.x)) > kClusterTol) return false;
      }
    return true;
  };

  std::vector<Vertex> out;
  const Vector md = linalg::multiply(p.M, p.d);
  for (const Cluster& c : clusters) {
    const std::size_t tries = std::min(kProducersTried, c.producers.size());
    for (std::size_t t = 0; t < tries; ++t) {
      if (!stable_at(c, c.producers[t])) continue;
      Vertex v;
      v.x = c.x;
      v.image = linalg::subtract(linalg::multiply(p.M, c.x), md);
      v.parameter = c.producers[t];
      v.cluster_size = c.producers.size();
      out.push_back(std::move(v));
      break;
    }
  }
  return out;
}

RefineReport refine_check(const ProblemData& p, const PartitionReport& coarse, std::size_t factor,
                          const PartitionOptions& options) {
  if (factor < 2) throw Error(ErrorCode::kInvalidArgument, "refinement factor below 2");
  GridSpec fine = coarse.grid;
  fine.resolution = factor * (coarse.grid.resolution - 1) + 1;
  const PartitionReport fine_report = classify_grid(p, fine, options);
  RefineReport out;
  out.coarse = coarse.summary;
  out.fine = fine_report.summary;
  out.fine_resolution = fine.resolution;
  out.stable = out.coarse.linearity_regions == out.fine.linearity_regions &&
               out.coarse.nonlinearity_regions == out.fine.nonlinearity_regions;
  return out;
}

RefineReport refine_check(const ProblemData& p, const GridSpec& g, std::size_t factor,
                          const PartitionOptions& options) {
  return refine_check(p, classify_grid(p, g, options), factor, options);
}

}  // namespace mpclo
