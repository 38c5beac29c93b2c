#include "mpclo/mappings.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mpclo/error.h"

namespace mpclo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Membership classify(const PhaseOneResult& r) {
  const double tol = margin_tolerance(r.x);
  if (r.margin > tol) return Membership::kInterior;
  if (r.margin < -tol) return Membership::kOutside;
  return Membership::kBoundary;
}

MembershipResult from_phase1(const PhaseOneResult& r) {
  return {classify(r), r.margin, r.status};
}

std::vector<Vector> resolve_directions(std::size_t r, const std::vector<Vector>& extra) {
  std::vector<Vector> dirs = default_directions(r);
  for (const Vector& d : extra) {
    if (d.size() != r) throw Error(ErrorCode::kDimensionMismatch, "direction length");
    const double n = linalg::norm2(d);
    if (!(n > 0.0)) throw Error(ErrorCode::kInvalidArgument, "zero direction");
    dirs.push_back(linalg::scaled(1.0 / n, d));
  }
  return dirs;
}

template <typename ExtentsAt>
void settle_extents(MappingValue& mv, const MappingOptions& opt, ExtentsAt&& extents_at) {
  double tau = opt.eps_face;
  mv.extents = extents_at(tau);
  double width = mv.max_width();
  // Smooth points give widths proportional to tau; faces do not shrink.
  for (int refine = 0; refine < 3 && width > opt.tol_singleton && std::isfinite(width); ++refine) {
    tau /= 10.0;
    std::vector<Interval> finer = extents_at(tau);
    MappingValue probe;
    probe.extents = finer;
    const double finer_width = probe.max_width();
    const bool shrinking = finer_width <= 0.3 * width;
    mv.extents = std::move(finer);
    width = finer_width;
    if (!shrinking) break;
  }
  mv.singleton = width <= opt.tol_singleton;
}

}  // namespace

std::string_view to_string(Membership m) {
  switch (m) {
    case Membership::kInterior: return "Interior";
    case Membership::kBoundary: return "Boundary";
    case Membership::kOutside: return "Outside";
  }
  return "Unknown";
}

double MappingValue::max_width() const {
  double w = 0.0;
  for (const Interval& e : extents) w = std::max(w, e.width());
  return w;
}

double KktResiduals::max() const { return std::max({primal, dual, complementarity}); }

std::vector<Vector> default_directions(std::size_t r) {
  std::vector<Vector> dirs;
  for (std::size_t i = 0; i < r; ++i) {
    Vector e(r, 0.0);
    e[i] = 1.0;
    dirs.push_back(std::move(e));
  }
  if (r == 2) {
    const double h = 1.0 / std::sqrt(2.0);
    dirs.push_back({h, h});
    dirs.push_back({h, -h});
  }
  return dirs;
}

MembershipResult membership_theta_d(const ProblemData& p, std::span<const double> u) {
  if (u.size() != p.r()) throw Error(ErrorCode::kDimensionMismatch, "length of u");
  const Vector shifted = linalg::axpy(1.0, linalg::multiply_transposed(p.M, u), p.c);
  if (p.m() == 0) {
    // No equality rows: the test is plain cone membership of c + Mᵀu.
    PhaseOneResult r;
    r.margin = std::min(1.0, cones::interior_margin(shifted, p.cone));
    r.x = shifted;
    return from_phase1(r);
  }
  const Matrix n = linalg::null_space_rows(p.A);
  return from_phase1(phase1(n, linalg::multiply(n, shifted), p.cone));
}

MembershipResult membership_theta_p(const ProblemData& p, std::span<const double> v) {
  const SolverInstance inst = assemble_primal_rhs(p, v);
  return from_phase1(phase1(inst.G, inst.h, p.cone));
}

std::optional<double> primal_face_extent(const SolverInstance& base, std::span<const double> ell,
                                         Sense sense, double tau) {
  SolverInstance probe = base;
  probe.provenance = Provenance::kFaceProbe;
  const double sign = sense == Sense::kMinimize ? 1.0 : -1.0;
  for (std::size_t i = 0; i < probe.g.size(); ++i) probe.g[i] += sign * tau * ell[i];
  const ConicSolution sol = solve(probe);
  if (!sol.optimal()) return std::nullopt;
  return linalg::dot(ell, sol.x);
}

std::optional<double> dual_face_extent(const SolverInstance& base, std::span<const double> ell,
                                       Sense sense, double tau) {
  SolverInstance probe = base;
  probe.provenance = Provenance::kFaceProbe;
  const double sign = sense == Sense::kMaximize ? 1.0 : -1.0;
  for (std::size_t i = 0; i < probe.h.size(); ++i) probe.h[i] += sign * tau * ell[i];
  const ConicSolution sol = solve(probe);
  if (!sol.optimal()) return std::nullopt;
  return linalg::dot(ell, sol.z);
}

MappingValue eval_phi(const ProblemData& p, std::span<const double> u,
                      const std::vector<Vector>& directions, const MappingOptions& options) {
  const MembershipResult mem = membership_theta_d(p, u);
  if (mem.status == Membership::kOutside) {
    throw Error(ErrorCode::kOutsideDomain, "u lies outside the dual parameter set");
  }
  const SolverInstance inst = assemble_primal(p, u);
  MappingValue mv;
  mv.membership = mem.status;
  mv.solution = solve(inst);
  if (!mv.solution.optimal()) {
    if (mem.status == Membership::kBoundary) {
      throw Error(ErrorCode::kBoundaryUndefined, "primal optimum not attained at this u");
    }
    throw Error(ErrorCode::kNoConvergence,
                "primal solve ended with " + std::string(to_string(mv.solution.status)));
  }
  mv.optimal_value = mv.solution.primal_obj;
  const Vector md = linalg::multiply(p.M, p.d);
  mv.witness = linalg::subtract(linalg::multiply(p.M, mv.solution.x), md);
  mv.directions = resolve_directions(p.r(), directions);
  mv.slater = mem.status == Membership::kInterior ? SlaterStatus::kStrict : SlaterStatus::kMarginal;
  if (!options.extents) {
    mv.singleton = mem.status == Membership::kInterior;
    return mv;
  }
  settle_extents(mv, options, [&](double tau) {
    std::vector<Interval> out;
    for (const Vector& e : mv.directions) {
      const Vector ell = linalg::multiply_transposed(p.M, e);
      const double shift = linalg::dot(e, md);
      const auto lo = primal_face_extent(inst, ell, Sense::kMinimize, tau);
      const auto hi = primal_face_extent(inst, ell, Sense::kMaximize, tau);
      out.push_back({lo ? *lo - shift : -kInf, hi ? *hi - shift : kInf});
    }
    return out;
  });
  if (mem.status == Membership::kBoundary) mv.singleton = false;
  return mv;
}

MappingValue eval_psi(const ProblemData& p, std::span<const double> v,
                      const std::vector<Vector>& directions, const MappingOptions& options) {
  const MembershipResult mem = membership_theta_p(p, v);
  if (mem.status == Membership::kOutside) {
    throw Error(ErrorCode::kOutsideDomain, "v lies outside the primal parameter set");
  }
  const SolverInstance inst = assemble_primal_rhs(p, v);
  MappingValue mv;
  mv.membership = mem.status;
  mv.solution = solve(inst);
  if (!mv.solution.optimal()) {
    if (mem.status == Membership::kBoundary) {
      throw Error(ErrorCode::kBoundaryUndefined, "dual optimum not attained at this v");
    }
    throw Error(ErrorCode::kNoConvergence,
                "right-hand-side solve ended with " + std::string(to_string(mv.solution.status)));
  }
  mv.optimal_value = mv.solution.primal_obj;
  mv.witness = linalg::scaled(-1.0, mv.solution.s);
  mv.directions = resolve_directions(p.r(), directions);
  mv.slater = mem.status == Membership::kInterior ? SlaterStatus::kStrict : SlaterStatus::kMarginal;
  if (!options.extents) {
    mv.singleton = mem.status == Membership::kInterior;
    return mv;
  }
  settle_extents(mv, options, [&](double tau) {
    std::vector<Interval> out;
    for (const Vector& e : mv.directions) {
      Vector ell(p.m() + p.r(), 0.0);
      std::copy(e.begin(), e.end(), ell.begin() + static_cast<long>(p.m()));
      // ⟨e, −s⟩ is smallest where ⟨e, s⟩ is largest.
      const auto s_max = dual_face_extent(inst, ell, Sense::kMaximize, tau);
      const auto s_min = dual_face_extent(inst, ell, Sense::kMinimize, tau);
      out.push_back({s_max ? -*s_max : -kInf, s_min ? -*s_min : kInf});
    }
    return out;
  });
  if (mem.status == Membership::kBoundary) mv.singleton = false;
  return mv;
}

KktResiduals mpkkt_residual(const ProblemData& p, std::span<const double> u,
                            std::span<const double> v, std::span<const double> x,
                            std::span<const double> w, std::span<const double> y) {
  if (u.size() != p.r() || v.size() != p.r() || x.size() != p.q() || y.size() != p.q() ||
      w.size() != p.m()) {
    throw Error(ErrorCode::kDimensionMismatch, "mpkkt_residual arguments");
  }
  KktResiduals r;
  if (p.m() > 0) {
    r.primal = linalg::norm2(linalg::subtract(linalg::multiply(p.A, x), p.b));
  }
  Vector mx = linalg::subtract(linalg::multiply(p.M, x), linalg::multiply(p.M, p.d));
  for (std::size_t i = 0; i < p.r(); ++i) mx[i] -= v[i];
  r.primal = std::max({r.primal, linalg::norm2(mx), std::max(0.0, -cones::interior_margin(x, p.cone))});

  Vector dual = linalg::subtract(y, p.c);
  const Vector mtu = linalg::multiply_transposed(p.M, u);
  for (std::size_t i = 0; i < p.q(); ++i) dual[i] -= mtu[i];
  if (p.m() > 0) dual = linalg::axpy(1.0, linalg::multiply_transposed(p.A, w), dual);
  r.dual = std::max(linalg::norm2(dual), std::max(0.0, -cones::interior_margin(y, p.cone)));
  r.complementarity = std::abs(linalg::dot(x, y));
  return r;
}

}  // namespace mpclo
