#pragma once

// The set-valued mappings
//
//   Φ(u) = { M(x* − d) : x* optimal for P(u) }
//   Ψ(v) = { −s* : (w*, s*) optimal for the dual of R(v) }
//
// with directional extents of each value set, the mpKKT residual, and
// membership tests for the parameter sets Θ_D and Θ_P.

#include <optional>
#include <string_view>
#include <vector>

#include "mpclo/problem.h"
#include "mpclo/solver.h"

namespace mpclo {

enum class Membership { kInterior, kBoundary, kOutside };

std::string_view to_string(Membership m);

struct MembershipResult {
  Membership status = Membership::kOutside;
  double margin = 0.0;
  SolveStatus solver_status = SolveStatus::kOptimal;
};

// Θ_D = {u : ∃w, c + Mᵀu − Aᵀw ∈ K}.
MembershipResult membership_theta_d(const ProblemData& p, std::span<const double> u);
// Θ_P = {v : ∃x ∈ K, Ax = b, Mx = Md + v}.
MembershipResult membership_theta_p(const ProblemData& p, std::span<const double> v);

struct MappingOptions {
  double tol_singleton = 1e-4;
  // Size of the lexicographic objective perturbation used to reach the
  // ends of the optimal face.
  double eps_face = 1e-7;
  // When false only the witness is computed.
  bool extents = true;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  bool contains(double t, double tol) const { return t >= lower - tol && t <= upper + tol; }
};

struct MappingValue {
  Vector witness;
  std::vector<Vector> directions;
  std::vector<Interval> extents;
  bool singleton = false;
  SlaterStatus slater = SlaterStatus::kStrict;
  Membership membership = Membership::kInterior;
  double optimal_value = 0.0;
  ConicSolution solution;

  double max_width() const;
};

// Canonical basis of ℝʳ, plus (1,1)/√2 and (1,−1)/√2 when r = 2.
std::vector<Vector> default_directions(std::size_t r);

// Throws OutsideDomain when the point lies outside the parameter set and
// BoundaryUndefined when it lies on the boundary and the optimum is not
// attained. Boundary points that do solve are returned with slater Marginal
// and infinite extents on every side whose probe leaves the set.
MappingValue eval_phi(const ProblemData& p, std::span<const double> u,
                      const std::vector<Vector>& directions = {},
                      const MappingOptions& options = {});
MappingValue eval_psi(const ProblemData& p, std::span<const double> v,
                      const std::vector<Vector>& directions = {},
                      const MappingOptions& options = {});

enum class Sense { kMinimize, kMaximize };

// Optimizes ⟨ell, x⟩ over the primal optimal face of `base` by solving
// with objective g ± tau·ell. Returns nullopt when that solve fails.
std::optional<double> primal_face_extent(const SolverInstance& base, std::span<const double> ell,
                                         Sense sense, double tau);
// Optimizes ⟨ell, z⟩ over the dual optimal face by solving with h ± tau·ell.
std::optional<double> dual_face_extent(const SolverInstance& base, std::span<const double> ell,
                                       Sense sense, double tau);

struct KktResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;

  double max() const;
};

// Residuals of  Ax = b, Mx = Md + v, x ∈ K;  Aᵀw + y = c + Mᵀu, y ∈ K;  ⟨x,y⟩ = 0.
KktResiduals mpkkt_residual(const ProblemData& p, std::span<const double> u,
                            std::span<const double> v, std::span<const double> x,
                            std::span<const double> w, std::span<const double> y);

}  // namespace mpclo
