#pragma once

// Problem data for the family
//
//   P(u):  min ⟨c + Mᵀu, x⟩  s.t.  Ax = b,            x ∈ K
//   R(v):  min ⟨c, x⟩        s.t.  Ax = b, Mx = Md+v, x ∈ K
//
// and assembly of both into the solver's "min ⟨g,x⟩ s.t. Gx = h, x ∈ K" shape.

#include <string>
#include <vector>

#include "mpclo/cones.h"
#include "mpclo/linalg.h"

namespace mpclo {

using linalg::Matrix;
using linalg::Vector;

struct ProblemData {
  std::string name;
  cones::ConeSpec cone;
  Matrix A;  // m × q
  Vector b;  // m
  Vector c;  // q
  Matrix M;  // r × q
  Vector d;  // q

  std::size_t m() const noexcept { return A.rows(); }
  std::size_t r() const noexcept { return M.rows(); }
  std::size_t q() const noexcept { return cone.dim(); }
};

// Throws DimensionMismatch when any block of data disagrees with the cone.
void check_dimensions(const ProblemData& p);

enum class Provenance { kPrimalOfU, kDualOfV, kPhaseIPrimal, kPhaseIDual, kFaceProbe };

struct SolverInstance {
  Matrix G;
  Vector h;
  Vector g;
  cones::ConeSpec cone;
  Provenance provenance = Provenance::kPrimalOfU;
  // Rows [0, leading_rows) carry the multiplier w; the remainder carry s.
  std::size_t leading_rows = 0;
};

enum class SlaterStatus { kStrict, kMarginal, kFails };

std::string_view to_string(SlaterStatus s);

struct ValidationReport {
  std::size_t rank_a = 0;
  std::size_t rank_m = 0;
  std::size_t rank_stacked = 0;
  SlaterStatus primal_slater = SlaterStatus::kFails;
  double primal_margin = 0.0;
  // Dual Slater over the whole family: some u makes c + Mᵀu − Aᵀw interior.
  SlaterStatus dual_slater = SlaterStatus::kFails;
  double dual_margin = 0.0;
  // Same test with u fixed at 0; informational only.
  SlaterStatus dual_slater_at_zero = SlaterStatus::kFails;
  double dual_margin_at_zero = 0.0;
  std::vector<std::string> warnings;

  bool ok() const {
    return primal_slater == SlaterStatus::kStrict && dual_slater == SlaterStatus::kStrict;
  }
};

// Rank checks throw RankDeficient naming the failing condition; Slater
// results are reported, not thrown.
ValidationReport validate(const ProblemData& p);

SolverInstance assemble_primal(const ProblemData& p, std::span<const double> u);
SolverInstance assemble_primal_rhs(const ProblemData& p, std::span<const double> v);

// Copy of p with M replaced by S·M.
ProblemData project_parameters(const ProblemData& p, const Matrix& S);

}  // namespace mpclo
