#include "mpclo/problem.h"

#include <cmath>
#include <string>

#include "mpclo/error.h"
#include "mpclo/solver.h"

namespace mpclo {
namespace {

void expect(std::size_t got, std::size_t want, const std::string& what) {
  if (got != want) {
    throw Error(ErrorCode::kDimensionMismatch,
                what + ": expected " + std::to_string(want) + ", got " + std::to_string(got));
  }
}

SlaterStatus classify_margin(const PhaseOneResult& r) {
  const double tol = margin_tolerance(r.x);
  if (r.status != SolveStatus::kOptimal) return SlaterStatus::kMarginal;
  if (r.margin > tol) return SlaterStatus::kStrict;
  if (r.margin < -tol) return SlaterStatus::kFails;
  return SlaterStatus::kMarginal;
}

}  // namespace

std::string_view to_string(SlaterStatus s) {
  switch (s) {
    case SlaterStatus::kStrict: return "Strict";
    case SlaterStatus::kMarginal: return "Marginal";
    case SlaterStatus::kFails: return "Fails";
  }
  return "Unknown";
}

void check_dimensions(const ProblemData& p) {
  const std::size_t q = p.cone.dim();
  if (q == 0) throw Error(ErrorCode::kDimensionMismatch, "cone has dimension 0");
  if (p.A.rows() > 0) expect(p.A.cols(), q, "columns of A");
  if (p.M.rows() > 0) expect(p.M.cols(), q, "columns of M");
  expect(p.b.size(), p.A.rows(), "length of b");
  expect(p.c.size(), q, "length of c");
  expect(p.d.size(), q, "length of d");
  if (p.M.rows() == 0) throw Error(ErrorCode::kDimensionMismatch, "M needs at least one row");
  if (!p.A.all_finite() || !p.M.all_finite()) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite entry in A or M");
  }
}

ValidationReport validate(const ProblemData& p) {
  check_dimensions(p);
  ValidationReport rep;
  rep.rank_a = p.m() == 0 ? 0 : linalg::rank(p.A);
  rep.rank_m = linalg::rank(p.M);
  const Matrix stacked = p.m() == 0 ? p.M : linalg::vstack(p.A, p.M);
  rep.rank_stacked = linalg::rank(stacked);
  if (rep.rank_a != p.m()) {
    throw Error(ErrorCode::kRankDeficient, "A is not of full row rank (rank " +
                                               std::to_string(rep.rank_a) + " < " +
                                               std::to_string(p.m()) + ")");
  }
  if (rep.rank_m != p.r()) {
    throw Error(ErrorCode::kRankDeficient, "M is not of full row rank (rank " +
                                               std::to_string(rep.rank_m) + " < " +
                                               std::to_string(p.r()) + ")");
  }
  if (rep.rank_stacked != p.m() + p.r()) {
    throw Error(ErrorCode::kRankDeficient, "row spaces of A and M intersect (rank of [A; M] is " +
                                               std::to_string(rep.rank_stacked) + ")");
  }

  if (p.m() > 0) {
    const Vector ad = linalg::subtract(linalg::multiply(p.A, p.d), p.b);
    if (linalg::norm2(ad) > 1e-9 * (1.0 + linalg::norm2(p.b))) {
      rep.warnings.push_back("d does not satisfy Ad = b");
    }
  }

  const PhaseOneResult primal = phase1(p.A, p.b, p.cone);
  rep.primal_margin = primal.margin;
  rep.primal_slater = classify_margin(primal);

  const Matrix n_all = linalg::null_space_rows(stacked);
  const PhaseOneResult dual = phase1(n_all, linalg::multiply(n_all, p.c), p.cone);
  rep.dual_margin = dual.margin;
  rep.dual_slater = classify_margin(dual);

  const Matrix n_a = p.m() == 0 ? Matrix::identity(p.q()) : linalg::null_space_rows(p.A);
  const PhaseOneResult dual0 = phase1(n_a, linalg::multiply(n_a, p.c), p.cone);
  rep.dual_margin_at_zero = dual0.margin;
  rep.dual_slater_at_zero = classify_margin(dual0);
  return rep;
}

SolverInstance assemble_primal(const ProblemData& p, std::span<const double> u) {
  expect(u.size(), p.r(), "length of u");
  SolverInstance inst;
  inst.G = p.A;
  if (inst.G.rows() == 0) inst.G = Matrix(0, p.q());
  inst.h = p.b;
  inst.g = linalg::axpy(1.0, linalg::multiply_transposed(p.M, u), p.c);
  inst.cone = p.cone;
  inst.provenance = Provenance::kPrimalOfU;
  inst.leading_rows = p.m();
  return inst;
}

SolverInstance assemble_primal_rhs(const ProblemData& p, std::span<const double> v) {
  expect(v.size(), p.r(), "length of v");
  SolverInstance inst;
  inst.G = p.m() == 0 ? p.M : linalg::vstack(p.A, p.M);
  inst.h = p.b;
  const Vector md = linalg::multiply(p.M, p.d);
  for (std::size_t i = 0; i < p.r(); ++i) inst.h.push_back(md[i] + v[i]);
  inst.g = p.c;
  inst.cone = p.cone;
  inst.provenance = Provenance::kDualOfV;
  inst.leading_rows = p.m();
  return inst;
}

ProblemData project_parameters(const ProblemData& p, const Matrix& S) {
  expect(S.rows(), p.r(), "rows of S");
  expect(S.cols(), p.r(), "columns of S");
  ProblemData out = p;
  out.M = S * p.M;
  return out;
}

}  // namespace mpclo
