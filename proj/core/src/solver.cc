#include "mpclo/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mpclo/error.h"

namespace mpclo {
namespace {

using cones::BlockKind;
using cones::BlockScaling;
using cones::ConeSpec;
using cones::NtScaling;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-block views over svec-encoded vectors.
template <typename Fn>
void for_each_block(const ConeSpec& cone, Fn&& fn) {
  for (std::size_t k = 0; k < cone.block_count(); ++k) {
    fn(k, cone.blocks()[k], cone.offset(k));
  }
}

void write_block(Vector& out, std::size_t off, const Matrix& m) {
  const std::size_t n = m.rows();
  const double r2 = std::sqrt(2.0);
  std::size_t k = off;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out[k++] = i == j ? m(i, i) : r2 * m(i, j);
}

Matrix read_block(std::span<const double> v, std::size_t off, std::size_t n) {
  return cones::smat(v.subspan(off, n * (n + 1) / 2), n);
}

Matrix sandwich(const Matrix& a, const Matrix& x) { return a * x * a.transpose(); }
Matrix sandwich_t(const Matrix& a, const Matrix& x) { return a.transpose() * x * a; }

class Scaled {
 public:
  Scaled(const NtScaling& sc, const ConeSpec& cone) : sc_(sc), cone_(cone) {}

  // 𝒯x: the primal direction in scaled coordinates.
  Vector primal(std::span<const double> dx) const {
    Vector out(dx.size());
    for_each_block(cone_, [&](std::size_t k, const cones::ConeBlock& b, std::size_t off) {
      const BlockScaling& s = sc_.blocks[k];
      if (b.kind == BlockKind::kOrthant) {
        for (std::size_t i = 0; i < b.size; ++i) out[off + i] = dx[off + i] / s.w[i];
      } else {
        write_block(out, off, sandwich(s.R_inv, read_block(dx, off, b.size)));
      }
    });
    return out;
  }

  // 𝒯⁻ᵀy: the dual direction in scaled coordinates.
  Vector dual(std::span<const double> dy) const {
    Vector out(dy.size());
    for_each_block(cone_, [&](std::size_t k, const cones::ConeBlock& b, std::size_t off) {
      const BlockScaling& s = sc_.blocks[k];
      if (b.kind == BlockKind::kOrthant) {
        for (std::size_t i = 0; i < b.size; ++i) out[off + i] = dy[off + i] * s.w[i];
      } else {
        write_block(out, off, sandwich_t(s.R, read_block(dy, off, b.size)));
      }
    });
    return out;
  }

  // 𝒯⁻¹t: back from scaled coordinates to a primal direction.
  Vector unscale(std::span<const double> t) const {
    Vector out(t.size());
    for_each_block(cone_, [&](std::size_t k, const cones::ConeBlock& b, std::size_t off) {
      const BlockScaling& s = sc_.blocks[k];
      if (b.kind == BlockKind::kOrthant) {
        for (std::size_t i = 0; i < b.size; ++i) out[off + i] = t[off + i] * s.w[i];
      } else {
        write_block(out, off, sandwich(s.R, read_block(t, off, b.size)));
      }
    });
    return out;
  }

  // H = 𝒯⁻¹𝒯⁻ᵀ.
  Vector apply_h(std::span<const double> v) const {
    Vector out(v.size());
    for_each_block(cone_, [&](std::size_t k, const cones::ConeBlock& b, std::size_t off) {
      const BlockScaling& s = sc_.blocks[k];
      if (b.kind == BlockKind::kOrthant) {
        for (std::size_t i = 0; i < b.size; ++i) out[off + i] = v[off + i] * s.w[i] * s.w[i];
      } else {
        write_block(out, off, s.W * read_block(v, off, b.size) * s.W);
      }
    });
    return out;
  }

  // The scaled point λ as an svec vector.
  Vector lambda() const {
    Vector out(cone_.dim(), 0.0);
    for_each_block(cone_, [&](std::size_t k, const cones::ConeBlock& b, std::size_t off) {
      const BlockScaling& s = sc_.blocks[k];
      if (b.kind == BlockKind::kOrthant) {
        std::copy(s.lambda.begin(), s.lambda.end(), out.begin() + static_cast<long>(off));
      } else {
        for (std::size_t i = 0; i < b.size; ++i)
          out[off + cones::svec_index(i, i, b.size)] = s.lambda[i];
      }
    });
    return out;
  }

  // Solves λ∘t = r for t.
  Vector lambda_solve(std::span<const double> r) const {
    Vector out(r.size());
    for_each_block(cone_, [&](std::size_t k, const cones::ConeBlock& b, std::size_t off) {
      const BlockScaling& s = sc_.blocks[k];
      if (b.kind == BlockKind::kOrthant) {
        for (std::size_t i = 0; i < b.size; ++i) out[off + i] = r[off + i] / s.lambda[i];
      } else {
        Matrix m = read_block(r, off, b.size);
        for (std::size_t i = 0; i < b.size; ++i)
          for (std::size_t j = 0; j < b.size; ++j) m(i, j) *= 2.0 / (s.lambda[i] + s.lambda[j]);
        write_block(out, off, m);
      }
    });
    return out;
  }

  // Largest α with λ + α·d in the cone (∞ when unrestricted).
  double max_step(std::span<const double> d) const {
    double alpha = kInf;
    for_each_block(cone_, [&](std::size_t k, const cones::ConeBlock& b, std::size_t off) {
      const BlockScaling& s = sc_.blocks[k];
      if (b.kind == BlockKind::kOrthant) {
        for (std::size_t i = 0; i < b.size; ++i)
          if (d[off + i] < 0.0) alpha = std::min(alpha, -s.lambda[i] / d[off + i]);
      } else {
        Matrix m = read_block(d, off, b.size);
        for (std::size_t i = 0; i < b.size; ++i)
          for (std::size_t j = 0; j < b.size; ++j)
            m(i, j) /= std::sqrt(s.lambda[i] * s.lambda[j]);
        const double lo = linalg::min_eigenvalue(m);
        if (lo < 0.0) alpha = std::min(alpha, -1.0 / lo);
      }
    });
    return alpha;
  }

 private:
  const NtScaling& sc_;
  const ConeSpec& cone_;
};

Vector jordan(std::span<const double> a, std::span<const double> b, const ConeSpec& cone) {
  Vector out(a.size());
  for_each_block(cone, [&](std::size_t, const cones::ConeBlock& blk, std::size_t off) {
    if (blk.kind == BlockKind::kOrthant) {
      for (std::size_t i = 0; i < blk.size; ++i) out[off + i] = a[off + i] * b[off + i];
    } else {
      const Matrix ma = read_block(a, off, blk.size);
      const Matrix mb = read_block(b, off, blk.size);
      write_block(out, off, 0.5 * (ma * mb + mb * ma));
    }
  });
  return out;
}

// Cholesky for the Schur complement. Tiny pivots are replaced by a huge
// value, which drops the corresponding direction instead of failing.
class SchurFactor {
 public:
  explicit SchurFactor(Matrix s) : l_(std::move(s)) {
    const std::size_t n = l_.rows();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(l_(i, i)));
    const double floor = 1e-30 * std::max(scale, 1e-300);
    for (std::size_t j = 0; j < n; ++j) {
      double d = l_(j, j);
      for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
      if (!(d > floor)) d = 1e128;
      const double root = std::sqrt(d);
      l_(j, j) = root;
      for (std::size_t i = j + 1; i < n; ++i) {
        double v = l_(i, j);
        for (std::size_t k = 0; k < j; ++k) v -= l_(i, k) * l_(j, k);
        l_(i, j) = v / root;
      }
    }
  }

  Vector solve(std::span<const double> rhs) const {
    const std::size_t n = l_.rows();
    Vector x(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < i; ++k) x[i] -= l_(i, k) * x[k];
      x[i] /= l_(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t k = i + 1; k < n; ++k) x[i] -= l_(k, i) * x[k];
      x[i] /= l_(i, i);
    }
    return x;
  }

 private:
  Matrix l_;
};

struct Direction {
  Vector dx, dz, dy;
};

struct Iterate {
  Vector x, z, y;
};

struct Measures {
  double pres = kInf, dres = kInf, gap = kInf, obj_gap = kInf;
  double pobj = 0.0, dobj = 0.0;
  double rp_norm = 0.0, rd_norm = 0.0, xy = 0.0;

  double merit() const { return std::max({pres, dres, gap, obj_gap}); }
};

class Ipm {
 public:
  Ipm(const SolverInstance& inst, const SolverOptions& opt)
      : inst_(inst), opt_(opt), cone_(inst.cone), q_(inst.cone.dim()), m_(inst.G.rows()) {
    if (inst.G.cols() != q_ && m_ > 0) {
      throw Error(ErrorCode::kDimensionMismatch, "instance G has the wrong column count");
    }
    if (inst.h.size() != m_ || inst.g.size() != q_) {
      throw Error(ErrorCode::kDimensionMismatch, "instance h or g has the wrong length");
    }
    h_norm_ = linalg::norm2(inst.h);
    g_norm_ = linalg::norm2(inst.g);
  }

  ConicSolution run();

 private:
  Measures measure(const Iterate& it, Vector& rp, Vector& rd) const;
  Direction newton(const Scaled& sc, const SchurFactor& f, std::span<const double> rp,
                   std::span<const double> rd, std::span<const double> t) const;
  ConicSolution finish(const Iterate& it, const Measures& ms, SolveStatus status, int iters) const;

  const SolverInstance& inst_;
  const SolverOptions& opt_;
  const ConeSpec& cone_;
  std::size_t q_;
  std::size_t m_;
  double h_norm_ = 0.0;
  double g_norm_ = 0.0;
};

Measures Ipm::measure(const Iterate& it, Vector& rp, Vector& rd) const {
  Measures ms;
  rp = inst_.h;
  if (m_ > 0) {
    const Vector gx = linalg::multiply(inst_.G, it.x);
    for (std::size_t i = 0; i < m_; ++i) rp[i] -= gx[i];
  }
  rd = inst_.g;
  const Vector gz = m_ > 0 ? linalg::multiply_transposed(inst_.G, it.z) : Vector(q_, 0.0);
  for (std::size_t i = 0; i < q_; ++i) rd[i] -= gz[i] + it.y[i];
  ms.rp_norm = linalg::norm2(rp);
  ms.rd_norm = linalg::norm2(rd);
  ms.pobj = linalg::dot(inst_.g, it.x);
  ms.dobj = m_ > 0 ? linalg::dot(inst_.h, it.z) : 0.0;
  ms.xy = linalg::dot(it.x, it.y);
  ms.pres = ms.rp_norm / (1.0 + h_norm_);
  ms.dres = ms.rd_norm / (1.0 + g_norm_);
  ms.gap = std::abs(ms.xy) / (1.0 + std::abs(ms.pobj));
  ms.obj_gap = std::abs(ms.pobj - ms.dobj) / (1.0 + std::abs(ms.pobj));
  return ms;
}

Direction Ipm::newton(const Scaled& sc, const SchurFactor& f, std::span<const double> rp,
                      std::span<const double> rd, std::span<const double> t) const {
  Direction d;
  const Vector ut = sc.unscale(t);
  const Vector hrd = sc.apply_h(rd);
  if (m_ > 0) {
    const Vector g_ut = linalg::multiply(inst_.G, ut);
    const Vector g_hrd = linalg::multiply(inst_.G, hrd);
    Vector rhs(m_);
    for (std::size_t i = 0; i < m_; ++i) rhs[i] = rp[i] - g_ut[i] + g_hrd[i];
    d.dz = f.solve(rhs);
    const Vector gtz = linalg::multiply_transposed(inst_.G, d.dz);
    d.dy.resize(q_);
    for (std::size_t i = 0; i < q_; ++i) d.dy[i] = rd[i] - gtz[i];
  } else {
    d.dy.assign(rd.begin(), rd.end());
  }
  const Vector hdy = sc.apply_h(d.dy);
  d.dx.resize(q_);
  for (std::size_t i = 0; i < q_; ++i) d.dx[i] = ut[i] - hdy[i];
  return d;
}

ConicSolution Ipm::finish(const Iterate& it, const Measures& ms, SolveStatus status,
                          int iters) const {
  ConicSolution sol;
  sol.status = status;
  sol.x = it.x;
  sol.z = it.z;
  sol.y = it.y;
  const std::size_t lead = std::min(inst_.leading_rows, m_);
  sol.w.assign(it.z.begin(), it.z.begin() + static_cast<long>(lead));
  sol.s.assign(it.z.begin() + static_cast<long>(lead), it.z.end());
  sol.primal_obj = ms.pobj;
  sol.dual_obj = ms.dobj;
  sol.residuals = {ms.rp_norm, ms.rd_norm, std::abs(ms.xy)};
  sol.iterations = iters;
  return sol;
}

bool meets_optimality(const Measures& ms) {
  return ms.pres <= 1e-8 && ms.dres <= 1e-8 && ms.gap <= 1e-7 && ms.obj_gap <= 1e-7;
}

ConicSolution Ipm::run() {
  Iterate it{cones::identity_point(cone_), Vector(m_, 0.0), cones::identity_point(cone_)};
  const double nu = static_cast<double>(cone_.degree());
  const double size_bound = opt_.divergence_factor * (1.0 + h_norm_ + g_norm_);

  Iterate best = it;
  Measures best_ms;
  std::vector<double> pres_hist, dres_hist;
  Vector rp, rd;
  int stalled = 0;

  int k = 0;
  for (; k <= opt_.max_iterations; ++k) {
    const Measures ms = measure(it, rp, rd);
    if (!std::isfinite(ms.merit())) break;
    if (ms.merit() < best_ms.merit()) {
      best = it;
      best_ms = ms;
      stalled = 0;
    } else {
      ++stalled;
    }
    if (ms.merit() <= opt_.target_accuracy) break;
    if (meets_optimality(best_ms) && stalled >= 5) break;

    // Infeasibility certificates from the current iterate.
    if (m_ > 0 && ms.dobj > 0.0) {
      const double hz = ms.dobj;
      Vector res(q_);
      for (std::size_t i = 0; i < q_; ++i) res[i] = inst_.g[i] - rd[i];
      if (linalg::norm2(res) / hz <= 1e-8 && !meets_optimality(best_ms)) {
        return finish(it, ms, SolveStatus::kPrimalInfeasible, k);
      }
    }
    if (ms.pobj < 0.0) {
      const double gx = -ms.pobj;
      Vector res(m_);
      for (std::size_t i = 0; i < m_; ++i) res[i] = inst_.h[i] - rp[i];
      if (linalg::norm2(res) / gx <= 1e-8 && !meets_optimality(best_ms)) {
        return finish(it, ms, SolveStatus::kDualInfeasibleOrUnbounded, k);
      }
    }
    if (linalg::norm2(it.x) > size_bound || linalg::norm2(it.y) > size_bound) {
      if (meets_optimality(best_ms)) break;
      return finish(best, best_ms, SolveStatus::kNumericalLimit, k);
    }
    pres_hist.push_back(ms.pres);
    dres_hist.push_back(ms.dres);
    if (k >= 10) {
      const double p_ratio = ms.pres / pres_hist[pres_hist.size() - 11];
      const double d_ratio = ms.dres / dres_hist[dres_hist.size() - 11];
      if (ms.pres > 1e-6 && p_ratio > 0.9 && !meets_optimality(best_ms)) {
        return finish(best, best_ms, SolveStatus::kPrimalInfeasible, k);
      }
      if (ms.dres > 1e-6 && d_ratio > 0.9 && !meets_optimality(best_ms)) {
        return finish(best, best_ms, SolveStatus::kDualInfeasibleOrUnbounded, k);
      }
    }
    if (k == opt_.max_iterations) break;

    NtScaling nt;
    try {
      nt = cones::nt_scaling(it.x, it.y, cone_);
    } catch (const Error& ex) {
        break;
    }
    const Scaled sc(nt, cone_);
    Matrix schur(m_, m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const Vector hg = sc.apply_h(inst_.G.row(i));
      for (std::size_t j = 0; j <= i; ++j) {
        schur(i, j) = linalg::dot(inst_.G.row(j), hg);
        schur(j, i) = schur(i, j);
      }
    }
    const SchurFactor factor(std::move(schur));
    const double mu = ms.xy / nu;
    const Vector lam = sc.lambda();

    // Predictor.
    const Vector t_aff = linalg::scaled(-1.0, lam);
    const Direction aff = newton(sc, factor, rp, rd, t_aff);
    const Vector dxs_aff = sc.primal(aff.dx);
    const Vector dys_aff = sc.dual(aff.dy);
    const double ap_aff = std::min(1.0, sc.max_step(dxs_aff));
    const double ad_aff = std::min(1.0, sc.max_step(dys_aff));
    double mu_aff = 0.0;
    for (std::size_t i = 0; i < q_; ++i) {
      mu_aff += (it.x[i] + ap_aff * aff.dx[i]) * (it.y[i] + ad_aff * aff.dy[i]);
    }
    mu_aff /= nu;
    const double sigma =
        std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, opt_.centering_exponent), 0.0, 1.0);

    // Corrector.
    const Vector e = cones::identity_point(cone_);
    const Vector lam2 = jordan(lam, lam, cone_);
    const Vector cross = jordan(dxs_aff, dys_aff, cone_);
    Vector rc(q_);
    for (std::size_t i = 0; i < q_; ++i) rc[i] = sigma * mu * e[i] - lam2[i] - cross[i];
    const Direction dir = newton(sc, factor, rp, rd, sc.lambda_solve(rc));
    const double ap = std::min(1.0, opt_.step_fraction * sc.max_step(sc.primal(dir.dx)));
    const double ad = std::min(1.0, opt_.step_fraction * sc.max_step(sc.dual(dir.dy)));
    if (!(ap > 0.0) || !(ad > 0.0)) break;

    for (std::size_t i = 0; i < q_; ++i) {
      it.x[i] += ap * dir.dx[i];
      it.y[i] += ad * dir.dy[i];
    }
    for (std::size_t i = 0; i < m_; ++i) it.z[i] += ad * dir.dz[i];
    if (ap < 1e-10 && ad < 1e-10) break;
  }

  const SolveStatus status =
      meets_optimality(best_ms) ? SolveStatus::kOptimal : SolveStatus::kNumericalLimit;
  return finish(best, best_ms, status, k);
}

// Minimum-norm least-squares solution through a zero-padded square SVD.
Vector min_norm_solve(const Matrix& k, std::span<const double> rhs) {
  const std::size_t n = std::max(k.rows(), k.cols());
  Matrix sq(n, n);
  for (std::size_t i = 0; i < k.rows(); ++i)
    for (std::size_t j = 0; j < k.cols(); ++j) sq(i, j) = k(i, j);
  const linalg::Svd f = linalg::svd(sq);
  Vector out(k.cols(), 0.0);
  if (f.sigma.empty() || !(f.sigma[0] > 0.0)) return out;
  const double cut = 1e-11 * f.sigma[0];
  for (std::size_t c = 0; c < n; ++c) {
    if (!(f.sigma[c] > cut)) break;
    double coef = 0.0;
    for (std::size_t i = 0; i < k.rows(); ++i) coef += f.u(i, c) * rhs[i];
    coef /= f.sigma[c];
    for (std::size_t j = 0; j < k.cols(); ++j) out[j] += coef * f.v(j, c);
  }
  return out;
}

// Orthonormal bases (as columns) for the faces of K containing x and y,
// split by comparing the two points along a common eigenbasis.
struct FaceBases {
  Matrix primal;
  Matrix dual;
};

FaceBases face_bases(std::span<const double> x, std::span<const double> y, const ConeSpec& cone) {
  const std::size_t q = cone.dim();
  std::vector<Vector> pcols, dcols;
  auto unit = [q](std::size_t i) {
    Vector v(q, 0.0);
    v[i] = 1.0;
    return v;
  };
  for_each_block(cone, [&](std::size_t, const cones::ConeBlock& b, std::size_t off) {
    if (b.kind == BlockKind::kOrthant) {
      for (std::size_t i = 0; i < b.size; ++i)
        (x[off + i] >= y[off + i] ? pcols : dcols).push_back(unit(off + i));
      return;
    }
    const linalg::SymEig ex = linalg::sym_eig(read_block(x, off, b.size));
    const Matrix my = read_block(y, off, b.size);
    std::vector<std::size_t> in_x, in_y;
    for (std::size_t i = 0; i < b.size; ++i) {
      double yi = 0.0;
      for (std::size_t a = 0; a < b.size; ++a)
        for (std::size_t c = 0; c < b.size; ++c)
          yi += ex.vectors(a, i) * my(a, c) * ex.vectors(c, i);
      (ex.values[i] >= yi ? in_x : in_y).push_back(i);
    }
    auto push = [&](const std::vector<std::size_t>& idx, std::vector<Vector>& cols) {
      const double h = 1.0 / std::sqrt(2.0);
      for (std::size_t s = 0; s < idx.size(); ++s) {
        for (std::size_t t = s; t < idx.size(); ++t) {
          Matrix e(b.size, b.size);
          for (std::size_t a = 0; a < b.size; ++a) {
            for (std::size_t c = 0; c < b.size; ++c) {
              const double ab = ex.vectors(a, idx[s]) * ex.vectors(c, idx[t]);
              const double ba = ex.vectors(a, idx[t]) * ex.vectors(c, idx[s]);
              e(a, c) = s == t ? ab : h * (ab + ba);
            }
          }
          Vector col(q, 0.0);
          write_block(col, off, e);
          cols.push_back(std::move(col));
        }
      }
    };
    push(in_x, pcols);
    push(in_y, dcols);
  });
  auto as_matrix = [q](const std::vector<Vector>& cols) {
    Matrix m(q, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (std::size_t i = 0; i < q; ++i) m(i, j) = cols[j][i];
    return m;
  };
  return {as_matrix(pcols), as_matrix(dcols)};
}

double cone_slack(std::span<const double> v, const ConeSpec& cone) {
  return cones::interior_margin(v, cone) + 1e-12 * (1.0 + linalg::norm2(v));
}

// Replaces an approximately optimal pair by the solution of the equality
// system restricted to the complementary faces, when that stays in the cone
// and does not worsen the residuals. Interior-point iterates lose digits in
// the multipliers as μ → 0; this recovers them.
void polish(const SolverInstance& inst, ConicSolution& sol) {
  const std::size_t q = inst.cone.dim();
  const std::size_t m = inst.G.rows();
  FaceBases fb;
  try {
    fb = face_bases(sol.x, sol.y, inst.cone);
  } catch (const Error&) {
    return;
  }
  const double h_norm = linalg::norm2(inst.h);
  const double g_norm = linalg::norm2(inst.g);

  auto primal_res = [&](const Vector& x) {
    Vector r = m > 0 ? linalg::multiply(inst.G, x) : Vector{};
    for (std::size_t i = 0; i < m; ++i) r[i] -= inst.h[i];
    return linalg::norm2(r);
  };
  auto dual_res = [&](const Vector& z, const Vector& y) {
    Vector r = m > 0 ? linalg::multiply_transposed(inst.G, z) : Vector(q, 0.0);
    for (std::size_t i = 0; i < q; ++i) r[i] += y[i] - inst.g[i];
    return linalg::norm2(r);
  };

  // Primal: x = B·ξ with G·B·ξ = h, closest to the current point.
  if (m > 0 && fb.primal.cols() > 0) {
    const std::size_t p = fb.primal.cols();
    const Vector xi0 = linalg::multiply_transposed(fb.primal, sol.x);
    const Matrix gb = inst.G * fb.primal;
    Vector rhs = inst.h;
    const Vector gbx = linalg::multiply(gb, xi0);
    for (std::size_t i = 0; i < m; ++i) rhs[i] -= gbx[i];
    const Vector dxi = min_norm_solve(gb, rhs);
    Vector xi(p);
    for (std::size_t j = 0; j < p; ++j) xi[j] = xi0[j] + dxi[j];
    const Vector x = linalg::multiply(fb.primal, xi);
    const double res = primal_res(x);
    const bool close = linalg::norm2(linalg::subtract(x, sol.x)) <= 1e-4 * (1.0 + linalg::norm2(sol.x));
    if (close && cone_slack(x, inst.cone) >= 0.0 &&
        res <= std::max(sol.residuals.primal, 1e-14 * (1.0 + h_norm))) {
      sol.x = x;
      sol.residuals.primal = res;
    }
  }

  // Dual: y = N·η with Gᵀz + N·η = g, closest to the current (z, η).
  {
    const std::size_t k = fb.dual.cols();
    Matrix kk(q, m + k);
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t j = 0; j < m; ++j) kk(i, j) = inst.G(j, i);
      for (std::size_t j = 0; j < k; ++j) kk(i, m + j) = fb.dual(i, j);
    }
    const Vector eta0 = k > 0 ? linalg::multiply_transposed(fb.dual, sol.y) : Vector{};
    Vector cur(m + k);
    std::copy(sol.z.begin(), sol.z.end(), cur.begin());
    std::copy(eta0.begin(), eta0.end(), cur.begin() + static_cast<long>(m));
    Vector rhs = inst.g;
    const Vector kc = linalg::multiply(kk, cur);
    for (std::size_t i = 0; i < q; ++i) rhs[i] -= kc[i];
    const Vector delta = min_norm_solve(kk, rhs);
    Vector z(m), eta(k);
    for (std::size_t j = 0; j < m; ++j) z[j] = cur[j] + delta[j];
    for (std::size_t j = 0; j < k; ++j) eta[j] = cur[m + j] + delta[m + j];
    const Vector y = k > 0 ? linalg::multiply(fb.dual, eta) : Vector(q, 0.0);
    const double res = dual_res(z, y);
    const double scale = 1.0 + linalg::norm2(sol.y) + linalg::norm2(sol.z);
    const bool close = linalg::norm2(linalg::subtract(y, sol.y)) + linalg::norm2(linalg::subtract(z, sol.z)) <= 1e-4 * scale;
    if (close && cone_slack(y, inst.cone) >= 0.0 &&
        res <= std::max(sol.residuals.dual, 1e-14 * (1.0 + g_norm))) {
      sol.z = z;
      sol.y = y;
      sol.residuals.dual = res;
    }
  }

  const std::size_t lead = std::min(inst.leading_rows, m);
  sol.w.assign(sol.z.begin(), sol.z.begin() + static_cast<long>(lead));
  sol.s.assign(sol.z.begin() + static_cast<long>(lead), sol.z.end());
  sol.primal_obj = linalg::dot(inst.g, sol.x);
  sol.dual_obj = m > 0 ? linalg::dot(inst.h, sol.z) : 0.0;
  sol.residuals.gap = std::abs(linalg::dot(sol.x, sol.y));
}

}  // namespace

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kPrimalInfeasible: return "PrimalInfeasible";
    case SolveStatus::kDualInfeasibleOrUnbounded: return "DualInfeasibleOrUnbounded";
    case SolveStatus::kNumericalLimit: return "NumericalLimit";
  }
  return "Unknown";
}

double margin_tolerance(std::span<const double> x) { return 1e-7 * (1.0 + linalg::norm2(x)); }

ConicSolution solve(const SolverInstance& instance, const SolverOptions& options) {
  Ipm ipm(instance, options);
  ConicSolution sol = ipm.run();
  if (sol.optimal()) polish(instance, sol);
  return sol;
}

PhaseOneResult phase1(const Matrix& G, std::span<const double> h, const ConeSpec& cone) {
  const std::size_t q = cone.dim();
  const Vector e = cones::identity_point(cone);
  PhaseOneResult out;
  if (G.rows() == 0) {
    out.feasible = true;
    out.margin = 1.0;
    out.x = e;
    return out;
  }
  if (G.cols() != q || h.size() != G.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "phase1 data disagrees with the cone");
  }
  const std::size_t m = G.rows();

  // Least-norm solution of Gx = h.
  const Matrix ggt = G * G.transpose();
  const linalg::SpdFactor f = linalg::factor_spd(ggt);
  const Vector x0 = linalg::multiply_transposed(G, linalg::solve(f, h));
  const double m0 = cones::interior_margin(x0, cone);
  if (m0 >= 1.0) {
    out.feasible = true;
    out.margin = 1.0;
    out.x = x0;
    return out;
  }

  // Variables (x', τ, σ, ρ) with x = x' + (τ − L)·e:
  //   G x' + (Ge) τ = h + L·Ge,  τ + σ = L + 1,  ⟨e, x'⟩ + ρ = R.
  const double lift = std::max(0.0, -m0) + 2.0;
  const double nu = static_cast<double>(cone.degree());
  const double radius = 10.0 * (1.0 + std::abs(linalg::dot(e, x0)) + nu * (std::abs(m0) + 1.0));
  const Vector ge = linalg::multiply(G, e);

  SolverInstance inst;
  inst.cone = cone.with_orthant(3);
  const std::size_t n = q + 3;
  inst.G = Matrix(m + 2, n);
  inst.h.assign(m + 2, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < q; ++j) inst.G(i, j) = G(i, j);
    inst.G(i, q) = ge[i];
    inst.h[i] = h[i] + lift * ge[i];
  }
  inst.G(m, q) = 1.0;
  inst.G(m, q + 1) = 1.0;
  inst.h[m] = lift + 1.0;
  for (std::size_t j = 0; j < q; ++j) inst.G(m + 1, j) = e[j];
  inst.G(m + 1, q + 2) = 1.0;
  inst.h[m + 1] = radius;
  inst.g.assign(n, 0.0);
  inst.g[q] = -1.0;
  inst.provenance = Provenance::kPhaseIPrimal;
  inst.leading_rows = m + 2;

  const ConicSolution sol = solve(inst);
  const double t = sol.x[q] - lift;
  out.status = sol.status;
  out.margin = std::min(t, 1.0);
  out.x.resize(q);
  for (std::size_t j = 0; j < q; ++j) out.x[j] = sol.x[j] + t * e[j];
  out.feasible = out.margin >= -margin_tolerance(out.x);
  return out;
}

}  // namespace mpclo
