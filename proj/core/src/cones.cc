#include "mpclo/cones.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "mpclo/error.h"

namespace mpclo::cones {
namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr int kBisectionCap = 200;
constexpr double kBisectionTol = 1e-9;

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + ": expected " +
                                                   std::to_string(want) + ", got " +
                                                   std::to_string(got));
  }
}

Matrix psd_sqrt(const Matrix& x) {
  const linalg::SymEig e = linalg::sym_eig(x);
  const std::size_t n = x.rows();
  Matrix r(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = std::sqrt(std::max(e.values[k], 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r(i, j) += s * e.vectors(i, k) * e.vectors(j, k);
  }
  return r;
}

double block_margin(std::span<const double> x, const ConeBlock& b) {
  if (b.kind == BlockKind::kOrthant) {
    return *std::min_element(x.begin(), x.end());
  }
  return linalg::min_eigenvalue(smat(x, b.size));
}

}  // namespace

ConeSpec::ConeSpec(std::vector<ConeBlock> blocks) : blocks_(std::move(blocks)) {
  offsets_.reserve(blocks_.size());
  for (const ConeBlock& b : blocks_) {
    if (b.size == 0) throw Error(ErrorCode::kInvalidArgument, "cone block of size 0");
    offsets_.push_back(dim_);
    dim_ += b.dim();
    degree_ += b.size;
  }
}

ConeSpec ConeSpec::with_orthant(std::size_t n) const {
  std::vector<ConeBlock> b = blocks_;
  b.push_back({BlockKind::kOrthant, n});
  return ConeSpec(std::move(b));
}

std::size_t svec_index(std::size_t i, std::size_t j, std::size_t order) {
  if (i > j) std::swap(i, j);
  // Rows 0..i-1 of the upper triangle hold order + (order-1) + … entries.
  return i * order - i * (i - 1) / 2 + (j - i);
}

Vector svec(const Matrix& x) {
  const std::size_t n = x.rows();
  require_dim(x.cols(), n, "svec needs a square matrix");
  Vector v;
  v.reserve(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      v.push_back(i == j ? x(i, i) : kSqrt2 * 0.5 * (x(i, j) + x(j, i)));
  return v;
}

Matrix smat(std::span<const double> v, std::size_t order) {
  require_dim(v.size(), order * (order + 1) / 2, "smat length");
  Matrix x(order, order);
  std::size_t k = 0;
  for (std::size_t i = 0; i < order; ++i)
    for (std::size_t j = i; j < order; ++j, ++k) {
      if (i == j) {
        x(i, i) = v[k];
      } else {
        x(i, j) = v[k] / kSqrt2;
        x(j, i) = x(i, j);
      }
    }
  return x;
}

Vector to_svec(const std::vector<BlockValue>& blocks, const ConeSpec& cone) {
  require_dim(blocks.size(), cone.block_count(), "to_svec block count");
  Vector out;
  out.reserve(cone.dim());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const ConeBlock& b = cone.blocks()[k];
    if (b.kind == BlockKind::kOrthant) {
      const Vector* v = std::get_if<Vector>(&blocks[k]);
      if (v == nullptr) throw Error(ErrorCode::kDimensionMismatch, "orthant block needs a vector");
      require_dim(v->size(), b.size, "orthant block length");
      out.insert(out.end(), v->begin(), v->end());
    } else {
      const Matrix* m = std::get_if<Matrix>(&blocks[k]);
      if (m == nullptr) throw Error(ErrorCode::kDimensionMismatch, "PSD block needs a matrix");
      require_dim(m->rows(), b.size, "PSD block order");
      const Vector s = svec(*m);
      out.insert(out.end(), s.begin(), s.end());
    }
  }
  return out;
}

std::vector<BlockValue> from_svec(std::span<const double> v, const ConeSpec& cone) {
  require_dim(v.size(), cone.dim(), "from_svec length");
  std::vector<BlockValue> out;
  out.reserve(cone.block_count());
  for (std::size_t k = 0; k < cone.block_count(); ++k) {
    const ConeBlock& b = cone.blocks()[k];
    const auto part = v.subspan(cone.offset(k), b.dim());
    if (b.kind == BlockKind::kOrthant) {
      out.emplace_back(Vector(part.begin(), part.end()));
    } else {
      out.emplace_back(smat(part, b.size));
    }
  }
  return out;
}

Vector identity_point(const ConeSpec& cone) {
  Vector e(cone.dim(), 0.0);
  for (std::size_t k = 0; k < cone.block_count(); ++k) {
    const ConeBlock& b = cone.blocks()[k];
    const std::size_t off = cone.offset(k);
    if (b.kind == BlockKind::kOrthant) {
      std::fill(e.begin() + off, e.begin() + off + b.size, 1.0);
    } else {
      for (std::size_t i = 0; i < b.size; ++i) e[off + svec_index(i, i, b.size)] = 1.0;
    }
  }
  return e;
}

double interior_margin(std::span<const double> x, const ConeSpec& cone) {
  require_dim(x.size(), cone.dim(), "interior_margin length");
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < cone.block_count(); ++k) {
    const ConeBlock& b = cone.blocks()[k];
    m = std::min(m, block_margin(x.subspan(cone.offset(k), b.dim()), b));
  }
  return m;
}

bool on_boundary(std::span<const double> x, const ConeSpec& cone) {
  return std::abs(interior_margin(x, cone)) <= 1e-7 * (1.0 + linalg::norm2(x));
}

ConeInterval cone_interval(std::span<const double> c, std::span<const double> a,
                           const ConeSpec& cone) {
  require_dim(c.size(), cone.dim(), "cone_interval c");
  require_dim(a.size(), cone.dim(), "cone_interval a");
  Vector work(c.size());
  auto margin_at = [&](double lambda) {
    for (std::size_t i = 0; i < c.size(); ++i) work[i] = c[i] + lambda * a[i];
    return interior_margin(work, cone);
  };

  // The margin is concave in λ, so a golden-section search over a growing
  // bracket finds an interior point whenever one exists.
  double inside = 0.0;
  double best = margin_at(0.0);
  for (double bracket = 1.0; best <= 0.0 && bracket <= 1e12; bracket *= 100.0) {
    double lo = -bracket, hi = bracket;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = margin_at(x1), f2 = margin_at(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-12 * bracket; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = margin_at(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = margin_at(x1);
      }
    }
    const double mid = 0.5 * (lo + hi);
    const double fm = margin_at(mid);
    if (fm > best) {
      best = fm;
      inside = mid;
    }
  }
  ConeInterval out;
  if (!(best > 0.0)) return out;
  out.empty = false;

  const auto endpoint = [&](double sign) {
    // a (or −a) in K means the ray never leaves int K.
    const Vector dir = linalg::scaled(sign, a);
    if (interior_margin(dir, cone) >= 0.0) return sign * std::numeric_limits<double>::infinity();
    double in = inside;
    double step = std::max(1.0, std::abs(inside));
    double out_pt = inside + sign * step;
    while (margin_at(out_pt) > 0.0) {
      in = out_pt;
      step *= 2.0;
      out_pt = inside + sign * step;
    }
    for (int it = 0; it < kBisectionCap && std::abs(out_pt - in) > kBisectionTol; ++it) {
      const double mid = 0.5 * (in + out_pt);
      if (mid == in || mid == out_pt) break;
      (margin_at(mid) > 0.0 ? in : out_pt) = mid;
    }
    return 0.5 * (in + out_pt);
  };
  out.lower = endpoint(-1.0);
  out.upper = endpoint(1.0);
  const auto in_cone = [&](double lambda) {
    if (!std::isfinite(lambda)) return false;
    for (std::size_t i = 0; i < c.size(); ++i) work[i] = c[i] + lambda * a[i];
    return interior_margin(work, cone) >= -1e-7 * (1.0 + linalg::norm2(work));
  };
  out.lower_in_cone = in_cone(out.lower);
  out.upper_in_cone = in_cone(out.upper);
  return out;
}

NtScaling nt_scaling(std::span<const double> x, std::span<const double> y,
                     const ConeSpec& cone) {
  require_dim(x.size(), cone.dim(), "nt_scaling x");
  require_dim(y.size(), cone.dim(), "nt_scaling y");
  NtScaling out;
  out.blocks.reserve(cone.block_count());
  for (std::size_t k = 0; k < cone.block_count(); ++k) {
    const ConeBlock& b = cone.blocks()[k];
    const auto xb = x.subspan(cone.offset(k), b.dim());
    const auto yb = y.subspan(cone.offset(k), b.dim());
    if (!(block_margin(xb, b) > 0.0) || !(block_margin(yb, b) > 0.0)) {
      throw Error(ErrorCode::kNotInterior, "block " + std::to_string(k));
    }
    BlockScaling s;
    s.kind = b.kind;
    if (b.kind == BlockKind::kOrthant) {
      s.w.resize(b.size);
      s.lambda.resize(b.size);
      for (std::size_t i = 0; i < b.size; ++i) {
        s.w[i] = std::sqrt(xb[i] / yb[i]);
        s.lambda[i] = std::sqrt(xb[i] * yb[i]);
      }
    } else {
      const std::size_t n = b.size;
      const Matrix x_root = psd_sqrt(smat(xb, n));
      const Matrix y_root = psd_sqrt(smat(yb, n));
      const linalg::Svd d = linalg::svd(y_root * x_root);
      // R = X^½·V·Σ^{-½};  R⁻¹ = Σ^{-½}·Uᵀ·Y^½.
      Matrix v_scaled = d.v;
      Matrix ut_scaled = d.u.transpose();
      for (std::size_t j = 0; j < n; ++j) {
        const double f = 1.0 / std::sqrt(d.sigma[j]);
        for (std::size_t i = 0; i < n; ++i) {
          v_scaled(i, j) *= f;
          ut_scaled(j, i) *= f;
        }
      }
      s.R = x_root * v_scaled;
      s.R_inv = ut_scaled * y_root;
      s.W = s.R * s.R.transpose();
      s.lambda = d.sigma;
    }
    out.blocks.push_back(std::move(s));
  }
  return out;
}

}  // namespace mpclo::cones
