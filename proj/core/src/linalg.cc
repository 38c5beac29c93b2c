#include "mpclo/linalg.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mpclo/error.h"

namespace mpclo::linalg {
namespace {

constexpr int kJacobiSweeps = 30;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kDimensionMismatch, what);
}

// Householder QR with column pivoting. Overwrites `a` with R in its upper
// triangle; returns the pivot order and the full orthogonal factor Q.
struct PivotedQr {
  Matrix q;
  Matrix r;
  std::vector<std::size_t> pivots;
};

PivotedQr pivoted_qr(Matrix a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix q = Matrix::identity(m);
  std::vector<std::size_t> piv(n);
  std::iota(piv.begin(), piv.end(), 0);
  std::vector<double> colnorm(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) colnorm[j] += a(i, j) * a(i, j);
  }
  const std::size_t steps = std::min(m, n);
  std::vector<double> v(m);
  for (std::size_t k = 0; k < steps; ++k) {
    // Recompute the trailing norms exactly; matrices here are tiny.
    std::size_t best = k;
    double best_norm = -1.0;
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < m; ++i) s += a(i, j) * a(i, j);
      colnorm[j] = s;
      if (s > best_norm) {
        best_norm = s;
        best = j;
      }
    }
    if (best != k) {
      for (std::size_t i = 0; i < m; ++i) std::swap(a(i, k), a(i, best));
      std::swap(piv[k], piv[best]);
    }
    double alpha = std::sqrt(best_norm);
    if (alpha == 0.0) continue;
    if (a(k, k) > 0) alpha = -alpha;
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t i = k; i < m; ++i) v[i] = a(i, k);
    v[k] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k; i < m; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0.0) continue;
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < m; ++i) s += v[i] * a(i, j);
      s = 2.0 * s / vnorm2;
      for (std::size_t i = k; i < m; ++i) a(i, j) -= s * v[i];
    }
    // Q ← Q·H
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t l = k; l < m; ++l) s += q(i, l) * v[l];
      s = 2.0 * s / vnorm2;
      for (std::size_t l = k; l < m; ++l) q(i, l) -= s * v[l];
    }
  }
  return {std::move(q), std::move(a), std::move(piv)};
}

void jacobi_rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const std::size_t n = a.rows();
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  for (std::size_t k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::from_rows(std::size_t rows, std::size_t cols, Vector entries) {
  require(entries.size() == rows * cols, "entries length must equal rows*cols");
  Matrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = std::move(entries);
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matrix product shape");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix sum shape");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) { return a + (-1.0) * b; }

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) *= s;
  return c;
}

Vector multiply(const Matrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), "matrix-vector shape");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    const auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

Vector multiply_transposed(const Matrix& a, std::span<const double> x) {
  require(a.rows() == x.size(), "transposed matrix-vector shape");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) y[j] += r[j] * xi;
  }
  return y;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
  if (a.rows() == 0) return b;
  if (b.rows() == 0) return a;
  require(a.cols() == b.cols(), "vstack column count");
  Vector e = a.entries();
  e.insert(e.end(), b.entries().begin(), b.entries().end());
  return Matrix::from_rows(a.rows() + b.rows(), a.cols(), std::move(e));
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot length");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double frobenius(const Matrix& a) { return norm2(a.entries()); }

Vector axpy(double alpha, std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "axpy length");
  Vector r(y.begin(), y.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += alpha * x[i];
  return r;
}

Vector scaled(double alpha, std::span<const double> x) {
  Vector r(x.begin(), x.end());
  for (double& v : r) v *= alpha;
  return r;
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
  return axpy(-1.0, b, a);
}

bool is_symmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, norm_inf(m.entries()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > rel_tol * scale) return false;
  return true;
}

SpdFactor factor_spd(const Matrix& m) {
  require(m.rows() == m.cols(), "factor_spd needs a square matrix");
  const std::size_t n = m.rows();
  Matrix a = m;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(m(i, i)));
  const double floor = static_cast<double>(n) * 1e-13 * max_diag;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (a(i, i) > a(p, p)) p = i;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      for (std::size_t i = 0; i < n; ++i) std::swap(a(i, k), a(i, p));
      std::swap(perm[k], perm[p]);
    }
    const double pivot = a(k, k);
    if (!(pivot > floor) || max_diag == 0.0) {
      throw Error(ErrorCode::kNotPositiveDefinite,
                  "pivot " + std::to_string(pivot) + " at step " + std::to_string(k));
    }
    const double lkk = std::sqrt(pivot);
    a(k, k) = lkk;
    for (std::size_t i = k + 1; i < n; ++i) a(i, k) /= lkk;
    for (std::size_t j = k + 1; j < n; ++j)
      for (std::size_t i = j; i < n; ++i) a(i, j) -= a(i, k) * a(j, k);
  }
  Matrix lower(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) lower(i, j) = a(i, j);
  return {n, std::move(lower), std::move(perm)};
}

Vector solve(const SpdFactor& f, std::span<const double> rhs) {
  require(rhs.size() == f.dimension, "solve rhs length");
  const std::size_t n = f.dimension;
  Vector z(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[f.permutation[i]];
    for (std::size_t j = 0; j < i; ++j) s -= f.lower(i, j) * z[j];
    z[i] = s / f.lower(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = z[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.lower(j, i) * z[j];
    z[i] = s / f.lower(i, i);
  }
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[f.permutation[i]] = z[i];
  return x;
}

Matrix reconstruct(const SpdFactor& f) {
  const Matrix llt = f.lower * f.lower.transpose();
  Matrix m(f.dimension, f.dimension);
  for (std::size_t i = 0; i < f.dimension; ++i)
    for (std::size_t j = 0; j < f.dimension; ++j)
      m(f.permutation[i], f.permutation[j]) = llt(i, j);
  return m;
}

SymEig sym_eig(const Matrix& m) {
  require(m.rows() == m.cols(), "sym_eig needs a square matrix");
  const std::size_t n = m.rows();
  Matrix a = m;
  // Symmetrize so rounding in the input cannot stall the sweeps.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = avg;
      a(j, i) = avg;
    }
  Matrix v = Matrix::identity(n);
  const double scale = frobenius(a);
  bool converged = n <= 1 || scale == 0.0;
  for (int sweep = 0; sweep < kJacobiSweeps && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-17 * scale) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        // Skip rotations that cannot change either diagonal entry.
        const double apq = std::abs(a(p, q));
        if (apq < 1e-300 ||
            (apq * 1e18 < std::abs(a(p, p)) && apq * 1e18 < std::abs(a(q, q)))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        jacobi_rotate(a, v, p, q);
      }
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) > 1e-14 * scale) {
      throw Error(ErrorCode::kNoConvergence, "Jacobi sweep budget exhausted");
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  SymEig out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

double min_eigenvalue(const Matrix& m) {
  if (m.rows() == 1) return m(0, 0);
  if (m.rows() == 2) {
    const double tr = 0.5 * (m(0, 0) + m(1, 1));
    const double d = 0.5 * (m(0, 0) - m(1, 1));
    const double off = 0.5 * (m(0, 1) + m(1, 0));
    return tr - std::hypot(d, off);
  }
  return sym_eig(m).values.back();
}

Svd svd(const Matrix& m) {
  require(m.rows() == m.cols(), "svd needs a square matrix");
  const std::size_t n = m.rows();
  Matrix a = m;  // columns get orthogonalized in place
  Matrix v = Matrix::identity(n);
  bool converged = n <= 1;
  // Columns below this squared norm are rounding noise of a rank-deficient input.
  const double negligible = 1e-30 * frobenius(m) * frobenius(m);
  for (int sweep = 0; sweep < 60 && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          alpha += a(i, p) * a(i, p);
          beta += a(i, q) * a(i, q);
          gamma += a(i, p) * a(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        if (alpha <= negligible || beta <= negligible) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double ap = a(i, p);
          const double aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
  }
  if (!converged) throw Error(ErrorCode::kNoConvergence, "one-sided Jacobi SVD");
  Vector sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a(i, j) * a(i, j);
    sigma[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });
  Svd out{Matrix(n, n), Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = sigma[j];
    for (std::size_t i = 0; i < n; ++i) {
      out.u(i, k) = sigma[j] > 0 ? a(i, j) / sigma[j] : (i == k ? 1.0 : 0.0);
      out.v(i, k) = v(i, j);
    }
  }
  return out;
}

std::size_t rank(const Matrix& m, double tol) {
  if (!(tol > 0)) throw Error(ErrorCode::kInvalidArgument, "rank tolerance must be positive");
  if (m.rows() == 0 || m.cols() == 0) return 0;
  const PivotedQr qr = pivoted_qr(m);
  const std::size_t steps = std::min(m.rows(), m.cols());
  const double largest = std::abs(qr.r(0, 0));
  if (largest == 0.0) return 0;
  std::size_t r = 0;
  for (std::size_t k = 0; k < steps; ++k)
    if (std::abs(qr.r(k, k)) > tol * largest) ++r;
  return r;
}

Matrix null_space_rows(const Matrix& m, double tol) {
  const std::size_t n = m.cols();
  if (m.rows() == 0) return Matrix::identity(n);
  const PivotedQr qr = pivoted_qr(m.transpose());  // mᵀ = Q·R·Pᵀ
  const std::size_t r = rank(m, tol);
  Matrix out(n - r, n);
  for (std::size_t k = r; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) out(k - r, i) = qr.q(i, k);
  return out;
}

Vector solve_symmetric_indefinite(const Matrix& m, std::span<const double> rhs) {
  require(m.rows() == m.cols() && rhs.size() == m.rows(), "solve shape");
  const std::size_t n = m.rows();
  Matrix a = m;
  Vector b(rhs.begin(), rhs.end());
  const double scale = std::max(norm_inf(m.entries()), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    if (std::abs(a(p, k)) <= 1e-14 * scale) {
      throw Error(ErrorCode::kSingular, "zero pivot in column " + std::to_string(k));
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(b[k], b[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

}  // namespace mpclo::linalg
