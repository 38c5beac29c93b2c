#pragma once

// Self-dual cone products K = ℝⁿ₊ × 𝕊ⁿ₊ × … and their vectorization.
//
// PSD blocks are stored as svec: the upper triangle in row-major order with
// off-diagonal entries scaled by √2, so that ⟨svec X, svec Y⟩ = tr(XY).
// For order 3 the layout is (x11, √2x12, √2x13, x22, √2x23, x33).

#include <cstddef>
#include <limits>
#include <variant>
#include <vector>

#include "mpclo/linalg.h"

namespace mpclo::cones {

using linalg::Matrix;
using linalg::Vector;

enum class BlockKind { kOrthant, kPsd };

struct ConeBlock {
  BlockKind kind = BlockKind::kOrthant;
  std::size_t size = 1;  // orthant length or matrix order

  std::size_t dim() const noexcept {
    return kind == BlockKind::kOrthant ? size : size * (size + 1) / 2;
  }
  friend bool operator==(const ConeBlock&, const ConeBlock&) = default;
};

class ConeSpec {
 public:
  ConeSpec() = default;
  explicit ConeSpec(std::vector<ConeBlock> blocks);

  static ConeSpec orthant(std::size_t n) { return ConeSpec({{BlockKind::kOrthant, n}}); }
  static ConeSpec psd(std::size_t n) { return ConeSpec({{BlockKind::kPsd, n}}); }

  const std::vector<ConeBlock>& blocks() const noexcept { return blocks_; }
  std::size_t block_count() const noexcept { return blocks_.size(); }
  std::size_t offset(std::size_t block) const { return offsets_[block]; }
  // Vectorized dimension q.
  std::size_t dim() const noexcept { return dim_; }
  // Barrier degree ν: orthant lengths plus PSD orders.
  std::size_t degree() const noexcept { return degree_; }

  // Appends an orthant block of length n (used for slack variables).
  ConeSpec with_orthant(std::size_t n) const;

  friend bool operator==(const ConeSpec&, const ConeSpec&) = default;

 private:
  std::vector<ConeBlock> blocks_;
  std::vector<std::size_t> offsets_;
  std::size_t dim_ = 0;
  std::size_t degree_ = 0;
};

// Per-block value: a plain vector for orthant blocks, a symmetric matrix for PSD.
using BlockValue = std::variant<Vector, Matrix>;

Vector svec(const Matrix& x);
Matrix smat(std::span<const double> v, std::size_t order);
std::size_t svec_index(std::size_t i, std::size_t j, std::size_t order);

Vector to_svec(const std::vector<BlockValue>& blocks, const ConeSpec& cone);
std::vector<BlockValue> from_svec(std::span<const double> v, const ConeSpec& cone);

// Canonical interior point: ones on orthant blocks, identity on PSD blocks.
Vector identity_point(const ConeSpec& cone);

// min over blocks of (min entry) / (min eigenvalue). x ∈ int K iff > 0.
double interior_margin(std::span<const double> x, const ConeSpec& cone);

// True when |margin| ≤ 1e-7·(1 + ‖x‖).
bool on_boundary(std::span<const double> x, const ConeSpec& cone);

// I_> = {λ : c + λ·a ∈ int K}. Endpoints are open; the *_in_cone flags
// record whether c + λ_end·a was confirmed to lie in K (the closed cone).
struct ConeInterval {
  double lower = std::numeric_limits<double>::infinity();
  double upper = -std::numeric_limits<double>::infinity();
  bool empty = true;
  bool lower_in_cone = false;
  bool upper_in_cone = false;

  bool contains(double lambda) const { return !empty && lambda > lower && lambda < upper; }
};

ConeInterval cone_interval(std::span<const double> c, std::span<const double> a,
                           const ConeSpec& cone);

// Nesterov–Todd scaling for one block. For orthant blocks `w` holds
// √(x/y) elementwise; for PSD blocks W = R·Rᵀ with W·Y·W = X, and
// Rᵀ·Y·R = R⁻¹·X·R⁻ᵀ = diag(lambda).
struct BlockScaling {
  BlockKind kind = BlockKind::kOrthant;
  Vector w;       // orthant
  Matrix W;       // PSD
  Matrix R;       // PSD
  Matrix R_inv;   // PSD
  Vector lambda;  // scaled point (orthant entries or PSD eigenvalues)
};

struct NtScaling {
  std::vector<BlockScaling> blocks;
};

// Throws NotInterior unless both x and y have positive margin.
NtScaling nt_scaling(std::span<const double> x, std::span<const double> y,
                     const ConeSpec& cone);

}  // namespace mpclo::cones
