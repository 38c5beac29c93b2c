#include "mpclo/properties.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>

#include "detail.h"
#include "mpclo/error.h"

namespace mpclo {
namespace {

constexpr double kMonotonicityTol = 1e-7;
constexpr double kInverseTol = 1e-5;
constexpr double kComplementarityTol = 1e-7;
constexpr double kProjectionTol = 1e-6;
constexpr double kIdempotenceTol = 1e-12;

void check_box(const PropertyOptions& o, std::size_t r) {
  if (o.box.size() != r) throw Error(ErrorCode::kDimensionMismatch, "sampling box dimension");
  for (const auto& [lo, hi] : o.box) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw Error(ErrorCode::kInvalidArgument, "sampling box interval must be finite and nonempty");
    }
  }
}

// Candidates are drawn serially and screened in batches, so the accepted
// sequence does not depend on the worker count.
std::vector<Vector> sample_screened(const ProblemData& member, std::size_t count,
                                    std::uint64_t seed, const PropertyOptions& options,
                                    const std::function<Vector(Vector)>& transform) {
  check_box(options, member.r());
  std::mt19937_64 rng(seed);
  std::vector<Vector> out;
  std::size_t drawn = 0;
  const std::size_t cap = 10 * count;
  while (out.size() < count && drawn < cap) {
    const std::size_t batch = std::min(count - out.size(), cap - drawn);
    std::vector<Vector> cand(batch);
    for (Vector& u : cand) {
      u.resize(member.r());
      for (std::size_t k = 0; k < u.size(); ++k) {
        const auto [lo, hi] = options.box[k];
        u[k] = lo + (hi - lo) * detail::unit_draw(rng);
      }
      u = transform(std::move(u));
    }
    drawn += batch;
    std::vector<char> inside(batch, 0);
    detail::parallel_for(batch, options.workers, [&](std::size_t k) {
      try {
        inside[k] = membership_theta_d(member, cand[k]).status == Membership::kInterior;
      } catch (const Error&) {
        inside[k] = 0;
      }
    });
    for (std::size_t k = 0; k < batch && out.size() < count; ++k)
      if (inside[k]) out.push_back(std::move(cand[k]));
  }
  return out;
}

MappingOptions witness_only(MappingOptions o) {
  o.extents = false;
  return o;
}

// Per-sample outcome; nullopt marks a skipped evaluation.
struct Measured {
  double violation = 0.0;
  std::vector<Vector> witnesses;
};

PropertyVerdict merge(std::string name, double tol, const std::vector<std::optional<Measured>>& all) {
  PropertyVerdict v;
  v.name = std::move(name);
  v.tolerance = tol;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& m : all) {
    if (!m) {
      ++v.skipped;
      continue;
    }
    ++v.samples;
    const double viol = std::isnan(m->violation) ? std::numeric_limits<double>::infinity() : m->violation;
    if (viol > worst) {
      worst = viol;
      v.witnesses = m->witnesses;
    }
  }
  v.worst_violation = v.samples > 0 && worst > 0.0 ? worst : 0.0;
  v.pass = v.samples > 0 && v.worst_violation <= tol;
  return v;
}

template <typename Eval>
std::vector<std::optional<Measured>> evaluate(std::size_t n, unsigned workers, Eval&& eval) {
  std::vector<std::optional<Measured>> out(n);
  detail::parallel_for(n, workers, [&](std::size_t k) {
    try {
      out[k] = eval(k);
    } catch (const Error&) {
      out[k] = std::nullopt;
    }
  });
  return out;
}

double distance_to_box(const MappingValue& mv, std::span<const double> u) {
  double d = 0.0;
  for (std::size_t k = 0; k < mv.directions.size(); ++k) {
    const double t = linalg::dot(mv.directions[k], u);
    const Interval& e = mv.extents[k];
    d = std::max({d, e.lower - t, t - e.upper});
  }
  return d;
}

}  // namespace

std::vector<Vector> sample_interior(const ProblemData& p, std::size_t count, std::uint64_t seed,
                                    const PropertyOptions& options) {
  return sample_screened(p, count, seed, options, [](Vector u) { return u; });
}

PropertyVerdict check_monotonicity(const ProblemData& p, std::size_t pairs, std::uint64_t seed,
                                   const PropertyOptions& options) {
  const std::vector<Vector> pts = sample_interior(p, 2 * pairs, seed, options);
  const MappingOptions mo = witness_only(options.mapping);
  std::vector<std::optional<Vector>> images(pts.size());
  detail::parallel_for(pts.size(), options.workers, [&](std::size_t k) {
    try {
      images[k] = eval_phi(p, pts[k], {}, mo).witness;
    } catch (const Error&) {
      images[k] = std::nullopt;
    }
  });
  std::vector<std::optional<Measured>> all(pts.size() / 2);
  for (std::size_t k = 0; k < all.size(); ++k) {
    const auto& v1 = images[2 * k];
    const auto& v2 = images[2 * k + 1];
    if (!v1 || !v2) continue;
    const Vector& u1 = pts[2 * k];
    const Vector& u2 = pts[2 * k + 1];
    const double ip = linalg::dot(linalg::subtract(u2, u1), linalg::subtract(*v1, *v2));
    all[k] = Measured{-ip, {u1, u2, *v1, *v2}};
  }
  return merge("monotonicity", kMonotonicityTol, all);
}

PropertyVerdict check_inverse(const ProblemData& p, std::size_t samples, std::uint64_t seed,
                              const PropertyOptions& options) {
  const std::vector<Vector> pts = sample_interior(p, samples, seed, options);
  const MappingOptions mo = witness_only(options.mapping);
  const auto all = evaluate(pts.size(), options.workers, [&](std::size_t k) {
    const Vector& u = pts[k];
    const MappingValue fwd = eval_phi(p, u, {}, mo);
    const Vector& v = fwd.witness;
    if (membership_theta_p(p, v).status == Membership::kInterior) {
      const MappingValue back = eval_psi(p, v, {}, options.mapping);
      return Measured{distance_to_box(back, u), {u, v}};
    }
    const ConicSolution rhs = solve(assemble_primal_rhs(p, v));
    const KktResiduals res =
        mpkkt_residual(p, u, v, rhs.x, fwd.solution.w, fwd.solution.y);
    return Measured{res.max(), {u, v}};
  });
  return merge("inverse", kInverseTol, all);
}

double complementarity_violation(const ProblemData& p, std::span<const double> u,
                                 const ConicSolution& solution) {
  Vector y = linalg::axpy(1.0, linalg::multiply_transposed(p.M, u), p.c);
  if (p.m() > 0) y = linalg::subtract(y, linalg::multiply_transposed(p.A, solution.w));
  const double value = linalg::dot(p.c, solution.x) + linalg::dot(linalg::multiply(p.M, solution.x), u);
  return std::abs(linalg::dot(solution.x, y)) / (1.0 + std::abs(value));
}

PropertyVerdict check_complementarity(const ProblemData& p, std::size_t samples,
                                      std::uint64_t seed, const PropertyOptions& options) {
  const std::vector<Vector> pts = sample_interior(p, samples, seed, options);
  const auto all = evaluate(pts.size(), options.workers, [&](std::size_t k) -> std::optional<Measured> {
    const ConicSolution sol = solve(assemble_primal(p, pts[k]));
    if (!sol.optimal()) return std::nullopt;
    return Measured{complementarity_violation(p, pts[k], sol), {pts[k], sol.x}};
  });
  return merge("complementarity", kComplementarityTol, all);
}

PropertyVerdict check_projection(const ProblemData& p, const Matrix& S, std::size_t samples,
                                 std::uint64_t seed, const PropertyOptions& options) {
  const std::size_t r = p.r();
  if (S.rows() != r || S.cols() != r) {
    throw Error(ErrorCode::kDimensionMismatch, "projection must be r×r");
  }
  if (linalg::frobenius(S * S - S) > kIdempotenceTol ||
      linalg::frobenius(S - S.transpose()) > kIdempotenceTol) {
    throw Error(ErrorCode::kNotAProjection, "S must be symmetric and idempotent");
  }
  const ProblemData projected = project_parameters(p, S);
  const std::vector<Vector> pts = sample_screened(
      projected, samples, seed, options, [&](Vector u) { return linalg::multiply(S, u); });
  const MappingOptions mo = witness_only(options.mapping);
  const auto all = evaluate(pts.size(), options.workers, [&](std::size_t k) {
    const Vector v = eval_phi(projected, pts[k], {}, mo).witness;
    const double off = linalg::norm2(linalg::subtract(linalg::multiply(S, v), v));
    return Measured{off, {pts[k], v}};
  });
  return merge("projection", kProjectionTol, all);
}

}  // namespace mpclo
