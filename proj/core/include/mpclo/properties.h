#pragma once

// Sampled checks of the structural properties of Φ and Ψ: monotonicity,
// the inverse relation, complementary slackness, and the reduction to a
// projected parameter space.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mpclo/mappings.h"

namespace mpclo {

struct PropertyVerdict {
  std::string name;
  std::size_t samples = 0;  // evaluations that entered the verdict
  std::size_t skipped = 0;  // evaluations that failed and were left out
  double worst_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;  // worst_violation ≤ tolerance
  // Points behind the worst case, in an order documented per check.
  std::vector<Vector> witnesses;
};

struct PropertyOptions {
  // Sampling rectangle, one interval per parameter coordinate.
  std::vector<std::pair<double, double>> box;
  // 0 picks the number of available processors.
  unsigned workers = 0;
  MappingOptions mapping;
};

// Uniform points of the box whose membership in Θ_D is Interior. Rejection
// stops after 10·count candidates, so fewer points may come back.
std::vector<Vector> sample_interior(const ProblemData& p, std::size_t count, std::uint64_t seed,
                                    const PropertyOptions& options);

// min over pairs of ⟨u₂ − u₁, v₁ − v₂⟩ with vᵢ the Φ witness at uᵢ; the
// violation is its negative part. Witnesses: u₁, u₂, v₁, v₂.
PropertyVerdict check_monotonicity(const ProblemData& p, std::size_t pairs, std::uint64_t seed,
                                   const PropertyOptions& options);

// Distance from u to the extent box of Ψ(Φ(u)). When Φ(u) lies on the
// boundary of Θ_P the distance is replaced by the mpKKT residual of
// (u, Φ(u)) with x from a fresh right-hand-side solve. Witnesses: u, v.
PropertyVerdict check_inverse(const ProblemData& p, std::size_t samples, std::uint64_t seed,
                              const PropertyOptions& options);

// |⟨x, c + Mᵀu − Aᵀw⟩| / (1 + |p*|) for a solved P(u). The dual slack is
// rebuilt from the data, so a solution cached before the data changed shows up.
double complementarity_violation(const ProblemData& p, std::span<const double> u,
                                 const ConicSolution& solution);

// Witnesses: u, x.
PropertyVerdict check_complementarity(const ProblemData& p, std::size_t samples,
                                      std::uint64_t seed, const PropertyOptions& options);

// S must be a symmetric idempotent r×r matrix (NotAProjection otherwise).
// Samples u = S·u' interior to Θ_D of the problem with M replaced by S·M and
// measures ‖Sv − v‖ for the Φ witness v there. Witnesses: u, v.
PropertyVerdict check_projection(const ProblemData& p, const Matrix& S, std::size_t samples,
                                 std::uint64_t seed, const PropertyOptions& options);

}  // namespace mpclo
