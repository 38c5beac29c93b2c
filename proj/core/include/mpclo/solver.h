#pragma once

// Dense infeasible-start primal-dual interior-point method with
// Nesterov–Todd scaling and Mehrotra predictor-corrector steps, for
//
//   min ⟨g,x⟩  s.t.  Gx = h, x ∈ K        max ⟨h,z⟩  s.t.  Gᵀz + y = g, y ∈ K.

#include <string_view>

#include "mpclo/problem.h"

namespace mpclo {

enum class SolveStatus { kOptimal, kPrimalInfeasible, kDualInfeasibleOrUnbounded, kNumericalLimit };

std::string_view to_string(SolveStatus s);

struct Residuals {
  double primal = 0.0;  // ‖Gx − h‖
  double dual = 0.0;    // ‖Gᵀz + y − g‖
  double gap = 0.0;     // |⟨x,y⟩|
};

struct ConicSolution {
  SolveStatus status = SolveStatus::kNumericalLimit;
  Vector x;
  Vector z;  // all equality multipliers
  Vector w;  // z restricted to the leading rows
  Vector s;  // z restricted to the trailing rows
  Vector y;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  Residuals residuals;
  int iterations = 0;

  bool optimal() const { return status == SolveStatus::kOptimal; }
};

struct SolverOptions {
  int max_iterations = 100;
  double step_fraction = 0.98;
  double centering_exponent = 3.0;
  // Iteration stops once every relative measure falls below this.
  double target_accuracy = 1e-13;
  // ‖x‖ or ‖y‖ beyond divergence_factor·(1 + ‖h‖ + ‖g‖) reports NumericalLimit.
  double divergence_factor = 1e6;
};

ConicSolution solve(const SolverInstance& instance, const SolverOptions& options = {});

struct PhaseOneResult {
  bool feasible = false;
  // Largest t with Gx = h, x − t·e ∈ K, capped at 1.
  double margin = 0.0;
  Vector x;
  SolveStatus status = SolveStatus::kOptimal;
};

// Maximizes the interior margin over {Gx = h, x ∈ K}. G may have zero rows.
PhaseOneResult phase1(const Matrix& G, std::span<const double> h, const cones::ConeSpec& cone);

// Tolerance band for boundary decisions: 1e-7·(1 + ‖x‖).
double margin_tolerance(std::span<const double> x);

}  // namespace mpclo
