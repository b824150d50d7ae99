#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rismux/types.hpp"

namespace rismux {

struct OptimizerOptions {
  int max_iterations = 500;
  double grad_tolerance = 1e-6;  // stop when the gradient max-norm drops below
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search_steps = 25;
  int restarts = 0;           // extra seeded restarts, best result kept
  bool debug_checks = false;  // finite-difference gradient check at theta0 and
                              // Wolfe certificates on every accepted step

  void validate() const;  // throws std::invalid_argument
};

enum class Termination { converged, max_iterations, line_search_failure };

struct OptimizationReport {
  PhaseVector theta_star;
  std::vector<double> objective_trace;  // objective per iteration, nondecreasing
  double final_gradient_norm = 0.0;     // max-norm at theta_star
  int iterations = 0;
  Termination termination = Termination::converged;
  double wall_time_s = 0.0;
  int degenerate_iterates = 0;  // iterates flagged as singular value ties (MSV)
};

using Objective = std::function<double(const PhaseVector&)>;
using ObjectiveGradient = std::function<GradientVector(const PhaseVector&)>;

// Strong-Wolfe line search with cubic interpolation, minimization convention:
// requires dphi(0) < 0; the returned step satisfies
//   phi(t) <= phi(0) + c1 t dphi(0)   and   |dphi(t)| <= c2 |dphi(0)|.
struct LineSearchResult {
  double step = 0.0;
  bool success = false;
  int evaluations = 0;
};
LineSearchResult line_search_cubic(const std::function<double(double)>& phi,
                                   const std::function<double(double)>& dphi,
                                   double initial_step, const OptimizerOptions& opts);

// Maximizes the objective with BFGS (inverse-Hessian form) on the negated
// function. Updates are skipped when the curvature condition fails.
OptimizationReport bfgs_maximize(const Objective& objective, const ObjectiveGradient& gradient,
                                 const PhaseVector& theta0, const OptimizerOptions& opts);

// Same loop with the raw gradient as search direction.
OptimizationReport steepest_ascent(const Objective& objective, const ObjectiveGradient& gradient,
                                   const PhaseVector& theta0, const OptimizerOptions& opts);

// Maximizes the chosen criterion (effective_rank or min_singular) over the
// phase shifts with BFGS, starting from a seeded uniform draw on [0, 2*pi)^L.
// With restarts > 0 the best-objective report is returned. stream_salt
// decorrelates starting points across trials sharing one config.
OptimizationReport optimize_phases(Criterion criterion, const ChannelRealization& real,
                                   const SystemConfig& config, const OptimizerOptions& opts,
                                   std::uint64_t stream_salt = 0);

}  // namespace rismux
