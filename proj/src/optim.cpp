#include "rismux/optim.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "rismux/channel.hpp"
#include "rismux/rng.hpp"
#include "rismux/spectral.hpp"

namespace rismux {

void OptimizerOptions::validate() const {
  if (!(0.0 < wolfe_c1 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0)) {
    throw std::invalid_argument("OptimizerOptions: requires 0 < c1 < c2 < 1");
  }
  if (max_iterations < 1 || max_line_search_steps < 1 || restarts < 0) {
    throw std::invalid_argument("OptimizerOptions: invalid iteration limits");
  }
}

namespace {

constexpr double kCurvatureSkip = 1e-12;

// Minimizer of the cubic Hermite interpolant through (a, fa, da), (b, fb, db).
double cubic_minimizer(double a, double fa, double da, double b, double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (!(disc >= 0.0)) {
    return 0.5 * (a + b);
  }
  double d2 = std::sqrt(disc);
  if (b < a) {
    d2 = -d2;
  }
  const double denom = db - da + 2.0 * d2;
  if (denom == 0.0) {
    return 0.5 * (a + b);
  }
  const double t = b - (b - a) * (db + d2 - d1) / denom;
  return std::isfinite(t) ? t : 0.5 * (a + b);
}

}  // namespace

LineSearchResult line_search_cubic(const std::function<double(double)>& phi,
                                   const std::function<double(double)>& dphi,
                                   double initial_step, const OptimizerOptions& opts) {
  opts.validate();
  const double phi0 = phi(0.0);
  const double dphi0 = dphi(0.0);
  if (!(dphi0 < 0.0)) {
    throw std::invalid_argument("line_search_cubic: dphi(0) must be negative");
  }
  if (!(initial_step > 0.0)) {
    throw std::invalid_argument("line_search_cubic: initial step must be positive");
  }

  LineSearchResult result;
  const double c1 = opts.wolfe_c1;
  const double c2 = opts.wolfe_c2;
  auto sufficient = [&](double t, double ft) { return ft <= phi0 + c1 * t * dphi0; };
  auto curved = [&](double dt) { return std::abs(dt) <= c2 * std::abs(dphi0); };

  // Nocedal-Wright zoom: maintains a bracket whose lower end satisfies the
  // sufficient-decrease condition; cubic fits pick the trial step.
  auto zoom = [&](double lo, double f_lo, double d_lo, double hi, double f_hi,
                  double d_hi) -> LineSearchResult {
    for (int i = 0; i < opts.max_line_search_steps; ++i) {
      double t = cubic_minimizer(lo, f_lo, d_lo, hi, f_hi, d_hi);
      const double left = std::min(lo, hi);
      const double right = std::max(lo, hi);
      const double margin = 0.1 * (right - left);
      if (!(t >= left + margin && t <= right - margin)) {
        t = 0.5 * (lo + hi);
      }
      const double ft = phi(t);
      ++result.evaluations;
      if (!sufficient(t, ft) || ft >= f_lo) {
        hi = t;
        f_hi = ft;
        d_hi = dphi(t);
      } else {
        const double dt = dphi(t);
        if (curved(dt)) {
          result.step = t;
          result.success = true;
          return result;
        }
        if (dt * (hi - lo) >= 0.0) {
          hi = lo;
          f_hi = f_lo;
          d_hi = d_lo;
        }
        lo = t;
        f_lo = ft;
        d_lo = dt;
      }
      if (right - left < 1e-16 * std::max(1.0, right)) {
        break;  // bracket collapsed without a Wolfe point
      }
    }
    return result;
  };

  double t_prev = 0.0;
  double f_prev = phi0;
  double d_prev = dphi0;
  double t = initial_step;
  for (int i = 0; i < opts.max_line_search_steps; ++i) {
    const double ft = phi(t);
    ++result.evaluations;
    if (!sufficient(t, ft) || (i > 0 && ft >= f_prev)) {
      return zoom(t_prev, f_prev, d_prev, t, ft, dphi(t));
    }
    const double dt = dphi(t);
    if (curved(dt)) {
      result.step = t;
      result.success = true;
      return result;
    }
    if (dt >= 0.0) {
      return zoom(t, ft, dt, t_prev, f_prev, d_prev);
    }
    t_prev = t;
    f_prev = ft;
    d_prev = dt;
    t *= 2.0;
  }
  return result;
}

namespace {

// Shared ascent loop; minimizes the negated objective. BFGS keeps an explicit
// inverse-Hessian approximation, steepest ascent goes straight down -g.
OptimizationReport ascend(const Objective& objective, const ObjectiveGradient& gradient,
                          const PhaseVector& theta0, const OptimizerOptions& opts,
                          bool use_bfgs) {
  opts.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const auto n = theta0.size();

  auto f_at = [&](const PhaseVector& x) { return -objective(x); };
  auto g_at = [&](const PhaseVector& x) -> GradientVector { return -gradient(x); };

  PhaseVector x = theta0;
  double fx = f_at(x);
  GradientVector gx = g_at(x);
  if (!std::isfinite(fx) || !all_finite(gx)) {
    throw std::invalid_argument("optimizer: non-finite objective or gradient at theta0");
  }

  if (opts.debug_checks) {
    // One-shot consistency check of the gradient against central differences.
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < n; ++i) {
      PhaseVector xp = x;
      PhaseVector xm = x;
      xp(i) += h;
      xm(i) -= h;
      const double fd = (f_at(xp) - f_at(xm)) / (2.0 * h);
      if (std::abs(fd - gx(i)) > 1e-4 * std::max(1.0, std::abs(fd))) {
        throw std::logic_error("optimizer debug check: gradient disagrees with objective");
      }
    }
  }

  OptimizationReport report;
  report.objective_trace.push_back(-fx);
  report.termination = Termination::max_iterations;

  Eigen::MatrixXd h_inv;
  if (use_bfgs) {
    h_inv = Eigen::MatrixXd::Identity(n, n);
  }
  bool first_update = true;
  double prev_dphi0 = 0.0;
  double prev_step = 1.0;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    if (gx.lpNorm<Eigen::Infinity>() < opts.grad_tolerance) {
      report.termination = Termination::converged;
      break;
    }

    PhaseVector direction;
    if (use_bfgs) {
      direction = -(h_inv * gx);
      if (!(gx.dot(direction) < 0.0)) {
        // Lost positive-definiteness (numerics); restart from identity.
        h_inv.setIdentity();
        first_update = true;
        direction = -gx;
      }
    } else {
      direction = -gx;
    }
    const double dphi0 = gx.dot(direction);

    // One-slot caches so the accepted point's value/gradient are not recomputed.
    double t_f = 0.0;
    double f_t = fx;
    double t_g = 0.0;
    GradientVector g_t = gx;
    auto phi = [&](double t) {
      if (t != t_f) {
        f_t = f_at(x + t * direction);
        t_f = t;
      }
      return f_t;
    };
    auto dphi = [&](double t) {
      if (t != t_g) {
        g_t = g_at(x + t * direction);
        t_g = t;
      }
      return g_t.dot(direction);
    };

    double initial_step = 1.0;
    if (!use_bfgs && iter > 0 && dphi0 != 0.0) {
      // Barzilai-style warm start: assume the same decrease as last iteration.
      initial_step = std::clamp(prev_step * prev_dphi0 / dphi0, 1e-8, 1e8);
    }

    const LineSearchResult ls = line_search_cubic(phi, dphi, initial_step, opts);
    if (!ls.success) {
      report.termination = Termination::line_search_failure;
      break;
    }
    if (opts.debug_checks) {
      const bool decrease_ok = phi(ls.step) <= fx + opts.wolfe_c1 * ls.step * dphi0;
      const bool curvature_ok = std::abs(dphi(ls.step)) <= opts.wolfe_c2 * std::abs(dphi0);
      if (!decrease_ok || !curvature_ok) {
        throw std::logic_error("optimizer debug check: accepted step violates Wolfe conditions");
      }
    }

    const PhaseVector x_new = x + ls.step * direction;
    const double f_new = phi(ls.step);
    const GradientVector g_new = (t_g == ls.step) ? g_t : g_at(x_new);

    if (use_bfgs) {
      const PhaseVector s = ls.step * direction;
      const GradientVector y = g_new - gx;
      const double sy = s.dot(y);
      if (sy > kCurvatureSkip * s.norm() * y.norm()) {
        if (first_update) {
          h_inv = (sy / y.squaredNorm()) * Eigen::MatrixXd::Identity(n, n);
          first_update = false;
        }
        const double rho = 1.0 / sy;
        const Eigen::VectorXd hy = h_inv * y;
        h_inv.noalias() -= rho * (s * hy.transpose() + hy * s.transpose());
        h_inv.noalias() += (rho * rho * y.dot(hy) + rho) * (s * s.transpose());
      }
    }

    x = x_new;
    fx = f_new;
    gx = g_new;
    prev_dphi0 = dphi0;
    prev_step = ls.step;
    ++report.iterations;
    report.objective_trace.push_back(-fx);
  }

  report.theta_star = x;
  report.final_gradient_norm = gx.lpNorm<Eigen::Infinity>();
  if (report.termination == Termination::max_iterations &&
      gx.lpNorm<Eigen::Infinity>() < opts.grad_tolerance) {
    report.termination = Termination::converged;
  }
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

}  // namespace

OptimizationReport bfgs_maximize(const Objective& objective, const ObjectiveGradient& gradient,
                                 const PhaseVector& theta0, const OptimizerOptions& opts) {
  return ascend(objective, gradient, theta0, opts, true);
}

OptimizationReport steepest_ascent(const Objective& objective, const ObjectiveGradient& gradient,
                                   const PhaseVector& theta0, const OptimizerOptions& opts) {
  return ascend(objective, gradient, theta0, opts, false);
}

OptimizationReport optimize_phases(Criterion criterion, const ChannelRealization& real,
                                   const SystemConfig& config, const OptimizerOptions& opts,
                                   std::uint64_t stream_salt) {
  config.validate();
  real.validate();
  opts.validate();

  Objective objective;
  ObjectiveGradient gradient;
  auto tie_count = std::make_shared<int>(0);
  switch (criterion) {
    case Criterion::effective_rank:
      objective = [&real, &config](const PhaseVector& theta) {
        return effective_rank_of(assemble_effective(real, theta, config.alpha));
      };
      gradient = [&real, &config](const PhaseVector& theta) {
        return effective_rank_grad(real, theta, config.alpha);
      };
      break;
    case Criterion::min_singular:
      objective = [&real, &config](const PhaseVector& theta) {
        return min_singular_of(assemble_effective(real, theta, config.alpha));
      };
      gradient = [&real, &config, tie_count](const PhaseVector& theta) {
        bool degenerate = false;
        GradientVector g = min_singular_grad(real, theta, config.alpha, &degenerate);
        if (degenerate) {
          ++*tie_count;
        }
        return g;
      };
      break;
    default:
      throw std::invalid_argument("optimize_phases: criterion has no objective to optimize");
  }

  OptimizationReport best;
  const std::uint64_t criterion_tag = static_cast<std::uint64_t>(criterion) + 1;
  for (int restart = 0; restart <= opts.restarts; ++restart) {
    *tie_count = 0;
    const PhaseVector theta0 =
        random_phases(config.seed, stream_tag::theta_init,
                      stream_id(criterion_tag, stream_salt, static_cast<std::uint64_t>(restart)),
                      config.num_elements);
    OptimizationReport report = bfgs_maximize(objective, gradient, theta0, opts);
    report.degenerate_iterates = *tie_count;
    if (restart == 0 || report.objective_trace.back() > best.objective_trace.back()) {
      best = std::move(report);
    }
  }
  return best;
}

}  // namespace rismux
