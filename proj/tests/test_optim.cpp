#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "rismux/channel.hpp"
#include "rismux/optim.hpp"
#include "rismux/rng.hpp"
#include "rismux/spectral.hpp"

using namespace rismux;

namespace {

SystemConfig instance_config(int l, double alpha, std::uint64_t seed) {
  SystemConfig cfg;
  cfg.num_antennas = 4;
  cfg.num_users = 4;
  cfg.num_elements = l;
  cfg.alpha = alpha;
  cfg.noise_var = 0.1;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("line search: exact quadratic minimizer accepted immediately") {
  OptimizerOptions opts;
  auto phi = [](double t) { return (t - 1.0) * (t - 1.0); };
  auto dphi = [](double t) { return 2.0 * (t - 1.0); };
  const auto res = line_search_cubic(phi, dphi, 1.0, opts);
  CHECK(res.success);
  CHECK(res.step == doctest::Approx(1.0));
}

TEST_CASE("line search: unbounded descent fails after max steps") {
  OptimizerOptions opts;
  auto phi = [](double t) { return -t; };
  auto dphi = [](double) { return -1.0; };
  const auto res = line_search_cubic(phi, dphi, 1.0, opts);
  CHECK_FALSE(res.success);
}

TEST_CASE("line search: accepted steps satisfy both strong Wolfe inequalities") {
  OptimizerOptions opts;
  PhiloxStream rng(21, 22);
  for (int i = 0; i < 50; ++i) {
    // Random convex quartic with a descent direction at 0.
    const double a = rng.next_uniform(0.01, 1.0);
    const double b = rng.next_uniform(0.0, 2.0);
    const double c = rng.next_uniform(0.5, 4.0);
    auto phi = [&](double t) { return a * std::pow(t - c, 4) + b * (t - c) * (t - c); };
    auto dphi = [&](double t) { return 4.0 * a * std::pow(t - c, 3) + 2.0 * b * (t - c); };
    const auto res = line_search_cubic(phi, dphi, rng.next_uniform(0.1, 3.0), opts);
    REQUIRE(res.success);
    CHECK(phi(res.step) <= phi(0.0) + opts.wolfe_c1 * res.step * dphi(0.0) + 1e-14);
    CHECK(std::abs(dphi(res.step)) <= opts.wolfe_c2 * std::abs(dphi(0.0)) + 1e-14);
  }
}

TEST_CASE("line search rejects non-descent directions") {
  OptimizerOptions opts;
  auto phi = [](double t) { return t * t; };
  auto dphi = [](double t) { return 2.0 * t; };
  CHECK_THROWS_AS(line_search_cubic(phi, dphi, 1.0, opts), std::invalid_argument);
}

TEST_CASE("bfgs: quadratic bowl converges to the center") {
  PhaseVector center(8);
  PhiloxStream rng(31, 32);
  for (int i = 0; i < 8; ++i) {
    center(i) = rng.next_uniform(-3.0, 3.0);
  }
  const Objective obj = [&](const PhaseVector& x) { return -(x - center).squaredNorm(); };
  const ObjectiveGradient grad = [&](const PhaseVector& x) -> GradientVector {
    return -2.0 * (x - center);
  };
  OptimizerOptions opts;
  const auto report = bfgs_maximize(obj, grad, PhaseVector::Zero(8), opts);
  CHECK(report.termination == Termination::converged);
  CHECK((report.theta_star - center).norm() < 1e-6);
  CHECK(report.iterations <= 20);
}

TEST_CASE("steepest ascent: quadratic sanity") {
  PhaseVector center = PhaseVector::Constant(6, 1.5);
  const Objective obj = [&](const PhaseVector& x) { return -(x - center).squaredNorm(); };
  const ObjectiveGradient grad = [&](const PhaseVector& x) -> GradientVector {
    return -2.0 * (x - center);
  };
  OptimizerOptions opts;
  const auto report = steepest_ascent(obj, grad, PhaseVector::Zero(6), opts);
  CHECK(report.termination == Termination::converged);
  CHECK((report.theta_star - center).norm() < 1e-5);
}

TEST_CASE("traces are nondecreasing and final beats initial") {
  const auto cfg = instance_config(32, 0.5, 77);
  const auto real = sample_channels(cfg, 0);
  OptimizerOptions opts;
  for (const Criterion crit : {Criterion::effective_rank, Criterion::min_singular}) {
    const auto report = optimize_phases(crit, real, cfg, opts);
    REQUIRE(report.objective_trace.size() > 1);
    for (std::size_t i = 1; i < report.objective_trace.size(); ++i) {
      CHECK(report.objective_trace[i] >= report.objective_trace[i - 1]);
    }
    CHECK(report.objective_trace.back() >= report.objective_trace.front());
  }
}

TEST_CASE("debug checks pass for consistent pairs and catch corrupted gradients") {
  const auto cfg = instance_config(12, 0.5, 78);
  const auto real = sample_channels(cfg, 1);
  OptimizerOptions opts;
  opts.debug_checks = true;
  opts.max_iterations = 30;

  const Objective obj = [&](const PhaseVector& th) {
    return effective_rank_of(assemble_effective(real, th, cfg.alpha));
  };
  const ObjectiveGradient grad = [&](const PhaseVector& th) {
    return effective_rank_grad(real, th, cfg.alpha);
  };
  const PhaseVector theta0 = random_phases(cfg.seed, stream_tag::theta_init, 0, 12);
  CHECK_NOTHROW(bfgs_maximize(obj, grad, theta0, opts));

  const ObjectiveGradient corrupted = [&](const PhaseVector& th) -> GradientVector {
    return -effective_rank_grad(real, th, cfg.alpha);
  };
  CHECK_THROWS_AS(bfgs_maximize(obj, corrupted, theta0, opts), std::logic_error);
}

TEST_CASE("optimizer rejects non-finite starting data") {
  const Objective obj = [](const PhaseVector&) { return std::nan(""); };
  const ObjectiveGradient grad = [](const PhaseVector& x) -> GradientVector {
    return GradientVector::Zero(x.size());
  };
  OptimizerOptions opts;
  CHECK_THROWS_AS(bfgs_maximize(obj, grad, PhaseVector::Zero(4), opts),
                  std::invalid_argument);
}

TEST_CASE("alpha = 0: nothing to optimize, zero iterations of progress") {
  const auto cfg = instance_config(16, 0.0, 79);
  const auto real = sample_channels(cfg, 2);
  OptimizerOptions opts;
  const auto report = optimize_phases(Criterion::effective_rank, real, cfg, opts);
  CHECK(report.iterations == 0);
  CHECK(report.termination == Termination::converged);
  CHECK(report.objective_trace.size() == 1);
}

TEST_CASE("optimize_phases is deterministic") {
  const auto cfg = instance_config(24, 0.5, 80);
  const auto real = sample_channels(cfg, 3);
  OptimizerOptions opts;
  const auto a = optimize_phases(Criterion::min_singular, real, cfg, opts, 5);
  const auto b = optimize_phases(Criterion::min_singular, real, cfg, opts, 5);
  CHECK(a.theta_star == b.theta_star);
  CHECK(a.objective_trace == b.objective_trace);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("effective rank criterion reaches the maximum at L=100") {
  const auto cfg = instance_config(100, 0.5, 81);
  OptimizerOptions opts;
  for (std::uint64_t t = 0; t < 3; ++t) {
    const auto real = sample_channels(cfg, t);
    const auto bfgs = optimize_phases(Criterion::effective_rank, real, cfg, opts, t);
    CHECK(bfgs.objective_trace.back() >= 3.99);
    // theta_star is a stationary point of the effective rank.
    CHECK(bfgs.final_gradient_norm < 1e-4);
    CHECK(effective_rank_grad(real, bfgs.theta_star, cfg.alpha).lpNorm<Eigen::Infinity>() <
          1e-4);
  }
}

TEST_CASE("steepest ascent also solves the effective rank problem") {
  const auto cfg = instance_config(100, 0.5, 82);
  const auto real = sample_channels(cfg, 0);
  const Objective obj = [&](const PhaseVector& th) {
    return effective_rank_of(assemble_effective(real, th, cfg.alpha));
  };
  const ObjectiveGradient grad = [&](const PhaseVector& th) {
    return effective_rank_grad(real, th, cfg.alpha);
  };
  OptimizerOptions opts;
  const PhaseVector theta0 = random_phases(cfg.seed, stream_tag::theta_init, 9, 100);
  const auto report = steepest_ascent(obj, grad, theta0, opts);
  CHECK(report.objective_trace.back() >= 3.9);
}

TEST_CASE("msv solutions improve the minimum singular value") {
  const auto cfg = instance_config(64, 0.5, 83);
  OptimizerOptions opts;
  for (std::uint64_t t = 0; t < 3; ++t) {
    const auto real = sample_channels(cfg, t);
    const auto report = optimize_phases(Criterion::min_singular, real, cfg, opts, t);
    CHECK(report.objective_trace.back() > report.objective_trace.front());
  }
}

TEST_CASE("curvature information pays off on the max-min objective") {
  // Iterations needed to reach 99% of the BFGS gain; steepest ascent that
  // stalls first (line-search failure on the nonsmooth ridge) counts as
  // needing more.
  auto cfg = instance_config(12, 0.5, 85);
  OptimizerOptions opts;
  opts.max_iterations = 400;
  int sa_needs_at_least_as_many = 0;
  const int trials = 50;
  auto first_reaching = [](const std::vector<double>& trace, double level) {
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (trace[i] >= level) {
        return static_cast<int>(i);
      }
    }
    return std::numeric_limits<int>::max();
  };
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto real = sample_channels(cfg, t);
    const Objective obj = [&](const PhaseVector& th) {
      return min_singular_of(assemble_effective(real, th, cfg.alpha));
    };
    const ObjectiveGradient grad = [&](const PhaseVector& th) {
      return min_singular_grad(real, th, cfg.alpha);
    };
    const PhaseVector theta0 =
        random_phases(cfg.seed, stream_tag::theta_init, stream_id(2, t, 0), 12);
    const auto bfgs = bfgs_maximize(obj, grad, theta0, opts);
    const auto sa = steepest_ascent(obj, grad, theta0, opts);
    const double level =
        bfgs.objective_trace.front() +
        0.99 * (bfgs.objective_trace.back() - bfgs.objective_trace.front());
    if (first_reaching(sa.objective_trace, level) >=
        first_reaching(bfgs.objective_trace, level)) {
      ++sa_needs_at_least_as_many;
    }
  }
  CHECK(sa_needs_at_least_as_many >= 40);  // >= 80% of trials
}

TEST_CASE("restarts keep the best result") {
  const auto cfg = instance_config(16, 0.5, 84);
  const auto real = sample_channels(cfg, 4);
  OptimizerOptions opts;
  opts.restarts = 2;
  const auto multi = optimize_phases(Criterion::min_singular, real, cfg, opts, 0);
  OptimizerOptions single_opts;
  double best = -1.0;
  for (int r = 0; r <= 2; ++r) {
    // Restart r of the multi-run uses the same seeded start as a single run
    // would; the multi-run result must equal the best of them.
    OptimizerOptions o = single_opts;
    const PhaseVector theta0 = random_phases(
        cfg.seed, stream_tag::theta_init,
        stream_id(static_cast<std::uint64_t>(Criterion::min_singular) + 1, 0,
                  static_cast<std::uint64_t>(r)),
        16);
    const Objective obj = [&](const PhaseVector& th) {
      return min_singular_of(assemble_effective(real, th, cfg.alpha));
    };
    const ObjectiveGradient grad = [&](const PhaseVector& th) {
      return min_singular_grad(real, th, cfg.alpha);
    };
    best = std::max(best, bfgs_maximize(obj, grad, theta0, o).objective_trace.back());
  }
  CHECK(multi.objective_trace.back() == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("invalid options are rejected") {
  OptimizerOptions opts;
  opts.wolfe_c1 = 0.95;  // c1 >= c2
  CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
  opts = {};
  opts.max_iterations = 0;
  CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
}
