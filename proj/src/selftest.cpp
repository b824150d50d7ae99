#include <cmath>
#include <sstream>

#include "rismux/channel.hpp"
#include "rismux/experiment.hpp"
#include "rismux/rng.hpp"
#include "rismux/spectral.hpp"

namespace rismux {

namespace {

constexpr double kFdStep = 1e-6;

double fd_effective_rank(const ChannelRealization& real, PhaseVector theta, double alpha,
                         int ell) {
  theta(ell) += kFdStep;
  const double plus = effective_rank_of(assemble_effective(real, theta, alpha));
  theta(ell) -= 2.0 * kFdStep;
  const double minus = effective_rank_of(assemble_effective(real, theta, alpha));
  return (plus - minus) / (2.0 * kFdStep);
}

double fd_min_singular(const ChannelRealization& real, PhaseVector theta, double alpha, int ell) {
  theta(ell) += kFdStep;
  const double plus = min_singular_of(assemble_effective(real, theta, alpha));
  theta(ell) -= 2.0 * kFdStep;
  const double minus = min_singular_of(assemble_effective(real, theta, alpha));
  return (plus - minus) / (2.0 * kFdStep);
}

}  // namespace

GradientSelftest gradient_selftest(const SystemConfig& base, int n_instances, std::uint64_t seed,
                                   bool corrupt_sign) {
  const int element_counts[] = {8, 32};
  const double alphas[] = {0.1, 0.5, 0.9};

  GradientSelftest out;
  out.instances = n_instances;
  const double sign = corrupt_sign ? -1.0 : 1.0;

  for (int i = 0; i < n_instances; ++i) {
    SystemConfig cfg = base;
    cfg.seed = seed;
    cfg.num_elements = element_counts[i % 2];
    cfg.alpha = alphas[(i / 2) % 3];
    cfg.validate();

    const auto instance = static_cast<std::uint64_t>(i);
    const ChannelRealization real =
        sample_channels(cfg, stream_id(stream_tag::selftest, instance));
    const PhaseVector theta =
        random_phases(cfg.seed, stream_tag::selftest, instance, cfg.num_elements);

    const GradientVector g_er = sign * effective_rank_grad(real, theta, cfg.alpha);
    for (int ell = 0; ell < cfg.num_elements; ++ell) {
      const double err = std::abs(g_er(ell) - fd_effective_rank(real, theta, cfg.alpha, ell));
      out.worst_effective_rank_err = std::max(out.worst_effective_rank_err, err);
    }

    const SvdResult svd = svd_thin(assemble_effective(real, theta, cfg.alpha));
    const auto k = svd.values.size();
    const bool tie = k > 1 && (svd.values(k - 2) - svd.values(k - 1)) < 1e-6 * svd.values(0);
    if (tie) {
      ++out.tie_skipped;
    } else {
      const GradientVector g_msv = sign * min_singular_grad(real, theta, cfg.alpha);
      for (int ell = 0; ell < cfg.num_elements; ++ell) {
        const double err = std::abs(g_msv(ell) - fd_min_singular(real, theta, cfg.alpha, ell));
        out.worst_min_singular_err = std::max(out.worst_min_singular_err, err);
      }
    }
  }

  out.pass = out.worst_effective_rank_err < out.tolerance &&
             out.worst_min_singular_err < out.tolerance;
  return out;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

CheckResult check(const std::string& name, bool pass, const std::string& detail) {
  return {name, pass, detail};
}

}  // namespace

std::vector<CheckResult> run_invariant_checks(std::uint64_t seed) {
  std::vector<CheckResult> checks;
  SystemConfig cfg;
  cfg.num_antennas = 4;
  cfg.num_users = 4;
  cfg.num_elements = 16;
  cfg.alpha = 0.7;
  cfg.noise_var = 0.1;
  cfg.seed = seed;

  // Channel draws are reproducible and distinct across trials.
  {
    const auto a = sample_channels(cfg, 7);
    const auto b = sample_channels(cfg, 7);
    const auto c = sample_channels(cfg, 8);
    const bool same = a.direct == b.direct && a.ris_to_bs == b.ris_to_bs &&
                      a.users_to_ris == b.users_to_ris;
    const bool differs = a.direct != c.direct;
    checks.push_back(check("channel.determinism", same && differs,
                           "identical trial reproduces bitwise, next trial differs"));
  }

  // Unit second moment of CN(0,1) entries.
  {
    double acc = 0.0;
    int count = 0;
    for (std::uint64_t t = 0; t < 20; ++t) {
      const auto real = sample_channels(cfg, t);
      acc += real.ris_to_bs.squaredNorm() + real.users_to_ris.squaredNorm() +
             real.direct.squaredNorm();
      count += static_cast<int>(real.ris_to_bs.size() + real.users_to_ris.size() +
                                real.direct.size());
    }
    const double mean = acc / count;
    checks.push_back(check("channel.second-moment", mean > 0.95 && mean < 1.05,
                           "mean |entry|^2 = " + fmt(mean) + " over " + std::to_string(count) +
                               " samples (want within [0.95, 1.05])"));
  }

  // Random-phase power normalization: E ||H_eff||_F^2 = M*K for any alpha, L.
  {
    double acc = 0.0;
    const int draws = 1000;
    for (int t = 0; t < draws; ++t) {
      const auto real = sample_channels(cfg, static_cast<std::uint64_t>(t));
      const PhaseVector theta = random_phases(cfg.seed, stream_tag::random_phase,
                                              static_cast<std::uint64_t>(t), cfg.num_elements);
      acc += assemble_effective(real, theta, cfg.alpha).squaredNorm();
    }
    const double mean = acc / draws;
    const double expected = cfg.num_antennas * cfg.num_users;
    const bool ok = std::abs(mean - expected) < 0.05 * expected;
    checks.push_back(check("channel.power-normalization", ok,
                           "mean ||H_eff||^2 = " + fmt(mean) + " (want " + fmt(expected) +
                               " within 5%)"));
  }

  // 2*pi periodicity of the assembled channel.
  {
    const auto real = sample_channels(cfg, 3);
    const PhaseVector theta = random_phases(cfg.seed, stream_tag::random_phase, 3,
                                            cfg.num_elements);
    const PhaseVector shifted = theta.array() + 2.0 * M_PI;
    const double diff = (assemble_effective(real, theta, cfg.alpha) -
                         assemble_effective(real, shifted, cfg.alpha))
                            .cwiseAbs()
                            .maxCoeff();
    checks.push_back(
        check("channel.periodicity", diff < 1e-12, "max |delta| = " + fmt(diff)));
  }

  // Rank-1 structure of the channel partials.
  {
    const auto real = sample_channels(cfg, 4);
    const PhaseVector theta = random_phases(cfg.seed, stream_tag::random_phase, 4,
                                            cfg.num_elements);
    bool ok = true;
    for (int ell = 0; ell < cfg.num_elements; ell += 5) {
      const auto svd = svd_thin(channel_partial(real, theta, ell, cfg.alpha));
      ok = ok && svd.values(1) < 1e-12 * svd.values(0);
    }
    checks.push_back(check("channel.partial-rank1", ok, "second singular value < 1e-12 * first"));
  }

  // SVD contract: reconstruction, orthonormal factors, descending spectrum.
  {
    const auto real = sample_channels(cfg, 5);
    const PhaseVector theta = random_phases(cfg.seed, stream_tag::random_phase, 5,
                                            cfg.num_elements);
    const ComplexMatrix h = assemble_effective(real, theta, cfg.alpha);
    const auto svd = svd_thin(h);
    const double recon =
        (h - svd.left * svd.values.asDiagonal() * svd.right.adjoint()).norm() / h.norm();
    const double orth_u =
        (svd.left.adjoint() * svd.left - ComplexMatrix::Identity(4, 4)).norm();
    const double orth_v =
        (svd.right.adjoint() * svd.right - ComplexMatrix::Identity(4, 4)).norm();
    bool sorted = true;
    for (int i = 1; i < svd.values.size(); ++i) {
      sorted = sorted && svd.values(i) <= svd.values(i - 1);
    }
    const bool ok = recon < 1e-10 && orth_u < 1e-10 && orth_v < 1e-10 && sorted;
    checks.push_back(check("spectral.svd-contract", ok,
                           "reconstruction " + fmt(recon) + ", orthonormality " +
                               fmt(std::max(orth_u, orth_v))));
  }

  // Effective rank bounds and scale invariance.
  {
    bool ok = true;
    PhiloxStream rng(seed, stream_id(stream_tag::selftest, 999));
    for (int i = 0; i < 50; ++i) {
      Eigen::VectorXd lambda(4);
      for (int j = 0; j < 4; ++j) {
        lambda(j) = rng.next_unit() + 1e-3;
      }
      std::sort(lambda.data(), lambda.data() + 4, std::greater<>());
      const double xi = effective_rank(lambda);
      ok = ok && xi >= 1.0 && xi <= 4.0 + 1e-12;
      ok = ok && std::abs(effective_rank(3.7 * lambda) - xi) < 1e-12;
    }
    Eigen::VectorXd equal = Eigen::VectorXd::Ones(4);
    Eigen::VectorXd rank1(4);
    rank1 << 5.0, 0.0, 0.0, 0.0;
    ok = ok && std::abs(effective_rank(equal) - 4.0) < 1e-12;
    ok = ok && std::abs(effective_rank(rank1) - 1.0) < 1e-12;
    checks.push_back(check("spectral.effective-rank", ok,
                           "bounds [1, K], scale invariance, equal/rank-1 spectra"));
  }

  // MMSE dominates the matched filter and random linear receivers per user.
  {
    bool ok = true;
    double worst = 0.0;
    PhiloxStream rng(seed, stream_id(stream_tag::selftest, 1000));
    for (int i = 0; i < 50; ++i) {
      const auto real = sample_channels(cfg, 100 + static_cast<std::uint64_t>(i));
      const ComplexMatrix& h = real.direct;
      const auto w_mmse = mmse_weights(h, effective_noise(h, cfg.noise_var));
      const auto s_mmse = post_sinr(w_mmse, h, cfg.noise_var);
      const auto s_mf = post_sinr(mf_weights(h), h, cfg.noise_var);
      for (int k = 0; k < 4; ++k) {
        worst = std::max(worst, s_mf(k) - s_mmse(k));
        ok = ok && s_mmse(k) >= s_mf(k) - 1e-9;
      }
      for (int r = 0; r < 20; ++r) {
        ComplexMatrix w(4, 4);
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) {
            w(a, b) = rng.next_cn01();
          }
        }
        const auto s_rand = post_sinr(w, h, cfg.noise_var);
        for (int k = 0; k < 4; ++k) {
          ok = ok && s_mmse(k) >= s_rand(k) - 1e-9;
        }
      }
    }
    checks.push_back(check("receivers.mmse-optimality", ok,
                           "per-user SINR >= MF and 20 random receivers, worst gap " +
                               fmt(worst)));
  }

  // Rate ordering joint >= mmse >= mf on random channels.
  {
    bool ok = true;
    for (int i = 0; i < 100; ++i) {
      const auto real = sample_channels(cfg, 200 + static_cast<std::uint64_t>(i));
      const ComplexMatrix& h = real.direct;
      const double r_mf = receiver_sum_rate(Receiver::mf, h, cfg.noise_var);
      const double r_mmse = receiver_sum_rate(Receiver::mmse, h, cfg.noise_var);
      const double r_joint = receiver_sum_rate(Receiver::joint, h, cfg.noise_var);
      ok = ok && r_joint >= r_mmse - 1e-9 && r_mmse >= r_mf - 1e-9;
    }
    checks.push_back(check("receivers.rate-ordering", ok, "joint >= mmse >= mf on 100 channels"));
  }

  // Orthogonal channels collapse MMSE onto the matched filter.
  {
    const auto real = sample_channels(cfg, 300);
    const auto qr = real.direct.colPivHouseholderQr();
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(4, 4);
    const auto s_mmse = post_sinr(mmse_weights(q, effective_noise(q, 0.1)), q, 0.1);
    const auto s_mf = post_sinr(mf_weights(q), q, 0.1);
    const double rel = ((s_mmse - s_mf).cwiseAbs().array() / s_mf.array()).maxCoeff();
    checks.push_back(check("receivers.orthogonal-collapse", rel < 1e-6,
                           "max relative SINR gap " + fmt(rel) + " on orthonormal columns"));
  }

  // BFGS sanity on an exact quadratic.
  {
    PhaseVector center(8);
    PhiloxStream rng(seed, stream_id(stream_tag::selftest, 1001));
    for (int i = 0; i < 8; ++i) {
      center(i) = rng.next_uniform(-2.0, 2.0);
    }
    const Objective obj = [&](const PhaseVector& x) { return -(x - center).squaredNorm(); };
    const ObjectiveGradient grad = [&](const PhaseVector& x) -> GradientVector {
      return -2.0 * (x - center);
    };
    OptimizerOptions opts;
    const auto report = bfgs_maximize(obj, grad, PhaseVector::Zero(8), opts);
    const double dist = (report.theta_star - center).norm();
    checks.push_back(check("optim.quadratic", dist < 1e-6 && report.iterations <= 20,
                           "|theta* - c| = " + fmt(dist) + " in " +
                               std::to_string(report.iterations) + " iterations"));
  }

  // Monotone ascent trace on a small effective-rank instance.
  {
    SystemConfig small = cfg;
    small.num_elements = 24;
    const auto real = sample_channels(small, 11);
    OptimizerOptions opts;
    const auto report = optimize_phases(Criterion::effective_rank, real, small, opts);
    bool monotone = true;
    for (std::size_t i = 1; i < report.objective_trace.size(); ++i) {
      monotone = monotone && report.objective_trace[i] >= report.objective_trace[i - 1];
    }
    const bool improved = report.objective_trace.back() >= report.objective_trace.front();
    checks.push_back(check("optim.monotone-trace", monotone && improved,
                           "trace nondecreasing over " +
                               std::to_string(report.objective_trace.size()) + " entries"));
  }

  // Full trials are deterministic.
  {
    OptimizerOptions opts;
    const std::vector<Receiver> rx = {Receiver::mmse, Receiver::mf, Receiver::joint};
    const auto a = run_trial(cfg, Criterion::effective_rank, rx, opts, 5);
    const auto b = run_trial(cfg, Criterion::effective_rank, rx, opts, 5);
    const bool same = a.rates == b.rates &&
                      a.effective_rank_final == b.effective_rank_final &&
                      a.lambda_min_final == b.lambda_min_final &&
                      a.optimizer_iterations == b.optimizer_iterations;
    checks.push_back(check("experiment.trial-determinism", same,
                           "identical inputs reproduce the record exactly"));
  }

  return checks;
}

}  // namespace rismux
