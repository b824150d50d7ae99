#include "rismux/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "rismux/channel.hpp"
#include "rismux/rng.hpp"
#include "rismux/spectral.hpp"

namespace rismux {

void SweepSpec::validate() const {
  base.validate();
  optimizer.validate();
  if (criteria.empty() || receivers.empty()) {
    throw std::invalid_argument("SweepSpec: criteria and receivers must be nonempty");
  }
  if (axis_values.empty()) {
    throw std::invalid_argument("SweepSpec: axis values must be nonempty");
  }
  for (std::size_t i = 1; i < axis_values.size(); ++i) {
    if (!(axis_values[i] > axis_values[i - 1])) {
      throw std::invalid_argument("SweepSpec: axis values must be strictly increasing");
    }
  }
  if (trials_per_point < 1) {
    throw std::invalid_argument("SweepSpec: trials_per_point must be >= 1");
  }
  if (axis == SweepAxis::ris_elements) {
    for (double v : axis_values) {
      if (v < 1.0 || v != std::floor(v)) {
        throw std::invalid_argument("SweepSpec: L axis values must be positive integers");
      }
    }
  }
  if (axis == SweepAxis::alpha) {
    for (double v : axis_values) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("SweepSpec: alpha axis values must be in [0, 1]");
      }
    }
  }
}

double snr_db_to_noise_var(double snr_db) {
  return std::pow(10.0, -snr_db / 10.0);
}

double noise_var_to_snr_db(double noise_var) {
  return -10.0 * std::log10(noise_var);
}

SystemConfig config_for_point(const SweepSpec& spec, std::size_t axis_index) {
  if (axis_index >= spec.axis_values.size()) {
    throw std::out_of_range("config_for_point: axis index out of range");
  }
  SystemConfig cfg = spec.base;
  const double value = spec.axis_values[axis_index];
  switch (spec.axis) {
    case SweepAxis::snr_db:
      cfg.noise_var = snr_db_to_noise_var(value);
      break;
    case SweepAxis::ris_elements:
      cfg.num_elements = static_cast<int>(value);
      break;
    case SweepAxis::alpha:
      cfg.alpha = value;
      break;
  }
  cfg.seed = stream_id(spec.seed, stream_tag::sweep_point, static_cast<std::uint64_t>(axis_index));
  return cfg;
}

namespace {

TrialTermination to_trial_termination(Termination t) {
  switch (t) {
    case Termination::converged:
      return TrialTermination::converged;
    case Termination::max_iterations:
      return TrialTermination::max_iterations;
    case Termination::line_search_failure:
      return TrialTermination::line_search_failure;
  }
  return TrialTermination::not_optimized;
}

}  // namespace

TrialRecord run_trial(const SystemConfig& config, Criterion criterion,
                      const std::vector<Receiver>& receivers, const OptimizerOptions& opts,
                      std::uint64_t trial_index) {
  config.validate();

  TrialRecord rec;
  rec.trial_index = trial_index;
  rec.criterion = criterion;
  rec.snr_db = noise_var_to_snr_db(config.noise_var);
  rec.num_elements = config.num_elements;
  rec.alpha = criterion == Criterion::no_ris ? 0.0 : config.alpha;

  const ChannelRealization real = sample_channels(config, trial_index);

  ComplexMatrix h_eff;
  switch (criterion) {
    case Criterion::no_ris:
      h_eff = real.direct;
      break;
    case Criterion::random_phase: {
      const PhaseVector theta =
          random_phases(config.seed, stream_tag::random_phase, trial_index, config.num_elements);
      h_eff = assemble_effective(real, theta, config.alpha);
      break;
    }
    case Criterion::effective_rank:
    case Criterion::min_singular: {
      const OptimizationReport report =
          optimize_phases(criterion, real, config, opts, trial_index);
      h_eff = assemble_effective(real, report.theta_star, config.alpha);
      rec.optimizer_iterations = report.iterations;
      rec.termination = to_trial_termination(report.termination);
      break;
    }
  }

  const SvdResult svd = svd_thin(h_eff);
  rec.effective_rank_final = effective_rank(svd.values);
  rec.lambda_min_final = svd.values(svd.values.size() - 1);
  rec.gram_offdiag = gram_offdiag_ratio(h_eff);
  for (const Receiver r : receivers) {
    rec.rates[r] = receiver_sum_rate(r, h_eff, config.noise_var);
  }

  // Receiver ordering must hold on every record (rates are comparable only
  // when both sides were requested).
  const auto it_mmse = rec.rates.find(Receiver::mmse);
  const auto it_mf = rec.rates.find(Receiver::mf);
  const auto it_joint = rec.rates.find(Receiver::joint);
  if (it_mmse != rec.rates.end() && it_mf != rec.rates.end() &&
      it_mmse->second < it_mf->second - 1e-9) {
    throw std::logic_error("TrialRecord invariant violated: MMSE rate below MF rate");
  }
  if (it_mmse != rec.rates.end() && it_joint != rec.rates.end() &&
      it_joint->second < it_mmse->second - 1e-9) {
    throw std::logic_error("TrialRecord invariant violated: joint rate below MMSE rate");
  }
  return rec;
}

namespace {

struct CellStats {
  double mean = 0.0;
  double std_error = 0.0;
};

// Fixed-order two-pass aggregation so the result is schedule independent.
CellStats aggregate(const std::vector<double>& samples) {
  CellStats out;
  const auto n = samples.size();
  double sum = 0.0;
  for (double v : samples) {
    sum += v;
  }
  out.mean = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double v : samples) {
      ss += (v - out.mean) * (v - out.mean);
    }
    out.std_error = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
  }
  return out;
}

}  // namespace

SweepResult run_sweep_detailed(const SweepSpec& spec, int threads, const ProgressFn& progress) {
  spec.validate();
  const std::size_t n_points = spec.axis_values.size();
  const std::size_t n_criteria = spec.criteria.size();
  const auto n_trials = static_cast<std::size_t>(spec.trials_per_point);
  const std::size_t total = n_points * n_criteria * n_trials;

  std::vector<TrialRecord> records(total);
  std::vector<char> done(total, 0);
  std::vector<SystemConfig> point_configs(n_points);
  for (std::size_t p = 0; p < n_points; ++p) {
    point_configs[p] = config_for_point(spec, p);
  }

  std::atomic<std::size_t> next_task{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex mutex;  // guards first_error and progress callbacks

  auto worker = [&]() {
    while (true) {
      const std::size_t task = next_task.fetch_add(1);
      if (task >= total || failed.load()) {
        return;
      }
      const std::size_t point = task / (n_criteria * n_trials);
      const std::size_t crit = (task / n_trials) % n_criteria;
      const std::uint64_t trial = task % n_trials;
      try {
        records[task] = run_trial(point_configs[point], spec.criteria[crit], spec.receivers,
                                  spec.optimizer, trial);
        done[task] = 1;
        if (progress) {
          std::lock_guard lock(mutex);
          progress({SweepProgress::Kind::trial_done, point, spec.criteria[crit], trial});
        }
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!first_error) {
          first_error = std::current_exception();
        }
        failed.store(true);
        return;
      }
    }
  };

  const int worker_count = std::max(1, std::min<int>(threads, static_cast<int>(total)));
  if (worker_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (int i = 0; i < worker_count; ++i) {
      pool.emplace_back(worker);
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  // Build the table over completed cells; everything when no error occurred.
  SweepResult result;
  result.records.reserve(total);
  std::vector<double> samples(n_trials);
  for (std::size_t p = 0; p < n_points; ++p) {
    for (std::size_t c = 0; c < n_criteria; ++c) {
      const std::size_t base = (p * n_criteria + c) * n_trials;
      const bool cell_done =
          std::all_of(done.begin() + base, done.begin() + base + n_trials,
                      [](char f) { return f != 0; });
      if (!cell_done) {
        continue;
      }
      for (std::size_t t = 0; t < n_trials; ++t) {
        result.records.push_back(records[base + t]);
      }
      for (const Receiver r : spec.receivers) {
        for (std::size_t t = 0; t < n_trials; ++t) {
          samples[t] = records[base + t].rates.at(r);
        }
        const CellStats stats = aggregate(samples);
        result.table.rows.push_back({spec.axis_values[p], spec.criteria[c], r, stats.mean,
                                     stats.std_error, spec.trials_per_point});
      }
      if (progress && !failed.load()) {
        progress({SweepProgress::Kind::point_done, p, spec.criteria[c], 0});
      }
    }
  }

  if (first_error) {
    std::string reason = "sweep aborted";
    try {
      std::rethrow_exception(first_error);
    } catch (const std::exception& e) {
      reason = std::string("sweep aborted: ") + e.what();
    } catch (...) {
    }
    throw SweepAborted(reason, std::move(result));
  }
  return result;
}

SweepTable run_sweep(const SweepSpec& spec, int threads, const ProgressFn& progress) {
  return run_sweep_detailed(spec, threads, progress).table;
}

const char* criterion_name(Criterion c) {
  switch (c) {
    case Criterion::effective_rank:
      return "er";
    case Criterion::min_singular:
      return "msv";
    case Criterion::random_phase:
      return "random";
    case Criterion::no_ris:
      return "none";
  }
  return "?";
}

const char* receiver_name(Receiver r) {
  switch (r) {
    case Receiver::mmse:
      return "mmse";
    case Receiver::mf:
      return "mf";
    case Receiver::joint:
      return "joint";
  }
  return "?";
}

const char* axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::snr_db:
      return "snr_db";
    case SweepAxis::ris_elements:
      return "L";
    case SweepAxis::alpha:
      return "alpha";
  }
  return "?";
}

const char* termination_name(TrialTermination t) {
  switch (t) {
    case TrialTermination::not_optimized:
      return "not_optimized";
    case TrialTermination::converged:
      return "converged";
    case TrialTermination::max_iterations:
      return "max_iterations";
    case TrialTermination::line_search_failure:
      return "line_search_failure";
  }
  return "?";
}

}  // namespace rismux
