#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rismux/optim.hpp"
#include "rismux/receivers.hpp"
#include "rismux/types.hpp"

namespace rismux {

enum class TrialTermination { not_optimized, converged, max_iterations, line_search_failure };

// Everything measured for one channel realization.
struct TrialRecord {
  std::uint64_t trial_index = 0;
  Criterion criterion = Criterion::no_ris;
  double snr_db = 0.0;
  int num_elements = 0;
  double alpha = 0.0;
  std::map<Receiver, double> rates;  // bits per channel use
  double effective_rank_final = 0.0;
  double lambda_min_final = 0.0;
  double gram_offdiag = 0.0;
  int optimizer_iterations = 0;
  TrialTermination termination = TrialTermination::not_optimized;
};

enum class SweepAxis { snr_db, ris_elements, alpha };

struct SweepSpec {
  SystemConfig base;
  std::vector<Criterion> criteria;
  std::vector<Receiver> receivers;
  SweepAxis axis = SweepAxis::snr_db;
  std::vector<double> axis_values;  // nonempty, strictly increasing
  int trials_per_point = 200;
  std::uint64_t seed = 0;  // master seed; overrides base.seed
  OptimizerOptions optimizer;

  void validate() const;
};

struct SweepRow {
  double axis_value = 0.0;
  Criterion criterion = Criterion::no_ris;
  Receiver receiver = Receiver::mmse;
  double mean_rate = 0.0;
  double std_error = 0.0;  // sample stddev / sqrt(trials)
  int trials = 0;
};

struct SweepTable {
  std::vector<SweepRow> rows;  // complete grid: axis value x criterion x receiver
};

struct SweepResult {
  SweepTable table;
  // Per-trial records in (axis, criterion, trial) order, independent of the
  // execution schedule.
  std::vector<TrialRecord> records;
};

struct SweepProgress {
  enum class Kind { trial_done, point_done };
  Kind kind = Kind::trial_done;
  std::size_t axis_index = 0;
  Criterion criterion = Criterion::no_ris;
  std::uint64_t trial_index = 0;
};
using ProgressFn = std::function<void(const SweepProgress&)>;

// Thrown when a trial fails structurally mid-sweep; carries whatever completed.
struct SweepAborted : std::runtime_error {
  SweepAborted(const std::string& what, SweepResult partial_result)
      : std::runtime_error(what), partial(std::move(partial_result)) {}
  SweepResult partial;
};

// The per-point config: axis value applied on top of the base, with a seed
// derived from (master seed, axis index). The seed deliberately excludes the
// criterion so baselines share channel draws with optimized trials.
SystemConfig config_for_point(const SweepSpec& spec, std::size_t axis_index);

double snr_db_to_noise_var(double snr_db);
double noise_var_to_snr_db(double noise_var);

// One full pipeline pass: sample -> select phases per criterion -> evaluate
// the requested receivers. Optimizer failures are recorded in the record's
// termination field, never thrown.
TrialRecord run_trial(const SystemConfig& config, Criterion criterion,
                      const std::vector<Receiver>& receivers, const OptimizerOptions& opts,
                      std::uint64_t trial_index);

// Runs trials_per_point trials for every (axis value, criterion) cell and
// aggregates mean/stderr per receiver. Trials may execute on `threads`
// workers; aggregation order is fixed by index, so the output is schedule
// independent.
SweepResult run_sweep_detailed(const SweepSpec& spec, int threads = 1,
                               const ProgressFn& progress = nullptr);
SweepTable run_sweep(const SweepSpec& spec, int threads = 1,
                     const ProgressFn& progress = nullptr);

// Finite-difference validation of the analytic gradients over random
// instances (L cycles through {8, 32}, alpha through {0.1, 0.5, 0.9}).
struct GradientSelftest {
  bool pass = false;
  int instances = 0;
  double worst_effective_rank_err = 0.0;
  double worst_min_singular_err = 0.0;
  int tie_skipped = 0;  // MSV instances excluded for near-equal smallest pair
  double tolerance = 1e-6;
};
GradientSelftest gradient_selftest(const SystemConfig& base, int n_instances, std::uint64_t seed,
                                   bool corrupt_sign = false);

// Named library-level invariant checks for the selftest command.
struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};
std::vector<CheckResult> run_invariant_checks(std::uint64_t seed);

const char* criterion_name(Criterion c);
const char* receiver_name(Receiver r);
const char* axis_name(SweepAxis a);
const char* termination_name(TrialTermination t);

}  // namespace rismux
