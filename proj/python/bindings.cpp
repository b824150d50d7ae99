#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rismux/channel.hpp"
#include "rismux/experiment.hpp"
#include "rismux/io.hpp"
#include "rismux/optim.hpp"
#include "rismux/receivers.hpp"
#include "rismux/spectral.hpp"

namespace py = pybind11;
using namespace rismux;

PYBIND11_MODULE(_core, m) {
  m.doc() = "RIS phase-shift optimization for multi-user MIMO spatial multiplexing";
  m.attr("__version__") = kToolVersion;

  py::enum_<Criterion>(m, "Criterion")
      .value("effective_rank", Criterion::effective_rank)
      .value("min_singular", Criterion::min_singular)
      .value("random_phase", Criterion::random_phase)
      .value("no_ris", Criterion::no_ris);

  py::enum_<Receiver>(m, "Receiver")
      .value("mmse", Receiver::mmse)
      .value("mf", Receiver::mf)
      .value("joint", Receiver::joint);

  py::enum_<SweepAxis>(m, "SweepAxis")
      .value("snr_db", SweepAxis::snr_db)
      .value("ris_elements", SweepAxis::ris_elements)
      .value("alpha", SweepAxis::alpha);

  py::enum_<Termination>(m, "Termination")
      .value("converged", Termination::converged)
      .value("max_iterations", Termination::max_iterations)
      .value("line_search_failure", Termination::line_search_failure);

  py::enum_<TrialTermination>(m, "TrialTermination")
      .value("not_optimized", TrialTermination::not_optimized)
      .value("converged", TrialTermination::converged)
      .value("max_iterations", TrialTermination::max_iterations)
      .value("line_search_failure", TrialTermination::line_search_failure);

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init<>())
      .def_readwrite("num_antennas", &SystemConfig::num_antennas)
      .def_readwrite("num_users", &SystemConfig::num_users)
      .def_readwrite("num_elements", &SystemConfig::num_elements)
      .def_readwrite("alpha", &SystemConfig::alpha)
      .def_readwrite("noise_var", &SystemConfig::noise_var)
      .def_readwrite("seed", &SystemConfig::seed)
      .def("validate", &SystemConfig::validate);

  py::class_<ChannelRealization>(m, "ChannelRealization")
      .def(py::init<>())
      .def_readwrite("direct", &ChannelRealization::direct)
      .def_readwrite("ris_to_bs", &ChannelRealization::ris_to_bs)
      .def_readwrite("users_to_ris", &ChannelRealization::users_to_ris)
      .def("validate", &ChannelRealization::validate);

  py::class_<SvdResult>(m, "SvdResult")
      .def_readonly("left", &SvdResult::left)
      .def_readonly("values", &SvdResult::values)
      .def_readonly("right", &SvdResult::right);

  py::class_<OptimizerOptions>(m, "OptimizerOptions")
      .def(py::init<>())
      .def_readwrite("max_iterations", &OptimizerOptions::max_iterations)
      .def_readwrite("grad_tolerance", &OptimizerOptions::grad_tolerance)
      .def_readwrite("wolfe_c1", &OptimizerOptions::wolfe_c1)
      .def_readwrite("wolfe_c2", &OptimizerOptions::wolfe_c2)
      .def_readwrite("max_line_search_steps", &OptimizerOptions::max_line_search_steps)
      .def_readwrite("restarts", &OptimizerOptions::restarts)
      .def_readwrite("debug_checks", &OptimizerOptions::debug_checks);

  py::class_<OptimizationReport>(m, "OptimizationReport")
      .def_readonly("theta_star", &OptimizationReport::theta_star)
      .def_readonly("objective_trace", &OptimizationReport::objective_trace)
      .def_readonly("final_gradient_norm", &OptimizationReport::final_gradient_norm)
      .def_readonly("iterations", &OptimizationReport::iterations)
      .def_readonly("termination", &OptimizationReport::termination)
      .def_readonly("wall_time_s", &OptimizationReport::wall_time_s)
      .def_readonly("degenerate_iterates", &OptimizationReport::degenerate_iterates);

  py::class_<TrialRecord>(m, "TrialRecord")
      .def_readonly("trial_index", &TrialRecord::trial_index)
      .def_readonly("criterion", &TrialRecord::criterion)
      .def_readonly("snr_db", &TrialRecord::snr_db)
      .def_readonly("num_elements", &TrialRecord::num_elements)
      .def_readonly("alpha", &TrialRecord::alpha)
      .def_readonly("rates", &TrialRecord::rates)
      .def_readonly("effective_rank_final", &TrialRecord::effective_rank_final)
      .def_readonly("lambda_min_final", &TrialRecord::lambda_min_final)
      .def_readonly("gram_offdiag", &TrialRecord::gram_offdiag)
      .def_readonly("optimizer_iterations", &TrialRecord::optimizer_iterations)
      .def_readonly("termination", &TrialRecord::termination);

  py::class_<SweepSpec>(m, "SweepSpec")
      .def(py::init<>())
      .def_readwrite("base", &SweepSpec::base)
      .def_readwrite("criteria", &SweepSpec::criteria)
      .def_readwrite("receivers", &SweepSpec::receivers)
      .def_readwrite("axis", &SweepSpec::axis)
      .def_readwrite("axis_values", &SweepSpec::axis_values)
      .def_readwrite("trials_per_point", &SweepSpec::trials_per_point)
      .def_readwrite("seed", &SweepSpec::seed)
      .def_readwrite("optimizer", &SweepSpec::optimizer)
      .def("validate", &SweepSpec::validate);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("axis_value", &SweepRow::axis_value)
      .def_readonly("criterion", &SweepRow::criterion)
      .def_readonly("receiver", &SweepRow::receiver)
      .def_readonly("mean_rate", &SweepRow::mean_rate)
      .def_readonly("std_error", &SweepRow::std_error)
      .def_readonly("trials", &SweepRow::trials);

  py::class_<SweepTable>(m, "SweepTable").def_readonly("rows", &SweepTable::rows);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("table", &SweepResult::table)
      .def_readonly("records", &SweepResult::records);

  py::class_<GradientSelftest>(m, "GradientSelftest")
      .def_readonly("pass_", &GradientSelftest::pass)
      .def_readonly("instances", &GradientSelftest::instances)
      .def_readonly("worst_effective_rank_err", &GradientSelftest::worst_effective_rank_err)
      .def_readonly("worst_min_singular_err", &GradientSelftest::worst_min_singular_err)
      .def_readonly("tie_skipped", &GradientSelftest::tie_skipped)
      .def_readonly("tolerance", &GradientSelftest::tolerance);

  m.def("sample_channels", &sample_channels, py::arg("config"), py::arg("trial_index"));
  m.def("assemble_effective", &assemble_effective, py::arg("realization"), py::arg("theta"),
        py::arg("alpha"));
  m.def("channel_partial", &channel_partial, py::arg("realization"), py::arg("theta"),
        py::arg("ell"), py::arg("alpha"));
  m.def("random_phases", &random_phases, py::arg("key"), py::arg("tag"), py::arg("salt"),
        py::arg("count"));

  m.def("svd_thin", &svd_thin, py::arg("h"));
  m.def("effective_rank", &effective_rank, py::arg("singular_values"));
  m.def("effective_rank_partial_lambda", &effective_rank_partial_lambda,
        py::arg("singular_values"), py::arg("k"));
  m.def("gram_offdiag_ratio", &gram_offdiag_ratio, py::arg("h"));
  m.def("effective_rank_grad", &effective_rank_grad, py::arg("realization"), py::arg("theta"),
        py::arg("alpha"));
  m.def(
      "min_singular_grad",
      [](const ChannelRealization& real, const PhaseVector& theta, double alpha) {
        return min_singular_grad(real, theta, alpha);
      },
      py::arg("realization"), py::arg("theta"), py::arg("alpha"));
  m.def("effective_rank_of", &effective_rank_of, py::arg("h"));
  m.def("min_singular_of", &min_singular_of, py::arg("h"));

  m.def("mmse_weights", &mmse_weights, py::arg("h"), py::arg("noise_var"));
  m.def("mf_weights", &mf_weights, py::arg("h"));
  m.def("effective_noise", &effective_noise, py::arg("h"), py::arg("noise_var"));
  m.def("post_sinr", &post_sinr, py::arg("w"), py::arg("h"), py::arg("noise_var"));
  m.def("linear_sum_rate", &linear_sum_rate, py::arg("sinr"));
  m.def("joint_decoding_rate", &joint_decoding_rate, py::arg("h"), py::arg("noise_var"));
  m.def("receiver_sum_rate", &receiver_sum_rate, py::arg("receiver"), py::arg("h"),
        py::arg("noise_var"));

  m.def("bfgs_maximize", &bfgs_maximize, py::arg("objective"), py::arg("gradient"),
        py::arg("theta0"), py::arg("options"));
  m.def("steepest_ascent", &steepest_ascent, py::arg("objective"), py::arg("gradient"),
        py::arg("theta0"), py::arg("options"));
  m.def("optimize_phases", &optimize_phases, py::arg("criterion"), py::arg("realization"),
        py::arg("config"), py::arg("options") = OptimizerOptions{}, py::arg("stream_salt") = 0);

  m.def("run_trial", &run_trial, py::arg("config"), py::arg("criterion"), py::arg("receivers"),
        py::arg("options"), py::arg("trial_index"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "run_sweep",
      [](const SweepSpec& spec, int threads) { return run_sweep(spec, threads); },
      py::arg("spec"), py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
  m.def(
      "run_sweep_detailed",
      [](const SweepSpec& spec, int threads) { return run_sweep_detailed(spec, threads); },
      py::arg("spec"), py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("config_for_point", &config_for_point, py::arg("spec"), py::arg("axis_index"));
  m.def("snr_db_to_noise_var", &snr_db_to_noise_var, py::arg("snr_db"));
  m.def("noise_var_to_snr_db", &noise_var_to_snr_db, py::arg("noise_var"));
  m.def("gradient_selftest", &gradient_selftest, py::arg("config"), py::arg("n_instances"),
        py::arg("seed"), py::arg("corrupt_sign") = false,
        py::call_guard<py::gil_scoped_release>());
}
