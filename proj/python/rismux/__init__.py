"""RIS phase-shift optimization for multi-user MIMO spatial multiplexing.

Thin python layer over the C++ core: channel sampling, effective-rank and
max-min singular value criteria with analytic gradients, BFGS optimization,
linear receivers, and seeded Monte-Carlo sweeps.
"""

from ._core import (  # noqa: F401
    ChannelRealization,
    Criterion,
    GradientSelftest,
    OptimizationReport,
    OptimizerOptions,
    Receiver,
    SvdResult,
    SweepAxis,
    SweepResult,
    SweepRow,
    SweepSpec,
    SweepTable,
    SystemConfig,
    Termination,
    TrialRecord,
    TrialTermination,
    __version__,
    assemble_effective,
    bfgs_maximize,
    channel_partial,
    config_for_point,
    effective_noise,
    effective_rank,
    effective_rank_grad,
    effective_rank_of,
    effective_rank_partial_lambda,
    gradient_selftest,
    gram_offdiag_ratio,
    joint_decoding_rate,
    linear_sum_rate,
    mf_weights,
    min_singular_grad,
    min_singular_of,
    mmse_weights,
    noise_var_to_snr_db,
    optimize_phases,
    post_sinr,
    random_phases,
    receiver_sum_rate,
    run_sweep,
    run_sweep_detailed,
    run_trial,
    sample_channels,
    snr_db_to_noise_var,
    steepest_ascent,
    svd_thin,
)
