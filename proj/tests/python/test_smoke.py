"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import rismux


def make_config(elements=16, alpha=0.5, seed=42):
    cfg = rismux.SystemConfig()
    cfg.num_antennas = 4
    cfg.num_users = 4
    cfg.num_elements = elements
    cfg.alpha = alpha
    cfg.noise_var = 0.1
    cfg.seed = seed
    return cfg


def test_channel_shapes_and_determinism():
    cfg = make_config()
    real = rismux.sample_channels(cfg, 3)
    assert real.direct.shape == (4, 4)
    assert real.ris_to_bs.shape == (4, 16)
    assert real.users_to_ris.shape == (16, 4)

    again = rismux.sample_channels(cfg, 3)
    np.testing.assert_array_equal(real.direct, again.direct)
    other = rismux.sample_channels(cfg, 4)
    assert not np.array_equal(real.direct, other.direct)


def test_assembly_matches_numpy_formula():
    cfg = make_config()
    real = rismux.sample_channels(cfg, 0)
    theta = np.linspace(0.0, 2.0, cfg.num_elements)
    h = rismux.assemble_effective(real, theta, cfg.alpha)
    expected = math.sqrt(1 - cfg.alpha) * real.direct + (
        math.sqrt(cfg.alpha) / math.sqrt(cfg.num_elements)
    ) * real.ris_to_bs @ np.diag(np.exp(1j * theta)) @ real.users_to_ris
    np.testing.assert_allclose(h, expected, rtol=1e-12)


def test_svd_and_effective_rank():
    cfg = make_config()
    h = rismux.assemble_effective(
        rismux.sample_channels(cfg, 1), np.zeros(cfg.num_elements), cfg.alpha
    )
    svd = rismux.svd_thin(h)
    np.testing.assert_allclose(
        svd.left @ np.diag(svd.values) @ svd.right.conj().T, h, atol=1e-10
    )
    xi = rismux.effective_rank(svd.values)
    assert 1.0 <= xi <= 4.0
    assert rismux.effective_rank(np.ones(4)) == pytest.approx(4.0)


def test_gradient_matches_finite_differences():
    cfg = make_config(elements=8)
    real = rismux.sample_channels(cfg, 2)
    theta = rismux.random_phases(cfg.seed, 5, 2, cfg.num_elements)
    grad = rismux.effective_rank_grad(real, theta, cfg.alpha)
    h = 1e-6
    for ell in range(cfg.num_elements):
        tp, tm = theta.copy(), theta.copy()
        tp[ell] += h
        tm[ell] -= h
        fd = (
            rismux.effective_rank_of(rismux.assemble_effective(real, tp, cfg.alpha))
            - rismux.effective_rank_of(rismux.assemble_effective(real, tm, cfg.alpha))
        ) / (2 * h)
        assert grad[ell] == pytest.approx(fd, abs=1e-6)


def test_optimize_phases_improves_and_orthogonalizes():
    cfg = make_config(elements=64)
    real = rismux.sample_channels(cfg, 0)
    report = rismux.optimize_phases(rismux.Criterion.effective_rank, real, cfg)
    trace = report.objective_trace
    assert trace[-1] >= trace[0]
    assert all(b >= a for a, b in zip(trace, trace[1:]))
    assert trace[-1] > 3.9

    h = rismux.assemble_effective(real, report.theta_star, cfg.alpha)
    assert rismux.gram_offdiag_ratio(h) < 1e-2


def test_receiver_ordering():
    cfg = make_config()
    h = rismux.sample_channels(cfg, 9).direct
    r_mf = rismux.receiver_sum_rate(rismux.Receiver.mf, h, 0.1)
    r_mmse = rismux.receiver_sum_rate(rismux.Receiver.mmse, h, 0.1)
    r_joint = rismux.receiver_sum_rate(rismux.Receiver.joint, h, 0.1)
    assert r_joint >= r_mmse >= r_mf


def test_bfgs_with_python_callbacks():
    center = np.array([1.0, -2.0, 0.5])
    opts = rismux.OptimizerOptions()
    report = rismux.bfgs_maximize(
        lambda x: -float(np.sum((x - center) ** 2)),
        lambda x: -2.0 * (x - center),
        np.zeros(3),
        opts,
    )
    np.testing.assert_allclose(report.theta_star, center, atol=1e-6)
    assert report.termination == rismux.Termination.converged


def test_small_sweep_round_trip():
    spec = rismux.SweepSpec()
    spec.base = make_config(elements=8)
    spec.criteria = [rismux.Criterion.effective_rank, rismux.Criterion.no_ris]
    spec.receivers = [rismux.Receiver.mmse, rismux.Receiver.mf]
    spec.axis = rismux.SweepAxis.snr_db
    spec.axis_values = [0.0, 10.0]
    spec.trials_per_point = 3
    spec.seed = 11

    table = rismux.run_sweep(spec, 2)
    assert len(table.rows) == 2 * 2 * 2
    for row in table.rows:
        assert row.trials == 3
        assert math.isfinite(row.mean_rate)

    detailed = rismux.run_sweep_detailed(spec)
    for rec in detailed.records:
        assert rec.rates[rismux.Receiver.mmse] >= rec.rates[rismux.Receiver.mf] - 1e-9


def test_gradient_selftest_binding():
    report = rismux.gradient_selftest(make_config(), 6, 1)
    assert report.pass_
    assert report.worst_effective_rank_err < 1e-6


def test_invalid_config_raises():
    cfg = make_config()
    cfg.num_users = 8  # K > M
    with pytest.raises(ValueError):
        rismux.sample_channels(cfg, 0)
