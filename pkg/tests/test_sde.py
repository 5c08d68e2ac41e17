import numpy as np
import pytest

import optomembrane as om
from optomembrane.errors import InvalidStateError, StabilityError
from optomembrane.sde import TrajectoryConfig


def fast_model(**over):
    vals = dict(omega_m=1.0, gamma_m=0.4, omega_eff=1.1, delta=0.9,
                kappa_T=1.0, kappa1=0.3, g_coupling=0.45, dk1_alpha=0.1, n0=2.0)
    vals.update(over)
    return om.LinearizedModel.from_rates(**vals)


def test_noise_factor_roundtrip():
    m = fast_model()
    b = om.noise_factor(m.d)
    assert np.max(np.abs(b @ b.T - m.d)) < 1e-12


def test_noise_factor_rejects_indefinite():
    d = np.diag([1.0, -0.5, 1.0, 1.0])
    with pytest.raises(InvalidStateError):
        om.noise_factor(d)


def test_config_validation():
    with pytest.raises(ValueError):
        TrajectoryConfig(dt=-1.0, burn_in=1.0, sample_time=1.0, n_traj=4, seed=0)
    with pytest.raises(ValueError):
        TrajectoryConfig(dt=0.1, burn_in=1.0, sample_time=1.0, n_traj=0, seed=0)


def test_refuses_unstable_model():
    m = fast_model(gamma_m=1e-4, delta=-1.0, kappa_T=0.15, kappa1=0.0,
                   dk1_alpha=0.0, g_coupling=0.6)
    assert not om.is_stable(m)[0]
    cfg = TrajectoryConfig(dt=0.01, burn_in=1.0, sample_time=1.0, n_traj=4, seed=0)
    with pytest.raises(StabilityError):
        om.simulate_cm(m, cfg)
    with pytest.raises(StabilityError):
        TrajectoryConfig.for_model(m)


def test_rejects_oversized_time_step():
    m = fast_model()
    cfg = TrajectoryConfig(dt=0.1, burn_in=1.0, sample_time=1.0, n_traj=4, seed=0)
    with pytest.raises(ValueError, match="dt too large"):
        om.simulate_cm(m, cfg)


def test_vacuum_limit_within_errors():
    # G = 0, no absorption, zero-temperature bath, no frequency pull:
    # stationary state is vacuum in the cavity and mechanical ground state
    m = fast_model(g_coupling=0.0, kappa1=0.0, dk1_alpha=0.0, n0=0.0,
                   omega_eff=1.0)
    cfg = TrajectoryConfig.for_model(m, dt_factor=0.002, n_traj=600, seed=21)
    est = om.simulate_cm(m, cfg)
    target = 0.5 * np.eye(4)
    assert np.all(np.abs(est.v_hat - target) <= 3 * est.std_err)


def test_matches_lyapunov_within_errors():
    m = fast_model()
    cov = om.solve_lyapunov(m)
    cfg = TrajectoryConfig.for_model(m, dt_factor=0.001, n_traj=1500, seed=5)
    est = om.simulate_cm(m, cfg)
    assert np.all(np.abs(est.v_hat - cov.v) <= 3 * est.std_err)
    assert np.all(est.std_err > 0)


def test_bit_reproducible_and_seed_sensitive():
    m = fast_model()
    cfg = TrajectoryConfig(dt=0.01, burn_in=20.0, sample_time=20.0, n_traj=64, seed=9)
    a = om.simulate_cm(m, cfg)
    b = om.simulate_cm(m, cfg)
    assert np.array_equal(a.v_hat, b.v_hat)
    assert np.array_equal(a.std_err, b.std_err)
    cfg2 = TrajectoryConfig(dt=0.01, burn_in=20.0, sample_time=20.0, n_traj=64, seed=10)
    c = om.simulate_cm(m, cfg2)
    assert not np.array_equal(a.v_hat, c.v_hat)


def test_single_trajectory_time_batches():
    m = fast_model()
    cfg = TrajectoryConfig(dt=0.01, burn_in=20.0, sample_time=400.0, n_traj=1, seed=2)
    est = om.simulate_cm(m, cfg)
    assert est.n_batches == 8
    assert np.all(est.std_err > 0)


def test_halving_dt_shrinks_bias():
    # weak order 1: the stationary-covariance bias is ~ linear in dt
    m = fast_model()
    v_exact = om.solve_lyapunov(m).v
    errs = {dt: [] for dt in (0.03, 0.015)}
    for seed in (1, 2, 3):
        for dt in errs:
            cfg = TrajectoryConfig(dt=dt, burn_in=30.0, sample_time=250.0,
                                   n_traj=800, seed=seed)
            est = om.simulate_cm(m, cfg)
            errs[dt].append(np.linalg.norm(est.v_hat - v_exact))
    assert np.mean(errs[0.015]) < np.mean(errs[0.03])


def test_standard_errors_scale_with_trajectories():
    m = fast_model()
    scales = []
    for n in (200, 400, 800):
        cfg = TrajectoryConfig(dt=0.01, burn_in=20.0, sample_time=40.0,
                               n_traj=n, seed=4)
        est = om.simulate_cm(m, cfg)
        scales.append(np.linalg.norm(est.std_err))
    for a, b in zip(scales, scales[1:]):
        assert abs(b / a * np.sqrt(2) - 1) < 0.2
