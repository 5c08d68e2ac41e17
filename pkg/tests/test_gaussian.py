import math
import warnings

import numpy as np
import pytest

import optomembrane as om
from optomembrane.errors import InvalidStateError

from oracles import random_symplectic, single_mode_rotation


def tms_cm(r):
    """Two-mode squeezed covariance in the vacuum-1/2 convention."""
    c, s = math.cosh(2 * r) / 2, math.sinh(2 * r) / 2
    v = np.zeros((4, 4))
    v[:2, :2] = c * np.eye(2)
    v[2:, 2:] = c * np.eye(2)
    v[:2, 2:] = s * np.diag([1.0, -1.0])
    v[2:, :2] = s * np.diag([1.0, -1.0])
    return v


def test_vacuum_state():
    v = 0.5 * np.eye(4)
    assert om.phonon_number(v) == 0.0
    assert om.symplectic_spectrum(v) == (pytest.approx(0.5), pytest.approx(0.5))
    e_n, eta, _ = om.log_negativity(v)
    assert e_n == 0.0 and eta == pytest.approx(0.5)


def test_thermal_product_state():
    n0 = 17.2
    v = np.diag([n0 + 0.5, n0 + 0.5, 0.5, 0.5])
    assert om.phonon_number(v) == pytest.approx(n0, rel=1e-14)
    nu = om.symplectic_spectrum(v)
    assert nu[0] == pytest.approx(0.5) and nu[1] == pytest.approx(n0 + 0.5)
    assert om.log_negativity(v)[0] == 0.0


@pytest.mark.parametrize("r", [0.0, 0.5, 1.0])
def test_two_mode_squeezed_closed_form(r):
    e_n, eta, sigma = om.log_negativity(tms_cm(r))
    assert abs(e_n - 2 * r) < 1e-10
    assert eta == pytest.approx(math.exp(-2 * r) / 2, rel=1e-10)
    assert sigma == pytest.approx(math.cosh(4 * r) / 2, rel=1e-10)


def test_product_states_with_thermal_blocks_not_entangled():
    rng = np.random.default_rng(5)
    for _ in range(10):
        na, nb = rng.uniform(0, 20, size=2)
        v = np.diag([na + 0.5, na + 0.5, nb + 0.5, nb + 0.5])
        assert om.log_negativity(v)[0] == 0.0


def test_symplectic_construct_and_recover():
    rng = np.random.default_rng(11)
    for _ in range(15):
        nu1, nu2 = sorted(rng.uniform(0.5, 8.0, size=2))
        s = random_symplectic(rng)
        v = s @ np.diag([nu1, nu1, nu2, nu2]) @ s.T
        v = 0.5 * (v + v.T)
        got = om.symplectic_spectrum(v)
        assert got[0] == pytest.approx(nu1, abs=1e-10 * max(1, nu1))
        assert got[1] == pytest.approx(nu2, abs=1e-10 * max(1, nu2))


def test_local_rotation_invariance():
    rng = np.random.default_rng(3)
    v = tms_cm(0.7)
    e0, eta0, sig0 = om.log_negativity(v)
    det0 = np.linalg.det(v)
    for _ in range(8):
        rot = single_mode_rotation(rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi))
        vr = rot @ v @ rot.T
        e, eta, sig = om.log_negativity(vr)
        assert abs(e - e0) < 1e-10
        assert abs(eta - eta0) < 1e-10
        assert abs(sig - sig0) < 1e-10
        assert np.linalg.det(vr) == pytest.approx(det0, rel=1e-10)


def test_log_negativity_continuity_away_from_kink():
    v = tms_cm(0.5)
    e0 = om.log_negativity(v)[0]
    rng = np.random.default_rng(9)
    for _ in range(10):
        pert = rng.normal(scale=1e-8, size=(4, 4))
        pert = 0.5 * (pert + pert.T)
        e1 = om.log_negativity(v + pert)[0]
        assert abs(e1 - e0) <= 1e-6


def test_entanglement_never_grows_with_bath_occupancy():
    values = []
    for n0 in (0.0, 0.5, 2.0, 10.0, 50.0, 200.0):
        m = om.LinearizedModel.from_rates(
            1.0, 1e-4, 1.0, 1.0, 0.4, 0.1, 0.7, 0.05, n0)
        cov = om.solve_lyapunov(m)
        values.append(om.log_negativity(cov.v)[0])
    assert values[0] > 0  # the low-occupancy end is actually entangled
    assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))


def test_phonon_number_clamps_with_warning():
    v = np.diag([0.5, 0.5 - 5e-9, 0.5, 0.5])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        # within the documented slack: clamp silently
        v_ok = np.diag([0.5, 0.5 - 5e-10, 0.5, 0.5])
        assert om.phonon_number(v_ok) == 0.0
    with pytest.warns(UserWarning, match="clamped"):
        assert om.phonon_number(v) == 0.0


def test_contract_violations_raise():
    bad = np.eye(4)
    bad[0, 1] = 0.3  # asymmetric
    with pytest.raises(InvalidStateError):
        om.symplectic_spectrum(bad)
    with pytest.raises(InvalidStateError):
        om.log_negativity(np.diag([1.0, 1.0, 1.0, -1.0]))
    with pytest.raises(InvalidStateError):
        om.phonon_number(np.eye(3))


def test_state_metrics_bundle():
    n0, nb = 4.0, 1.0
    omega_m = 2 * np.pi * 1e7
    v = np.diag([n0 + 0.5, n0 + 0.5, nb + 0.5, nb + 0.5])
    met = om.state_metrics(v, omega_m)
    assert met.n == pytest.approx(n0, rel=1e-12)
    assert met.e_n == 0.0
    assert met.eta_minus == pytest.approx(nb + 0.5, rel=1e-12)
    assert met.raw_log_neg == pytest.approx(-math.log(2 * nb + 1), rel=1e-12)
    assert met.raw_log_neg < 0  # diagnostic distance to the entanglement kink
    assert met.mean_energy == pytest.approx(
        1.0545718176461565e-34 * omega_m * (n0 + 0.5), rel=1e-9)
    assert met.det_vc == 0.0
