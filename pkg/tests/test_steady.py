import warnings

import numpy as np
import pytest
from scipy.constants import hbar as HBAR

import optomembrane as om
from optomembrane.errors import StabilityError
from optomembrane.steady import _is_bistable, _parametric_sheets, _Terms

from conftest import make_fig1_params, make_fig2_params


def quiet(fn, *args, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return fn(*args, **kwargs)


def lorentzian_params(detuning=5e6, power=1e-3):
    """Membrane absent: the cavity response is exactly Lorentzian."""
    cav = om.CavityParams(length=0.09, wavelength=1064e-9, finesse=8000)
    mem = om.MembraneParams(
        thickness=0.0, n_real=2.0, n_imag=0.0, z0=0.0,
        mass=1e-12, omega_m=2 * np.pi * 1e6, q_factor=1e5,
    )
    return om.SystemParams(
        cavity=cav, membrane=mem,
        drive=om.DriveParams(power=power, detuning=detuning), temperature=300.0,
    )


def test_zero_power_single_trivial_solution():
    p = make_fig2_params(power=0.0, detuning=5e6)
    states = quiet(om.find_steady_states, p)
    assert len(states) == 1
    assert states[0].q_s == 0.0
    assert states[0].alpha_sq == 0.0


def test_absent_membrane_lorentzian():
    p = lorentzian_params()
    states = om.find_steady_states(p)
    assert len(states) == 1
    s = states[0]
    expected = p.drive_amplitude_sq / (p.cavity.kappa0**2 + 5e6**2)
    assert s.q_s == 0.0
    assert s.alpha_sq == pytest.approx(expected, rel=1e-12)
    assert s.stable


def test_bistable_window_three_solutions_middle_unstable():
    # inside the hysteresis window of the strong-drive regime
    p = make_fig1_params(detuning=6.5e6)
    states = quiet(om.find_steady_states, p)
    assert len(states) == 3
    assert [s.branch for s in states] == ["lower", "middle", "upper"]
    assert states[0].stable and not states[1].stable
    assert states[1].margin > 0
    assert states[0].alpha_sq < states[1].alpha_sq < states[2].alpha_sq


def test_residual_property_across_detunings():
    tol = 1e-12
    for det in np.linspace(-1.5e7, 1.5e7, 11):
        p = make_fig2_params(detuning=float(det))
        for s in quiet(om.find_steady_states, p):
            terms = _Terms(p)
            bound = max(tol * max(1.0, abs(s.q_s)), terms.residual_floor(s.q_s))
            assert abs(s.residual_q) <= bound
            assert abs(s.residual_alpha) <= tol * max(1.0, s.alpha_sq)


def test_solution_count_is_odd():
    for det in np.linspace(-1e7, 1.2e8, 9):
        p = make_fig1_params(detuning=float(det))
        states = quiet(om.find_steady_states, p)
        assert len(states) % 2 == 1


def test_gauge_shift_z0_half_wavelength():
    p1 = make_fig1_params(detuning=6.5e6)
    lam = p1.cavity.wavelength
    p2 = p1.with_membrane_position(p1.membrane.z0 + lam / 2)
    s1 = quiet(om.find_steady_states, p1)
    s2 = quiet(om.find_steady_states, p2)
    assert len(s1) == len(s2)
    for a, b in zip(s1, s2):
        assert a.alpha_sq == pytest.approx(b.alpha_sq, rel=1e-9)
        assert a.q_s == pytest.approx(b.q_s, rel=1e-6, abs=1e-3)


def test_scan_below_threshold_directions_agree():
    p = make_fig1_params(power=1e-3)  # below the ~3.1 mW threshold
    wb = p.cavity.omega_b
    rng = (wb - 1.6e7, wb - 8e5)
    up = quiet(om.scan_hysteresis, p, rng, "up", steps=60)
    down = quiet(om.scan_hysteresis, p, rng, "down", steps=60)
    a_up = np.array([pt.alpha_sq for pt in up])
    a_dn = np.array([pt.alpha_sq for pt in down])[::-1]
    assert np.max(np.abs(a_up - a_dn) / a_up) < 1e-9


def test_scan_hysteresis_above_threshold():
    p = make_fig1_params()
    wb = p.cavity.omega_b
    rng = (wb - 1.6e7, wb - 8e5)
    up = quiet(om.scan_hysteresis, p, rng, "up", steps=120)
    down = quiet(om.scan_hysteresis, p, rng, "down", steps=120)
    a_up = np.array([pt.alpha_sq for pt in up])
    a_dn = np.array([pt.alpha_sq for pt in down])[::-1]
    rel = np.abs(a_up - a_dn) / np.maximum(a_up, a_dn)
    assert (rel > 1e-3).sum() >= 5  # nonempty hysteresis interval
    # traces close up again at both monostable endpoints
    assert rel[0] < 1e-9 and rel[-1] < 1e-9


def test_scan_membrane_absent_is_lorentzian():
    p = lorentzian_params(detuning=0.0)
    wb = p.cavity.omega_b
    k0 = p.cavity.kappa0
    trace = om.scan_hysteresis(p, (wb - 6 * k0, wb + 6 * k0), "up", steps=101)
    for pt in trace:
        e_sq = 2 * p.drive.power * k0 / (HBAR * pt.omega_l)
        assert pt.alpha_sq == pytest.approx(
            e_sq / (k0**2 + (pt.omega_l - wb) ** 2), rel=1e-12
        )
        assert pt.transmission == pytest.approx(
            HBAR * pt.omega_l * 2 * k0 * pt.alpha_sq, rel=1e-12
        )
    # symmetric about the resonance up to the 1e-6-level drive-amplitude slope
    a = np.array([pt.alpha_sq for pt in trace])
    assert np.max(np.abs(a - a[::-1]) / a) < 1e-5


def test_scan_continuity_on_surviving_branch():
    p = make_fig1_params(power=1e-3)
    wb = p.cavity.omega_b
    trace = quiet(om.scan_hysteresis, p, (wb - 8e6, wb - 8e5), "up", steps=200)
    a = np.array([pt.alpha_sq for pt in trace])
    # step-to-step jump bounded by the local secant slope estimate
    first = np.abs(np.diff(a))
    secant = np.maximum(np.abs(a[2:] - a[:-2]) / 2, 1e-12 * a[1:-1])
    assert np.all(first[1:-1] <= 4 * secant[:-1] + 4 * secant[1:])


def test_scan_validation():
    p = make_fig1_params()
    wb = p.cavity.omega_b
    with pytest.raises(ValueError):
        om.scan_hysteresis(p, (wb, wb + 0.5 * p.cavity.kappa0), "up", steps=10)
    with pytest.raises(ValueError):
        om.scan_hysteresis(p, (wb - 1e7, wb), "sideways", steps=10)
    with pytest.raises(ValueError):
        om.scan_hysteresis(p, (wb - 1e7, wb), "up", steps=1)


def test_scan_error_when_no_stable_solution():
    # floppy unresolved-sideband membrane: the high branch self-oscillates
    cav = om.CavityParams(length=0.09, wavelength=1064e-9, finesse=8000)
    mem = om.MembraneParams(
        thickness=500e-9, n_real=2.0, n_imag=1e-6, z0=1064e-9 / 8,
        mass=15e-12, omega_m=2 * np.pi * 1e5, q_factor=1e5,
    )
    p = om.SystemParams(
        cavity=cav, membrane=mem, drive=om.DriveParams(power=30e-3, detuning=0.0),
        temperature=300.0,
    )
    wb = cav.omega_b
    with pytest.raises(StabilityError, match="scan step"):
        quiet(om.scan_hysteresis, p, (wb - 1.6e9, wb + 2e8), "up", steps=120)


def test_threshold_not_found_at_slope_node():
    # membrane at a dispersion extremum: radiation pressure decoupled
    p = make_fig1_params()
    p = p.with_membrane_position(0.0)
    wb = p.cavity.omega_b
    thr = om.bistability_threshold(p, (wb - 1.6e7, wb - 8e5), power_range=(1e-6, 30e-3))
    assert thr is None


def test_threshold_in_strong_drive_regime():
    p = make_fig1_params()
    wb = p.cavity.omega_b
    rng = (wb - 1.6e7, wb - 8e5)
    thr = om.bistability_threshold(p, rng, power_range=(1e-6, 30e-3))
    assert thr is not None and thr < 30e-3
    assert not _is_bistable(p.with_power(0.99 * thr), rng)
    assert _is_bistable(p.with_power(1.01 * thr), rng)


def test_threshold_consistency_with_enumeration():
    p = make_fig1_params()
    wb = p.cavity.omega_b
    rng = (wb - 1.6e7, wb - 8e5)
    thr = om.bistability_threshold(p, rng, power_range=(1e-6, 30e-3))

    above = p.with_power(1.05 * thr)
    sheets = _parametric_sheets(above)
    # pick the laser frequency in the middle of the fold pair and enumerate
    folds = []
    for q, w in sheets:
        dw = np.diff(w)
        for i in np.flatnonzero(np.sign(dw[:-1]) * np.sign(dw[1:]) < 0) + 1:
            folds.append(w[i])
    assert folds
    w_mid = wb + (min(folds) + max(folds)) / 2
    states = quiet(om.find_steady_states, above.with_omega_l(w_mid))
    assert len(states) == 3

    below = p.with_power(0.95 * thr)
    counts = {
        len(quiet(om.find_steady_states, below.with_omega_l(wb + off)))
        for off in np.linspace(-1.6e7, -8e5, 41)
    }
    assert counts == {1}
