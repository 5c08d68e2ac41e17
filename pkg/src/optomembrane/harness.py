"""Sweep and scan orchestration producing plain record dicts for the CLI.

One record per evaluated point; points that fail to solve or are unstable
produce a record with a non-ok status instead of aborting the sweep.  Branch
selection uses continuation: each point keeps the stable solution nearest in
photon number to the previous point's selection, the first point taking the
lowest-photon-number stable branch unless the upper one is requested.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar as HBAR

from .errors import OptomembraneError, StabilityError
from .fluctuations import linearize, solve_lyapunov
from .gaussian import state_metrics
from .mode import dispersion_arrays
from .params import SystemParams
from .steady import find_steady_states, scan_hysteresis, _select

__all__ = ["SweepSpec", "run_sweep", "run_scan", "run_mode_table", "run_steady_table"]

SWEEP_VARIABLES = {
    "temperature": "temperature_K",
    "power": "power_W",
    "detuning": "detuning_rad_s",
    "z0": "z0_m",
}

SWEEP_COLUMNS = [
    "variable", "value", "status", "branch", "q_s", "alpha_sq", "delta_rad_s",
    "kappa_T_rad_s", "g_rad_s", "margin_rad_s", "n_phonon", "log_negativity",
    "eta_minus", "n_bath", "warnings",
]

SCAN_COLUMNS = [
    "direction", "omega_l_rad_s", "offset_rad_s", "q_s", "alpha_sq",
    "transmission_W", "branch",
]

MODE_COLUMNS = [
    "z_m", "q", "omega_c_rad_s", "kappa1_rad_s", "domega_dq_rad_s",
    "dkappa1_dq_rad_s", "d2omega_dq2_rad_s",
]

STEADY_COLUMNS = [
    "branch", "q_s", "alpha_sq", "delta_rad_s", "kappa_T_rad_s", "stable",
    "margin_rad_s", "residual_q", "transmission_W",
]


@dataclass(frozen=True)
class SweepSpec:
    """One swept variable over a fixed-parameter snapshot."""

    base: SystemParams
    variable: str           # temperature | power | detuning | z0
    vmin: float
    vmax: float
    points: int
    scale: str = "linear"   # linear | log
    branch: str = "lower"   # first-point preference: lower | upper

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        if self.points < 2:
            raise ValueError("sweep needs at least 2 points")
        if not self.vmin < self.vmax:
            raise ValueError("sweep range must satisfy min < max")
        if self.scale not in ("linear", "log"):
            raise ValueError("scale must be 'linear' or 'log'")
        if self.scale == "log" and self.vmin <= 0:
            raise ValueError("log-scale sweep needs min > 0")
        if self.branch not in ("lower", "upper"):
            raise ValueError("branch must be 'lower' or 'upper'")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.vmin, self.vmax, self.points)
        return np.linspace(self.vmin, self.vmax, self.points)


def _apply(base: SystemParams, variable: str, value: float) -> SystemParams:
    if variable == "temperature":
        return base.with_temperature(value)
    if variable == "power":
        return base.with_power(value)
    if variable == "detuning":
        return base.with_detuning(value)
    return base.with_membrane_position(value)


def run_sweep(spec: SweepSpec) -> list[dict]:
    """Evaluate the full pipeline at every sweep point."""
    records = []
    prev_alpha = None
    for value in spec.values():
        rec = dict.fromkeys(SWEEP_COLUMNS, "")
        rec["variable"] = SWEEP_VARIABLES[spec.variable]
        rec["value"] = float(value)
        params = _apply(spec.base, spec.variable, float(value))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                states = find_steady_states(params)
                sel = _select(states, prev_alpha, prefer=spec.branch)
                prev_alpha = sel.alpha_sq
                model = linearize(params, sel)
                cov = solve_lyapunov(model)
                metrics = state_metrics(cov.v, params.membrane.omega_m)
                rec.update(
                    status="ok",
                    branch=sel.branch,
                    q_s=sel.q_s,
                    alpha_sq=sel.alpha_sq,
                    delta_rad_s=sel.delta,
                    kappa_T_rad_s=sel.kappa_T,
                    g_rad_s=model.g_coupling,
                    margin_rad_s=cov.margin,
                    n_phonon=metrics.n,
                    log_negativity=metrics.e_n,
                    eta_minus=metrics.eta_minus,
                    n_bath=model.n0,
                )
            except StabilityError as err:
                rec["status"] = "unstable"
                if err.margin is not None:
                    rec["margin_rad_s"] = err.margin
            except OptomembraneError as err:
                rec["status"] = f"error:{type(err).__name__}"
        notes = [str(w.message) for w in caught] + list(
            cov.warnings if rec["status"] == "ok" else ()
        )
        rec["warnings"] = "; ".join(notes)
        records.append(rec)
    return records


def run_scan(
    params: SystemParams,
    offset_range: tuple[float, float],
    direction: str = "both",
    steps: int = 200,
) -> list[dict]:
    """Laser-frequency scan; offsets are omega_l - omega_b in rad/s."""
    omega_b = params.cavity.omega_b
    lo, hi = omega_b + offset_range[0], omega_b + offset_range[1]
    directions = ("up", "down") if direction == "both" else (direction,)
    records = []
    for d in directions:
        for pt in scan_hysteresis(params, (lo, hi), direction=d, steps=steps):
            records.append(
                {
                    "direction": d,
                    "omega_l_rad_s": pt.omega_l,
                    "offset_rad_s": pt.omega_l - omega_b,
                    "q_s": pt.q_s,
                    "alpha_sq": pt.alpha_sq,
                    "transmission_W": pt.transmission,
                    "branch": pt.branch,
                }
            )
    return records


def run_mode_table(
    params: SystemParams,
    zmin: float | None = None,
    zmax: float | None = None,
    points: int = 401,
) -> list[dict]:
    """Dispersion and derivatives over one membrane-position window."""
    lam = params.cavity.wavelength
    z0 = params.membrane.z0
    if zmin is None:
        zmin = z0 - lam / 4
    if zmax is None:
        zmax = z0 + lam / 4
    z = np.linspace(zmin, zmax, points)
    omega_c, kappa1, d1, dk1, d2 = dispersion_arrays(
        params.cavity, params.membrane, z
    )
    x0 = params.membrane.x0
    records = []
    for i in range(points):
        records.append(
            {
                "z_m": float(z[i]),
                "q": float((z[i] - z0) / x0),
                "omega_c_rad_s": float(omega_c[i]),
                "kappa1_rad_s": float(kappa1[i]),
                "domega_dq_rad_s": float(d1[i] * x0),
                "dkappa1_dq_rad_s": float(dk1[i] * x0),
                "d2omega_dq2_rad_s": float(d2[i] * x0 * x0),
            }
        )
    return records


def run_steady_table(params: SystemParams) -> list[dict]:
    """Enumerate the steady states at the configured drive."""
    records = []
    for s in find_steady_states(params):
        records.append(
            {
                "branch": s.branch,
                "q_s": s.q_s,
                "alpha_sq": s.alpha_sq,
                "delta_rad_s": s.delta,
                "kappa_T_rad_s": s.kappa_T,
                "stable": s.stable,
                "margin_rad_s": s.margin,
                "residual_q": s.residual_q,
                "transmission_W": HBAR * params.omega_l * 2 * params.cavity.kappa0 * s.alpha_sq,
            }
        )
    return records
