"""Observables of the stationary Gaussian state.

All formulas use the vacuum-variance-1/2 convention of the quadratures
(q, p, X, Y).  The mechanical occupancy follows from the mean mechanical
energy hbar*omega_m*(V11 + V22)/2 = hbar*omega_m*(n + 1/2); entanglement
between the membrane mode and the cavity mode is quantified by the
logarithmic negativity

    E_N = max(0, -ln 2*eta_minus),
    eta_minus = 2^{-1/2} * sqrt(Sigma - sqrt(Sigma^2 - 4 det V)),
    Sigma = det V1 + det V2 - 2 det Vc,

with V1, V2, Vc the 2x2 blocks of V (mechanical, optical, cross).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar as HBAR

from .errors import InvalidStateError

__all__ = [
    "GaussianStateMetrics",
    "phonon_number",
    "log_negativity",
    "symplectic_spectrum",
    "state_metrics",
]

_SYM_TOL = 1e-9

# standard two-mode symplectic form for (q, p, X, Y)
_OMEGA = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)


@dataclass(frozen=True)
class GaussianStateMetrics:
    """Derived quantities of a two-mode covariance matrix."""

    n: float                  # effective mean vibrational number
    e_n: float                # logarithmic negativity (>= 0)
    eta_minus: float          # smallest partial-transpose symplectic eigenvalue
    sigma: float              # det V1 + det V2 - 2 det Vc
    det_v1: float
    det_v2: float
    det_vc: float
    raw_log_neg: float        # -ln 2*eta_minus before the max(0, .) clip
    mean_energy: float        # hbar*omega_m*(n + 1/2) (J)


def _check_cm(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (4, 4):
        raise InvalidStateError("covariance matrix must be 4x4")
    scale = max(1.0, float(np.max(np.abs(v))))
    if np.max(np.abs(v - v.T)) > _SYM_TOL * scale:
        raise InvalidStateError("covariance matrix must be symmetric")
    return v


def phonon_number(v: np.ndarray) -> float:
    """Effective mean vibrational number (V11 + V22 - 1)/2, clamped at 0."""
    v = _check_cm(v)
    n = 0.5 * (v[0, 0] + v[1, 1] - 1.0)
    if n < 0.0:
        if n < -1e-9:
            warnings.warn(
                f"phonon number {n:.3e} below the -1e-9 roundoff slack; clamped to 0",
                stacklevel=2,
            )
        n = 0.0
    return float(n)


def log_negativity(v: np.ndarray) -> tuple[float, float, float]:
    """Logarithmic negativity of the mechanical/optical bipartition.

    Returns
    -------
    (e_n, eta_minus, sigma)
        ``e_n = max(0, -ln 2*eta_minus)`` with the partial-transpose
        symplectic invariant ``sigma``.
    """
    v = _check_cm(v)
    det_v = float(np.linalg.det(v))
    if det_v < -1e-12:
        raise InvalidStateError(f"det V = {det_v:.3e} < 0: not a covariance matrix")
    v1 = float(np.linalg.det(v[:2, :2]))
    v2 = float(np.linalg.det(v[2:, 2:]))
    vc = float(np.linalg.det(v[:2, 2:]))
    sigma = v1 + v2 - 2.0 * vc
    disc = sigma * sigma - 4.0 * det_v
    if disc < 0.0:
        if disc < -1e-12:
            warnings.warn(
                f"Sigma^2 - 4 det V = {disc:.3e} clamped to 0", stacklevel=2
            )
        disc = 0.0
    eta_sq = 0.5 * (sigma - math.sqrt(disc))
    eta_minus = math.sqrt(max(eta_sq, 0.0))
    if eta_minus <= 0.0:
        raise InvalidStateError("vanishing partial-transpose symplectic eigenvalue")
    raw = -math.log(2.0 * eta_minus)
    return max(0.0, raw), eta_minus, sigma


def symplectic_spectrum(v: np.ndarray) -> tuple[float, float]:
    """The two symplectic eigenvalues of a 4x4 covariance matrix, ascending.

    Both are >= 1/2 for a physical state in this convention.
    """
    v = _check_cm(v)
    nu = np.sort(np.abs(np.linalg.eigvals(_OMEGA @ v)))
    return float(nu[0]), float(nu[2])


def state_metrics(v: np.ndarray, omega_m: float) -> GaussianStateMetrics:
    """Bundle all covariance-matrix observables for reporting."""
    v = _check_cm(v)
    n = phonon_number(v)
    e_n, eta_minus, sigma = log_negativity(v)
    return GaussianStateMetrics(
        n=n,
        e_n=e_n,
        eta_minus=eta_minus,
        sigma=sigma,
        det_v1=float(np.linalg.det(v[:2, :2])),
        det_v2=float(np.linalg.det(v[2:, 2:])),
        det_vc=float(np.linalg.det(v[:2, 2:])),
        raw_log_neg=-math.log(2.0 * eta_minus),
        mean_energy=HBAR * omega_m * (n + 0.5),
    )
