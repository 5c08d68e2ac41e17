"""Linearized fluctuation dynamics around a classical steady state.

State ordering is (dq, dp, dX, dY) with the cavity quadratures
dX = (da + da^dag)/sqrt(2), dY = (da - da^dag)/(i sqrt(2)), so the vacuum
variance is 1/2.  The fluctuations obey du = A u dt + noise with drift

        (      0           omega_m      0         0      )
    A = ( -omega_eff       -gamma_m     G         0      )
        ( -sqrt(2)*h*a_s    0          -kappa_T   Delta  )
        (      G            0          -Delta    -kappa_T)

where omega_eff = omega_m + d2(omega_c)/dq2 * |alpha_s|^2 includes the static
frequency pull, G = -sqrt(2) * d(omega_c)/dq * alpha_s is the optomechanical
coupling, and h = d(kappa1)/dq gives the dissipative coupling from membrane
absorption.  The symmetrized noise covariance is

    D = diag(0, gamma_m*(2*n0+1) + h^2 |alpha_s|^2/(2*kappa1), kappa_T, kappa_T)

plus the (dp, dY) cross term h*alpha_s/sqrt(2) from the shared absorption
noise.  The stationary covariance V solves the Lyapunov equation
A V + V A^T = -D, handled here as a 16x16 Kronecker linear system (exact to
machine precision at this size, after rescaling all rates by omega_m to keep
the system well conditioned).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import NumericalError, StabilityError
from .mode import mode_frequency
from .params import SystemParams

if TYPE_CHECKING:
    from .steady import SteadyState

__all__ = ["LinearizedModel", "CovarianceResult", "linearize", "is_stable", "solve_lyapunov"]

_RESIDUAL_BOUND = 1e-10
_COND_LIMIT = 1e12
_KAPPA1_FLOOR = 1e-30


@dataclass(frozen=True, eq=False)
class LinearizedModel:
    """Drift/diffusion matrices plus the scalar rates they were built from."""

    a: np.ndarray         # 4x4 drift (rad/s)
    d: np.ndarray         # 4x4 symmetric diffusion (rad/s)
    g_coupling: float     # rad/s
    omega_eff: float      # pulled mechanical frequency (rad/s)
    delta: float          # rad/s
    kappa_T: float        # rad/s
    n0: float             # bath occupancy
    omega_m: float        # bare mechanical frequency (rad/s), used for scaling
    gamma_m: float        # rad/s
    kappa1: float         # rad/s
    alpha_s: float = 0.0

    @classmethod
    def from_rates(
        cls,
        omega_m: float,
        gamma_m: float,
        omega_eff: float,
        delta: float,
        kappa_T: float,
        kappa1: float,
        g_coupling: float,
        dk1_alpha: float,
        n0: float,
        alpha_s: float = 0.0,
    ) -> "LinearizedModel":
        """Assemble A and D from scalar rates.

        ``dk1_alpha`` is d(kappa1)/dq * alpha_s.  The absorption heating term
        dk1_alpha^2/(2*kappa1) is taken as its (well-defined) zero limit when
        kappa1 vanishes, in which case dk1_alpha must vanish too.
        """
        if kappa1 < 0 or kappa_T < kappa1:
            raise ValueError("need 0 <= kappa1 <= kappa_T")
        if kappa1 < _KAPPA1_FLOOR:
            if dk1_alpha != 0.0:
                raise ValueError("dk1_alpha must vanish when kappa1 = 0")
            heat = 0.0
        else:
            heat = dk1_alpha**2 / (2 * kappa1)
        a = np.array(
            [
                [0.0, omega_m, 0.0, 0.0],
                [-omega_eff, -gamma_m, g_coupling, 0.0],
                [-math.sqrt(2) * dk1_alpha, 0.0, -kappa_T, delta],
                [g_coupling, 0.0, -delta, -kappa_T],
            ]
        )
        d = np.zeros((4, 4))
        d[1, 1] = gamma_m * (2 * n0 + 1) + heat
        d[2, 2] = kappa_T
        d[3, 3] = kappa_T
        d[1, 3] = d[3, 1] = dk1_alpha / math.sqrt(2)
        return cls(
            a=a,
            d=d,
            g_coupling=g_coupling,
            omega_eff=omega_eff,
            delta=delta,
            kappa_T=kappa_T,
            n0=n0,
            omega_m=omega_m,
            gamma_m=gamma_m,
            kappa1=kappa1,
            alpha_s=alpha_s,
        )


@dataclass(frozen=True, eq=False)
class CovarianceResult:
    """Stationary covariance with its solve diagnostics."""

    v: np.ndarray         # 4x4 symmetric positive definite
    residual: float       # ||A V + V A^T + D||_F / ||D||_F
    margin: float         # max Re eigenvalue of A (rad/s)
    warnings: tuple[str, ...] = ()


def linearize(params: SystemParams, ss: "SteadyState") -> LinearizedModel:
    """Build the linearized model at a steady state of ``params``."""
    mem = params.membrane
    mf = mode_frequency(params.cavity, mem, ss.q_s)
    alpha_s = ss.alpha_s
    if alpha_s < 10.0:
        warnings.warn(
            f"|alpha_s| = {alpha_s:.3g} < 10: the linearization drops terms "
            "suppressed by 1/|alpha_s|",
            stacklevel=2,
        )
    return LinearizedModel.from_rates(
        omega_m=mem.omega_m,
        gamma_m=mem.gamma_m,
        omega_eff=mem.omega_m + mf.d2omega_dq2 * ss.alpha_sq,
        delta=ss.delta,
        kappa_T=ss.kappa_T,
        kappa1=mf.kappa1,
        g_coupling=-math.sqrt(2) * mf.domega_dq * alpha_s,
        dk1_alpha=mf.dkappa1_dq * alpha_s,
        n0=params.bath_occupancy,
        alpha_s=alpha_s,
    )


def is_stable(model: LinearizedModel) -> tuple[bool, float]:
    """Eigenvalue stability test: (stable, margin).

    Stable iff every eigenvalue of the drift matrix has a strictly negative
    real part; the margin is the largest real part (rad/s).  Marginal systems
    (margin = 0) are reported unstable.
    """
    if not np.all(np.isfinite(model.a)):
        raise ValueError("drift matrix has non-finite entries")
    margin = float(np.max(np.linalg.eigvals(model.a).real))
    return margin < 0.0, margin


def solve_lyapunov(model: LinearizedModel) -> CovarianceResult:
    """Solve A V + V A^T = -D for the stationary covariance.

    Raises ``StabilityError`` for an unstable model.  The solution is
    symmetrized; an ill-conditioning warning (condition estimate > 1e12) is
    attached to the result rather than raised.
    """
    stable, margin = is_stable(model)
    if not stable:
        raise StabilityError(
            f"drift matrix is not stable (margin {margin:.6g} rad/s)", margin=margin
        )
    scale = model.omega_m
    a = model.a / scale
    d = model.d / scale
    eye = np.eye(4)
    system = np.kron(a, eye) + np.kron(eye, a)
    v = np.linalg.solve(system, -d.reshape(-1)).reshape(4, 4)
    v = 0.5 * (v + v.T)

    notes: tuple[str, ...] = ()
    cond = np.linalg.cond(system)
    if cond > _COND_LIMIT:
        notes = (f"ill-conditioned Lyapunov system (cond ~ {cond:.3e})",)

    d_norm = np.linalg.norm(model.d)
    residual = float(
        np.linalg.norm(model.a @ v + v @ model.a.T + model.d) / max(d_norm, 1e-300)
    )
    if residual > _RESIDUAL_BOUND:
        raise NumericalError(
            f"Lyapunov residual {residual:.3e} exceeds {_RESIDUAL_BOUND:g}"
        )
    return CovarianceResult(v=v, residual=residual, margin=margin, warnings=notes)
