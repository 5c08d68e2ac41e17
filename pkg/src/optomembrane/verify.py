"""Cross-checks of the stationary covariance by independent routes.

Three mutually independent computations of the same object are compared:

* the Kronecker Lyapunov solve (production path),
* long-time integration of dV/dt = A V + V A^T + D from the uncoupled
  thermal/vacuum state (deterministic ODE oracle),
* the Euler-Maruyama Monte Carlo ensemble (stochastic oracle),

plus the physicality gates (symmetry, positive definiteness, symplectic
eigenvalues >= 1/2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .fluctuations import LinearizedModel, is_stable, linearize, solve_lyapunov
from .gaussian import state_metrics, symplectic_spectrum
from .params import SystemParams
from .sde import TrajectoryConfig, simulate_cm
from .steady import find_steady_states, _select

__all__ = ["Check", "VerificationReport", "covariance_by_integration", "run_verification"]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    bound: float
    detail: str


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[Check, ...]
    summary: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def covariance_by_integration(
    model: LinearizedModel, horizons: float = 40.0, rtol: float = 1e-12
) -> np.ndarray:
    """Integrate the covariance flow to stationarity (independent of the solve).

    Starts from the uncoupled state diag(n0+1/2, n0+1/2, 1/2, 1/2) and runs
    ``horizons`` multiples of the slowest relaxation time 1/|margin|; the
    residual transient is then O(exp(-2*horizons)).
    """
    stable, margin = is_stable(model)
    if not stable:
        raise ValueError("covariance flow does not converge for an unstable model")
    scale = model.omega_m
    a = model.a / scale
    d = model.d / scale
    t_end = horizons / abs(margin / scale)
    v0 = np.diag([model.n0 + 0.5, model.n0 + 0.5, 0.5, 0.5])

    def rhs(_t, y):
        v = y.reshape(4, 4)
        return (a @ v + v @ a.T + d).reshape(-1)

    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        v0.reshape(-1),
        method="DOP853",
        rtol=rtol,
        atol=rtol * max(1.0, model.n0),
    )
    if not sol.success:
        raise RuntimeError(f"covariance ODE integration failed: {sol.message}")
    v = sol.y[:, -1].reshape(4, 4)
    return 0.5 * (v + v.T)


def run_verification(
    params: SystemParams,
    n_traj: int = 600,
    dt_factor: float = 0.001,
    horizons: float = 10.0,
    seed: int = 0,
    mc_sigmas: float = 3.0,
    mc: str = "auto",
) -> VerificationReport:
    """Run the full invariant battery on the configured operating point.

    Raises ``StabilityError`` (exit code 3 in the CLI) when no stable steady
    state exists; any failed check is reported, not raised.

    ``mc`` controls the stochastic oracle: "auto" skips it (with an explicit
    record) when the slowest relaxation is the bare mechanical bath rate
    gamma_m/2 and Q_m is large, because then both the equilibration time and
    the Euler-Maruyama bias scale with Q_m and no tractable step size exists;
    "force" runs it regardless, "skip" never runs it.
    """
    states = find_steady_states(params)
    sel = _select(states, None)
    model = linearize(params, sel)
    cov = solve_lyapunov(model)
    v = cov.v

    checks = []
    checks.append(
        Check(
            "lyapunov_residual",
            cov.residual <= 1e-10,
            cov.residual,
            1e-10,
            "||AV+VA^T+D||_F / ||D||_F",
        )
    )

    eigmin = float(np.min(np.linalg.eigvalsh(v)))
    checks.append(
        Check(
            "covariance_positive_definite",
            eigmin > 0.0,
            eigmin,
            0.0,
            "smallest eigenvalue of V",
        )
    )

    nu_min, _ = symplectic_spectrum(v)
    checks.append(
        Check(
            "symplectic_physicality",
            nu_min >= 0.5 - 1e-9,
            nu_min,
            0.5 - 1e-9,
            "smallest symplectic eigenvalue",
        )
    )

    v_ode = covariance_by_integration(model)
    dev_ode = float(np.max(np.abs(v_ode - v)))
    bound_ode = 1e-8 * max(1.0, float(np.max(np.abs(v))))
    checks.append(
        Check(
            "ode_oracle",
            dev_ode <= bound_ode,
            dev_ode,
            bound_ode,
            "max |V_ode - V| (bound scales with max|V|)",
        )
    )

    if mc not in ("auto", "force", "skip"):
        raise ValueError("mc must be 'auto', 'force' or 'skip'")
    bath_limited = (
        abs(cov.margin + model.gamma_m / 2) < 0.05 * model.gamma_m
        and model.omega_m / model.gamma_m > 200
    )
    if mc == "skip" or (mc == "auto" and bath_limited):
        reason = (
            "skipped: bath-limited relaxation (margin = -gamma_m/2, high Q_m) "
            "makes the stochastic oracle intractable at any step size"
            if bath_limited
            else "skipped on request"
        )
        checks.append(Check("mc_oracle", True, 0.0, mc_sigmas, reason))
    else:
        cfg = TrajectoryConfig.for_model(
            model, dt_factor=dt_factor, horizons=horizons, n_traj=n_traj, seed=seed
        )
        est = simulate_cm(model, cfg)
        sigmas = float(np.max(np.abs(est.v_hat - v) / est.std_err))
        checks.append(
            Check(
                "mc_oracle",
                sigmas <= mc_sigmas,
                sigmas,
                mc_sigmas,
                f"max entrywise |V_hat - V|/SE over {cfg.n_traj} trajectories",
            )
        )

    metrics = state_metrics(v, params.membrane.omega_m)
    summary = {
        "branch": sel.branch,
        "q_s": sel.q_s,
        "alpha_sq": sel.alpha_sq,
        "delta_rad_s": sel.delta,
        "kappa_T_rad_s": sel.kappa_T,
        "margin_rad_s": cov.margin,
        "n_phonon": metrics.n,
        "n_bath": model.n0,
        "log_negativity": metrics.e_n,
        "eta_minus": metrics.eta_minus,
    }
    return VerificationReport(checks=tuple(checks), summary=summary)
