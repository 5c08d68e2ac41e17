"""Monte Carlo estimate of the stationary covariance matrix.

Independent verification route for the Lyapunov solution: the linearized
Langevin dynamics du = A u dt + B dW (with B any real factor of the
symmetrized diffusion matrix, B B^T = D) is integrated with the
Euler-Maruyama scheme over an ensemble of trajectories, and the covariance is
estimated from post-burn-in samples.  For a linear system driven by white
noise the classical SDE ensemble average of u_l u_m reproduces exactly the
symmetrized quantum covariance <u_l u_m + u_m u_l>/2 that D encodes.

Standard errors come from batch means: each trajectory's time-averaged outer
product is one independent batch (trajectories use independent noise), so the
spread over trajectories accounts for within-trajectory autocorrelation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError, StabilityError
from .fluctuations import LinearizedModel, is_stable

__all__ = ["TrajectoryConfig", "CovarianceEstimate", "simulate_cm", "noise_factor"]

_DT_LIMIT = 0.05  # max allowed dt * max|A_ij|


@dataclass(frozen=True)
class TrajectoryConfig:
    """Integration controls for the stochastic estimator."""

    dt: float            # time step (s)
    burn_in: float       # equilibration time discarded per trajectory (s)
    sample_time: float   # accumulation time per trajectory (s)
    n_traj: int
    seed: int

    def __post_init__(self):
        if self.dt <= 0 or self.burn_in < 0 or self.sample_time <= 0:
            raise ValueError("dt and sample_time must be > 0, burn_in >= 0")
        if self.n_traj < 1:
            raise ValueError("need at least one trajectory")

    @classmethod
    def for_model(
        cls,
        model: LinearizedModel,
        dt_factor: float = 0.005,
        horizons: float = 10.0,
        n_traj: int = 2000,
        seed: int = 0,
    ) -> "TrajectoryConfig":
        """Defaults from the model's own time scales.

        dt = dt_factor/max|A_ij| and burn-in = horizons/|margin|, the slowest
        relaxation time of the coupled dynamics; sampling runs as long as the
        burn-in.  The Euler-Maruyama weak bias of the stationary covariance
        scales like dt*||A||^2/(2|margin|), so keep dt_factor well below
        |margin|/max|A| when comparing against standard errors.
        """
        stable, margin = is_stable(model)
        if not stable:
            raise StabilityError("cannot pick horizons for an unstable model", margin=margin)
        dt = dt_factor / float(np.max(np.abs(model.a)))
        burn = horizons / abs(margin)
        return cls(dt=dt, burn_in=burn, sample_time=burn, n_traj=n_traj, seed=seed)


@dataclass(frozen=True, eq=False)
class CovarianceEstimate:
    """Sampled covariance with per-entry batch-means standard errors."""

    v_hat: np.ndarray       # 4x4 symmetric
    std_err: np.ndarray     # 4x4, > 0
    n_batches: int
    ess: float              # crude effective sample size (samples per 1/|margin|)


def noise_factor(d: np.ndarray) -> np.ndarray:
    """Real B with B B^T = D via eigendecomposition.

    Eigenvalues in [-1e-12, 0) are clamped to zero (roundoff); anything more
    negative means D is not a diffusion matrix.
    """
    w, u = np.linalg.eigh(np.asarray(d, dtype=float))
    if np.min(w) < -1e-12 * max(1.0, float(np.max(np.abs(w)))):
        raise InvalidStateError(
            f"diffusion matrix is not positive semidefinite (min eigenvalue {np.min(w):.3e})"
        )
    return u * np.sqrt(np.clip(w, 0.0, None))


def simulate_cm(model: LinearizedModel, cfg: TrajectoryConfig) -> CovarianceEstimate:
    """Euler-Maruyama estimate of the stationary covariance.

    Refuses unstable models.  Identical (model, cfg) pairs give bit-identical
    results: a single PCG64 stream seeded from ``cfg.seed`` drives all
    trajectories in a fixed draw order.
    """
    stable, margin = is_stable(model)
    if not stable:
        raise StabilityError("refusing to simulate an unstable model", margin=margin)
    a_max = float(np.max(np.abs(model.a)))
    if cfg.dt * a_max >= _DT_LIMIT:
        raise ValueError(
            f"dt too large: dt*max|A| = {cfg.dt * a_max:.3g} >= {_DT_LIMIT}"
        )
    b = noise_factor(model.d)

    n = cfg.n_traj
    steps_burn = int(math.ceil(cfg.burn_in / cfg.dt))
    steps_samp = max(1, int(math.ceil(cfg.sample_time / cfg.dt)))
    rng = np.random.Generator(np.random.PCG64(cfg.seed))

    prop = np.eye(4) + model.a.T * cfg.dt          # right-multiplication form
    noise_t = b.T * math.sqrt(cfg.dt)

    u = np.zeros((n, 4))
    for _ in range(steps_burn):
        u = u @ prop + rng.standard_normal((n, 4)) @ noise_t

    if n >= 2:
        acc = np.zeros((n, 4, 4))
        for _ in range(steps_samp):
            u = u @ prop + rng.standard_normal((n, 4)) @ noise_t
            acc += u[:, :, None] * u[:, None, :]
        batch = acc / steps_samp                   # per-trajectory time averages
    else:
        # one trajectory: batch means over 8 consecutive time chunks
        edges = np.linspace(0, steps_samp, 9, dtype=int)
        batch = np.zeros((8, 4, 4))
        step = 0
        for k in range(8):
            acc = np.zeros((4, 4))
            while step < edges[k + 1]:
                u = u @ prop + rng.standard_normal((n, 4)) @ noise_t
                acc += u[0, :, None] * u[0, None, :]
                step += 1
            batch[k] = acc / max(edges[k + 1] - edges[k], 1)

    n_batches = batch.shape[0]
    v_hat = batch.mean(axis=0)
    std_err = batch.std(axis=0, ddof=1) / math.sqrt(n_batches)
    v_hat = 0.5 * (v_hat + v_hat.T)
    std_err = 0.5 * (std_err + std_err.T)
    std_err = np.maximum(std_err, 1e-300)
    ess = n * max(1.0, cfg.sample_time * abs(margin))
    return CovarianceEstimate(v_hat=v_hat, std_err=std_err, n_batches=n_batches, ess=ess)
