"""Classical operating points of the driven membrane-cavity system.

A steady state is a joint solution of the membrane displacement balance and
the intracavity intensity

    q_s       = -Re{d(omega_c)/dq} |alpha_s|^2 / omega_m,
    |alpha_s|^2 = |E|^2 / [kappa_T(q_s)^2 + (omega_l - omega_c(q_s))^2],

reduced to one scalar fixed-point equation F(q) = 0 by substitution.  All real
solutions are enumerated by a dense sign-change scan over the a-priori bound
|q| <= 2 |E|^2 max|d(omega_c)/dq| / (omega_m kappa0^2), with local grid
densification around cavity-resonance crossings (where the intensity feature
can be much narrower than the coarse grid), followed by bracketed bisection
and Newton polish.  Above the bistability threshold the equation generically
has three solutions; stability of each is classified by the eigenvalue test
of the fluctuation dynamics.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import c as C_LIGHT, hbar as HBAR
from scipy.optimize import brentq

from .errors import RootFindingError, StabilityError
from .mode import dispersion_arrays, dispersion_offset_arrays
from .params import SystemParams

__all__ = [
    "SteadyState",
    "ScanPoint",
    "find_steady_states",
    "scan_hysteresis",
    "bistability_threshold",
]

_TOL = 1e-12
_SAMPLES = 2048


@dataclass(frozen=True)
class SteadyState:
    """One classical operating point."""

    q_s: float
    alpha_sq: float       # intracavity photon number |alpha_s|^2
    delta: float          # omega_c[z(q_s)] - omega_l (rad/s)
    kappa_T: float        # kappa0 + kappa1[z(q_s)] (rad/s)
    branch: str           # lower / middle / upper
    stable: bool | None = None
    margin: float | None = None   # max Re eigenvalue of the drift matrix (rad/s)
    residual_q: float = 0.0       # displacement-balance residual
    residual_alpha: float = 0.0   # intensity-equation residual

    @property
    def alpha_s(self) -> float:
        """Real positive field amplitude (phase reference of the drive)."""
        return float(np.sqrt(self.alpha_sq))


@dataclass(frozen=True)
class ScanPoint:
    """One record of an adiabatic laser-frequency scan."""

    omega_l: float
    alpha_sq: float
    q_s: float
    transmission: float   # hbar*omega_l*2*kappa0*|alpha_s|^2 (W)
    branch: str


class _Terms:
    """Vectorized fixed-point quantities at membrane coordinates q.

    All optical frequencies are carried as offsets from omega_b so the
    detuning omega_l - omega_c never subtracts ~1e15 rad/s numbers.
    """

    def __init__(self, params: SystemParams):
        self.params = params
        self.x0 = params.membrane.x0
        self.z0 = params.membrane.z0
        self.offset = params.omega_l_offset        # omega_l - omega_b
        self.omega_m = params.membrane.omega_m
        self.e_sq = params.drive_amplitude_sq
        self.kappa0 = params.cavity.kappa0

    def dispersion(self, q):
        """(omega_c - omega_b, kappa_T, d(omega)/dq, d(kappa1)/dq, d2(omega)/dq2)."""
        z = self.z0 + self.x0 * np.asarray(q, dtype=float)
        osc, kappa1, d1, dk1, d2 = dispersion_offset_arrays(
            self.params.cavity, self.params.membrane, z
        )
        return osc, self.kappa0 + kappa1, self.x0 * d1, self.x0 * dk1, self.x0**2 * d2

    def alpha_sq(self, q):
        osc, kappa_t, g, _, _ = self.dispersion(q)
        return self.e_sq / (kappa_t**2 + (self.offset - osc) ** 2)

    def residual(self, q):
        """F(q) = q + g(q)*|alpha|^2(q)/omega_m."""
        osc, kappa_t, g, _, _ = self.dispersion(q)
        denom = kappa_t**2 + (self.offset - osc) ** 2
        return np.asarray(q, dtype=float) + g * self.e_sq / (denom * self.omega_m)

    def residual_prime(self, q):
        """Analytic dF/dq for Newton polish."""
        osc, kappa_t, g, dk1, d2 = self.dispersion(q)
        det = self.offset - osc
        denom = kappa_t**2 + det**2
        ddenom = 2 * kappa_t * dk1 - 2 * det * g
        return 1.0 + (self.e_sq / self.omega_m) * (d2 / denom - g * ddenom / denom**2)

    def residual_floor(self, q):
        """Double-precision noise floor of F(q).

        The dispersion offset is O(1) trigonometry scaled by c/L, so it
        carries an absolute jitter ~ eps*c/L (rad/s) that propagates into the
        intensity denominator; a root cannot be polished below this level.
        """
        osc, kappa_t, g, _, _ = self.dispersion(q)
        det = self.offset - osc
        denom = kappa_t**2 + det**2
        t = abs(g) * self.e_sq / (denom * self.omega_m)
        eps = np.finfo(float).eps
        sigma_osc = 4.0 * eps * C_LIGHT / self.params.cavity.length
        return t * 2 * abs(det) * sigma_osc / denom + 4 * eps * max(
            abs(float(np.asarray(q))), t, 1.0
        )

    def max_slope(self) -> float:
        """max |Re d(omega_c)/dq| over one dispersion period of z."""
        lam = self.params.cavity.wavelength
        z = self.z0 + np.linspace(-lam / 4, lam / 4, 4097)
        _, _, d1, _, _ = dispersion_arrays(self.params.cavity, self.params.membrane, z)
        return float(np.max(np.abs(d1))) * self.x0


def _state_at(terms: _Terms, q_s: float, branch: str) -> SteadyState:
    osc, kappa_t, g, _, _ = terms.dispersion(q_s)
    denom = kappa_t**2 + (terms.offset - osc) ** 2
    alpha_sq = terms.e_sq / denom
    return SteadyState(
        q_s=float(q_s),
        alpha_sq=float(alpha_sq),
        delta=float(osc - terms.offset),
        kappa_T=float(kappa_t),
        branch=branch,
        residual_q=float(q_s + g * alpha_sq / terms.omega_m),
        residual_alpha=float(alpha_sq - terms.e_sq / denom),
    )


def _branch_labels(count: int) -> list[str]:
    if count == 1:
        return ["lower"]
    return ["lower"] + ["middle"] * (count - 2) + ["upper"]


def _refined_grid(terms: _Terms, bound: float, samples: int) -> np.ndarray:
    """Coarse grid plus dense patches around cavity-resonance crossings."""
    grid = np.linspace(-bound, bound, samples + 1)
    osc, kappa_t, g, _, _ = terms.dispersion(grid)
    h = osc - terms.offset
    patches = [grid]
    crossing = np.flatnonzero(np.sign(h[:-1]) * np.sign(h[1:]) < 0)
    near_miss = np.flatnonzero(
        (np.abs(h[1:-1]) < 30 * kappa_t[1:-1])
        & (np.abs(h[1:-1]) <= np.abs(h[:-2]))
        & (np.abs(h[1:-1]) <= np.abs(h[2:]))
    )
    centers = [0.5 * (grid[i] + grid[i + 1]) for i in crossing]
    centers += [grid[i + 1] for i in near_miss]
    for qc in centers:
        idx = min(int((qc + bound) / (2 * bound) * samples), samples - 1)
        slope = max(abs(g[idx]), 1e-300)
        width = kappa_t[idx] / slope
        width = min(max(width, 2 * bound / samples * 1e-3), 2 * bound)
        lo = max(qc - 30 * width, -bound)
        hi = min(qc + 30 * width, bound)
        patches.append(np.linspace(lo, hi, 301))
    return np.unique(np.concatenate(patches))


def _polish(terms: _Terms, lo: float, hi: float, tol: float) -> float:
    root = brentq(lambda q: float(terms.residual(q)), lo, hi, xtol=1e-15 * max(1.0, hi - lo) + 1e-300, rtol=8.9e-16)
    best = root
    best_res = abs(float(terms.residual(root)))
    q = root
    for _ in range(4):
        f = float(terms.residual(q))
        fp = float(terms.residual_prime(q))
        if fp == 0.0 or not np.isfinite(fp):
            break
        q = q - f / fp
        if not (lo - abs(hi - lo) <= q <= hi + abs(hi - lo)):
            break
        res = abs(float(terms.residual(q)))
        if res < best_res:
            best, best_res = q, res
        else:
            break
    if best_res > max(tol * max(1.0, abs(best)), terms.residual_floor(best)):
        raise RootFindingError(
            f"fixed-point polish stalled at |F|={best_res:.3e} for q in [{lo}, {hi}]",
            interval=(lo, hi),
        )
    return best


def find_steady_states(
    params: SystemParams,
    tol: float = _TOL,
    samples: int = _SAMPLES,
    classify: bool = True,
) -> list[SteadyState]:
    """Enumerate all classical steady states at the given drive.

    Returns the solutions sorted by photon number, branch-labelled, with the
    ``stable``/``margin`` fields filled by the fluctuation-matrix eigenvalue
    test (unless ``classify=False``).  Raises ``RootFindingError`` with the
    scanned interval and sign table if bracketing cannot be completed.
    """
    terms = _Terms(params)

    if terms.e_sq == 0.0:
        states = [_state_at(terms, 0.0, "lower")]
        return _classified(params, states) if classify else states

    gmax = terms.max_slope()
    if gmax == 0.0:
        # membrane absent or lossless flat dispersion: radiation pressure off
        states = [_state_at(terms, 0.0, "lower")]
        return _classified(params, states) if classify else states

    bound = 2.0 * terms.e_sq * gmax / (terms.omega_m * terms.kappa0**2)
    grid = _refined_grid(terms, bound, samples)
    f = terms.residual(grid)
    sign = np.sign(f)
    flips = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    exact = np.flatnonzero(f == 0.0)

    roots = [float(grid[i]) for i in exact]
    for i in flips:
        roots.append(_polish(terms, float(grid[i]), float(grid[i + 1]), tol))

    if not roots:
        raise RootFindingError(
            "no sign change found in the fixed-point scan",
            interval=(-bound, bound),
            sign_table=sign,
        )

    roots = sorted(roots)
    merged = [roots[0]]
    for r in roots[1:]:
        if abs(r - merged[-1]) <= 1e-9 * max(1.0, bound):
            warnings.warn("nearly degenerate steady-state roots merged", stacklevel=2)
            continue
        merged.append(r)
    if len(merged) % 2 == 0:
        warnings.warn(
            "even number of steady-state roots: a tangent (double) root may sit "
            "at the scan resolution",
            stacklevel=2,
        )

    states = [_state_at(terms, q, "lower") for q in merged]
    states.sort(key=lambda s: s.alpha_sq)
    labels = _branch_labels(len(states))
    states = [replace(s, branch=b) for s, b in zip(states, labels)]
    return _classified(params, states) if classify else states


def _classified(params: SystemParams, states: list[SteadyState]) -> list[SteadyState]:
    from .fluctuations import is_stable, linearize  # local import: layering, not a cycle

    out = []
    for s in states:
        stable, margin = is_stable(linearize(params, s))
        out.append(replace(s, stable=stable, margin=margin))
    return out


def _select(states: list[SteadyState], prev_alpha_sq: float | None,
            prefer: str = "lower") -> SteadyState:
    stable = [s for s in states if s.stable]
    if not stable:
        raise StabilityError("no stable steady state", margin=max(s.margin for s in states))
    if prev_alpha_sq is None:
        return stable[-1] if prefer == "upper" else stable[0]
    return min(stable, key=lambda s: abs(s.alpha_sq - prev_alpha_sq))


def scan_hysteresis(
    params: SystemParams,
    omega_l_range: tuple[float, float],
    direction: str = "up",
    steps: int = 200,
) -> list[ScanPoint]:
    """Adiabatic laser-frequency scan with branch following.

    At each frequency the stable solution closest in photon number to the
    previous selection is kept; when that branch disappears the trace jumps to
    the nearest remaining stable solution, which is what produces hysteresis
    between ``up`` and ``down`` scans above the bistability threshold.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    lo, hi = omega_l_range
    if hi - lo < 2 * params.cavity.kappa0:
        raise ValueError("scan range must cover at least one cavity linewidth")
    if direction not in ("up", "down"):
        raise ValueError("direction must be 'up' or 'down'")
    omegas = np.linspace(lo, hi, steps)
    if direction == "down":
        omegas = omegas[::-1]

    trace = []
    prev = None
    for i, w in enumerate(omegas):
        pt = params.with_omega_l(float(w))
        try:
            sel = _select(find_steady_states(pt), prev)
        except StabilityError as err:
            raise StabilityError(
                f"no stable steady state at scan step {i} (omega_l={w!r})",
                margin=err.margin,
            ) from err
        prev = sel.alpha_sq
        trace.append(
            ScanPoint(
                omega_l=float(w),
                alpha_sq=sel.alpha_sq,
                q_s=sel.q_s,
                transmission=HBAR * float(w) * 2 * params.cavity.kappa0 * sel.alpha_sq,
                branch=sel.branch,
            )
        )
    return trace


def _parametric_sheets(
    params: SystemParams, samples: int = 4096
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Exact solution curves omega_l(q) of the coupled fixed-point equations.

    Every steady state at laser frequency w lies on one of the two sheets
    omega_l = omega_c(q) -/+ sqrt(|E|^2/|alpha|^2(q) - kappa_T(q)^2) with
    |alpha|^2(q) = -q*omega_m/g(q), so solution multiplicity at fixed w equals
    the number of curve crossings.  Used by the bistability detector; |E|^2 is
    evaluated at omega_l ~ omega_c(q) (relative error ~ dispersion/omega_l).
    Frequencies in the returned (q, w) segments are offsets from omega_b.
    """
    terms = _Terms(params)
    gmax = terms.max_slope()
    if terms.e_sq == 0.0 or gmax == 0.0:
        return []
    bound = 2.0 * terms.e_sq * gmax / (terms.omega_m * terms.kappa0**2)
    q = np.linspace(-bound, bound, samples)
    osc, kappa_t, g, _, _ = terms.dispersion(q)
    omega_b = params.cavity.omega_b
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha_sq = -q * terms.omega_m / g
        e_sq = 2 * params.drive.power * terms.kappa0 / (HBAR * (omega_b + osc))
        rad = e_sq / alpha_sq - kappa_t**2
    valid = np.isfinite(rad) & (alpha_sq > 0) & (rad >= 0)
    sheets = []
    for s in (-1.0, 1.0):
        # laser-frequency offset from omega_b along the solution curve
        w = osc + s * np.sqrt(np.where(valid, rad, np.nan))
        # split into contiguous valid segments
        idx = np.flatnonzero(valid)
        if idx.size == 0:
            continue
        breaks = np.flatnonzero(np.diff(idx) > 1)
        for seg in np.split(idx, breaks + 1):
            if seg.size >= 3:
                sheets.append((q[seg], w[seg]))
    return sheets


def _count_crossings(sheets, omega: float) -> int:
    count = 0
    for _, w in sheets:
        d = w - omega
        count += int(np.count_nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0))
        count += int(np.count_nonzero(d == 0.0))
    return count


def _is_bistable(params: SystemParams, omega_l_range: tuple[float, float],
                 samples: int = 4096) -> bool:
    sheets = _parametric_sheets(params, samples)
    omega_b = params.cavity.omega_b
    lo, hi = omega_l_range[0] - omega_b, omega_l_range[1] - omega_b
    probes = set()
    for q, w in sheets:
        dw = np.diff(w)
        folds = np.flatnonzero(np.sign(dw[:-1]) * np.sign(dw[1:]) < 0) + 1
        for i in folds:
            span = abs(w[i + 1] - w[i - 1]) + 1e-12 * abs(w[i])
            probes.add(w[i] - span)
            probes.add(w[i] + span)
    for p in probes:
        if lo <= p <= hi and _count_crossings(sheets, p) >= 3:
            return True
    return False


def bistability_threshold(
    params: SystemParams,
    omega_l_range: tuple[float, float],
    power_range: tuple[float, float] | None = None,
    rel_tol: float = 1e-3,
) -> float | None:
    """Smallest input power giving three steady states somewhere in the range.

    Bisects the drive power between ``power_range`` bounds (defaults to
    ``(1e-6, 1)`` times the configured power).  Returns ``None`` when no
    bistability exists up to the upper probe bound; raises ``ValueError``
    when the lower bound is already bistable (no bracket).
    """
    if power_range is None:
        power_range = (1e-6 * params.drive.power, params.drive.power)
    p_lo, p_hi = power_range
    if not 0 <= p_lo < p_hi:
        raise ValueError("power_range must satisfy 0 <= lo < hi")
    if p_lo > 0 and _is_bistable(params.with_power(p_lo), omega_l_range):
        raise ValueError("already bistable at the lower power bound; widen the range")
    if not _is_bistable(params.with_power(p_hi), omega_l_range):
        return None
    lo, hi = p_lo, p_hi
    while (hi - lo) > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if _is_bistable(params.with_power(mid), omega_l_range):
            hi = mid
        else:
            lo = mid
    return hi
