"""Membrane-dependent complex cavity dispersion.

The driven mode of a symmetric cavity of length L containing a thin slab of
complex refractive index n at axial position z has (to first order in the
dispersion over a free spectral range)

    omega(z) = omega_b + (c/L) * [theta(z) - psi],
    theta(z) = (-1)^p * arcsin[ R * cos(2*k0*z) ],
    R   = (n^2 - 1) / sqrt(4*n^2*cot(s)^2 + (n^2 + 1)^2),     s = n*k0*L_d,
    psi = arctan[ (n^2 + 1)*tan(s) / (2*n) ],

with principal-branch complex arcsin/arctan/sqrt.  The real part of theta is
the position-dependent mode pull; psi is z-independent, so its real part is an
offset absorbed into the reference omega_b, while its imaginary part is the
mean photon absorption rate of the membrane.  The reported quantities are

    omega_c(z) = omega_b + (c/L)*Re{theta(z)}      (rad/s)
    kappa1(z)  = (c/L)*Im{psi - theta(z)} >= 0     (rad/s)

kappa1 vanishes identically for a lossless membrane and is the extra cavity
amplitude decay rate, on top of the mirror rate kappa0.  Derivatives with
respect to the dimensionless membrane coordinate q follow from the chain rule
d/dq = x0 * d/dz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT

from .errors import SingularConfigurationError
from .params import CavityParams, MembraneParams

__all__ = [
    "ModeFunction",
    "mode_frequency",
    "coupling_scale",
    "dispersion_arrays",
    "dispersion_offset_arrays",
]


@dataclass(frozen=True)
class ModeFunction:
    """Dispersion and its q-derivatives evaluated at one membrane coordinate."""

    q: float
    omega_c: float        # rad/s
    kappa1: float         # rad/s, >= 0
    domega_dq: float      # rad/s per unit q
    dkappa1_dq: float     # rad/s per unit q
    d2omega_dq2: float    # rad/s per unit q^2


def _slab_constants(cavity: CavityParams, membrane: MembraneParams):
    """Complex (R, psi) of the slab at the drive wave vector; (0, 0) if absent."""
    # numpy scalar arithmetic: overflow becomes inf (caught below) instead of
    # raising OverflowError mid-formula
    n = np.complex128(membrane.refractive_index)
    if membrane.thickness == 0.0 or n == 1.0:
        return 0.0 + 0.0j, 0.0 + 0.0j
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        s = n * cavity.k0 * membrane.thickness
        tan_s = np.tan(s)
        root = np.sqrt(4 * n**2 / tan_s**2 + (n**2 + 1) ** 2)
        big_r = (n**2 - 1) / root
        if not np.isfinite(big_r):
            raise SingularConfigurationError(
                f"membrane cotangent term 4 n^2 cot(n k0 L_d)^2 is singular at "
                f"n*k0*L_d = {s!r} (n_R k0 L_d a multiple of pi with n_I = 0)"
            )
        psi = np.arctan((n**2 + 1) * tan_s / (2 * n))
    if not np.isfinite(psi):
        raise SingularConfigurationError(
            f"slab phase arctan[(n^2+1) tan(n k0 L_d)/(2n)] is singular at "
            f"n*k0*L_d = {s!r}"
        )
    return big_r, psi


def dispersion_offset_arrays(cavity: CavityParams, membrane: MembraneParams, z):
    """Like :func:`dispersion_arrays` but with omega_c relative to omega_b.

    Downstream solvers work with the offset to avoid the catastrophic
    cancellation of subtracting ~1e15 rad/s optical frequencies when forming
    detunings.
    """
    z = np.asarray(z, dtype=float)
    scale = C_LIGHT / cavity.length
    big_r, psi = _slab_constants(cavity, membrane)
    if big_r == 0.0:
        zero = np.zeros_like(z)
        return zero, zero.copy(), zero.copy(), zero.copy(), zero.copy()

    sign = -1.0 if cavity.mode_index % 2 else 1.0
    k0 = cavity.k0
    u = np.cos(2 * k0 * z)
    w = big_r * u
    theta = np.arcsin(w)
    den = np.sqrt(1.0 - w * w)
    wp = -2 * k0 * big_r * np.sin(2 * k0 * z)        # dw/dz
    fp = wp / den                                    # d(arcsin w)/dz
    fpp = (-4 * k0**2 * w) / den + w * wp**2 / den**3

    osc = scale * sign * theta.real                  # omega_c - omega_b
    kappa1 = scale * (psi.imag - sign * theta.imag)
    domega_dz = scale * sign * fp.real
    dkappa1_dz = -scale * sign * fp.imag
    d2omega_dz2 = scale * sign * fpp.real

    out = (osc, kappa1, domega_dz, dkappa1_dz, d2omega_dz2)
    for name, arr in zip(
        ("omega_c", "kappa1", "domega_dz", "dkappa1_dz", "d2omega_dz2"), out
    ):
        if not np.all(np.isfinite(arr)):
            raise SingularConfigurationError(
                f"dispersion term {name} is non-finite for this configuration"
            )
    return out


def dispersion_arrays(cavity: CavityParams, membrane: MembraneParams, z):
    """Evaluate the complex dispersion on an array of axial positions.

    Parameters
    ----------
    z : array_like
        Membrane positions along the cavity axis (m).

    Returns
    -------
    tuple of ndarray
        ``(omega_c, kappa1, domega_dz, dkappa1_dz, d2omega_dz2)``, each the
        shape of ``z``; the derivative entries are per meter.
    """
    osc, kappa1, d1, dk1, d2 = dispersion_offset_arrays(cavity, membrane, z)
    return cavity.omega_b + osc, kappa1, d1, dk1, d2


def mode_frequency(
    cavity: CavityParams, membrane: MembraneParams, q: float
) -> ModeFunction:
    """Cavity frequency, absorption rate and q-derivatives at coordinate q.

    z(q) = z0 + x0*q; derivatives are chained accordingly.
    """
    x0 = membrane.x0
    z = membrane.z0 + x0 * float(q)
    omega_c, kappa1, d1, dk1, d2 = (
        float(a) for a in dispersion_arrays(cavity, membrane, z)
    )
    return ModeFunction(
        q=float(q),
        omega_c=omega_c,
        kappa1=kappa1,
        domega_dq=x0 * d1,
        dkappa1_dq=x0 * dk1,
        d2omega_dq2=x0 * x0 * d2,
    )


def coupling_scale(
    cavity: CavityParams, membrane: MembraneParams, q: float
) -> float:
    """Bare optomechanical frequency pull d(omega_c)/dq / 2*pi, in Hz."""
    return mode_frequency(cavity, membrane, q).domega_dq / (2 * math.pi)
