"""Parameter containers for the membrane-in-cavity system.

Unit conventions, used everywhere in this package:

* angular frequencies and decay rates in rad/s (the CLI layer accepts
  cycles-based convenience keys such as MHz and converts),
* lengths in m, masses in kg, powers in W, temperatures in K,
* the membrane coordinate q is dimensionless; the physical position along the
  cavity axis is z(q) = z0 + x0*q with x0 = sqrt(hbar/(m*omega_m)).

kappa0 is the *amplitude* decay rate of the empty cavity: the intracavity
intensity Lorentzian has FWHM 2*kappa0, and kappa0 = pi*c/(2*L*finesse).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import c as C_LIGHT, hbar as HBAR, k as K_B

__all__ = [
    "CavityParams",
    "MembraneParams",
    "DriveParams",
    "SystemParams",
    "thermal_occupancy",
]


def thermal_occupancy(omega: float, temperature: float) -> float:
    """Bose occupancy 1/(exp(hbar*omega/kB*T) - 1); exactly 0 at T = 0."""
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if temperature == 0.0:
        return 0.0
    x = HBAR * omega / (K_B * temperature)
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class CavityParams:
    """Empty-cavity geometry and loss.

    Exactly one of ``kappa0`` (amplitude decay rate, rad/s) or ``finesse``
    must be given; the other is derived via kappa0 = pi*c/(2*L*finesse).
    ``mode_index`` defaults to the even longitudinal index closest to the
    drive wavelength; ``omega_b`` defaults to the corresponding empty-cavity
    resonance mode_index*pi*c/L and is the reference all detunings are
    quoted against.
    """

    length: float
    wavelength: float
    kappa0: float | None = None
    finesse: float | None = None
    mode_index: int | None = None
    omega_b: float | None = None
    waist: float | None = None

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("cavity length must be > 0")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be > 0")
        if self.kappa0 is None and self.finesse is None:
            raise ValueError("give exactly one of kappa0 or finesse")
        if self.finesse is not None:
            if self.finesse <= 1:
                raise ValueError("finesse must be > 1")
            derived = math.pi * C_LIGHT / (2 * self.length * self.finesse)
            if self.kappa0 is None:
                object.__setattr__(self, "kappa0", derived)
            elif not math.isclose(self.kappa0, derived, rel_tol=1e-9):
                # both given is only legal when they are the same conversion
                # (happens on dataclasses.replace of an already-derived instance)
                raise ValueError("kappa0 and finesse are inconsistent")
        else:
            if self.kappa0 <= 0:
                raise ValueError("kappa0 must be > 0")
            object.__setattr__(
                self, "finesse", math.pi * C_LIGHT / (2 * self.length * self.kappa0)
            )
        if self.mode_index is None:
            # nearest even empty-cavity mode to the drive wavelength
            object.__setattr__(
                self, "mode_index", 2 * round(self.length / self.wavelength)
            )
        if self.omega_b is None:
            object.__setattr__(
                self, "omega_b", self.mode_index * math.pi * C_LIGHT / self.length
            )

    @property
    def k0(self) -> float:
        """Drive wave vector 2*pi/wavelength (rad/m)."""
        return 2 * math.pi / self.wavelength

    @property
    def free_spectral_range(self) -> float:
        """pi*c/L (rad/s)."""
        return math.pi * C_LIGHT / self.length


@dataclass(frozen=True)
class MembraneParams:
    """Membrane optical and mechanical properties.

    ``n_real + 1j*n_imag`` is the refractive index; ``z0`` the center-of-mass
    position along the cavity axis (0 = cavity center).
    """

    thickness: float
    n_real: float
    n_imag: float
    z0: float
    mass: float
    omega_m: float
    q_factor: float

    def __post_init__(self):
        if self.thickness < 0:
            raise ValueError("membrane thickness must be >= 0")
        if self.n_real < 1:
            raise ValueError("n_real must be >= 1")
        if self.n_imag < 0:
            raise ValueError("n_imag must be >= 0")
        if self.omega_m <= 0:
            raise ValueError("omega_m must be > 0")
        if self.mass <= 0:
            raise ValueError("mass must be > 0")
        if self.q_factor <= 0:
            raise ValueError("q_factor must be > 0")
        if self.q_factor < 100:
            warnings.warn(
                "mechanical quality factor < 100: the Markovian Brownian-noise "
                "correlation used here needs Q_m >> 1",
                stacklevel=2,
            )

    @property
    def refractive_index(self) -> complex:
        return complex(self.n_real, self.n_imag)

    @property
    def gamma_m(self) -> float:
        """Mechanical damping rate omega_m/Q_m (rad/s)."""
        return self.omega_m / self.q_factor

    @property
    def x0(self) -> float:
        """Zero-point length sqrt(hbar/(m*omega_m)) (m); always recomputed."""
        return math.sqrt(HBAR / (self.mass * self.omega_m))


@dataclass(frozen=True)
class DriveParams:
    """Input drive: power plus the laser frequency.

    The laser frequency is given either absolutely (``omega_l``, rad/s) or as
    ``detuning = omega_b - omega_l`` (rad/s, positive = laser red of the
    empty-cavity reference); exactly one of the two.
    """

    power: float
    detuning: float | None = None
    omega_l: float | None = None

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("drive power must be >= 0")
        if (self.detuning is None) == (self.omega_l is None):
            raise ValueError("give exactly one of detuning or omega_l")


@dataclass(frozen=True)
class SystemParams:
    """Full parameter set: cavity + membrane + drive + bath temperature."""

    cavity: CavityParams
    membrane: MembraneParams
    drive: DriveParams
    temperature: float

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("bath temperature must be >= 0")
        if abs(self.omega_l - self.cavity.omega_b) > self.cavity.free_spectral_range:
            raise ValueError(
                "laser frequency must lie within one free spectral range of omega_b"
            )

    @property
    def omega_l(self) -> float:
        """Laser angular frequency (rad/s)."""
        if self.drive.omega_l is not None:
            return self.drive.omega_l
        return self.cavity.omega_b - self.drive.detuning

    @property
    def omega_l_offset(self) -> float:
        """omega_l - omega_b, formed without large-number cancellation."""
        if self.drive.detuning is not None:
            return -self.drive.detuning
        return self.drive.omega_l - self.cavity.omega_b

    @property
    def drive_amplitude_sq(self) -> float:
        """|E|^2 = 2*P*kappa0/(hbar*omega_l) (s^-2); always recomputed from P."""
        return 2 * self.drive.power * self.cavity.kappa0 / (HBAR * self.omega_l)

    @property
    def bath_occupancy(self) -> float:
        """Mean thermal phonon number of the membrane bath."""
        return thermal_occupancy(self.membrane.omega_m, self.temperature)

    def with_omega_l(self, omega_l: float) -> "SystemParams":
        """Copy with the laser frequency replaced (used by scans)."""
        return replace(
            self, drive=replace(self.drive, detuning=None, omega_l=float(omega_l))
        )

    def with_power(self, power: float) -> "SystemParams":
        return replace(self, drive=replace(self.drive, power=float(power)))

    def with_detuning(self, detuning: float) -> "SystemParams":
        """Copy with the laser placed at omega_b - detuning."""
        return replace(
            self, drive=replace(self.drive, detuning=float(detuning), omega_l=None)
        )

    def with_temperature(self, temperature: float) -> "SystemParams":
        return replace(self, temperature=float(temperature))

    def with_membrane_position(self, z0: float) -> "SystemParams":
        return replace(self, membrane=replace(self.membrane, z0=float(z0)))
