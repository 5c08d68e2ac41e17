"""Flat key = value configuration files and their resolution to SystemParams.

Canonical keys carry their unit in the name (SI, rad/s for rates); a few
cycles-based convenience keys are accepted and converted on input, e.g.
``omega_m_MHz = 10`` means omega_m = 2*pi*10 MHz.  CLI ``--set key=value``
entries override file values, which override built-in defaults.  Every
resolved parameter is echoed in output headers together with its provenance;
the knobs the source data never states (refractive index, detuning, finesse,
membrane position, mode index) additionally carry an ``assumed=`` marker so
no assumption passes silently.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import ConfigError
from .params import CavityParams, DriveParams, MembraneParams, SystemParams

__all__ = ["ResolvedConfig", "load_config_file", "resolve", "parse_set_overrides"]

# canonical keys -> required?
_CANONICAL = {
    "length_m": True,
    "wavelength_m": True,
    "finesse": False,
    "kappa0_rad_s": False,
    "mode_index": False,
    "omega_b_rad_s": False,
    "waist_m": False,
    "thickness_m": True,
    "n_real": False,
    "n_imag": False,
    "z0_m": True,
    "mass_kg": True,
    "omega_m_rad_s": True,
    "q_factor": True,
    "power_W": True,
    "detuning_rad_s": False,
    "omega_l_rad_s": False,
    "temperature_K": True,
}

_TWO_PI = 6.283185307179586

# convenience key -> (canonical key, multiplicative factor)
_ALIASES = {
    "length_mm": ("length_m", 1e-3),
    "wavelength_nm": ("wavelength_m", 1e-9),
    "thickness_nm": ("thickness_m", 1e-9),
    "z0_nm": ("z0_m", 1e-9),
    "mass_ng": ("mass_kg", 1e-12),
    "omega_m_MHz": ("omega_m_rad_s", _TWO_PI * 1e6),
    "power_mW": ("power_W", 1e-3),
    "detuning_MHz": ("detuning_rad_s", _TWO_PI * 1e6),
}

_DEFAULTS = {
    "n_real": 2.0,
    "n_imag": 1e-6,
}

# paper-unstated knobs: always flagged in output headers
ASSUMED_KEYS = frozenset(
    {
        "n_real",
        "n_imag",
        "z0_m",
        "mode_index",
        "finesse",
        "kappa0_rad_s",
        "detuning_rad_s",
        "omega_l_rad_s",
    }
)

_INT_KEYS = {"mode_index"}


@dataclass(frozen=True)
class ResolvedConfig:
    """Effective parameter set with provenance, ready for headers and re-runs."""

    params: SystemParams
    values: dict            # canonical key -> effective value (incl. derived)
    provenance: dict        # canonical key -> default | derived | file | cli

    @property
    def digest(self) -> str:
        payload = "".join(
            f"{k}={self.values[k]!r}\n" for k in sorted(self.values)
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:12]

    def header_lines(self) -> list[str]:
        lines = [f"# config sha256:{self.digest}"]
        for key in sorted(self.values):
            mark = ""
            if key in ASSUMED_KEYS:
                mark = f"  assumed={self.provenance[key]}-value-not-stated-in-source"
            lines.append(f"# param {key} = {self.values[key]!r}{mark}")
        return lines


def _parse_value(key: str, raw: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError as err:
        raise ConfigError(f"cannot parse value for {key!r}: {raw!r}") from err


def _canonicalize(key: str, value) -> tuple[str, float]:
    if key in _ALIASES:
        target, factor = _ALIASES[key]
        return target, value * factor
    if key not in _CANONICAL:
        raise ConfigError(f"unknown configuration key {key!r}")
    return key, value


def load_config_file(path: str) -> dict:
    """Parse a flat config file into canonical key -> value."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, raw = (part.strip() for part in body.split("=", 1))
            target = _ALIASES.get(key, (key, 1.0))[0]
            canonical, value = _canonicalize(key, _parse_value(target, raw))
            out[canonical] = value
    return out


def parse_set_overrides(pairs: list[str]) -> dict:
    """Parse repeated --set key=value CLI overrides."""
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = (part.strip() for part in item.split("=", 1))
        target = _ALIASES.get(key, (key, 1.0))[0]
        canonical, value = _canonicalize(key, _parse_value(target, raw))
        out[canonical] = value
    return out


def resolve(file_values: dict | None = None, cli_values: dict | None = None) -> ResolvedConfig:
    """Merge defaults < file < cli, validate, and build SystemParams."""
    values = {}
    provenance = {}
    for source, name in ((_DEFAULTS, "default"), (file_values or {}, "file"),
                         (cli_values or {}, "cli")):
        for key, val in source.items():
            values[key] = val
            provenance[key] = name

    missing = [k for k, req in _CANONICAL.items() if req and k not in values]
    if missing:
        raise ConfigError(f"missing required configuration keys: {', '.join(sorted(missing))}")
    if ("finesse" in values) == ("kappa0_rad_s" in values):
        raise ConfigError("give exactly one of finesse or kappa0_rad_s")
    if ("detuning_rad_s" in values) == ("omega_l_rad_s" in values):
        raise ConfigError("give exactly one of detuning_rad_s or omega_l_rad_s")

    try:
        cavity = CavityParams(
            length=values["length_m"],
            wavelength=values["wavelength_m"],
            kappa0=values.get("kappa0_rad_s"),
            finesse=values.get("finesse"),
            mode_index=values.get("mode_index"),
            omega_b=values.get("omega_b_rad_s"),
            waist=values.get("waist_m"),
        )
        membrane = MembraneParams(
            thickness=values["thickness_m"],
            n_real=values["n_real"],
            n_imag=values["n_imag"],
            z0=values["z0_m"],
            mass=values["mass_kg"],
            omega_m=values["omega_m_rad_s"],
            q_factor=values["q_factor"],
        )
        drive = DriveParams(
            power=values["power_W"],
            detuning=values.get("detuning_rad_s"),
            omega_l=values.get("omega_l_rad_s"),
        )
        params = SystemParams(
            cavity=cavity,
            membrane=membrane,
            drive=drive,
            temperature=values["temperature_K"],
        )
    except ValueError as err:
        raise ConfigError(str(err)) from err

    # echo derived values so the header is sufficient to re-run the point
    effective = dict(values)
    for key, val in (
        ("finesse", cavity.finesse),
        ("kappa0_rad_s", cavity.kappa0),
        ("mode_index", cavity.mode_index),
        ("omega_b_rad_s", cavity.omega_b),
        ("omega_l_rad_s", params.omega_l),
        ("detuning_rad_s", cavity.omega_b - params.omega_l),
    ):
        if key not in effective:
            effective[key] = val
            provenance[key] = "derived"
    return ResolvedConfig(params=params, values=effective, provenance=provenance)
