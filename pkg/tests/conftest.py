import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracles helper module

import optomembrane as om

REPO = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def fig1_config_path():
    return str(REPO / "configs" / "fig1-hysteresis.cfg")


@pytest.fixture(scope="session")
def fig2_config_path():
    return str(REPO / "configs" / "fig2-assumed.cfg")


def make_fig1_params(**drive):
    """Bistability-regime system (9 cm cavity, 500 nm membrane)."""
    cav = om.CavityParams(length=0.09, wavelength=1064e-9, finesse=8000)
    mem = om.MembraneParams(
        thickness=500e-9, n_real=2.0, n_imag=1e-6, z0=1064e-9 / 8,
        mass=1.43e-13, omega_m=2 * np.pi * 1e7, q_factor=1e4,
    )
    kw = dict(power=30e-3, detuning=0.0)
    kw.update(drive)
    return om.SystemParams(
        cavity=cav, membrane=mem, drive=om.DriveParams(**kw), temperature=300.0
    )


def make_fig2_params(**drive):
    """Cooling/entanglement regime system (0.74 mm cavity, 50 nm membrane)."""
    cav = om.CavityParams(length=0.74e-3, wavelength=1064e-9, finesse=3e4)
    mem = om.MembraneParams(
        thickness=50e-9, n_real=2.0, n_imag=1e-6, z0=1064e-9 / 8,
        mass=9e-12, omega_m=2 * np.pi * 1e7, q_factor=4e6,
    )
    kw = dict(power=28.5e-3, detuning=7.763e7)
    kw.update(drive)
    return om.SystemParams(
        cavity=cav, membrane=mem, drive=om.DriveParams(**kw), temperature=1.0
    )
