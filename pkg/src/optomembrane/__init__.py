"""Steady states, optical bistability and stationary quantum fluctuations of a
driven optical cavity containing a semitransparent, absorptive vibrating
membrane."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    InvalidStateError,
    NumericalError,
    OptomembraneError,
    RootFindingError,
    SingularConfigurationError,
    StabilityError,
)
from .fluctuations import CovarianceResult, LinearizedModel, is_stable, linearize, solve_lyapunov
from .gaussian import (
    GaussianStateMetrics,
    log_negativity,
    phonon_number,
    state_metrics,
    symplectic_spectrum,
)
from .harness import SweepSpec, run_mode_table, run_scan, run_steady_table, run_sweep
from .mode import ModeFunction, coupling_scale, dispersion_arrays, mode_frequency
from .params import (
    CavityParams,
    DriveParams,
    MembraneParams,
    SystemParams,
    thermal_occupancy,
)
from .sde import CovarianceEstimate, TrajectoryConfig, noise_factor, simulate_cm
from .steady import (
    ScanPoint,
    SteadyState,
    bistability_threshold,
    find_steady_states,
    scan_hysteresis,
)
from .verify import covariance_by_integration, run_verification

__all__ = [
    "__version__",
    "CavityParams", "MembraneParams", "DriveParams", "SystemParams",
    "thermal_occupancy",
    "ModeFunction", "mode_frequency", "coupling_scale", "dispersion_arrays",
    "SteadyState", "ScanPoint", "find_steady_states", "scan_hysteresis",
    "bistability_threshold",
    "LinearizedModel", "CovarianceResult", "linearize", "is_stable", "solve_lyapunov",
    "GaussianStateMetrics", "phonon_number", "log_negativity",
    "symplectic_spectrum", "state_metrics",
    "TrajectoryConfig", "CovarianceEstimate", "simulate_cm", "noise_factor",
    "covariance_by_integration", "run_verification",
    "SweepSpec", "run_sweep", "run_scan", "run_mode_table", "run_steady_table",
    "OptomembraneError", "SingularConfigurationError", "ConfigError",
    "RootFindingError", "StabilityError", "InvalidStateError", "NumericalError",
]
