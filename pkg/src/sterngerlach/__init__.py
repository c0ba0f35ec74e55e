"""Space-time solution of the Stern-Gerlach experiment with Pauli spinors.

Closed-form spinor and density, de Broglie-Bohm trajectories, Monte Carlo
screen statistics, and an independent split-operator oracle.
"""
__version__ = "0.1.0"

from .model import (  # noqa: E402
    CONSTANTS,
    ConfigError,
    DerivedQuantities,
    ExperimentConfig,
    PhysicalConstants,
    default_config,
    derive,
    load_config,
    screen_time,
)
from .propagator import (  # noqa: E402
    PolarizedAtom,
    SpinorValue,
    exit_phases,
    gaussian_packet_K,
    initial_spinor,
    spinor_after_field,
    spinor_at,
    spinor_in_field,
)
from .density import (  # noqa: E402
    classical_paths,
    density_after_field,
    density_in_field,
    density_profile,
    separation_time,
)
from .bohm import (  # noqa: E402
    Outcome,
    Trajectory,
    cos_theta_after_field,
    cos_theta_in_field,
    general_velocity,
    integrate_trajectory,
    threshold_z,
    velocity_after_field,
    velocity_in_field,
)
from .ensemble import SamplingSpec, compare_to_density, impact_map, run_ensemble, sample_atoms  # noqa: E402
from .grid import GridSpec  # noqa: E402
