"""Symmetry classification, topological invariants and dynamics of non-Hermitian band models."""

__version__ = "0.1.0"

from .core import BlochHamiltonian, Geometry, RealSpaceModel, bz_grid
from .errors import *  # noqa: F401,F403
from .linalg import Spectrum, eigendecompose, pfaffian, propagator
from .symmetry import (
    AntiUnitarySymmetry,
    check_generalized_symmetry,
    classify_az,
    deform_phase,
    kramers_check,
    unified_class,
    verify_spectral_constraints,
)
from .topology import (
    complex_gap,
    disorder_sweep,
    domain_wall_bound_state,
    find_edge_states,
    find_exceptional_points,
    nu_ai,
    nu_aii,
    nu_d,
    winding_number,
)
from .dynamics import WaveState, edge_population_experiment, evolve, three_level_populations, wavepacket_2d
