"""Valence-electron spectra and long-range asymptotes of heavy alkali atoms."""

__version__ = "0.1.0"

from .grid import GridError, RadialGrid, build_grid
from .potentials import (
    CorePolarizationParams,
    EffectivePotential,
    GaussianTerm,
    KlapischChannel,
    ModelPotentialParams,
    PseudoPotentialParams,
    compose_effective_potential,
    eval_cpp_atomic,
    eval_model_potential,
    eval_pseudopotential,
    eval_spin_orbit,
)
from .solver import (
    BoundState,
    BoundStateNotFound,
    ConvergenceError,
    SolverError,
    matrix_oracle_spectrum,
    solve_bound_state,
    solve_spectrum,
)
from .fitting import (
    AtomModel,
    ExperimentalLevel,
    FitProblem,
    FitResult,
    fit_parameters,
    level_energy,
    residuals,
)
from .longrange import (
    AtomAsymptote,
    CurveSet,
    SymmetryBlock,
    WellReport,
    adiabatic_curves,
    build_symmetry_blocks,
    c3_from_lifetime,
    find_long_range_wells,
    hamiltonian_at_R,
    london_dispersion,
    pa_rate_ratio,
)
from .io import parse_atom_data, parse_levels, parse_model_file, resolve_data_path, serialize_model
