"""Desk-scale simulator of adiabatic ground-state search for Diophantine
solvability on truncated Fock spaces, with spectral diagnostics, a
run-time lower-bound check, coefficient-noise statistics, and the
Bose-Hubbard mean-field realization of linear instances.
"""

from .adiabatic import (
    BoundDiagnostic,
    EvolutionResult,
    SpectralFlow,
    StabilityTable,
    bound_diagnostic,
    evolve,
    spectral_flow,
    truncation_stability,
)
from .fockspace import (
    FockSpace,
    OperatorMatrix,
    QuantumState,
    annihilation,
    coherent_state,
    commutator_defect,
    creation,
    number_operator,
)
from .hamiltonian import (
    ProblemInstance,
    Schedule,
    SymmetryBreak,
    build_HI,
    build_HP,
    interpolate,
)
from .hubbard import (
    LatticeModel,
    MeanFieldState,
    as_diophantine,
    build_HB,
    mean_field_solve,
    mott_state,
    superfluid_state,
    sweep_transition,
)
from .oracle import BoxSearchResult, search_box
from .polynomial import Polynomial, parse
from .stochastic import CltReport, NoiseModel, run_clt, sample_instance
from .verdict import Verdict, cross_check, decide, identify

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Polynomial",
    "parse",
    "FockSpace",
    "QuantumState",
    "OperatorMatrix",
    "annihilation",
    "creation",
    "number_operator",
    "coherent_state",
    "commutator_defect",
    "Schedule",
    "SymmetryBreak",
    "ProblemInstance",
    "build_HP",
    "build_HI",
    "interpolate",
    "EvolutionResult",
    "SpectralFlow",
    "BoundDiagnostic",
    "StabilityTable",
    "evolve",
    "spectral_flow",
    "bound_diagnostic",
    "truncation_stability",
    "Verdict",
    "identify",
    "decide",
    "cross_check",
    "BoxSearchResult",
    "search_box",
    "NoiseModel",
    "CltReport",
    "sample_instance",
    "run_clt",
    "LatticeModel",
    "MeanFieldState",
    "build_HB",
    "superfluid_state",
    "mott_state",
    "mean_field_solve",
    "sweep_transition",
    "as_diophantine",
]
