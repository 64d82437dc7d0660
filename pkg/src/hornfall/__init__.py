"""Random Horn-SAT: ensemble generation, linear-time solving, analytic predictions."""

__version__ = "0.1.0"

from ._accel import BACKEND, NUMBA_AVAILABLE
from .automata import Automaton, emptiness_direct, parse_automaton, to_horn
from .formula import (
    DensityVector,
    EnsembleSample,
    HornClause,
    HornFormula,
    make_clause,
    parse_formula,
    sample_ensemble,
    serialize_formula,
)
from .solver import SolveResult, backbone_fraction, solve
from .theory import (
    PredictionResult,
    gamma_curve,
    hypergraph_params,
    lambert_w,
    phi_12,
    root_t0,
    trajectory_closed_form,
    trajectory_integrate,
)

__all__ = [
    "BACKEND",
    "NUMBA_AVAILABLE",
    "Automaton",
    "DensityVector",
    "EnsembleSample",
    "HornClause",
    "HornFormula",
    "PredictionResult",
    "SolveResult",
    "backbone_fraction",
    "emptiness_direct",
    "gamma_curve",
    "hypergraph_params",
    "lambert_w",
    "make_clause",
    "parse_automaton",
    "parse_formula",
    "phi_12",
    "root_t0",
    "sample_ensemble",
    "serialize_formula",
    "solve",
    "to_horn",
    "trajectory_closed_form",
    "trajectory_integrate",
]
