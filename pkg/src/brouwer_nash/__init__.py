"""Discrete Brouwer fixed points, their reduction to two-player games, and
exact equilibrium solvers with brute-force cross-checks."""
from .circuit import BrouwerCircuit, CircuitBuilder, dumps_circuit, loads_circuit
from .coloring import check_validity, color_at, is_panchromatic, make_corner_circuit, random_valid_circuit
from .fixedpoint import brute_force_panchromatic, path_follow
from .games import (
    BimatrixGame,
    MixedProfile,
    approx_to_wsne,
    normalize_positive,
    verify_approx_ne,
    verify_wsne,
)
from .gadgets import PrototypeParams, build_minimal_game, gadget_contract_check
from .grid import INVALID, RED, GridBounds
from .pipeline import pipeline_build, pipeline_decode, plan_pipeline
from .reduction import build_reduction, decode_equilibrium, validate_structure
from .smoothed import smoothed_bench, smoothed_for_approximation
from .solvers import lemke_howson_solve, support_enumeration_solve
from .transforms import l1_decode, l1_pad, l2_add, l2_decode, l3_decode, l3_snake

__all__ = [
    "BimatrixGame", "BrouwerCircuit", "CircuitBuilder", "GridBounds", "INVALID", "MixedProfile",
    "PrototypeParams", "RED", "approx_to_wsne", "brute_force_panchromatic", "build_minimal_game",
    "build_reduction", "check_validity", "color_at", "decode_equilibrium", "dumps_circuit",
    "gadget_contract_check", "is_panchromatic", "l1_decode", "l1_pad", "l2_add", "l2_decode",
    "l3_decode", "l3_snake", "lemke_howson_solve", "loads_circuit", "make_corner_circuit",
    "normalize_positive", "path_follow", "pipeline_build", "pipeline_decode", "plan_pipeline",
    "random_valid_circuit", "smoothed_bench", "smoothed_for_approximation",
    "support_enumeration_solve", "validate_structure", "verify_approx_ne", "verify_wsne",
]
