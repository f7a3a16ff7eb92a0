"""Exact tests for infinitesimal ultrarigidity of periodic frameworks."""

from .combinatorics import (
    check_thm_fixed,
    check_thm_flexible,
    enumerate_epimorphisms,
    is_colored_laman,
    is_gamma22,
    is_ross,
    is_unit_area_laman,
    pebble_game,
)
from .core_model import ColoredGraph, Edge, Framework, GraphError, rho_image
from .decider import BoundTooLarge, Model, Verdict, VerdictKind, decide, rum_rational_spectrum
from .framework_io import dump_framework, load_framework, parse_framework
from .numtheory import bound_N0, constant_Cd, cyclotomic_poly, subgroup_index

__all__ = [
    "BoundTooLarge",
    "ColoredGraph",
    "Edge",
    "Framework",
    "GraphError",
    "Model",
    "Verdict",
    "VerdictKind",
    "bound_N0",
    "check_thm_fixed",
    "check_thm_flexible",
    "constant_Cd",
    "cyclotomic_poly",
    "decide",
    "dump_framework",
    "enumerate_epimorphisms",
    "is_colored_laman",
    "is_gamma22",
    "is_ross",
    "is_unit_area_laman",
    "load_framework",
    "parse_framework",
    "pebble_game",
    "rho_image",
    "rum_rational_spectrum",
    "subgroup_index",
]
