"""Minimax almost-stable matchings for stable roommates and stable marriage instances."""

from .core import (
    AlmostStableError,
    BlockingReport,
    Instance,
    InstanceError,
    InvalidMatchingError,
    Kind,
    Matching,
    blocking_pairs,
    blocking_report,
    format_instance,
    parse_instance,
)
from .classic import gale_shapley, irving, max_cardinality_matching
from .shortlist import solve_minimax_max_smi_deg2, solve_minimax_sri_deg2
from .localsearch import approx_minimax_sri, balanced_cut
from .exact import Cardinality, Objective, decide_k_max, solve_exact

__all__ = [
    "AlmostStableError",
    "BlockingReport",
    "Cardinality",
    "Instance",
    "InstanceError",
    "InvalidMatchingError",
    "Kind",
    "Matching",
    "Objective",
    "approx_minimax_sri",
    "balanced_cut",
    "blocking_pairs",
    "blocking_report",
    "decide_k_max",
    "format_instance",
    "gale_shapley",
    "irving",
    "max_cardinality_matching",
    "parse_instance",
    "solve_exact",
    "solve_minimax_max_smi_deg2",
    "solve_minimax_sri_deg2",
]
