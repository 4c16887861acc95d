"""Feasibility search for curriculum-based course timetabling."""

from .construct import construct_initial_timetable, seed_initial_state
from .decompose import IncrementPolicy, fixed_increment, violations_increment
from .evaluator import (
    Evaluator, PenaltyVector, Reassign, Schedule, Swap, ViolationLedger,
    augmented_objective, evaluate_delta, evaluate_full, worst_selectors,
)
from .kernel import default_backend
from .search import SearchState, StoppingCriteria, solve

__version__ = "0.1.0"

__all__ = [
    "Evaluator", "IncrementPolicy", "PenaltyVector", "Reassign", "Schedule", "SearchState",
    "StoppingCriteria", "Swap", "ViolationLedger", "augmented_objective", "construct_initial_timetable",
    "default_backend", "evaluate_delta", "evaluate_full", "fixed_increment", "seed_initial_state",
    "solve", "violations_increment", "worst_selectors",
]
