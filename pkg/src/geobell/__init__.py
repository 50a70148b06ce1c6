"""Geometric Bell inequalities for GHZ states of N qudits under four outcome strategies."""

from .lhv import LhvModel, ViolationReport, alternating_ascent, exhaustive_max, packed_model, violation_ratio
from .scenario import INFINITE, OffsetConvention, Scenario, State, Strategy

__all__ = [
    "INFINITE",
    "LhvModel",
    "OffsetConvention",
    "Scenario",
    "State",
    "Strategy",
    "ViolationReport",
    "alternating_ascent",
    "exhaustive_max",
    "packed_model",
    "violation_ratio",
]
