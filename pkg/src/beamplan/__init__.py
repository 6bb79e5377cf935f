"""Beam-hopping time-plan toolkit.

Builds hopping plans whose per-beam illumination weights reproduce integer
demands exactly: a fast power-of-two decomposition heuristic, an exact
minimum-pattern-count solver, a synthetic hexagonal test-bed generator and
a benchmark harness.
"""

from .model import (
    CheckReport,
    ConstraintSet,
    CycleConfig,
    Instance,
    Pattern,
    Plan,
    accumulated_weights,
    bundled_instance,
    check_feasible,
    load_instance,
    load_plan,
    save_instance,
    save_plan,
    validate_instance,
)
from .dp2 import Dp2Report, dp2_decompose, dp2_full, merge_duplicates, split_cardinality, split_interference
from .exact import OptResult, brute_force_min_patterns, lower_bound, solve_exact

__version__ = "0.1.0"
