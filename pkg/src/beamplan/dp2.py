"""Power-of-two demand decomposition.

Each beam joins the level-k pattern iff bit k of its integer demand is set;
the level pattern carries weight 2^k.  Levels run from the highest set bit
of the maximum demand down to 0, so accumulated weights reproduce every
demand exactly.  Interference and cardinality constraints are then restored
by splitting each level pattern, and identical beam sets are merged.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .model import ConstraintSet, Instance, Pattern, Plan


@dataclass
class Dp2Report:
    base_pattern_count: int
    final_pattern_count: int
    k_max: int
    runtime_ms: float


def dp2_decompose(demands) -> list[Pattern]:
    """Decompose integer demands into power-of-two weighted patterns.

    Returns one pattern per non-empty bit level, highest weight first.
    Raises ValueError if no demand is positive.
    """
    demands = list(demands)
    if any(d < 0 for d in demands):
        raise ValueError("demands must be non-negative")
    max_demand = max(demands, default=0)
    if max_demand == 0:
        raise ValueError("at least one demand must be positive")
    k_max = max_demand.bit_length() - 1
    patterns = []
    for k in range(k_max, -1, -1):
        beams = [b for b, d in enumerate(demands) if (d >> k) & 1]
        if beams:
            patterns.append(Pattern(beams, 1 << k))
    return patterns


def split_interference(pattern: Pattern, adjacency) -> list[Pattern]:
    """Split a pattern into independent sub-patterns of the conflict graph.

    Greedy coloring in ascending beam order, each beam taking the
    lowest-numbered class with no conflict.  Adversarial graphs may need
    more than three classes; every class keeps the original weight.
    """
    beams = sorted(pattern.beams)
    classes: list[list[int]] = []
    for b in beams:
        for cls in classes:
            if not any(other in adjacency[b] for other in cls):
                cls.append(b)
                break
        else:
            classes.append([b])
    if len(classes) == 1:
        return [pattern]
    return [Pattern(cls, pattern.weight) for cls in classes]


def split_cardinality(pattern: Pattern, n_max: int) -> list[Pattern]:
    """Split a pattern into ceil(|beams|/n_max) chunks of at most n_max beams.

    Beams fill chunks in ascending index order; weights are preserved.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    beams = sorted(pattern.beams)
    if len(beams) <= n_max:
        return [pattern]
    return [
        Pattern(beams[i : i + n_max], pattern.weight)
        for i in range(0, len(beams), n_max)
    ]


def merge_duplicates(plan: Plan) -> Plan:
    """Merge patterns with identical beam sets, summing their weights.

    Output keeps first-appearance order; accumulated weights are unchanged.
    """
    order: list[frozenset[int]] = []
    weights: dict[frozenset[int], int] = {}
    for p in plan.patterns:
        if p.beams in weights:
            weights[p.beams] += p.weight
        else:
            weights[p.beams] = p.weight
            order.append(p.beams)
    return Plan([Pattern(beams, weights[beams]) for beams in order], plan.cycle)


def dp2_full(inst: Instance, cons: ConstraintSet) -> tuple[Plan, Dp2Report]:
    """Run the full pipeline: decompose, split, merge.

    The result satisfies check_feasible under the given constraints and is
    deterministic for a fixed input.
    """
    start = time.perf_counter()
    base = dp2_decompose(inst.demands)
    split = []
    for pattern in base:
        if cons.interference:
            parts = split_interference(pattern, inst.adjacency)
        else:
            parts = [pattern]
        if cons.n_max is not None:
            parts = [q for p in parts for q in split_cardinality(p, cons.n_max)]
        split.extend(parts)
    plan = merge_duplicates(Plan(split, inst.cycle))
    elapsed_ms = (time.perf_counter() - start) * 1e3
    k_max = max(inst.demands).bit_length() - 1
    report = Dp2Report(
        base_pattern_count=len(base),
        final_pattern_count=len(plan.patterns),
        k_max=k_max,
        runtime_ms=elapsed_ms,
    )
    return plan, report
