"""Exact minimum-pattern-count solver.

Minimizes the number of patterns such that per-beam pattern weights sum to
the demands exactly, patterns are independent sets of the conflict graph
when interference is enforced, and no pattern exceeds n_max beams.

Strategy: iterative deepening on the pattern count k, starting from a
combinatorial lower bound, with depth-first assignment of (weight, beam
subset) pairs in nondecreasing weight order.  Without interference or a
binding cardinality cap the beam dimension collapses: only the weight
multiset matters, and membership is assigned afterwards by per-beam subset
sums.  A heuristic plan (power-of-two decomposition) provides the warm
incumbent; proving every count below it infeasible proves it optimal.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations

from . import kernel
from .dp2 import dp2_full
from .model import ConstraintSet, Instance, Pattern, Plan, check_feasible, validate_instance

STATUS_OPTIMAL = "optimal"
STATUS_FEASIBLE = "feasible"
STATUS_TIMEOUT = "timeout-no-solution"


@dataclass(frozen=True)
class WeightDomain:
    """Fixed-slot enumeration view: candidate dwell values and demand spread."""

    weights: tuple[int, ...]
    omega: int

    @classmethod
    def from_instance(cls, inst: Instance) -> "WeightDomain":
        omega = len({d for d in inst.demands if d > 0})
        cap = min(inst.cycle.slots, inst.max_demand)
        return cls(weights=tuple(range(1, cap + 1)), omega=omega)


@dataclass
class SearchState:
    """Replayable snapshot of a search path, used to audit kernel output."""

    patterns: list[tuple[frozenset[int], int]]
    residuals: list[int]
    depth: int
    incumbent_bound: int

    def violations(self) -> list[str]:
        out = []
        weights = [w for _, w in self.patterns]
        if any(a > b for a, b in zip(weights, weights[1:])):
            out.append("pattern weights not nondecreasing")
        if any(r < 0 for r in self.residuals):
            out.append("negative residual demand")
        if self.depth != len(self.patterns):
            out.append("depth does not match pattern count")
        return out


@dataclass
class OptResult:
    """Solver outcome: plan, proof status, bounds and search effort."""

    plan: Plan | None
    status: str
    lower_bound: int
    nodes_explored: int
    runtime_ms: float
    gap_percent: float = 0.0

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "pattern_count": len(self.plan.patterns) if self.plan else None,
            "lower_bound": self.lower_bound,
            "gap_percent": self.gap_percent,
            "nodes_explored": self.nodes_explored,
            "runtime_ms": self.runtime_ms,
        }


def lower_bound(inst: Instance, cons: ConstraintSet) -> int:
    """Valid lower bound on the minimum pattern count.

    Maximum of: 1; ceil(log2(omega + 1)) since k weights admit at most
    2^k - 1 distinct nonzero subset sums and the omega distinct positive
    demands all need one; and, under interference, the size of a greedily
    grown clique of positive-demand beams (its members can never share a
    pattern).
    """
    omega = WeightDomain.from_instance(inst).omega
    bound = max(1, omega.bit_length())
    if cons.interference:
        bound = max(bound, _greedy_clique_size(inst))
    return bound


def _greedy_clique_size(inst: Instance) -> int:
    positive = [b for b in range(inst.n_beams) if inst.demands[b] > 0]
    pos_set = set(positive)
    degree = {b: len(inst.adjacency[b] & pos_set) for b in positive}
    order = sorted(positive, key=lambda b: (-degree[b], b))
    best = 1 if positive else 0
    for seed in order:
        clique = [seed]
        for b in order:
            if b != seed and all(b in inst.adjacency[c] for c in clique):
                clique.append(b)
        best = max(best, len(clique))
    return best


def _maximal_clique_masks(inst: Instance, min_size: int = 3) -> tuple[int, ...]:
    """Masks of maximal cliques (Bron-Kerbosch with pivoting)."""
    n = inst.n_beams
    adj = [0] * n
    for b in range(n):
        for nb in inst.adjacency[b]:
            adj[b] |= 1 << nb
    cliques: list[int] = []

    def expand(r: int, p: int, x: int):
        if p == 0 and x == 0:
            if r.bit_count() >= min_size:
                cliques.append(r)
            return
        pivot_pool = p | x
        pivot = (pivot_pool & -pivot_pool).bit_length() - 1
        best = -1
        pool = pivot_pool
        while pool:
            v = (pool & -pool).bit_length() - 1
            pool &= pool - 1
            deg = (p & adj[v]).bit_count()
            if deg > best:
                best, pivot = deg, v
        cand = p & ~adj[pivot]
        while cand:
            v = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            bit = 1 << v
            expand(r | bit, p & adj[v], x & adj[v])
            p &= ~bit
            x |= bit
    expand(0, (1 << n) - 1, 0)
    return tuple(cliques)


def _trivial_plan(inst: Instance) -> Plan:
    patterns = [
        Pattern([b], d) for b, d in enumerate(inst.demands) if d > 0
    ]
    return Plan(patterns, inst.cycle)


def _assign_membership(demands, weights) -> list[list[int]]:
    """Per-pattern beam lists: each beam takes the lexicographically smallest
    index subset of `weights` summing to its demand."""
    k = len(weights)
    reach = [set() for _ in range(k + 1)]
    reach[k] = {0}
    for i in range(k - 1, -1, -1):
        reach[i] = reach[i + 1] | {s + weights[i] for s in reach[i + 1]}
    members: list[list[int]] = [[] for _ in range(k)]
    subset_cache: dict[int, tuple[int, ...]] = {}
    for b, d in enumerate(demands):
        if d == 0:
            continue
        if d not in subset_cache:
            picks = []
            s = d
            for i in range(k):
                if s >= weights[i] and (s - weights[i]) in reach[i + 1]:
                    picks.append(i)
                    s -= weights[i]
            if s != 0:
                raise RuntimeError(f"weights {weights} cannot express demand {d}")
            subset_cache[d] = tuple(picks)
        for i in subset_cache[d]:
            members[i].append(b)
    return members


def solve_exact(
    inst: Instance,
    cons: ConstraintSet,
    ub_hint: int | None = None,
    time_limit_ms: float = 60_000.0,
    warm_start: bool = True,
) -> OptResult:
    """Solve for the provably minimum number of patterns.

    Returns status "optimal" with the minimum-count plan, or "feasible"
    with the best incumbent and a gap of 100*(UB-LB)/UB when the time limit
    interrupts the proof, or "timeout-no-solution" when the budget did not
    even allow building an incumbent.  ub_hint is advisory: optimality is
    only ever claimed against a plan the solver itself holds.
    """
    report = validate_instance(inst)
    if not report.ok:
        raise ValueError("invalid instance: " + "; ".join(report.violations))
    start = time.perf_counter()
    deadline_ns = time.monotonic_ns() + int(time_limit_ms * 1e6)

    def result(plan, status, lb, nodes, gap=0.0):
        return OptResult(
            plan=plan,
            status=status,
            lower_bound=lb,
            nodes_explored=nodes,
            runtime_ms=(time.perf_counter() - start) * 1e3,
            gap_percent=gap,
        )

    lb = lower_bound(inst, cons)
    if time.monotonic_ns() > deadline_ns:
        return result(None, STATUS_TIMEOUT, lb, 0, gap=100.0)

    if warm_start:
        incumbent, _ = dp2_full(inst, cons)
    else:
        incumbent = _trivial_plan(inst)
    ub = len(incumbent.patterns)
    if ub_hint is not None and ub_hint > ub:
        ub_hint = None  # incumbent is already better

    positive = [b for b in range(inst.n_beams) if inst.demands[b] > 0]
    unconstrained = not cons.interference and (
        cons.n_max is None or cons.n_max >= len(positive)
    )

    total_nodes = 0
    for k in range(lb, ub):
        if unconstrained:
            status, witness, nodes = kernel.unconstrained_search(
                [d for d in inst.demands if d > 0], k, 1, deadline_ns
            )
        else:
            adj_masks = [0] * inst.n_beams
            if cons.interference:
                for b in range(inst.n_beams):
                    for nb in inst.adjacency[b]:
                        adj_masks[b] |= 1 << nb
            status, witness, nodes = kernel.constrained_search(
                list(inst.demands),
                adj_masks,
                cons.n_max if cons.n_max is not None else inst.n_beams,
                k,
                _maximal_clique_masks(inst) if cons.interference else (),
                deadline_ns,
            )
        total_nodes += nodes
        if status == kernel.FOUND:
            plan = _plan_from_witness(inst, witness, unconstrained)
            _audit(plan, inst, cons, k)
            return result(plan, STATUS_OPTIMAL, k, total_nodes)
        if status == kernel.TIMEOUT:
            gap = 100.0 * (ub - k) / ub
            return result(incumbent, STATUS_FEASIBLE, k, total_nodes, gap)
        # INFEASIBLE: optimum is proven to exceed k, deepen.

    # Every count below the incumbent is infeasible: the incumbent is optimal.
    return result(incumbent, STATUS_OPTIMAL, ub, total_nodes)


def _plan_from_witness(inst: Instance, witness, unconstrained: bool) -> Plan:
    if unconstrained:
        weights = list(witness)
        members = _assign_membership(inst.demands, weights)
        patterns = [
            Pattern(beams, weights[i]) for i, beams in enumerate(members) if beams
        ]
    else:
        patterns = []
        for w, mask in witness:
            beams = [b for b in range(inst.n_beams) if (mask >> b) & 1]
            patterns.append(Pattern(beams, w))
    return Plan(patterns, inst.cycle)


def _audit(plan: Plan, inst: Instance, cons: ConstraintSet, k: int):
    """Replay the solution path and verify plan feasibility (kernel audit)."""
    residuals = list(inst.demands)
    steps: list[tuple[frozenset[int], int]] = []
    for p in plan.patterns:
        for b in p.beams:
            residuals[b] -= p.weight
        steps.append((p.beams, p.weight))
    state = SearchState(steps, residuals, len(steps), k)
    problems = state.violations()
    feas = check_feasible(plan, inst, cons)
    if problems or not feas.ok:
        raise RuntimeError(
            "solver produced an invalid plan: "
            + "; ".join(problems + feas.violations)
        )


def brute_force_min_patterns(
    inst: Instance, cons: ConstraintSet, cap: int
) -> int | None:
    """Independent oracle: exhaustive minimum pattern count, or None past cap.

    Enumerates, for k = 1..cap, every multiset of (beam subset, weight)
    pairs of size k - subsets restricted only by the stated constraints,
    weights by the maximum demand - and checks demand equality.  Intended
    for tiny instances; shares no search logic with solve_exact.
    """
    report = validate_instance(inst)
    if not report.ok:
        raise ValueError("invalid instance: " + "; ".join(report.violations))
    positive = [b for b in range(inst.n_beams) if inst.demands[b] > 0]
    subsets = []
    for size in range(1, len(positive) + 1):
        if cons.n_max is not None and size > cons.n_max:
            break
        for combo in combinations(positive, size):
            if cons.interference and any(
                b2 in inst.adjacency[b1] for b1, b2 in combinations(combo, 2)
            ):
                continue
            subsets.append(combo)
    max_demand = inst.max_demand
    pairs = [(w, s) for w in range(1, max_demand + 1) for s in subsets]
    res = list(inst.demands)

    def dfs(depth: int, k: int, start: int) -> bool:
        if depth == k:
            return all(r == 0 for r in res)
        for idx in range(start, len(pairs)):
            w, sub = pairs[idx]
            if all(res[b] >= w for b in sub):
                for b in sub:
                    res[b] -= w
                if dfs(depth + 1, k, idx):
                    return True
                for b in sub:
                    res[b] += w
        return False

    for k in range(1, cap + 1):
        if dfs(0, k, 0):
            return k
    return None
