"""Pure-Python search kernels for the minimum-pattern solver.

Two depth-first searches, both run inside an iterative-deepening loop by
the driver in exact.py:

* unconstrained_search - when patterns are free of interference and
  cardinality limits, beam membership is unconstrained, so only the weight
  multiset matters: k weights are feasible iff every distinct demand is a
  subset sum of them.  Each distinct demand carries a bitset of still
  reachable residuals (bit r set iff residual r is achievable under the
  weight prefix), updated per weight as rem | (rem >> w).

* constrained_search - assigns (weight, beam subset) pairs in nondecreasing
  weight order.  Subsets must be independent in the conflict graph and at
  most n_max beams.  Residuals are per beam.

Pruning, exact in both searches:
  - ceiling: the next weight can never exceed the smallest positive
    residual (all later weights are at least as large, so a smaller
    residual could never be finished);
  - candidate weights are residual values and pairwise differences of
    residual values, within [w_min, ceiling];
  - distinct positive residual values must be distinct subset sums of the
    j remaining weights, so their count is capped by 2^j - 1;
  - beams of a conflict-graph clique need pairwise distinct patterns;
  - the constrained search additionally drops nodes whose residual values
    fail a budgeted run of the unconstrained search (a relaxation).

The compiled twin in _kernel_cy.pyx mirrors this module function for
function; keep their behaviour identical.
"""

from __future__ import annotations

import time

FOUND = 0
INFEASIBLE = 1
TIMEOUT = 2
BUDGET = 3

# Deadline polling interval (nodes); budget checks are per node.
_TIME_CHECK_MASK = 0x3FF

# Above this many eligible beams, subsets are applied as generated instead
# of being materialized and sorted (the family can grow as 2^eligible).
_COLLECT_LIMIT = 20


def _small_diffs(values, limit: int) -> set[int]:
    """Pairwise differences of sorted values that do not exceed limit."""
    out = set()
    n = len(values)
    for i in range(n):
        vi = values[i]
        for j in range(i + 1, n):
            d = values[j] - vi
            if d > limit:
                break
            out.add(d)
    return out


class _Search:
    """Bookkeeping shared by both searches: node counts, deadline, budget."""

    def __init__(self, deadline_ns=None, node_budget=None):
        self.deadline_ns = deadline_ns
        self.node_budget = node_budget
        self.nodes = 0
        self.polls = 0
        self.aborted = 0  # 0 = running, else TIMEOUT / BUDGET

    def tick(self) -> bool:
        """Count a node; returns False when the search must stop."""
        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget:
            self.aborted = BUDGET
            return False
        if (
            self.deadline_ns is not None
            and (self.nodes & _TIME_CHECK_MASK) == 0
            and time.monotonic_ns() > self.deadline_ns
        ):
            self.aborted = TIMEOUT
            return False
        return True

    def poll(self) -> bool:
        """Deadline check inside long per-node loops (no node accounting)."""
        self.polls += 1
        if (
            self.deadline_ns is not None
            and (self.polls & _TIME_CHECK_MASK) == 0
            and time.monotonic_ns() > self.deadline_ns
        ):
            self.aborted = TIMEOUT
            return False
        return True


def unconstrained_search(
    demands, k, w_min=1, deadline_ns=None, node_budget=None, allow_spare=False
):
    """Search for k nondecreasing weights >= w_min covering all demands.

    demands: distinct positive integers; a demand is covered when it equals
    a subset sum of the chosen weights.  With allow_spare the search accepts
    covers using fewer than k weights (feasibility of "at most k", used when
    this search serves as a relaxation); without it, covers that finish
    early are rejected, because iterative deepening has already ruled out
    shorter covers.  Returns (status, weights, nodes); weights is a
    nondecreasing list when status == FOUND, else None.
    """
    demands = sorted(set(demands))
    if not demands or demands[0] <= 0:
        raise ValueError("demands must be distinct positive integers")
    state = _Search(deadline_ns, node_budget)
    rems = [1 << d for d in demands]
    chosen: list[int] = []

    def descend(rems, j, lo):
        if not state.tick():
            return False
        unfinished = [rem for rem in rems if not (rem & 1)]
        if not unfinished:
            return allow_spare or j == 0
        if j == 0:
            return False
        ceiling = min(rem.bit_length() - 1 for rem in unfinished)
        if ceiling < lo:
            return False
        # Demands whose residual-option sets are pairwise disjoint need
        # pairwise distinct subset sums of the j remaining weights, of
        # which there are at most 2^j - 1.  A greedy disjoint family gives
        # a valid count (demands with overlapping options may share sums).
        family = 0
        fam_union = 0
        for rem in unfinished:
            r = rem & ~1
            if not (r & fam_union):
                family += 1
                fam_union |= r
        if family > (1 << j) - 1:
            return False
        if j == 1:
            inter = -1
            for rem in unfinished:
                inter &= rem
            inter = (inter >> lo) << lo  # clear bits below lo
            inter &= (1 << (ceiling + 1)) - 1
            if inter:
                chosen.append(inter.bit_length() - 1)
                return True
            return False
        union = 0
        for rem in unfinished:
            union |= rem
        union &= ~1
        bits = []
        u = union
        while u:
            low = u & -u
            bits.append(low.bit_length() - 1)
            u ^= low
        cand = {v for v in bits if lo <= v <= ceiling}
        cand.update(d for d in _small_diffs(bits, ceiling) if d >= lo)
        for w in sorted(cand, reverse=True):
            nxt = [rem | (rem >> w) for rem in rems]
            chosen.append(w)
            if descend(nxt, j - 1, w):
                return True
            chosen.pop()
            if state.aborted:
                return False
        return False

    ok = descend(rems, k, w_min)
    if ok:
        return FOUND, chosen, state.nodes
    if state.aborted:
        return state.aborted, None, state.nodes
    return INFEASIBLE, None, state.nodes


_UNKNOWN = 2


def cover_feasibility(demands, k, w_min, memo, node_budget=4096):
    """Budgeted feasibility of the unconstrained cover, memoized.

    Returns True (feasible), False (proven infeasible) or None (unknown:
    budget exhausted).  Used as a relaxation bound by constrained_search.
    """
    key = (demands, k, w_min)
    hit = memo.get(key)
    if hit is not None:
        return None if hit == _UNKNOWN else bool(hit)
    status, _, _ = unconstrained_search(
        demands, k, w_min, None, node_budget, allow_spare=True
    )
    if status == FOUND:
        memo[key] = 1
        return True
    if status == INFEASIBLE:
        memo[key] = 0
        return False
    memo[key] = _UNKNOWN
    return None


def constrained_search(
    residuals,
    adjacency_masks,
    n_max,
    k,
    clique_masks=(),
    deadline_ns=None,
    node_budget=None,
    relax_depth=7,
):
    """Search for k (weight, beam set) patterns meeting all constraints.

    Beam sets are bitmasks; adjacency_masks[b] has a bit per neighbour of
    beam b.  Patterns are assigned in nondecreasing weight order; equal
    weights additionally in nondecreasing mask order (symmetry break), and
    subsets enumerate in lexicographic beam order.  Returns
    (status, patterns, nodes) with patterns a list of (weight, mask) pairs
    when status == FOUND.
    """
    n = len(residuals)
    res = list(residuals)
    state = _Search(deadline_ns, node_budget)
    chosen: list[tuple[int, int]] = []
    relax_memo: dict = {}

    def descend(j, w_min, prev_w, prev_mask):
        if not state.tick():
            return False
        positive = sorted({r for r in res if r > 0})
        if not positive:
            return j == 0
        if j == 0:
            return False
        ceiling = positive[0]
        if ceiling < w_min:
            return False
        if len(positive) > (1 << j) - 1:
            return False
        if clique_masks:
            pos_mask = 0
            for b in range(n):
                if res[b] > 0:
                    pos_mask |= 1 << b
            for cm in clique_masks:
                if (cm & pos_mask).bit_count() > j:
                    return False
        if j <= relax_depth:
            feas = cover_feasibility(tuple(positive), j, w_min, relax_memo)
            if feas is False:
                return False
        cand = {ceiling}
        cand.update(d for d in _small_diffs(positive, ceiling) if d >= w_min)
        for w in sorted(cand, reverse=True):
            eligible = [b for b in range(n) if res[b] >= w]
            floor_mask = prev_mask if w == prev_w else 0
            if len(eligible) <= _COLLECT_LIMIT:
                subsets: list[tuple[int, int]] = []
                _collect(w, eligible, 0, 0, 0, floor_mask, subsets)
                # Largest subsets first: they retire the most demand, which
                # finds feasible levels far sooner.  The stable sort keeps
                # the lexicographic generation order within equal sizes.
                subsets.sort(key=lambda ms: -ms[1])
                for mask, _size in subsets:
                    if _apply(j, w, mask):
                        return True
                    if state.aborted:
                        return False
            else:
                # Too many subsets to materialize: lexicographic order,
                # applied as generated.
                if _enumerate_inline(j, w, eligible, 0, 0, 0, floor_mask):
                    return True
            if state.aborted:
                return False
        return False

    def _apply(j, w, mask):
        bits = []
        m = mask
        while m:
            low = m & -m
            bits.append(low.bit_length() - 1)
            m ^= low
        dead = False
        for b in bits:
            res[b] -= w
            if 0 < res[b] < w:  # unfinishable: later weights are >= w
                dead = True
        hit = False
        if not dead:
            chosen.append((w, mask))
            if descend(j - 1, w, w, mask):
                hit = True
            else:
                chosen.pop()
        for b in bits:
            res[b] += w
        return hit

    def _collect(w, eligible, start, mask, size, floor_mask, out):
        # Independent subsets of the eligible beams, in lexicographic order.
        if not state.poll():
            return
        for i in range(start, len(eligible)):
            b = eligible[i]
            if mask & adjacency_masks[b]:
                continue
            new_mask = mask | (1 << b)
            if new_mask >= floor_mask:
                out.append((new_mask, size + 1))
            if size + 1 < n_max:
                _collect(w, eligible, i + 1, new_mask, size + 1, floor_mask, out)

    def _enumerate_inline(j, w, eligible, start, mask, size, floor_mask):
        if not state.poll():
            return False
        for i in range(start, len(eligible)):
            b = eligible[i]
            if mask & adjacency_masks[b]:
                continue
            new_mask = mask | (1 << b)
            if new_mask >= floor_mask:
                if _apply(j, w, new_mask):
                    return True
                if state.aborted:
                    return False
            if size + 1 < n_max:
                if _enumerate_inline(j, w, eligible, i + 1, new_mask, size + 1, floor_mask):
                    return True
                if state.aborted:
                    return False
        return False

    ok = descend(k, 1, 0, 0)
    if ok:
        return FOUND, chosen, state.nodes
    if state.aborted:
        return state.aborted, None, state.nodes
    return INFEASIBLE, None, state.nodes
