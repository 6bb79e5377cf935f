# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of _kernel_py.

Same two searches, same pruning, same traversal order; bigint bitsets
become uint64 word arrays and beam sets become uint64 masks (so the
constrained search here handles at most 64 beams - the dispatcher falls
back to the Python kernel above that).  Keep behaviour identical to
_kernel_py: the parity tests compare statuses, witnesses and node counts.
"""

import time

from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memcpy, memset

ctypedef unsigned long long u64
ctypedef long long i64

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_clzll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

FOUND = 0
INFEASIBLE = 1
TIMEOUT = 2
BUDGET = 3

cdef i64 TIME_CHECK_MASK = 0x3FF
cdef int COLLECT_LIMIT = 20

cdef inline int _hibit(u64 x) nogil:
    return 63 - __builtin_clzll(x)


# ---------------------------------------------------------------------------
# Shared bookkeeping

cdef struct Clock:
    i64 nodes
    i64 polls
    i64 node_budget      # -1: none
    i64 deadline_ns      # -1: none
    int aborted          # 0 running, else TIMEOUT / BUDGET


cdef inline bint _tick(Clock *c):
    c.nodes += 1
    if c.node_budget >= 0 and c.nodes > c.node_budget:
        c.aborted = BUDGET
        return False
    if c.deadline_ns >= 0 and (c.nodes & TIME_CHECK_MASK) == 0:
        if time.monotonic_ns() > c.deadline_ns:
            c.aborted = TIMEOUT
            return False
    return True


cdef inline bint _poll(Clock *c):
    c.polls += 1
    if c.deadline_ns >= 0 and (c.polls & TIME_CHECK_MASK) == 0:
        if time.monotonic_ns() > c.deadline_ns:
            c.aborted = TIMEOUT
            return False
    return True


# ---------------------------------------------------------------------------
# Unconstrained search: weight multisets over residual-option bitsets

cdef struct UC:
    int nd               # distinct demands
    int words            # bitset words per demand
    int k
    int sol_len          # weights used by the found cover (<= k with spare)
    bint allow_spare
    u64 *rems            # (k+1) levels x nd x words
    int *chosen
    u64 *sunion          # scratch: words
    u64 *cand            # scratch: words (candidate weight bitset)
    int *vals            # scratch: set-bit values of the union
    Clock clock


cdef inline u64 *_uc_level(UC *c, int depth) nogil:
    return c.rems + (<size_t> depth) * c.nd * c.words


cdef inline bint _bs_bit(u64 *bs, int bit) nogil:
    return (bs[bit >> 6] >> (bit & 63)) & 1ULL


cdef inline void _bs_set(u64 *bs, int bit) nogil:
    bs[bit >> 6] |= 1ULL << (bit & 63)


cdef inline int _bs_hibit(u64 *bs, int words) nogil:
    cdef int i
    for i in range(words - 1, -1, -1):
        if bs[i]:
            return (i << 6) + _hibit(bs[i])
    return -1


cdef void _bs_clear_below(u64 *bs, int words, int bit) nogil:
    # Clear all bits strictly below `bit`.
    cdef int wfull = bit >> 6
    cdef int i
    if wfull >= words:
        memset(bs, 0, words * sizeof(u64))
        return
    for i in range(wfull):
        bs[i] = 0
    if bit & 63:
        bs[wfull] &= ~((1ULL << (bit & 63)) - 1)


cdef void _bs_clear_above(u64 *bs, int words, int bit) nogil:
    # Clear all bits strictly above `bit`.
    cdef int wfull = bit >> 6
    cdef int i
    if wfull >= words:
        return
    for i in range(wfull + 1, words):
        bs[i] = 0
    if (bit & 63) != 63:
        bs[wfull] &= (1ULL << ((bit & 63) + 1)) - 1


cdef int *_extract_desc(u64 *bs, int words, int *count_out):
    """Set bits of a bitset in descending order, in a malloc'd array."""
    cdef int total = 0
    cdef int i, n
    cdef u64 m
    for i in range(words):
        total += __builtin_popcountll(bs[i])
    cdef int *out = <int *> malloc(max(1, total) * sizeof(int))
    if out == NULL:
        raise MemoryError()
    n = 0
    for i in range(words - 1, -1, -1):
        m = bs[i]
        while m:
            out[n] = (i << 6) + _hibit(m)
            n += 1
            m &= ~(1ULL << (out[n - 1] & 63))
    count_out[0] = n
    return out


cdef void _bs_or_shifted(u64 *src, u64 *dst, int words, int shift) nogil:
    # dst = src | (src >> shift)
    cdef int ws = shift >> 6
    cdef int bs = shift & 63
    cdef int i
    cdef u64 lo, hi
    for i in range(words):
        if i + ws < words:
            lo = src[i + ws] >> bs
            if bs and i + ws + 1 < words:
                lo |= src[i + ws + 1] << (64 - bs)
        else:
            lo = 0
        dst[i] = src[i] | lo


cdef bint _uc_descend(UC *c, int depth, int j, int lo):
    cdef int i, w, ceiling, hb, family, nvals, a, b, d
    cdef int nd = c.nd
    cdef int words = c.words
    cdef u64 *level = _uc_level(c, depth)
    cdef u64 *child
    cdef u64 *rem
    cdef u64 inter
    cdef bint any_unfinished = False, disjoint
    cdef i64 threshold

    if not _tick(&c.clock):
        return False
    ceiling = -1
    for i in range(nd):
        rem = level + i * words
        if not (rem[0] & 1ULL):
            any_unfinished = True
            hb = _bs_hibit(rem, words)
            if ceiling < 0 or hb < ceiling:
                ceiling = hb
    if not any_unfinished:
        if c.allow_spare or j == 0:
            c.sol_len = c.k - j
            return True
        return False
    if j == 0:
        return False
    if ceiling < lo:
        return False

    # Greedy family of demands with pairwise disjoint residual options:
    # they need pairwise distinct subset sums, at most 2^j - 1 exist.
    memset(c.sunion, 0, words * sizeof(u64))
    family = 0
    for i in range(nd):
        rem = level + i * words
        if rem[0] & 1ULL:
            continue
        disjoint = True
        if (rem[0] & ~1ULL) & c.sunion[0]:
            disjoint = False
        else:
            for a in range(1, words):
                if rem[a] & c.sunion[a]:
                    disjoint = False
                    break
        if disjoint:
            family += 1
            for a in range(words):
                c.sunion[a] |= rem[a]
            c.sunion[0] &= ~1ULL
    threshold = ((<i64> 1) << j) - 1 if j < 62 else <i64> 1 << 62
    if family > threshold:
        return False

    if j == 1:
        # The one remaining weight must finish every unfinished demand.
        for a in range(words):
            c.sunion[a] = ~(<u64> 0)
        for i in range(nd):
            rem = level + i * words
            if rem[0] & 1ULL:
                continue
            for a in range(words):
                c.sunion[a] &= rem[a]
        _bs_clear_below(c.sunion, words, lo)
        _bs_clear_above(c.sunion, words, ceiling)
        hb = _bs_hibit(c.sunion, words)
        if hb >= 1:
            c.chosen[c.k - j] = hb
            c.sol_len = c.k
            return True
        return False

    # Candidate weights: residual-option values and their pairwise
    # differences, within [lo, ceiling].
    memset(c.sunion, 0, words * sizeof(u64))
    for i in range(nd):
        rem = level + i * words
        if rem[0] & 1ULL:
            continue
        for a in range(words):
            c.sunion[a] |= rem[a]
    c.sunion[0] &= ~1ULL
    nvals = 0
    for a in range(words):
        inter = c.sunion[a]
        while inter:
            c.vals[nvals] = (a << 6) + __builtin_ctzll(inter)
            nvals += 1
            inter &= inter - 1
    memset(c.cand, 0, words * sizeof(u64))
    for a in range(nvals):
        w = c.vals[a]
        if lo <= w <= ceiling:
            _bs_set(c.cand, w)
        for b in range(a + 1, nvals):
            d = c.vals[b] - c.vals[a]
            if d > ceiling:
                break
            if d >= lo:
                _bs_set(c.cand, d)

    # Extract before recursing: deeper nodes reuse the scratch buffers.
    cdef int n_weights = 0
    cdef int *wlist = _extract_desc(c.cand, words, &n_weights)
    child = _uc_level(c, depth + 1)
    try:
        for a in range(n_weights):
            w = wlist[a]
            for i in range(nd):
                _bs_or_shifted(level + i * words, child + i * words, words, w)
            c.chosen[c.k - j] = w
            if _uc_descend(c, depth + 1, j - 1, w):
                return True
            if c.clock.aborted:
                return False
        return False
    finally:
        free(wlist)


cdef class _UCHandle:
    """Owns the C allocations of one unconstrained search."""

    cdef UC c
    cdef bint ready

    def __cinit__(self, demands, int k, int w_min, i64 deadline_ns,
                  i64 node_budget, bint allow_spare):
        cdef int nd = len(demands)
        cdef int maxd = demands[nd - 1]
        cdef int words = ((maxd + 2) >> 6) + 1
        cdef int i
        self.c.nd = nd
        self.c.words = words
        self.c.k = k
        self.c.sol_len = 0
        self.c.allow_spare = allow_spare
        self.c.clock.nodes = 0
        self.c.clock.polls = 0
        self.c.clock.node_budget = node_budget
        self.c.clock.deadline_ns = deadline_ns
        self.c.clock.aborted = 0
        self.c.rems = <u64 *> malloc((<size_t> k + 1) * nd * words * sizeof(u64))
        self.c.chosen = <int *> malloc(k * sizeof(int))
        self.c.sunion = <u64 *> malloc(words * sizeof(u64))
        self.c.cand = <u64 *> malloc(words * sizeof(u64))
        self.c.vals = <int *> malloc((words << 6) * sizeof(int))
        if (self.c.rems == NULL or self.c.chosen == NULL or self.c.sunion == NULL
                or self.c.cand == NULL or self.c.vals == NULL):
            raise MemoryError()
        memset(self.c.rems, 0, (<size_t> nd) * words * sizeof(u64))
        for i in range(nd):
            _bs_set(self.c.rems + i * words, demands[i])
        self.ready = True

    def __dealloc__(self):
        if self.ready:
            free(self.c.rems)
            free(self.c.chosen)
            free(self.c.sunion)
            free(self.c.cand)
            free(self.c.vals)

    def run(self, int w_min):
        cdef bint ok = _uc_descend(&self.c, 0, self.c.k, w_min)
        if ok:
            return FOUND, [self.c.chosen[i] for i in range(self.c.sol_len)], self.c.clock.nodes
        if self.c.clock.aborted:
            return self.c.clock.aborted, None, self.c.clock.nodes
        return INFEASIBLE, None, self.c.clock.nodes


def unconstrained_search(demands, k, w_min=1, deadline_ns=None,
                         node_budget=None, allow_spare=False):
    """Compiled twin of _kernel_py.unconstrained_search."""
    ds = sorted(set(demands))
    if not ds or ds[0] <= 0:
        raise ValueError("demands must be distinct positive integers")
    handle = _UCHandle(
        ds, k, w_min,
        -1 if deadline_ns is None else deadline_ns,
        -1 if node_budget is None else node_budget,
        allow_spare,
    )
    status, weights, nodes = handle.run(w_min)
    if status == FOUND:
        # j == 1 shortcut writes fewer than k entries only on success paths
        # that fill every slot; weights are complete here by construction.
        return status, weights, nodes
    return status, None, nodes


# ---------------------------------------------------------------------------
# Constrained search: (weight, beam mask) assignment over <= 64 beams

cdef struct CC:
    int n
    int n_max
    int k
    int relax_depth
    i64 *res
    u64 *adj
    u64 *cliques
    int n_cliques
    int *ch_w
    u64 *ch_mask
    int *eligible        # scratch
    i64 *positive        # scratch (distinct sorted positive residuals)
    u64 *cand            # scratch bitset over candidate weights
    int cand_words
    Clock clock


cdef i64 _insertion_sort_distinct(i64 *vals, int n) nogil:
    # Sorts in place, returns the number of distinct leading entries.
    cdef int i, j
    cdef i64 v
    cdef int out = 0
    for i in range(n):
        v = vals[i]
        j = i - 1
        while j >= 0 and vals[j] > v:
            vals[j + 1] = vals[j]
            j -= 1
        vals[j + 1] = v
    for i in range(n):
        if i == 0 or vals[i] != vals[i - 1]:
            vals[out] = vals[i]
            out += 1
    return out


cdef bint _cc_relax(CC *c, object memo, int npos, int j, int w_min, bint *pruned):
    """Budgeted unconstrained relaxation on the residual values."""
    cdef int i
    key = (tuple([c.positive[i] for i in range(npos)]), j, w_min)
    hit = memo.get(key)
    if hit is not None:
        pruned[0] = hit == 0
        return True
    vals = [c.positive[i] for i in range(npos)]
    status, _, _ = unconstrained_search(vals, j, w_min, None, 4096, True)
    if status == FOUND:
        memo[key] = 1
        pruned[0] = False
    elif status == INFEASIBLE:
        memo[key] = 0
        pruned[0] = True
    else:
        memo[key] = 2
        pruned[0] = False
    return True


cdef bint _cc_apply(CC *c, object memo, int j, int w, u64 mask):
    cdef u64 m = mask
    cdef int b
    cdef bint dead = False
    cdef bint hit = False
    while m:
        b = __builtin_ctzll(m)
        m &= m - 1
        c.res[b] -= w
        if 0 < c.res[b] < w:  # unfinishable: later weights are >= w
            dead = True
    if not dead:
        c.ch_w[c.k - j] = w
        c.ch_mask[c.k - j] = mask
        if _cc_descend(c, memo, j - 1, w, w, mask):
            hit = True
    m = mask
    while m:
        b = __builtin_ctzll(m)
        m &= m - 1
        c.res[b] += w
    return hit


cdef bint _cc_collect(CC *c, int *elig, int start, int n_eligible, u64 mask,
                      int size, u64 floor_mask, u64 **out, i64 **keys,
                      i64 *count, i64 *cap):
    cdef int i, b
    cdef u64 new_mask
    if not _poll(&c.clock):
        return False
    for i in range(start, n_eligible):
        b = elig[i]
        if mask & c.adj[b]:
            continue
        new_mask = mask | (1ULL << b)
        if new_mask >= floor_mask:
            if count[0] == cap[0]:
                cap[0] <<= 1
                out[0] = <u64 *> realloc(out[0], cap[0] * sizeof(u64))
                keys[0] = <i64 *> realloc(keys[0], cap[0] * sizeof(i64))
                if out[0] == NULL or keys[0] == NULL:
                    raise MemoryError()
            out[0][count[0]] = new_mask
            keys[0][count[0]] = ((<i64> (64 - (size + 1))) << 24) | count[0]
            count[0] += 1
        if size + 1 < c.n_max:
            if not _cc_collect(c, elig, i + 1, n_eligible, new_mask, size + 1,
                               floor_mask, out, keys, count, cap):
                return False
    return True


cdef void _i64_sort(i64 *arr, i64 n) nogil:
    # Heapsort: in-place, no libc qsort_r portability concerns.
    cdef i64 i, j, child
    cdef i64 tmp
    if n <= 1:
        return
    i = n // 2
    while True:
        if i > 0:
            i -= 1
            tmp = arr[i]
        else:
            n -= 1
            if n == 0:
                return
            tmp = arr[n]
            arr[n] = arr[0]
        j = i
        child = j * 2 + 1
        while child < n:
            if child + 1 < n and arr[child + 1] > arr[child]:
                child += 1
            if arr[child] > tmp:
                arr[j] = arr[child]
                j = child
                child = j * 2 + 1
            else:
                break
        arr[j] = tmp


cdef bint _cc_inline(CC *c, object memo, int j, int w, int *elig, int start,
                     int n_eligible, u64 mask, int size, u64 floor_mask):
    cdef int i, b
    cdef u64 new_mask
    if not _poll(&c.clock):
        return False
    for i in range(start, n_eligible):
        b = elig[i]
        if mask & c.adj[b]:
            continue
        new_mask = mask | (1ULL << b)
        if new_mask >= floor_mask:
            if _cc_apply(c, memo, j, w, new_mask):
                return True
            if c.clock.aborted:
                return False
        if size + 1 < c.n_max:
            if _cc_inline(c, memo, j, w, elig, i + 1, n_eligible, new_mask,
                          size + 1, floor_mask):
                return True
            if c.clock.aborted:
                return False
    return False


cdef bint _cc_descend(CC *c, object memo, int j, int w_min, int prev_w,
                      u64 prev_mask):
    cdef int i, b, npos, ceiling, w, n_eligible, d, cw
    cdef u64 pos_mask, floor_mask, m
    cdef i64 threshold, count, cap, idx
    cdef u64 *masks
    cdef i64 *keys
    cdef bint pruned, found

    if not _tick(&c.clock):
        return False
    npos = 0
    pos_mask = 0
    for b in range(c.n):
        if c.res[b] > 0:
            c.positive[npos] = c.res[b]
            npos += 1
            pos_mask |= 1ULL << b
    if npos == 0:
        return j == 0
    if j == 0:
        return False
    npos = <int> _insertion_sort_distinct(c.positive, npos)
    ceiling = <int> c.positive[0]
    if ceiling < w_min:
        return False
    threshold = ((<i64> 1) << j) - 1 if j < 62 else <i64> 1 << 62
    if npos > threshold:
        return False
    for i in range(c.n_cliques):
        if __builtin_popcountll(c.cliques[i] & pos_mask) > j:
            return False
    if j <= c.relax_depth:
        pruned = False
        _cc_relax(c, memo, npos, j, w_min, &pruned)
        if pruned:
            return False

    # Candidate weights: the smallest positive residual plus residual
    # differences, within [w_min, ceiling], tried in descending order.
    # (All residuals exceed the ceiling except the minimum itself.)
    cw = (ceiling >> 6) + 1
    memset(c.cand, 0, cw * sizeof(u64))
    c.cand[ceiling >> 6] |= 1ULL << (ceiling & 63)
    for i in range(npos):
        for b in range(i + 1, npos):
            d = <int> (c.positive[b] - c.positive[i])
            if d > ceiling:
                break
            if d >= w_min:
                c.cand[d >> 6] |= 1ULL << (d & 63)

    # Extract before recursing: deeper nodes reuse the scratch buffers.
    cdef int n_weights = 0
    cdef int *wlist = _extract_desc(c.cand, cw, &n_weights)
    cdef int *elig = c.eligible + (<size_t> (c.k - j)) * c.n
    cdef int wi
    try:
        for wi in range(n_weights):
            w = wlist[wi]
            n_eligible = 0
            for b in range(c.n):
                if c.res[b] >= w:
                    elig[n_eligible] = b
                    n_eligible += 1
            floor_mask = prev_mask if w == prev_w else 0
            if n_eligible <= COLLECT_LIMIT:
                cap = 1024
                count = 0
                masks = <u64 *> malloc(cap * sizeof(u64))
                keys = <i64 *> malloc(cap * sizeof(i64))
                if masks == NULL or keys == NULL:
                    free(masks)
                    free(keys)
                    raise MemoryError()
                found = False
                if _cc_collect(c, elig, 0, n_eligible, 0, 0, floor_mask,
                               &masks, &keys, &count, &cap):
                    _i64_sort(keys, count)
                    for idx in range(count):
                        if _cc_apply(c, memo, j, w,
                                     masks[keys[idx] & 0xFFFFFF]):
                            found = True
                            break
                        if c.clock.aborted:
                            break
                free(masks)
                free(keys)
                if found:
                    return True
            else:
                if _cc_inline(c, memo, j, w, elig, 0, n_eligible, 0, 0,
                              floor_mask):
                    return True
            if c.clock.aborted:
                return False
        return False
    finally:
        free(wlist)


cdef class _CCHandle:
    cdef CC c
    cdef bint ready

    def __cinit__(self, residuals, adjacency_masks, int n_max, int k,
                  clique_masks, i64 deadline_ns, i64 node_budget,
                  int relax_depth):
        cdef int n = len(residuals)
        cdef int i
        cdef i64 maxres = 1
        for i in range(n):
            if residuals[i] > maxres:
                maxres = residuals[i]
        self.c.n = n
        self.c.n_max = n_max
        self.c.k = k
        self.c.relax_depth = relax_depth
        self.c.n_cliques = len(clique_masks)
        self.c.cand_words = <int> ((maxres >> 6) + 1)
        self.c.clock.nodes = 0
        self.c.clock.polls = 0
        self.c.clock.node_budget = node_budget
        self.c.clock.deadline_ns = deadline_ns
        self.c.clock.aborted = 0
        self.c.res = <i64 *> malloc(n * sizeof(i64))
        self.c.adj = <u64 *> malloc(n * sizeof(u64))
        self.c.cliques = <u64 *> malloc(max(1, self.c.n_cliques) * sizeof(u64))
        self.c.ch_w = <int *> malloc(k * sizeof(int))
        self.c.ch_mask = <u64 *> malloc(k * sizeof(u64))
        self.c.eligible = <int *> malloc((<size_t> k + 1) * n * sizeof(int))
        self.c.positive = <i64 *> malloc(n * sizeof(i64))
        self.c.cand = <u64 *> malloc(self.c.cand_words * sizeof(u64))
        if (self.c.res == NULL or self.c.adj == NULL or self.c.cliques == NULL
                or self.c.ch_w == NULL or self.c.ch_mask == NULL
                or self.c.eligible == NULL or self.c.positive == NULL
                or self.c.cand == NULL):
            raise MemoryError()
        for i in range(n):
            self.c.res[i] = residuals[i]
            self.c.adj[i] = adjacency_masks[i]
        for i in range(self.c.n_cliques):
            self.c.cliques[i] = clique_masks[i]
        self.ready = True

    def __dealloc__(self):
        if self.ready:
            free(self.c.res)
            free(self.c.adj)
            free(self.c.cliques)
            free(self.c.ch_w)
            free(self.c.ch_mask)
            free(self.c.eligible)
            free(self.c.positive)
            free(self.c.cand)

    def run(self):
        memo = {}
        cdef bint ok = _cc_descend(&self.c, memo, self.c.k, 1, 0, 0)
        if ok:
            out = [
                (self.c.ch_w[i], int(self.c.ch_mask[i])) for i in range(self.c.k)
            ]
            return FOUND, out, self.c.clock.nodes
        if self.c.clock.aborted:
            return self.c.clock.aborted, None, self.c.clock.nodes
        return INFEASIBLE, None, self.c.clock.nodes


def constrained_search(residuals, adjacency_masks, n_max, k, clique_masks=(),
                       deadline_ns=None, node_budget=None, relax_depth=7):
    """Compiled twin of _kernel_py.constrained_search (max 64 beams)."""
    if len(residuals) > 64:
        raise ValueError("compiled kernel handles at most 64 beams")
    handle = _CCHandle(
        list(residuals), list(adjacency_masks), n_max, k, list(clique_masks),
        -1 if deadline_ns is None else deadline_ns,
        -1 if node_budget is None else node_budget,
        relax_depth,
    )
    return handle.run()
