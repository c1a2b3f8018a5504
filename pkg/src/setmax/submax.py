"""Engines for maximizing a submodular function over lattice domains.

Three routes, trading generality for work:
  * ``maximize_modular``: closed form for weight sums, linear time.
  * ``interval_max``: exact search over an interval [lo, hi] of subsets,
    shrinking intervals with the two preservation inequalities before
    branching.
  * ``ls_max``: local search with a multiplicative improvement threshold;
    on a non-negative submodular g it returns a value within a
    (1/3 - eps/r) factor of the maximum.

All argmax outputs obey the package total order (value desc, mask asc).
"""

from dataclasses import dataclass, field

from .bits import better, bit, iter_elements, popcount


@dataclass(frozen=True)
class Interval:
    """The family of subsets between lo and hi (inclusive), lo <= hi setwise."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo & ~self.hi:
            raise ValueError("interval lower end must be contained in the upper end")


@dataclass
class LSResult:
    best: int
    value: float
    subiterations: int
    trace: list = field(default_factory=list)


def maximize_modular(weights, domain):
    """Maximizer of a weight sum over all subsets of domain.

    Takes every element of non-negative weight (zeros included) and returns
    the set with its weight sum.
    """
    chosen = 0
    total = 0.0
    for v in iter_elements(domain):
        w = weights[v]
        if w >= 0:
            chosen |= bit(v)
            total += w
    return chosen, total


def preservation_check(g, iv, v):
    """The two interval-shrinking tests for a submodular g at free element v.

    Returns (prune_upper, prune_lower):
      prune_upper: g(lo) - g(lo+v) >= 0, so [lo+v, hi] may be discarded;
      prune_lower: g(hi) - g(hi-v) >= 0, so [lo, hi-v] may be discarded.
    """
    vb = bit(v)
    if not (iv.hi & vb) or (iv.lo & vb):
        raise ValueError(f"element {v} is not free in the interval")
    prune_upper = g(iv.lo) - g(iv.lo | vb) >= 0
    prune_lower = g(iv.hi) - g(iv.hi & ~vb) >= 0
    return prune_upper, prune_lower


def interval_max(g, iv, seeds=(), value_map=None):
    """Exact total-order maximizer of a submodular g over an interval.

    Depth-first over subintervals. At each interval both preservation rules
    are swept to a fixpoint; the upper rule fires at >= 0 (for any set A
    containing v, A - v is at least as good and has the smaller mask, so the
    discarded half never holds the total-order winner), while the lower rule
    needs strictly > 0 (at equality a set without v can tie its v-extension
    and win the mask tie-break, so it must stay reachable).

    Surviving intervals are then bounded by the marginal sums at both
    endpoints (submodularity makes each an upper bound over the interval)
    and skipped when they cannot beat the incumbent; an equal bound is only
    skipped when the incumbent mask is <= lo, since every member's mask is
    >= lo and the mask tie-break could not improve. Otherwise the search
    branches on the free element with the largest absolute marginal at lo.

    ``seeds`` are optional member masks evaluated up front as incumbent
    candidates; a good seed tightens the bound test early and never changes
    the result. ``value_map`` may hold precomputed oracle values keyed by
    mask (a complete map makes the search oracle-free).
    """
    memo = value_map if value_map is not None else {}

    def val(s):
        v = memo.get(s)
        if v is None:
            v = g(s)
            memo[s] = v
        return v

    best_s = iv.lo
    best_v = val(iv.lo)
    for s in seeds:
        if s & ~iv.hi or ~s & iv.lo:
            continue
        v = val(s)
        if better(v, s, best_v, best_s):
            best_s, best_v = s, v

    memo_get = memo.get
    stack = [(iv.lo, iv.hi)]
    while stack:
        lo, hi = stack.pop()
        glo = val(lo)
        if better(glo, lo, best_v, best_s):
            best_s, best_v = lo, glo
        if lo != hi:
            ghi = val(hi)
            if better(ghi, hi, best_v, best_s):
                best_s, best_v = hi, ghi
            # Sweep both rules to a fixpoint. A shrink of hi leaves every
            # rule test for later elements valid against the current
            # interval, and shrinks missed because an endpoint moved are
            # optional prunes anyway, so a follow-up round (cheap, all
            # values memoized) restores the fixpoint without restarts.
            while lo != hi:
                any_change = False
                free = hi & ~lo
                while free:
                    vb = free & -free
                    free ^= vb
                    s = lo | vb
                    up = memo_get(s)
                    if up is None:
                        up = g(s)
                        memo[s] = up
                    if glo >= up:
                        hi &= ~vb
                        ghi = val(hi)
                        if better(ghi, hi, best_v, best_s):
                            best_s, best_v = hi, ghi
                        any_change = True
                        continue
                    s = hi & ~vb
                    dn = memo_get(s)
                    if dn is None:
                        dn = g(s)
                        memo[s] = dn
                    if ghi > dn:
                        lo |= vb
                        glo = up
                        if better(glo, lo, best_v, best_s):
                            best_s, best_v = lo, glo
                        any_change = True
                if not any_change:
                    break
        if lo == hi:
            continue
        up_sum = 0.0
        down_sum = 0.0
        pick = 0
        pick_gain = -1.0
        free = hi & ~lo
        while free:
            vb = free & -free
            free ^= vb
            s = lo | vb
            up = memo_get(s)
            if up is None:
                up = g(s)
                memo[s] = up
            up -= glo
            if up > 0:
                up_sum += up
            s = hi & ~vb
            dn = memo_get(s)
            if dn is None:
                dn = g(s)
                memo[s] = dn
            dn -= ghi
            if dn > 0:
                down_sum += dn
            gain = up if up >= 0 else -up
            if gain > pick_gain:
                pick, pick_gain = vb, gain
        bound = glo + up_sum
        alt = ghi + down_sum
        if alt < bound:
            bound = alt
        if bound < best_v or (bound == best_v and best_s <= lo):
            continue
        stack.append((lo, hi & ~pick))
        stack.append((lo | pick, hi))   # explored first: keeps the branch element
    return best_s, best_v


def _improves(new_val, cur_val, factor):
    # The multiplicative test is vacuous at non-positive current values;
    # there any strict improvement is accepted.
    if cur_val > 0:
        return new_val > factor * cur_val
    return new_val > cur_val


def ls_max(g, epsilon, domain=None, require_nonnegative=True):
    """Threshold local search for a non-negative submodular g over 2^domain.

    Starts at the best singleton, then repeatedly applies the first (by
    ascending element index) single-element add, else delete, that improves
    the value by a factor of more than 1 + epsilon/r^2, r = |domain|.
    Returns the better of the terminal set and its complement in domain.

    Raises on a negative oracle value: the approximation guarantee only
    exists for non-negative g. Penalized objectives that are negative by
    design may pass require_nonnegative=False.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if domain is None:
        domain = (1 << g.n) - 1
    r = popcount(domain)

    def val(s):
        v = g(s)
        if require_nonnegative and v < 0:
            raise ValueError(f"negative value {v} at {bin(s)}: ls_max needs a non-negative oracle")
        return v

    if r == 0:
        v0 = val(0)
        return LSResult(0, v0, 0, [0])

    factor = 1.0 + epsilon / (r * r)
    cur = -1
    cur_val = -1.0
    for x in iter_elements(domain):
        v = val(bit(x))
        if v > cur_val:
            cur, cur_val = bit(x), v
    trace = [cur]
    moves = 0
    while True:
        moved = False
        for x in iter_elements(domain & ~cur):
            v = val(cur | bit(x))
            if _improves(v, cur_val, factor):
                cur, cur_val = cur | bit(x), v
                trace.append(cur)
                moves += 1
                moved = True
                break
        if moved:
            continue
        for x in iter_elements(cur):
            v = val(cur & ~bit(x))
            if _improves(v, cur_val, factor):
                cur, cur_val = cur & ~bit(x), v
                trace.append(cur)
                moves += 1
                moved = True
                break
        if not moved:
            break
    comp = domain & ~cur
    comp_val = val(comp)
    if better(comp_val, comp, cur_val, cur):
        return LSResult(comp, comp_val, moves, trace)
    return LSResult(cur, cur_val, moves, trace)
