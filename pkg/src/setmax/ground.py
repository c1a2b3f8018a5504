"""Ground sets, set-function oracles, and the brute-force reference maximizer.

Every optimization routine in this package is ultimately checked against
``brute_force_argmax``, which scans all 2^n subsets and breaks value ties by
the smaller bitmask. That total order (value descending, mask ascending) is
the package-wide notion of "the" maximizer.
"""

import math

import numpy as np

from .bits import WORD_CAPACITY, better, full_mask, iter_elements, popcount

ARGMAX_CAP = 24
PAIRWISE_CAP = 14
DEFAULT_TOL = 1e-9

# Largest n for which a full value table is materialized (2^20 doubles).
_TABLE_CAP = 20


class GroundSet:
    """A finite ground set of n indexed elements, optionally labeled."""

    def __init__(self, n, labels=None):
        if n < 1:
            raise ValueError("ground set needs at least one element")
        if n > WORD_CAPACITY:
            raise ValueError(f"ground set capped at {WORD_CAPACITY} elements")
        if labels is not None and len(labels) != n:
            raise ValueError("label count must match n")
        self.n = n
        self.labels = tuple(labels) if labels is not None else None

    def __repr__(self):
        return f"GroundSet(n={self.n})"


def _ground_size(g):
    return g.n if hasattr(g, "n") else int(g)


class SetFunction:
    """An evaluation oracle over subsets of a fixed ground set.

    The oracle must be pure: same mask in, same value out, safe to call from
    any thread. ``bound_M`` is a declared strict bound on absolute values,
    used for default scaling; ``is_normalized`` asserts value 0 at the empty
    set (verified at construction).
    """

    def __init__(self, n, evaluator, bound=math.inf, normalized=False, name=""):
        if n < 1 or n > WORD_CAPACITY:
            raise ValueError("bad ground size")
        self.n = n
        self._eval = evaluator
        self.bound_M = float(bound)
        self.is_normalized = bool(normalized)
        self.name = name
        self._table = None
        if self.is_normalized and evaluator(0) != 0:
            raise ValueError("function claims normalization but value at {} is nonzero")

    def __call__(self, mask):
        return self._eval(mask)

    def table(self):
        """Full value table as a float array indexed by mask. Cached."""
        if self._table is None:
            if self.n > _TABLE_CAP:
                raise ValueError(f"value table capped at n <= {_TABLE_CAP}")
            ev = self._eval
            self._table = np.array([ev(s) for s in range(1 << self.n)], dtype=float)
        return self._table

    def normalize(self):
        """Return this function shifted so the empty set evaluates to 0."""
        shift = self._eval(0)
        if shift == 0:
            if self.is_normalized:
                return self
            out = SetFunction(self.n, self._eval, bound=self.bound_M,
                              normalized=True, name=self.name)
            out._table = self._table
            return out
        ev = self._eval
        return SetFunction(self.n, lambda s: ev(s) - shift,
                           bound=self.bound_M + abs(shift), normalized=True,
                           name=self.name)

    def __repr__(self):
        return f"SetFunction(n={self.n}, name={self.name!r})"


def evaluate(fn, mask):
    """Checked oracle access: validates the mask fits fn's ground set."""
    if mask < 0 or mask >> fn.n:
        raise ValueError(f"subset {bin(mask)} does not fit a {fn.n}-element ground set")
    return fn(mask)


def table_function(values, bound=None, name="table"):
    """Set function backed by an explicit table of 2^n values."""
    size = len(values)
    n = size.bit_length() - 1
    if size != (1 << n) or n < 1:
        raise ValueError("table length must be a power of two, at least 2")
    vals = [float(v) for v in values]
    if bound is None:
        bound = max(abs(v) for v in vals) + 1.0
    fn = SetFunction(n, vals.__getitem__, bound=bound,
                     normalized=(vals[0] == 0.0), name=name)
    fn._table = np.array(vals, dtype=float)
    return fn


def modular_function(weights, name="modular"):
    """Weight-sum function: value of a set is the sum of member weights."""
    w = [float(x) for x in weights]

    def ev(mask):
        return sum(w[i] for i in iter_elements(mask))

    return SetFunction(len(w), ev, bound=sum(abs(x) for x in w) + 1.0,
                       normalized=True, name=name)


def coverage_function(n, covers, universe, name="coverage"):
    """Coverage oracle: value of S is |union of covers[i] for i in S|.

    ``covers`` holds one bitmask per element over a universe of ``universe``
    items. Monotone, submodular, normalized, integer-valued.
    """
    cov = list(covers)
    if len(cov) != n:
        raise ValueError("need one cover mask per element")

    def ev(mask):
        u = 0
        for i in iter_elements(mask):
            u |= cov[i]
        return float(popcount(u))

    return SetFunction(n, ev, bound=universe + 1.0, normalized=True, name=name)


def brute_force_argmax(fn, g=None, cap=ARGMAX_CAP):
    """Exhaustive maximizer under the total order (value desc, mask asc).

    The reference oracle everything else is tested against; deliberately a
    plain scan with no shortcuts.
    """
    n = _ground_size(g) if g is not None else fn.n
    if n > cap:
        raise ValueError(f"brute force refused: n={n} exceeds cap {cap}")
    best_s = 0
    best_v = fn(0)
    for s in range(1, 1 << n):
        v = fn(s)
        if better(v, s, best_v, best_s):
            best_s, best_v = s, v
    return best_s, best_v


def _pair_gap_scan(table, n, reducer, chunk=64):
    """Apply ``reducer(gap, a_masks, b_masks)`` over all subset pairs.

    gap[A, B] = f(A|B) + f(A&B) - f(A) - f(B), vectorized in row chunks to
    bound memory at chunk * 2^n doubles.
    """
    size = 1 << n
    all_b = np.arange(size, dtype=np.int64)[None, :]
    for a0 in range(0, size, chunk):
        a = np.arange(a0, min(a0 + chunk, size), dtype=np.int64)[:, None]
        union = a | all_b
        inter = a & all_b
        gap = table[union] + table[inter] - table[a] - table[all_b]
        reducer(gap, a, all_b)


def is_submodular(fn, g=None, tol=DEFAULT_TOL, cap=PAIRWISE_CAP):
    """Check f(A) + f(B) >= f(A|B) + f(A&B) for every pair, within tol."""
    n = _ground_size(g) if g is not None else fn.n
    if n > cap:
        raise ValueError(f"pairwise check refused: n={n} exceeds cap {cap}")
    table = fn.table()
    worst = [0.0]

    def red(gap, a, b):
        m = float(gap.max())
        if m > worst[0]:
            worst[0] = m

    _pair_gap_scan(table, n, red)
    return worst[0] <= tol


def is_supermodular(fn, g=None, tol=DEFAULT_TOL, cap=PAIRWISE_CAP):
    n = _ground_size(g) if g is not None else fn.n
    neg = SetFunction(n, lambda s: -fn(s), bound=fn.bound_M)
    return is_submodular(neg, n, tol=tol, cap=cap)


def is_modular(fn, g=None, tol=DEFAULT_TOL, cap=PAIRWISE_CAP):
    return is_submodular(fn, g, tol=tol, cap=cap) and is_supermodular(fn, g, tol=tol, cap=cap)


def submodularity_violation(fn, n, tol=DEFAULT_TOL):
    """Return a violating pair (A, B) if f is not submodular, else None.

    Scans the local triples f(S+i) + f(S+j) vs f(S+i+j) + f(S), which violate
    iff some pair does: for nested pairs the defining inequality is an
    identity, and any violating incomparable pair forces a violating triple
    along a lattice path between them.
    """
    table = fn.table()
    size = 1 << n
    masks = np.arange(size, dtype=np.int64)
    for i in range(n):
        bi = 1 << i
        for j in range(i + 1, n):
            bj = 1 << j
            s = masks[(masks & (bi | bj)) == 0]
            viol = (table[s | bi | bj] + table[s]) - (table[s | bi] + table[s | bj])
            k = int(np.argmax(viol))
            if viol[k] > tol:
                return int(s[k]) | bi, int(s[k]) | bj
    return None
