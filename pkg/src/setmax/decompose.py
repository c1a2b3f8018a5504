"""Decompose an arbitrary set function as a submodular part minus a graph cut.

For any theta and large enough alpha > 0, f := theta/alpha + cut_G is
submodular when G is the complete graph: the cut of K_n is strictly
submodular with integer slack 2 * |A\\B| * |B\\A| on incomparable pairs,
which absorbs theta's worst submodularity violation once alpha is large
enough. Maximizing theta is then the same problem as maximizing f - cut.
"""

import math

import numpy as np

from .bits import better, full_mask, iter_elements, popcount, subset_str
from .ground import (PAIRWISE_CAP, SetFunction, _ground_size, _pair_gap_scan,
                     brute_force_argmax, submodularity_violation)
from .graph import Graph, cut, cut_table, is_dominating

ALPHA_FLOOR = 1e-6
VALIDATE_CAP = 12


class DecompositionError(ValueError):
    pass


class Decomposition:
    """A validated representation theta/alpha = f - cut_G (after normalization).

    ``shift`` records theta's original empty-set value, so optima found in
    f - cut units can be reported in original theta units:
    theta(S) = alpha * (f - cut)(S) + shift.
    """

    def __init__(self, f, graph, alpha, theta, shift=0.0):
        if alpha <= 0:
            raise DecompositionError("alpha must be positive")
        if not f.is_normalized:
            raise DecompositionError("f must be normalized")
        if f.n != graph.n:
            raise DecompositionError("f and G must share the ground set")
        self.f = f
        self.graph = graph
        self.alpha = float(alpha)
        self.theta = theta
        self.shift = float(shift)
        self.n = f.n

    def objective(self, mask):
        """(f - cut)(mask); the quantity the search maximizes."""
        return self.f(mask) - cut(self.graph, mask)

    def to_theta_units(self, value):
        return self.alpha * value + self.shift

    def __repr__(self):
        return f"Decomposition(n={self.n}, alpha={self.alpha})"


def modularity_gap(theta, g=None, cap=PAIRWISE_CAP):
    """Worst submodularity violation of theta over all subset pairs.

    max over A, B of theta(A|B) + theta(A&B) - theta(A) - theta(B); at least
    0 because A = B contributes exactly 0. Zero iff theta is submodular.
    """
    n = _ground_size(g) if g is not None else theta.n
    if n > cap:
        raise ValueError(f"pair scan refused: n={n} exceeds cap {cap}")
    table = theta.table()
    worst = [0.0]

    def red(gap, a, b):
        m = float(gap.max())
        if m > worst[0]:
            worst[0] = m

    _pair_gap_scan(table, n, red)
    return worst[0]


def min_alpha(theta, g=None, alpha_min=ALPHA_FLOOR, cap=PAIRWISE_CAP):
    """Smallest alpha making theta/alpha + cut_{K_n} submodular, floored.

    The binding constraints are the pairs A = S+i, B = S+j (|A\\B| =
    |B\\A| = 1): submodularity of the shifted sum at such a pair needs
    gap(A,B) <= 2*alpha, and by diminishing returns those pairs already
    imply every other pair, whose complete-graph slack 2*|A\\B|*|B\\A| only
    grows. So the exact threshold is half the worst triple violation.
    """
    n = _ground_size(g) if g is not None else theta.n
    if n > cap:
        raise ValueError(f"scan refused: n={n} exceeds cap {cap}")
    table = theta.table()
    masks = np.arange(1 << n, dtype=np.int64)
    worst = 0.0
    for i in range(n):
        bi = 1 << i
        for j in range(i + 1, n):
            bj = 1 << j
            s = masks[(masks & (bi | bj)) == 0]
            gap = (table[s | bi | bj] + table[s]) - (table[s | bi] + table[s | bj])
            m = float(gap.max())
            if m > worst:
                worst = m
    return max(alpha_min, worst / 2.0)


def min_alpha_pairwise(theta, g=None, alpha_min=ALPHA_FLOOR, cap=PAIRWISE_CAP):
    """Literal all-pairs form of min_alpha: max gap(A,B)/(2|A\\B||B\\A|).

    Slower than min_alpha but independent of the triple reduction; kept as a
    cross-check oracle.
    """
    n = _ground_size(g) if g is not None else theta.n
    if n > cap:
        raise ValueError(f"pair scan refused: n={n} exceeds cap {cap}")
    table = theta.table()
    size = 1 << n
    pc = np.array([s.bit_count() for s in range(size)], dtype=np.int64)
    worst = [0.0]

    def red(gap, a, b):
        only_a = pc[a & ~b]
        only_b = pc[b & ~a]
        denom = 2.0 * only_a * only_b
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(denom > 0, gap / np.where(denom > 0, denom, 1.0), -math.inf)
        m = float(ratio.max())
        if m > worst[0]:
            worst[0] = m

    _pair_gap_scan(table, n, red)
    return max(alpha_min, worst[0])


def default_alpha(M):
    """Scaling constant 4M, always sufficient when |theta| < M."""
    if M <= 0:
        raise ValueError("bound M must be positive")
    return 4.0 * M


def decompose(theta, alpha=None, graph=None, validate=None, tol=1e-9):
    """Build the decomposition theta/alpha = f - cut_G.

    alpha None picks min_alpha for small ground sets and 4 * bound_M
    otherwise; graph None uses the complete graph. Unless ``validate`` is
    False (or n is over the validation cap), submodularity of f is verified
    and a violating pair is reported on failure. theta is normalized first;
    the shift is recorded on the Decomposition.
    """
    n = theta.n
    if graph is None:
        graph = Graph.complete(n)
    if graph.n != n:
        raise DecompositionError("graph and theta must share the ground set")
    if alpha is None:
        if n <= PAIRWISE_CAP:
            alpha = min_alpha(theta)
        elif math.isfinite(theta.bound_M):
            alpha = default_alpha(theta.bound_M)
        else:
            raise DecompositionError("cannot pick alpha: no bound and n too large")
    if alpha <= 0:
        raise DecompositionError("alpha must be positive")

    norm = theta.normalize()
    shift = 0.0 if norm is theta else theta(0)

    ctab = cut_table(graph) if n <= VALIDATE_CAP else None
    if ctab is not None and hasattr(norm, "table"):
        ttab = norm.table()
        ftab = ttab / alpha + ctab
        values = ftab.tolist()
        f = SetFunction(n, values.__getitem__,
                        bound=norm.bound_M / alpha + graph.m + 1.0,
                        normalized=True, name="f")
        f._table = ftab
    else:
        def ev(mask, _t=norm, _a=alpha, _g=graph):
            return _t(mask) / _a + cut(_g, mask)

        f = SetFunction(n, ev, bound=norm.bound_M / alpha + graph.m + 1.0,
                        normalized=True, name="f")

    if validate is None:
        validate = n <= VALIDATE_CAP
    if validate:
        if n > VALIDATE_CAP:
            raise DecompositionError(f"validation capped at n <= {VALIDATE_CAP}")
        pair = submodularity_violation(f, n, tol=tol)
        if pair is not None:
            a, b = pair
            raise DecompositionError(
                f"f = theta/{alpha} + cut is not submodular: violated at "
                f"A={subset_str(a)}, B={subset_str(b)}")
    return Decomposition(f, graph, alpha, theta, shift)


def from_parts(f, graph, alpha=1.0):
    """Decomposition assembled directly from a submodular f and a graph.

    theta is derived as alpha * (f - cut); the caller vouches for f's
    submodularity (generators and tests use this to make valid instances).
    """
    def ev(mask, _f=f, _g=graph, _a=alpha):
        return _a * (_f(mask) - cut(_g, mask))

    theta = SetFunction(f.n, ev, bound=alpha * (f.bound_M + graph.m),
                        normalized=f.is_normalized, name="theta")
    return Decomposition(f, graph, alpha, theta, shift=0.0)


def lift_empty(theta):
    """theta with its empty-set value raised to the best singleton value.

    Agrees with theta on every non-empty set; at the empty set returns
    max(theta({}), max over singletons). Any maximizer of theta still
    maximizes the lifted function.
    """
    n = theta.n
    lifted0 = max(theta(0), max(theta(1 << v) for v in range(n)))

    def ev(mask):
        return lifted0 if mask == 0 else theta(mask)

    return SetFunction(n, ev, bound=theta.bound_M, name="lifted")


def maximizer_dominates(dec, cap=None):
    """Check the structure of the lifted function's maximizer against dec.graph.

    Computes the brute-force maximizer V* of the lifted theta through the
    decomposition's own scale (f built as lifted/alpha + cut) and reports
    True iff V* is empty, a singleton, or a dominating set of dec.graph.
    """
    n = dec.n
    norm = dec.theta.normalize()
    tilde = lift_empty(norm)

    def obj(mask, _t=tilde, _a=dec.alpha):
        return _t(mask) / _a

    fn = SetFunction(n, obj, bound=tilde.bound_M / dec.alpha + 1.0)
    vstar, _ = brute_force_argmax(fn, n, cap=cap if cap is not None else 24)
    if vstar == 0 or popcount(vstar) == 1:
        return True
    return is_dominating(dec.graph, vstar)
