"""Seeded random instances for tests, verification suites, and benchmarks.

Everything is driven by a ``random.Random`` so a seed fully determines the
instance. Submodular functions are built constructively (coverage oracles,
cuts, non-negative weight sums and mixes) rather than by rejection, so the
generated structure is certain, not sampled-and-hoped.
"""

import random

from .bits import bit, full_mask, iter_elements, popcount
from .decompose import Decomposition, from_parts
from .graph import Graph, cut_function, degree
from .ground import SetFunction, coverage_function, modular_function, table_function
from .constrained import SubsetSystem


def rng(seed, salt=0):
    return random.Random(seed * 1_000_003 + salt)


def random_table_function(n, r, lo=-1.0, hi=1.0):
    return table_function([r.uniform(lo, hi) for _ in range(1 << n)])


def random_graph(n, r, p=0.5):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if r.random() < p]
    return Graph(n, edges)


def random_coverage_function(n, r, universe=None, p=0.35):
    """Random coverage oracle; every element covers at least one item."""
    m = universe if universe is not None else 2 * n
    covers = []
    for _ in range(n):
        c = 0
        for j in range(m):
            if r.random() < p:
                c |= 1 << j
        if c == 0:
            c = 1 << r.randrange(m)
        covers.append(c)
    return coverage_function(n, covers, m)


def random_nonneg_modular(n, r, hi=2.0):
    return modular_function([r.uniform(0.0, hi) for _ in range(n)])


def random_submodular_function(n, r):
    """Random submodular, normalized function: coverage + cut + weights mix."""
    cov = random_coverage_function(n, r)
    g = random_graph(n, r, p=0.4)
    cutf = cut_function(g)
    w = [r.uniform(0.0, 2.0) for _ in range(n)]
    a = r.uniform(0.5, 2.0)
    b = r.uniform(0.0, 1.0)

    def ev(mask):
        return a * cov(mask) + b * cutf(mask) + sum(w[i] for i in iter_elements(mask))

    bound = a * cov.bound_M + b * cutf.bound_M + sum(w) + 1.0
    return SetFunction(n, ev, bound=bound, normalized=True, name="submodular-mix")


def random_supermodular_function(n, r):
    """Mirror image of the submodular mix (plus a weight sum)."""
    sub = random_submodular_function(n, r)
    w = [r.uniform(-1.0, 1.0) for _ in range(n)]

    def ev(mask):
        return -sub(mask) + sum(w[i] for i in iter_elements(mask))

    return SetFunction(n, ev, bound=sub.bound_M + sum(abs(x) for x in w) + 1.0,
                       normalized=True, name="supermodular-mix")


def random_nonneg_supermodular(n, r):
    """Non-negative, normalized, supermodular: edge counts plus squared sums.

    Weights are zeroed with some probability so the zero sublevel family is
    usually richer than just the empty set.
    """
    g = random_graph(n, r, p=0.5)
    w = [r.uniform(0.2, 1.5) if r.random() < 0.5 else 0.0 for _ in range(n)]
    a = r.uniform(0.0, 2.0)

    def ev(mask):
        inner = 0
        for v in iter_elements(mask):
            inner += popcount(g.adj[v] & mask)
        tot = sum(w[i] for i in iter_elements(mask))
        return a * (inner // 2) + tot * tot

    bound = a * g.m + sum(w) ** 2 + 1.0
    return SetFunction(n, ev, bound=bound, normalized=True, name="supermodular-nn")


def random_nonneg_decomposition(n, r):
    """Valid decomposition with a non-negative objective and positive singletons.

    f = coverage + degree weights is submodular and normalized, and
    f - cut = coverage + 2 * (induced edge count) >= coverage >= 0, with
    every singleton worth its (strictly positive) coverage.
    """
    cov = random_coverage_function(n, r)
    g = random_graph(n, r, p=0.5)

    def fev(mask):
        return cov(mask) + sum(degree(g, v) for v in iter_elements(mask))

    f = SetFunction(n, fev, bound=cov.bound_M + 2.0 * g.m + 1.0,
                    normalized=True, name="f")
    return from_parts(f, g)


def random_decomposition(n, r):
    """Valid decomposition from a random submodular f and a random graph."""
    f = random_submodular_function(n, r)
    g = random_graph(n, r, p=0.5)
    return from_parts(f, g)


def random_system(n, r, kinds=("cardinality", "graph-independence", "explicit")):
    """Random downward-closed system containing every singleton."""
    kind = r.choice(list(kinds))
    if kind == "cardinality":
        return SubsetSystem.cardinality(n, r.randint(1, n))
    if kind == "graph-independence":
        return SubsetSystem.graph_independence(random_graph(n, r, p=0.4))
    count = r.randint(2, max(2, n // 2 + 1))
    sets = []
    uncovered = full_mask(n)
    for _ in range(count):
        m = 0
        for v in range(n):
            if r.random() < 0.45:
                m |= bit(v)
        if m == 0:
            m = bit(r.randrange(n))
        sets.append(m)
        uncovered &= ~m
    for v in iter_elements(uncovered):
        sets.append(bit(v))
    return SubsetSystem.explicit(n, sets)
