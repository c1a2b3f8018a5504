"""Simple undirected graphs with cut, bivariate cut, and domination queries.

Adjacency is stored as one neighbor bitmask per vertex, so every cut-style
query is a handful of word operations. All cut arithmetic is exact integer.
"""

import numpy as np

from .bits import full_mask, iter_elements, popcount
from .ground import SetFunction


class Graph:
    """Immutable simple graph on vertices 0..n-1."""

    def __init__(self, n, edges=()):
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        adj = [0] * n
        seen = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.n = n
        self.adj = tuple(adj)
        self.edge_list = tuple(sorted(seen))
        self.m = len(self.edge_list)
        self._cut_table = None

    @classmethod
    def complete(cls, n):
        return cls(n, [(u, v) for u in range(n) for v in range(u + 1, n)])

    @classmethod
    def empty(cls, n):
        return cls(n)

    @classmethod
    def path(cls, n):
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def degree(G, v):
    return popcount(G.adj[v])


def cut(G, mask):
    """Number of edges with exactly one endpoint inside mask."""
    total = 0
    for v in iter_elements(mask):
        total += popcount(G.adj[v] & ~mask)
    return total


def bicut(G, a, b):
    """Number of edges with one endpoint in a and the other in b."""
    total = 0
    for u, v in G.edge_list:
        ub, vb = 1 << u, 1 << v
        if (a & ub and b & vb) or (a & vb and b & ub):
            total += 1
    return total


def induced_edges(G, mask):
    """Number of edges with both endpoints inside mask."""
    total = 0
    for v in iter_elements(mask):
        total += popcount(G.adj[v] & mask)
    return total // 2


def cut_identity_holds(G, a, b):
    """Exact integer identity relating cuts of a, b to their union/intersection.

    cut(a) + cut(b) == cut(a|b) + cut(a&b) + 2 * bicut(a \\ b, b \\ a).
    """
    lhs = cut(G, a) + cut(G, b)
    rhs = cut(G, a | b) + cut(G, a & b) + 2 * bicut(G, a & ~b, b & ~a)
    return lhs == rhs


def is_dominating(G, mask):
    """True iff every vertex outside mask has a neighbor inside it.

    The full vertex set dominates vacuously; the empty set dominates only an
    empty graph (n = 0 never occurs here, so empty is never dominating).
    """
    outside = full_mask(G.n) & ~mask
    for v in iter_elements(outside):
        if not G.adj[v] & mask:
            return False
    return True


def cut_function(G, name="cut"):
    """The cut oracle of G as a SetFunction (submodular, normalized)."""
    fn = SetFunction(G.n, lambda s: float(cut(G, s)), bound=G.m + 1.0,
                     normalized=True, name=name)
    return fn


def cut_table(G):
    """Cut values for all 2^n subsets as an int array, vectorized."""
    n = G.n
    size = 1 << n
    masks = np.arange(size, dtype=np.int64)
    member = ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(np.int64)
    adjmat = np.zeros((n, n), dtype=np.int64)
    for u, v in G.edge_list:
        adjmat[u, v] = 1
        adjmat[v, u] = 1
    degs = adjmat.sum(axis=1)
    inside = member @ adjmat          # inside[s, v] = |adj(v) & s|
    return (member * (degs[None, :] - inside)).sum(axis=1)
