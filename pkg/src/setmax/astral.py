"""Star-union graphs: the canonical node space of the branch and bound.

Every node of the search corresponds to a graph on the ground set that is a
union of stars centered at vertices outside one distinguished independent
set. Such a graph is determined by that independent set alone, so a node is
stored as just the independent-set bitmask. The complete graph (no
independent pair left) is encoded by mask 0; masks of population 1 cannot
occur, because adding a star to a graph whose independent set has two
vertices already saturates it.
"""

from dataclasses import dataclass

from .bits import bit, full_mask, iter_elements, popcount
from .graph import degree


@dataclass(frozen=True)
class Astral:
    """One search node: ground size n plus its independent-set mask."""

    n: int
    indep: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("astral graphs need at least two vertices")
        if self.indep >> self.n:
            raise ValueError("independent set does not fit the ground set")
        if popcount(self.indep) == 1:
            raise ValueError("an astral graph cannot have a singleton independent set")

    @classmethod
    def root(cls, n):
        """The edgeless graph; its maximal independent set is everything."""
        return cls(n, full_mask(n))

    @property
    def is_complete(self):
        return self.indep == 0

    @property
    def size(self):
        return popcount(self.indep)

    def branch(self, v):
        """Add the star centered at v; v must currently be independent.

        Removing v from a >= 3 element independent set leaves the child's
        independent set; from a 2 element set the added star completes the
        graph, giving the mask-0 marker.
        """
        if self.is_complete:
            raise ValueError("cannot branch from the complete graph")
        vb = bit(v)
        if not self.indep & vb:
            raise ValueError(f"vertex {v} is not in the independent set")
        rest = self.indep & ~vb
        if popcount(rest) == 1:
            rest = 0
        return Astral(self.n, rest)

    def children(self):
        """(vertex, child) pairs for every admissible branch."""
        return [(v, self.branch(v)) for v in iter_elements(self.indep)]

    def edges(self):
        """Explicit edge set: all pairs with an endpoint outside indep.

        For the complete-graph marker (indep == 0) this is every pair, which
        is consistent with the same rule.
        """
        out = []
        for u in range(self.n):
            for w in range(u + 1, self.n):
                if not (self.indep & bit(u)) or not (self.indep & bit(w)):
                    out.append((u, w))
        return out


def delta_hat(a, G, mask):
    """Relaxed cut: sum over v in mask of v's G-degree into astral edges.

    Only feasible arguments are accepted: subsets of the independent set, or
    the empty set / singletons when a is the complete marker. For an
    independent vertex the astral edges at v go to vertices outside indep,
    so its term is |adj(v) \\ indep|; at the complete marker every G-edge is
    an astral edge and the term is the plain degree.
    """
    if a.is_complete:
        if mask != 0 and popcount(mask) != 1:
            raise ValueError("complete-graph subproblems only see the empty set and singletons")
        return sum(degree(G, v) for v in iter_elements(mask))
    if mask & ~a.indep:
        raise ValueError("subset leaves the independent set")
    total = 0
    for v in iter_elements(mask):
        total += popcount(G.adj[v] & ~a.indep)
    return total


def hat_degrees(a, G):
    """d-hat per vertex of the independent set (empty dict at the marker)."""
    if a.is_complete:
        return {}
    return {v: popcount(G.adj[v] & ~a.indep) for v in iter_elements(a.indep)}


def verify_unique_independent_set(a, cap=12):
    """Exhaustively confirm the node's defining structure on small n.

    Builds the explicit graph and enumerates independent sets: exactly one
    maximal independent set of size >= 2 must exist and equal a.indep, and
    every maximal independent set of size >= 2 must be maximum. The
    complete marker passes iff no independent pair exists at all.
    """
    if a.n > cap:
        raise ValueError(f"enumeration refused: n={a.n} exceeds cap {cap}")
    n = a.n
    adj = [0] * n
    for u, w in a.edges():
        adj[u] |= bit(w)
        adj[w] |= bit(u)

    def independent(s):
        return all(not (adj[v] & s) for v in iter_elements(s))

    def maximal(s):
        others = full_mask(n) & ~s
        return all(not independent(s | bit(v)) for v in iter_elements(others))

    big_maximal = [s for s in range(1 << n)
                   if popcount(s) >= 2 and independent(s) and maximal(s)]
    if a.is_complete:
        return not any(independent(s) for s in range(1 << n) if popcount(s) == 2)
    if len(big_maximal) != 1 or big_maximal[0] != a.indep:
        return False
    best = max(popcount(s) for s in range(1 << n) if independent(s))
    return all(popcount(s) == best for s in big_maximal)


def reachable_independent_sets(n):
    """All node keys reachable from the root by branching (test helper)."""
    root = Astral.root(n)
    seen = {root.indep}
    frontier = [root]
    while frontier:
        a = frontier.pop()
        if a.is_complete:
            continue
        for _, child in a.children():
            if child.indep not in seen:
                seen.add(child.indep)
                frontier.append(child)
    return seen
