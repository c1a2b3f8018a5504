"""Constrained maximization over downward-closed subset systems.

A subset system is a family containing the empty set and closed under
taking subsets, described by a membership function p (member iff
p(S) <= 0). Attaching the penalty q(S) = exp(|S|) outside the family turns
a constrained problem into an unconstrained one: with a penalty weight M
above the objective's magnitude, g - M*q agrees with g on members and
drops below every member value elsewhere, so the two argmaxes coincide.
The same q is non-negative, normalized, and supermodular, and conversely
the zero sublevel family of any such function is a subset system.

The constrained branch and bound reuses the unconstrained node space but
intersects each node's family with the system; feasible maximal extensions
(grown greedily) provide the incumbent candidates, so every incumbent is
feasible by construction. A local-search route (``lsa_max``) peels the
ground set: it runs the threshold local search on the penalized function,
and while the complement of the terminal set is infeasible, recurses on
that complement; the candidate pool of all terminal sets and complements
carries a data-dependent approximation factor ``lsa_bound_factor(k, eps)``
where k is the number of peeling steps.
"""

import math
from dataclasses import dataclass, field

from .bits import better, bit, full_mask, iter_elements, iter_submasks, popcount
from .ground import SetFunction, brute_force_argmax
from .graph import Graph, induced_edges
from .astral import hat_degrees
from .bb import BBConfig, BBResult, SubproblemResult, _search, _tiny_ground_scan
from .submax import ls_max

LSA_FALLBACK_SIZE = 12


class SubsetSystem:
    """Downward-closed family via a membership function p (member iff p <= 0)."""

    def __init__(self, n, p, kind="custom", eval_cost="O(n)"):
        self.n = n
        self.p = p
        self.kind = kind
        # Documented polynomial bound on the cost of one membership test.
        self.eval_cost = eval_cost

    def contains(self, mask):
        return self.p(mask) <= 0

    def q(self, mask):
        """Penalty: 0 on members, exp(|S|) outside. Normalized, supermodular."""
        return 0.0 if self.contains(mask) else math.exp(popcount(mask))

    def contains_all_singletons(self):
        return all(self.contains(bit(v)) for v in range(self.n))

    def is_downward_closed(self, cap=12):
        """Brute-force audit of downward closure (and membership of {})."""
        if self.n > cap:
            raise ValueError(f"closure audit refused: n={self.n} exceeds cap {cap}")
        if not self.contains(0):
            return False
        for s in range(1 << self.n):
            if not self.contains(s):
                continue
            for v in iter_elements(s):
                if not self.contains(s & ~bit(v)):
                    return False
        return True

    @classmethod
    def trivial(cls, n):
        return cls(n, lambda s: -1.0, kind="trivial", eval_cost="O(1)")

    @classmethod
    def cardinality(cls, n, k):
        if k < 0:
            raise ValueError("cardinality bound must be >= 0")
        return cls(n, lambda s: float(popcount(s) - k),
                   kind=f"cardinality({k})", eval_cost="O(1)")

    @classmethod
    def graph_independence(cls, H):
        return cls(H.n, lambda s: float(induced_edges(H, s)),
                   kind="graph-independence", eval_cost="O(n)")

    @classmethod
    def explicit(cls, n, maximal_sets):
        """Members are the subsets of the given maximal sets."""
        sets = [int(m) for m in maximal_sets]
        if not sets:
            raise ValueError("explicit system needs at least one maximal set")

        def p(s):
            return float(min(popcount(s & ~m) for m in sets))

        return cls(n, p, kind="explicit", eval_cost="O(n * #sets)")

    def __repr__(self):
        return f"SubsetSystem(n={self.n}, kind={self.kind!r})"


def q_of(sys_, mask):
    """Penalty value of the system at mask (module-level form of .q)."""
    return sys_.q(mask)


class PenalizedFunction(SetFunction):
    """g - M*q as an ordinary set function; agrees with g on the system."""

    def __init__(self, base, system, M):
        self.base = base
        self.system = system
        self.M = float(M)

        def ev(mask):
            return base(mask) - self.M * system.q(mask)

        super().__init__(base.n, ev,
                         bound=base.bound_M + self.M * math.exp(base.n) + 1.0,
                         normalized=base.is_normalized, name="penalized")


def reformulate(theta, sys_, M):
    """Penalized form whose unconstrained argmax is theta's constrained argmax.

    M must exceed max |theta|; accepted when it reaches theta's declared
    strict bound, otherwise certified by enumeration on small ground sets.
    """
    if M >= theta.bound_M:
        pass
    elif theta.n <= 16:
        worst = max(abs(theta(s)) for s in range(1 << theta.n))
        if M <= worst:
            raise ValueError(f"penalty weight {M} must exceed max|theta| = {worst}")
    else:
        raise ValueError("penalty weight below the declared bound and the "
                         "ground set is too large to certify by enumeration")
    return PenalizedFunction(theta, sys_, M)


def constrained_brute_force(theta, sys_, cap=24):
    """Reference oracle: best member of the system under the total order."""
    n = theta.n
    if n > cap:
        raise ValueError(f"brute force refused: n={n} exceeds cap {cap}")
    best_s, best_v = 0, theta(0)
    for s in range(1, 1 << n):
        if not sys_.contains(s):
            continue
        v = theta(s)
        if better(v, s, best_v, best_s):
            best_s, best_v = s, v
    return best_s, best_v


def greedy_extend(v1, domain, feasible):
    """Grow v1 to a maximal feasible set, scanning domain by ascending index."""
    if not feasible(v1):
        raise ValueError("cannot extend an infeasible set")
    cur = v1
    for x in iter_elements(domain & ~v1):
        cand = cur | bit(x)
        if feasible(cand):
            cur = cand
    return cur


def choose_M(g, domain):
    """Penalty weight |domain| * best singleton value of g.

    For a normalized submodular g this dominates max g over 2^domain, since
    g is subadditive there and no singleton beats the best one.
    """
    r = popcount(domain)
    best = -math.inf
    for v in iter_elements(domain):
        best = max(best, g(bit(v)))
    if best <= 0:
        raise ValueError("penalty weight needs a strictly positive singleton value")
    return r * best


def harmonic(m):
    return sum(1.0 / i for i in range(1, m + 1))


def lsa_bound_factor(k, epsilon):
    """Approximation factor (k+4) + eps*H(k+2) + 8*eps after k peeling steps."""
    if k < 0:
        raise ValueError("iteration count must be >= 0")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return (k + 4) + epsilon * harmonic(k + 2) + 8.0 * epsilon


@dataclass
class LSAIteration:
    ground: int            # X^(i), the set being searched this round
    terminal: int          # the locally optimal set the search settled on
    subiterations: int


@dataclass
class LSAResult:
    best: int
    value: float
    iterations: int        # k: peeling steps before a feasible complement
    records: list = field(default_factory=list)
    candidates: list = field(default_factory=list)   # (label, mask) in output order


def lsa_max(g, sys_, epsilon, M=None, domain=None):
    """Local search for max g over the system, via the penalized objective.

    Requires a normalized, non-negative g with strictly positive singleton
    values on the domain, and a system containing every domain singleton
    (both are checked up front). Returns the best of all terminal sets and
    complements seen, which is always feasible, together with the peel
    count k and per-round records.
    """
    n = g.n
    if domain is None:
        domain = full_mask(n)
    if g(0) != 0:
        raise ValueError("lsa_max needs a normalized objective")
    for v in iter_elements(domain):
        if g(bit(v)) <= 0:
            raise ValueError(f"singleton {v} has non-positive value; lsa_max needs g > 0 there")
        if not sys_.contains(bit(v)):
            raise ValueError(f"singleton {v} is infeasible; restrict the ground set first")
    if M is None:
        M = choose_M(g, domain)

    def h(mask):
        return g(mask) - M * sys_.q(mask)

    records = []
    candidates = []
    ground = domain
    i = 0
    r0 = popcount(domain)
    while True:
        ls = ls_max(h, epsilon, domain=ground, require_nonnegative=False)
        terminal = ls.trace[-1] if ls.trace else 0
        comp = ground & ~terminal
        records.append(LSAIteration(ground, terminal, ls.subiterations))
        candidates.append((f"{i + 1}", terminal))
        candidates.append((f"{i + 1}C", comp))
        if sys_.contains(comp):
            inner = ls_max(g, epsilon, domain=comp)
            inner_terminal = inner.trace[-1] if inner.trace else 0
            records.append(LSAIteration(comp, inner_terminal, inner.subiterations))
            candidates.append((f"{i + 2}", inner_terminal))
            candidates.append((f"{i + 2}C", comp & ~inner_terminal))
            k = i
            break
        ground = comp
        i += 1
        if i > r0:
            raise AssertionError("peeling exceeded the ground size; system is not downward closed?")

    best_s, best_v = None, -math.inf
    for _, cand in candidates:
        v = h(cand)
        if best_s is None or better(v, cand, best_v, best_s):
            best_s, best_v = cand, v
    return LSAResult(best_s, best_v, k, records, candidates)


@dataclass
class BBCConfig:
    """Knobs for the constrained search.

    subsolver picks how each node's family S intersect 2^I is maximized:
    "exact" enumerates it, "lsa" runs the penalized local search with the
    data-dependent factor as that node's rho, "auto" uses lsa only above
    ``lsa_fallback`` independent vertices.
    """

    fu_mode: object = "modular"
    subsolver: str = "auto"
    epsilon: float = 1.0
    lsa_fallback: int = LSA_FALLBACK_SIZE
    node_policy: str = "parent-bound"
    disable_pruning: bool = False
    node_cap: int = None
    interrupt_depth: int = None
    audit: bool = False
    threads: int = 1
    validate_system: bool = True

    def __post_init__(self):
        if self.subsolver not in ("exact", "lsa", "auto"):
            raise ValueError(f"unknown subsolver {self.subsolver!r}")
        if self.node_policy not in ("parent-bound", "lifo", "fifo"):
            raise ValueError(f"unknown node policy {self.node_policy!r}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.threads > 1 and (self.node_cap is not None
                                 or self.interrupt_depth is not None or self.audit):
            raise ValueError("parallel runs do not support caps, interrupts, or audit")

    def fu_at(self, depth):
        if callable(self.fu_mode):
            mode = self.fu_mode(depth)
        elif isinstance(self.fu_mode, str):
            mode = self.fu_mode
        else:
            seq = self.fu_mode
            mode = seq[depth] if depth < len(seq) else seq[-1]
        if mode not in ("modular", "tight"):
            raise ValueError(f"unknown fu mode {mode!r}")
        return mode


def _exact_family_max(h, indep, sys_):
    """Total-order maximizer of h over members of the system inside 2^indep."""
    best_s, best_v = None, -math.inf
    for s in iter_submasks(indep):
        if not sys_.contains(s):
            continue
        v = h(s)
        if best_s is None or better(v, s, best_v, best_s):
            best_s, best_v = s, v
    if best_s is None:
        raise ValueError("empty family: the system does not even contain {}")
    return best_s, best_v


def bbc_subproblem(a, dec, sys_, cfg, depth=0):
    """One constrained node: relaxation over S intersect the node family.

    Returns (SubproblemResult, rho): rho is 1 for exact solves and the
    LSA factor for local-search solves.
    """
    f = dec.f
    obj = dec.objective
    n = dec.n
    if a.is_complete:
        best_s, best_v = 0, obj(0)
        for v in range(n):
            s = bit(v)
            if not sys_.contains(s):
                continue
            val = obj(s)
            if better(val, s, best_v, best_s):
                best_s, best_v = s, val

        def feas0(s):
            return (s == 0 or popcount(s) == 1) and sys_.contains(s)

        v2 = greedy_extend(best_s, full_mask(n), feas0)
        val2 = obj(v2)
        if better(best_v, best_s, val2, v2):
            theta2, cand = best_v, best_s
        else:
            theta2, cand = val2, v2
        return SubproblemResult(best_s, v2, best_v, theta2, cand), 1.0

    dh = hat_degrees(a, dec.graph)
    mode = cfg.fu_at(depth)
    if mode == "modular":
        weights = {v: f(bit(v)) - d for v, d in dh.items()}

        def h(s):
            return sum(weights[v] for v in iter_elements(s))
    else:
        def h(s):
            return f(s) - sum(dh[v] for v in iter_elements(s))

    use_lsa = (cfg.subsolver == "lsa"
               or (cfg.subsolver == "auto" and a.size > cfg.lsa_fallback))
    if use_lsa and all(h(bit(v)) > 0 for v in iter_elements(a.indep)):
        hfn = SetFunction(n, h, normalized=True)
        lsa = lsa_max(hfn, sys_, cfg.epsilon, domain=a.indep)
        v1, theta1 = lsa.best, lsa.value
        rho = lsa_bound_factor(lsa.iterations, cfg.epsilon)
        its = lsa.iterations
    else:
        # Exact route; also the fallback when some relaxed singleton value is
        # non-positive, where the local-search contract does not hold.
        v1, theta1 = _exact_family_max(h, a.indep, sys_)
        rho = 1.0
        its = 0

    def feas(s):
        return sys_.contains(s)

    v2 = greedy_extend(v1, a.indep, feas)
    val1, val2 = obj(v1), obj(v2)
    if better(val1, v1, val2, v2):
        theta2, cand = val1, v1
    else:
        theta2, cand = val2, v2
    return SubproblemResult(v1, v2, theta1, theta2, cand, its), rho


def bbc_maximize(dec, sys_, cfg=None):
    """Total-order maximizer of f - cut over the subset system.

    Every singleton must be a member (restrict the ground set beforehand if
    not), and the system must be downward closed; both are checked up front
    at desk scale. The incumbent is always feasible, so the output is too.
    """
    cfg = cfg if cfg is not None else BBCConfig()
    if sys_.n != dec.n:
        raise ValueError("system and decomposition must share the ground set")
    if not sys_.contains_all_singletons():
        raise ValueError("every singleton must be in the system; "
                         "restrict the ground set to members first")
    if cfg.validate_system and dec.n <= 12 and not sys_.is_downward_closed():
        raise ValueError("the family is not downward closed")
    if dec.n < 2:
        res = _tiny_ground_scan(dec)
        if not sys_.contains(res.best):
            res = BBResult(0, dec.objective(0), res.stats, res.state)
        return res

    def solver(a, depth):
        return bbc_subproblem(a, dec, sys_, cfg, depth)

    return _search(dec, cfg, solver)

