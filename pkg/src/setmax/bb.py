"""Branch and bound over star-union graph nodes for maximizing f - cut.

Each node carries an independent-set mask I. Its subproblem relaxes the
objective on the family 2^I (empty set and singletons at the complete-graph
marker): the submodular part f is replaced by an upper bound fu agreeing
with f on the empty set and singletons, and the cut is replaced by the
modular relaxed cut of the node. The relaxation value bounds the objective
on the whole family, so a node whose bound cannot beat the incumbent is
closed; otherwise one child per independent vertex is created, keyed
canonically so no subproblem is ever solved twice.

Closure is tie-exact: the incumbent is the best (value, mask) pair in the
package total order, and a node is closed on an equal bound only when no
set in it could still win the mask tie-break (the incumbent is the empty
set, the global mask minimum). Under that rule the search provably returns
the same answer as the brute-force scan, equal values included. An
approximation factor rho >= 1 scales the bound for engines that only
return rho-approximate relaxation optima.

Interrupted runs stay informative: for the deepest fully processed depth,
the worst recorded gap rho*bound - attained, added to the incumbent value,
upper-bounds the global optimum.
"""

import heapq
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .bits import better, bit, elements, iter_elements, popcount
from .astral import Astral, hat_degrees
from .submax import Interval, interval_max, ls_max, maximize_modular

LS_FALLBACK_SIZE = 12

_ENGINES = ("closed-form", "interval", "ls")
_FU_MODES = ("modular", "tight")


@dataclass
class BBConfig:
    """Search knobs; defaults give the exact linear-subproblem variant."""

    fu_mode: object = "modular"      # mode, per-depth sequence, or callable(depth)
    engine: str = "closed-form"
    epsilon: float = 1.0
    rho: float = None
    node_policy: str = "parent-bound"
    disable_pruning: bool = False
    node_cap: int = None
    interrupt_depth: int = None
    ls_fallback: int = LS_FALLBACK_SIZE
    audit: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.engine not in _ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.node_policy not in ("parent-bound", "lifo", "fifo"):
            raise ValueError(f"unknown node policy {self.node_policy!r}")
        if self.rho is None:
            self.rho = 4.0 if self.engine == "ls" else 1.0
        if self.rho < 1:
            raise ValueError("approximation factor must be >= 1")
        if self.rho > 1 and self.engine != "ls":
            raise ValueError("rho > 1 only makes sense with the ls engine")
        if self.engine == "ls":
            if self.epsilon <= 0:
                raise ValueError("ls engine needs epsilon > 0")
            ratio = 1.0 / 3.0 - self.epsilon / self.ls_fallback
            if ratio <= 0 or self.rho < 1.0 / ratio:
                raise ValueError(
                    "rho must cover the local-search guarantee: need "
                    f"rho >= 1/(1/3 - eps/{self.ls_fallback})")
        if self.engine == "closed-form":
            if callable(self.fu_mode) or not isinstance(self.fu_mode, str):
                raise ValueError("closed-form engine needs a fixed modular fu_mode")
            if self.fu_mode != "modular":
                raise ValueError("closed-form engine requires fu_mode='modular'")
        if isinstance(self.fu_mode, str) and self.fu_mode not in _FU_MODES:
            raise ValueError(f"unknown fu mode {self.fu_mode!r}")
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
        if mode not in _FU_MODES:
            raise ValueError(f"unknown fu mode {mode!r}")
        if mode == "tight" and self.engine == "closed-form":
            raise ValueError("closed-form engine cannot take fu_mode='tight'")
        return mode


@dataclass
class SubproblemResult:
    """Relaxation outcome at one node.

    v1 maximizes (exactly or rho-approximately) the relaxation over the
    node's family; v2 is the family's maximal element (the independent set
    itself, or v1 at the complete marker). theta2 is the better true
    objective value of the two, candidate the set attaining it under the
    total order.
    """

    v1: int
    v2: int
    theta1: float
    theta2: float
    candidate: int
    lsa_iterations: int = 0


@dataclass
class NodeRecord:
    key: int
    depth: int
    theta1: float
    theta2: float
    v1: int
    v2: int
    rho: float
    action: str
    z_after: float
    incumbent_after: int


@dataclass
class BBStats:
    nodes_visited: int = 0
    nodes_created: int = 0
    nodes_pruned: int = 0
    nodes_fathomed: int = 0
    max_depth: int = 0
    interrupted: bool = False
    gap_bound: float = math.inf


class BBState:
    """Mutable search state, kept around for audits and interrupt bounds."""

    def __init__(self):
        self.incumbent = 0
        self.z_star = 0.0
        self.visited_keys = set()
        self.processed_keys = set()
        self.created_per_depth = {}
        self.processed_per_depth = {}
        self.delta_per_depth = {}
        self.records = None
        self.nodes_visited = 0
        self.nodes_pruned = 0
        self.nodes_fathomed = 0
        self.max_depth = 0
        self.interrupted = False

    def note_created(self, depth):
        self.created_per_depth[depth] = self.created_per_depth.get(depth, 0) + 1

    def note_processed(self, depth, delta):
        self.processed_per_depth[depth] = self.processed_per_depth.get(depth, 0) + 1
        cur = self.delta_per_depth.get(depth)
        if cur is None or delta > cur:
            self.delta_per_depth[depth] = delta
        self.nodes_visited += 1
        if depth > self.max_depth:
            self.max_depth = depth

    def closed_frontier(self):
        """Deepest depth k with every created node of depth <= k processed."""
        frontier = -1
        for d in sorted(self.created_per_depth):
            if self.processed_per_depth.get(d, 0) == self.created_per_depth[d]:
                frontier = d
            else:
                break
        return frontier


@dataclass
class BBResult:
    best: int
    value: float
    stats: BBStats
    state: BBState


def bb_interrupt_bound(state):
    """Certified upper bound on the optimum from a (possibly partial) run.

    Value of the incumbent plus the worst bound-vs-attained gap over the
    deepest fully processed depth. Infinity if nothing was processed yet.
    """
    frontier = state.closed_frontier()
    if frontier < 0:
        return math.inf
    return state.z_star + state.delta_per_depth[frontier]


def _tight_value_map(f, dh, a):
    """All values of f - relaxed-cut over the node family, as a dict.

    Vectorized over the 2^|I| submasks when f has a value table; the engines
    then evaluate in constant time. None when no table is available or the
    family is small enough that a closure is cheaper.
    """
    k = a.size
    if k < 7 or f._table is None:
        return None
    pos = elements(a.indep)
    idx = np.arange(1 << k, dtype=np.int64)
    subs = np.zeros_like(idx)
    delta = np.zeros(1 << k)
    for j, p in enumerate(pos):
        on = (idx >> j) & 1
        subs |= on << p
        delta += on * dh[p]
    vals = f._table[subs] - delta
    return dict(zip(subs.tolist(), vals.tolist()))


def solve_subproblem(a, dec, cfg, depth=0):
    """Solve one node's relaxed subproblem per the configured fu mode/engine."""
    f = dec.f
    obj = dec.objective
    if a.is_complete:
        best_s, best_v = 0, obj(0)
        for v in range(a.n):
            s = bit(v)
            val = obj(s)
            if better(val, s, best_v, best_s):
                best_s, best_v = s, val
        return SubproblemResult(best_s, best_s, best_v, best_v, best_s)

    mode = cfg.fu_at(depth)
    dh = hat_degrees(a, dec.graph)
    weights = {v: f(bit(v)) - d for v, d in dh.items()}
    if mode == "modular":
        def h(s):
            return sum(weights[v] for v in iter_elements(s))
    else:
        hmap = _tight_value_map(f, dh, a)
        if hmap is not None:
            h = hmap.__getitem__
        else:
            def h(s):
                return f(s) - sum(dh[v] for v in iter_elements(s))

    if cfg.engine == "closed-form":
        v1, theta1 = maximize_modular(weights, a.indep)
    elif cfg.engine == "interval" or a.size < cfg.ls_fallback:
        # The nonnegative-weight set seeds the engine's incumbent; it is the
        # modular relaxation's maximizer and usually near the tight one.
        seed, _ = maximize_modular(weights, a.indep)
        v1, theta1 = interval_max(h, Interval(0, a.indep), seeds=(seed,))
    else:
        res = ls_max(h, cfg.epsilon, domain=a.indep)
        v1, theta1 = res.best, res.value

    v2 = a.indep
    val1, val2 = obj(v1), obj(v2)
    if better(val1, v1, val2, v2):
        theta2, cand = val1, v1
    else:
        theta2, cand = val2, v2
    return SubproblemResult(v1, v2, theta1, theta2, cand)


def _priority(cfg, parent_bound, seq):
    if cfg.node_policy == "parent-bound":
        return (-parent_bound, -seq)
    if cfg.node_policy == "lifo":
        return (0, -seq)
    return (0, seq)


def _close_action(cfg, rho, theta1, res, updated, state):
    """Decide a processed node's fate; see the module notes on tie-exactness."""
    if cfg.disable_pruning:
        return "branch"
    bound = rho * theta1
    z, inc = state.z_star, state.incumbent
    if bound < z or (bound == z and inc == 0):
        return "pruned"
    if updated and bound <= res.theta2 and inc == 0:
        return "fathomed"
    return "branch"


def _search(dec, cfg, solver):
    state = BBState()
    if cfg.audit:
        state.records = []
    state.z_star = dec.objective(0)
    root = Astral.root(dec.n)
    state.visited_keys.add(root.indep)
    state.note_created(0)
    seq = 0
    heap = [(_priority(cfg, math.inf, seq), seq, root, 0)]
    if cfg.threads > 1:
        _drain_parallel(dec, cfg, solver, state, heap)
    else:
        _drain(dec, cfg, solver, state, heap)

    stats = BBStats(
        nodes_visited=state.nodes_visited,
        nodes_created=len(state.visited_keys),
        nodes_pruned=state.nodes_pruned,
        nodes_fathomed=state.nodes_fathomed,
        max_depth=state.max_depth,
        interrupted=state.interrupted,
        gap_bound=bb_interrupt_bound(state) if state.interrupted else math.inf,
    )
    return BBResult(state.incumbent, state.z_star, stats, state)


def _process(dec, cfg, solver, state, node, depth):
    """Solve, update the incumbent, and classify the node. Returns the action."""
    res, rho = solver(node, depth)
    delta = rho * res.theta1 - res.theta2
    updated = False
    if better(res.theta2, res.candidate, state.z_star, state.incumbent):
        state.incumbent, state.z_star = res.candidate, res.theta2
        updated = True
    action = _close_action(cfg, rho, res.theta1, res, updated, state)
    if action == "branch" and node.is_complete:
        action = "leaf"
    if action == "branch" and cfg.interrupt_depth is not None and depth >= cfg.interrupt_depth:
        action = "cut-off"
        state.interrupted = True
    state.note_processed(depth, delta)
    state.processed_keys.add(node.indep)
    if action == "pruned":
        state.nodes_pruned += 1
    elif action == "fathomed":
        state.nodes_fathomed += 1
    if state.records is not None:
        state.records.append(NodeRecord(node.indep, depth, res.theta1, res.theta2,
                                        res.v1, res.v2, rho, action,
                                        state.z_star, state.incumbent))
    return action, res


def _drain(dec, cfg, solver, state, heap):
    seq = 0
    while heap:
        if cfg.node_cap is not None and state.nodes_visited >= cfg.node_cap:
            state.interrupted = True
            return
        _, _, node, depth = heapq.heappop(heap)
        action, res = _process(dec, cfg, solver, state, node, depth)
        if action != "branch":
            continue
        for _, child in node.children():
            if child.indep in state.visited_keys:
                continue
            state.visited_keys.add(child.indep)
            state.note_created(depth + 1)
            seq += 1
            heapq.heappush(heap, (_priority(cfg, res.theta1, seq), seq, child, depth + 1))


def _drain_parallel(dec, cfg, solver, state, heap):
    """Thread pool over the open list; same closure rules under one lock.

    The final incumbent matches the sequential run (closure is sound for
    any interleaving and the incumbent order has a unique maximum); node
    counts may differ run to run.
    """
    lock = threading.Lock()
    work = threading.Condition(lock)
    seq_holder = [0]
    active = [0]

    def loop():
        while True:
            with work:
                while not heap and active[0] > 0:
                    work.wait()
                if not heap and active[0] == 0:
                    work.notify_all()
                    return
                _, _, node, depth = heapq.heappop(heap)
                active[0] += 1
            try:
                res, rho = solver(node, depth)
            except BaseException:
                with work:
                    active[0] -= 1
                    work.notify_all()
                raise
            with work:
                delta = rho * res.theta1 - res.theta2
                updated = False
                if better(res.theta2, res.candidate, state.z_star, state.incumbent):
                    state.incumbent, state.z_star = res.candidate, res.theta2
                    updated = True
                action = _close_action(cfg, rho, res.theta1, res, updated, state)
                if action == "branch" and node.is_complete:
                    action = "leaf"
                state.note_processed(depth, delta)
                state.processed_keys.add(node.indep)
                if action == "pruned":
                    state.nodes_pruned += 1
                elif action == "fathomed":
                    state.nodes_fathomed += 1
                if action == "branch":
                    for _, child in node.children():
                        if child.indep in state.visited_keys:
                            continue
                        state.visited_keys.add(child.indep)
                        state.note_created(depth + 1)
                        seq_holder[0] += 1
                        s = seq_holder[0]
                        heapq.heappush(heap, (_priority(cfg, res.theta1, s), s, child, depth + 1))
                active[0] -= 1
                work.notify_all()

    threads = [threading.Thread(target=loop) for _ in range(cfg.threads)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()


def _tiny_ground_scan(dec):
    best_s, best_v = 0, dec.objective(0)
    for s in range(1, 1 << dec.n):
        v = dec.objective(s)
        if better(v, s, best_v, best_s):
            best_s, best_v = s, v
    state = BBState()
    state.incumbent, state.z_star = best_s, best_v
    return BBResult(best_s, best_v, BBStats(), state)


def bb_maximize(dec, cfg=None):
    """Global total-order maximizer of f - cut for the given decomposition.

    Exact engines return exactly the brute-force answer; the ls engine does
    too provided f - cut is non-negative (spot-checked on the empty set and
    singletons here, attested by the caller elsewhere).
    """
    cfg = cfg if cfg is not None else BBConfig()
    if cfg.engine == "ls":
        if dec.objective(0) < 0 or any(dec.objective(bit(v)) < 0 for v in range(dec.n)):
            raise ValueError("ls engine requires a non-negative objective "
                             "(negative value found on a singleton or the empty set)")
    if dec.n < 2:
        return _tiny_ground_scan(dec)

    def solver(a, depth):
        return solve_subproblem(a, dec, cfg, depth), cfg.rho

    return _search(dec, cfg, solver)
