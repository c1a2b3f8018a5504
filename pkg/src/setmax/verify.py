"""Named property suites shared by the CLI ``verify`` command and the tests.

Each suite runs seeded randomized trials of one contract and reports
(trials, failures, max_violation); failures must be zero. max_violation is
the worst margin by which the property was broken, 0.0 when clean.
"""

import math

from .astral import Astral, reachable_independent_sets, verify_unique_independent_set
from .bb import BBConfig, bb_maximize
from .bits import bit, iter_submasks, popcount
from .constrained import constrained_brute_force, lsa_bound_factor, lsa_max, reformulate
from .decompose import decompose, maximizer_dominates
from .generators import (random_decomposition, random_graph, random_nonneg_supermodular,
                         random_submodular_function, random_system,
                         random_table_function, rng)
from .graph import bicut, cut
from .ground import SetFunction, brute_force_argmax, is_supermodular
from .submax import ls_max


def _report(name, trials, failures, worst):
    return {"suite": name, "trials": trials, "failures": failures,
            "max_violation": worst}


def suite_fact1(seed=0, trials=1000, n=10):
    """Integer cut identity on random graph/subset triples."""
    r = rng(seed, 1)
    failures = 0
    worst = 0
    for _ in range(trials):
        g = random_graph(n, r, p=r.uniform(0.2, 0.8))
        a = r.randrange(1 << n)
        b = r.randrange(1 << n)
        lhs = cut(g, a) + cut(g, b)
        rhs = cut(g, a | b) + cut(g, a & b) + 2 * bicut(g, a & ~b, b & ~a)
        if lhs != rhs:
            failures += 1
            worst = max(worst, abs(lhs - rhs))
    return _report("fact1", trials, failures, worst)


def suite_fact6(seed=0, n=5):
    """Unique-independent-set structure of every reachable search node."""
    keys = sorted(reachable_independent_sets(n))
    failures = 0
    for key in keys:
        a = Astral(n, key)
        if not verify_unique_independent_set(a):
            failures += 1
    return _report("fact6", len(keys), failures, float(failures > 0))


def suite_prop4(seed=0, trials=100, n_max=8):
    """Maximizer of the lifted objective is empty, a singleton, or dominating."""
    r = rng(seed, 4)
    failures = 0
    for _ in range(trials):
        n = r.randint(4, n_max)
        dec = random_decomposition(n, r)
        if not maximizer_dominates(dec):
            failures += 1
    return _report("prop4", trials, failures, float(failures > 0))


def suite_prop9(seed=0, trials=50, n_max=10):
    """Node bounds dominate the true objective over each node family."""
    r = rng(seed, 9)
    failures = 0
    worst = 0.0
    for t in range(trials):
        n = r.randint(4, n_max)
        theta = random_table_function(n, r)
        dec = decompose(theta)
        cfg = BBConfig(fu_mode="modular" if t % 2 == 0 else "tight",
                       engine="closed-form" if t % 2 == 0 else "interval",
                       audit=True)
        res = bb_maximize(dec, cfg)
        for rec in res.state.records:
            if rec.key == 0:
                family = [0] + [bit(v) for v in range(n)]
            else:
                family = list(iter_submasks(rec.key))
            for s in family:
                slack = dec.objective(s) - rec.theta1
                if slack > 0:
                    failures += 1
                    worst = max(worst, slack)
    return _report("prop9", trials, failures, worst)


def suite_prop14(seed=0, trials=50, n_max=8):
    """Penalties of random systems are supermodular; sublevels of random
    non-negative normalized supermodular functions are downward closed."""
    r = rng(seed, 14)
    failures = 0
    for _ in range(trials):
        n = r.randint(3, n_max)
        sys_ = random_system(n, r)
        qfn = SetFunction(n, sys_.q, normalized=True)
        if not (qfn(0) == 0 and all(qfn(s) >= 0 for s in range(1 << n))
                and is_supermodular(qfn, n)):
            failures += 1
        sup = random_nonneg_supermodular(n, r)
        members = {s for s in range(1 << n) if sup(s) <= 0}
        closed = all((s & ~bit(v)) in members for s in members
                     for v in range(n) if s & bit(v))
        if not (0 in members and closed):
            failures += 1
    return _report("prop14", 2 * trials, failures, float(failures > 0))


def suite_cor15(seed=0, trials=100, n_max=10):
    """Unconstrained penalized argmax equals the constrained argmax."""
    r = rng(seed, 15)
    failures = 0
    for _ in range(trials):
        n = r.randint(4, n_max)
        theta = random_table_function(n, r)
        sys_ = random_system(n, r)
        pen = reformulate(theta, sys_, theta.bound_M)
        uncon, _ = brute_force_argmax(pen, n)
        con, _ = constrained_brute_force(theta, sys_)
        if uncon != con:
            failures += 1
    return _report("cor15", trials, failures, float(failures > 0))


def suite_ls_ratio(seed=0, trials=100, n=10, epsilons=(0.25, 0.5, 1.0), tol=1e-9):
    """Local-search value is within (1/3 - eps/r) of the true maximum."""
    r = rng(seed, 12)
    failures = 0
    worst = 0.0
    count = 0
    for _ in range(trials):
        g = random_submodular_function(n, r)
        _, opt = brute_force_argmax(g, n)
        for eps in epsilons:
            count += 1
            res = ls_max(g, eps)
            need = (1.0 / 3.0 - eps / n) * opt
            if res.value < need - tol:
                failures += 1
                worst = max(worst, need - res.value)
    return _report("ls-ratio", count, failures, worst)


def suite_lsa_bound(seed=0, trials=100, n=10, epsilons=(0.5, 1.0)):
    """Peeling local search: factor(k) times the value beats the
    constrained optimum strictly, and k never exceeds the ground size."""
    r = rng(seed, 20)
    failures = 0
    worst = 0.0
    count = 0
    for _ in range(trials):
        g = random_submodular_function(n, r)
        sys_ = random_system(n, r, kinds=("graph-independence",))
        opt_s, opt = constrained_brute_force(g, sys_)
        for eps in epsilons:
            count += 1
            res = lsa_max(g, sys_, eps)
            factor = lsa_bound_factor(res.iterations, eps)
            if not (factor * res.value > opt) or res.iterations > n:
                failures += 1
                worst = max(worst, opt - factor * res.value)
    return _report("lsa-bound", count, failures, worst)


SUITES = {
    "fact1": suite_fact1,
    "fact6": suite_fact6,
    "prop4": suite_prop4,
    "prop9": suite_prop9,
    "prop14": suite_prop14,
    "cor15": suite_cor15,
    "ls-ratio": suite_ls_ratio,
    "lsa-bound": suite_lsa_bound,
}
