"""Command-line interface: decompose, maximize, verify, and bench.

Instance files are line oriented UTF-8; '#' starts a comment, blank lines
are skipped. Element and vertex indices in files and reports are 1-based;
subset records are bitmask strings in binary, n characters wide, where the
rightmost character is element 1.

    n=<int>
    theta=table | cut | coverage | modular
      table:    one line  `set <mask> <value>`  per subset, all 2^n exactly once
      modular:  lines     `weight <i> <value>`  (missing elements weigh 0)
      coverage: `universe=<m>` then lines `covers <i> <mask over m items>`
      cut:      no records; the function is the cut of the graph below
    graph:                      (optional; required for theta=cut)
    <i> <j>                     one edge per line
    system=none | cardinality <k> | graph-independence | explicit
      graph-independence: followed by its own edge lines, to end of file
      explicit:           one line of indices per maximal set, to end of file

Reports are `key=value` lines in a fixed order. Exit codes: 0 complete,
2 unusable input or inconsistent flags, 3 interrupted with a gap bound.
"""

import argparse
import math
import sys
import time

from .bits import from_elements, full_mask, iter_elements
from .bb import BBConfig, bb_interrupt_bound, bb_maximize
from .constrained import BBCConfig, SubsetSystem, bbc_maximize, constrained_brute_force
from .decompose import DecompositionError, decompose, default_alpha, min_alpha, modularity_gap
from .generators import random_table_function, rng
from .graph import Graph, cut_function
from .ground import brute_force_argmax, coverage_function, modular_function, table_function
from .verify import SUITES


class ParseError(ValueError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class Instance:
    def __init__(self, n, kind, theta, graph=None, system=None, system_desc="none",
                 records=None):
        self.n = n
        self.kind = kind
        self.theta = theta
        self.graph = graph
        self.system = system
        self.system_desc = system_desc
        self.records = records or {}


def _lines(text):
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((i, line))
    return out


def _parse_mask(tok, width, lineno):
    if not tok or any(c not in "01" for c in tok):
        raise ParseError(lineno, f"bad bitmask {tok!r}")
    if len(tok) > width:
        raise ParseError(lineno, f"bitmask {tok!r} wider than {width}")
    return int(tok, 2)


def _parse_index(tok, n, lineno):
    try:
        i = int(tok)
    except ValueError:
        raise ParseError(lineno, f"bad index {tok!r}") from None
    if not (1 <= i <= n):
        raise ParseError(lineno, f"index {i} out of range 1..{n}")
    return i - 1


def _parse_edges(lines, pos, n, stop_prefixes=("system=",)):
    edges = []
    seen = set()
    while pos < len(lines):
        lineno, line = lines[pos]
        if any(line.startswith(p) for p in stop_prefixes):
            break
        toks = line.split()
        if len(toks) != 2:
            raise ParseError(lineno, f"expected an edge line, got {line!r}")
        u = _parse_index(toks[0], n, lineno)
        v = _parse_index(toks[1], n, lineno)
        if u == v:
            raise ParseError(lineno, f"self-loop at {u + 1}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(lineno, f"duplicate edge {u + 1} {v + 1}")
        seen.add(key)
        edges.append(key)
        pos += 1
    return edges, pos


def parse_instance(text):
    """Parse instance text into (theta, optional graph, optional system)."""
    lines = _lines(text)
    if not lines:
        raise ParseError(0, "empty instance")
    pos = 0

    lineno, line = lines[pos]
    if not line.startswith("n="):
        raise ParseError(lineno, "first line must be n=<int>")
    try:
        n = int(line[2:])
    except ValueError:
        raise ParseError(lineno, f"bad ground size {line[2:]!r}") from None
    if not (1 <= n <= 64):
        raise ParseError(lineno, f"n={n} outside 1..64")
    pos += 1

    if pos >= len(lines):
        raise ParseError(lineno, "missing theta=<kind>")
    lineno, line = lines[pos]
    if not line.startswith("theta="):
        raise ParseError(lineno, "expected theta=<kind>")
    kind = line[6:]
    pos += 1
    records = {}

    if kind == "table":
        values = {}
        while pos < len(lines) and lines[pos][1].startswith("set "):
            lineno, line = lines[pos]
            toks = line.split()
            if len(toks) != 3:
                raise ParseError(lineno, "table record must be: set <mask> <value>")
            mask = _parse_mask(toks[1], n, lineno)
            if mask in values:
                raise ParseError(lineno, f"duplicate record for mask {toks[1]}")
            try:
                values[mask] = float(toks[2])
            except ValueError:
                raise ParseError(lineno, f"bad value {toks[2]!r}") from None
            pos += 1
        if len(values) != (1 << n):
            raise ParseError(lines[pos - 1][0] if pos else 0,
                             f"table has {len(values)} of {1 << n} records")
        theta = table_function([values[m] for m in range(1 << n)])
        records["values"] = values
    elif kind == "modular":
        weights = [0.0] * n
        given = set()
        while pos < len(lines) and lines[pos][1].startswith("weight "):
            lineno, line = lines[pos]
            toks = line.split()
            if len(toks) != 3:
                raise ParseError(lineno, "weight record must be: weight <i> <value>")
            i = _parse_index(toks[1], n, lineno)
            if i in given:
                raise ParseError(lineno, f"duplicate weight for element {i + 1}")
            given.add(i)
            try:
                weights[i] = float(toks[2])
            except ValueError:
                raise ParseError(lineno, f"bad value {toks[2]!r}") from None
            pos += 1
        theta = modular_function(weights)
        records["weights"] = weights
    elif kind == "coverage":
        if pos >= len(lines) or not lines[pos][1].startswith("universe="):
            raise ParseError(lines[pos][0] if pos < len(lines) else 0,
                             "coverage needs universe=<m>")
        lineno, line = lines[pos]
        try:
            universe = int(line[9:])
        except ValueError:
            raise ParseError(lineno, f"bad universe {line[9:]!r}") from None
        if universe < 1:
            raise ParseError(lineno, "universe must be positive")
        pos += 1
        covers = [0] * n
        while pos < len(lines) and lines[pos][1].startswith("covers "):
            lineno, line = lines[pos]
            toks = line.split()
            if len(toks) != 3:
                raise ParseError(lineno, "cover record must be: covers <i> <mask>")
            i = _parse_index(toks[1], n, lineno)
            covers[i] = _parse_mask(toks[2], universe, lineno)
            pos += 1
        theta = coverage_function(n, covers, universe)
        records["universe"] = universe
        records["covers"] = covers
    elif kind == "cut":
        theta = None   # needs the graph section below
    else:
        raise ParseError(lineno, f"unknown theta kind {kind!r}")

    graph = None
    if pos < len(lines) and lines[pos][1] == "graph:":
        pos += 1
        edges, pos = _parse_edges(lines, pos, n)
        graph = Graph(n, edges)
    if kind == "cut":
        if graph is None:
            raise ParseError(lines[-1][0], "theta=cut needs a graph: section")
        theta = cut_function(graph)

    system = None
    system_desc = "none"
    if pos < len(lines):
        lineno, line = lines[pos]
        if not line.startswith("system="):
            raise ParseError(lineno, f"unexpected line {line!r}")
        spec = line[7:]
        pos += 1
        if spec == "none":
            pass
        elif spec.startswith("cardinality"):
            toks = spec.split()
            if len(toks) != 2:
                raise ParseError(lineno, "system=cardinality needs a bound k")
            try:
                k = int(toks[1])
            except ValueError:
                raise ParseError(lineno, f"bad bound {toks[1]!r}") from None
            if k < 0:
                raise ParseError(lineno, "cardinality bound must be >= 0")
            system = SubsetSystem.cardinality(n, k)
            system_desc = f"cardinality {k}"
        elif spec == "graph-independence":
            edges, pos = _parse_edges(lines, pos, n, stop_prefixes=())
            system = SubsetSystem.graph_independence(Graph(n, edges))
            system_desc = "graph-independence"
            records["system_edges"] = edges
        elif spec == "explicit":
            sets = []
            while pos < len(lines):
                lineno, line = lines[pos]
                toks = line.split()
                mask = from_elements(_parse_index(t, n, lineno) for t in toks)
                sets.append(mask)
                pos += 1
            if not sets:
                raise ParseError(lineno, "system=explicit needs at least one set line")
            system = SubsetSystem.explicit(n, sets)
            system_desc = "explicit"
            records["system_sets"] = sets
        else:
            raise ParseError(lineno, f"unknown system {spec!r}")
        if system is not None and n <= 12 and not system.is_downward_closed():
            raise ParseError(lineno, "system is not downward closed")

    if pos < len(lines) and system is None:
        raise ParseError(lines[pos][0], f"unexpected line {lines[pos][1]!r}")

    return Instance(n, kind, theta, graph, system, system_desc, records)


def serialize_instance(inst):
    """Canonical text for an instance; parse(serialize(x)) round-trips."""
    n = inst.n
    out = [f"n={n}", f"theta={inst.kind}"]
    if inst.kind == "table":
        for mask in range(1 << n):
            out.append(f"set {mask:0{n}b} {_fmt(inst.theta(mask))}")
    elif inst.kind == "modular":
        for i, w in enumerate(inst.records["weights"]):
            out.append(f"weight {i + 1} {_fmt(w)}")
    elif inst.kind == "coverage":
        u = inst.records["universe"]
        out.append(f"universe={u}")
        for i, c in enumerate(inst.records["covers"]):
            out.append(f"covers {i + 1} {c:0{u}b}")
    if inst.graph is not None:
        out.append("graph:")
        for u, v in inst.graph.edge_list:
            out.append(f"{u + 1} {v + 1}")
    if inst.system_desc != "none":
        out.append(f"system={inst.system_desc}")
        for u, v in inst.records.get("system_edges", ()):
            out.append(f"{u + 1} {v + 1}")
        for mask in inst.records.get("system_sets", ()):
            out.append(" ".join(str(i + 1) for i in iter_elements(mask)))
    return "\n".join(out) + "\n"


def _fmt(x):
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    f = float(x)
    if f.is_integer():
        return str(int(f))
    return repr(f)


def _fmt_set(mask):
    return "[" + ",".join(str(i + 1) for i in iter_elements(mask)) + "]"


def _pick_alpha(args, theta):
    if args.alpha != "auto":
        try:
            a = float(args.alpha)
        except ValueError:
            raise DecompositionError(f"bad --alpha {args.alpha!r}") from None
        if a <= 0:
            raise DecompositionError("--alpha must be positive")
        return a
    if theta.n <= 14:
        return min_alpha(theta)
    return default_alpha(theta.bound_M)


def _flags_consistent(args):
    if args.mode == "exact" and args.engine == "ls":
        return "exact mode cannot use the ls engine"
    if args.mode == "approx" and args.engine in ("closed-form", "interval"):
        return "approx mode uses the ls engine"
    if args.engine == "closed-form" and args.fu == "tight":
        return "closed-form engine requires --fu modular"
    if args.parallel > 1 and (args.max_nodes is not None
                              or args.interrupt_depth is not None):
        return "--parallel cannot be combined with --max-nodes or --interrupt-depth"
    return None


def _default_engine(args):
    if args.engine is not None:
        return args.engine
    if args.mode == "approx":
        return "ls"
    return "closed-form" if args.fu == "modular" else "interval"


def cmd_maximize(args):
    try:
        with open(args.instance, encoding="utf-8") as fh:
            inst = parse_instance(fh.read())
    except (OSError, ParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    problem = _flags_consistent(args)
    if problem:
        print(f"error: {problem}", file=sys.stderr)
        return 2
    if args.verify and inst.n > 12:
        print("error: --verify needs n <= 12", file=sys.stderr)
        return 2
    args.engine = _default_engine(args)

    t0 = time.perf_counter()
    try:
        alpha = _pick_alpha(args, inst.theta)
        dec = decompose(inst.theta, alpha, tol=args.tolerance)
    except (DecompositionError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    try:
        if inst.system is None:
            cfg = BBConfig(fu_mode=args.fu, engine=args.engine, epsilon=args.epsilon,
                           node_cap=args.max_nodes, interrupt_depth=args.interrupt_depth,
                           threads=args.parallel)
            result = bb_maximize(dec, cfg)
        else:
            sub = "lsa" if args.engine == "ls" else "exact"
            cfg = BBCConfig(fu_mode=args.fu, subsolver=sub, epsilon=args.epsilon,
                            node_cap=args.max_nodes, interrupt_depth=args.interrupt_depth,
                            threads=args.parallel)
            result = bbc_maximize(dec, inst.system, cfg)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    elapsed_ms = int((time.perf_counter() - t0) * 1000)

    stats = result.stats
    print(f"best_set={_fmt_set(result.best)}")
    print(f"best_value={_fmt(inst.theta(result.best))}")
    print(f"alpha={_fmt(dec.alpha)}")
    print(f"nodes_visited={stats.nodes_visited}")
    print(f"nodes_pruned={stats.nodes_pruned}")
    print(f"nodes_fathomed={stats.nodes_fathomed}")
    if stats.interrupted:
        bound = bb_interrupt_bound(result.state)
        print(f"gap_bound={_fmt(dec.to_theta_units(bound))}")
    if args.verify:
        if inst.system is None:
            oracle, _ = brute_force_argmax(inst.theta, inst.n)
        else:
            oracle, _ = constrained_brute_force(inst.theta, inst.system)
        print(f"oracle_match={'true' if oracle == result.best else 'false'}")
    print(f"wall_time_ms={elapsed_ms}")
    return 3 if stats.interrupted else 0


def cmd_decompose(args):
    try:
        with open(args.instance, encoding="utf-8") as fh:
            inst = parse_instance(fh.read())
        alpha = _pick_alpha(args, inst.theta)
        dec = decompose(inst.theta, alpha, tol=args.tolerance)
    except (OSError, ParseError, DecompositionError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(f"n={inst.n}")
    print(f"alpha={_fmt(dec.alpha)}")
    print(f"shift={_fmt(dec.shift)}")
    if inst.n <= 14:
        print(f"modularity_gap={_fmt(modularity_gap(inst.theta))}")
    print("submodular=true")
    return 0


def cmd_verify(args):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in SUITES:
            print(f"error: unknown suite {name!r}; known: {', '.join(SUITES)}",
                  file=sys.stderr)
            return 2
    total_failures = 0
    for name in names:
        fn = SUITES[name]
        kwargs = {"seed": args.seed}
        if name in ("ls-ratio", "lsa-bound") and args.epsilon is not None:
            kwargs["epsilons"] = (args.epsilon,)
        rep = fn(**kwargs)
        total_failures += rep["failures"]
        print(f"suite={rep['suite']} trials={rep['trials']} "
              f"failures={rep['failures']} max_violation={_fmt(rep['max_violation'])}")
    return 0 if total_failures == 0 else 1


def cmd_bench(args):
    args.engine = _default_engine(args)
    problem = _flags_consistent(args)
    if problem:
        print(f"error: {problem}", file=sys.stderr)
        return 2
    r = rng(args.seed, 99)
    total_ms = 0
    for i in range(args.count):
        n = 4 + (i % 7)
        theta = random_table_function(n, r)
        dec = decompose(theta)
        cfg = BBConfig(fu_mode=args.fu, engine=args.engine, epsilon=args.epsilon)
        t0 = time.perf_counter()
        result = bb_maximize(dec, cfg)
        ms = int((time.perf_counter() - t0) * 1000)
        total_ms += ms
        oracle, _ = brute_force_argmax(theta, n)
        print(f"bench i={i} n={n} nodes_visited={result.stats.nodes_visited} "
              f"nodes_pruned={result.stats.nodes_pruned} "
              f"match={'true' if oracle == result.best else 'false'} wall_time_ms={ms}")
    print(f"bench_total count={args.count} wall_time_ms={total_ms}")
    return 0


def _add_common_flags(p):
    p.add_argument("--mode", choices=("exact", "approx"), default="exact")
    p.add_argument("--fu", choices=("modular", "tight"), default="modular")
    p.add_argument("--engine", choices=("closed-form", "interval", "ls"), default=None)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--alpha", default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-nodes", type=int, default=None)
    p.add_argument("--interrupt-depth", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--parallel", type=int, default=1)


def build_parser():
    ap = argparse.ArgumentParser(prog="setmax",
                                 description="Maximize set functions by decomposition "
                                             "and branch and bound")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("maximize", help="maximize an instance file")
    p.add_argument("instance")
    _add_common_flags(p)
    p.set_defaults(fn=cmd_maximize)

    p = sub.add_parser("decompose", help="report the decomposition of an instance")
    p.add_argument("instance")
    _add_common_flags(p)
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("verify", help="run a named property suite")
    p.add_argument("suite", help="suite name or 'all'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=None)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("bench", help="run seeded random instances and time them")
    p.add_argument("--count", type=int, default=7)
    _add_common_flags(p)
    p.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
