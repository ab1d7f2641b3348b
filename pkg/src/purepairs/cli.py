"""Command-line entry point.

Subcommands: gen, find, oracle, count, audit, sweep.  Rationals are written
``p/q``.  Arguments may be collected in a file and passed as ``@file``.

Exit codes: 0 success, 1 usage / parse / precondition error, 2 finder
failure or violated premise, 3 indeterminate (search budget exhausted).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import __version__, bounds, finders, generators, metrics, oracle
from .exact import ceil_frac, fmt_rational, parse_rational
from .graphcore import (
    KINDS,
    ORDERED,
    RAINBOW,
    TRANSVERSAL,
    BlockadeError,
    Pattern,
    broom_pattern,
    cycle_pattern,
    double_broom_pattern,
    path_pattern,
    pattern_from_edges,
    star_pattern,
)
from .instance import InstanceFormatError, load

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_UNKNOWN = 0, 1, 2, 3
SWEEP_SCHEMA = 1


class UsageError(Exception):
    pass


# -- argument types ------------------------------------------------------------

def rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def rational_list(text: str) -> list[Fraction]:
    return [rational(x) for x in text.split(",") if x.strip()]


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_pattern(spec: str) -> Pattern:
    """``path:K``, ``cycle:K``, ``star:T``, ``star-last:T``, ``broom:K:T``,
    ``dbroom:K:S:T`` or ``edges:N:u-v,u-v,...``; prefix ``ordered-`` for ordered."""
    ordered = spec.startswith("ordered-")
    body = spec[len("ordered-"):] if ordered else spec
    name, _, rest = body.partition(":")
    try:
        if name == "edges":
            n, _, elist = rest.partition(":")
            edges = []
            for item in filter(None, elist.split(",")):
                u, v = item.split("-")
                edges.append((int(u), int(v)))
            return pattern_from_edges(int(n), edges, ordered)
        args = [int(x) for x in rest.split(":")] if rest else []
        if name == "path" and len(args) == 1:
            return path_pattern(args[0], ordered)
        if name == "cycle" and len(args) == 1:
            return cycle_pattern(args[0], ordered)
        if name == "star" and len(args) == 1:
            return star_pattern(args[0], ordered)
        if name == "star-last" and len(args) == 1:
            return star_pattern(args[0], ordered, centre_last=True)
        if name in ("broom", "dbroom"):
            p = broom_pattern(*args) if name == "broom" else double_broom_pattern(*args)
            return Pattern(p.graph, ordered, p.name)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad pattern {spec!r}: {exc}") from None
    raise UsageError(f"unknown pattern {spec!r}")


def _dump(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path: str):
    try:
        return load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


# -- gen -------------------------------------------------------------------------

_GEN_FLAGS = {
    "random-bipartite": ("n", "eps", "max_attempts"),
    "regular": ("k", "W", "d"),
    "star-free": ("k", "W", "eps", "p", "max_attempts"),
    "double-broom": ("k", "W", "eps", "max_attempts"),
    "ordered-star": ("t", "c", "eps", "n", "integral", "max_n"),
}


def cmd_gen(args) -> int:
    if args.config:
        spec = generators.GenSpec.from_text(Path(args.config).read_text())
        if args.kind and args.kind != spec.kind:
            raise UsageError(f"config is for {spec.kind}, not {args.kind}")
    else:
        if args.kind is None:
            raise UsageError("gen needs a construction or --config")
        if args.seed is None:
            raise UsageError("--seed is required")
        params = {}
        for key in _GEN_FLAGS[args.kind]:
            val = getattr(args, key)
            if val is not None:
                params[key] = val
        spec = generators.GenSpec(args.kind, args.seed, params)
    if args.print_config:
        sys.stdout.write(spec.to_text())
        return EXIT_OK
    out = Path(args.out or f"{spec.kind}-s{spec.seed}.blk")
    audit = Path(args.audit or f"{out}.audit.json")
    code = EXIT_OK
    try:
        g = spec.run()
    except generators.GenerationFailed as exc:
        if exc.best is None:
            raise
        g = exc.best
        g.audit["error"] = str(exc)
        print(f"generation failed: {exc}; best candidate written", file=sys.stderr)
        code = EXIT_FAIL
    out.write_bytes(g.instance_bytes())
    audit.write_text(g.audit_json())
    print(f"{out} ({g.blockade.k} blocks, width {g.blockade.width}, {g.blockade.graph.num_edges()} edges)")
    return code


# -- find ------------------------------------------------------------------------

FIND_TARGETS = ("path", "star", "broom", "c4", "cycle", "caterpillar", "tree")


def run_finder(target: str, b, args) -> finders.FinderOutcome:
    if target == "path":
        return finders.find_transversal_path(b, eps=args.eps)
    if target == "star":
        if args.k is None:
            raise UsageError("find star needs --k")
        return finders.find_rainbow_star(b, args.k, eps=args.eps, check=args.check)
    if target == "broom":
        if args.k is None or args.t is None:
            raise UsageError("find broom needs --k and --t")
        return finders.find_transversal_broom(b, args.k, args.t, tau=args.tau, eps=args.eps)
    if target == "c4":
        return finders.find_transversal_c4(b, eps=args.eps, c=args.c)
    if target == "cycle":
        return finders.find_transversal_cycle(b, eps=args.eps, c=args.c)
    if target in ("caterpillar", "tree"):
        p = parse_pattern(args.pattern) if args.pattern else path_pattern(b.k, True)
        if target == "caterpillar":
            return finders.find_ordered_caterpillar(b, p, head=args.head, eps=args.eps, d=args.d)
        return finders.embed_ordered_tree(b, p, c=args.c, budget=args.budget)
    raise UsageError(f"unknown finder {target!r}")


def cmd_find(args) -> int:
    b = _load(args.instance)
    res = run_finder(args.target, b, args)
    _dump(res.to_dict(), args.out)
    return EXIT_OK if res.ok else EXIT_FAIL


# -- oracle / count ----------------------------------------------------------------

def _kind(args, p: Pattern) -> str:
    if args.kind:
        return args.kind
    return ORDERED if p.ordered else TRANSVERSAL


def cmd_oracle(args) -> int:
    b = _load(args.instance)
    p = parse_pattern(args.pattern)
    kind = _kind(args, p)
    doc = {"pattern": p.name, "kind": kind}
    try:
        w = oracle.find_copy(b, p, kind, budget=args.budget)
    except oracle.BudgetExceeded:
        doc["verdict"] = "indeterminate"
        _dump(doc, args.out)
        return EXIT_UNKNOWN
    doc["verdict"] = "found" if w is not None else "none"
    doc["witness"] = w.to_dict() if w is not None else None
    _dump(doc, args.out)
    return EXIT_OK


def cmd_count(args) -> int:
    b = _load(args.instance)
    p = parse_pattern(args.pattern)
    kind = _kind(args, p)
    doc = {"pattern": p.name, "kind": kind, "width": b.width}
    try:
        n = oracle.count_copies(b, p, kind, budget=args.budget)
    except oracle.BudgetExceeded:
        doc["count"] = None
        doc["verdict"] = "indeterminate"
        _dump(doc, args.out)
        return EXIT_UNKNOWN
    doc["count"] = n
    if args.c is not None:
        card = bounds.regime_card("tree-count", k=p.k, c=args.c)
        floor = card.thresholds(b.width)["count_floor"]
        doc["count_floor"] = str(floor)
        doc["count_floor_ceil"] = floor.ceil()
        doc["meets_floor"] = floor.le(n)
        doc["premises"] = bounds.check_regime(b, card, args.audit_budget).to_dict()
    _dump(doc, args.out)
    return EXIT_OK


# -- audit ---------------------------------------------------------------------

def cmd_audit(args) -> int:
    b = _load(args.instance)
    doc = {"k": b.k, "width": b.width, "local_degree": metrics.local_degree(b)}
    if args.theorem:
        card = bounds.regime_card(args.theorem, k=args.k if args.k is not None else b.k, t=args.t, d=args.d,
                                  c=args.c, eps=args.eps, tau=args.tau)
        rep = bounds.check_regime(b, card, args.budget)
        doc["card"] = card.to_dict(b.width)
        doc["regime"] = rep.to_dict()
        sat = rep.satisfied
    elif args.eps is None:
        raise UsageError("audit needs --eps or --theorem")
    elif args.c is not None:
        rep = metrics.check_degree_cohesion_premises(b, args.eps, args.c, args.budget)
        doc["premises"] = rep.to_dict()
        sat = rep.satisfied
    else:
        rep = metrics.check_coherence(b, args.eps, args.budget)
        doc["coherence"] = rep.to_dict()
        sat = rep.satisfied
    _dump(doc, args.out)
    if sat is None:
        return EXIT_UNKNOWN
    return EXIT_OK if sat else EXIT_FAIL


# -- sweep -----------------------------------------------------------------------

SWEEP_COLUMNS = ["probe", "k", "W", "eps", "d", "seed", "edges", "premise", "ok", "failure_stage", "witness"]
TRIANGLE_COLUMNS = ["probe", "k", "W", "eps", "d", "seed", "edges", "triangle", "anticomplete_pair", "pair_blocks"]


def _sweep_row(job):
    """One (grid point, seed) row; errors are recorded in the row, never raised."""
    probe, k, W, eps, d, seed, budget, timing = job
    start = time.perf_counter()
    dd = d if d is not None else max(0, ceil_frac(eps * W) - 1)
    row = {"probe": probe, "k": k, "W": W, "eps": fmt_rational(eps), "d": dd, "seed": seed}
    try:
        b = generators.gen_regular_blockade(k, W, dd, seed).blockade
        row["edges"] = b.graph.num_edges()
        if probe == "triangle":
            try:
                w = oracle.find_copy(b, cycle_pattern(3), TRANSVERSAL, budget=budget)
                row["triangle"] = "yes" if w is not None else "no"
            except oracle.BudgetExceeded:
                row["triangle"] = "unknown"
            best = metrics.largest_anticomplete_pair(b)
            row["anticomplete_pair"] = best[0] if best else 0
            row["pair_blocks"] = f"{best[1]}-{best[3]}" if best else ""
        else:
            rep = metrics.check_coherence(b, eps, budget)
            row["premise"] = {True: "verified", False: "violated", None: "unknown"}[rep.satisfied]
            res = finders.find_transversal_path(b, eps=eps) if probe == "path" else None
            if probe == "star":
                res = finders.find_rainbow_star(b, max(1, k - 1), eps=eps)
            row["ok"] = int(res.ok)
            row["failure_stage"] = res.failure_stage or ""
            row["witness"] = " ".join(map(str, res.result.assignment)) if res.ok else ""
    except Exception as exc:  # noqa: BLE001 - partial failures go into the row
        row["failure_stage"] = f"error: {type(exc).__name__}: {exc}"
    if timing:
        row["seconds"] = f"{time.perf_counter() - start:.4f}"
    return row


def sweep_rows(probe: str, ks, Ws, epss, ds, seeds, budget: int, timing: bool = False, jobs: int = 1) -> list[dict]:
    grid = [(probe, k, W, eps, d, s, budget, timing)
            for k in ks for W in Ws for eps in epss for d in ds for s in seeds]
    if not grid:
        raise UsageError("empty grid")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_sweep_row, grid, chunksize=8))
    return [_sweep_row(j) for j in grid]


def sweep_csv(rows: list[dict], probe: str, config: str, timing: bool) -> str:
    cols = list(TRIANGLE_COLUMNS if probe == "triangle" else SWEEP_COLUMNS)
    if timing:
        cols.append("seconds")
    buf = io.StringIO()
    buf.write(f"# purepairs sweep schema={SWEEP_SCHEMA} version={__version__}\n")
    buf.write(f"# config: {config}\n")
    if probe == "triangle":
        buf.write("# exploratory: transversal triangle vs largest anticomplete pair found (heuristic lower bound)\n")
    w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: r.get(c, "") for c in cols})
    return buf.getvalue()


def cmd_sweep(args) -> int:
    if args.seed_list is not None:
        seeds = args.seed_list
    else:
        seeds = list(range(args.seed_start, args.seed_start + args.seeds))
    ks = args.k_list if args.k_list is not None else [3]
    if args.probe == "triangle" and any(k != 3 for k in ks):
        raise UsageError("the triangle probe runs on 3 blocks")
    ds = args.d_list if args.d_list is not None else [None]
    rows = sweep_rows(args.probe, ks, args.W_list, args.eps_list, ds, seeds, args.budget, args.timing, args.jobs)
    config = (f"probe={args.probe} k={','.join(map(str, ks))} W={','.join(map(str, args.W_list))} "
              f"eps={','.join(map(fmt_rational, args.eps_list))} "
              f"d={','.join('auto' if d is None else str(d) for d in ds)} "
              f"seeds={','.join(map(str, seeds))} budget={args.budget}")
    text = sweep_csv(rows, args.probe, config, args.timing)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def convert_arg_line_to_args(self, arg_line: str):
        line = arg_line.split("#", 1)[0]
        return line.split()

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="purepairs", fromfile_prefix_chars="@",
                 description="Finders, oracles, generators and audits for blockades.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate an instance and its audit sidecar")
    g.add_argument("kind", nargs="?", choices=generators.KINDS)
    g.add_argument("--seed", type=int)
    g.add_argument("--config", help="generator config file (kind, seed and parameters)")
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--W", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--t", type=int)
    g.add_argument("--p", type=int)
    g.add_argument("--eps", type=rational)
    g.add_argument("--c", type=rational)
    g.add_argument("--max-attempts", dest="max_attempts", type=int)
    g.add_argument("--max-n", dest="max_n", type=int)
    g.add_argument("--integral", action=argparse.BooleanOptionalAction, default=None)
    g.add_argument("-o", "--out")
    g.add_argument("--audit", help="audit sidecar path (default: <out>.audit.json)")
    g.add_argument("--print-config", action="store_true", help="print the generator config and exit")
    g.set_defaults(func=cmd_gen)

    f = sub.add_parser("find", help="run a constructive finder")
    f.add_argument("target", choices=FIND_TARGETS)
    f.add_argument("instance")
    f.add_argument("--eps", type=rational)
    f.add_argument("--c", type=rational)
    f.add_argument("--tau", type=rational)
    f.add_argument("--k", type=int)
    f.add_argument("--t", type=int)
    f.add_argument("--d", type=int)
    f.add_argument("--pattern", help="ordered tree for caterpillar/tree (default: ordered path)")
    f.add_argument("--head", type=int, default=0)
    f.add_argument("--check", action="store_true", help="re-verify intermediate structures")
    f.add_argument("--budget", type=int, default=1_000_000)
    f.add_argument("-o", "--out")
    f.set_defaults(func=cmd_find)

    for name, func, helptext in (("oracle", cmd_oracle, "decide whether a copy exists"),
                                 ("count", cmd_count, "count copies exactly")):
        o = sub.add_parser(name, help=helptext)
        o.add_argument("pattern", help="e.g. path:3, ordered-star-last:3, edges:4:0-1,1-2,2-3")
        o.add_argument("instance")
        o.add_argument("--kind", choices=KINDS)
        o.add_argument("--budget", type=int, default=oracle.DEFAULT_MAX_TUPLES)
        o.add_argument("-o", "--out")
        if name == "count":
            o.add_argument("--c", type=rational, help="compare with the tree-count floor at exponent c")
            o.add_argument("--audit-budget", type=int, default=metrics.DEFAULT_BUDGET)
        o.set_defaults(func=func)

    a = sub.add_parser("audit", help="check coherence or a theorem's premises")
    a.add_argument("instance")
    a.add_argument("--theorem", choices=bounds.THEOREMS)
    a.add_argument("--eps", type=rational)
    a.add_argument("--c", type=rational)
    a.add_argument("--tau", type=rational)
    a.add_argument("--k", type=int)
    a.add_argument("--t", type=int)
    a.add_argument("--d", type=int)
    a.add_argument("--budget", type=int, default=metrics.DEFAULT_BUDGET)
    a.add_argument("-o", "--out")
    a.set_defaults(func=cmd_audit)

    s = sub.add_parser("sweep", help="CSV sweep over a parameter grid and seeds")
    s.add_argument("--probe", choices=("path", "star", "triangle"), default="path")
    s.add_argument("--k", dest="k_list", type=int_list)
    s.add_argument("--W", dest="W_list", type=int_list, required=True)
    s.add_argument("--eps", dest="eps_list", type=rational_list, required=True)
    s.add_argument("--d", dest="d_list", type=int_list, help="matchings per block pair (default ceil(eps W)-1)")
    s.add_argument("--seeds", type=int, default=10)
    s.add_argument("--seed-start", type=int, default=0)
    s.add_argument("--seed-list", type=int_list)
    s.add_argument("--budget", type=int, default=20_000)
    s.add_argument("--timing", action="store_true", help="add a wall-clock column (not reproducible)")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"purepairs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InstanceFormatError, BlockadeError, finders.FinderPrecondition, generators.ParameterError,
            metrics.PreconditionError, bounds.UnknownTheorem, ValueError, OSError) as exc:
        print(f"purepairs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
