"""Command-line entry point: ``percroute {route,sweep,validate-bound,count-paths,accept}``.

Exit codes: 0 success, 2 configuration error, 3 capacity error, 4 failed check.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from . import analysis
from .errors import CapacityError, ConfigError
from .harness import SweepConfig, resolve_budget, run_sweep
from .percolation import PercolationConfig
from .routers import ROUTERS, route
from .topology import parse_topology

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY, EXIT_FAILED = 0, 2, 3, 4


def _label(text: str):
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        raise ConfigError(f"vertex label {text!r} is not JSON (try 5, [1,2] or [\"first\",0,0])") from None
    return tuple(value) if isinstance(value, list) else value


def cmd_route(args) -> int:
    topo = parse_topology(args.topology)
    if (args.p is None) == (args.alpha is None):
        raise ConfigError("give exactly one of --p and --alpha")
    size = getattr(topo, "n", None) or getattr(topo, "M", 2)
    p = args.p if args.p is not None else size ** -args.alpha
    cfg = PercolationConfig(topo, p, args.seed)
    u, v = topo.default_endpoints()
    if args.u is not None:
        u = topo.encode_vertex(_label(args.u))
    if args.v is not None:
        v = topo.encode_vertex(_label(args.v))
    budget = None if args.budget is None else resolve_budget(
        int(args.budget) if args.budget.isdigit() else args.budget, size, topo)
    options = {"radius": args.radius} if args.router == "hc-waypoint" else {}
    result = route(args.router, cfg, u, v, budget=budget, **options)
    out = {"topology": str(topo), "p": p, "seed": cfg.seed, "router": args.router,
           "u": topo.decode_vertex(u), "v": topo.decode_vertex(v), **result.to_dict(topo)}
    print(json.dumps(out))
    if args.ledger_csv:
        with open(args.ledger_csv, "w", newline="") as fh:
            result.ledger.to_csv(fh)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = SweepConfig.load(args.config)
    if args.csv:
        cfg.csv = args.csv
    if args.summary:
        cfg.summary = args.summary
    if args.workers:
        cfg.workers = args.workers
    result = run_sweep(cfg)
    if not cfg.summary:
        print(result.summary_json())
    if not cfg.csv:
        sys.stdout.write(result.csv_text())
    return EXIT_OK


def cmd_validate_bound(args) -> int:
    grid = args.t_grid or f"geom:1:{args.p ** -args.n}:20"
    reports = analysis.validate_lemma1_doubletree(args.n, args.p, grid, args.trials, base_seed=args.seed)
    text = analysis.reports_to_json(reports, n=args.n, p=args.p, eta=args.p**args.n)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text)
    else:
        print(text)
    return EXIT_FAILED if any(r.violated for r in reports) else EXIT_OK


def cmd_count_paths(args) -> int:
    if args.n is None:
        rows = analysis.ball_path_table()
    else:
        count, bound = analysis.count_ball_paths(args.n, args.l, args.k)
        rows = [{"n": args.n, "l": args.l, "k": args.k, "count": count, "bound": bound,
                 "l_factorial": math.factorial(args.l)}]
    print(json.dumps(rows, indent=2))
    ok = all(r["count"] <= r["bound"] and (r["k"] or r["count"] == r["l_factorial"]) for r in rows)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_accept(args) -> int:
    from .acceptance import CRITERIA, run_all

    names = args.only.split(",") if args.only else list(CRITERIA)
    unknown = [n for n in names if n not in CRITERIA]
    if unknown:
        raise ConfigError(f"unknown criteria {unknown}")
    results = run_all(names)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="percroute", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("route", help="run one routing trial and print the result as JSON")
    r.add_argument("--topology", required=True, help="e.g. hypercube:n=12, mesh:d=2,M=64")
    r.add_argument("--router", required=True, choices=sorted(ROUTERS))
    r.add_argument("--p", type=float)
    r.add_argument("--alpha", type=float, help="p = n^-alpha")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--u", help="source vertex label as JSON; defaults per family")
    r.add_argument("--v", help="target vertex label as JSON")
    r.add_argument("--budget", help="integer or n^k expression")
    r.add_argument("--radius", type=int, default=3, help="stage depth for hc-waypoint")
    r.add_argument("--ledger-csv", help="write the probe log here")
    r.set_defaults(func=cmd_route)

    s = sub.add_parser("sweep", help="run a sweep config; writes trial CSV and JSON summary")
    s.add_argument("config")
    s.add_argument("--csv")
    s.add_argument("--summary")
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_sweep)

    b = sub.add_parser("validate-bound", help="check the local-router lower bound on the double tree")
    b.add_argument("--n", type=int, default=10)
    b.add_argument("--p", type=float, default=0.85)
    b.add_argument("--trials", type=int, default=10_000)
    b.add_argument("--t-grid", help="comma list or geom:START:STOP:NUM (default 20 points in [1, p^-n])")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--json", help="write the report here instead of stdout")
    b.set_defaults(func=cmd_validate_bound)

    c = sub.add_parser("count-paths", help="exact ball walk counts against n^k l^2k l!")
    c.add_argument("--n", type=int)
    c.add_argument("--l", type=int, default=1)
    c.add_argument("--k", type=int, default=0)
    c.set_defaults(func=cmd_count_paths)

    a = sub.add_parser("accept", help="run the acceptance criteria")
    a.add_argument("--only", help="comma-separated subset, e.g. A1,A6")
    a.set_defaults(func=cmd_accept)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
