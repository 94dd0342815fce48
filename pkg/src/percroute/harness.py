"""Conditioned Monte-Carlo sweeps.

A sweep is a grid of cells (size x probability); every cell runs ``trials``
independent percolation samples. Each trial records the ground-truth
connectivity of its endpoint pair alongside the router outcome, and
conditioning on ``u ~ v`` happens at aggregation time.

Sweep config (JSON)::

    {
      "family": "mesh",                 # hypercube | mesh | doubletree | complete
      "sizes": [16, 32, 64],            # n, pair distance (mesh), depth, vertex count
      "params": {"d": 2, "M": 256},     # mesh only; M defaults to 2 * size
      "p": [0.7],                       # exactly one of p / alpha (p = n^-alpha) / c_over_n (p = c/n)
      "router": "mesh-waypoint",
      "router_options": {},             # e.g. {"radius": 3} for hc-waypoint
      "endpoints": "default",           # default | antipodal | roots | distance-n | fixed
      "pair": null,                     # vertex labels for "fixed"
      "trials": 300,
      "base_seed": 0,
      "budget": null,                   # null (edge count), integer, or "n^4" / "2*n^3"
      "timing": false,                  # fill the ms column (breaks byte-identical reruns)
      "workers": 1,
      "csv": "trials.csv",
      "summary": "summary.json"
    }
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .analysis import summarize
from .errors import CapacityError, ConfigError
from .percolation import DEFAULT_EDGE_CEILING, MASK64, PercolationConfig, derive_seed, ground_truth_connected
from .routers import ROUTERS, get_router
from .topology import FAMILIES, Complete, DoubleTree, Hypercube, Mesh, Topology

log = logging.getLogger(__name__)

CSV_COLUMNS = ["family", "size", "p", "alpha", "router", "trial", "seed", "connected",
               "status", "probes", "calls", "path_len", "ms"]
MIN_CONDITIONED = 50
_BUDGET_RE = re.compile(r"^\s*(?:(\d+(?:\.\d+)?)\s*\*\s*)?n\s*(?:\^|\*\*)\s*(\d+(?:\.\d+)?)\s*$")


@dataclass
class SweepConfig:
    family: str
    sizes: list[int]
    router: str
    p: list[float] | None = None
    alpha: list[float] | None = None
    c_over_n: list[float] | None = None
    params: dict = field(default_factory=dict)
    router_options: dict = field(default_factory=dict)
    endpoints: str = "default"
    pair: list | None = None
    trials: int = 100
    base_seed: int = 0
    budget: int | str | None = None
    timing: bool = False
    workers: int = 1
    csv: str | None = None
    summary: str | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        if self.router not in ROUTERS:
            raise ConfigError(f"unknown router {self.router!r}")
        if not self.sizes or any(not isinstance(s, int) or s < 1 for s in self.sizes):
            raise ConfigError("sizes must be a non-empty list of positive integers")
        given = [k for k in ("p", "alpha", "c_over_n") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ConfigError("give exactly one of p, alpha, c_over_n")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.endpoints not in ("default", "antipodal", "roots", "distance-n", "fixed"):
            raise ConfigError(f"unknown endpoint rule {self.endpoints!r}")
        if self.endpoints == "fixed" and not self.pair:
            raise ConfigError("endpoint rule 'fixed' needs a pair")
        for cell in self.cells():
            if not 0.0 <= cell.p <= 1.0:
                raise ConfigError(f"p={cell.p} out of [0, 1] for size {cell.size}")

    @classmethod
    def from_dict(cls, data: dict) -> SweepConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown sweep config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path: str | Path) -> SweepConfig:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read sweep config {path}: {exc}") from None
        return cls.from_dict(data)

    def cells(self) -> list[Cell]:
        out = []
        for size in self.sizes:
            if self.p is not None:
                pairs = [(float(p), None) for p in self.p]
            elif self.alpha is not None:
                pairs = [(float(size) ** -float(a), float(a)) for a in self.alpha]
            else:
                pairs = [(float(c) / size, None) for c in self.c_over_n]
            for p, a in pairs:
                out.append(Cell(len(out), size, p, a))
        return out


@dataclass(frozen=True)
class Cell:
    index: int
    size: int
    p: float
    alpha: float | None


@dataclass
class TrialRecord:
    family: str
    size: int
    p: float
    alpha: float | None
    router: str
    trial: int
    seed: int
    connected: bool
    status: str
    probes: int
    calls: int
    path_len: int | None
    ms: float | None

    def row(self) -> list[str]:
        return [
            self.family, str(self.size), repr(self.p), "" if self.alpha is None else repr(self.alpha),
            self.router, str(self.trial), str(self.seed), "1" if self.connected else "0", self.status,
            str(self.probes), str(self.calls), "" if self.path_len is None else str(self.path_len),
            "" if self.ms is None else f"{self.ms:.3f}",
        ]

    @classmethod
    def from_row(cls, row: dict) -> TrialRecord:
        return cls(
            family=row["family"], size=int(row["size"]), p=float(row["p"]),
            alpha=float(row["alpha"]) if row["alpha"] else None, router=row["router"],
            trial=int(row["trial"]), seed=int(row["seed"]), connected=row["connected"] == "1",
            status=row["status"], probes=int(row["probes"]), calls=int(row["calls"]),
            path_len=int(row["path_len"]) if row["path_len"] else None,
            ms=float(row["ms"]) if row["ms"] else None,
        )


def make_topology(family: str, size: int, params: dict | None = None) -> Topology:
    params = params or {}
    if family == "hypercube":
        return Hypercube(size)
    if family == "mesh":
        return Mesh(int(params.get("d", 2)), int(params.get("M", 2 * size)))
    if family == "doubletree":
        return DoubleTree(size)
    if family == "complete":
        return Complete(size)
    raise ConfigError(f"unknown family {family!r}")


def resolve_endpoints(topology: Topology, rule: str, size: int, pair=None) -> tuple[int, int]:
    if rule == "default":
        rule = {"hypercube": "antipodal", "mesh": "distance-n", "doubletree": "roots",
                "complete": "default"}[topology.family]
        if rule == "default":
            return topology.default_endpoints()
    if rule == "fixed":
        a, b = pair
        enc = topology.encode_vertex
        return enc(tuple(a) if isinstance(a, list) else a), enc(tuple(b) if isinstance(b, list) else b)
    if rule == "roots":
        if not isinstance(topology, DoubleTree):
            raise ConfigError("endpoint rule 'roots' needs a doubletree")
        return topology.root_x, topology.root_y
    if rule == "antipodal":
        if isinstance(topology, DoubleTree):
            raise ConfigError("use 'roots' for the double tree")
        return topology.default_endpoints()
    if rule == "distance-n":
        if not isinstance(topology, Mesh):
            raise ConfigError("endpoint rule 'distance-n' needs a mesh")
        M = topology.M
        if size >= M:
            raise ConfigError(f"pair distance {size} does not fit in side {M}")
        start = (M - size) // 2
        rest = (M // 2,) * (topology.d - 1)
        return topology.encode_vertex((start, *rest)), topology.encode_vertex((start + size, *rest))
    raise ConfigError(f"unknown endpoint rule {rule!r}")


def resolve_budget(spec, n: int, topology: Topology) -> int:
    if spec is None or spec == "edges":
        return topology.edge_count
    if isinstance(spec, bool):
        raise ConfigError("budget must be an integer or an n^k expression")
    if isinstance(spec, (int, float)):
        if spec < 0:
            raise ConfigError("budget must be non-negative")
        return int(spec)
    m = _BUDGET_RE.match(str(spec))
    if not m:
        raise ConfigError(f"cannot parse budget {spec!r}")
    coef = float(m.group(1) or 1)
    return math.ceil(coef * n ** float(m.group(2)))


def trial_seed(base_seed: int, cell_index: int, trial: int) -> int:
    return derive_seed(base_seed & MASK64, cell_index, trial)


def _cell_context(cfg: SweepConfig, cell: Cell):
    topo = make_topology(cfg.family, cell.size, cfg.params)
    u, v = resolve_endpoints(topo, cfg.endpoints, cell.size, cfg.pair)
    return topo, u, v, resolve_budget(cfg.budget, cell.size, topo)


def run_trial(cfg: SweepConfig, cell: Cell, trial: int, context=None) -> TrialRecord:
    """One trial of ``cell``; regenerating it from ``(cfg, cell, trial)`` gives the same record."""
    topo, u, v, budget = context or _cell_context(cfg, cell)
    seed = trial_seed(cfg.base_seed, cell.index, trial)
    pcfg = PercolationConfig(topo, cell.p, seed)
    connected = ground_truth_connected(pcfg, u, v)
    router = get_router(cfg.router)
    t0 = time.perf_counter()
    result = router(pcfg, u, v, budget=budget, **cfg.router_options)
    ms = (time.perf_counter() - t0) * 1e3 if cfg.timing else None
    if result.found and not connected:
        raise AssertionError(f"router {cfg.router} found a path although u, v are disconnected (seed {seed})")
    return TrialRecord(cfg.family, cell.size, cell.p, cell.alpha, cfg.router, trial, seed, connected,
                       result.status.value, result.probes, result.calls, result.path_len, ms)


def _run_cell(args) -> list[TrialRecord]:
    cfg, cell = args
    context = _cell_context(cfg, cell)
    return [run_trial(cfg, cell, k, context) for k in range(cfg.trials)]


def check_seed_streams(cfg: SweepConfig) -> None:
    seeds = {trial_seed(cfg.base_seed, c.index, k) for c in cfg.cells() for k in range(cfg.trials)}
    if len(seeds) != len(cfg.cells()) * cfg.trials:
        raise RuntimeError("trial seed collision across the sweep")


@dataclass
class SweepResult:
    records: list[TrialRecord]
    summaries: list[dict]

    def csv_text(self) -> str:
        return records_to_csv(self.records)

    def summary_json(self) -> str:
        return json.dumps(self.summaries, indent=2, sort_keys=True)


def cell_summary(cfg: SweepConfig, cell: Cell, records: list[TrialRecord]) -> dict:
    stats = summarize(records)
    if stats.n_conditioned < MIN_CONDITIONED:
        log.warning("cell size=%s p=%.4g has only %d conditioned trials", cell.size, cell.p, stats.n_conditioned)
    topo = make_topology(cfg.family, cell.size, cfg.params)
    return {
        "cell": cell.index, "family": cfg.family, "topology": str(topo), "size": cell.size,
        "p": cell.p, "alpha": cell.alpha, "router": cfg.router, "connect_rate": stats.connect_rate,
        **{k: _json_num(v) for k, v in stats.to_dict().items()},
    }


def _json_num(x):
    return None if isinstance(x, float) and math.isnan(x) else x


def run_sweep(cfg: SweepConfig, write: bool = True) -> SweepResult:
    """Run every cell; records come back sorted by (cell, trial) whatever the worker count."""
    check_seed_streams(cfg)
    cells = cfg.cells()
    for cell in cells:
        topo = make_topology(cfg.family, cell.size, cfg.params)
        if topo.edge_count > DEFAULT_EDGE_CEILING:
            raise CapacityError(f"{topo} has {topo.edge_count} edges; ground truth is capped at {DEFAULT_EDGE_CEILING}")
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            per_cell = list(pool.map(_run_cell, [(cfg, c) for c in cells]))
    else:
        per_cell = [_run_cell((cfg, c)) for c in cells]
    records = [r for recs in per_cell for r in recs]
    summaries = [cell_summary(cfg, c, recs) for c, recs in zip(cells, per_cell)]
    result = SweepResult(records, summaries)
    if write:
        try:
            if cfg.csv:
                Path(cfg.csv).write_text(result.csv_text())
            if cfg.summary:
                Path(cfg.summary).write_text(result.summary_json())
        except OSError as exc:
            raise ConfigError(f"cannot write sweep output: {exc}") from None
    return result


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def read_trials_csv(source) -> list[TrialRecord]:
    text = Path(source).read_text() if not isinstance(source, io.StringIO) else source.getvalue()
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_COLUMNS:
        raise ConfigError(f"unexpected CSV header {reader.fieldnames}")
    return [TrialRecord.from_row(row) for row in reader]


def phase_portrait_hypercube(
    n_list,
    alpha_list,
    router: str = "hc-waypoint",
    budget="n^4",
    trials: int = 200,
    base_seed: int = 0,
    router_options: dict | None = None,
) -> list[dict]:
    """Conditioned success-within-budget rate and median probes over an (n, alpha) grid."""
    if any(n > 20 for n in n_list):
        raise ConfigError("phase portrait limited to n <= 20")
    if router_options is None:
        router_options = {"radius": 3} if router == "hc-waypoint" else {}
    cfg = SweepConfig(family="hypercube", sizes=list(n_list), alpha=list(alpha_list), router=router,
                      router_options=router_options, trials=trials, base_seed=base_seed, budget=budget)
    res = run_sweep(cfg, write=False)
    return [
        {"n": s["size"], "alpha": s["alpha"], "p": s["p"], "n_trials": s["n_trials"],
         "n_conditioned": s["n_conditioned"], "success_rate": s["success_rate_within_budget"],
         "median_probes": s["median_probes"], "budget": resolve_budget(budget, s["size"], Hypercube(s["size"]))}
        for s in res.summaries
    ]


def config_to_dict(cfg: SweepConfig) -> dict:
    return asdict(cfg)
