"""Lower-bound validation, walk counting and scaling fits."""
from __future__ import annotations

import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass
from itertools import combinations

import numpy as np

from .errors import CapacityError, ConfigError, FitError, InsufficientDataError
from .percolation import PercolationConfig, derive_seed, ground_truth_connected
from .routers import doubletree_local_route
from .topology import DoubleTree


@dataclass
class BoundCheckReport:
    t: float
    empirical_cdf: float
    bound_value: float
    n_trials: int
    n_conditioned: int
    standard_error: float
    violated: bool

    def to_dict(self) -> dict:
        return asdict(self)


def parse_t_grid(spec) -> list[float]:
    """Explicit list, comma-separated string, or ``geom:START:STOP:NUM``."""
    if isinstance(spec, str):
        if spec.startswith("geom:"):
            try:
                start, stop, num = spec[5:].split(":")
                return geometric_grid(float(start), float(stop), int(num))
            except ValueError:
                raise ConfigError(f"bad geometric grid {spec!r}; expected geom:START:STOP:NUM") from None
        try:
            return [float(x) for x in spec.split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"bad t grid {spec!r}") from None
    return [float(x) for x in spec]


def geometric_grid(start: float, stop: float, num: int) -> list[float]:
    if start <= 0 or stop < start or num < 1:
        raise ConfigError("geometric grid needs 0 < start <= stop and num >= 1")
    return np.geomspace(start, stop, num).tolist()


def cut_bound(t: float, eta: float, pr_connected: float, pr_connected_inside: float = 0.0) -> float:
    """``(t * eta + Pr[(u ~ v) in S]) / Pr[u ~ v]``."""
    return (t * eta + pr_connected_inside) / pr_connected


def validate_lemma1_doubletree(
    n: int,
    p: float,
    t_grid: Sequence[float] | str,
    n_trials: int,
    base_seed: int = 0,
) -> list[BoundCheckReport]:
    """Compare the empirical ``Pr[X < t | x ~ y]`` of the local BFS with the cut lower bound.

    ``S`` is the second tree (leaves included) so the cut edges are the
    first-tree leaf edges, ``eta = p**n`` and ``x`` lies outside ``S``.
    Routing runs with budget ``ceil(max t)``: the indicator ``X < t`` is exact
    for every ``t`` in the grid and trials far beyond the grid stay cheap.
    """
    if p * p <= 0.5:
        raise ConfigError("the double-tree bound check needs p**2 > 1/2")
    grid = parse_t_grid(t_grid)
    if not grid or min(grid) < 0:
        raise ConfigError("t grid must be non-empty and non-negative")
    topo = DoubleTree(n)
    x, y = topo.root_x, topo.root_y
    budget = max(1, math.ceil(max(grid)))
    probes = []
    n_conn = 0
    for k in range(n_trials):
        cfg = PercolationConfig(topo, p, derive_seed(base_seed, k))
        if not ground_truth_connected(cfg, x, y):
            continue
        n_conn += 1
        r = doubletree_local_route(cfg, budget=budget)
        # budget exhaustion means X > budget >= every t
        probes.append(r.probes if r.found else math.inf)
    if n_conn == 0:
        raise InsufficientDataError(f"no connected trials among {n_trials}")
    arr = np.asarray(probes, dtype=float)
    eta = p**n
    pr_conn = n_conn / n_trials
    reports = []
    for t in grid:
        cdf = float(np.count_nonzero(arr < t)) / n_conn
        se = math.sqrt(cdf * (1 - cdf) / n_conn)
        bound = cut_bound(t, eta, pr_conn)
        reports.append(BoundCheckReport(float(t), cdf, bound, n_trials, n_conn, se, cdf > bound + 3 * se))
    return reports


def reports_to_json(reports: Iterable[BoundCheckReport], **meta) -> str:
    return json.dumps({**meta, "reports": [r.to_dict() for r in reports]}, indent=2)


# -- walk counting in the hypercube ball --------------------------------------------------

BALL_LIMITS = {"n": 6, "l": 3, "k": 2}


def ball_walk_bound(n: int, l: int, k: int) -> int:
    return n**k * l ** (2 * k) * math.factorial(l)


def count_ball_walks(n: int, l: int, k: int, target: int | None = None) -> int:
    """Number of walks of length ``l + 2k`` from 0 to ``target`` inside the radius-``l`` ball of ``H_n``.

    Walks may revisit vertices. ``target`` defaults to the vertex with the
    lowest ``l`` bits set. Counted by dynamic programming over the ball.
    """
    if target is None:
        target = (1 << l) - 1
    if bin(target).count("1") != l:
        raise ConfigError("target must sit at Hamming distance l from the centre")
    ball = [sum(1 << b for b in bits) for r in range(l + 1) for bits in combinations(range(n), r)]
    inside = set(ball)
    counts = {0: 1}
    for _ in range(l + 2 * k):
        nxt: dict[int, int] = {}
        for w, c in counts.items():
            for d in range(n):
                y = w ^ (1 << d)
                if y in inside:
                    nxt[y] = nxt.get(y, 0) + c
        counts = nxt
    return counts.get(target, 0)


def count_ball_paths(n: int, l: int, k: int) -> tuple[int, int]:
    """``(exact walk count, n^k l^(2k) l!)`` with the enumeration guard applied."""
    if n > BALL_LIMITS["n"] or l > BALL_LIMITS["l"] or k > BALL_LIMITS["k"]:
        raise CapacityError(f"count_ball_paths limited to n<=6, l<=3, k<=2 (got n={n}, l={l}, k={k})")
    if not 1 <= l <= n or k < 0:
        raise ConfigError("need 1 <= l <= n and k >= 0")
    count = count_ball_walks(n, l, k)
    bound = ball_walk_bound(n, l, k)
    if count > bound:
        raise AssertionError(f"walk count {count} exceeds bound {bound} at n={n}, l={l}, k={k}")
    return count, bound


def ball_path_table() -> list[dict]:
    rows = []
    for n in range(1, BALL_LIMITS["n"] + 1):
        for l in range(1, min(n, BALL_LIMITS["l"]) + 1):
            for k in range(BALL_LIMITS["k"] + 1):
                count, bound = count_ball_paths(n, l, k)
                rows.append({"n": n, "l": l, "k": k, "count": count, "bound": bound,
                             "l_factorial": math.factorial(l)})
    return rows


# -- aggregation --------------------------------------------------------------------------


@dataclass
class SummaryStats:
    n_trials: int
    n_conditioned: int
    success_rate_within_budget: float
    mean_probes: float
    median_probes: float
    p90_probes: float
    max_probes: float
    mean_path_len: float

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def connect_rate(self) -> float:
        return self.n_conditioned / self.n_trials if self.n_trials else math.nan


def _field(rec, name):
    return rec[name] if isinstance(rec, dict) else getattr(rec, name)


def summarize(records: Iterable) -> SummaryStats:
    """Aggregate trial records; probe statistics use connected trials only."""
    records = list(records)
    cond = [r for r in records if _field(r, "connected")]
    probes = np.array(sorted(_field(r, "probes") for r in cond), dtype=float)
    found = [r for r in cond if _field(r, "status") == "found"]
    lengths = sorted(_field(r, "path_len") for r in found)
    nan = math.nan
    return SummaryStats(
        n_trials=len(records),
        n_conditioned=len(cond),
        success_rate_within_budget=len(found) / len(cond) if cond else nan,
        mean_probes=float(probes.mean()) if len(probes) else nan,
        median_probes=float(np.median(probes)) if len(probes) else nan,
        p90_probes=float(np.quantile(probes, 0.9)) if len(probes) else nan,
        max_probes=float(probes.max()) if len(probes) else nan,
        mean_path_len=float(np.mean(lengths)) if lengths else nan,
    )


@dataclass
class ScalingFit:
    model: str
    slope: float
    intercept: float
    residual: float


def fit_scaling(sizes: Sequence[float], values: Sequence[float], model: str = "power-law") -> ScalingFit:
    """Least-squares fit of ``values`` against ``sizes``.

    ``linear``: ``y = a n + b``; ``power-law``: ``log y = k log n + b`` (slope is
    the exponent); ``exponential``: ``log y = r n + b`` (slope is the rate).
    ``residual`` is the RMS of the fit residuals on the transformed axes.
    """
    x = np.asarray(sizes, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.shape != y.shape or len(x) < 2:
        raise FitError("need at least two (size, value) pairs of equal length")
    if np.ptp(x) == 0:
        raise FitError("sizes have zero variance")
    if model == "linear":
        X, Y = x, y
    elif model == "power-law":
        if np.any(x <= 0) or np.any(y <= 0):
            raise FitError("power-law fit needs positive sizes and values")
        X, Y = np.log(x), np.log(y)
    elif model == "exponential":
        if np.any(y <= 0):
            raise FitError("exponential fit needs positive values")
        X, Y = x, np.log(y)
    else:
        raise FitError(f"unknown model {model!r}")
    slope, intercept = np.polyfit(X, Y, 1)
    resid = Y - (slope * X + intercept)
    return ScalingFit(model, float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))))
