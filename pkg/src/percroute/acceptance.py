"""Acceptance criteria A1-A8, runnable from pytest or ``percroute accept``.

Every criterion has a fixed base seed (``1000 + k`` for criterion ``Ak``) and
fixed tolerances; nothing is tuned at run time.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import analysis
from .errors import LocalityError
from .harness import SweepConfig, phase_portrait_hypercube, run_sweep
from .percolation import PercolationConfig, derive_seed, ground_truth_connected, open_edge_mask
from .routers import LOCAL_ROUTERS, RoutingResult, route
from .topology import Complete, DoubleTree, Hypercube, Mesh, Topology


@dataclass
class CriterionResult:
    name: str
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.summary} ({self.seconds:.1f}s)"


def _by_size(summaries, key):
    return {s["size"]: s[key] for s in summaries}


def a1_bound_check() -> CriterionResult:
    n, p = 10, 0.85
    grid = analysis.geometric_grid(1.0, p**-n, 20)
    reports = analysis.validate_lemma1_doubletree(n, p, grid, 10_000, base_seed=1001)
    bad = [r.t for r in reports if r.violated]
    return CriterionResult(
        "A1", not bad,
        f"{len(reports)} thresholds, {len(bad)} violated; Pr[x~y]={reports[0].n_conditioned / reports[0].n_trials:.3f}",
        {"reports": [r.to_dict() for r in reports]},
    )


def a2_mesh_linear() -> CriterionResult:
    sizes = [16, 32, 64, 128]
    cfg = SweepConfig(family="mesh", sizes=sizes, params={"d": 2, "M": 256}, p=[0.7],
                      router="mesh-waypoint", trials=300, base_seed=1002)
    res = run_sweep(cfg, write=False)
    mean = _by_size(res.summaries, "mean_probes")
    per_n = {n: mean[n] / n for n in sizes}
    fit = analysis.fit_scaling(sizes, [mean[n] for n in sizes], "power-law")
    ratio = per_n[128] / per_n[16]
    ok = ratio <= 3 and 0.8 <= fit.slope <= 1.3
    return CriterionResult(
        "A2", ok, f"probes/n 16->128 ratio {ratio:.2f} (<=3), exponent {fit.slope:.3f} in [0.8, 1.3]",
        {"mean_probes": mean, "probes_per_n": per_n, "exponent": fit.slope},
    )


def a3_doubletree_gap() -> CriterionResult:
    sizes, p = [8, 10, 12, 14], 0.85
    common = dict(family="doubletree", sizes=sizes, p=[p], trials=200, base_seed=1003)
    local = run_sweep(SweepConfig(router="tt-local", **common), write=False)
    oracle = run_sweep(SweepConfig(router="tt-oracle", **common), write=False)
    med = _by_size(local.summaries, "median_probes")
    omean = _by_size(oracle.summaries, "mean_probes")
    rate = analysis.fit_scaling(sizes, [med[n] for n in sizes], "exponential").slope
    expo = analysis.fit_scaling(sizes, [omean[n] for n in sizes], "power-law").slope
    lo, hi = 0.5 * math.log(1 / p), 3 * math.log(1 / p)
    gap = med[14] / omean[14]
    checks = {
        "local_rate": lo <= rate <= hi,
        "oracle_exponent": 0.7 <= expo <= 1.3,
        "gap_at_14": gap >= 10,
    }
    return CriterionResult(
        "A3", all(checks.values()),
        f"tt-local rate {rate:.3f} in [{lo:.3f}, {hi:.3f}]: {checks['local_rate']}; "
        f"tt-oracle exponent {expo:.3f} in [0.7, 1.3]: {checks['oracle_exponent']}; "
        f"gap at n=14 {gap:.0f}x (>=10): {checks['gap_at_14']}",
        {"local_median": med, "oracle_mean": omean, "local_rate": rate, "oracle_exponent": expo, "checks": checks},
    )


def a4_hypercube_dichotomy() -> CriterionResult:
    rows = phase_portrait_hypercube([14], [0.35, 0.75], budget="n^4", trials=200, base_seed=1004)
    lo, hi = rows
    diff = lo["success_rate"] - hi["success_rate"]
    ratio = hi["median_probes"] / lo["median_probes"]
    ok = diff >= 0.3 and ratio >= 5
    return CriterionResult(
        "A4", ok,
        f"success {lo['success_rate']:.2f} vs {hi['success_rate']:.2f} (diff {diff:.2f} >= 0.3), "
        f"median probes ratio {ratio:.1f} (>= 5), conditioned {lo['n_conditioned']}/{hi['n_conditioned']}",
        {"rows": rows},
    )


def a5_gnp_scaling() -> CriterionResult:
    sizes = [128, 256, 512]
    common = dict(family="complete", sizes=sizes, c_over_n=[2.0], trials=200, base_seed=1005)
    local = _by_size(run_sweep(SweepConfig(router="gnp-local", **common), write=False).summaries, "mean_probes")
    oracle = _by_size(run_sweep(SweepConfig(router="gnp-oracle", **common), write=False).summaries, "mean_probes")
    e_loc = analysis.fit_scaling(sizes, [local[n] for n in sizes]).slope
    e_ora = analysis.fit_scaling(sizes, [oracle[n] for n in sizes]).slope
    shrink = (oracle[512] / local[512]) / (oracle[128] / local[128])
    ok = 1.7 <= e_loc <= 2.3 and 1.2 <= e_ora <= 1.8 and shrink <= 0.6
    return CriterionResult(
        "A5", ok,
        f"local exponent {e_loc:.3f} in [1.7, 2.3], oracle exponent {e_ora:.3f} in [1.2, 1.8], "
        f"ratio shrink {shrink:.3f} (<= 0.6)",
        {"local_mean": local, "oracle_mean": oracle},
    )


def a6_ball_counts() -> CriterionResult:
    rows = analysis.ball_path_table()
    over = [r for r in rows if r["count"] > r["bound"]]
    k0 = [r for r in rows if r["k"] == 0 and r["count"] != r["l_factorial"]]
    return CriterionResult(
        "A6", not over and not k0,
        f"{len(rows)} (n, l, k) triples, {len(over)} above bound, {len(k0)} k=0 mismatches",
        {"rows": rows},
    )


# -- A7 ----------------------------------------------------------------------------------


def random_instance(rng: random.Random) -> tuple[Topology, float]:
    family = rng.choice(["hypercube", "mesh", "doubletree", "complete"])
    if family == "hypercube":
        topo: Topology = Hypercube(rng.randint(1, 8))
    elif family == "mesh":
        d = rng.randint(1, 3)
        topo = Mesh(d, rng.randint(2, {1: 40, 2: 12, 3: 6}[d]))
    elif family == "doubletree":
        topo = DoubleTree(rng.randint(1, 7))
    else:
        topo = Complete(rng.randint(2, 48))
    p = rng.choice([0.0, 1.0, rng.random(), rng.random()])
    if family == "complete" and rng.random() < 0.5:
        p = min(1.0, rng.uniform(0.5, 3.0) / topo.n)
    return topo, p


def routers_for(topo: Topology) -> list[str]:
    names = ["bfs"]
    if isinstance(topo, Hypercube):
        names.append("hc-waypoint")
    elif isinstance(topo, Mesh):
        names.append("mesh-waypoint")
    elif isinstance(topo, DoubleTree):
        names += ["tt-local", "tt-oracle"]
    else:
        names += ["gnp-local", "gnp-oracle"]
    return names


def path_is_sound(topo: Topology, result: RoutingResult, cfg: PercolationConfig, u: int, v: int) -> bool:
    path = result.path
    if not path or path[0] != u or path[-1] != v:
        return False
    for a, b in zip(path, path[1:]):
        edge = next((e for y, e in topo.neighbors(a) if y == b), None)
        if edge is None or not result.ledger.states.get(edge, False):
            return False
    return result.ledger.replay(cfg)


def ledger_is_local(topo: Topology, result: RoutingResult, u: int) -> bool:
    """Re-simulate the reached set from the probe log; every probe must touch it."""
    reached = {u}
    for e, state in result.ledger.log:
        a, b = topo.endpoints(e)
        if a not in reached and b not in reached:
            return False
        if state:
            reached.update((a, b))
    return True


def a7_soundness(n_configs: int = 1000, seed: int = 1007) -> CriterionResult:
    rng = random.Random(seed)
    counts = {"unsound": 0, "incomplete": 0, "locality": 0, "runs": 0}
    failures = []
    for i in range(n_configs):
        topo, p = random_instance(rng)
        cfg = PercolationConfig(topo, p, rng.getrandbits(64))
        verts = topo.vertex_count
        u, v = rng.randrange(verts), rng.randrange(verts)
        if isinstance(topo, DoubleTree) and rng.random() < 0.5:
            u, v = topo.root_x, topo.root_y
        truth = ground_truth_connected(cfg, u, v)
        for name in routers_for(topo):
            if name in ("tt-local", "tt-oracle"):
                a, b = topo.root_x, topo.root_y
                want = ground_truth_connected(cfg, a, b)
            else:
                a, b, want = u, v, truth
            counts["runs"] += 1
            try:
                res = route(name, cfg, a, b)
            except LocalityError:
                counts["locality"] += 1
                failures.append((i, name, "locality"))
                continue
            if res.found and not path_is_sound(topo, res, cfg, a, b):
                counts["unsound"] += 1
                failures.append((i, name, "unsound"))
            if res.found != want:
                counts["incomplete"] += 1
                failures.append((i, name, "incomplete"))
            if name in LOCAL_ROUTERS and not ledger_is_local(topo, res, a):
                counts["locality"] += 1
                failures.append((i, name, "locality-log"))
    ok = not failures
    return CriterionResult(
        "A7", ok,
        f"{n_configs} configs / {counts['runs']} router runs: {counts['unsound']} unsound, "
        f"{counts['incomplete']} found!=connected, {counts['locality']} locality violations",
        {"counts": counts, "failures": failures[:20]},
    )


def a8_calibration_determinism() -> CriterionResult:
    topo = Hypercube(8)
    bad = []
    for p in (0.5, 0.1, 0.9):
        sigma = math.sqrt(p * (1 - p) / topo.edge_count)
        for k in range(100):
            cfg = PercolationConfig(topo, p, derive_seed(1008, k))
            frac = float(np.mean(open_edge_mask(cfg)))
            if abs(frac - p) > 4 * sigma:
                bad.append((p, k, frac))
    cfg = SweepConfig(family="hypercube", sizes=[6, 8], p=[0.4, 0.7], router="hc-waypoint", trials=25,
                      base_seed=1008)
    first, second = run_sweep(cfg, write=False), run_sweep(cfg, write=False)
    same = first.csv_text() == second.csv_text() and first.summary_json() == second.summary_json()
    return CriterionResult(
        "A8", not bad and same,
        f"{300 - len(bad)}/300 open fractions within 4 sigma; repeated sweep byte-identical: {same}",
        {"outliers": bad},
    )


CRITERIA: dict[str, Callable[[], CriterionResult]] = {
    "A1": a1_bound_check,
    "A2": a2_mesh_linear,
    "A3": a3_doubletree_gap,
    "A4": a4_hypercube_dichotomy,
    "A5": a5_gnp_scaling,
    "A6": a6_ball_counts,
    "A7": a7_soundness,
    "A8": a8_calibration_determinism,
}


def run_criterion(name: str) -> CriterionResult:
    t0 = time.perf_counter()
    res = CRITERIA[name]()
    res.seconds = time.perf_counter() - t0
    return res


def run_all(names=None, echo: Callable[[str], None] | None = print) -> list[CriterionResult]:
    results = []
    for name in names or CRITERIA:
        res = run_criterion(name)
        if echo:
            echo(res.line())
        results.append(res)
    return results
