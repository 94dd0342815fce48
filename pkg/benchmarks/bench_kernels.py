"""Compiled kernels vs the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Kernel timings call both modules directly. The end-to-end rows run a small
sweep in a subprocess with and without PERCROUTE_PURE_PYTHON=1, since the
backend is fixed at import time.
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from percroute import _fallback
from percroute.topology import Hypercube

try:
    from percroute import _kernels
except ImportError:
    _kernels = None

SWEEP = (
    "import json, time;"
    "from percroute import _core;"
    "from percroute.harness import SweepConfig, run_sweep;"
    "cfg = SweepConfig(family='hypercube', sizes=[12], alpha=[0.35], router='hc-waypoint', trials=40, budget='n^4');"
    "t = time.perf_counter(); run_sweep(cfg, write=False);"
    "print(json.dumps({'backend': _core.BACKEND, 'seconds': time.perf_counter() - t}))"
)


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_rows(repeat):
    topo = Hypercube(16)
    src, dst, keys = topo.edge_arrays()
    limit = (1 << 63) - 1
    mask = _fallback.open_mask(7, keys, limit)
    impls = [("python", _fallback)] + ([("compiled", _kernels)] if _kernels else [])
    rows = []
    for name, impl in impls:
        scalar_keys = keys[:100_000].tolist()
        rows.append((name, "edge_open x1e5", best(lambda: [impl.edge_open(7, k, limit) for k in scalar_keys], repeat)))
        rows.append((name, f"open_mask x{len(keys)}", best(lambda: impl.open_mask(7, keys, limit), repeat)))
        labels_repeat = repeat if name == "compiled" else 1
        rows.append((name, "component_labels H_16", best(
            lambda: impl.component_labels(topo.vertex_count, src, dst, mask), labels_repeat)))
    return rows


def sweep_rows():
    rows = []
    for pure in ("0", "1"):
        env = {**os.environ, "PERCROUTE_PURE_PYTHON": pure}
        out = subprocess.run([sys.executable, "-c", SWEEP], env=env, capture_output=True, text=True, check=True)
        doc = json.loads(out.stdout)
        rows.append((doc["backend"], "sweep hc-waypoint n=12 x40", doc["seconds"]))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rows = kernel_rows(args.repeat) + sweep_rows()
    by_task = {}
    for backend, task, sec in rows:
        by_task.setdefault(task, {})[backend] = sec
    print(f"{'task':32s} {'python s':>10s} {'compiled s':>11s} {'speedup':>8s}")
    for task, r in by_task.items():
        py, cc = r.get("python", np.nan), r.get("compiled", np.nan)
        print(f"{task:32s} {py:10.4f} {cc:11.4f} {py / cc:8.1f}")


if __name__ == "__main__":
    main()
