"""Pure-Python implementations of the kernels in ``_kernels.pyx``.

Same signatures and results; used when the extension is not built or when
``PERCROUTE_PURE_PYTHON=1`` is set.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(seed: int, key: int) -> int:
    z = (seed + GAMMA * (key + 1)) & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def edge_open(seed: int, key: int, limit: int) -> bool:
    return mix64(seed, key) <= limit


def open_mask(seed: int, keys: np.ndarray, limit: int) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed) + np.uint64(GAMMA) * (keys + np.uint64(1))
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
        z = z ^ (z >> np.uint64(31))
    return (z <= np.uint64(limit)).astype(np.uint8)


def component_labels(n_vertices: int, src, dst, mask) -> np.ndarray:
    parent = list(range(n_vertices))
    size = [1] * n_vertices

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    idx = np.flatnonzero(np.asarray(mask))
    for a, b in zip(np.asarray(src)[idx].tolist(), np.asarray(dst)[idx].tolist()):
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if size[ra] < size[rb]:
            ra, rb = rb, ra
        parent[rb] = ra
        size[ra] += size[rb]
    return np.array([find(i) for i in range(n_vertices)], dtype=np.int64)
