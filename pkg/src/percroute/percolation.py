"""Lazily sampled bond percolation with probe accounting.

Edge ``e`` is open in ``G_p`` iff ``mix64(seed, e) / 2**64 < p`` where
``mix64(seed, k)`` is output ``k`` (0-based) of a SplitMix64 stream started
at state ``seed`` (Steele, Lea & Flood 2014; the finaliser constants are the
ones in Vigna's reference ``splitmix64.c``). Published test vectors:

* seed 0: ``0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F``
* seed 1234567: ``6457827717110365317, 3203168211198807973, 9817491932198370423``

The threshold form couples all ``p`` for one seed: an edge open at ``p1`` is
open at every ``p2 >= p1``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _core
from .errors import CapacityError, ConfigError, LocalityError
from .topology import Topology

MASK64 = (1 << 64) - 1
DEFAULT_EDGE_CEILING = 1 << 24

mix64 = _core.mix64


def derive_seed(base: int, *parts: int) -> int:
    """Chain ``mix64`` over ``parts``: ``mix64(mix64(base, a), b)`` and so on."""
    s = base & MASK64
    for part in parts:
        s = mix64(s, part & MASK64)
    return s


@dataclass(frozen=True)
class PercolationConfig:
    """One random subgraph ``G_p``: topology, open probability and seed."""

    topology: Topology
    p: float
    seed: int = 0

    def __post_init__(self):
        p = float(self.p)
        if not 0.0 <= p <= 1.0 or math.isnan(p):
            raise ConfigError(f"open probability must lie in [0, 1], got {self.p!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "seed", int(self.seed) & MASK64)

    @property
    def limit(self) -> int | None:
        """Largest hash value counted as open, or ``None`` when ``p == 0``."""
        thr = math.ceil(self.p * 2.0**64)  # exact: p * 2**64 is a float product by a power of two
        return None if thr == 0 else min(thr, 1 << 64) - 1

    def is_open(self, e: int) -> bool:
        """Edge state without any accounting. Not for use inside routers."""
        limit = self.limit
        return limit is not None and _core.edge_open(self.seed, e, limit)


class ProbeLedger:
    """Record of every probe made during one routing attempt.

    ``states`` maps edge code to its revealed state in first-probe order, so it
    doubles as the ordered log.
    """

    def __init__(self):
        self.states: dict[int, bool] = {}
        self.total_calls = 0

    @property
    def distinct_probes(self) -> int:
        return len(self.states)

    @property
    def probed(self) -> set[int]:
        return set(self.states)

    @property
    def log(self) -> list[tuple[int, bool]]:
        return list(self.states.items())

    def replay(self, cfg: PercolationConfig) -> bool:
        """True iff every logged state matches a fresh oracle with ``cfg``."""
        return all(cfg.is_open(e) == s for e, s in self.states.items())

    def to_csv(self, fh=None) -> str | None:
        """Write ``order,edge_id,state`` rows; returns the text if ``fh`` is None."""
        out = io.StringIO() if fh is None else fh
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["order", "edge_id", "state"])
        for i, (e, s) in enumerate(self.states.items()):
            w.writerow([i, e, "open" if s else "closed"])
        return out.getvalue() if fh is None else None


class LocalityGuard:
    """Tracks the vertices a local router has connected to ``source``."""

    def __init__(self, source: int):
        self.source = source
        self.reached: set[int] = {source}

    def allows(self, a: int, b: int) -> bool:
        return a in self.reached or b in self.reached


def edge_state(cfg: PercolationConfig, e: int, ledger: ProbeLedger) -> bool:
    """Probe edge ``e``; True means open.

    Idempotent. ``total_calls`` always increases, ``distinct_probes`` only on
    the first probe of ``e``.
    """
    e = cfg.topology.check_edge(e)
    ledger.total_calls += 1
    state = ledger.states.get(e)
    if state is None:
        state = cfg.is_open(e)
        ledger.states[e] = state
    return state


def local_probe(cfg: PercolationConfig, guard: LocalityGuard, e: int, ledger: ProbeLedger) -> bool:
    a, b = cfg.topology.endpoints(e)
    if not guard.allows(a, b):
        raise LocalityError(f"edge {e} ({a}-{b}) has no endpoint connected to {guard.source}")
    state = edge_state(cfg, e, ledger)
    if state:
        guard.reached.add(a)
        guard.reached.add(b)
    return state


# -- ground truth ----------------------------------------------------------


def _check_capacity(topology: Topology, max_edges: int) -> None:
    if topology.edge_count > max_edges:
        raise CapacityError(f"{topology} has {topology.edge_count} edges, above the ceiling of {max_edges}")


def open_edge_mask(cfg: PercolationConfig, max_edges: int = DEFAULT_EDGE_CEILING) -> np.ndarray:
    """Boolean open/closed over ``topology.edge_arrays()`` order; touches no ledger."""
    _check_capacity(cfg.topology, max_edges)
    keys = cfg.topology.edge_arrays()[2]
    limit = cfg.limit
    if limit is None:
        return np.zeros(len(keys), dtype=np.uint8)
    return _core.open_mask(cfg.seed, keys, limit)


@lru_cache(maxsize=4)
def _labels(cfg: PercolationConfig) -> np.ndarray:
    src, dst, _ = cfg.topology.edge_arrays()
    mask = open_edge_mask(cfg, max_edges=1 << 62)
    labels = _core.component_labels(cfg.topology.vertex_count, src, dst, mask)
    labels.flags.writeable = False
    return labels


def component_labels(cfg: PercolationConfig, max_edges: int = DEFAULT_EDGE_CEILING) -> np.ndarray:
    """Per-vertex component representative in ``G_p``."""
    _check_capacity(cfg.topology, max_edges)
    return _labels(cfg)


def ground_truth_connected(cfg: PercolationConfig, u: int, v: int, max_edges: int = DEFAULT_EDGE_CEILING) -> bool:
    t = cfg.topology
    u, v = t.check_vertex(u), t.check_vertex(v)
    if u == v:
        return True
    labels = component_labels(cfg, max_edges)
    return bool(labels[u] == labels[v])


def component_size(cfg: PercolationConfig, u: int, max_edges: int = DEFAULT_EDGE_CEILING) -> int:
    labels = component_labels(cfg, max_edges)
    return int(np.count_nonzero(labels == labels[cfg.topology.check_vertex(u)]))


def component_count(cfg: PercolationConfig, max_edges: int = DEFAULT_EDGE_CEILING) -> int:
    labels = component_labels(cfg, max_edges)
    return int(np.count_nonzero(labels == np.arange(len(labels))))
