import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from percroute import Complete, DoubleTree, Hypercube, Mesh
from percroute.acceptance import ledger_is_local, path_is_sound, random_instance, routers_for
from percroute.errors import ConfigError, FamilyError
from percroute.percolation import PercolationConfig, derive_seed, ground_truth_connected
from percroute.routers import ROUTERS, Status, route


def test_registry_names():
    assert set(ROUTERS) == {"bfs", "mesh-waypoint", "hc-waypoint", "tt-local", "tt-oracle", "gnp-local", "gnp-oracle"}
    with pytest.raises(ConfigError):
        route("dijkstra", PercolationConfig(Hypercube(3), 1.0), 0, 7)


def test_bfs_full_cube():
    r = route("bfs", PercolationConfig(Hypercube(3), 1.0), 0b000, 0b111)
    assert r.status is Status.FOUND and r.path_len == 3


def test_bfs_closed_world():
    t = Hypercube(5)
    r = route("bfs", PercolationConfig(t, 0.0), 0, 31)
    assert r.status is Status.NO_PATH and r.probes == 5


def test_bfs_matches_ground_truth_per_seed_mesh8():
    t = Mesh(2, 8)
    u, v = t.encode_vertex((0, 0)), t.encode_vertex((7, 7))
    for k in range(500):
        cfg = PercolationConfig(t, 0.7, derive_seed(21, k))
        assert route("bfs", cfg, u, v).found == ground_truth_connected(cfg, u, v)


def test_bfs_path_is_shortest_in_open_subgraph():
    from conftest import bfs_distances

    t = Hypercube(6)
    for k in range(40):
        cfg = PercolationConfig(t, 0.5, derive_seed(22, k))

        class Open:
            def neighbors(self, x):
                return [(y, e) for y, e in t.neighbors(x) if cfg.is_open(e)]

        dist = bfs_distances(Open(), 0)
        r = route("bfs", cfg, 0, 63)
        assert r.found == (63 in dist)
        if r.found:
            assert r.path_len == dist[63]


def test_mesh_waypoint_full_open():
    t = Mesh(2, 8)
    u, v = t.encode_vertex((0, 0)), t.encode_vertex((3, 0))
    r = route("mesh-waypoint", PercolationConfig(t, 1.0), u, v)
    n, d = 3, 2
    assert r.found and r.path_len == n and r.probes <= 4 * 2 * d * n


def test_mesh_waypoint_agrees_with_bfs_on_disconnection():
    t = Mesh(2, 32)
    u, v = t.encode_vertex((8, 16)), t.encode_vertex((24, 16))
    disconnected = 0
    for k in range(300):
        cfg = PercolationConfig(t, 0.55, derive_seed(23, k))
        a, b = route("mesh-waypoint", cfg, u, v), route("bfs", cfg, u, v)
        assert a.found == b.found == ground_truth_connected(cfg, u, v)
        disconnected += not a.found
    assert disconnected > 0


def test_hc_waypoint_greedy_limit():
    t = Hypercube(7)
    r = route("hc-waypoint", PercolationConfig(t, 1.0), 0, 127, radius=1)
    assert r.found and r.path_len == 7 and r.probes <= 7 * 7


def test_trivial_pair_costs_nothing():
    cfg = PercolationConfig(Hypercube(5), 0.3, 1)
    for name in ("bfs", "hc-waypoint"):
        r = route(name, cfg, 9, 9)
        assert r.found and r.path_len == 0 and r.probes == 0


def test_hc_waypoint_moderate_regime_success():
    t = Hypercube(14)
    p = 14 ** -0.35
    budget = 14**4
    conditioned = succeeded = 0
    for k in range(60):
        cfg = PercolationConfig(t, p, derive_seed(24, k))
        if not ground_truth_connected(cfg, 0, t.vertex_count - 1):
            continue
        conditioned += 1
        succeeded += route("hc-waypoint", cfg, 0, t.vertex_count - 1, budget=budget).found
    assert conditioned >= 30 and succeeded / conditioned >= 0.5


@pytest.mark.parametrize("fallback", ["stage", "bfs"])
@pytest.mark.parametrize("greedy", [False, True])
def test_hc_waypoint_variants_complete(fallback, greedy):
    t = Hypercube(7)
    for k in range(60):
        cfg = PercolationConfig(t, 0.3 + 0.005 * k, derive_seed(25, k))
        r = route("hc-waypoint", cfg, 3, 124, radius=2, fallback=fallback, greedy=greedy)
        assert r.found == ground_truth_connected(cfg, 3, 124)
        if r.found:
            assert path_is_sound(t, r, cfg, 3, 124)
        assert ledger_is_local(t, r, 3)


def test_doubletree_local_full_open():
    t = DoubleTree(6)
    r = route("tt-local", PercolationConfig(t, 1.0), t.root_x, t.root_y)
    assert r.found and r.path_len == 12


def test_doubletree_local_growth():
    p = 0.85

    def median_probes(n):
        t = DoubleTree(n)
        probes = []
        for k in range(400):
            cfg = PercolationConfig(t, p, derive_seed(26, n, k))
            if ground_truth_connected(cfg, t.root_x, t.root_y):
                probes.append(route("tt-local", cfg, t.root_x, t.root_y).probes)
        return np.median(probes)

    assert median_probes(12) / median_probes(8) >= p**-4 / 2


def test_doubletree_oracle_full_open():
    for n in (1, 4, 9):
        t = DoubleTree(n)
        r = route("tt-oracle", PercolationConfig(t, 1.0), None, None)
        assert r.found and r.probes == 2 * n and r.path_len == 2 * n


def test_doubletree_oracle_linear_mean():
    p = 0.85

    def mean_probes(n):
        t = DoubleTree(n)
        probes = []
        for k in range(300):
            cfg = PercolationConfig(t, p, derive_seed(27, n, k))
            if ground_truth_connected(cfg, t.root_x, t.root_y):
                probes.append(route("tt-oracle", cfg, None, None).probes)
        return np.mean(probes)

    assert mean_probes(16) / mean_probes(8) <= 3


def test_doubletree_oracle_subcritical():
    t = DoubleTree(12)
    found = connected = 0
    for k in range(400):
        cfg = PercolationConfig(t, 0.7, derive_seed(28, k))
        f = route("tt-oracle", cfg, None, None).found
        c = ground_truth_connected(cfg, t.root_x, t.root_y)
        assert c or not f
        found += f
        connected += c
    assert found <= connected


def test_doubletree_routers_need_roots():
    t = DoubleTree(3)
    with pytest.raises(ConfigError):
        route("tt-oracle", PercolationConfig(t, 1.0), 1, t.root_y)
    with pytest.raises(FamilyError):
        route("tt-oracle", PercolationConfig(Hypercube(3), 1.0), None, None)


@pytest.mark.parametrize("name", ["gnp-local", "gnp-oracle"])
def test_gnp_full_open_single_probe(name):
    r = route(name, PercolationConfig(Complete(50), 1.0), 4, 17)
    assert r.found and r.probes == 1 and r.path == [4, 17]


@pytest.mark.parametrize("name", ["gnp-local", "gnp-oracle"])
def test_gnp_disconnected_exhausts(name):
    t = Complete(60)
    seen = 0
    for k in range(200):
        cfg = PercolationConfig(t, 1.5 / 60, derive_seed(29, k))
        r = route(name, cfg, 0, 1)
        assert r.found == ground_truth_connected(cfg, 0, 1)
        if not r.found:
            seen += 1
            assert r.status is Status.NO_PATH
    assert seen > 0


def test_gnp_local_probes_every_cut_edge_when_disconnected():
    from percroute.percolation import component_labels

    t = Complete(40)
    checked = 0
    for k in range(100):
        cfg = PercolationConfig(t, 0.03, derive_seed(30, k))
        r = route("gnp-local", cfg, 0, 1)
        if r.found:
            continue
        labels = component_labels(cfg)
        inside = {x for x in range(t.n) if labels[x] == labels[0]}
        cut = {t.edge_code(a, b) if a < b else t.edge_code(b, a) for a in inside for b in range(t.n) if b not in inside}
        assert cut <= r.ledger.probed
        assert not any(r.ledger.states[e] for e in cut)
        checked += 1
    assert checked > 0


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_random_instances_sound_complete_local(seed):
    rng = random.Random(seed)
    topo, p = random_instance(rng)
    cfg = PercolationConfig(topo, p, rng.getrandbits(64))
    for name in routers_for(topo):
        if isinstance(topo, DoubleTree):
            u, v = topo.root_x, topo.root_y
        else:
            u, v = rng.randrange(topo.vertex_count), rng.randrange(topo.vertex_count)
        r = route(name, cfg, u, v)
        truth = ground_truth_connected(cfg, u, v)
        if r.found:
            assert path_is_sound(topo, r, cfg, u, v)
        if name == "tt-oracle":
            assert truth or not r.found
        else:
            assert r.found == truth
        assert r.ledger.distinct_probes <= topo.edge_count
        assert r.calls >= r.probes
        if name in ("bfs", "mesh-waypoint", "hc-waypoint", "tt-local", "gnp-local"):
            assert ledger_is_local(topo, r, u)
        again = route(name, cfg, u, v)
        assert (again.status, again.path, again.probes, again.calls) == (r.status, r.path, r.probes, r.calls)
        assert again.ledger.log == r.ledger.log


@pytest.mark.parametrize("name, topo", [
    ("bfs", Hypercube(8)), ("hc-waypoint", Hypercube(8)), ("mesh-waypoint", Mesh(2, 16)),
    ("gnp-local", Complete(80)), ("gnp-oracle", Complete(80)), ("tt-oracle", DoubleTree(8)), ("tt-local", DoubleTree(8)),
])
def test_budget_is_respected(name, topo):
    u, v = topo.default_endpoints()
    for k in range(30):
        cfg = PercolationConfig(topo, 0.6 if not isinstance(topo, Complete) else 0.05, derive_seed(31, k))
        full = route(name, cfg, u, v)
        budget = max(1, full.probes // 2)
        r = route(name, cfg, u, v, budget=budget)
        assert r.probes <= budget
        if full.probes > budget:
            assert r.status is Status.BUDGET_EXCEEDED and r.path is None
        cap = route(name, cfg, u, v, budget=full.probes)
        assert cap.status == full.status


def test_family_errors():
    with pytest.raises(FamilyError):
        route("mesh-waypoint", PercolationConfig(Hypercube(3), 1.0), 0, 7)
    with pytest.raises(FamilyError):
        route("hc-waypoint", PercolationConfig(Mesh(2, 3), 1.0), 0, 8)
    with pytest.raises(FamilyError):
        route("gnp-local", PercolationConfig(Hypercube(3), 1.0), 0, 7)
    with pytest.raises(ConfigError):
        route("hc-waypoint", PercolationConfig(Hypercube(3), 1.0), 0, 7, radius=0)


@pytest.mark.parametrize("topo, grid", [
    (Hypercube(8), (0.4, 0.55, 0.7)),
    (Mesh(2, 10), (0.6, 0.75, 0.9)),
    (Complete(60), (0.05, 0.1, 0.2)),
])
def test_bfs_probes_non_increasing_in_p(topo, grid):
    u, v = topo.default_endpoints()
    means, ses = [], []
    for p in grid:
        probes = []
        for k in range(500):
            cfg = PercolationConfig(topo, p, derive_seed(32, k))
            if ground_truth_connected(cfg, u, v):
                probes.append(route("bfs", cfg, u, v).probes)
        probes = np.asarray(probes, dtype=float)
        means.append(probes.mean())
        ses.append(probes.std(ddof=1) / math.sqrt(len(probes)))
    for i in range(len(grid) - 1):
        assert means[i + 1] <= means[i] + max(ses[i], ses[i + 1])


def test_bfs_probes_rise_with_p_on_double_tree():
    # the open first-tree cluster of x grows like (2p)^n, so more open edges mean more work
    t = DoubleTree(10)
    means = []
    for p in (0.8, 0.9, 0.95):
        probes = [route("bfs", cfg, t.root_x, t.root_y).probes
                  for k in range(200)
                  for cfg in [PercolationConfig(t, p, derive_seed(32, k))]
                  if ground_truth_connected(cfg, t.root_x, t.root_y)]
        means.append(np.mean(probes))
    assert means == sorted(means)
