import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from percroute import Complete, DoubleTree, Hypercube, Mesh
from percroute.errors import CapacityError, ConfigError, EncodingError, LocalityError
from percroute.percolation import (
    LocalityGuard, PercolationConfig, ProbeLedger, component_count, component_size, derive_seed,
    edge_state, ground_truth_connected, local_probe, open_edge_mask,
)


def tt_connect_probability(n, p):
    """Exact Pr[root_x ~ root_y] in TT_n: a child pair carries the connection iff both edges are open
    and the two subtrees below are connected."""
    q = 1.0
    for _ in range(n):
        q = 1 - (1 - p * p * q) ** 2
    return q


def test_extreme_probabilities():
    t = Hypercube(5)
    ledger = ProbeLedger()
    assert all(edge_state(PercolationConfig(t, 1.0, 9), e, ledger) for e in t.edges())
    ledger = ProbeLedger()
    assert not any(edge_state(PercolationConfig(t, 0.0, 9), e, ledger) for e in t.edges())
    assert PercolationConfig(t, 0.0).limit is None
    assert PercolationConfig(t, 1.0).limit == 2**64 - 1


@pytest.mark.parametrize("p", [-0.1, 1.5, math.nan])
def test_bad_probability(p):
    with pytest.raises(ConfigError):
        PercolationConfig(Hypercube(3), p)


def test_pinned_open_fraction_hypercube8():
    cfg = PercolationConfig(Hypercube(8), 0.5, 42)
    mask = open_edge_mask(cfg)
    assert len(mask) == 1024
    assert int(mask.sum()) == 508  # regression value for the pinned hash
    assert 0.45 <= mask.mean() <= 0.55


def test_edge_state_semantics():
    cfg = PercolationConfig(Hypercube(4), 0.5, 3)
    ledger = ProbeLedger()
    first = edge_state(cfg, 5, ledger)
    assert edge_state(cfg, 5, ledger) == first == cfg.is_open(5)
    assert ledger.total_calls == 2 and ledger.distinct_probes == 1
    edge_state(cfg, 7, ledger)
    assert ledger.log == [(5, first), (7, cfg.is_open(7))]
    assert ledger.probed == {5, 7}
    with pytest.raises(EncodingError):
        edge_state(cfg, 10_000, ledger)


def test_local_probe_examples():
    t = Hypercube(3)
    cfg1 = PercolationConfig(t, 1.0, 0)
    guard, ledger = LocalityGuard(0), ProbeLedger()
    e = t.neighbors(0)[0][1]
    assert local_probe(cfg1, guard, e, ledger)
    assert guard.reached == {0, t.neighbors(0)[0][0]}
    far = next(e for e in t.edges() if 0 not in t.endpoints(e) and not set(t.endpoints(e)) & guard.reached)
    with pytest.raises(LocalityError):
        local_probe(cfg1, guard, far, ledger)

    cfg0 = PercolationConfig(t, 0.0, 0)
    guard, ledger = LocalityGuard(0), ProbeLedger()
    assert not local_probe(cfg0, guard, e, ledger)
    assert guard.reached == {0}


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**64 - 1), p=st.floats(0, 1), order=st.randoms(use_true_random=False))
def test_guard_grows_only_through_open_edges(seed, p, order):
    t = Mesh(2, 5)
    cfg = PercolationConfig(t, p, seed)
    guard, ledger = LocalityGuard(12), ProbeLedger()
    edges = list(t.edges())
    for _ in range(200):
        e = order.choice(edges)
        a, b = t.endpoints(e)
        before = set(guard.reached)
        if not guard.allows(a, b):
            with pytest.raises(LocalityError):
                local_probe(cfg, guard, e, ledger)
            continue
        state = local_probe(cfg, guard, e, ledger)
        assert guard.reached == (before | {a, b} if state else before)
    assert ledger.distinct_probes <= t.edge_count <= t.edge_count
    assert ledger.total_calls >= ledger.distinct_probes
    assert ledger.replay(cfg)


def test_ground_truth_examples():
    for t in (Hypercube(5), Mesh(2, 6), DoubleTree(4), Complete(9)):
        full = PercolationConfig(t, 1.0, 1)
        empty = PercolationConfig(t, 0.0, 1)
        assert component_count(full) == 1
        assert not ground_truth_connected(empty, 0, t.vertex_count - 1)
        assert component_size(empty, 0) == 1
        assert ground_truth_connected(empty, 2, 2)


def test_ground_truth_ceiling():
    cfg = PercolationConfig(Hypercube(10), 0.5, 0)
    with pytest.raises(CapacityError):
        ground_truth_connected(cfg, 0, 1, max_edges=1000)
    with pytest.raises(CapacityError):
        open_edge_mask(PercolationConfig(Complete(6000), 0.5, 0))


def test_ground_truth_matches_search():
    from conftest import bfs_distances

    t = Mesh(2, 7)
    for k in range(30):
        cfg = PercolationConfig(t, 0.5, derive_seed(5, k))

        class Open:
            def neighbors(self, x):
                return [(y, e) for y, e in t.neighbors(x) if cfg.is_open(e)]

        reach = bfs_distances(Open(), 0)
        for v in t.vertices():
            assert ground_truth_connected(cfg, 0, v) == (v in reach)
        assert component_size(cfg, 0) == len(reach)


def test_doubletree_connectivity_rate():
    t = DoubleTree(10)
    hits = sum(ground_truth_connected(PercolationConfig(t, 0.85, derive_seed(77, k)), t.root_x, t.root_y)
               for k in range(2000))
    assert hits / 2000 >= 0.2


@pytest.mark.parametrize("n, p", [(6, 0.8), (10, 0.85), (14, 0.7)])
def test_doubletree_connectivity_matches_exact_recursion(n, p):
    t = DoubleTree(n)
    trials = 2000
    hits = sum(ground_truth_connected(PercolationConfig(t, p, derive_seed(77, k)), t.root_x, t.root_y)
               for k in range(trials))
    q = tt_connect_probability(n, p)
    assert abs(hits / trials - q) <= 4 * math.sqrt(q * (1 - q) / trials)


def test_doubletree_subcritical_connectivity_decays():
    # p^2 <= 1/2: the exact probability decreases to 0 with n
    qs = [tt_connect_probability(n, 0.7) for n in (8, 14, 30, 60, 400)]
    assert qs == sorted(qs, reverse=True) and qs[-1] < 0.01
    assert tt_connect_probability(14, 0.7) == pytest.approx(0.17217, abs=1e-5)


def test_hypercube_connectivity_threshold():
    t = Hypercube(12)

    def connected_fraction(p):
        return np.mean([component_count(PercolationConfig(t, p, derive_seed(12, k))) == 1 for k in range(500)])

    assert connected_fraction(0.65) - connected_fraction(0.35) >= 0.5


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**64 - 1), p1=st.floats(0, 1), p2=st.floats(0, 1))
def test_monotone_coupling(seed, p1, p2):
    lo, hi = sorted((p1, p2))
    t = Hypercube(6)
    m_lo = open_edge_mask(PercolationConfig(t, lo, seed))
    m_hi = open_edge_mask(PercolationConfig(t, hi, seed))
    assert np.all(m_lo <= m_hi)


@pytest.mark.parametrize("p", [0.05, 0.3, 0.5, 0.8])
def test_calibration(p):
    t = Hypercube(9)
    sigma = math.sqrt(p * (1 - p) / t.edge_count)
    passes = [abs(open_edge_mask(PercolationConfig(t, p, derive_seed(99, k))).mean() - p) <= 4 * sigma
              for k in range(200)]
    assert np.mean(passes) >= 0.99


def test_mask_agrees_with_scalar_oracle():
    cfg = PercolationConfig(DoubleTree(5), 0.6, 11)
    keys = cfg.topology.edge_arrays()[2].tolist()
    assert open_edge_mask(cfg).tolist() == [int(cfg.is_open(e)) for e in keys]


def test_ground_truth_touches_no_ledger():
    cfg = PercolationConfig(Hypercube(6), 0.5, 4)
    ledger = ProbeLedger()
    ground_truth_connected(cfg, 0, 63)
    assert ledger.distinct_probes == 0 and ledger.total_calls == 0


def test_replay_detects_tampering_and_csv():
    cfg = PercolationConfig(Hypercube(4), 0.5, 8)
    ledger = ProbeLedger()
    for e in (3, 1, 3, 8):
        edge_state(cfg, e, ledger)
    assert ledger.replay(cfg)
    text = ledger.to_csv()
    rows = text.strip().split("\n")
    assert rows[0] == "order,edge_id,state" and len(rows) == 4
    assert rows[1].startswith("0,3,")
    ledger.states[3] = not ledger.states[3]
    assert not ledger.replay(cfg)


def test_derive_seed_disjoint():
    seeds = {derive_seed(1, c, k) for c in range(50) for k in range(200)}
    assert len(seeds) == 10_000
    assert derive_seed(1) == 1
