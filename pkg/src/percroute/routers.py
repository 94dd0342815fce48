"""Routing algorithms over the probe oracle.

Local routers probe only through a :class:`LocalityGuard`; oracle routers
(``tt-oracle``, ``gnp-oracle``) may probe any edge. All of them report the
number of distinct edges probed as their cost.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from . import _core
from .errors import ConfigError, FamilyError, LocalityError
from .percolation import LocalityGuard, PercolationConfig, ProbeLedger
from .topology import Complete, DoubleTree, Hypercube, Mesh


class Status(str, enum.Enum):
    FOUND = "found"
    NO_PATH = "no_path"
    BUDGET_EXCEEDED = "budget_exceeded"

    def __str__(self) -> str:
        return self.value


@dataclass
class RoutingResult:
    status: Status
    path: list[int] | None
    probes: int
    calls: int
    budget: int | None = None
    ledger: ProbeLedger | None = field(default=None, repr=False, compare=False)

    @property
    def found(self) -> bool:
        return self.status is Status.FOUND

    @property
    def path_len(self) -> int | None:
        return None if self.path is None else len(self.path) - 1

    def to_dict(self, topology=None) -> dict:
        path = self.path
        if path is not None and topology is not None:
            path = [topology.decode_vertex(x) for x in path]
        return {
            "status": self.status.value,
            "path": path,
            "path_len": self.path_len,
            "probes": self.probes,
            "calls": self.calls,
            "budget": self.budget,
        }


class _BudgetExhausted(Exception):
    pass


class _Prober:
    """Hot-path probe accounting shared by every router.

    Semantics match ``edge_state``/``local_probe``; codes come from the
    topology itself so validation is skipped.
    """

    __slots__ = ("topology", "seed", "limit", "ledger", "states", "budget", "guard")

    def __init__(self, cfg: PercolationConfig, budget: int | None, guard: LocalityGuard | None = None):
        self.topology = cfg.topology
        self.seed = cfg.seed
        self.limit = cfg.limit
        self.ledger = ProbeLedger()
        self.states = self.ledger.states
        self.budget = cfg.topology.edge_count if budget is None else int(budget)
        self.guard = guard

    def probe(self, e: int) -> bool:
        guard = self.guard
        if guard is not None:
            a, b = self.topology._endpoints(e)
            reached = guard.reached
            if a not in reached and b not in reached:
                raise LocalityError(f"edge {e} ({a}-{b}) has no endpoint connected to {guard.source}")
        self.ledger.total_calls += 1
        states = self.states
        state = states.get(e)
        if state is None:
            if len(states) >= self.budget:
                self.ledger.total_calls -= 1
                raise _BudgetExhausted
            limit = self.limit
            state = limit is not None and _core.edge_open(self.seed, e, limit)
            states[e] = state
        if state and guard is not None:
            guard.reached.add(a)
            guard.reached.add(b)
        return state

    def result(self, status: Status, path: list[int] | None = None) -> RoutingResult:
        return RoutingResult(status, path, self.ledger.distinct_probes, self.ledger.total_calls, self.budget, self.ledger)


def _tree_path(parent: dict[int, int | None], v: int) -> list[int]:
    path = []
    while v is not None:
        path.append(v)
        v = parent[v]
    path.reverse()
    return path


def _run(prober: _Prober, body: Callable[[], RoutingResult]) -> RoutingResult:
    try:
        return body()
    except _BudgetExhausted:
        return prober.result(Status.BUDGET_EXCEEDED)


def _check_pair(cfg: PercolationConfig, u: int, v: int) -> tuple[int, int]:
    t = cfg.topology
    return t.check_vertex(u), t.check_vertex(v)


# -- BFS ---------------------------------------------------------------------


def _bfs(prober: _Prober, u: int, v: int) -> RoutingResult:
    adj = prober.topology._adj
    probe = prober.probe
    parent: dict[int, int | None] = {u: None}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y, e in adj(x):
            if y in parent:
                continue
            if probe(e):
                parent[y] = x
                if y == v:
                    return prober.result(Status.FOUND, _tree_path(parent, v))
                queue.append(y)
    return prober.result(Status.NO_PATH)


def bfs_local(cfg: PercolationConfig, u: int, v: int, budget: int | None = None) -> RoutingResult:
    """Breadth-first search from ``u``; the returned path is shortest in ``G_p``.

    Edges towards already-reached vertices are never probed.
    """
    u, v = _check_pair(cfg, u, v)
    prober = _Prober(cfg, budget, LocalityGuard(u))
    if u == v:
        return prober.result(Status.FOUND, [u])
    return _run(prober, lambda: _bfs(prober, u, v))


# -- waypoint routers ----------------------------------------------------------


def _stage(prober, start, rank, i, max_depth, finish_layer):
    """BFS from ``start`` until a waypoint of rank > ``i`` is discovered.

    Returns ``(path, exhausted)``. ``path`` is None when nothing was found, in
    which case ``exhausted`` tells whether the component of ``start`` ran out
    (as opposed to hitting ``max_depth``).
    """
    adj = prober.topology._adj
    probe = prober.probe
    parent = {start: None}
    layer = [start]
    depth = 0
    while layer:
        if max_depth is not None and depth >= max_depth:
            return None, False
        nxt = []
        best, best_rank = None, i
        for x in layer:
            for y, e in adj(x):
                if y in parent:
                    continue
                if probe(e):
                    parent[y] = x
                    nxt.append(y)
                    r = rank.get(y, -1)
                    if r > best_rank:
                        best, best_rank = y, r
                        if not finish_layer:
                            return _tree_path(parent, y), False
        if best is not None:
            return _tree_path(parent, best), False
        layer = nxt
        depth += 1
    return None, True


def _loop_erase(path: list[int]) -> list[int]:
    out: list[int] = []
    pos: dict[int, int] = {}
    for x in path:
        if x in pos:
            k = pos[x]
            for y in out[k + 1 :]:
                del pos[y]
            del out[k + 1 :]
        else:
            pos[x] = len(out)
            out.append(x)
    return out


def mesh_waypoint_route(cfg: PercolationConfig, u: int, v: int, budget: int | None = None) -> RoutingResult:
    """Search around successive shortest-path waypoints until a later one is hit.

    Each stage BFS runs to the end of the layer in which the first later
    waypoint shows up and then jumps to the furthest waypoint in that layer.
    """
    t = cfg.topology
    if not isinstance(t, Mesh):
        raise FamilyError(f"mesh-waypoint needs a mesh topology, got {t.family}")
    u, v = _check_pair(cfg, u, v)
    prober = _Prober(cfg, budget, LocalityGuard(u))
    waypoints = t.shortest_path_waypoints(u, v)
    rank = {w: k for k, w in enumerate(waypoints)}

    def body():
        walk = [u]
        cur = u
        while cur != v:
            seg, _ = _stage(prober, cur, rank, rank[cur], None, finish_layer=True)
            if seg is None:
                return prober.result(Status.NO_PATH)
            walk.extend(seg[1:])
            cur = seg[-1]
        return prober.result(Status.FOUND, _loop_erase(walk))

    return _run(prober, body)


def _greedy_walk(prober: _Prober, t: Hypercube, cur: int, v: int, parent: dict) -> int:
    n = t.n
    while cur != v:
        diff = cur ^ v
        for d in range(n):
            if (diff >> d) & 1:
                y = cur ^ (1 << d)
                if y not in parent and prober.probe((cur & ~(1 << d)) * n + d):
                    parent[y] = cur
                    cur = y
                    break
        else:
            return cur
    return cur


def _multi_source_bfs(prober: _Prober, parent: dict, v: int) -> bool:
    """Unbounded BFS towards ``v`` from every vertex already in ``parent``."""
    adj = prober.topology._adj
    probe = prober.probe
    queue = deque(parent)
    while queue:
        x = queue.popleft()
        for y, e in adj(x):
            if y in parent:
                continue
            if probe(e):
                parent[y] = x
                if y == v:
                    return True
                queue.append(y)
    return False


def hypercube_waypoint_route(
    cfg: PercolationConfig,
    u: int,
    v: int,
    radius: int = 3,
    budget: int | None = None,
    greedy: bool = False,
    fallback: str = "stage",
) -> RoutingResult:
    """Depth-limited BFS between consecutive Hamming-path waypoints.

    Each stage explores at most ``radius`` percolation layers around the
    current vertex looking for any later waypoint. When a stage fails,
    ``fallback`` decides what happens:

    ``"stage"``
        keep growing that stage's BFS without the depth limit;
    ``"bfs"``
        run an unbounded BFS for ``v`` seeded with every vertex reached so far.

    Either way the router finds ``v`` iff ``u ~ v`` given an unlimited budget.
    ``greedy=True`` first walks along open Hamming-distance-reducing edges.
    """
    t = cfg.topology
    if not isinstance(t, Hypercube):
        raise FamilyError(f"hc-waypoint needs a hypercube topology, got {t.family}")
    if radius < 1:
        raise ConfigError("radius must be >= 1")
    if fallback not in ("stage", "bfs"):
        raise ConfigError(f"unknown fallback {fallback!r}")
    u, v = _check_pair(cfg, u, v)
    prober = _Prober(cfg, budget, LocalityGuard(u))

    def body():
        # global tree of open edges rooted at u; stage paths are grafted onto it
        tree: dict[int, int | None] = {u: None}
        cur = u
        if greedy:
            cur = _greedy_walk(prober, t, u, v, tree)
        waypoints = t.shortest_path_waypoints(cur, v)
        rank = {w: k for k, w in enumerate(waypoints)}
        while cur != v:
            seg, exhausted = _stage(prober, cur, rank, rank[cur], radius, finish_layer=False)
            if seg is None and not exhausted:
                if fallback == "bfs":
                    if _multi_source_bfs(prober, tree, v):
                        return prober.result(Status.FOUND, _tree_path(tree, v))
                    return prober.result(Status.NO_PATH)
                seg, exhausted = _stage(prober, cur, rank, rank[cur], None, finish_layer=False)
            if seg is None:
                return prober.result(Status.NO_PATH)
            for a, b in zip(seg, seg[1:]):
                if b not in tree:
                    tree[b] = a
            cur = seg[-1]
        return prober.result(Status.FOUND, _tree_path(tree, v))

    if u == v:
        return prober.result(Status.FOUND, [u])
    return _run(prober, body)


# -- double tree --------------------------------------------------------------


def _tt_roots(cfg: PercolationConfig, u, v) -> tuple[int, int]:
    t = cfg.topology
    if not isinstance(t, DoubleTree):
        raise FamilyError(f"double-tree router needs a doubletree topology, got {t.family}")
    u = t.root_x if u is None else t.check_vertex(u)
    v = t.root_y if v is None else t.check_vertex(v)
    if (u, v) != (t.root_x, t.root_y):
        raise ConfigError("double-tree routers run between the roots x and y")
    return u, v


def doubletree_local_route(cfg: PercolationConfig, u: int | None = None, v: int | None = None,
                           budget: int | None = None) -> RoutingResult:
    """Local BFS between the two roots of ``TT_n``."""
    u, v = _tt_roots(cfg, u, v)
    return bfs_local(cfg, u, v, budget)


def doubletree_oracle_route(cfg: PercolationConfig, u: int | None = None, v: int | None = None,
                            budget: int | None = None) -> RoutingResult:
    """Depth-first search over mirrored edge pairs from ``x`` towards the leaves.

    A child step is usable iff the first-tree edge and its mirror are both
    open; both are probed together. Reaching a leaf closes the path up the
    second tree along the mirrored branch.
    """
    u, v = _tt_roots(cfg, u, v)
    t: DoubleTree = cfg.topology
    prober = _Prober(cfg, budget)
    probe = prober.probe
    half = t._half
    n_leaf0 = (1 << t.n) - 1

    def body():
        branch = [0]  # heap indices from x down to the current node
        next_child = [0]
        while branch:
            h = branch[-1]
            if h >= n_leaf0:
                up = [t._second(b) for b in reversed(branch[:-1])]
                return prober.result(Status.FOUND, branch + up)
            c = next_child[-1]
            if c == 2:
                branch.pop()
                next_child.pop()
                continue
            next_child[-1] = c + 1
            e = 2 * h + c
            first = probe(e)
            second = probe(e + half)
            if first and second:
                branch.append(2 * h + 1 + c)
                next_child.append(0)
        return prober.result(Status.NO_PATH)

    return _run(prober, body)


# -- G(n, p) ---------------------------------------------------------------------


def _require_complete(cfg: PercolationConfig) -> Complete:
    if not isinstance(cfg.topology, Complete):
        raise FamilyError(f"G(n,p) routers need a complete topology, got {cfg.topology.family}")
    return cfg.topology


def gnp_local_route(cfg: PercolationConfig, u: int, v: int, budget: int | None = None) -> RoutingResult:
    """Grow the reached set ``U`` one cut edge at a time, edges into ``v`` first."""
    t = _require_complete(cfg)
    u, v = _check_pair(cfg, u, v)
    guard = LocalityGuard(u)
    prober = _Prober(cfg, budget, guard)
    if u == v:
        return prober.result(Status.FOUND, [u])
    n = t.n
    probe = prober.probe
    states = prober.states
    reached = guard.reached

    def body():
        order = [u]
        parent = {u: None}
        pending_v = deque([u])
        ptr, j = 0, 0
        while True:
            if pending_v:
                x = pending_v.popleft()
                if probe(x * n + v if x < v else v * n + x):
                    parent[v] = x
                    return prober.result(Status.FOUND, _tree_path(parent, v))
                continue
            while ptr < len(order):
                x = order[ptr]
                while j < n and (j in reached or j == v):
                    j += 1
                if j < n:
                    break
                ptr += 1
                j = 0
            else:
                return prober.result(Status.NO_PATH)
            e = x * n + j if x < j else j * n + x
            if e not in states and probe(e):
                parent[j] = x
                order.append(j)
                pending_v.append(j)
            j += 1

    return _run(prober, body)


def gnp_oracle_route(cfg: PercolationConfig, u: int, v: int, budget: int | None = None) -> RoutingResult:
    """Bidirectional growth from ``u`` and ``v``.

    1. probe any unprobed edge between the two reached sets;
    2. otherwise grow the smaller set by one probe towards an unreached vertex;
    3. if the smaller set has nothing left to probe, ``u`` and ``v`` are disconnected.
    """
    t = _require_complete(cfg)
    u, v = _check_pair(cfg, u, v)
    prober = _Prober(cfg, budget)
    if u == v:
        return prober.result(Status.FOUND, [u])
    n = t.n
    probe = prober.probe
    states = prober.states

    def code(a, b):
        return a * n + b if a < b else b * n + a

    def body():
        sides = ([u], [v])
        parents = ({u: None}, {v: None})
        member = {u: 0, v: 1}
        cursors = [[0, 0], [0, 0]]  # per side: index into order, next partner
        cross = deque([(u, v)])
        while True:
            while cross:
                a, b = cross.popleft()
                e = code(a, b)
                if e in states:
                    continue
                if probe(e):
                    if member[a] == 1:
                        a, b = b, a
                    path = _tree_path(parents[0], a) + _tree_path(parents[1], b)[::-1]
                    return prober.result(Status.FOUND, path)
            s = 0 if len(sides[0]) <= len(sides[1]) else 1
            order, cur = sides[s], cursors[s]
            ptr, j = cur
            while ptr < len(order):
                x = order[ptr]
                while j < n and (j in member or code(x, j) in states):
                    j += 1
                if j < n:
                    break
                ptr += 1
                j = 0
            else:
                return prober.result(Status.NO_PATH)
            cur[0], cur[1] = ptr, j + 1
            if probe(code(x, j)):
                member[j] = s
                parents[s][j] = x
                order.append(j)
                for w in sides[1 - s]:
                    cross.append((j, w))

    return _run(prober, body)


# -- registry -------------------------------------------------------------------

ROUTERS: dict[str, Callable[..., RoutingResult]] = {
    "bfs": bfs_local,
    "mesh-waypoint": mesh_waypoint_route,
    "hc-waypoint": hypercube_waypoint_route,
    "tt-local": doubletree_local_route,
    "tt-oracle": doubletree_oracle_route,
    "gnp-local": gnp_local_route,
    "gnp-oracle": gnp_oracle_route,
}

LOCAL_ROUTERS = frozenset({"bfs", "mesh-waypoint", "hc-waypoint", "tt-local", "gnp-local"})


def get_router(name: str) -> Callable[..., RoutingResult]:
    try:
        return ROUTERS[name]
    except KeyError:
        raise ConfigError(f"unknown router {name!r}; choose from {', '.join(ROUTERS)}") from None


def route(name: str, cfg: PercolationConfig, u: int, v: int, budget: int | None = None, **options) -> RoutingResult:
    return get_router(name)(cfg, u, v, budget=budget, **options)
