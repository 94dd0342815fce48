"""Graph families with canonical integer vertex and edge codes.

Every vertex and edge of a topology has one integer *code*. Routers and the
percolation oracle work on codes; structured labels (coordinate tuples,
``(side, level, index)`` triples, ...) are available through
``decode_vertex``/``encode_vertex`` and ``decode_edge``/``encode_edge``.
Edge codes sort in the same order as the lexicographic order of the
structured edge labels, so "ascending edge order" means ascending code.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import ClassVar

import numpy as np

from .errors import ConfigError, EncodingError, FamilyError

FIRST, SECOND = "first", "second"
LEFT, RIGHT = "left", "right"


class Topology:
    """Base class for the four graph families.

    Subclasses are frozen dataclasses, hashable and safe to share between
    threads. ``neighbors`` returns ``(vertex, edge)`` pairs sorted by edge code.
    """

    family: ClassVar[str]

    @property
    def vertex_count(self) -> int:
        raise NotImplementedError

    @property
    def edge_count(self) -> int:
        raise NotImplementedError

    # -- codes -------------------------------------------------------------
    def check_vertex(self, v: int) -> int:
        if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or not 0 <= v < self.vertex_count:
            raise EncodingError(f"{v!r} is not a vertex code of {self}")
        return int(v)

    def check_edge(self, e: int) -> int:
        if not isinstance(e, (int, np.integer)) or isinstance(e, bool) or not self._is_edge(int(e)):
            raise EncodingError(f"{e!r} is not an edge code of {self}")
        return int(e)

    def _is_edge(self, e: int) -> bool:
        raise NotImplementedError

    def encode_vertex(self, label) -> int:
        raise NotImplementedError

    def decode_vertex(self, v: int):
        raise NotImplementedError

    def encode_edge(self, label) -> int:
        raise NotImplementedError

    def decode_edge(self, e: int):
        raise NotImplementedError

    # -- structure ---------------------------------------------------------
    def endpoints(self, e: int) -> tuple[int, int]:
        return self._endpoints(self.check_edge(e))

    def _endpoints(self, e: int) -> tuple[int, int]:
        raise NotImplementedError

    def neighbors(self, v: int) -> list[tuple[int, int]]:
        return self._adj(self.check_vertex(v))

    def _adj(self, v: int) -> list[tuple[int, int]]:
        raise NotImplementedError

    def vertices(self) -> range:
        return range(self.vertex_count)

    def edges(self) -> list[int]:
        return sorted(self.edge_arrays()[2].tolist())

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(src, dst, code)`` arrays over all edges, int64/int64/uint64."""
        return self._edge_arrays

    @cached_property
    def _edge_arrays(self):
        src, dst, key = self._build_edge_arrays()
        return (
            np.ascontiguousarray(src, dtype=np.int64),
            np.ascontiguousarray(dst, dtype=np.int64),
            np.ascontiguousarray(key, dtype=np.uint64),
        )

    def _build_edge_arrays(self):
        raise NotImplementedError

    def distance(self, u: int, v: int) -> int:
        raise NotImplementedError

    def shortest_path_waypoints(self, u: int, v: int) -> list[int]:
        raise FamilyError(f"waypoints are defined for hypercube and mesh, not {self.family}")

    def mirror_edge(self, e: int) -> int:
        raise FamilyError(f"mirror_edge is defined for doubletree, not {self.family}")

    def default_endpoints(self) -> tuple[int, int]:
        raise NotImplementedError


@dataclass(frozen=True)
class Hypercube(Topology):
    """``n``-dimensional hypercube; vertices are ``n``-bit integers.

    Edge ``(w, d)`` joins ``w`` and ``w | 1 << d`` where bit ``d`` of ``w`` is 0;
    its code is ``w * n + d``.
    """

    n: int
    family: ClassVar[str] = "hypercube"

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigError(f"hypercube dimension must be a positive integer, got {self.n!r}")

    def __str__(self) -> str:
        return f"hypercube:n={self.n}"

    @property
    def vertex_count(self) -> int:
        return 1 << self.n

    @property
    def edge_count(self) -> int:
        return self.n << (self.n - 1)

    def _is_edge(self, e: int) -> bool:
        if not 0 <= e < self.vertex_count * self.n:
            return False
        w, d = divmod(e, self.n)
        return not (w >> d) & 1

    def encode_vertex(self, label) -> int:
        return self.check_vertex(label)

    def decode_vertex(self, v: int) -> int:
        return self.check_vertex(v)

    def encode_edge(self, label) -> int:
        w, d = label
        if not 0 <= d < self.n:
            raise EncodingError(f"dimension {d} out of range for {self}")
        self.check_vertex(w)
        if (w >> d) & 1:
            raise EncodingError(f"edge anchor {w} must have bit {d} clear")
        return w * self.n + d

    def decode_edge(self, e: int) -> tuple[int, int]:
        return divmod(self.check_edge(e), self.n)

    def _endpoints(self, e):
        w, d = divmod(e, self.n)
        return w, w | (1 << d)

    def _adj(self, v):
        n = self.n
        out = [((v & ~(1 << d)) * n + d, v ^ (1 << d)) for d in range(n)]
        out.sort()
        return [(y, e) for e, y in out]

    def _build_edge_arrays(self):
        n = self.n
        verts = np.arange(1 << n, dtype=np.int64)
        src, dst, key = [], [], []
        for d in range(n):
            w = verts[((verts >> d) & 1) == 0]
            src.append(w)
            dst.append(w | (1 << d))
            key.append(w * n + d)
        return np.concatenate(src), np.concatenate(dst), np.concatenate(key)

    def distance(self, u, v):
        return bin(self.check_vertex(u) ^ self.check_vertex(v)).count("1")

    def shortest_path_waypoints(self, u, v):
        cur = self.check_vertex(u)
        diff = cur ^ self.check_vertex(v)
        path = [cur]
        for d in range(self.n):
            if (diff >> d) & 1:
                cur ^= 1 << d
                path.append(cur)
        return path

    def default_endpoints(self):
        return 0, (1 << self.n) - 1


@dataclass(frozen=True)
class Mesh(Topology):
    """Finite cube ``[0, M)^d`` without wraparound.

    Vertex code is row-major with axis 0 most significant, so code order
    equals lexicographic order of coordinate tuples. Edge ``(w, axis)``
    anchored at the endpoint with the smaller coordinate has code
    ``code(w) * d + axis``.
    """

    d: int
    M: int
    family: ClassVar[str] = "mesh"

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise ConfigError(f"mesh dimension must be >= 1, got {self.d!r}")
        if not isinstance(self.M, int) or self.M < 2:
            raise ConfigError(f"mesh side must be >= 2, got {self.M!r}")

    def __str__(self) -> str:
        return f"mesh:d={self.d},M={self.M}"

    @cached_property
    def _strides(self) -> tuple[int, ...]:
        return tuple(self.M ** (self.d - 1 - a) for a in range(self.d))

    @property
    def vertex_count(self) -> int:
        return self.M**self.d

    @property
    def edge_count(self) -> int:
        return self.d * self.M ** (self.d - 1) * (self.M - 1)

    def _coord(self, v: int, axis: int) -> int:
        return (v // self._strides[axis]) % self.M

    def _is_edge(self, e):
        if not 0 <= e < self.vertex_count * self.d:
            return False
        w, a = divmod(e, self.d)
        return self._coord(w, a) < self.M - 1

    def encode_vertex(self, label) -> int:
        coords = tuple(label)
        if len(coords) != self.d or not all(isinstance(c, (int, np.integer)) and 0 <= c < self.M for c in coords):
            raise EncodingError(f"{label!r} is not a vertex of {self}")
        return sum(int(c) * s for c, s in zip(coords, self._strides))

    def decode_vertex(self, v: int) -> tuple[int, ...]:
        v = self.check_vertex(v)
        return tuple(self._coord(v, a) for a in range(self.d))

    def encode_edge(self, label) -> int:
        w, axis = label
        code = self.encode_vertex(w)
        if not 0 <= axis < self.d or self._coord(code, axis) == self.M - 1:
            raise EncodingError(f"{label!r} is not an edge of {self}")
        return code * self.d + axis

    def decode_edge(self, e: int):
        w, a = divmod(self.check_edge(e), self.d)
        return self.decode_vertex(w), a

    def _endpoints(self, e):
        w, a = divmod(e, self.d)
        return w, w + self._strides[a]

    def _adj(self, v):
        d, M, strides = self.d, self.M, self._strides
        lower, upper = [], []
        for a in range(d):
            s = strides[a]
            c = (v // s) % M
            if c > 0:
                lower.append((v - s, (v - s) * d + a))
            if c < M - 1:
                upper.append((v + s, v * d + a))
        # anchors v - s decrease with the stride, so lower edges ascend with axis
        return lower + upper

    def _build_edge_arrays(self):
        verts = np.arange(self.vertex_count, dtype=np.int64)
        src, dst, key = [], [], []
        for a, s in enumerate(self._strides):
            w = verts[(verts // s) % self.M < self.M - 1]
            src.append(w)
            dst.append(w + s)
            key.append(w * self.d + a)
        return np.concatenate(src), np.concatenate(dst), np.concatenate(key)

    def distance(self, u, v):
        a, b = self.decode_vertex(u), self.decode_vertex(v)
        return sum(abs(x - y) for x, y in zip(a, b))

    def shortest_path_waypoints(self, u, v):
        cur = self.check_vertex(u)
        target = self.decode_vertex(v)
        path = [cur]
        for a, s in enumerate(self._strides):
            c = self._coord(cur, a)
            step = s if target[a] > c else -s
            for _ in range(abs(target[a] - c)):
                cur += step
                path.append(cur)
        return path

    def default_endpoints(self):
        return 0, self.vertex_count - 1


@dataclass(frozen=True)
class DoubleTree(Topology):
    """Two complete binary trees of depth ``n`` glued along their leaves.

    Vertex codes: ``0 .. 2^(n+1)-2`` are the first tree in heap order (root
    ``x`` = 0, leaves are the last ``2^n``); ``2^(n+1)-1 + h`` is the internal
    node with heap index ``h`` of the second tree (root ``y``). Edge code is
    ``side * (2^(n+1)-2) + 2 * parent_heap + child``.
    """

    n: int
    family: ClassVar[str] = "doubletree"

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigError(f"double tree depth must be >= 1, got {self.n!r}")

    def __str__(self) -> str:
        return f"doubletree:n={self.n}"

    @property
    def _offset(self) -> int:
        return (2 << self.n) - 1

    @property
    def _half(self) -> int:
        return (2 << self.n) - 2

    @property
    def vertex_count(self) -> int:
        return 3 * (1 << self.n) - 2

    @property
    def edge_count(self) -> int:
        return (4 << self.n) - 4

    @property
    def root_x(self) -> int:
        return 0

    @property
    def root_y(self) -> int:
        return self._offset

    def _is_edge(self, e):
        return 0 <= e < self.edge_count

    @staticmethod
    def _heap(level: int, index: int) -> int:
        return (1 << level) - 1 + index

    @staticmethod
    def _level_index(h: int) -> tuple[int, int]:
        level = (h + 1).bit_length() - 1
        return level, h - ((1 << level) - 1)

    def encode_vertex(self, label) -> int:
        side, level, index = label
        if side not in (FIRST, SECOND) or not 0 <= level <= self.n or not 0 <= index < (1 << level):
            raise EncodingError(f"{label!r} is not a vertex of {self}")
        if side == SECOND and level == self.n:
            raise EncodingError("leaves are canonically labelled with side 'first'")
        h = self._heap(level, index)
        return h if side == FIRST else self._offset + h

    def decode_vertex(self, v: int):
        v = self.check_vertex(v)
        if v < self._offset:
            return (FIRST, *self._level_index(v))
        return (SECOND, *self._level_index(v - self._offset))

    def encode_edge(self, label) -> int:
        side, level, index, child = label
        if side not in (FIRST, SECOND) or child not in (LEFT, RIGHT):
            raise EncodingError(f"{label!r} is not an edge of {self}")
        if not 0 <= level < self.n or not 0 <= index < (1 << level):
            raise EncodingError(f"{label!r} is not an edge of {self}")
        code = 2 * self._heap(level, index) + (child == RIGHT)
        return code if side == FIRST else self._half + code

    def decode_edge(self, e: int):
        e = self.check_edge(e)
        side = FIRST if e < self._half else SECOND
        h, c = divmod(e % self._half, 2)
        return (side, *self._level_index(h), RIGHT if c else LEFT)

    def _second(self, h: int) -> int:
        # second-tree node with heap index h; leaves are shared with the first tree
        return h if h >= (1 << self.n) - 1 else self._offset + h

    def _endpoints(self, e):
        if e < self._half:
            h, c = divmod(e, 2)
            return h, 2 * h + 1 + c
        h, c = divmod(e - self._half, 2)
        return self._offset + h, self._second(2 * h + 1 + c)

    def _adj(self, v):
        n_leaf0 = (1 << self.n) - 1
        half, off = self._half, self._offset
        out = []
        if v < off:
            h = v
            if h > 0:
                p = (h - 1) // 2
                out.append((p, 2 * p + (h - 1) % 2))
            if h < n_leaf0:
                out.append((2 * h + 1, 2 * h))
                out.append((2 * h + 2, 2 * h + 1))
            else:
                p = (h - 1) // 2
                out.append((off + p, half + 2 * p + (h - 1) % 2))
        else:
            h = v - off
            if h > 0:
                p = (h - 1) // 2
                out.append((off + p, half + 2 * p + (h - 1) % 2))
            out.append((self._second(2 * h + 1), half + 2 * h))
            out.append((self._second(2 * h + 2), half + 2 * h + 1))
        out.sort(key=lambda t: t[1])
        return out

    def _build_edge_arrays(self):
        h = np.arange((1 << self.n) - 1, dtype=np.int64)
        n_leaf0 = (1 << self.n) - 1
        src, dst, key = [], [], []
        for c in (0, 1):
            child = 2 * h + 1 + c
            src.append(h)
            dst.append(child)
            key.append(2 * h + c)
        for c in (0, 1):
            child = 2 * h + 1 + c
            src.append(self._offset + h)
            dst.append(np.where(child >= n_leaf0, child, self._offset + child))
            key.append(self._half + 2 * h + c)
        return np.concatenate(src), np.concatenate(dst), np.concatenate(key)

    def mirror_edge(self, e: int) -> int:
        e = self.check_edge(e)
        return e + self._half if e < self._half else e - self._half

    def distance(self, u, v):
        su, lu, iu = self.decode_vertex(u)
        sv, lv, iv = self.decode_vertex(v)
        n = self.n
        # leaves belong to both trees
        if su == sv or lu == n or lv == n:
            return _tree_distance(lu, iu, lv, iv)
        # opposite trees: the path crosses once through a leaf
        if lu <= lv:
            overlap = iv >> (lv - lu) == iu
        else:
            overlap = iu >> (lu - lv) == iv
        if overlap:
            return 2 * n - lu - lv
        lca = _lca_level(lu, iu, lv, iv)
        return 2 * n - 2 * lca - abs(lu - lv)

    def default_endpoints(self):
        return self.root_x, self.root_y


def _lca_level(la: int, ia: int, lb: int, ib: int) -> int:
    if la > lb:
        ia >>= la - lb
        la = lb
    else:
        ib >>= lb - la
    while ia != ib:
        ia >>= 1
        ib >>= 1
        la -= 1
    return la


def _tree_distance(la: int, ia: int, lb: int, ib: int) -> int:
    return la + lb - 2 * _lca_level(la, ia, lb, ib)


@dataclass(frozen=True)
class Complete(Topology):
    """Complete graph on ``n`` vertices; edge ``(i, j)``, ``i < j``, has code ``i * n + j``."""

    n: int
    family: ClassVar[str] = "complete"

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise ConfigError(f"complete graph needs n >= 2, got {self.n!r}")

    def __str__(self) -> str:
        return f"complete:n={self.n}"

    @property
    def vertex_count(self) -> int:
        return self.n

    @property
    def edge_count(self) -> int:
        return self.n * (self.n - 1) // 2

    def edge_code(self, i: int, j: int) -> int:
        return i * self.n + j if i < j else j * self.n + i

    def _is_edge(self, e):
        i, j = divmod(e, self.n)
        return 0 <= i < j < self.n

    def encode_vertex(self, label) -> int:
        return self.check_vertex(label)

    def decode_vertex(self, v: int) -> int:
        return self.check_vertex(v)

    def encode_edge(self, label) -> int:
        i, j = label
        if not 0 <= i < j < self.n:
            raise EncodingError(f"{label!r} is not an edge of {self} (need i < j)")
        return i * self.n + j

    def decode_edge(self, e: int):
        return divmod(self.check_edge(e), self.n)

    def _endpoints(self, e):
        return divmod(e, self.n)

    def _adj(self, v):
        n = self.n
        return [(j, j * n + v) for j in range(v)] + [(j, v * n + j) for j in range(v + 1, n)]

    def _build_edge_arrays(self):
        i, j = np.triu_indices(self.n, k=1)
        return i, j, i.astype(np.int64) * self.n + j

    def distance(self, u, v):
        return int(self.check_vertex(u) != self.check_vertex(v))

    def default_endpoints(self):
        return 0, self.n - 1


FAMILIES: dict[str, type[Topology]] = {
    "hypercube": Hypercube,
    "mesh": Mesh,
    "doubletree": DoubleTree,
    "complete": Complete,
}

_SPEC_RE = re.compile(r"^\s*([a-z]+)\s*:\s*(.*?)\s*$")


def parse_topology(spec: str) -> Topology:
    """Parse a descriptor such as ``hypercube:n=12`` or ``mesh:d=2,M=64``."""
    m = _SPEC_RE.match(spec)
    if not m or m.group(1) not in FAMILIES:
        raise ConfigError(f"cannot parse topology {spec!r}")
    params = {}
    for item in filter(None, (s.strip() for s in m.group(2).split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"bad parameter {item!r} in {spec!r}")
        try:
            params[key.strip()] = int(value)
        except ValueError:
            raise ConfigError(f"parameter {key!r} must be an integer in {spec!r}") from None
    try:
        return FAMILIES[m.group(1)](**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {m.group(1)}: {exc}") from None
