"""Geodesic metric spaces with exact distances.

The catalog covers finite metric graphs, Euclidean factors and two ways of
taking products: the l2 product and the l^p ("normed") product.  Distances
are computed in rational arithmetic wherever the space allows it, so that
quantities like ``d(y, z)**2 - |F(y) - F(z)|**2`` do not drown in roundoff.

Points are plain tuples:

* ``GraphPoint(edge, offset)`` on a graph, ``offset`` measured from the
  first endpoint of the edge;
* a tuple of floats in a Euclidean factor;
* ``Pair(left, right)`` in a product.
"""

from __future__ import annotations

import abc
import enum
import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, NamedTuple, Optional, Sequence

import numpy as np

__all__ = [
    "Curvature",
    "EuclideanSpace",
    "Geodesic",
    "GraphPoint",
    "InvalidSpaceError",
    "L2Product",
    "MetricGraph",
    "NormedProduct",
    "Pair",
    "PointError",
    "Space",
    "build_space",
    "curvature_validity",
    "point_from_json",
    "point_to_json",
]

MAX_PRODUCT_DEPTH = 8
TIE_TOL = 1e-12


class InvalidSpaceError(ValueError):
    """Raised when a space description violates its invariants.

    ``field`` is the location of the offending entry inside the description,
    as a tuple of keys and indices, when it is known.
    """

    def __init__(self, message: str, field: tuple = ()):
        super().__init__(message)
        self.field = tuple(field)


class PointError(ValueError):
    """A point does not belong to the space it was used with."""


class GraphPoint(NamedTuple):
    edge: int
    offset: float


class Pair(NamedTuple):
    left: Any
    right: Any


class Curvature(str, enum.Enum):
    CAT_OK = "CAT_OK"
    NOT_CAT = "NOT_CAT"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Geodesic:
    """Constant-speed geodesic ``t -> point`` for ``t`` in ``[0, 1]``."""

    start: Any
    end: Any
    length: float
    evaluator: Callable[[float], Any] = field(repr=False, compare=False)
    unique: bool = True

    def __call__(self, t: float):
        if t <= 0.0:
            return self.start
        if t >= 1.0:
            return self.end
        return self.evaluator(float(t))


def _as_float(x, what="value") -> float:
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise PointError(f"{what} must be a real number, got {x!r}") from None
    if not math.isfinite(v):
        raise PointError(f"{what} must be finite, got {x!r}")
    return v


class Space(abc.ABC):
    """Common interface of all catalog spaces."""

    kind: str = ""

    @property
    @abc.abstractmethod
    def basepoint(self):
        ...

    @abc.abstractmethod
    def check_point(self, p):
        """Return ``p`` in canonical form, or raise :class:`PointError`."""

    @abc.abstractmethod
    def distance(self, p, q) -> float:
        ...

    def squared_distance_exact(self, p, q) -> Optional[Fraction]:
        """``d(p, q)**2`` as an exact rational, or None if it is irrational."""
        return None

    def exact_distance(self, p, q) -> Optional[Fraction]:
        """``d(p, q)`` as an exact rational, or None when not available."""
        return None

    @abc.abstractmethod
    def geodesic(self, p, q) -> Geodesic:
        ...

    def midpoint(self, p, q):
        return self.geodesic(p, q)(0.5)

    @abc.abstractmethod
    def sample_points(self, n: int, seed=None) -> list:
        ...

    @abc.abstractmethod
    def curvature_validity(self, kappa: float) -> Curvature:
        ...

    @abc.abstractmethod
    def to_dict(self) -> dict:
        ...

    @property
    def depth(self) -> int:
        return 0


# --------------------------------------------------------------------------
# metric graphs


class MetricGraph(Space):
    """Finite, simple, connected metric graph."""

    kind = "graph"

    def __init__(self, vertices: Sequence, edges: Sequence, basepoint=None):
        vertices = list(vertices)
        if not vertices:
            raise InvalidSpaceError("graph has no vertices", ("vertices",))
        index = {}
        for i, v in enumerate(vertices):
            if isinstance(v, bool) or not isinstance(v, (str, int)):
                raise InvalidSpaceError(
                    f"vertex label must be a string or integer, got {v!r}", ("vertices", i)
                )
            if v in index:
                raise InvalidSpaceError(f"duplicate vertex {v!r}", ("vertices", i))
            index[v] = i
        if not edges:
            raise InvalidSpaceError("graph needs at least one edge", ("edges",))

        ends: list[tuple[int, int]] = []
        lengths: list[float] = []
        seen = set()
        for k, item in enumerate(edges):
            try:
                u, v, length = item
            except (TypeError, ValueError):
                raise InvalidSpaceError(
                    f"edge {k} must be (u, v, length)", ("edges", k)
                ) from None
            for w in (u, v):
                if w not in index:
                    raise InvalidSpaceError(f"edge {k} uses unknown vertex {w!r}", ("edges", k))
            if u == v:
                raise InvalidSpaceError(f"edge {k} is a loop at {u!r}", ("edges", k))
            key = frozenset((index[u], index[v]))
            if key in seen:
                raise InvalidSpaceError(
                    f"edge {k} duplicates an edge between {u!r} and {v!r}", ("edges", k)
                )
            seen.add(key)
            if isinstance(length, bool):
                raise InvalidSpaceError(f"edge {k} length must be a number", ("edges", k))
            try:
                length = float(length)
            except (TypeError, ValueError):
                raise InvalidSpaceError(f"edge {k} length must be a number", ("edges", k)) from None
            if not (math.isfinite(length) and length > 0):
                raise InvalidSpaceError(
                    f"edge {k} has nonpositive length {length!r}", ("edges", k)
                )
            ends.append((index[u], index[v]))
            lengths.append(length)

        self.vertices = tuple(vertices)
        self._index = index
        self.edges = tuple(ends)
        self.lengths = tuple(lengths)
        self._exact_lengths = tuple(Fraction(x) for x in lengths)
        n = len(vertices)
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for e, (u, v) in enumerate(ends):
            adj[u].append((v, e))
            adj[v].append((u, e))
        self.adjacency = tuple(tuple(sorted(a)) for a in adj)

        unreached = set(range(n)) - self._reachable(0)
        if unreached:
            label = vertices[min(unreached)]
            raise InvalidSpaceError(f"graph is disconnected: {label!r} is unreachable", ("edges",))
        self._dist = self._all_pairs()
        self._basepoint = self._point_of_vertex(0) if basepoint is None else self.check_point(basepoint)

    def _reachable(self, start):
        seen, stack = {start}, [start]
        while stack:
            for w, _ in self.adjacency[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def _all_pairs(self):
        # Floyd-Warshall over exact rationals; graphs here are desk-sized
        n = len(self.vertices)
        inf = None
        d = [[inf] * n for _ in range(n)]
        for i in range(n):
            d[i][i] = Fraction(0)
        for e, (u, v) in enumerate(self.edges):
            d[u][v] = d[v][u] = self._exact_lengths[e]
        for k in range(n):
            dk = d[k]
            for i in range(n):
                dik = d[i][k]
                if dik is None:
                    continue
                di = d[i]
                for j in range(n):
                    if dk[j] is None:
                        continue
                    cand = dik + dk[j]
                    if di[j] is None or cand < di[j]:
                        di[j] = cand
        return d

    @property
    def basepoint(self):
        return self._basepoint

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def vertex_index(self, v) -> int:
        """Index of a vertex given by label, index or a point sitting on it."""
        if isinstance(v, GraphPoint) or (isinstance(v, tuple) and len(v) == 2):
            idx = self.vertex_at(self.check_point(v))
            if idx is None:
                raise PointError(f"{v!r} is not a vertex")
            return idx
        if v in self._index:
            return self._index[v]
        raise PointError(f"unknown vertex {v!r}")

    def vertex_point(self, v) -> GraphPoint:
        """The point at vertex ``v`` (a label, or an index when not a label)."""
        if v in self._index:
            return self._point_of_vertex(self._index[v])
        if isinstance(v, (int, np.integer)) and 0 <= v < self.n_vertices:
            return self._point_of_vertex(int(v))
        raise PointError(f"unknown vertex {v!r}")

    def _point_of_vertex(self, i: int) -> GraphPoint:
        e = min(e for _, e in self.adjacency[i])
        u, _ = self.edges[e]
        return GraphPoint(e, 0.0 if u == i else self.lengths[e])

    def vertex_at(self, p: GraphPoint) -> Optional[int]:
        u, v = self.edges[p.edge]
        if p.offset == 0.0:
            return u
        if p.offset == self.lengths[p.edge]:
            return v
        return None

    def check_point(self, p) -> GraphPoint:
        try:
            e, s = p
        except (TypeError, ValueError):
            raise PointError(f"graph point must be (edge, offset), got {p!r}") from None
        if isinstance(e, bool) or not isinstance(e, (int, np.integer)):
            raise PointError(f"edge id must be an integer, got {e!r}")
        e = int(e)
        if not 0 <= e < len(self.edges):
            raise PointError(f"edge id {e} out of range")
        s = _as_float(s, "offset")
        length = self.lengths[e]
        slack = 1e-12 * length
        if s < -slack or s > length + slack:
            raise PointError(f"offset {s} outside edge {e} of length {length}")
        s = min(max(s, 0.0), length)
        if isinstance(p, GraphPoint) and p.offset == s and p.edge == e:
            return p
        return GraphPoint(e, s)

    def canonical(self, p) -> GraphPoint:
        """Unique representative of ``p``: vertices map to :meth:`vertex_point`."""
        p = self.check_point(p)
        v = self.vertex_at(p)
        return p if v is None else self._point_of_vertex(v)

    def _exits(self, p: GraphPoint):
        """(vertex, exact distance, segment to it) for each way out of ``p``."""
        u, v = self.edges[p.edge]
        length = self.lengths[p.edge]
        if p.offset == 0.0:
            return ((u, Fraction(0), None),)
        if p.offset == length:
            return ((v, Fraction(0), None),)
        s = Fraction(p.offset)
        return (
            (u, s, (p.edge, p.offset, 0.0)),
            (v, self._exact_lengths[p.edge] - s, (p.edge, p.offset, length)),
        )

    def exact_distance(self, p, q) -> Fraction:
        p, q = self.check_point(p), self.check_point(q)
        best = None
        if p.edge == q.edge:
            best = abs(Fraction(p.offset) - Fraction(q.offset))
        dist = self._dist
        for a, da, _ in self._exits(p):
            row = dist[a]
            for b, db, _ in self._exits(q):
                cand = da + row[b] + db
                if best is None or cand < best:
                    best = cand
        return best

    def squared_distance_exact(self, p, q) -> Fraction:
        d = self.exact_distance(p, q)
        return d * d

    def distance(self, p, q) -> float:
        return float(self.exact_distance(p, q))

    def vertex_distance(self, a: int, b: int) -> Fraction:
        return self._dist[a][b]

    def _vertex_path(self, a: int, b: int, tol: Fraction):
        """Lexicographically smallest shortest vertex path; flags branching."""
        path, used, unique = [a], [], True
        dist = self._dist
        cur = a
        while cur != b:
            target = dist[cur][b] + tol
            opts = [
                (w, e)
                for w, e in self.adjacency[cur]
                if self._exact_lengths[e] + dist[w][b] <= target
            ]
            if len(opts) > 1:
                unique = False
            w, e = opts[0]
            path.append(w)
            used.append(e)
            cur = w
        return path, used, unique

    def geodesic(self, p, q) -> Geodesic:
        p, q = self.check_point(p), self.check_point(q)
        routes = []  # (length, vertex sequence, segments, inner uniqueness)
        if p.edge == q.edge and self.vertex_at(p) is None and self.vertex_at(q) is None:
            d = abs(Fraction(p.offset) - Fraction(q.offset))
            routes.append((d, (), [(p.edge, p.offset, q.offset)], True))
        dist = self._dist
        for a, da, seg_a in self._exits(p):
            for b, db, seg_b in self._exits(q):
                routes.append((da + dist[a][b] + db, (a, b, seg_a, seg_b)))
        best = min(r[0] for r in routes)
        tol = Fraction(TIE_TOL) * max(Fraction(1), best)
        tied = []
        for r in routes:
            if r[0] > best + tol:
                continue
            if len(r) == 4:
                tied.append(r)
                continue
            a, b, seg_a, seg_b = r[1]
            verts, used, unique = self._vertex_path(a, b, tol)
            segs = [] if seg_a is None else [seg_a]
            for w0, w1, e in zip(verts, verts[1:], used):
                length = self.lengths[e]
                segs.append((e, 0.0, length) if self.edges[e][0] == w0 else (e, length, 0.0))
            if seg_b is not None:
                segs.append((seg_b[0], seg_b[2], seg_b[1]))
            tied.append((r[0], tuple(verts), segs, unique))
        tied.sort(key=lambda r: r[1])
        length, _, segs, inner_unique = tied[0]
        unique = inner_unique and len(tied) == 1
        total = float(length)

        def at(t, segs=segs, total=total):
            target = t * total
            acc = 0.0
            for e, a, b in segs:
                seg = abs(b - a)
                if target <= acc + seg:
                    step = target - acc
                    off = a + step if b >= a else a - step
                    return GraphPoint(e, min(max(off, 0.0), self.lengths[e]))
                acc += seg
            return q

        return Geodesic(p, q, total, at, unique)

    def sample_points(self, n: int, seed=None) -> list:
        rng = np.random.default_rng(seed)
        w = np.asarray(self.lengths)
        edges = rng.choice(len(w), size=n, p=w / w.sum())
        fracs = rng.uniform(0.0, 1.0, size=n)
        return [GraphPoint(int(e), float(f * w[e])) for e, f in zip(edges, fracs)]

    def is_tree(self) -> bool:
        return len(self.edges) == self.n_vertices - 1

    def girth(self) -> float:
        """Length of the shortest cycle (``inf`` for trees)."""
        if self.is_tree():
            return math.inf
        best = None
        for e, (u, v) in enumerate(self.edges):
            d = self._dijkstra_without(u, v, e)
            if d is not None:
                cyc = d + self._exact_lengths[e]
                if best is None or cyc < best:
                    best = cyc
        return float(best)

    def _dijkstra_without(self, src, dst, skip_edge):
        done = set()
        heap = [(Fraction(0), src)]
        while heap:
            d, w = heapq.heappop(heap)
            if w in done:
                continue
            if w == dst:
                return d
            done.add(w)
            for x, e in self.adjacency[w]:
                if e != skip_edge and x not in done:
                    heapq.heappush(heap, (d + self._exact_lengths[e], x))
        return None

    def curvature_validity(self, kappa: float) -> Curvature:
        if self.is_tree():
            return Curvature.CAT_OK
        if kappa <= 0:
            return Curvature.NOT_CAT
        bound = 2 * math.pi / math.sqrt(kappa)
        return Curvature.CAT_OK if self.girth() >= bound * (1 - 1e-12) else Curvature.NOT_CAT

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "vertices": list(self.vertices),
            "edges": [
                [self.vertices[u], self.vertices[v], length]
                for (u, v), length in zip(self.edges, self.lengths)
            ],
            "basepoint": point_to_json(self, self.basepoint),
        }

    def __repr__(self):
        return f"MetricGraph(V={self.n_vertices}, E={len(self.edges)})"


# --------------------------------------------------------------------------
# Euclidean factor


class EuclideanSpace(Space):
    """R^n with the standard metric; ``bounds`` only shape the sampling box."""

    kind = "euclidean"

    def __init__(self, dimension: int, basepoint=None, bounds=(-10.0, 10.0)):
        if isinstance(dimension, bool) or not isinstance(dimension, (int, np.integer)):
            raise InvalidSpaceError("dimension must be an integer", ("dimension",))
        if dimension < 1:
            raise InvalidSpaceError("dimension must be at least 1", ("dimension",))
        self.dimension = int(dimension)
        try:
            lo, hi = (float(b) for b in bounds)
        except (TypeError, ValueError):
            raise InvalidSpaceError("bounds must be [low, high]", ("bounds",)) from None
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise InvalidSpaceError(f"invalid sampling bounds {bounds!r}", ("bounds",))
        self.bounds = (lo, hi)
        if basepoint is None:
            basepoint = (0.0,) * self.dimension
        try:
            self._basepoint = self.check_point(basepoint)
        except PointError as exc:
            raise InvalidSpaceError(str(exc), ("basepoint",)) from None

    @property
    def basepoint(self):
        return self._basepoint

    def check_point(self, p) -> tuple:
        if isinstance(p, tuple) and len(p) == self.dimension and all(type(x) is float for x in p):
            return p
        if self.dimension == 1 and not isinstance(p, (tuple, list, np.ndarray)):
            p = (p,)
        try:
            coords = tuple(_as_float(x, "coordinate") for x in np.asarray(p, dtype=object).ravel())
        except TypeError:
            raise PointError(f"not a point of R^{self.dimension}: {p!r}") from None
        if len(coords) != self.dimension or isinstance(p, Pair):
            raise PointError(f"not a point of R^{self.dimension}: {p!r}")
        return coords

    def distance(self, p, q) -> float:
        return math.dist(self.check_point(p), self.check_point(q))

    def squared_distance_exact(self, p, q) -> Fraction:
        p, q = self.check_point(p), self.check_point(q)
        return sum(((Fraction(a) - Fraction(b)) ** 2 for a, b in zip(p, q)), Fraction(0))

    def exact_distance(self, p, q) -> Optional[Fraction]:
        if self.dimension != 1:
            return None
        p, q = self.check_point(p), self.check_point(q)
        return abs(Fraction(p[0]) - Fraction(q[0]))

    def geodesic(self, p, q) -> Geodesic:
        p, q = self.check_point(p), self.check_point(q)

        def at(t):
            return tuple((1.0 - t) * a + t * b for a, b in zip(p, q))

        return Geodesic(p, q, math.dist(p, q), at, True)

    def midpoint(self, p, q):
        p, q = self.check_point(p), self.check_point(q)
        return tuple(0.5 * a + 0.5 * b for a, b in zip(p, q))

    def sample_points(self, n: int, seed=None) -> list:
        rng = np.random.default_rng(seed)
        lo, hi = self.bounds
        pts = rng.uniform(lo, hi, size=(n, self.dimension))
        return [tuple(float(x) for x in row) for row in pts]

    def curvature_validity(self, kappa: float) -> Curvature:
        if kappa >= 0 or self.dimension == 1:
            return Curvature.CAT_OK
        return Curvature.NOT_CAT

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "dimension": self.dimension,
            "bounds": list(self.bounds),
            "basepoint": list(self.basepoint),
        }

    def __repr__(self):
        return f"EuclideanSpace({self.dimension})"


# --------------------------------------------------------------------------
# products


class _Product(Space):
    def __init__(self, left: Space, right: Space, basepoint=None):
        for name, f in (("left", left), ("right", right)):
            if not isinstance(f, Space):
                raise InvalidSpaceError(f"{name} factor is not a space", (name,))
        if max(left.depth, right.depth) + 1 > MAX_PRODUCT_DEPTH:
            raise InvalidSpaceError(f"product nesting deeper than {MAX_PRODUCT_DEPTH}")
        self.left, self.right = left, right
        if basepoint is None:
            basepoint = Pair(left.basepoint, right.basepoint)
        try:
            self._basepoint = self.check_point(basepoint)
        except PointError as exc:
            raise InvalidSpaceError(str(exc), ("basepoint",)) from None

    @property
    def depth(self) -> int:
        return 1 + max(self.left.depth, self.right.depth)

    @property
    def basepoint(self):
        return self._basepoint

    def check_point(self, p) -> Pair:
        try:
            a, b = p
        except (TypeError, ValueError):
            raise PointError(f"product point must be a (left, right) pair, got {p!r}") from None
        a, b = self.left.check_point(a), self.right.check_point(b)
        if isinstance(p, Pair) and p.left is a and p.right is b:
            return p
        return Pair(a, b)

    def geodesic(self, p, q) -> Geodesic:
        p, q = self.check_point(p), self.check_point(q)
        gl = self.left.geodesic(p.left, q.left)
        gr = self.right.geodesic(p.right, q.right)

        def at(t):
            return Pair(gl(t), gr(t))

        return Geodesic(p, q, self._combine(gl.length, gr.length), at, gl.unique and gr.unique)

    def midpoint(self, p, q):
        p, q = self.check_point(p), self.check_point(q)
        return Pair(self.left.midpoint(p.left, q.left), self.right.midpoint(p.right, q.right))

    def distance(self, p, q) -> float:
        p, q = self.check_point(p), self.check_point(q)
        return self._combine(self.left.distance(p.left, q.left), self.right.distance(p.right, q.right))

    def sample_points(self, n: int, seed=None) -> list:
        rng = np.random.default_rng(seed)
        a = self.left.sample_points(n, rng)
        b = self.right.sample_points(n, rng)
        return [Pair(x, y) for x, y in zip(a, b)]

    @abc.abstractmethod
    def _combine(self, a: float, b: float) -> float:
        ...

    def _pythagorean_exact(self, p, q):
        p, q = self.check_point(p), self.check_point(q)
        a = self.left.squared_distance_exact(p.left, q.left)
        if a is None:
            return None
        b = self.right.squared_distance_exact(p.right, q.right)
        if b is None:
            return None
        return a + b

    def _l2_curvature(self, kappa):
        lv = self.left.curvature_validity(kappa)
        rv = self.right.curvature_validity(kappa)
        if Curvature.NOT_CAT in (lv, rv):
            # each factor sits in the product as a convex subset
            return Curvature.NOT_CAT
        if kappa < 0:
            # two nontrivial factors span a flat rectangle
            return Curvature.NOT_CAT
        if (
            self.left.curvature_validity(0) is Curvature.CAT_OK
            and self.right.curvature_validity(0) is Curvature.CAT_OK
        ):
            return Curvature.CAT_OK
        return Curvature.UNKNOWN

    def _factor_dict(self):
        return {
            "kind": self.kind,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
            "basepoint": point_to_json(self, self.basepoint),
        }


class L2Product(_Product):
    """``X x Y`` with ``d = sqrt(d_X**2 + d_Y**2)``."""

    kind = "l2product"

    def _combine(self, a, b):
        return math.hypot(a, b)

    def squared_distance_exact(self, p, q):
        return self._pythagorean_exact(p, q)

    def curvature_validity(self, kappa):
        return self._l2_curvature(kappa)

    def to_dict(self):
        return self._factor_dict()

    def __repr__(self):
        return f"L2Product({self.left!r}, {self.right!r})"


class NormedProduct(_Product):
    """``X x Y`` metrized by the l^p norm of the pair of factor distances."""

    kind = "normedproduct"

    def __init__(self, left: Space, right: Space, p: float, basepoint=None):
        if isinstance(p, bool):
            raise InvalidSpaceError("exponent p must be a number", ("p",))
        try:
            p = float(p)
        except (TypeError, ValueError):
            raise InvalidSpaceError("exponent p must be a number", ("p",)) from None
        if not (math.isfinite(p) and p > 1):
            raise InvalidSpaceError(f"exponent p must lie in (1, inf), got {p!r}", ("p",))
        self.p = p
        super().__init__(left, right, basepoint)

    @property
    def dual_exponent(self) -> float:
        return self.p / (self.p - 1.0)

    def _combine(self, a, b):
        return lp_norm(a, b, self.p)

    def squared_distance_exact(self, p, q):
        if self.p == 2.0:
            return self._pythagorean_exact(p, q)
        return None

    def curvature_validity(self, kappa):
        if self.p == 2.0:
            return self._l2_curvature(kappa)
        return Curvature.NOT_CAT

    def to_dict(self):
        d = self._factor_dict()
        d["p"] = self.p
        return d

    def __repr__(self):
        return f"NormedProduct({self.left!r}, {self.right!r}, p={self.p})"


def lp_norm(a: float, b: float, p: float) -> float:
    a, b = abs(a), abs(b)
    m = max(a, b)
    if m == 0.0:
        return 0.0
    return m * ((a / m) ** p + (b / m) ** p) ** (1.0 / p)


def curvature_validity(space: Space, kappa: float) -> Curvature:
    """Structural CAT(kappa) verdict from sufficient conditions."""
    return space.curvature_validity(float(kappa))


# --------------------------------------------------------------------------
# descriptions


def build_space(desc: dict, _depth: int = 0) -> Space:
    """Build a space from its dictionary description (the JSON payload)."""
    if isinstance(desc, Space):
        return desc
    if not isinstance(desc, dict):
        raise InvalidSpaceError("space description must be an object")
    if _depth > MAX_PRODUCT_DEPTH:
        raise InvalidSpaceError(f"product nesting deeper than {MAX_PRODUCT_DEPTH}")
    kind = desc.get("kind")
    bp = desc.get("basepoint")
    if kind == "graph":
        edges = desc.get("edges", [])
        if not isinstance(edges, list):
            raise InvalidSpaceError("edges must be a list", ("edges",))
        g = MetricGraph(desc.get("vertices", []), edges)
        if bp is not None:
            g._basepoint = _field_point(g, bp)
        return g
    if kind == "euclidean":
        kwargs = {}
        if "bounds" in desc:
            kwargs["bounds"] = desc["bounds"]
        return EuclideanSpace(desc.get("dimension"), bp, **kwargs)
    if kind in ("l2product", "normedproduct"):
        factors = []
        for side in ("left", "right"):
            if side not in desc:
                raise InvalidSpaceError(f"missing {side} factor", (side,))
            try:
                factors.append(build_space(desc[side], _depth + 1))
            except InvalidSpaceError as exc:
                raise InvalidSpaceError(str(exc), (side,) + exc.field) from None
        if kind == "l2product":
            space = L2Product(*factors)
        else:
            space = NormedProduct(*factors, desc.get("p"))
        if bp is not None:
            space._basepoint = _field_point(space, bp)
        return space
    raise InvalidSpaceError(f"unknown space kind {kind!r}", ("kind",))


def _field_point(space, obj):
    try:
        return point_from_json(space, obj)
    except PointError as exc:
        raise InvalidSpaceError(str(exc), ("basepoint",)) from None


def point_to_json(space: Space, p):
    if isinstance(space, MetricGraph):
        v = space.vertex_at(p)
        if v is not None:
            return {"vertex": space.vertices[v]}
        return {"edge": p.edge, "offset": p.offset}
    if isinstance(space, EuclideanSpace):
        return list(p)
    return {"left": point_to_json(space.left, p.left), "right": point_to_json(space.right, p.right)}


def point_from_json(space: Space, obj):
    if isinstance(space, MetricGraph):
        if isinstance(obj, dict) and "vertex" in obj:
            if obj["vertex"] not in space._index:
                raise PointError(f"unknown vertex {obj['vertex']!r}")
            return space.vertex_point(obj["vertex"])
        if isinstance(obj, dict):
            return space.check_point((obj.get("edge"), obj.get("offset")))
        return space.check_point(obj)
    if isinstance(space, EuclideanSpace):
        return space.check_point(obj)
    if isinstance(obj, dict):
        if "left" not in obj or "right" not in obj:
            raise PointError("product point needs 'left' and 'right'")
        return Pair(point_from_json(space.left, obj["left"]), point_from_json(space.right, obj["right"]))
    return space.check_point(obj)
