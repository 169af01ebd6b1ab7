"""Affine functions on catalog spaces: basis, norms and gradients.

An affine function is stored as a flat tuple of exact rationals whose layout
depends on the space:

* graph: one value per vertex (the function is linear along every edge);
* Euclidean ``R^n``: ``n`` linear coefficients followed by a constant;
* product: the left factor's parameters followed by the right factor's
  (``f(x, y) = f_X(x) + f_Y(y)``).

Classes modulo constants are represented by the member vanishing at the
basepoint.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import _rational
from .spaces import (
    EuclideanSpace,
    GraphPoint,
    MetricGraph,
    NormedProduct,
    Pair,
    PointError,
    Space,
    lp_norm,
)

__all__ = [
    "AffineFunction",
    "NotAffineError",
    "absolute_gradient",
    "affine_basis",
    "affine_deviation",
    "check_affine",
    "check_gradient_monotonicity",
    "directional_slopes",
    "evaluate",
    "lipschitz_norm",
    "slope_constraints",
]

AFFINE_TOL = 1e-9


class NotAffineError(ValueError):
    """The function is not affine on its space."""


def n_params(space: Space) -> int:
    if isinstance(space, MetricGraph):
        return space.n_vertices
    if isinstance(space, EuclideanSpace):
        return space.dimension + 1
    return n_params(space.left) + n_params(space.right)


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(float(x))


class AffineFunction:
    """An affine function, exact in its parameters.

    Supports ``f + g``, ``f - g``, ``a * f`` and ``f + c`` (adding a constant).
    Calling ``f(p)`` returns a float; :meth:`exact` returns the rational value.
    """

    __slots__ = ("space", "params")

    def __init__(self, space: Space, params: Iterable):
        params = tuple(_to_fraction(x) for x in params)
        if len(params) != n_params(space):
            raise ValueError(f"expected {n_params(space)} parameters, got {len(params)}")
        self.space = space
        self.params = params

    @classmethod
    def constant(cls, space: Space, c=0) -> "AffineFunction":
        return cls(space, _constant_params(space, _to_fraction(c)))

    @classmethod
    def from_factors(cls, space: Space, left: "AffineFunction", right: "AffineFunction"):
        """``(x, y) -> left(x) + right(y)`` on a product space."""
        if left.space is not space.left or right.space is not space.right:
            raise ValueError("factor functions live on the wrong spaces")
        return cls(space, left.params + right.params)

    @property
    def left(self) -> "AffineFunction":
        k = n_params(self.space.left)
        return AffineFunction(self.space.left, self.params[:k])

    @property
    def right(self) -> "AffineFunction":
        k = n_params(self.space.left)
        return AffineFunction(self.space.right, self.params[k:])

    def exact(self, p) -> Fraction:
        return _eval(self.space, self.params, self.space.check_point(p))

    def __call__(self, p) -> float:
        return float(self.exact(p))

    def _coerce(self, other) -> "AffineFunction":
        if isinstance(other, AffineFunction):
            if other.space is not self.space:
                raise ValueError("affine functions live on different spaces")
            return other
        return AffineFunction.constant(self.space, other)

    def __add__(self, other):
        other = self._coerce(other)
        return AffineFunction(self.space, (a + b for a, b in zip(self.params, other.params)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return AffineFunction(self.space, (a - b for a, b in zip(self.params, other.params)))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return AffineFunction(self.space, (-a for a in self.params))

    def __mul__(self, c):
        if isinstance(c, AffineFunction):
            return NotImplemented
        c = _to_fraction(c)
        return AffineFunction(self.space, (c * a for a in self.params))

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1 / _to_fraction(c))

    def __eq__(self, other):
        return (
            isinstance(other, AffineFunction)
            and other.space is self.space
            and other.params == self.params
        )

    def __hash__(self):
        return hash((id(self.space), self.params))

    def __repr__(self):
        return f"AffineFunction({self.space!r}, {describe(self)})"


def linear_combination(coefficients: Sequence, functions: Sequence[AffineFunction]) -> AffineFunction:
    if not functions:
        raise ValueError("empty combination")
    space = functions[0].space
    acc = [Fraction(0)] * n_params(space)
    for c, f in zip(coefficients, functions):
        c = _to_fraction(c)
        if c == 0:
            continue
        acc = [a + c * b for a, b in zip(acc, f.params)]
    return AffineFunction(space, acc)


def _constant_params(space: Space, c: Fraction) -> tuple:
    if isinstance(space, MetricGraph):
        return (c,) * space.n_vertices
    if isinstance(space, EuclideanSpace):
        return (Fraction(0),) * space.dimension + (c,)
    return _constant_params(space.left, c) + (Fraction(0),) * n_params(space.right)


def _eval(space: Space, params: tuple, p) -> Fraction:
    if isinstance(space, MetricGraph):
        u, v = space.edges[p.edge]
        xu, xv = params[u], params[v]
        if p.offset == 0.0:
            return xu
        s = Fraction(p.offset)
        return xu + (xv - xu) * s / space._exact_lengths[p.edge]
    if isinstance(space, EuclideanSpace):
        total = params[-1]
        for c, x in zip(params, p):
            if c:
                total += c * Fraction(x)
        return total
    k = n_params(space.left)
    return _eval(space.left, params[:k], p.left) + _eval(space.right, params[k:], p.right)


def evaluate(f: AffineFunction, p) -> float:
    return f(p)


# --------------------------------------------------------------------------
# graphs


def edge_slopes(graph: MetricGraph, params: Sequence) -> list[Fraction]:
    """Slope along each edge, oriented from its first to its second endpoint."""
    return [
        (params[v] - params[u]) / graph._exact_lengths[e]
        for e, (u, v) in enumerate(graph.edges)
    ]


def _outgoing(graph: MetricGraph, slopes, vertex: int):
    out = {}
    for _, e in graph.adjacency[vertex]:
        out[e] = slopes[e] if graph.edges[e][0] == vertex else -slopes[e]
    return out


def slope_constraints(graph: MetricGraph) -> list[list[Fraction]]:
    """Rows of the homogeneous system on vertex values.

    For every vertex and every unordered pair of distinct incident edges the
    two outgoing slopes must cancel, i.e. the function passes through the
    vertex without a kink.
    """
    rows = []
    lengths = graph._exact_lengths
    for v, nbrs in enumerate(graph.adjacency):
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                row = [Fraction(0)] * graph.n_vertices
                for w, e in (nbrs[i], nbrs[j]):
                    row[w] += 1 / lengths[e]
                    row[v] -= 1 / lengths[e]
                rows.append(row)
    return rows


def _graph_basis(graph: MetricGraph, o: GraphPoint) -> list[tuple]:
    pin = [Fraction(0)] * graph.n_vertices
    pin[graph.edges[o.edge][0]] = Fraction(1)
    out = []
    for x in _rational.nullspace(slope_constraints(graph) + [pin], graph.n_vertices):
        slopes = edge_slopes(graph, x)
        norm = max(abs(s) for s in slopes)
        if norm == 0:
            continue
        first = next(s for s in slopes if s != 0)
        scale = (1 if first > 0 else -1) / norm
        x = [scale * a for a in x]
        shift = _eval(graph, tuple(x), o)
        out.append(tuple(a - shift for a in x))
    return out


def _basis_params(space: Space, o) -> list[tuple]:
    if isinstance(space, MetricGraph):
        return _graph_basis(space, o)
    if isinstance(space, EuclideanSpace):
        out = []
        for i in range(space.dimension):
            coef = [Fraction(0)] * space.dimension
            coef[i] = Fraction(1)
            out.append(tuple(coef) + (-Fraction(o[i]),))
        return out
    left_zero = (Fraction(0),) * n_params(space.left)
    right_zero = (Fraction(0),) * n_params(space.right)
    return [p + right_zero for p in _basis_params(space.left, o.left)] + [
        left_zero + p for p in _basis_params(space.right, o.right)
    ]


def affine_basis(space: Space, basepoint=None) -> list[AffineFunction]:
    """Basis of the affine functions modulo constants, each vanishing at ``basepoint``.

    Graph bases come out with unit Lipschitz norm; product bases are the
    pulled-back bases of the factors.
    """
    o = space.basepoint if basepoint is None else space.check_point(basepoint)
    return [AffineFunction(space, p) for p in _basis_params(space, o)]


def affine_residual(f: AffineFunction) -> float:
    """Largest relative kink of ``f`` at a graph vertex (0 off graphs)."""
    return _residual(f.space, f.params)


def _residual(space, params) -> float:
    if isinstance(space, MetricGraph):
        slopes = edge_slopes(space, params)
        worst = 0.0
        for v in range(space.n_vertices):
            out = list(_outgoing(space, slopes, v).values())
            for i in range(len(out)):
                for j in range(i + 1, len(out)):
                    scale = max(1.0, abs(float(out[i])), abs(float(out[j])))
                    worst = max(worst, abs(float(out[i] + out[j])) / scale)
        return worst
    if isinstance(space, EuclideanSpace):
        return 0.0
    k = n_params(space.left)
    return max(_residual(space.left, params[:k]), _residual(space.right, params[k:]))


# --------------------------------------------------------------------------
# norms and gradients


def _check_space(space: Space, f: AffineFunction):
    if f.space is not space:
        raise PointError("affine function belongs to a different space")


def norm_squared_exact(f: AffineFunction) -> Optional[Fraction]:
    """Squared Lipschitz norm as an exact rational when it is one."""
    return _norm_sq(f.space, f.params)


def _norm_sq(space, params) -> Optional[Fraction]:
    if isinstance(space, MetricGraph):
        m = max(abs(s) for s in edge_slopes(space, params))
        return m * m
    if isinstance(space, EuclideanSpace):
        return sum((c * c for c in params[:-1]), Fraction(0))
    if isinstance(space, NormedProduct) and space.p != 2.0:
        return None
    k = n_params(space.left)
    a = _norm_sq(space.left, params[:k])
    b = _norm_sq(space.right, params[k:])
    return None if a is None or b is None else a + b


def _norm(space, params) -> float:
    if isinstance(space, MetricGraph):
        return float(max(abs(s) for s in edge_slopes(space, params)))
    if isinstance(space, EuclideanSpace):
        return math.sqrt(float(sum((c * c for c in params[:-1]), Fraction(0))))
    k = n_params(space.left)
    a = _norm(space.left, params[:k])
    b = _norm(space.right, params[k:])
    if isinstance(space, NormedProduct):
        return lp_norm(a, b, space.dual_exponent)
    return math.hypot(a, b)


def lipschitz_norm(space: Space, f: AffineFunction) -> float:
    """Optimal Lipschitz constant of an affine function.

    On a product the constant is the dual norm of the pair of factor
    constants: Euclidean for the l2 product, l^q with ``1/p + 1/q = 1`` for
    the l^p product.
    """
    _check_space(space, f)
    kink = _residual(space, f.params)
    if kink > AFFINE_TOL:
        raise NotAffineError(f"function bends at a vertex (relative kink {kink:.3g})")
    exact = _norm_sq(space, f.params)
    if exact is not None:
        return math.sqrt(float(exact))
    return _norm(space, f.params)


def _gradient(space, params, p) -> float:
    if isinstance(space, MetricGraph):
        slopes = edge_slopes(space, params)
        v = space.vertex_at(p)
        if v is None:
            return abs(float(slopes[p.edge]))
        return max(0.0, max(float(s) for s in _outgoing(space, slopes, v).values()))
    if isinstance(space, EuclideanSpace):
        return _norm(space, params)
    k = n_params(space.left)
    a = _gradient(space.left, params[:k], p.left)
    b = _gradient(space.right, params[k:], p.right)
    if isinstance(space, NormedProduct):
        return lp_norm(a, b, space.dual_exponent)
    return math.hypot(a, b)


def absolute_gradient(
    space: Space,
    f: AffineFunction,
    p,
    method: str = "exact",
    eps: float = 1e-6,
    n_directions: int = 256,
    n_angles: int = 33,
    seed=0,
) -> float:
    """``max(0, limsup (f(z) - f(p)) / d(p, z))`` at ``p``.

    ``method="exact"`` reads it off the slope data.  ``method="sampled"``
    takes the largest difference quotient over a finite fan of directions
    at radius ``eps``.  In a product, each pair of factor directions is
    mixed at ``n_angles`` angles and the best angle is then refined by
    golden-section search.  On graphs and on products with one-dimensional
    Euclidean factors this agrees with the exact value to about 1e-7.
    """
    _check_space(space, f)
    p = space.check_point(p)
    if method == "exact":
        return _gradient(space, f.params, p)
    if method != "sampled":
        raise ValueError(f"unknown method {method!r}")
    rng = np.random.default_rng(seed)
    base = f(p)

    def quotient(move, reach):
        z = move(min(eps, 0.5 * reach))
        d = space.distance(p, z)
        return (f(z) - base) / d if d > 0 else 0.0

    best = 0.0
    if not isinstance(space, (MetricGraph, EuclideanSpace)):
        left = _movers(space.left, p.left, rng, n_directions, n_angles)
        right = _movers(space.right, p.right, rng, n_directions, n_angles)
        for ml, rl in left:
            for mr, rr in right:
                best = max(best, _best_angle(lambda th: quotient(*_mix(ml, rl, mr, rr, th)), n_angles))
        return best
    for move, reach in _movers(space, p, rng, n_directions, n_angles):
        best = max(best, quotient(move, reach))
    return best


def _mix(ml, rl, mr, rr, th):
    c, s = math.cos(th), math.sin(th)
    reach = min(rl / c if c > 1e-15 else math.inf, rr / s if s > 1e-15 else math.inf)
    return (lambda h: Pair(ml(h * c), mr(h * s))), reach


def _best_angle(q, n: int, iterations: int = 40) -> float:
    """Max of ``q`` on ``[0, pi/2]``: grid search, then golden section."""
    grid = np.linspace(0.0, 0.5 * math.pi, n)
    vals = [q(float(t)) for t in grid]
    k = int(np.argmax(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, n - 1)]
    best = vals[k]
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = hi - g * (hi - lo), lo + g * (hi - lo)
    qa, qb = q(a), q(b)
    for _ in range(iterations):
        if qa < qb:
            lo, a, qa = a, b, qb
            b = lo + g * (hi - lo)
            qb = q(b)
        else:
            hi, b, qb = b, a, qa
            a = hi - g * (hi - lo)
            qa = q(a)
    return max(best, qa, qb)


def check_gradient_monotonicity(space: Space, f: AffineFunction, n_geodesics: int = 1000, seed=0) -> float:
    """Smallest ``|grad_y f| - |grad_x f|`` for ``y`` inside a geodesic leaving ``x``.

    On CAT spaces the absolute gradient of an affine function never drops
    along a geodesic, so the result should be nonnegative.
    """
    _check_space(space, f)
    rng = np.random.default_rng(seed)
    pts = space.sample_points(2 * n_geodesics, rng)
    ts = rng.uniform(0.0, 1.0, size=n_geodesics)
    worst = math.inf
    for k in range(n_geodesics):
        g = space.geodesic(pts[2 * k], pts[2 * k + 1])
        t = float(ts[k]) if 0.0 < ts[k] < 1.0 else 0.5
        gap = _gradient(space, f.params, g(t)) - _gradient(space, f.params, g.start)
        worst = min(worst, gap)
    return worst


def _movers(space, p, rng, n_directions, n_angles):
    """Unit-speed rays out of ``p``: pairs (h -> point at parameter h, reach)."""
    if isinstance(space, MetricGraph):
        length_of = space.lengths
        v = space.vertex_at(p)
        out = []
        if v is None:
            e, s = p
            out.append((lambda h, e=e, s=s: GraphPoint(e, max(s - h, 0.0)), s))
            out.append((lambda h, e=e, s=s: GraphPoint(e, min(s + h, length_of[e])), length_of[e] - s))
            return out
        for _, e in space.adjacency[v]:
            if space.edges[e][0] == v:
                out.append((lambda h, e=e: GraphPoint(e, min(h, length_of[e])), length_of[e]))
            else:
                out.append((lambda h, e=e: GraphPoint(e, max(length_of[e] - h, 0.0)), length_of[e]))
        return out
    if isinstance(space, EuclideanSpace):
        n = space.dimension
        dirs = [np.eye(n)[i] * s for i in range(n) for s in (1.0, -1.0)]
        if n > 1:
            raw = rng.normal(size=(n_directions, n))
            dirs.extend(raw / np.linalg.norm(raw, axis=1, keepdims=True))
        base = np.asarray(p)
        return [
            (lambda h, d=d: tuple(float(x) for x in base + h * d), math.inf)
            for d in dirs
        ]
    left = _movers(space.left, p.left, rng, n_directions, n_angles)
    right = _movers(space.right, p.right, rng, n_directions, n_angles)
    angles = np.linspace(0.0, 0.5 * math.pi, n_angles)
    return [_mix(ml, rl, mr, rr, float(th)) for ml, rl in left for mr, rr in right for th in angles]


def directional_slopes(graph: MetricGraph, f: AffineFunction, vertex) -> dict[int, float]:
    """Slope of ``f`` along each edge leaving ``vertex``, keyed by edge id."""
    if not isinstance(graph, MetricGraph):
        raise TypeError("directional slopes are defined at graph vertices")
    _check_space(graph, f)
    v = graph.vertex_index(vertex)
    slopes = edge_slopes(graph, f.params)
    return {e: float(s) for e, s in sorted(_outgoing(graph, slopes, v).items())}


# --------------------------------------------------------------------------
# the sampling oracle


def affine_deviation(space: Space, f: Callable, p, q, ts: Sequence[float]) -> float:
    """Largest gap between ``f`` on the geodesic ``pq`` and linear interpolation."""
    g = space.geodesic(p, q)
    fp, fq = f(g.start), f(g.end)
    worst = 0.0
    for t in ts:
        worst = max(worst, abs(f(g(t)) - ((1.0 - t) * fp + t * fq)))
    return worst


def check_affine(
    space: Space,
    f: Callable,
    n_geodesics: int = 1000,
    seed=0,
    n_interior: int = 5,
) -> float:
    """Max deviation from affinity of ``f`` along randomly sampled geodesics.

    ``f`` is any callable on points, so the check also applies to functions
    that are not :class:`AffineFunction` instances.
    """
    rng = np.random.default_rng(seed)
    pts = space.sample_points(2 * n_geodesics, rng)
    grid = [(i + 1) / (n_interior + 1) for i in range(n_interior)]
    extra = rng.uniform(0.0, 1.0, size=n_geodesics)
    worst = 0.0
    for k in range(n_geodesics):
        ts = grid + [float(extra[k])]
        worst = max(worst, affine_deviation(space, f, pts[2 * k], pts[2 * k + 1], ts))
    return worst


def describe(f: AffineFunction) -> str:
    space = f.space
    if isinstance(space, MetricGraph):
        slopes = ", ".join(f"{float(s):.6g}" for s in edge_slopes(space, f.params))
        return f"edge slopes [{slopes}]"
    if isinstance(space, EuclideanSpace):
        coef = ", ".join(f"{float(c):.6g}" for c in f.params[:-1])
        return f"coefficients [{coef}] + {float(f.params[-1]):.6g}"
    return f"({describe(f.left)}) + ({describe(f.right)})"
