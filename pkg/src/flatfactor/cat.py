"""Sampled CAT(kappa) comparison checks.

A triangle ``xyz`` is compared with a triangle of the same side lengths in
the model plane of curvature ``kappa``.  For points ``m`` on the side ``yz``
the distance ``d(x, m)`` may not exceed the distance between the
corresponding model points.

All model formulas are written in half-angle form.  The textbook laws of
cosines lose every significant digit on thin triangles, which is exactly
where degenerate geodesic triangles in graphs live.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .results import CheckResult
from .spaces import Space

__all__ = [
    "check_bruhat_tits",
    "check_cat",
    "comparison_distance",
    "model_distance",
]

# Triangles whose perimeter is within this relative margin of 2*pi/sqrt(kappa)
# are treated as oversized: their comparison triangle is a great circle and
# the side-point comparison is ill-conditioned.
PERIMETER_MARGIN = 1e-9


def _scale(kappa: float) -> float:
    return math.sqrt(abs(kappa))


def model_distance(kappa: float, a: float, b: float, angle: float) -> float:
    """Side opposite ``angle`` in the model plane, given the adjacent sides."""
    if a < 0 or b < 0:
        raise ValueError("side lengths must be nonnegative")
    if not 0.0 <= angle <= math.pi:
        raise ValueError("angle must lie in [0, pi]")
    h = math.sin(0.5 * angle) ** 2
    if kappa == 0:
        return math.sqrt((a - b) ** 2 + 4.0 * a * b * h)
    k = _scale(kappa)
    if kappa > 0:
        if max(a, b) * k > math.pi * (1 + 1e-12):
            raise ValueError("sides longer than pi/sqrt(kappa) leave the model sphere")
        a, b = a * k, b * k
        hav = math.sin(0.5 * (a - b)) ** 2 + math.sin(a) * math.sin(b) * h
        return 2.0 * math.asin(math.sqrt(min(1.0, max(0.0, hav)))) / k
    a, b = a * k, b * k
    half = math.sinh(0.5 * (a - b)) ** 2 + math.sinh(a) * math.sinh(b) * h
    return 2.0 * math.asinh(math.sqrt(max(0.0, half))) / k


def comparison_distance(kappa: float, a: float, b: float, c: float, s: float) -> float:
    """Model distance from the apex to the point at arclength ``s`` on the base.

    The model triangle has apex-to-ends sides ``a`` and ``c`` and base ``b``;
    ``s`` is measured from the end at distance ``a``.
    """
    s1, s2 = s, b - s
    if b <= 0:
        return a
    if kappa == 0:
        return math.sqrt(max(0.0, (s2 * a * a + s1 * c * c) / b - s1 * s2))
    k = _scale(kappa)
    a, b, c, s1, s2 = a * k, b * k, c * k, s1 * k, s2 * k
    if kappa > 0:
        one_minus_cos = (
            math.sin(s2) * 2.0 * math.sin(0.5 * a) ** 2
            + math.sin(s1) * 2.0 * math.sin(0.5 * c) ** 2
        ) / math.sin(b) - 2.0 * math.sin(0.5 * s2) * math.sin(0.5 * s1) / math.cos(0.5 * b)
        return 2.0 * math.asin(math.sqrt(min(1.0, max(0.0, 0.5 * one_minus_cos)))) / k
    cosh_minus_one = (
        math.sinh(s2) * 2.0 * math.sinh(0.5 * a) ** 2
        + math.sinh(s1) * 2.0 * math.sinh(0.5 * c) ** 2
    ) / math.sinh(b) - 2.0 * math.sinh(0.5 * s2) * math.sinh(0.5 * s1) / math.cosh(0.5 * b)
    return 2.0 * math.asinh(math.sqrt(max(0.0, 0.5 * cosh_minus_one))) / k


def _flat_violation_exact(space: Space, x, y, z, m, t: float) -> Optional[float]:
    """``d(x, m) - comparison`` at kappa = 0 with the sign decided exactly."""
    sq = space.squared_distance_exact
    d2 = sq(x, m)
    if d2 is None:
        return None
    s1, s2 = space.exact_distance(y, m), space.exact_distance(m, z)
    if s1 is not None and s2 is not None:
        b = s1 + s2
        if b == 0:
            model2 = sq(x, y)
        else:
            model2 = (s2 * sq(x, y) + s1 * sq(x, z)) / b - s1 * s2
    else:
        a2, b2, c2 = sq(x, y), sq(y, z), sq(x, z)
        T = Fraction(t)
        model2 = (1 - T) * a2 + T * c2 - T * (1 - T) * b2
    diff = d2 - model2
    if diff == 0:
        return 0.0
    denom = math.sqrt(float(d2)) + math.sqrt(max(0.0, float(model2)))
    return float(diff) / denom


def check_cat(
    space: Space,
    kappa: float,
    n_triangles: int = 1000,
    n_side_points: int = 3,
    seed=0,
    metric: Optional[Callable] = None,
) -> CheckResult:
    """Largest ``d(x, m) - d_model(x', m')`` over sampled triangles and side points.

    ``m`` runs over an even grid of interior points of the geodesic ``yz``.
    For ``kappa > 0`` triangles with perimeter at least ``2 pi / sqrt(kappa)``
    are skipped.  ``metric`` replaces the distance of ``space`` (used to
    probe a quotient pseudometric); geodesics are still taken in ``space``
    and the side point is placed by its parameter.

    The result carries ``extra["triangles"]``, the number of triangles that
    survived the perimeter filter.
    """
    rng = np.random.default_rng(seed)
    dist = space.distance if metric is None else metric
    exact = metric is None and kappa == 0
    limit = 2.0 * math.pi / math.sqrt(kappa) if kappa > 0 else math.inf
    ts = [(i + 1) / (n_side_points + 1) for i in range(n_side_points)]
    pts = space.sample_points(3 * n_triangles, rng)
    worst, witness, used = -math.inf, None, 0
    for i in range(n_triangles):
        x, y, z = pts[3 * i : 3 * i + 3]
        g = space.geodesic(y, z)
        y, z = g.start, g.end
        a, b, c = dist(x, y), dist(y, z), dist(x, z)
        if a + b + c >= limit * (1 - PERIMETER_MARGIN):
            continue
        used += 1
        for t in ts:
            m = g(t)
            v = _flat_violation_exact(space, x, y, z, m, t) if exact else None
            if v is None:
                v = dist(x, m) - comparison_distance(kappa, a, b, c, t * b)
            if v > worst:
                worst, witness = v, {"triangle": (x, y, z), "t": t, "point": m}
    if used == 0:
        worst = 0.0
    return CheckResult(worst, witness, n_triangles, extra={"triangles": used})


def check_bruhat_tits(space: Space, n_quadruples: int = 1000, seed=0) -> CheckResult:
    """Smallest ``d(x,y)^2/2 + d(x,z)^2/2 - d(y,z)^2/4 - d(x,m)^2`` with ``m`` the midpoint of ``yz``."""
    rng = np.random.default_rng(seed)
    pts = space.sample_points(3 * n_quadruples, rng)
    worst, witness = math.inf, None
    for i in range(n_quadruples):
        x, y, z = pts[3 * i : 3 * i + 3]
        m = space.midpoint(y, z)
        sq = [space.squared_distance_exact(p, q) for p, q in ((x, y), (x, z), (y, z), (x, m))]
        s1, s2 = space.exact_distance(y, m), space.exact_distance(m, z)
        if s1 is not None and s2 is not None and s1 + s2 > 0:
            # graph midpoints are rounded to a float offset on the right edge;
            # compare against the Stewart bound at the point actually used
            b = s1 + s2
            slack = float((s2 * sq[0] + s1 * sq[1]) / b - s1 * s2 - sq[3])
        elif all(v is not None for v in sq):
            slack = float(sq[0] / 2 + sq[1] / 2 - sq[2] / 4 - sq[3])
        else:
            d = [space.distance(p, q) ** 2 for p, q in ((x, y), (x, z), (y, z), (x, m))]
            slack = 0.5 * d[0] + 0.5 * d[1] - 0.25 * d[2] - d[3]
        if slack < worst:
            worst, witness = slack, (x, y, z, m)
    return CheckResult(worst, witness, n_quadruples)
