"""The evaluation map, the reduced pseudometric and the embedding ``X -> Y x H``.

For a normalized affine map ``F: X -> H`` the function

    d~(y, z) = sqrt(d(y, z)**2 - |F(y) - F(z)|**2)

is a pseudometric on a CAT(kappa) space.  ``Y`` is the metric quotient of
``X`` by ``d~`` and ``x -> ([x], F(x))`` is an isometric embedding of ``X``
into ``Y x H``.  Everything here is checked on finite samples.

The radicand is evaluated in exact rational arithmetic whenever the space
has rational squared distances; in floating point it loses about half the
significant digits, which is far more than the verifiers can tolerate.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Sequence

import numpy as np

from . import _rational
from .affine import AffineFunction, affine_basis, lipschitz_norm, linear_combination
from .hilbert import HilbertModel, NotHilbert, build_hilbert_model, polarization_inner_product
from .spaces import (
    Curvature,
    EuclideanSpace,
    MetricGraph,
    NormedProduct,
    Pair,
    Space,
    point_to_json,
)
from .results import CheckResult
from .tolerances import DEFAULT, Tolerances
from .unionfind import UnionFind

__all__ = [
    "AffineForm",
    "CheckResult",
    "EmbeddingReport",
    "EvaluationMap",
    "FactorizationError",
    "LipschitzViolation",
    "QuotientView",
    "SymbolicQuotient",
    "TildeMetric",
    "Verdict",
    "check_bruhat_tits_quotient",
    "check_geodesic_additivity",
    "check_isometry_identity",
    "check_lipschitz",
    "check_normalized",
    "check_pseudometric",
    "embed",
    "evaluation_map",
    "factor_affine_function",
    "jsonable",
    "quotient_classes",
    "symbolic_quotient",
    "tilde_distance",
]

log = logging.getLogger(__name__)

REPORT_SCHEMA = "flatfactor/report-v1"


class LipschitzViolation(ArithmeticError):
    """``|F(y) - F(z)|`` exceeds ``d(y, z)``: F is not 1-Lipschitz."""

    def __init__(self, y, z, radicand: float):
        super().__init__(f"negative radicand {radicand:.6g}: F is not 1-Lipschitz")
        self.y, self.z, self.radicand = y, z, radicand


class FactorizationError(ArithmeticError):
    """An affine function failed to factor through the flat factor."""


# --------------------------------------------------------------------------
# the evaluation map


class EvaluationMap:
    """``F(x) = A @ phi(x)`` with ``phi_i(x) = f_i(x) - f_i(o)``.

    ``form`` is the exact matrix ``A^T A``, used to evaluate
    ``|F(y) - F(z)|**2`` without roundoff.  When omitted it is computed from
    the float entries of ``A`` (exactly, as rationals).
    """

    def __init__(self, space: Space, functions: Sequence[AffineFunction], basepoint=None, coords=None, form=None):
        self.space = space
        self.functions = list(functions)
        self.basepoint = space.basepoint if basepoint is None else space.check_point(basepoint)
        k = len(self.functions)
        self._offsets = [f.exact(self.basepoint) for f in self.functions]
        if coords is None:
            self.coords = np.eye(k)
            self.form = form if form is not None else [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
        else:
            self.coords = np.asarray(coords, dtype=float).reshape(-1, k) if k else np.zeros((0, 0))
            if form is None:
                a = [[Fraction(float(x)) for x in row] for row in self.coords]
                form = [
                    [sum((a[r][i] * a[r][j] for r in range(len(a))), Fraction(0)) for j in range(k)]
                    for i in range(k)
                ]
            self.form = form
        self._identity = _rational.is_identity(self.form) if k else True

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    def phi(self, x) -> list:
        return [f.exact(x) - c for f, c in zip(self.functions, self._offsets)]

    def __call__(self, x) -> np.ndarray:
        if not self.functions:
            return np.zeros(self.dim)
        return self.coords @ np.array([float(v) for v in self.phi(x)])

    def delta_squared(self, dphi) -> Fraction:
        """``|F(y) - F(z)|**2`` from ``phi(y) - phi(z)``."""
        if self._identity:
            return sum((v * v for v in dphi), Fraction(0))
        return _rational.quadratic_form(self.form, dphi)

    def component(self, v) -> AffineFunction:
        """The affine function ``x -> <F(x), v>``."""
        v = np.asarray(v, dtype=float)
        w = self.coords.T @ v
        f = linear_combination(w, self.functions)
        return f - f.exact(self.basepoint)

    def project(self, rows: Sequence[int]) -> "EvaluationMap":
        """Compose with the orthogonal projection onto the given coordinates."""
        rows = list(rows)
        sub = self.coords[rows]
        form = None
        if np.array_equal(self.coords, np.eye(len(self.functions))):
            k = len(self.functions)
            form = [[Fraction(int(i == j and i in rows)) for j in range(k)] for i in range(k)]
        return EvaluationMap(self.space, self.functions, self.basepoint, sub, form)


def evaluation_map(space: Space, model: HilbertModel, o=None) -> EvaluationMap:
    """Orthonormal coordinates of ``x -> (f -> f(x) - f(o))``."""
    if model.space is not space:
        raise ValueError("model was built on a different space")
    if model.dim == 0:
        return EvaluationMap(space, [], o, np.zeros((0, 0)), [])
    form = model.inverse_gram_exact
    return EvaluationMap(space, model.basis, o, model.whitening.T, form)


# --------------------------------------------------------------------------
# the reduced pseudometric


class TildeMetric:
    """``d~`` for an affine map ``F``, with a clamp for roundoff-sized negatives."""

    def __init__(self, space: Space, F: EvaluationMap, clamp_tol: float = 1e-9):
        if F.space is not space:
            raise ValueError("evaluation map lives on a different space")
        self.space = space
        self.F = F
        self.clamp_tol = clamp_tol
        self._phi_cache: dict = {}
        self._exact_form = all(isinstance(x, Fraction) for row in F.form for x in row)

    def _phi(self, x):
        try:
            return self._phi_cache[x]
        except KeyError:
            if len(self._phi_cache) > 200_000:
                self._phi_cache.clear()
            val = self._phi_cache[x] = self.F.phi(x)
            return val

    def radicand(self, y, z):
        """``d(y, z)**2 - |F(y) - F(z)|**2``, exact when the space allows it."""
        y, z = self.space.check_point(y), self.space.check_point(z)
        dphi = [a - b for a, b in zip(self._phi(y), self._phi(z))]
        fsq = self.F.delta_squared(dphi)
        if self._exact_form:
            dsq = self.space.squared_distance_exact(y, z)
            if dsq is not None:
                return dsq - fsq
        d = self.space.distance(y, z)
        return d * d - float(fsq)

    def squared(self, y, z, strict: bool = True):
        """Clamped ``d~(y, z)**2`` and whether the clamp fired.

        With ``strict`` a radicand below ``-clamp_tol * d**2`` raises
        :class:`LipschitzViolation`.
        """
        r = self.radicand(y, z)
        if r >= 0:
            return r, False
        if strict:
            d = self.space.distance(y, z)
            if r < -self.clamp_tol * d * d:
                raise LipschitzViolation(y, z, float(r))
        return 0, True

    def distance(self, y, z, strict: bool = True) -> float:
        r, _ = self.squared(y, z, strict)
        return math.sqrt(float(r))

    __call__ = distance

    def is_violation(self, y, z, r) -> bool:
        d = self.space.distance(y, z)
        return r < -self.clamp_tol * d * d


def tilde_distance(tm: TildeMetric, y, z) -> float:
    return tm.distance(y, z)


# --------------------------------------------------------------------------
# sampled checks


def _rng(seed):
    return np.random.default_rng(seed)


def check_lipschitz(F: EvaluationMap, n_pairs: int = 10000, seed=0) -> CheckResult:
    """Max of ``|F(y) - F(z)| - d(y, z)`` over sampled pairs (should be <= 0)."""
    space = F.space
    pts = space.sample_points(2 * n_pairs, _rng(seed))
    worst, witness = -math.inf, None
    for y, z in zip(pts[::2], pts[1::2]):
        gap = float(np.linalg.norm(F(y) - F(z))) - space.distance(y, z)
        if gap > worst:
            worst, witness = gap, (y, z)
    return CheckResult(worst, witness, n_pairs)


def check_normalized(space: Space, F: EvaluationMap, n_directions: int = 100, n_pairs: int = 1000, seed=0) -> CheckResult:
    """``max |(|F^v|) - 1|`` over random unit vectors ``v``.

    The norm of ``F^v`` is computed exactly; a sampled difference quotient
    must additionally stay below ``1``.
    """
    if F.dim == 0:
        raise ValueError("normalization needs a map into a nonzero Hilbert space")
    rng = _rng(seed)
    dirs = rng.normal(size=(n_directions, F.dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    worst, witness = 0.0, None
    for v in dirs:
        dev = abs(lipschitz_norm(space, F.component(v)) - 1.0)
        if dev > worst or witness is None:
            worst, witness = dev, v
    pts = space.sample_points(2 * n_pairs, rng)
    diffs, dists = [], []
    for y, z in zip(pts[::2], pts[1::2]):
        d = space.distance(y, z)
        if d > 0:
            diffs.append(F(y) - F(z))
            dists.append(d)
    sampled = 0.0
    if diffs:
        q = np.abs(np.asarray(diffs) @ dirs.T) / np.asarray(dists)[:, None]
        sampled = float(q.max())
    if sampled - 1.0 > worst:
        worst = sampled - 1.0
    return CheckResult(worst, None if witness is None else witness.tolist(), n_directions, extra={"sampled_max_quotient": sampled})


def check_pseudometric(tm: TildeMetric, n_triples: int = 10000, seed=0) -> CheckResult:
    """Smallest triangle-inequality slack of ``d~`` over sampled triples."""
    pts = tm.space.sample_points(3 * n_triples, _rng(seed))
    worst, witness, clamped = math.inf, None, 0
    for i in range(n_triples):
        x, y, z = pts[3 * i : 3 * i + 3]
        vals = []
        for a, b in ((x, y), (y, z), (x, z)):
            r, c = tm.squared(a, b, strict=False)
            clamped += c
            vals.append(math.sqrt(float(r)))
        a, b, c = vals
        slack = min(a + b - c, a + c - b, b + c - a)
        if slack < worst:
            worst, witness = slack, (x, y, z)
    return CheckResult(worst, witness, n_triples, clamped)


def check_geodesic_additivity(tm: TildeMetric, n_geodesics: int = 1000, seed=0, n_interior: int = 3) -> CheckResult:
    """Max of ``|d~(y, z) - d~(y, m) - d~(m, z)|`` for ``m`` on a geodesic ``yz``."""
    rng = _rng(seed)
    pts = tm.space.sample_points(2 * n_geodesics, rng)
    worst, witness = 0.0, None
    for k in range(n_geodesics):
        g = tm.space.geodesic(pts[2 * k], pts[2 * k + 1])
        y, z = g.start, g.end
        whole = tm.distance(y, z, strict=False)
        ts = [0.5] + list(rng.uniform(0.0, 1.0, size=max(0, n_interior - 1)))
        for t in ts:
            m = g(float(t))
            dev = abs(whole - tm.distance(y, m, strict=False) - tm.distance(m, z, strict=False))
            if dev > worst or witness is None:
                worst, witness = dev, (y, z, m)
    return CheckResult(worst, witness, n_geodesics)


def check_isometry_identity(tm: TildeMetric, n_pairs: int = 10000, seed=0) -> CheckResult:
    """Max of ``|d**2 - d~**2 - |dF|**2|`` relative to ``max(1, d**2)``.

    Computed from the floating-point outputs of the three maps.  Also counts
    how often the clamp fired and how often the radicand was a genuine
    1-Lipschitz failure.
    """
    space, F = tm.space, tm.F
    pts = space.sample_points(2 * n_pairs, _rng(seed))
    worst, witness, clamped, violations = 0.0, None, 0, 0
    for y, z in zip(pts[::2], pts[1::2]):
        r = tm.radicand(y, z)
        if r < 0:
            clamped += 1
            violations += tm.is_violation(y, z, r)
        dt2 = max(float(r), 0.0)
        d = space.distance(y, z)
        df = F(y) - F(z)
        dev = abs(d * d - dt2 - float(df @ df)) / max(1.0, d * d)
        if dev > worst or witness is None:
            worst, witness = dev, (y, z)
    return CheckResult(worst, witness, n_pairs, clamped, violations)


def check_bruhat_tits_quotient(tm: TildeMetric, n_quadruples: int = 10000, seed=0) -> CheckResult:
    """Smallest slack of the midpoint CAT(0) inequality for ``d~``.

    The midpoint ``m`` of ``y`` and ``z`` is taken in ``X`` and pushed to
    the quotient.
    """
    space = tm.space
    pts = space.sample_points(3 * n_quadruples, _rng(seed))
    worst, witness = math.inf, None
    for i in range(n_quadruples):
        x, y, z = pts[3 * i : 3 * i + 3]
        m = space.midpoint(y, z)
        sq = [tm.squared(a, b, strict=False)[0] for a, b in ((x, y), (x, z), (y, z), (x, m))]
        if all(isinstance(v, (Fraction, int)) for v in sq):
            slack = float(Fraction(sq[0]) / 2 + Fraction(sq[1]) / 2 - Fraction(sq[2]) / 4 - sq[3])
        else:
            slack = 0.5 * float(sq[0]) + 0.5 * float(sq[1]) - 0.25 * float(sq[2]) - float(sq[3])
        if slack < worst:
            worst, witness = slack, (x, y, z, m)
    return CheckResult(worst, witness, n_quadruples)


# --------------------------------------------------------------------------
# the quotient Y


@dataclass
class QuotientView:
    """Finite view of ``Y``: classes of sample points with ``d~ <= tol``."""

    points: list
    labels: list
    classes: list
    representatives: list
    distances: np.ndarray
    well_definedness: float
    tol: float

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def class_of(self, i: int) -> int:
        return self.labels[i]


def quotient_classes(tm: TildeMetric, points: Sequence, tol: float = 1e-9) -> QuotientView:
    points = [tm.space.check_point(p) for p in points]
    n = len(points)
    dt = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dt[i, j] = dt[j, i] = tm.distance(points[i], points[j], strict=False)
    uf = UnionFind(n)
    for i in range(n):
        for j in range(i + 1, n):
            if dt[i, j] <= tol:
                uf.union(i, j)
    classes = uf.groups()
    labels = [0] * n
    for c, members in enumerate(classes):
        for i in members:
            labels[i] = c
    reps = [members[0] for members in classes]
    well = 0.0
    for members in classes:
        for i in members[1:]:
            well = max(well, float(np.max(np.abs(dt[i] - dt[members[0]]))))
    return QuotientView(points, labels, classes, reps, dt[np.ix_(reps, reps)], well, tol)


class SymbolicQuotient:
    """The expected ``Y`` of an l2 product: the product of its non-flat leaves.

    Euclidean factors and path graphs (intervals) are flat; every other
    graph has no nonconstant affine function and survives in ``Y``.
    """

    def __init__(self, space: Space):
        self.space = space
        self.leaves = list(self._leaves(space, ()))

    def _leaves(self, space, path):
        if isinstance(space, EuclideanSpace):
            yield path, space, True
        elif isinstance(space, MetricGraph):
            yield path, space, len(affine_basis(space)) > 0
        else:
            yield from self._leaves(space.left, path + (0,))
            yield from self._leaves(space.right, path + (1,))

    @staticmethod
    def _component(p, path):
        for step in path:
            p = p[step]
        return p

    def squared_distance(self, p, q) -> Fraction:
        total = Fraction(0)
        for path, leaf, flat in self.leaves:
            if not flat:
                total += leaf.squared_distance_exact(self._component(p, path), self._component(q, path))
        return total

    def distance(self, p, q) -> float:
        return math.sqrt(float(self.squared_distance(p, q)))

    def fiber_partner(self, p, rng):
        """A point with the same non-flat components and resampled flat ones."""
        return self._rebuild(self.space, p, (), rng)

    def _rebuild(self, space, p, path, rng):
        if isinstance(space, (EuclideanSpace, MetricGraph)):
            flat = next(f for q, _, f in self.leaves if q == path)
            return space.sample_points(1, rng)[0] if flat else p
        return Pair(
            self._rebuild(space.left, p.left, path + (0,), rng),
            self._rebuild(space.right, p.right, path + (1,), rng),
        )


def symbolic_quotient(space: Space) -> Optional[SymbolicQuotient]:
    """The symbolic ``Y``, or None when the space has an l^p factor with p != 2."""

    def ok(s):
        if isinstance(s, NormedProduct) and s.p != 2.0:
            return False
        if isinstance(s, (EuclideanSpace, MetricGraph)):
            return True
        return ok(s.left) and ok(s.right)

    return SymbolicQuotient(space) if ok(space) else None


# --------------------------------------------------------------------------
# factoring affine functions through H


@dataclass(frozen=True)
class AffineForm:
    """``xi -> <coefficients, xi> + offset`` on the coordinate model of ``H``."""

    coefficients: np.ndarray
    offset: float
    residual: float = 0.0

    def __call__(self, xi) -> float:
        return float(np.dot(self.coefficients, xi)) + self.offset


def factor_affine_function(f: AffineFunction, F: EvaluationMap, model: Optional[HilbertModel] = None, o=None, n_check: int = 64, seed=0, tol: float = 1e-9) -> AffineForm:
    """Write ``f = f_hat o F`` with ``f_hat(xi) = <c, xi> + f(o)``.

    ``c`` holds the coordinates of ``[f]`` in the orthonormal basis; it is
    recovered by least squares on sampled points and then checked on a
    second, independent sample.
    """
    space = F.space
    if f.space is not space:
        raise ValueError("function and evaluation map live on different spaces")
    if model is not None and model.space is not space:
        raise ValueError("model was built on a different space")
    o = F.basepoint if o is None else space.check_point(o)
    if o != F.basepoint:
        F = EvaluationMap(space, F.functions, o, F.coords, F.form)
    rng = _rng(seed)
    offset = f.exact(o)
    fit_pts = space.sample_points(max(n_check, 4 * F.dim + 8), rng)
    check_pts = space.sample_points(n_check, rng)
    if F.dim:
        A = np.array([F(x) for x in fit_pts])
        b = np.array([float(f.exact(x) - offset) for x in fit_pts])
        c, *_ = np.linalg.lstsq(A, b, rcond=None)
    else:
        c = np.zeros(0)
    form = AffineForm(c, float(offset))
    residual = max(abs(f(x) - form(F(x))) for x in check_pts)
    if residual > tol:
        raise FactorizationError(f"affine function does not factor through H (residual {residual:.3g})")
    return AffineForm(c, float(offset), residual)


# --------------------------------------------------------------------------
# the end-to-end pipeline


@dataclass
class Verdict:
    name: str
    passed: Optional[bool]
    worst_slack: Optional[float]
    witness: Any = None
    note: str = ""

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "pass": self.passed,
            "worst_slack": _json_float(self.worst_slack),
            "witness": self.witness,
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class EmbeddingReport:
    space: dict
    dim_A: int
    gram: list
    verdicts: list
    quotient: dict
    status: str
    scope: dict
    seed: int
    samples: int

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def verdict(self, name: str) -> Verdict:
        return next(v for v in self.verdicts if v.name == name)

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "space": self.space,
            "dim_A": self.dim_A,
            "gram": [[_json_float(x) for x in row] for row in self.gram],
            "status": self.status,
            "scope": self.scope,
            "seed": self.seed,
            "samples": self.samples,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "quotient": self.quotient,
        }


def _json_float(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def jsonable(space: Space, item):
    """Convert witnesses (points, tuples of points, dicts, arrays) to JSON values."""
    if item is None or isinstance(item, (bool, str, int)):
        return item
    if isinstance(item, (float, np.floating, Fraction)):
        return _json_float(item)
    if isinstance(item, np.ndarray):
        return [jsonable(space, x) for x in item.tolist()]
    if isinstance(item, dict):
        return {str(k): jsonable(space, v) for k, v in item.items()}
    try:
        return point_to_json(space, space.check_point(item))
    except Exception:
        pass
    if isinstance(item, (list, tuple)):
        return [jsonable(space, x) for x in item]
    return repr(item)


def embed(
    space: Space,
    o=None,
    seed: int = 42,
    samples: int = 10000,
    tolerances: Tolerances = DEFAULT,
    quotient_samples: int = 40,
) -> EmbeddingReport:
    """Run the whole construction on ``space`` and collect every verdict.

    Failures never raise: a broken parallelogram law or a non-Lipschitz
    evaluation map yields status ``NOT_IN_THEOREM_SCOPE`` with a witness.
    """
    tol = tolerances
    o = space.basepoint if o is None else space.check_point(o)
    seeds = [[seed, k] for k in range(16)]
    scope = {"cat0": space.curvature_validity(0.0).value}
    if isinstance(space, MetricGraph) and not space.is_tree():
        scope["girth"] = space.girth()
        scope["kappa_bound"] = (2 * math.pi / space.girth()) ** 2
    basis = affine_basis(space, o)
    verdicts: list[Verdict] = []

    def report(status, gram, quotient=None):
        return EmbeddingReport(
            space=space.to_dict(),
            dim_A=len(basis),
            gram=[[float(x) for x in row] for row in gram],
            verdicts=verdicts,
            quotient=quotient or {"classes": None, "sample_size": 0},
            status=status,
            scope=scope,
            seed=seed,
            samples=samples,
        )

    try:
        model = build_hilbert_model(space, basis, tol.parallelogram)
    except NotHilbert as exc:
        log.info("not a Hilbert space: %s", exc)
        verdicts.append(
            Verdict("hilbert", False, exc.residual, {"basis_indices": list(exc.witness)}, str(exc))
        )
        gram = [[polarization_inner_product(space, f, g) for g in basis] for f in basis]
        return report("NOT_IN_THEOREM_SCOPE", gram)
    verdicts.append(Verdict("hilbert", True, model.max_parallelogram_residual))

    F = evaluation_map(space, model, o)
    tm = TildeMetric(space, F, tol.clamp)

    res = check_lipschitz(F, samples, seeds[0]) if F.dim else CheckResult(0.0, None, 0)
    lipschitz_ok = res.worst <= tol.lipschitz
    verdicts.append(Verdict("lipschitz", lipschitz_ok, res.worst, jsonable(space, res.witness)))
    if not lipschitz_ok:
        return report("NOT_IN_THEOREM_SCOPE", model.gram)

    if F.dim:
        res = check_normalized(space, F, 100, min(samples, 1000), seeds[1])
        verdicts.append(Verdict("normalized", res.worst <= tol.normalized, res.worst, res.witness))
    else:
        verdicts.append(Verdict("normalized", None, None, note="H is zero-dimensional"))

    res = check_pseudometric(tm, samples, seeds[2])
    verdicts.append(Verdict("pseudometric", res.worst >= -tol.pseudometric, res.worst, jsonable(space, res.witness)))

    res = check_geodesic_additivity(tm, max(1, samples // 10), seeds[3])
    verdicts.append(Verdict("additivity", res.worst <= tol.additivity, res.worst, jsonable(space, res.witness)))

    res = check_isometry_identity(tm, samples, seeds[4])
    verdicts.append(
        Verdict(
            "isometry",
            res.worst <= tol.isometry and res.clamped == 0,
            res.worst,
            jsonable(space, res.witness),
            f"clamp activations: {res.clamped}",
        )
    )
    if res.violations:
        return report("NOT_IN_THEOREM_SCOPE", model.gram)

    verdicts.append(_factorization_verdict(space, model, F, tol, seeds[5]))

    quotient = _quotient_summary(space, tm, quotient_samples, tol, seeds[6], verdicts)

    res = check_bruhat_tits_quotient(tm, samples, seeds[7])
    if scope["cat0"] == Curvature.CAT_OK.value:
        verdicts.append(Verdict("bruhat_tits", res.worst >= -tol.bruhat_tits, res.worst, jsonable(space, res.witness)))
    else:
        verdicts.append(
            Verdict("bruhat_tits", None, res.worst, jsonable(space, res.witness), "X is not known to be CAT(0); reported only")
        )

    failed = any(v.passed is False for v in verdicts)
    return report("FAIL" if failed else "PASS", model.gram, quotient)


def _factorization_verdict(space, model, F, tol, seed) -> Verdict:
    rng = _rng(seed)
    worst = 0.0
    for k in range(100):
        coef = rng.normal(size=model.dim)
        f = AffineFunction.constant(space, float(rng.normal()))
        if model.dim:
            f = f + linear_combination(coef, model.basis)
        try:
            form = factor_affine_function(f, F, model, n_check=32, seed=[*seed, k], tol=math.inf)
        except FactorizationError:  # pragma: no cover - tol is infinite
            raise
        worst = max(worst, form.residual)
    return Verdict("factorization", worst <= tol.factorization, worst)


def _quotient_summary(space, tm, n, tol, seed, verdicts) -> dict:
    rng = _rng(seed)
    pts = space.sample_points(n, rng)
    sym = symbolic_quotient(space)
    if sym is not None:
        pts = pts + [sym.fiber_partner(p, rng) for p in pts]
    view = quotient_classes(tm, pts, tol.quotient)
    verdicts.append(
        Verdict("quotient_well_defined", view.well_definedness <= 2 * tol.quotient, view.well_definedness)
    )
    summary = {
        "classes": view.n_classes,
        "sample_size": len(pts),
        "well_definedness": view.well_definedness,
    }
    if sym is not None:
        err = 0.0
        for a, i in enumerate(view.representatives):
            for b, j in enumerate(view.representatives):
                err = max(err, abs(view.distances[a, b] - sym.distance(pts[i], pts[j])))
        expected = len({_sym_key(sym, p) for p in pts})
        summary["symbolic_classes"] = expected
        summary["symbolic_max_error"] = err
        verdicts.append(
            Verdict("quotient_reconstruction", err <= tol.quotient and expected == view.n_classes, err)
        )
    return summary


def _sym_key(sym: SymbolicQuotient, p):
    return tuple(
        sym._component(p, path) for path, _, flat in sym.leaves if not flat
    )
