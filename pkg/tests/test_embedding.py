import json
import math

import numpy as np
import pytest

from flatfactor.affine import AffineFunction, affine_basis, linear_combination
from flatfactor.catalog import cat0_catalog, euclidean, normed_product, path_graph, product, tripod
from flatfactor.embedding import (
    EvaluationMap,
    FactorizationError,
    LipschitzViolation,
    TildeMetric,
    check_bruhat_tits_quotient,
    check_geodesic_additivity,
    check_isometry_identity,
    check_lipschitz,
    check_normalized,
    check_pseudometric,
    embed,
    evaluation_map,
    factor_affine_function,
    quotient_classes,
    symbolic_quotient,
)
from flatfactor.hilbert import build_hilbert_model
from flatfactor.spaces import Pair


def pipeline(space, o=None):
    model = build_hilbert_model(space)
    F = evaluation_map(space, model, o)
    return model, F, TildeMetric(space, F)


class TestEvaluationMap:
    def test_product_coordinate(self):
        s = product(tripod(), euclidean(1))
        _, F, _ = pipeline(s)
        for p in s.sample_points(50, 0):
            assert F(p).tolist() == [p.right[0]]

    def test_euclidean_is_translation(self):
        e = euclidean(3)
        _, F, _ = pipeline(e, (1.0, -2.0, 0.5))
        for p in e.sample_points(30, 1):
            assert np.allclose(F(p), np.array(p) - [1.0, -2.0, 0.5], atol=1e-12)

    def test_tripod_is_zero_dimensional(self):
        g = tripod()
        _, F, tm = pipeline(g)
        assert F.dim == 0 and F(g.vertex_point("t1")).shape == (0,)
        for p, q in zip(*[iter(g.sample_points(100, 2))] * 2):
            assert tm(p, q) == pytest.approx(g.distance(p, q), abs=1e-15)

    def test_one_lipschitz(self):
        for name, (space, dim) in cat0_catalog().items():
            if dim:
                _, F, _ = pipeline(space)
                assert check_lipschitz(F, 2000, 0).worst <= 1e-9, name

    def test_component_is_affine_with_unit_norm(self):
        from flatfactor.affine import lipschitz_norm

        s = product(tripod(), euclidean(2))
        _, F, _ = pipeline(s)
        v = np.array([0.6, 0.8])
        f = F.component(v)
        assert lipschitz_norm(s, f) == pytest.approx(1.0, abs=1e-12)
        for p in s.sample_points(20, 0):
            assert f(p) == pytest.approx(float(F(p) @ v), abs=1e-12)


class TestTildeMetric:
    def test_plane_minus_one_axis(self):
        e = euclidean(2)
        basis = affine_basis(e)
        F = EvaluationMap(e, basis).project([0])
        tm = TildeMetric(e, F)
        assert tm((0.0, 0.0), (3.0, 4.0)) == 4.0

    def test_product_gives_tripod_metric(self):
        s = product(tripod(), euclidean(1))
        _, _, tm = pipeline(s)
        for p, q in zip(*[iter(s.sample_points(400, 3))] * 2):
            assert tm(p, q) == pytest.approx(s.left.distance(p.left, q.left), abs=1e-12)

    def test_strict_mode_raises_on_l4(self):
        s = normed_product(4)
        F = EvaluationMap(s, affine_basis(s))
        tm = TildeMetric(s, F)
        x, y = Pair((0.0,), (0.0,)), Pair((1.0,), (1.0,))
        with pytest.raises(LipschitzViolation) as info:
            tm(x, y)
        assert info.value.radicand == pytest.approx(2 ** 0.5 - 2, abs=1e-12)
        assert tm(x, y, strict=False) == 0.0
        assert tm.squared(x, y, strict=False) == (0, True)

    def test_l4_isometry_check_counts_violations(self):
        s = normed_product(4)
        tm = TildeMetric(s, EvaluationMap(s, affine_basis(s)))
        res = check_isometry_identity(tm, 500, 0)
        assert res.clamped > 0 and res.violations > 0

    def test_isometry_identity_exact(self):
        for name, (space, _) in cat0_catalog().items():
            _, _, tm = pipeline(space)
            res = check_isometry_identity(tm, 2000, 1)
            assert res.worst <= 1e-12 and res.clamped == 0, name


class TestChecks:
    @pytest.mark.parametrize("name", sorted(cat0_catalog()))
    def test_catalog(self, name):
        space, dim = cat0_catalog()[name]
        _, F, tm = pipeline(space)
        assert check_pseudometric(tm, 2000, 0).worst >= -1e-9
        assert check_geodesic_additivity(tm, 300, 0).worst <= 1e-9
        assert check_bruhat_tits_quotient(tm, 2000, 0).worst >= -1e-8
        if dim:
            assert check_normalized(space, F, 30, 300, 0).worst <= 1e-6

    def test_normalized_needs_directions(self):
        g = tripod()
        _, F, _ = pipeline(g)
        with pytest.raises(ValueError):
            check_normalized(g, F, 10, 10, 0)

    def test_projection_stays_normalized(self):
        s = euclidean(3)
        _, F, _ = pipeline(s)
        assert check_normalized(s, F.project([0, 2]), 30, 300, 0).worst <= 1e-6

    def test_unnormalized_map_detected(self):
        # coordinates scaled by one half: still 1-Lipschitz, not normalized
        e = euclidean(2)
        F = EvaluationMap(e, affine_basis(e), coords=0.5 * np.eye(2))
        assert check_lipschitz(F, 500, 0).worst <= 0
        assert check_normalized(e, F, 20, 200, 0).worst == pytest.approx(0.5, abs=1e-9)


class TestQuotient:
    def test_fibers_collapse(self):
        s = product(tripod(), euclidean(1))
        _, _, tm = pipeline(s)
        base = s.left.sample_points(6, 0)
        pts = [Pair(b, (t,)) for b in base for t in (-3.0, 0.0, 2.5)]
        view = quotient_classes(tm, pts)
        assert view.n_classes == 6
        assert view.well_definedness <= 1e-12
        for a, i in enumerate(view.representatives):
            for b, j in enumerate(view.representatives):
                assert view.distances[a, b] == pytest.approx(s.left.distance(pts[i].left, pts[j].left), abs=1e-9)

    def test_euclidean_quotient_is_a_point(self):
        e = euclidean(2)
        _, _, tm = pipeline(e)
        assert quotient_classes(tm, e.sample_points(25, 0)).n_classes == 1

    def test_symbolic(self):
        s = product(path_graph(2), product(tripod(), euclidean(1)))
        sym = symbolic_quotient(s)
        assert [flat for _, _, flat in sym.leaves] == [True, False, True]
        assert symbolic_quotient(normed_product(4)) is None
        rng = np.random.default_rng(0)
        p = s.sample_points(1, 0)[0]
        q = sym.fiber_partner(p, rng)
        assert q.right.left == p.right.left
        assert sym.distance(p, q) == 0


class TestFactorization:
    def test_worked_example(self):
        s = product(path_graph(2), euclidean(1))
        model, F, _ = pipeline(s)
        f1, f2 = model.basis
        form = factor_affine_function(2 * f1 - f2 + 3, F, model)
        assert np.allclose(form.coefficients, [2, -1], atol=1e-12)
        assert form.offset == 3
        assert form.residual <= 1e-9

    def test_random_span_elements(self):
        rng = np.random.default_rng(3)
        for name, (space, dim) in cat0_catalog().items():
            model, F, _ = pipeline(space)
            for k in range(5):
                f = AffineFunction.constant(space, float(rng.normal()))
                if dim:
                    f = f + linear_combination(rng.normal(size=dim), model.basis)
                assert factor_affine_function(f, F, model, seed=k).residual <= 1e-9, name

    def test_non_affine_does_not_factor(self):
        g = path_graph(3)
        model, F, _ = pipeline(g)
        bent = AffineFunction(g, [0, 1, 0, 1])
        with pytest.raises(FactorizationError):
            factor_affine_function(bent, F, model)


def test_basepoint_changes_only_translation():
    s = product(tripod(), euclidean(2))
    model = build_hilbert_model(s)
    o1 = s.basepoint
    o2 = s.sample_points(1, 9)[0]
    F1, F2 = evaluation_map(s, model, o1), evaluation_map(s, model, o2)
    shift = F1(o2)
    tm1, tm2 = TildeMetric(s, F1), TildeMetric(s, F2)
    pts = s.sample_points(40, 1)
    for p, q in zip(pts[::2], pts[1::2]):
        assert np.allclose(F2(p), F1(p) - shift, atol=1e-12)
        assert tm1(p, q) == tm2(p, q)


class TestEmbed:
    def test_tripod_x_R(self):
        rep = embed(product(tripod(), euclidean(1)), samples=1000)
        assert rep.status == "PASS"
        assert rep.dim_A == 1 and rep.gram == [[1.0]]
        assert rep.verdict("isometry").passed
        assert rep.quotient["classes"] == rep.quotient["symbolic_classes"]

    def test_tripod(self):
        rep = embed(tripod(), samples=500)
        assert rep.status == "PASS" and rep.dim_A == 0
        assert rep.verdict("normalized").passed is None

    def test_l4_out_of_scope(self):
        rep = embed(normed_product(4), samples=500)
        assert rep.status == "NOT_IN_THEOREM_SCOPE"
        v = rep.verdict("hilbert")
        assert v.passed is False and v.witness == {"basis_indices": [0, 1]}
        assert 1.6568 <= v.worst_slack <= 1.6569

    def test_report_shape(self):
        doc = embed(euclidean(2), samples=300).to_dict()
        assert {"schema", "space", "dim_A", "gram", "verdicts", "quotient"} <= set(doc)
        for v in doc["verdicts"]:
            assert {"name", "pass", "worst_slack", "witness"} <= set(v)
        assert {"classes", "sample_size"} <= set(doc["quotient"])
        json.dumps(doc, allow_nan=False)

    def test_deterministic(self):
        s = product(path_graph(2), tripod())
        a = json.dumps(embed(s, seed=5, samples=400).to_dict(), sort_keys=True)
        b = json.dumps(embed(s, seed=5, samples=400).to_dict(), sort_keys=True)
        c = json.dumps(embed(s, seed=6, samples=400).to_dict(), sort_keys=True)
        assert a == b and a != c

    def test_cycle_reports_scope(self):
        from flatfactor.catalog import cycle

        rep = embed(cycle(2 * math.pi), samples=300)
        assert rep.scope["cat0"] == "NOT_CAT"
        assert rep.scope["kappa_bound"] == pytest.approx(1.0)
        assert rep.verdict("bruhat_tits").passed is None
