import math

import numpy as np
import pytest

from flatfactor.affine import (
    AffineFunction,
    NotAffineError,
    absolute_gradient,
    affine_basis,
    check_affine,
    check_gradient_monotonicity,
    directional_slopes,
    evaluate,
    lipschitz_norm,
    linear_combination,
)
from flatfactor.catalog import (
    branched_tree,
    cat0_catalog,
    cat1_catalog,
    cycle,
    euclidean,
    normed_product,
    path_graph,
    product,
    segment,
    star,
    tripod,
)
from flatfactor.spaces import MetricGraph, Pair
from oracles import affine_dimension_by_rank, lp_dual_sum_norm


def raw_edges(g):
    return [(g.vertices[u], g.vertices[v], L) for (u, v), L in zip(g.edges, g.lengths)]


def random_span_element(basis, rng):
    return linear_combination(rng.normal(size=len(basis)), basis)


GRAPHS = [
    tripod(),
    star(5),
    branched_tree(),
    path_graph(3),
    path_graph(5, 0.7),
    segment(2.0),
    cycle(2 * math.pi),
    cycle(5.0, 5),
    MetricGraph(list(range(5)), [(0, 1, 1.0), (1, 2, 2.5), (2, 3, 0.25), (3, 4, 1.75)]),
    MetricGraph(list("abcd"), [("a", "b", 1), ("b", "c", 1), ("c", "a", 1), ("c", "d", 2)]),
]


class TestBasis:
    @pytest.mark.parametrize("g", GRAPHS, ids=repr)
    def test_dimension_matches_rank_oracle(self, g):
        assert len(affine_basis(g)) == affine_dimension_by_rank(g.vertices, raw_edges(g))

    def test_dimension_table(self):
        assert len(affine_basis(tripod())) == 0
        assert len(affine_basis(path_graph(3))) == 1
        assert len(affine_basis(cycle(2 * math.pi))) == 0
        assert len(affine_basis(product(tripod(), euclidean(1)))) == 1
        for n in (1, 2, 3, 5):
            assert len(affine_basis(euclidean(n))) == n
        assert len(affine_basis(product(tripod(), euclidean(2)))) == 2

    def test_product_basis_is_t_projection(self):
        s = product(tripod(), euclidean(1))
        (f,) = affine_basis(s)
        for p in s.sample_points(50, 0):
            assert f(p) == p.right[0]

    def test_basis_vanishes_at_basepoint(self):
        for name, (space, _) in {**cat0_catalog(), **cat1_catalog()}.items():
            for f in affine_basis(space):
                assert f.exact(space.basepoint) == 0, name

    def test_other_basepoint(self):
        g = path_graph(3)
        o = (1, 0.5)
        (f,) = affine_basis(g, o)
        assert f.exact(o) == 0

    def test_solver_outputs_are_affine(self):
        for name, (space, _) in {**cat0_catalog(), **cat1_catalog(), "np4": (normed_product(4), None)}.items():
            for f in affine_basis(space):
                assert check_affine(space, f, 1000, 0) <= 1e-9, name


class TestEvaluate:
    def test_unit_slope_on_segment(self):
        g = segment(2.0)
        (f,) = affine_basis(g)
        assert evaluate(f, (0, 0.5)) == 0.5

    def test_product_is_sum(self):
        s = product(path_graph(2), euclidean(1))
        fx, ft = affine_basis(s)
        h = 2 * fx - ft + 3
        for p in s.sample_points(20, 1):
            assert h(p) == pytest.approx(2 * fx(p) - ft(p) + 3, abs=1e-12)
            left = AffineFunction(s.left, h.left.params)
            right = AffineFunction(s.right, h.right.params)
            assert h(p) == pytest.approx(left(p.left) + right(p.right), abs=1e-12)

    def test_mismatch(self):
        (f,) = affine_basis(segment(1.0))
        with pytest.raises(Exception):
            evaluate(f, (3, 0.0))


class TestCheckAffine:
    def test_distance_function_is_not_affine(self):
        g = tripod()
        c = g.vertex_point("c")

        def dist(x):
            return g.distance(c, x)

        assert check_affine(g, dist, 200, 0) >= 0.4
        # tip to tip through the center: deviation 1 at the midpoint
        from flatfactor.affine import affine_deviation

        assert affine_deviation(g, dist, g.vertex_point("t0"), g.vertex_point("t1"), [0.5]) == 1.0

    def test_projections_on_normed_product(self):
        s = normed_product(4)
        for f in affine_basis(s):
            assert check_affine(s, f, 1000, 0) <= 1e-9

    def test_completeness_random_vertex_values(self):
        rng = np.random.default_rng(0)
        for g in GRAPHS:
            for _ in range(5):
                values = rng.normal(size=g.n_vertices)
                f = AffineFunction(g, values)
                if affine_dimension_by_rank(g.vertices, raw_edges(g)) == 1:
                    # project the random values off the affine line so f is surely not affine
                    (b,) = affine_basis(g)
                    if abs(np.corrcoef([float(x) for x in b.params], values)[0, 1]) > 0.999:
                        continue
                assert check_affine(g, f, 1000, 1) > 1e-3


class TestNorm:
    def test_unit_slope(self):
        g = path_graph(3)
        (f,) = affine_basis(g)
        assert lipschitz_norm(g, f) == 1

    def test_l4_sum_norm(self):
        s = normed_product(4)
        f, g = affine_basis(s)
        assert lipschitz_norm(s, f + g) == pytest.approx(2 ** 0.75, abs=1e-12)
        assert lipschitz_norm(s, f + g) == pytest.approx(lp_dual_sum_norm(4), abs=1e-9)
        assert lipschitz_norm(s, f + g) == pytest.approx(1.681793, abs=1e-6)

    @pytest.mark.parametrize("p", [1.5, 3.0, 7.0])
    def test_dual_norm_oracle(self, p):
        s = normed_product(p)
        f, g = affine_basis(s)
        assert lipschitz_norm(s, f + g) == pytest.approx(lp_dual_sum_norm(p), abs=1e-8)

    def test_t_projection_on_product(self):
        s = product(tripod(), euclidean(1))
        (f,) = affine_basis(s)
        assert lipschitz_norm(s, f) == 1
        pts = s.sample_points(2000, 3)
        quotients = [abs(f(p) - f(q)) / s.distance(p, q) for p, q in zip(pts[::2], pts[1::2])]
        assert max(quotients) <= 1 + 1e-12
        assert max(quotients) > 0.99

    def test_euclidean_coefficients(self):
        e = euclidean(3)
        f = linear_combination([3, 0, 4], affine_basis(e))
        assert lipschitz_norm(e, f) == 5

    def test_rejects_non_affine(self):
        g = tripod()
        with pytest.raises(NotAffineError):
            lipschitz_norm(g, AffineFunction(g, [0, 1, 2, 3]))


class TestGradient:
    def test_endpoint_example(self):
        g = segment(1.0)
        (f,) = affine_basis(g)
        h = -f
        assert absolute_gradient(g, h, (0, 0.0)) == 0
        assert absolute_gradient(g, h, (0, 0.5)) == 1

    def test_product_basis(self):
        s = product(tripod(), euclidean(1))
        (f,) = affine_basis(s)
        for p in s.sample_points(30, 0) + [Pair(s.left.vertex_point("c"), (0.0,))]:
            assert absolute_gradient(s, f, p) == 1

    @pytest.mark.parametrize(
        "space",
        [path_graph(3), segment(2.0), product(tripod(), euclidean(1)), product(path_graph(2), tripod()), euclidean(1)],
        ids=repr,
    )
    def test_sampled_agrees_with_exact(self, space):
        rng = np.random.default_rng(5)
        basis = affine_basis(space)
        pts = space.sample_points(15, 2) + [space.basepoint]
        for _ in range(3):
            f = random_span_element(basis, rng)
            for p in pts:
                exact = absolute_gradient(space, f, p)
                sampled = absolute_gradient(space, f, p, method="sampled")
                assert abs(exact - sampled) <= 1e-6

    def test_sampled_is_lower_bound_in_plane(self):
        e = euclidean(2)
        f = linear_combination([0.6, -0.8], affine_basis(e))
        sampled = absolute_gradient(e, f, (1.0, 2.0), method="sampled", n_directions=4096)
        assert sampled <= 1 + 1e-9
        assert sampled > 1 - 1e-4

    def test_supremum_equals_norm(self):
        rng = np.random.default_rng(1)
        for name, (space, dim) in cat0_catalog().items():
            if dim == 0:
                continue
            f = random_span_element(affine_basis(space), rng)
            pts = space.sample_points(1000, 4)
            sup = max(absolute_gradient(space, f, p) for p in pts)
            assert abs(sup - lipschitz_norm(space, f)) <= 1e-6, name

    def test_bounded_by_norm(self):
        s = normed_product(4)
        f, g = affine_basis(s)
        h = f + 2 * g
        for p in s.sample_points(50, 0):
            assert 0 <= absolute_gradient(s, h, p) <= lipschitz_norm(s, h) + 1e-12

    def test_monotone_along_geodesics(self):
        rng = np.random.default_rng(2)
        for name, (space, dim) in cat0_catalog().items():
            if dim == 0:
                continue
            f = random_span_element(affine_basis(space), rng)
            assert check_gradient_monotonicity(space, f, 1000, 3) >= -1e-9, name

    def test_monotone_from_vertices(self):
        # starting at a degree-1 vertex the gradient can only go up
        g = path_graph(3)
        (f,) = affine_basis(g)
        for h in (f, -f):
            for v in (0, 3):
                x = g.vertex_point(v)
                for q in g.sample_points(50, v):
                    y = g.geodesic(x, q)(0.5)
                    assert absolute_gradient(g, h, y) >= absolute_gradient(g, h, x) - 1e-9


class TestDirectionalSlopes:
    def test_degree_three(self):
        g = branched_tree()
        for v in ("b", "d"):
            assert all(s == 0 for s in directional_slopes(g, AffineFunction.constant(g, 1), v).values())

    def test_degree_two_sums_to_zero(self):
        g = path_graph(4, 0.5)
        (f,) = affine_basis(g)
        for v in (1, 2, 3):
            slopes = directional_slopes(g, f, v)
            assert len(slopes) == 2 and sum(slopes.values()) == 0

    def test_degree_one_unconstrained(self):
        g = segment(2.0)
        f = AffineFunction(g, [0, 6])
        assert directional_slopes(g, f, 0) == {0: 3.0}
        assert directional_slopes(g, f, 1) == {0: -3.0}

    def test_non_vertex(self):
        with pytest.raises(Exception):
            directional_slopes(tripod(), AffineFunction.constant(tripod()), "nope")
