import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flatfactor.catalog import cat0_catalog, cycle, euclidean, normed_product, path_graph, product, segment, tripod
from flatfactor.spaces import (
    Curvature,
    EuclideanSpace,
    GraphPoint,
    InvalidSpaceError,
    MetricGraph,
    NormedProduct,
    Pair,
    PointError,
    build_space,
    curvature_validity,
    point_from_json,
    point_to_json,
)
from oracles import graph_point_distance


def tripod_desc():
    return {
        "kind": "graph",
        "vertices": ["c", "a", "b", "d"],
        "edges": [["c", "a", 1], ["c", "b", 1], ["c", "d", 1]],
    }


class TestBuild:
    def test_tripod_is_a_tree(self):
        g = build_space(tripod_desc())
        assert g.is_tree()
        assert g.curvature_validity(0) is Curvature.CAT_OK

    @pytest.mark.parametrize(
        "edges, fragment",
        [
            ([["a", "b", 0]], "nonpositive"),
            ([["a", "b", -1]], "nonpositive"),
            ([["a", "a", 1]], "loop"),
            ([["a", "b", 1], ["b", "a", 2]], "duplicates"),
            ([["a", "z", 1]], "unknown vertex"),
        ],
    )
    def test_invalid_graphs(self, edges, fragment):
        with pytest.raises(InvalidSpaceError, match=fragment):
            build_space({"kind": "graph", "vertices": ["a", "b"], "edges": edges})

    def test_disconnected(self):
        with pytest.raises(InvalidSpaceError, match="disconnected"):
            MetricGraph(["a", "b", "c", "d"], [("a", "b", 1), ("c", "d", 1)])

    @pytest.mark.parametrize("p", [1.0, 0.5, -2, float("inf")])
    def test_bad_exponent(self, p):
        with pytest.raises(InvalidSpaceError, match="exponent"):
            NormedProduct(EuclideanSpace(1), EuclideanSpace(1), p)

    def test_normed_product_p4_is_valid(self):
        s = build_space({"kind": "normedproduct", "p": 4, "left": {"kind": "euclidean", "dimension": 1}, "right": {"kind": "euclidean", "dimension": 1}})
        assert s.p == 4.0

    def test_error_path_points_into_factor(self):
        desc = {"kind": "l2product", "left": {"kind": "euclidean", "dimension": 1}, "right": {"kind": "graph", "vertices": ["a", "b"], "edges": [["a", "b", 0]]}}
        with pytest.raises(InvalidSpaceError) as info:
            build_space(desc)
        assert info.value.field == ("right", "edges", 0)

    def test_depth_limit(self):
        desc = {"kind": "euclidean", "dimension": 1}
        for _ in range(8):
            desc = {"kind": "l2product", "left": desc, "right": {"kind": "euclidean", "dimension": 1}}
        assert build_space(desc).depth == 8
        with pytest.raises(InvalidSpaceError, match="deeper"):
            build_space({"kind": "l2product", "left": desc, "right": {"kind": "euclidean", "dimension": 1}})

    def test_round_trip_to_dict(self):
        for name, (space, _) in cat0_catalog().items():
            again = build_space(space.to_dict())
            assert again.to_dict() == space.to_dict(), name


class TestDistance:
    def test_tripod_tips(self):
        g = tripod()
        assert g.distance(g.vertex_point("t0"), g.vertex_point("t1")) == 2

    def test_plane(self):
        s = product(euclidean(1), euclidean(1))
        assert s.distance(Pair((0.0,), (0.0,)), Pair((3.0,), (4.0,))) == 5

    def test_l4_product(self):
        s = normed_product(4)
        assert s.distance(Pair((0.0,), (0.0,)), Pair((1.0,), (1.0,))) == pytest.approx(2 ** 0.25, abs=1e-15)

    def test_point_space_mismatch(self):
        with pytest.raises(PointError):
            tripod().distance((7, 0.0), (0, 0.0))
        with pytest.raises(PointError):
            euclidean(2).distance((0.0,), (1.0, 1.0))
        with pytest.raises(PointError):
            tripod().distance((0, 1.5), (0, 0.0))

    @pytest.mark.parametrize("space", [tripod(), cycle(5.0, 4), path_graph(3), MetricGraph(list("abcde"), [("a", "b", 1.0), ("b", "c", 0.3), ("c", "a", 2.0), ("c", "d", 0.7), ("d", "e", 1.1), ("e", "b", 0.4)])])
    def test_against_subdivided_graph(self, space):
        pts = space.sample_points(400, 3)
        for p, q in zip(pts[::2], pts[1::2]):
            assert space.distance(p, q) == pytest.approx(graph_point_distance(space, p, q), abs=1e-12)

    def test_same_edge_direct_route(self):
        g = segment(2.0)
        assert g.distance((0, 0.5), (0, 1.5)) == 1.0

    def test_metric_axioms(self):
        for name, (space, _) in cat0_catalog().items():
            pts = space.sample_points(3000, 11)
            for x, y, z in zip(pts[::3], pts[1::3], pts[2::3]):
                assert space.distance(x, y) == space.distance(y, x)
                assert space.distance(x, z) <= space.distance(x, y) + space.distance(y, z) + 1e-12
            assert space.distance(pts[0], pts[0]) == 0

    def test_pythagoras(self):
        s = product(tripod(), euclidean(2))
        pts = s.sample_points(2000, 5)
        for p, q in zip(pts[::2], pts[1::2]):
            lhs = s.distance(p, q) ** 2
            rhs = s.left.distance(p.left, q.left) ** 2 + s.right.distance(p.right, q.right) ** 2
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, rhs)
            assert s.squared_distance_exact(p, q) == s.left.squared_distance_exact(p.left, q.left) + s.right.squared_distance_exact(p.right, q.right)


class TestGeodesic:
    def test_segment(self):
        g = segment(2.0)
        geo = g.geodesic(g.vertex_point(0), g.vertex_point(1))
        assert geo.length == 2
        for t in (0.1, 0.25, 0.8):
            assert geo(t) == GraphPoint(0, 2 * t)

    def test_tripod_midpoint_is_center(self):
        g = tripod()
        geo = g.geodesic(g.vertex_point("t0"), g.vertex_point("t1"))
        assert geo.length == 2
        assert g.vertex_at(geo(0.5)) == g.vertex_index("c")
        assert g.vertex_at(g.midpoint(g.vertex_point("t0"), g.vertex_point("t1"))) == 0

    def test_endpoints(self):
        for name, (space, _) in cat0_catalog().items():
            p, q = space.sample_points(2, 1)
            geo = space.geodesic(p, q)
            assert geo(0) == space.check_point(p) and geo(1) == space.check_point(q), name

    def test_constant_speed(self):
        rng = np.random.default_rng(0)
        for name, (space, _) in {**cat0_catalog(), "np4": (normed_product(4), None), "c7": (cycle(7.0), None)}.items():
            pts = space.sample_points(200, 2)
            for p, q in zip(pts[::2], pts[1::2]):
                geo = space.geodesic(p, q)
                assert geo.length == pytest.approx(space.distance(p, q), abs=1e-12)
                s, t = rng.uniform(0, 1, 2)
                assert abs(space.distance(geo(s), geo(t)) - abs(s - t) * geo.length) <= 1e-9, name

    def test_product_geodesic_projects(self):
        s = product(tripod(), euclidean(1))
        p, q = s.sample_points(2, 4)
        geo, gl, gr = s.geodesic(p, q), s.left.geodesic(p.left, q.left), s.right.geodesic(p.right, q.right)
        for t in (0.2, 0.5, 0.9):
            assert geo(t).left == gl(t)
            assert geo(t).right == pytest.approx(gr(t))

    def test_euclidean_midpoint(self):
        e = euclidean(3)
        assert e.midpoint((0.0, 2.0, 4.0), (2.0, 0.0, -4.0)) == (1.0, 1.0, 0.0)

    def test_antipodal_tie_flagged(self):
        c = cycle(6.0, 3)
        geo = c.geodesic(c.vertex_point(0), (1, 1.0))  # opposite point, 3 either way
        assert geo.length == 3
        assert not geo.unique
        assert tripod().geodesic((0, 0.5), (1, 0.5)).unique


class TestSampling:
    def test_reproducible(self):
        for name, (space, _) in cat0_catalog().items():
            assert space.sample_points(50, 9) == space.sample_points(50, 9)
            assert space.sample_points(50, 9) != space.sample_points(50, 10)

    def test_graph_points_on_edges(self):
        g = cycle(5.0, 5)
        for e, off in g.sample_points(500, 0):
            assert 0 <= e < 5 and 0 <= off <= g.lengths[e]

    def test_box(self):
        e = EuclideanSpace(2, bounds=(-1, 3))
        arr = np.array(e.sample_points(1000, 0))
        assert arr.min() >= -1 and arr.max() <= 3


class TestCurvature:
    def test_examples(self):
        assert curvature_validity(tripod(), 0) is Curvature.CAT_OK
        assert curvature_validity(cycle(2 * math.pi), 1) is Curvature.CAT_OK
        assert curvature_validity(cycle(5.0), 1) is Curvature.NOT_CAT
        assert curvature_validity(cycle(2 * math.pi), 0) is Curvature.NOT_CAT
        assert curvature_validity(normed_product(4), 0) is Curvature.NOT_CAT
        assert curvature_validity(normed_product(2), 0) is Curvature.CAT_OK

    def test_girth_bound_scales(self):
        c = cycle(2 * math.pi)
        # larger kappa means a shorter required girth
        assert c.curvature_validity(1.01) is Curvature.CAT_OK
        assert c.curvature_validity(0.99) is Curvature.NOT_CAT
        assert cycle(math.pi).curvature_validity(4.0) is Curvature.CAT_OK

    def test_products(self):
        assert product(tripod(), euclidean(2)).curvature_validity(0) is Curvature.CAT_OK
        assert product(cycle(2 * math.pi), euclidean(1)).curvature_validity(0) is Curvature.NOT_CAT
        assert product(cycle(2 * math.pi), euclidean(1)).curvature_validity(1) is Curvature.UNKNOWN


class TestPointJson:
    def test_round_trip(self):
        for name, (space, _) in cat0_catalog().items():
            for p in space.sample_points(20, 0) + [space.basepoint]:
                assert point_from_json(space, point_to_json(space, p)) == space.check_point(p)

    def test_vertex_labels(self):
        g = tripod()
        assert point_to_json(g, g.vertex_point("t2")) == {"vertex": "t2"}


@settings(max_examples=60, deadline=None)
@given(
    lengths=st.lists(st.floats(0.1, 5.0), min_size=1, max_size=6),
    seed=st.integers(0, 2**32 - 1),
)
def test_random_trees_distance_oracle(lengths, seed):
    # a random tree: vertex i+1 hangs off a random earlier vertex
    rng = np.random.default_rng(seed)
    edges = [(int(rng.integers(0, i + 1)), i + 1, L) for i, L in enumerate(lengths)]
    g = MetricGraph(list(range(len(lengths) + 1)), edges)
    pts = g.sample_points(20, seed)
    for p, q in zip(pts[::2], pts[1::2]):
        assert g.distance(p, q) == pytest.approx(graph_point_distance(g, p, q), abs=1e-12)
        m = g.midpoint(p, q)
        assert abs(g.distance(p, m) - g.distance(p, q) / 2) <= 1e-12
