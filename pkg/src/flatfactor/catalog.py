"""Ready-made spaces used by the tests, the examples and the CLI."""

from __future__ import annotations

import math

from .spaces import EuclideanSpace, L2Product, MetricGraph, NormedProduct

__all__ = [
    "branched_tree",
    "cat0_catalog",
    "cat1_catalog",
    "cycle",
    "euclidean",
    "normed_product",
    "path_graph",
    "product",
    "segment",
    "star",
    "tripod",
]


def star(n_legs: int, length: float = 1.0) -> MetricGraph:
    """``n_legs`` edges of equal length glued at a center vertex ``"c"``."""
    legs = [f"t{i}" for i in range(n_legs)]
    return MetricGraph(["c", *legs], [("c", t, length) for t in legs])


def tripod(length: float = 1.0) -> MetricGraph:
    return star(3, length)


def path_graph(n_edges: int, length: float = 1.0) -> MetricGraph:
    verts = list(range(n_edges + 1))
    return MetricGraph(verts, [(i, i + 1, length) for i in range(n_edges)])


def segment(length: float) -> MetricGraph:
    return MetricGraph([0, 1], [(0, 1, length)])


def cycle(total_length: float, n_vertices: int = 3) -> MetricGraph:
    """Cycle graph with ``n_vertices`` equal edges."""
    verts = list(range(n_vertices))
    step = total_length / n_vertices
    return MetricGraph(verts, [(i, (i + 1) % n_vertices, step) for i in verts])


def euclidean(n: int, bounds=(-10.0, 10.0)) -> EuclideanSpace:
    return EuclideanSpace(n, bounds=bounds)


def product(left, right) -> L2Product:
    return L2Product(left, right)


def normed_product(p: float, left=None, right=None) -> NormedProduct:
    """``R x R`` (by default) under the l^p norm of the factor distances."""
    return NormedProduct(left or EuclideanSpace(1), right or EuclideanSpace(1), p)


def branched_tree() -> MetricGraph:
    """A tree with two branch points and unequal edges."""
    return MetricGraph(
        ["a", "b", "c", "d", "e", "f"],
        [("a", "b", 1.5), ("b", "c", 0.75), ("b", "d", 1.0), ("d", "e", 2.0), ("d", "f", 0.5)],
    )


def cat0_catalog() -> dict:
    """Named CAT(0) spaces with their expected dimension of affine functions."""
    return {
        "tripod": (tripod(), 0),
        "star5": (star(5, 0.5), 0),
        "branched_tree": (branched_tree(), 0),
        "path3": (path_graph(3), 1),
        "segment": (segment(2.0), 1),
        "euclidean1": (euclidean(1), 1),
        "euclidean2": (euclidean(2), 2),
        "euclidean3": (euclidean(3), 3),
        "tripod_x_R": (product(tripod(), euclidean(1)), 1),
        "tripod_x_E2": (product(tripod(), euclidean(2)), 2),
        "tripod_x_tripod": (product(tripod(), tripod()), 0),
        "path_x_tripod": (product(path_graph(2), tripod()), 1),
        "R_x_R": (product(euclidean(1), euclidean(1)), 2),
        "l2_normed": (normed_product(2.0), 2),
    }


def cat1_catalog() -> dict:
    """Named CAT(1) graphs (and expected dimension) that are not CAT(0)."""
    return {
        "cycle_2pi": (cycle(2 * math.pi), 0),
        "cycle_7": (cycle(7.0, 4), 0),
    }
