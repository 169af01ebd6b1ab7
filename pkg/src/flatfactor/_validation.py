"""Input checks shared by the estimator and the CLI."""

from __future__ import annotations

from .spaces import PointError, Space, build_space, point_from_json


def check_space(space) -> Space:
    """Accept a built space or its dictionary description."""
    if isinstance(space, Space):
        return space
    if isinstance(space, dict):
        return build_space(space)
    raise TypeError(f"expected a Space or a space description, got {type(space).__name__}")


def check_points(space: Space, points) -> list:
    """Validate a sequence of points, accepting native or JSON-style entries."""
    if isinstance(points, (str, bytes)) or not hasattr(points, "__iter__"):
        raise TypeError("points must be a sequence")
    out = []
    for i, p in enumerate(points):
        try:
            out.append(space.check_point(p))
        except PointError:
            try:
                out.append(point_from_json(space, p))
            except PointError as exc:
                raise PointError(f"point {i}: {exc}") from None
    if not out:
        raise ValueError("need at least one point")
    return out
