"""Inner-product model of the space of affine functions modulo constants."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _rational
from .affine import (
    AffineFunction,
    affine_basis,
    lipschitz_norm,
    linear_combination,
    norm_squared_exact,
)
from .spaces import Space

__all__ = [
    "HilbertModel",
    "NotHilbert",
    "build_hilbert_model",
    "parallelogram_residual",
    "polarization_inner_product",
]


class NotHilbert(Exception):
    """The Lipschitz norm on the affine functions is not an inner-product norm.

    ``witness`` names the offending basis indices, ``residual`` the size of
    the failure.
    """

    def __init__(self, message: str, witness: tuple, residual: float):
        super().__init__(message)
        self.witness = witness
        self.residual = residual


def _sq(space: Space, f: AffineFunction):
    exact = norm_squared_exact(f)
    if exact is not None:
        return exact
    return lipschitz_norm(space, f) ** 2


def _signed_parallelogram(space, f, g):
    return _sq(space, f + g) + _sq(space, f - g) - 2 * _sq(space, f) - 2 * _sq(space, g)


def parallelogram_residual(space: Space, f: AffineFunction, g: AffineFunction) -> float:
    """``| |f+g|^2 + |f-g|^2 - 2|f|^2 - 2|g|^2 |`` in the Lipschitz norm."""
    return abs(float(_signed_parallelogram(space, f, g)))


def _inner(space, f, g):
    return (_sq(space, f + g) - _sq(space, f - g)) / 4


def polarization_inner_product(space: Space, f: AffineFunction, g: AffineFunction) -> float:
    return float(_inner(space, f, g))


@dataclass
class HilbertModel:
    """Gram data of a basis and an orthonormalized copy spanning the same space.

    ``whitening`` is the symmetric inverse square root ``W`` of the Gram
    matrix; ``onb[k] = sum_j W[j, k] * basis[j]``.
    """

    space: Space
    basis: list
    gram: np.ndarray
    onb: list
    whitening: np.ndarray
    psd_certificate: float
    gram_exact: Optional[list] = field(default=None, repr=False)
    inverse_gram_exact: Optional[list] = field(default=None, repr=False)
    onb_gram_error: float = 0.0
    max_parallelogram_residual: float = 0.0

    @property
    def dim(self) -> int:
        return len(self.basis)


def build_hilbert_model(space: Space, basis=None, tol: float = 1e-9) -> HilbertModel:
    """Gram matrix by polarization, certified positive and parallelogram-exact.

    Raises :class:`NotHilbert` when some pair of basis functions violates the
    parallelogram law, when polarization fails to be additive, or when the
    Gram matrix has a negative eigenvalue beyond ``1e-8 * trace``.
    """
    if basis is None:
        basis = affine_basis(space)
    basis = list(basis)
    k = len(basis)
    if k == 0:
        return HilbertModel(space, [], np.zeros((0, 0)), [], np.zeros((0, 0)), 0.0, [], [])

    sq = [_sq(space, f) for f in basis]
    worst = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            r = abs(float(_signed_parallelogram(space, basis[i], basis[j])))
            worst = max(worst, r)
            if r > tol * max(1.0, float(sq[i] + sq[j])):
                raise NotHilbert(
                    f"parallelogram law fails for basis pair ({i}, {j}): residual {r:.6g}",
                    (i, j),
                    r,
                )
    gram_raw = [[sq[i] if i == j else _inner(space, basis[i], basis[j]) for j in range(k)] for i in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            for m in range(k):
                lhs = _inner(space, basis[i] + basis[j], basis[m])
                r = abs(float(lhs - gram_raw[i][m] - gram_raw[j][m]))
                if r > tol * max(1.0, float(sq[i] + sq[j] + sq[m])):
                    raise NotHilbert(
                        f"polarization is not additive on basis triple ({i}, {j}, {m})",
                        (i, j, m),
                        r,
                    )

    exact = all(isinstance(x, Fraction) for row in gram_raw for x in row)
    gram = np.array([[float(x) for x in row] for row in gram_raw])
    evals, evecs = np.linalg.eigh(gram)
    trace = float(np.trace(gram))
    if evals[0] < -1e-8 * trace:
        raise NotHilbert(
            f"Gram matrix is not positive semidefinite (eigenvalue {evals[0]:.6g})",
            tuple(range(k)),
            float(-evals[0]),
        )
    if evals[0] <= 1e-12 * trace:
        raise ValueError("basis functions are linearly dependent modulo constants")

    if exact and _rational.is_identity(gram_raw):
        w = np.eye(k)
    else:
        w = (evecs / np.sqrt(evals)) @ evecs.T
    onb = [linear_combination(w[:, c], basis) for c in range(k)]
    onb_gram = np.array(
        [[polarization_inner_product(space, a, b) for b in onb] for a in onb]
    )
    return HilbertModel(
        space=space,
        basis=basis,
        gram=gram,
        onb=onb,
        whitening=w,
        psd_certificate=float(evals[0]),
        gram_exact=gram_raw if exact else None,
        inverse_gram_exact=_rational.inverse(gram_raw) if exact else None,
        onb_gram_error=float(np.max(np.abs(onb_gram - np.eye(k)))),
        max_parallelogram_residual=worst,
    )
