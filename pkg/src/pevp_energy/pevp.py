"""Random matrix polynomials and their roots.

``A(z) = sum_i G_i * sqrt(binom(d, i)) * z**i`` with ``r x r`` standard complex
Gaussian ``G_i``.  ``F(z) = det A(z)`` has degree ``N = d * r`` and leading
coefficient ``det(G_d)``; its roots are the eigenvalues of the block companion
matrix built from ``G_d^{-1} G_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .sampling import RngStream, sample_matrices

__all__ = [
    "EnsembleParams",
    "MatrixPolynomial",
    "RootSet",
    "binomial_sqrt",
    "build_matrix_polynomial",
    "matrix_polynomial_from_coeffs",
    "companion_linearize",
    "roots_of",
    "pevp_roots",
]


@dataclass(frozen=True, order=True)
class EnsembleParams:
    d: int
    r: int

    def __post_init__(self):
        if int(self.d) != self.d or int(self.r) != self.r or self.d < 1 or self.r < 1:
            raise ValueError(f"d and r must be positive integers, got d={self.d}, r={self.r}")

    @property
    def N(self) -> int:
        return self.d * self.r

    @classmethod
    def from_N(cls, N: int, d: int) -> "EnsembleParams":
        if d < 1 or N % d:
            raise ValueError(f"d={d} does not divide N={N}")
        return cls(d=d, r=N // d)


@dataclass(frozen=True)
class MatrixPolynomial:
    """Coefficient blocks ``coeffs[i]`` of ``A(z)``, already scaled."""

    params: EnsembleParams
    coeffs: tuple

    def __post_init__(self):
        d, r = self.params.d, self.params.r
        if len(self.coeffs) != d + 1:
            raise ValueError(f"expected {d + 1} coefficient blocks, got {len(self.coeffs)}")
        for c in self.coeffs:
            if np.shape(c) != (r, r):
                raise ValueError(f"coefficient block has shape {np.shape(c)}, expected {(r, r)}")

    def __call__(self, z: complex) -> np.ndarray:
        """Evaluate ``A(z)`` by Horner's rule."""
        acc = np.array(self.coeffs[-1], dtype=np.complex128)
        for c in self.coeffs[-2::-1]:
            acc = acc * z + c
        return acc

    def derivative(self, z: complex) -> np.ndarray:
        d = self.params.d
        acc = np.zeros_like(np.asarray(self.coeffs[0], dtype=np.complex128))
        for i in range(d, 0, -1):
            acc = acc * z + i * np.asarray(self.coeffs[i])
        return acc


@dataclass(frozen=True)
class RootSet:
    params: EnsembleParams
    roots: np.ndarray
    leading_det: complex
    degenerate: bool = False
    reason: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.degenerate:
            if len(self.roots) != self.params.N:
                raise ValueError(f"expected {self.params.N} roots, got {len(self.roots)}")
            if self.leading_det == 0:
                raise ValueError("non-degenerate root set with zero leading coefficient")


def binomial_sqrt(d: int, i: int) -> float:
    """``sqrt(binom(d, i))``; uses log-gamma once ``d > 50``."""
    if not 0 <= i <= d:
        raise ValueError(f"i={i} out of range 0..{d}")
    if d <= 50:
        return math.sqrt(math.comb(d, i))
    return math.exp(0.5 * (math.lgamma(d + 1) - math.lgamma(i + 1) - math.lgamma(d - i + 1)))


def matrix_polynomial_from_coeffs(coeffs, params: EnsembleParams | None = None) -> MatrixPolynomial:
    """Wrap given (already scaled) blocks; scalar coefficients become 1x1 blocks."""
    blocks = tuple(np.atleast_2d(np.asarray(c, dtype=np.complex128)) for c in coeffs)
    if params is None:
        params = EnsembleParams(d=len(blocks) - 1, r=blocks[0].shape[0])
    return MatrixPolynomial(params=params, coeffs=blocks)


def build_matrix_polynomial(s: RngStream, params: EnsembleParams) -> MatrixPolynomial:
    """Sample ``G_0, ..., G_d`` in that order and scale block ``i`` by ``sqrt(binom(d, i))``."""
    d, r = params.d, params.r
    g = sample_matrices(s, d + 1, r)
    weights = np.array([binomial_sqrt(d, i) for i in range(d + 1)])
    scaled = g * weights[:, None, None]
    return MatrixPolynomial(params=params, coeffs=tuple(scaled))


def companion_linearize(p: MatrixPolynomial) -> np.ndarray:
    """Block companion matrix whose eigenvalues are the roots of ``det A(z)``.

    The first ``d - 1`` block rows carry identities on the block superdiagonal,
    the last block row is ``-(X_0, ..., X_{d-1})`` with ``X_i = coeffs[d]^{-1} coeffs[i]``.

    Raises
    ------
    linalg.NearSingular
        If the leading block fails the pivot guard of :func:`linalg.solve`.
    """
    d, r = p.params.d, p.params.r
    n = d * r
    rhs = np.concatenate(p.coeffs[:d], axis=1)
    x = linalg.solve(p.coeffs[d], rhs)
    c = np.zeros((n, n), dtype=np.complex128)
    if d > 1:
        c[: n - r, r:] = np.eye(n - r)
    c[n - r :, :] = -x
    return c


def roots_of(p: MatrixPolynomial) -> RootSet:
    """Roots of ``det A(z)`` for a given matrix polynomial.

    Numerical failures (near-singular leading block, QR non-convergence)
    yield a degenerate :class:`RootSet` instead of raising.
    """
    lead = linalg.det(p.coeffs[-1])
    try:
        c = companion_linearize(p)
        spectrum = linalg.eigenvalues(c)
    except linalg.NearSingular as exc:
        return RootSet(p.params, np.empty(0, complex), lead, degenerate=True, reason=str(exc))
    except linalg.EigenFailure as exc:
        return RootSet(p.params, np.empty(0, complex), lead, degenerate=True, reason=str(exc))
    return RootSet(p.params, spectrum.eigenvalues, lead)


def pevp_roots(s: RngStream, params: EnsembleParams) -> RootSet:
    return roots_of(build_matrix_polynomial(s, params))
