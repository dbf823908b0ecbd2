"""Stereographic projection and logarithmic energy.

Two sphere models are used.  ``RIEMANN`` is the sphere of radius 1/2 centred
at ``(0, 0, 1/2)``, the image of the plane under inverse stereographic
projection, on which the chordal distance is
``|z - w| / sqrt((1 + |z|^2) (1 + |w|^2))``.  ``UNIT_S2`` is the unit sphere,
reached by ``(a, b, c) -> (2a, 2b, 2c - 1)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .pevp import RootSet

__all__ = [
    "SphereModel",
    "SphericalConfiguration",
    "EnergyValue",
    "CoincidentPoints",
    "RepeatedRoots",
    "project_riemann",
    "riemann_to_s2",
    "configuration_from_roots",
    "log_energy",
    "energy_three_term",
    "riemann_energy_to_s2",
]

LN2 = math.log(2.0)


class SphereModel(enum.Enum):
    RIEMANN = "riemann"
    UNIT_S2 = "unit_s2"


class CoincidentPoints(ArithmeticError):
    """Two points closer than 1e-300; the energy is +inf."""

    value = math.inf


class RepeatedRoots(ArithmeticError):
    pass


@dataclass(frozen=True)
class SphericalConfiguration:
    model: SphereModel
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"points must have shape (N, 3), got {pts.shape}")
        if self.model is SphereModel.RIEMANN:
            radii = np.linalg.norm(pts - np.array([0.0, 0.0, 0.5]), axis=1)
            ok = np.abs(radii - 0.5) <= 1e-12
        else:
            ok = np.abs(np.linalg.norm(pts, axis=1) - 1.0) <= 1e-12
        if not np.all(ok):
            raise ValueError(f"points are not on the {self.model.value} sphere")
        object.__setattr__(self, "points", pts)

    @property
    def N(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class EnergyValue:
    value: float
    model: SphereModel
    N: int


def project_riemann(z) -> np.ndarray:
    """Inverse stereographic projection onto the Riemann sphere.

    Accepts a scalar (returns a 3-vector) or an array of complex numbers
    (returns an ``(n, 3)`` array).
    """
    zz = np.asarray(z, dtype=np.complex128)
    if not np.all(np.isfinite(zz)):
        raise ValueError("cannot project non-finite points")
    w = 1.0 / (1.0 + np.abs(zz) ** 2)
    return np.stack([zz.real * w, zz.imag * w, np.abs(zz) ** 2 * w], axis=-1)


def riemann_to_s2(p) -> np.ndarray:
    pts = np.asarray(p, dtype=np.float64)
    radii = np.linalg.norm(pts - np.array([0.0, 0.0, 0.5]), axis=-1)
    if np.any(np.abs(radii - 0.5) > 1e-9):
        raise ValueError("point is not on the Riemann sphere")
    out = 2.0 * pts
    out[..., 2] -= 1.0
    return out


def configuration_from_roots(roots, model: SphereModel = SphereModel.RIEMANN) -> SphericalConfiguration:
    pts = project_riemann(np.asarray(roots).ravel())
    if model is SphereModel.UNIT_S2:
        pts = riemann_to_s2(pts)
    return SphericalConfiguration(model, pts)


def log_energy(c: SphericalConfiguration) -> EnergyValue:
    """``-sum_{i<j} ln ||x_i - x_j||`` over all pairs."""
    pts = c.points
    n = pts.shape[0]
    if n < 2:
        return EnergyValue(0.0, c.model, n)
    i, j = np.triu_indices(n, k=1)
    dist = np.linalg.norm(pts[i] - pts[j], axis=1)
    if np.min(dist) < 1e-300:
        raise CoincidentPoints(f"coincident points in a configuration of {n}")
    return EnergyValue(float(-np.sum(np.log(dist))), c.model, n)


def energy_three_term(rs: RootSet) -> EnergyValue:
    """Riemann-sphere energy from the roots and the leading coefficient alone.

    ``(N-1) sum ln sqrt(1+|z_i|^2) - 1/2 sum ln|F'(z_i)| + N/2 ln|a_N|`` with
    ``F'(z_i) = a_N prod_{j != i} (z_i - z_j)``.
    """
    if rs.degenerate:
        raise ValueError("degenerate root set")
    z = np.asarray(rs.roots, dtype=np.complex128)
    n = z.size
    if n == 1:
        log_fprime = np.array([math.log(abs(rs.leading_det))])
    else:
        diff = z[:, None] - z[None, :]
        scale = np.maximum(1.0, np.maximum(np.abs(z)[:, None], np.abs(z)[None, :]))
        np.fill_diagonal(diff, 1.0)
        if np.any(np.abs(diff) <= 1e-12 * scale):
            raise RepeatedRoots("roots closer than 1e-12")
        log_fprime = math.log(abs(rs.leading_det)) + np.sum(np.log(np.abs(diff)), axis=1)
    first = float(np.sum(0.5 * np.log1p(np.abs(z) ** 2)))
    value = (n - 1) * first - 0.5 * float(np.sum(log_fprime)) + 0.5 * n * math.log(abs(rs.leading_det))
    return EnergyValue(value, SphereModel.RIEMANN, n)


def riemann_energy_to_s2(v: EnergyValue, N: int | None = None) -> EnergyValue:
    if v.model is not SphereModel.RIEMANN:
        raise ValueError(f"expected a Riemann-sphere energy, got {v.model.value}")
    n = v.N if N is None else N
    return EnergyValue(v.value - 0.5 * n * (n - 1) * LN2, SphereModel.UNIT_S2, n)
