"""Closed-form expectations for the polynomial-eigenvalue point process.

All logarithms are natural.  Digamma is only ever needed at positive
integers, where ``psi(n) = -gamma + H_{n-1}`` is evaluated exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .pevp import EnsembleParams

__all__ = [
    "EULER_GAMMA",
    "KAPPA",
    "C_LOW",
    "C_HIGH",
    "TheoryConstants",
    "TheoryPrediction",
    "digamma_int",
    "expected_energy",
    "expected_three_terms",
    "expected_energy_shub_smale",
    "expected_energy_spherical",
    "asymptotic_energy_s2",
    "expected_log_det",
    "expected_det_sq",
    "expected_det_sq_log_det",
    "det_density_at_zero",
    "conditional_fprime_moment",
    "min_energy_reference",
]

EULER_GAMMA = 0.5772156649015329
LN2 = math.log(2.0)
KAPPA = 0.5 - LN2
C_LOW = LN2 / 2 - 3.0 / 8.0
C_HIGH = LN2 + 0.25 * math.log(2.0 / 3.0) + 1.5 * math.log(math.sqrt(math.pi) / math.gamma(1.0 / 3.0))


@dataclass(frozen=True)
class TheoryConstants:
    kappa: float = KAPPA
    gamma_euler: float = EULER_GAMMA
    C_low: float = C_LOW
    C_high: float = C_HIGH


@dataclass(frozen=True)
class TheoryPrediction:
    params: EnsembleParams
    riemann_value: float
    s2_value: float
    term_first: float
    term_second: float
    term_third: float


@lru_cache(maxsize=4096)
def digamma_int(n: int) -> float:
    """Digamma at a positive integer, with the harmonic sum correctly rounded."""
    if int(n) != n or n < 1:
        raise ValueError(f"digamma_int needs a positive integer, got {n}")
    n = int(n)
    if n == 1:
        return -EULER_GAMMA
    harmonic = math.fsum(1.0 / np.arange(n - 1, 0, -1, dtype=np.float64))
    return harmonic - EULER_GAMMA


def expected_log_det(r: int) -> float:
    """``E ln|det G|`` for ``r x r`` standard complex Gaussian ``G``."""
    return r * (digamma_int(r + 1) - 1) / 2


def expected_det_sq(r: int) -> float:
    return float(math.factorial(r))


def expected_det_sq_log_det(r: int, abs_det_m: float = 1.0) -> float:
    """``E |det GM|^2 ln|det GM|`` for a fixed ``M`` with ``|det M| = abs_det_m``."""
    k = (r + 1) * digamma_int(r + 2) - r - digamma_int(2)
    return abs_det_m**2 * math.factorial(r) / 2 * (k + math.log(abs_det_m**2))


def det_density_at_zero(r: int, sigma2: float = 1.0) -> float:
    """Density at 0 of ``det A`` for ``A`` with i.i.d. ``N_C(0, sigma2)`` entries."""
    return 1.0 / (math.pi * sigma2**r * math.gamma(r))


def conditional_fprime_moment(rho: float, params: EnsembleParams) -> float:
    """``E(|F'(z)|^2 ln|F'(z)| | F(z) = 0)`` at ``|z| = rho``."""
    d, r, n = params.d, params.r, params.N
    w = 1.0 + rho * rho
    k = (r + 1) * digamma_int(r + 2) - r - digamma_int(2)
    return n * w ** (n - 2) * math.gamma(r) / 2 * (k + math.log(d * w ** (n - 2)))


def expected_three_terms(params: EnsembleParams) -> tuple[float, float, float]:
    """Expectations of ``sum ln sqrt(1+|z_i|^2)``, ``sum ln|F'(z_i)|`` and ``ln|det G_d|``."""
    d, r, n = params.d, params.r, params.N
    first = n / 2
    second = (n / 2) * (n + math.log(d) + (r + 1) * digamma_int(r + 2) - r - digamma_int(2) - 2)
    third = expected_log_det(r)
    return first, second, third


def expected_energy(params: EnsembleParams) -> TheoryPrediction:
    d, r, n = params.d, params.r, params.N
    bracket = 1 + digamma_int(r + 1) - digamma_int(2)
    riemann = n * n / 4 - n * math.log(d) / 4 - (n / 4) * bracket
    s2 = riemann - 0.5 * n * (n - 1) * LN2
    t1, t2, t3 = expected_three_terms(params)
    return TheoryPrediction(params, riemann, s2, t1, t2, t3)


def expected_energy_shub_smale(N: int) -> float:
    """Expected unit-sphere energy of the roots of a degree-``N`` Shub-Smale polynomial."""
    return (KAPPA / 2) * N * N - N * math.log(N) / 4 - (KAPPA / 2) * N


def expected_energy_spherical(N: int) -> float:
    """Exact expected unit-sphere energy of the ``N``-point spherical ensemble."""
    return (KAPPA / 2) * N * N - N * digamma_int(N + 1) / 4 + N * (LN2 / 2 - EULER_GAMMA / 4)


def asymptotic_energy_s2(N: int, d: int) -> float:
    """Large-``r`` expansion of the expected unit-sphere energy (error ``N O(r^-4)``)."""
    if d < 1 or N % d:
        raise ValueError(f"d={d} does not divide N={N}")
    return (KAPPA / 2) * N * N - N * math.log(N) / 4 + N * (LN2 / 2 - EULER_GAMMA / 4) - d / 8 + d * d / (48 * N)


def min_energy_reference(N: int, C: float = C_HIGH) -> float:
    """Leading terms of the minimal unit-sphere energy, without the ``o(N)`` remainder."""
    return (KAPPA / 2) * N * N - N * math.log(N) / 4 + C * N
