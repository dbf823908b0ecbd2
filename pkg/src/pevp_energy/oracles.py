"""Independent checks of the intermediate identities behind the energy formula.

Monte Carlo estimators for the random-determinant moments, the density of
``det A`` at zero, the radial law of the roots and the first term of the
energy decomposition; a deterministic quadrature of the Kac-Rice integral for
the second term; and the end-to-end energy estimator.

Each ``mc_*`` function consumes one :class:`~pevp_energy.sampling.RngStream`
sequentially, so a rerun with a fresh stream of the same id is bit-identical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, stats

from . import linalg, theory
from .pevp import EnsembleParams, pevp_roots
from .sampling import RngStream, sample_matrices
from .sphere_energy import (
    CoincidentPoints,
    RepeatedRoots,
    SphereModel,
    configuration_from_roots,
    energy_three_term,
    log_energy,
    riemann_energy_to_s2,
)

__all__ = [
    "MCEstimate",
    "InsufficientHits",
    "TrialEnergy",
    "mc_log_det",
    "mc_det_sq_log_det",
    "mc_det_sq",
    "mc_density_at_zero",
    "mc_radial_law",
    "mc_first_term",
    "quad_kac_rice_second_term",
    "kac_rice_integrand",
    "energy_trial",
    "mc_energy",
    "radial_cdf",
    "summarize_energies",
]

_BLOCK = 1 << 16
_TINY = 1e-300


class InsufficientHits(RuntimeError):
    pass


@dataclass
class MCEstimate:
    mean: float
    stderr: float
    trials: int
    target: float
    excluded: int = 0
    diagnostics: dict = field(default_factory=dict)
    samples: np.ndarray | None = field(default=None, repr=False)

    @property
    def z_score(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.mean == self.target else math.copysign(math.inf, self.mean - self.target)
        return (self.mean - self.target) / self.stderr

    def passes(self, z_max: float = 5.0, allowance: float = 0.0) -> bool:
        return abs(self.mean - self.target) <= z_max * self.stderr + allowance


def _estimate(values: np.ndarray, target: float, excluded: int = 0, heavy: bool = False, keep=False) -> MCEstimate:
    n = values.size
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1)) if n > 1 else 0.0
    diag = {"std": std}
    if heavy:
        diag["max_sample"] = float(np.max(values))
        diag["kurtosis"] = float(stats.kurtosis(values))
    return MCEstimate(mean, std / math.sqrt(n), n, target, excluded, diag, values if keep else None)


def _det_moduli(r: int, trials: int, s: RngStream, sigma2: float = 1.0, right=None) -> np.ndarray:
    out = np.empty(trials)
    done = 0
    while done < trials:
        k = min(_BLOCK, trials - done)
        g = sample_matrices(s, k, r, sigma2)
        if right is not None:
            g = g @ right
        out[done : done + k] = np.abs(linalg.det_batch(g))
        done += k
    return out


def _split_tiny(dets: np.ndarray):
    ok = dets >= _TINY
    return dets[ok], int(dets.size - ok.sum())


def mc_log_det(r: int, trials: int, s: RngStream) -> MCEstimate:
    """``E ln|det G|`` for an ``r x r`` standard complex Gaussian ``G``."""
    if trials < 100:
        raise ValueError("mc_log_det needs at least 100 trials")
    dets, excluded = _split_tiny(_det_moduli(r, trials, s))
    target = theory.expected_log_det(r)
    return _estimate(np.log(dets), target, excluded)


def mc_det_sq_log_det(r: int, trials: int, s: RngStream, m=None) -> MCEstimate:
    """``E |det GM|^2 ln|det GM|``, with ``M`` the identity unless given.

    Heavy tailed; the diagnostics report kurtosis and the largest sample.
    """
    if trials < 10_000:
        raise ValueError("mc_det_sq_log_det needs at least 10^4 trials")
    if m is None:
        dets, abs_det_m = _det_moduli(r, trials, s), 1.0
    else:
        m = linalg.as_matrix(m)
        if m.shape != (r, r):
            raise ValueError(f"M must be {r}x{r}")
        dets = _det_moduli(r, trials, s, right=m)
        abs_det_m = abs(linalg.det(m))
    dets, excluded = _split_tiny(dets)
    target = theory.expected_det_sq_log_det(r, abs_det_m)
    return _estimate(dets**2 * np.log(dets), target, excluded, heavy=True)


def mc_det_sq(r: int, trials: int, s: RngStream) -> MCEstimate:
    if trials < 10_000:
        raise ValueError("mc_det_sq needs at least 10^4 trials")
    dets = _det_moduli(r, trials, s)
    return _estimate(dets**2, theory.expected_det_sq(r), heavy=True)


def mc_density_at_zero(r: int, sigma2: float, eps: float, trials: int, s: RngStream) -> MCEstimate:
    """Density of ``det A`` at 0, ``A`` with i.i.d. ``N_C(0, sigma2)`` entries.

    The estimator ``P(|det A| < eps) / (pi eps^2)`` is the density averaged
    over a disk, so it carries an ``O(eps^2)`` smoothing bias.  The diagnostics
    hold the same estimator at ``eps/2`` and the Richardson combination of the
    two.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    dets = _det_moduli(r, trials, s, sigma2)
    hits = int(np.count_nonzero(dets < eps))
    if hits < 50:
        raise InsufficientHits(f"only {hits} samples with |det| < {eps}")
    area = math.pi * eps * eps
    p = hits / trials
    est = p / area
    stderr = math.sqrt(p * (1 - p) / trials) / area
    half_hits = int(np.count_nonzero(dets < eps / 2))
    est_half = half_hits / trials / (area / 4)
    target = theory.det_density_at_zero(r, sigma2)
    diag = {
        "hits": hits,
        "estimate_half_eps": est_half,
        "richardson": (4 * est_half - est) / 3,
    }
    return MCEstimate(est, stderr, trials, target, 0, diag)


def radial_cdf(radius):
    """Fraction of roots expected inside ``|z| <= radius``."""
    rr = np.asarray(radius, dtype=float) ** 2
    return rr / (1 + rr)


def _root_trials(params: EnsembleParams, trials: int, s: RngStream):
    """Non-degenerate root sets of ``trials`` consecutive samples, and the number skipped."""
    kept = []
    for _ in range(trials):
        rs = pevp_roots(s, params)
        if not rs.degenerate:
            kept.append(rs)
    return kept, trials - len(kept)


def mc_radial_law(params: EnsembleParams, trials: int, s: RngStream, radius: float = 1.0) -> MCEstimate:
    """Per-trial fraction of roots in ``|z| <= radius``.

    The diagnostics carry the Kolmogorov-Smirnov statistic of all pooled root
    moduli against ``R^2 / (1 + R^2)`` and its 1% critical value.
    """
    if trials < 1000:
        raise ValueError("mc_radial_law needs at least 10^3 trials")
    root_sets, degenerate = _root_trials(params, trials, s)
    moduli = [np.abs(rs.roots) for rs in root_sets]
    fractions = np.array([np.mean(m <= radius) for m in moduli])
    est = _estimate(fractions, float(radial_cdf(radius)), degenerate)
    pooled = np.concatenate(moduli)
    ks = stats.kstest(pooled, radial_cdf)
    est.diagnostics["ks_statistic"] = float(ks.statistic)
    est.diagnostics["ks_critical_1pct"] = float(stats.kstwo.ppf(0.99, pooled.size))
    return est


def mc_first_term(params: EnsembleParams, trials: int, s: RngStream) -> MCEstimate:
    """``E sum_i ln sqrt(1 + |z_i|^2)``."""
    if trials < 1000:
        raise ValueError("mc_first_term needs at least 10^3 trials")
    root_sets, degenerate = _root_trials(params, trials, s)
    vals = np.array([0.5 * np.sum(np.log1p(np.abs(rs.roots) ** 2)) for rs in root_sets])
    return _estimate(vals, params.N / 2, degenerate)


def kac_rice_integrand(rho: float, params: EnsembleParams) -> float:
    """Conditional expectation of ``|F'|^2 ln|F'|`` given ``F(z) = 0``, times the
    density of ``F(z)`` at 0, at ``|z| = rho``.

    Both factors are formed in log space since ``(1 + rho^2)^N`` overflows
    long before the integrand becomes negligible.
    """
    d, r, n = params.d, params.r, params.N
    log_w = math.log1p(rho * rho)
    k = (r + 1) * theory.digamma_int(r + 2) - r - theory.digamma_int(2)
    bracket = k + math.log(d) + (n - 2) * log_w
    log_cond = math.log(n / 2) + (n - 2) * log_w + math.lgamma(r)
    log_density = -math.log(math.pi) - n * log_w - math.lgamma(r)
    return bracket * math.exp(log_cond + log_density)


def quad_kac_rice_second_term(params: EnsembleParams, tol: float = 1e-10) -> float:
    """``integral over C of kac_rice_integrand(|z|) dz`` by adaptive quadrature.

    In polar form with ``t = rho^2 / (1 + rho^2)`` the area element
    ``2 pi rho d rho`` becomes ``pi (1 + rho^2)^2 dt`` on ``[0, 1)``.
    """

    def f(t):
        if t >= 1.0:
            t = math.nextafter(1.0, 0.0)
        rho = math.sqrt(t / (1.0 - t))
        return math.pi * kac_rice_integrand(rho, params) / (1.0 - t) ** 2

    value, err = integrate.quad(f, 0.0, 1.0, epsabs=0.0, epsrel=tol, limit=200)
    if not err <= 10 * tol * max(1.0, abs(value)):
        raise ArithmeticError(f"quadrature did not converge: estimate {value}, error {err}")
    return value


@dataclass(frozen=True)
class TrialEnergy:
    """Unit-sphere energy of one trial by the pairwise sum and by the decomposition."""

    pairwise: float
    three_term: float
    status: str = "ok"


def energy_trial(s: RngStream, params: EnsembleParams) -> TrialEnergy:
    """One sample of the point process and its energy.

    ``status`` is ``"degenerate"`` (leading block near-singular or QR failure)
    or ``"coincident"`` (two projected points coincide); energies are NaN then.
    """
    rs = pevp_roots(s, params)
    if rs.degenerate:
        return TrialEnergy(math.nan, math.nan, "degenerate")
    try:
        pairwise = log_energy(configuration_from_roots(rs.roots, SphereModel.UNIT_S2)).value
        three = riemann_energy_to_s2(energy_three_term(rs)).value
    except (CoincidentPoints, RepeatedRoots):
        return TrialEnergy(math.nan, math.nan, "coincident")
    return TrialEnergy(pairwise, three)


def summarize_energies(trials: list[TrialEnergy], params: EnsembleParams) -> MCEstimate:
    """Aggregate trials in the order given; excluded trials are counted by status."""
    good = [t for t in trials if t.status == "ok"]
    if len(good) < 2:
        raise ValueError("fewer than two usable trials")
    pairwise = np.array([t.pairwise for t in good])
    three = np.array([t.three_term for t in good])
    target = theory.expected_energy(params).s2_value
    est = _estimate(pairwise, target, len(trials) - len(good), keep=True)
    est.diagnostics["degenerate"] = sum(t.status == "degenerate" for t in trials)
    est.diagnostics["coincident"] = sum(t.status == "coincident" for t in trials)
    est.diagnostics["max_three_term_rel_gap"] = float(np.max(np.abs(three - pairwise) / (1 + np.abs(pairwise))))
    return est


def mc_energy(params: EnsembleParams, trials: int, s: RngStream) -> MCEstimate:
    """Empirical mean unit-sphere energy against the closed form.

    ``samples`` holds the per-trial pairwise energies of the usable trials.
    """
    if trials < 100:
        raise ValueError("mc_energy needs at least 100 trials")
    return summarize_energies([energy_trial(s, params) for _ in range(trials)], params)
