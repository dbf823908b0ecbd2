"""Energy campaigns over the divisor pairs of ``N``."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..oracles import TrialEnergy, energy_trial
from ..pevp import EnsembleParams
from ..sampling import substream
from ..theory import expected_energy

__all__ = [
    "ExperimentConfig",
    "EnergyReport",
    "LinearFit",
    "enumerate_divisor_pairs",
    "run_experiment",
    "fit_linear_in_d",
]

# trials per work item handed to a worker process
_CHUNK = 500


def enumerate_divisor_pairs(N: int) -> list[tuple[int, int]]:
    """All ``(d, r)`` with ``d * r == N``, ascending in ``d``."""
    if N < 1:
        raise ValueError("N must be positive")
    return [(d, N // d) for d in range(1, N + 1) if N % d == 0]


@dataclass(frozen=True)
class ExperimentConfig:
    N: int
    trials: int
    master_seed: int
    pairs: tuple | None = None  # None means every divisor pair
    violin_bins: int = 60
    output_path: Path | None = None
    format: str = "csv"
    workers: int = 1

    def __post_init__(self):
        if self.N < 1 or self.trials < 2 or self.violin_bins < 1 or self.workers < 1:
            raise ValueError("N, violin_bins and workers must be positive and trials at least 2")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        for d, r in self.resolved_pairs():
            if d * r != self.N:
                raise ValueError(f"pair ({d}, {r}) does not multiply to N={self.N}")

    def resolved_pairs(self) -> list[tuple[int, int]]:
        if self.pairs is None:
            return enumerate_divisor_pairs(self.N)
        return sorted({(int(d), int(r)) for d, r in self.pairs})


@dataclass
class EnergyReport:
    params: EnsembleParams
    trials_completed: int
    trials_degenerate: int
    empirical_mean: float
    empirical_std: float
    stderr: float
    theory_s2: float
    difference: float
    z_score: float
    violin: list = field(default_factory=list)
    samples: np.ndarray | None = field(default=None, repr=False)

    @property
    def requested(self) -> int:
        return self.trials_completed + self.trials_degenerate


def _run_chunk(seed: int, d: int, r: int, first: int, count: int) -> list[TrialEnergy]:
    params = EnsembleParams(d, r)
    return [energy_trial(substream(seed, first + k), params) for k in range(count)]


def _violin(samples: np.ndarray, bins: int) -> list[tuple[float, int]]:
    if samples.size == 0:
        return []
    counts, edges = np.histogram(samples, bins=bins)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return [(float(c), int(n)) for c, n in zip(centers, counts)]


def _report(params: EnsembleParams, trials: list[TrialEnergy], bins: int) -> EnergyReport:
    values = np.array([t.pairwise for t in trials if t.status == "ok"])
    n = values.size
    theory_s2 = expected_energy(params).s2_value
    if n >= 2:
        mean = float(np.mean(values))
        std = float(np.std(values, ddof=1))
        se = std / math.sqrt(n)
    else:
        mean = float(values[0]) if n else math.nan
        std = se = math.nan
    diff = mean - theory_s2
    z = diff / se if se > 0 else (0.0 if diff == 0 else math.nan)
    return EnergyReport(params, n, len(trials) - n, mean, std, se, theory_s2, diff, z, _violin(values, bins), values)


def run_experiment(cfg: ExperimentConfig) -> list[EnergyReport]:
    """Run ``cfg.trials`` trials for every pair, sorted by ``d``.

    Trial ``t`` of the ``p``-th pair draws from ``substream(seed, p * trials + t)``
    and results are reassembled in index order, so the output does not depend
    on ``cfg.workers``.
    """
    pairs = cfg.resolved_pairs()
    jobs = []
    for p, (d, r) in enumerate(pairs):
        base = p * cfg.trials
        for start in range(0, cfg.trials, _CHUNK):
            jobs.append((cfg.master_seed, d, r, base + start, min(_CHUNK, cfg.trials - start)))
    if cfg.workers == 1:
        results = [_run_chunk(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_chunk, *zip(*jobs)))
    by_pair: dict[tuple[int, int], list[TrialEnergy]] = {pair: [] for pair in pairs}
    for job, chunk in zip(jobs, results):
        by_pair[(job[1], job[2])].extend(chunk)
    return [_report(EnsembleParams(d, r), by_pair[(d, r)], cfg.violin_bins) for d, r in pairs]


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    residual_rms: float
    slope_stderr: float


def fit_linear_in_d(reports, field: str = "empirical_mean") -> LinearFit:
    """Ordinary least squares of ``field`` against ``d``.

    ``slope_stderr`` propagates the per-report standard errors through the
    OLS weights (zero when fitting ``theory_s2``).
    """
    reports = list(reports)
    if len(reports) < 3:
        raise ValueError("need at least 3 reports to fit")
    d = np.array([rep.params.d for rep in reports], dtype=float)
    y = np.array([getattr(rep, field) for rep in reports], dtype=float)
    dc = d - d.mean()
    sxx = float(np.sum(dc * dc))
    if sxx == 0:
        raise ValueError("all reports share the same d")
    weights = dc / sxx
    slope = float(np.sum(weights * y))
    intercept = float(y.mean() - slope * d.mean())
    resid = y - (intercept + slope * d)
    if field == "empirical_mean":
        se = np.array([rep.stderr for rep in reports], dtype=float)
        slope_se = float(math.sqrt(np.sum(weights**2 * se**2)))
    else:
        slope_se = 0.0
    return LinearFit(slope, intercept, float(math.sqrt(np.mean(resid**2))), slope_se)
