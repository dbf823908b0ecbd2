import math

import numpy as np
import pytest

from pevp_energy.harness.experiment import enumerate_divisor_pairs
from pevp_energy.oracles import (
    InsufficientHits,
    MCEstimate,
    TrialEnergy,
    kac_rice_integrand,
    mc_density_at_zero,
    mc_det_sq,
    mc_det_sq_log_det,
    mc_energy,
    mc_first_term,
    mc_log_det,
    mc_radial_law,
    quad_kac_rice_second_term,
    radial_cdf,
    summarize_energies,
)
from pevp_energy.pevp import EnsembleParams
from pevp_energy.sampling import substream
from pevp_energy.theory import EULER_GAMMA, digamma_int, expected_three_terms


class TestMCEstimate:
    def test_z_score(self):
        assert MCEstimate(1.5, 0.25, 100, 1.0).z_score == 2.0

    def test_zero_stderr(self):
        assert MCEstimate(1.0, 0.0, 10, 1.0).z_score == 0.0
        assert MCEstimate(2.0, 0.0, 10, 1.0).z_score == math.inf

    def test_passes_with_allowance(self):
        e = MCEstimate(1.1, 0.01, 100, 1.0)
        assert not e.passes(5)
        assert e.passes(5, allowance=0.06)


class TestLogDet:
    @pytest.mark.parametrize("r, target", [(1, -EULER_GAMMA / 2), (3, 1.5 * (5 / 6 - EULER_GAMMA))])
    def test_against_closed_form(self, r, target):
        e = mc_log_det(r, 100_000, substream(101, r))
        assert e.target == pytest.approx(target, rel=1e-14)
        assert abs(e.z_score) <= 4

    def test_bit_identical_rerun(self):
        a = mc_log_det(2, 100_000, substream(102, 0))
        b = mc_log_det(2, 100_000, substream(102, 0))
        assert a.mean == b.mean and a.stderr == b.stderr

    def test_too_few_trials(self):
        with pytest.raises(ValueError):
            mc_log_det(2, 99, substream(0, 0))


class TestDetSqLogDet:
    def test_scalar_target(self):
        e = mc_det_sq_log_det(1, 10_000, substream(103, 0))
        assert e.target == pytest.approx((1 - EULER_GAMMA) / 2, rel=1e-14)

    def test_r2(self):
        e = mc_det_sq_log_det(2, 200_000, substream(103, 2))
        assert e.target == pytest.approx(3 * digamma_int(4) - 2 - digamma_int(2), rel=1e-14)
        assert abs(e.z_score) <= 5
        assert {"max_sample", "kurtosis"} <= e.diagnostics.keys()

    def test_identity_M_is_same_code_path(self):
        a = mc_det_sq_log_det(3, 20_000, substream(104, 0))
        b = mc_det_sq_log_det(3, 20_000, substream(104, 0), m=np.eye(3))
        assert a.mean == b.mean and a.target == b.target

    def test_fixed_M(self):
        rng = np.random.default_rng(5)
        m = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / 1.5
        e = mc_det_sq_log_det(2, 200_000, substream(105, 0), m=m)
        assert abs(e.z_score) <= 5

    def test_M_shape(self):
        with pytest.raises(ValueError):
            mc_det_sq_log_det(2, 10_000, substream(0, 0), m=np.eye(3))

    def test_too_few_trials(self):
        with pytest.raises(ValueError):
            mc_det_sq_log_det(2, 9_999, substream(0, 0))


class TestDetSq:
    @pytest.mark.parametrize("r", [1, 2])
    def test_factorial(self, r):
        e = mc_det_sq(r, 100_000, substream(106, r))
        assert e.target == math.factorial(r)
        assert abs(e.z_score) <= 5


class TestDensityAtZero:
    def test_r1(self):
        e = mc_density_at_zero(1, 1.0, 0.05, 1_000_000, substream(107, 1))
        assert e.target == pytest.approx(1 / math.pi)
        assert e.passes(4, allowance=0.02 * e.target)

    def test_r2_scaled(self):
        e = mc_density_at_zero(2, 4.0, 0.2, 1_000_000, substream(107, 2))
        # sigma^(2r) = 4^2 = 16
        assert e.target == pytest.approx(1 / (16 * math.pi))
        assert e.passes(4, allowance=0.02 * e.target)
        assert {"hits", "estimate_half_eps", "richardson"} <= e.diagnostics.keys()

    def test_insufficient_hits(self):
        with pytest.raises(InsufficientHits):
            mc_density_at_zero(1, 1.0, 0.001, 10_000, substream(0, 0))

    def test_bad_eps(self):
        with pytest.raises(ValueError):
            mc_density_at_zero(1, 1.0, 0.0, 10_000, substream(0, 0))


class TestRootOracles:
    def test_radial_cdf(self):
        assert radial_cdf(1.0) == 0.5
        assert radial_cdf(math.sqrt(3)) == pytest.approx(0.75)

    def test_radial_law(self):
        e = mc_radial_law(EnsembleParams(2, 3), 2_000, substream(108, 0))
        assert e.target == 0.5
        assert abs(e.z_score) <= 4
        assert e.diagnostics["ks_statistic"] < e.diagnostics["ks_critical_1pct"]

    def test_radial_law_other_radius(self):
        e = mc_radial_law(EnsembleParams(3, 1), 2_000, substream(108, 1), radius=math.sqrt(3))
        assert e.target == pytest.approx(0.75)
        assert abs(e.z_score) <= 4

    @pytest.mark.parametrize("d, r", [(2, 3), (6, 1)])
    def test_first_term(self, d, r):
        e = mc_first_term(EnsembleParams(d, r), 10_000, substream(109, d))
        assert e.target == 3
        assert abs(e.z_score) <= 4

    def test_guards(self):
        with pytest.raises(ValueError):
            mc_radial_law(EnsembleParams(1, 2), 999, substream(0, 0))
        with pytest.raises(ValueError):
            mc_first_term(EnsembleParams(1, 2), 999, substream(0, 0))


class TestKacRice:
    @pytest.mark.parametrize("d, r", [(1, 1), (5, 2), (2, 3)])
    def test_examples(self, d, r):
        p = EnsembleParams(d, r)
        assert quad_kac_rice_second_term(p) == pytest.approx(expected_three_terms(p)[1], rel=1e-8)

    def test_all_pairs_up_to_60(self):
        for N in range(1, 61):
            for d, r in enumerate_divisor_pairs(N):
                p = EnsembleParams(d, r)
                assert quad_kac_rice_second_term(p) == pytest.approx(expected_three_terms(p)[1], rel=1e-8)

    def test_integrand_at_origin(self):
        # per unit area at z = 0: (N/2) (K + ln d) / pi
        p = EnsembleParams(2, 2)
        k = 3 * digamma_int(4) - 2 - digamma_int(2)
        assert kac_rice_integrand(0.0, p) == pytest.approx(2 * (k + math.log(2)) / math.pi, rel=1e-14)


class TestEnergy:
    @pytest.mark.parametrize("d, r", [(1, 12), (12, 1), (3, 4)])
    def test_small_run(self, d, r):
        e = mc_energy(EnsembleParams(d, r), 1_000, substream(110, d))
        assert abs(e.z_score) <= 4
        assert e.samples.size == e.trials
        assert e.diagnostics["max_three_term_rel_gap"] <= 1e-6

    def test_too_few_trials(self):
        with pytest.raises(ValueError):
            mc_energy(EnsembleParams(1, 2), 99, substream(0, 0))

    def test_excluded_trials_counted(self):
        trials = [TrialEnergy(-1.0, -1.0), TrialEnergy(-2.0, -2.0), TrialEnergy(math.nan, math.nan, "degenerate"),
                  TrialEnergy(math.nan, math.nan, "coincident")]
        e = summarize_energies(trials, EnsembleParams(1, 2))
        assert e.trials == 2 and e.excluded == 2
        assert e.diagnostics["degenerate"] == 1 and e.diagnostics["coincident"] == 1
        assert e.mean == -1.5
