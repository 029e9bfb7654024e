"""Closed-form analytics against independent high-precision oracles.

The heavy identities here are checked live against mpmath at 40+ digits,
not against frozen constants, so the tests stay honest about where each
expected value comes from.
"""

import math

import mpmath as mp
import numpy as np
import pytest

from axiswalk import _backend
from axiswalk._kernel_py import MODE_EXCURSION
from axiswalk.analytics import (
    ComputationBudgetError,
    DivergentSeriesError,
    OracleTailError,
    arcsine_cdf,
    closed_form_radius,
    constants,
    correction_gain,
    first_passage_pmf,
    first_passage_tail_constant,
    lazy_first_passage,
    mean_recurrence,
    renewal_count_reference,
    renewal_limit_oracle,
    rho_mean_exact,
    rho_moment_exact,
    rho_survival,
    sample_from,
    theorem_left_tail,
    theorem_right_tail_expected,
    theorem_scaling,
)
from axiswalk.models import RngStream


def mp_survival(x, alpha, k, dps=40):
    """Outward-move survival product at dps digits, independently."""
    with mp.workdps(dps):
        prod = mp.mpf(1)
        for m in range(k + 1):
            prod *= 1 - 1 / (2 * mp.mpf(x + m) ** alpha)
        return float(prod)


def mp_mean_exit(x, alpha, dps=30, floor=1e-25):
    """Mean exit radius x + sum of survivals, summed until the product dies."""
    with mp.workdps(dps):
        total = mp.mpf(x)
        prod = mp.mpf(1)
        m = 0
        while True:
            prod *= 1 - 1 / (2 * mp.mpf(x + m) ** alpha)
            total += prod
            if prod < floor:
                return float(total)
            m += 1


class TestRhoSurvival:
    @pytest.mark.parametrize("alpha", [0.2, 0.5, 1.0, 3.0])
    def test_first_factor_from_distance_one(self, alpha):
        assert rho_survival(1, alpha, 0) == 0.5

    def test_two_factor_value(self):
        expect = 0.5 * (1 - 1 / (2 * math.sqrt(2)))
        assert rho_survival(1, 0.5, 1) == pytest.approx(expect, abs=1e-15)
        assert expect == pytest.approx(0.3232233047033631, abs=1e-15)

    def test_monotone_in_k(self):
        vals = [rho_survival(3, 0.4, k) for k in range(25)]
        assert all(a > b > 0 for a, b in zip(vals, vals[1:]))

    def test_against_mpmath_long_product(self):
        got = rho_survival(10**6, 0.3, 10**4)
        want = mp_survival(10**6, 0.3, 10**4)
        assert got == pytest.approx(want, rel=1e-12)

    def test_against_mpmath_small_state(self):
        got = rho_survival(2, 0.7, 500)
        want = mp_survival(2, 0.7, 500)
        assert got == pytest.approx(want, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            rho_survival(0, 0.3, 1)
        with pytest.raises(ValueError):
            rho_survival(1.5, 0.3, 1)
        with pytest.raises(ValueError):
            rho_survival(1, 0.0, 1)
        with pytest.raises(ValueError):
            rho_survival(1, 0.3, -1)


class TestRhoMoments:
    def test_mean_against_mpmath(self):
        got = rho_mean_exact(1000, 0.3)
        want = mp_mean_exit(1000, 0.3)
        assert got == pytest.approx(want, rel=1e-9)

    def test_mean_against_mpmath_small(self):
        got = rho_mean_exact(1, 0.5)
        want = mp_mean_exit(1, 0.5, floor=1e-28)
        assert got == pytest.approx(want, rel=1e-10)

    def test_first_moment_equals_mean(self):
        a = rho_mean_exact(40, 0.35)
        b = rho_moment_exact(40, 0.35, 1.0)
        assert a == pytest.approx(b, rel=1e-14)

    def test_second_moment_dominates_mean_squared(self):
        m1 = rho_mean_exact(10, 0.4)
        m2 = rho_moment_exact(10, 0.4, 2.0)
        assert m2 > m1**2

    def test_mean_exceeds_start(self):
        assert rho_mean_exact(7, 0.6) > 7.0

    def test_divergent_for_alpha_one(self):
        with pytest.raises(DivergentSeriesError):
            rho_mean_exact(1000, 1.0)

    def test_budget_error_near_one(self):
        with pytest.raises(ComputationBudgetError):
            rho_mean_exact(1000, 0.95)

    def test_validation(self):
        with pytest.raises(ValueError):
            rho_mean_exact(0, 0.3)
        with pytest.raises(ValueError):
            rho_moment_exact(5, 0.3, 0.0)

    def test_mean_matches_simulation(self):
        # single boundary visit from (50, 0): simulated exit radius vs series
        reps = 4000
        exact = rho_mean_exact(50, 0.3)
        vals = np.empty(reps)
        for r in range(reps):
            res = _backend.run_walk(
                RngStream(606, r).bit_generator(),
                kind=0,
                alpha=0.3,
                x0=50,
                y0=0,
                mode=MODE_EXCURSION,
                limit=1,
                z_exit_limit=1,
            )
            vals[r] = res["z_exit"][0]
        se = vals.std(ddof=1) / math.sqrt(reps)
        assert abs(vals.mean() - exact) < 4 * se


class TestFirstPassage:
    def test_atoms_from_height_one(self):
        d = first_passage_pmf(1, 64)
        assert d.pmf[0] == pytest.approx(0.25, abs=1e-15)
        assert d.pmf[1] == pytest.approx(0.125, abs=1e-15)
        assert d.survival(0) == 1.0
        assert d.survival(1) == pytest.approx(0.75, abs=1e-14)

    def test_atoms_from_height_two(self):
        d = first_passage_pmf(2, 64)
        assert d.pmf[0] == 0.0
        assert d.pmf[1] == pytest.approx(1 / 16, abs=1e-15)

    def test_single_atom_against_mpmath(self):
        d = first_passage_pmf(3, 200)
        k = 137
        with mp.workdps(40):
            want = float(mp.mpf(3) / k * mp.binomial(2 * k, k - 3) / mp.mpf(2) ** (2 * k))
        assert d.pmf[k - 1] == pytest.approx(want, rel=1e-12)

    def test_mass_accounting(self):
        d = first_passage_pmf(1, 10_000)
        total = float(d.pmf.sum())
        assert total < 1.0
        assert d.tail_lower <= 1.0 - total <= d.tail_upper

    @pytest.mark.parametrize("h", [1, 2, 3])
    def test_dp_matches_closed_form(self, h):
        n = 4000
        closed = first_passage_pmf(h, n)
        dp = lazy_first_passage(h, n)
        assert np.max(np.abs(closed.pmf - dp.pmf)) < 1e-12
        closed_tail = 1.0 - float(closed.pmf.sum())
        assert dp.tail_lower - 1e-9 <= closed_tail <= dp.tail_upper + 1e-9

    def test_tail_constant(self):
        d = first_passage_pmf(1, 200_000)
        assert first_passage_tail_constant(d) == pytest.approx(
            2.0 / math.sqrt(math.pi), abs=1e-4
        )

    def test_survival_bounds(self):
        d = first_passage_pmf(1, 16)
        assert d.survival(-5) == 1.0
        with pytest.raises(ValueError):
            d.survival(17)

    def test_validation(self):
        with pytest.raises(ValueError):
            first_passage_pmf(0, 5)
        with pytest.raises(ValueError):
            lazy_first_passage(3, 10, height_cap=3)


class TestSampleFrom:
    def test_sample_statistics(self):
        n_max = 500
        d = first_passage_pmf(1, n_max)
        rng = RngStream(17, 0).generator()
        draws = sample_from(d, rng, 40_000)
        assert draws.min() >= 1.0
        in_support = draws <= n_max
        assert np.mean(draws[in_support] == 1.0) == pytest.approx(
            0.25 / d.pmf.sum(), abs=0.01
        )
        tail_frac = np.mean(~in_support)
        expect_tail = 0.5 * (d.tail_lower + d.tail_upper)
        assert tail_frac == pytest.approx(expect_tail, abs=0.008)
        # extension draws really extend: some mass well beyond support
        assert draws.max() > 4 * n_max

    def test_support_draws_are_integers(self):
        d = first_passage_pmf(1, 100)
        rng = RngStream(18, 0).generator()
        draws = sample_from(d, rng, 5000)
        ins = draws[draws <= 100]
        assert np.all(ins == np.round(ins))


class TestRenewalOracle:
    def test_oracle_shape_and_determinism(self):
        a = renewal_limit_oracle(200, 2000, seed=77)
        b = renewal_limit_oracle(200, 2000, seed=77)
        assert a.replicas == 2000
        assert len(a.samples) == 2000
        assert np.all(np.diff(a.samples) >= 0)
        np.testing.assert_array_equal(a.samples, b.samples)
        assert a.samples.min() > 0

    def test_oracle_cdf(self):
        o = renewal_limit_oracle(100, 1000, seed=78)
        assert o.cdf(0.0) == 0.0
        assert o.cdf(float(o.samples[-1])) == 1.0
        grid = np.linspace(0, float(o.samples[-1]), 50)
        vals = o.cdf(grid)
        assert np.all(np.diff(vals) >= 0)

    def test_refuses_fat_truncation_tail(self):
        with pytest.raises(OracleTailError):
            renewal_limit_oracle(10, 10, seed=1, truncation=1000, max_tail_mass=1e-3)

    def test_count_reference_monotone(self):
        probs = renewal_count_reference(10_000, [0.05, 0.2, 0.5], replicas=3000, seed=9)
        assert np.all((probs >= 0) & (probs <= 1))
        assert probs[0] <= probs[1] <= probs[2]


class TestConstants:
    def test_regimes(self):
        assert constants(0.2).regime == "subcritical"
        assert constants(0.5).regime == "critical"
        assert constants(0.7).regime == "supercritical"
        assert constants(1.0).regime == "ballistic"
        assert constants(1.5).regime == "ballistic"

    def test_growth_constants(self):
        c = constants(0.25)
        assert c.growth_rate == pytest.approx(1.5 ** (4 / 3), rel=1e-15)
        assert c.growth_rate == pytest.approx(1.7170713638299977, rel=1e-14)
        assert c.growth_exponent == pytest.approx(4 / 3)
        assert c.time_exponent == pytest.approx(2 / 3)
        c = constants(0.2)
        assert c.growth_rate == pytest.approx(1.6 ** 1.25, rel=1e-15)
        assert c.growth_exponent == 1.25
        assert c.time_exponent == 0.625
        assert c.correction_exponent == pytest.approx(0.75)

    def test_ballistic_has_no_growth_law(self):
        c = constants(1.2)
        assert c.growth_rate is None
        assert c.time_exponent is None

    def test_entry_tail_constant_documented_value(self):
        assert constants(0.3).entry_tail_constant == pytest.approx(
            8.0 / math.sqrt(math.pi), rel=1e-15
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            constants(0.0)
        with pytest.raises(ValueError):
            constants(4.5)


class TestRadiusGrowth:
    def test_mean_recurrence_is_the_stated_iteration(self):
        alpha, c_est = 0.3, -0.4
        u = mean_recurrence(alpha, c_est, 50, u1=2.0)
        v = 2.0
        for i in range(1, 50):
            v = v + 2.0 * v**alpha + c_est
            assert u[i] == v
        assert u[0] == 2.0
        assert len(u) == 50

    def test_closed_form_tracks_recurrence(self):
        alpha = 0.2
        u = mean_recurrence(alpha, 0.0, 20_000)
        ref = closed_form_radius(alpha, 0.0, np.arange(1, 20_001))
        ratio = u[-1] / ref[-1]
        assert ratio == pytest.approx(1.0, abs=0.02)

    def test_correction_gain_formula(self):
        c = constants(0.2)
        assert correction_gain(0.2, -0.5) == pytest.approx(
            -0.5 / (2.0 * c.growth_rate**0.2), rel=1e-14
        )

    def test_corrected_form_tracks_offset_recurrence(self):
        alpha, c_est = 0.2, -0.8
        u = mean_recurrence(alpha, c_est, 20_000)
        g = correction_gain(alpha, c_est)
        ref = closed_form_radius(alpha, g, 20_000)
        assert u[-1] / ref == pytest.approx(1.0, abs=0.02)

    def test_validation(self):
        with pytest.raises(ValueError):
            mean_recurrence(0.3, 0.0, 0)
        with pytest.raises(ValueError):
            mean_recurrence(0.3, 0.0, 5, u1=0.0)
        with pytest.raises(ValueError):
            closed_form_radius(1.2, 0.0, 5)
        with pytest.raises(ValueError):
            closed_form_radius(0.3, 0.0, 0)
        with pytest.raises(ValueError):
            closed_form_radius(0.3, -5.0, 1)
        with pytest.raises(ValueError):
            correction_gain(1.0, 0.0)


class TestArcsine:
    def test_known_values(self):
        assert arcsine_cdf(0.0) == 0.0
        assert arcsine_cdf(1.0) == pytest.approx(1.0, abs=1e-15)
        assert arcsine_cdf(0.5) == pytest.approx(0.5, abs=1e-15)
        assert arcsine_cdf(0.25) == pytest.approx(1 / 3, abs=1e-15)

    def test_monotone_array(self):
        grid = np.linspace(0, 1, 101)
        vals = arcsine_cdf(grid)
        assert np.all(np.diff(vals) > 0)

    def test_domain(self):
        for bad in (-0.1, 1.1, float("nan")):
            with pytest.raises(ValueError):
                arcsine_cdf(bad)


class TestTailPredictions:
    def test_left_tail_formula(self):
        p = theorem_left_tail(0.25, 0.02)
        c = constants(0.25)
        want = c.entry_tail_constant * (0.02 / c.growth_rate) ** 0.375
        assert p.value == pytest.approx(want, rel=1e-14)
        assert not p.saturated

    def test_left_tail_saturates(self):
        p = theorem_left_tail(0.25, 1.0)
        assert p.value > 1.0
        assert p.saturated

    def test_left_tail_validation(self):
        with pytest.raises(ValueError):
            theorem_left_tail(1.0, 0.5)
        with pytest.raises(ValueError):
            theorem_left_tail(0.25, 0.0)

    def test_right_tail_is_decreasing_in_level(self):
        oracle = renewal_limit_oracle(100, 1500, seed=12)
        vals = [theorem_right_tail_expected(0.25, a, oracle) for a in (2.0, 3.0, 5.0)]
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert vals[0] >= vals[1] >= vals[2]

    def test_scaling(self):
        assert theorem_scaling(0.25, 10_000) == pytest.approx(10_000 ** (2 / 3))
        np.testing.assert_allclose(
            theorem_scaling(0.2, [100, 10_000]), [100**0.625, 10_000**0.625]
        )
        with pytest.raises(ValueError):
            theorem_scaling(1.5, 100)
