"""Revenue estimation: MC, exact formulas, quadrature, benchmark, commensurateness."""

import math

import numpy as np
import pytest
from scipy import integrate

from auction_lab import (
    ComponentExtra,
    DeterministicExtra,
    EqualRevenue,
    EstimateRecord,
    EstimatorConfig,
    Exponential,
    MyersonIroned,
    MyersonRegular,
    PointMass,
    PostedSequence,
    PowerLaw,
    RevenueEstimate,
    SecondPrice,
    SecondPriceAnonymousReserve,
    SecondPriceBidderReserves,
    SecondPriceSampleReserve,
    SecondPriceSubsetReserve,
    TwoPoint,
    Uniform,
    ValuationProfile,
    approximation_ratio,
    best_posted_ladder_two_point,
    build_market,
    commensurateness_check,
    discriminating_benchmark,
    estimate_mc,
    estimate_records_csv,
    expected_revenue_quadrature,
    iron,
    posted_sequence_revenue_exact,
    run,
    second_price_two_point_exact,
    vickrey_revenue_cdf,
    virtual_surplus_gap,
    stream,
)
from auction_lab.errors import (
    DivergentTail,
    InsufficientDivergenceSamples,
    ZeroDenominator,
)
from auction_lab.revenue import _mech_batch

PM, ER = PointMass(1.0), EqualRevenue()


def two_uniform_market():
    return build_market((Uniform(0, 1),), [[1.0], [1.0]])


class TestEstimateMC:
    def test_second_price_two_uniforms(self):
        # oracle: E[min of two U(0,1)] = 1/3
        cfg = EstimatorConfig(seed=5, n_samples=400_000)
        est = estimate_mc(two_uniform_market(), SecondPrice(), (), cfg)
        assert abs(est.mean - 1 / 3) <= 4 * est.std_err
        assert est.method == "mc" and est.n_samples == 400_000

    def test_myerson_two_uniforms_against_quadrature_oracle(self):
        # oracle: E[revenue] = E[virtual surplus] = integral of max(0, 2*max-1)
        oracle, _ = integrate.dblquad(
            lambda v2, v1: max(0.0, 2.0 * max(v1, v2) - 1.0), 0, 1, 0, 1
        )
        assert oracle == pytest.approx(5 / 12, abs=1e-6)
        cfg = EstimatorConfig(seed=6, n_samples=400_000)
        mech = MyersonRegular((Uniform(0, 1), Uniform(0, 1)))
        est = estimate_mc(two_uniform_market(), mech, (), cfg)
        assert abs(est.mean - oracle) <= 4 * est.std_err

    def test_bit_identical_reruns(self):
        cfg = EstimatorConfig(seed=11, n_samples=50_000, n_streams=8)
        market = build_market((Uniform(0, 1), Exponential(1.0)), [[0.5, 0.5]] * 2)
        a = estimate_mc(market, SecondPrice(), (ComponentExtra(0),), cfg)
        b = estimate_mc(market, SecondPrice(), (ComponentExtra(0),), cfg)
        assert a == b

    def test_deterministic_extras_column(self):
        market = two_uniform_market()
        cfg = EstimatorConfig(seed=3, n_samples=10_000)
        est = estimate_mc(market, SecondPrice(), (DeterministicExtra(5.0),), cfg)
        # the extra always wins; price = max of the two uniforms, mean 2/3
        assert abs(est.mean - 2 / 3) <= 4 * est.std_err

    def test_mechanism_errors_propagate_with_sample_range(self):
        market = two_uniform_market()
        cfg = EstimatorConfig(seed=3, n_samples=100)
        with pytest.raises(TypeError) as err:
            estimate_mc(market, "not a mechanism", (), cfg)
        assert err.value.sample_range == (0, 13)  # first non-empty chunk
        assert err.value.stream_index == 0


class TestBatchScalarEquivalence:
    """The vectorized kernels must agree with the scalar mechanisms."""

    @pytest.mark.parametrize(
        "mech",
        [
            SecondPrice(),
            SecondPriceAnonymousReserve(0.4),
            SecondPriceBidderReserves((0.1, 0.6, 0.3)),
            SecondPriceSubsetReserve((0,)),
            MyersonRegular((Uniform(0, 1), Uniform(0, 2), Exponential(1.0))),
            PostedSequence((0.8, 0.2), (1, 0)),
        ],
        ids=lambda m: type(m).__name__,
    )
    def test_winner_and_price_match(self, mech):
        rng = stream(123, 0)
        n = 500
        values = np.column_stack(
            [rng.random(n), 2 * rng.random(n), -np.log(rng.random(n))]
        )
        winner, price = _mech_batch(mech, values, rng)
        for i in range(n):
            out = run(mech, ValuationProfile(tuple(values[i])))
            expect = -1 if out.winner is None else out.winner
            assert winner[i] == expect, f"row {i}"
            assert price[i] == pytest.approx(out.revenue, abs=1e-7), f"row {i}"

    def test_ironed_batch_matches_scalar(self):
        mix = build_market(
            (Uniform(0, 1), Uniform(0, 3)), [[0.6, 0.4], [0.6, 0.4]]
        )
        curves = (iron(mix, 0), iron(mix, 1))
        mech = MyersonIroned(curves)
        rng = stream(77, 0)
        n = 300
        values = np.column_stack([3 * rng.random(n), 3 * rng.random(n)])
        winner, price = _mech_batch(mech, values, rng)
        for i in range(n):
            out = run(mech, ValuationProfile(tuple(values[i])))
            expect = -1 if out.winner is None else out.winner
            assert winner[i] == expect, f"row {i}"
            assert price[i] == pytest.approx(out.revenue, abs=1e-6), f"row {i}"


class TestVickreyRevenueCdf:
    def test_appendix_formula_above_one(self):
        for z in (1.0, 2.0, 7.5):
            got = vickrey_revenue_cdf([ER, ER, ER, PM], z)
            assert got == pytest.approx((z**3 + 3 * z**2) / (z + 1) ** 3, abs=1e-12)

    def test_appendix_formula_below_one(self):
        for z in (0.1, 0.5, 0.99):
            got = vickrey_revenue_cdf([ER, ER, ER, PM], z)
            assert got == pytest.approx(z**3 / (z + 1) ** 3, abs=1e-12)

    def test_two_uniforms_order_statistic_oracle(self):
        # P(second <= z) = F^2 + 2F(1-F) = 2z - z^2 for U(0,1)
        z = 0.5
        assert vickrey_revenue_cdf([Uniform(0, 1), Uniform(0, 1)], z) == pytest.approx(
            0.75, abs=1e-12
        )

    def test_valid_cdf_in_z(self):
        z = np.linspace(0.0, 50.0, 400)
        F = vickrey_revenue_cdf([ER, Exponential(0.7), Uniform(0, 2)], z)
        assert np.all(np.diff(F) >= -1e-12)
        assert F[-1] > 0.99

    def test_needs_two_bidders(self):
        with pytest.raises(ValueError):
            vickrey_revenue_cdf([ER], 1.0)


class TestQuadrature:
    def test_appendix_conditional_value(self):
        est = expected_revenue_quadrature([ER, ER, PM, ER], tol=1e-4)
        assert est.mean == pytest.approx(0.125 + math.log(8.0), abs=1e-3)
        assert est.method == "quadrature" and est.std_err == 0.0

    def test_cross_distribution_duplicates(self):
        est = expected_revenue_quadrature([PM, ER, PM, ER], tol=1e-4)
        assert est.mean == pytest.approx(1.5, abs=1e-3)

    def test_both_deterministic(self):
        est = expected_revenue_quadrature([PM, PM, PM, ER], tol=1e-4)
        assert est.mean == pytest.approx(1.0, abs=1e-6)

    def test_agrees_with_mc(self):
        market = build_market((PM, ER), [[1.0, 0.0], [0.0, 1.0]])
        cfg = EstimatorConfig(seed=19, n_samples=400_000)
        mc = estimate_mc(
            market, SecondPrice(), (ComponentExtra(0), ComponentExtra(1)), cfg
        )
        quad = expected_revenue_quadrature([PM, ER, PM, ER], tol=1e-6)
        assert abs(mc.mean - quad.mean) <= 4 * mc.std_err

    def test_with_reserve_against_closed_form(self):
        # two U(0,1) with reserve 1/2: 5/12 (the monopoly-reserve optimum)
        est = expected_revenue_quadrature(
            [Uniform(0, 1), Uniform(0, 1)], reserve=0.5, tol=1e-8
        )
        assert est.mean == pytest.approx(5 / 12, abs=1e-6)

    def test_divergent_tail(self):
        with pytest.raises(DivergentTail):
            expected_revenue_quadrature([PowerLaw(0.4), PowerLaw(0.4)], tol=1e-6)


class TestPostedAndTwoPointExact:
    def test_posted_exact_matches_mc(self):
        market = build_market((PM, ER), [[1.0, 0.0], [0.0, 1.0]])
        mech = PostedSequence((4.0, 1.0), (1, 0))
        cfg = EstimatorConfig(seed=23, n_samples=300_000)
        mc = estimate_mc(market, mech, (), cfg)
        exact = posted_sequence_revenue_exact([PM, ER], (4.0, 1.0), (1, 0))
        assert exact.mean == pytest.approx(4.0 / 5.0 + (4.0 / 5.0) * 1.0, abs=1e-12)
        assert abs(mc.mean - exact.mean) <= 4 * mc.std_err

    def test_posted_order_must_not_repeat(self):
        with pytest.raises(ValueError):
            posted_sequence_revenue_exact([PM, ER], (1.0, 1.0), (0, 0))

    def test_two_point_exact_against_full_enumeration(self):
        # oracle: enumerate all 2^n outcomes explicitly
        import itertools

        n, dist = 6, TwoPoint(1.0, 36.0, 1.0 / 36.0)
        extras = (1.0, 36.0)
        oracle = 0.0
        for outcome in itertools.product((0, 1), repeat=n):
            prob = math.prod(
                dist.p_hi if o else 1 - dist.p_hi for o in outcome
            )
            pool = sorted([36.0 if o else 1.0 for o in outcome] + list(extras))
            oracle += prob * pool[-2]
        got = second_price_two_point_exact(n, dist, extras)
        assert got.mean == pytest.approx(oracle, rel=1e-12)

    def test_two_point_exact_against_mc(self):
        dist = TwoPoint(1.0, 25.0, 0.04)
        market = build_market((dist,), [[1.0]] * 5)
        cfg = EstimatorConfig(seed=29, n_samples=400_000)
        mc = estimate_mc(market, SecondPrice(), (), cfg)
        exact = second_price_two_point_exact(5, dist)
        assert abs(mc.mean - exact.mean) <= 4 * mc.std_err

    def test_best_posted_ladder(self):
        n, dist = 10, TwoPoint(1.0, 100.0, 0.01)
        est, (prices, order) = best_posted_ladder_two_point(n, dist)
        # closed form: 100 - 99 * 0.99^9 == 100 - 100 * 0.99^10
        assert est.mean == pytest.approx(100.0 - 99.0 * 0.99**9, rel=1e-12)
        assert est.mean == pytest.approx(100.0 * (1.0 - 0.99**10), rel=1e-10)
        assert len(prices) == len(order) <= n
        # the ladder value is achievable by the posted evaluator
        dists = [dist] * n
        again = posted_sequence_revenue_exact(dists, prices, order)
        assert again.mean == pytest.approx(est.mean, rel=1e-12)


class TestDiscriminatingBenchmark:
    def test_single_component_equals_plain_myerson(self):
        market = two_uniform_market()
        cfg = EstimatorConfig(seed=31, n_samples=200_000)
        bench = discriminating_benchmark(market, cfg)
        mech = MyersonRegular((Uniform(0, 1), Uniform(0, 1)))
        direct = estimate_mc(market, mech, (), cfg)
        se = math.hypot(bench.std_err, direct.std_err)
        assert abs(bench.mean - direct.mean) <= 4 * se

    def test_appendix_policies_value(self):
        from auction_lab.experiments import appendix_market, _appendix_policies

        market = appendix_market()
        cfg = EstimatorConfig(seed=1, n_samples=1)
        bench = discriminating_benchmark(market, cfg, policies=_appendix_policies(1e6))
        assert 1.74 <= bench.mean <= 1.7501
        assert bench.method == "exact"

    def test_sampled_coins_agrees_with_enumeration(self):
        market = build_market(
            (Uniform(0, 1), Exponential(1.0)), [[0.5, 0.5]] * 3
        )
        enum_cfg = EstimatorConfig(seed=37, n_samples=300_000)
        samp_cfg = EstimatorConfig(seed=38, n_samples=300_000, profile_cap=2)
        by_enum = discriminating_benchmark(market, enum_cfg)
        by_sampling = discriminating_benchmark(market, samp_cfg)
        se = math.hypot(by_enum.std_err, by_sampling.std_err)
        assert abs(by_enum.mean - by_sampling.mean) <= 4 * se

    def test_irregular_component_needs_policy(self):
        market = build_market((PM, ER), [[0.5, 0.5]] * 2)
        with pytest.raises(ValueError):
            discriminating_benchmark(market, EstimatorConfig(seed=1, n_samples=100))

    def test_benchmark_dominates_ironed_myerson(self):
        # the coin-observing optimum can only beat the non-discriminating one
        from auction_lab import random_mixture_markets

        markets = [
            build_market((Uniform(0, 1), Uniform(0, 3)), [[0.7, 0.3]] * 2)
        ] + random_mixture_markets(seed=97, count=3)
        for j, market in enumerate(markets):
            cfg = EstimatorConfig(seed=41 + j, n_samples=150_000)
            bench = discriminating_benchmark(market, cfg)
            mech = MyersonIroned(tuple(iron(market, i) for i in range(market.n)))
            ironed = estimate_mc(market, mech, (), cfg)
            se = math.hypot(bench.std_err, ironed.std_err)
            assert bench.mean >= ironed.mean - 4 * se, f"market {j}"


class TestApproximationRatio:
    def test_appendix_values(self):
        opt = RevenueEstimate(1.75, 0.0, 0, "exact")
        simple = RevenueEstimate(1.55, 0.0, 0, "quadrature")
        r = approximation_ratio(opt, simple)
        assert r.ratio == pytest.approx(1.75 / 1.55)
        assert r.ratio <= 2.0

    def test_equal_inputs(self):
        e = RevenueEstimate(1.3, 0.01, 1000, "mc")
        assert approximation_ratio(e, e).ratio == pytest.approx(1.0)

    def test_delta_method_against_simulation_oracle(self):
        m1, se1, m2, se2 = 2.0, 0.03, 1.0, 0.02
        rng = stream(43, 0)
        x = m1 + se1 * rng.standard_normal(400_000)
        y = m2 + se2 * rng.standard_normal(400_000)
        empirical_sd = np.std(x / y)
        formula = (m1 / m2) * math.sqrt((se1 / m1) ** 2 + (se2 / m2) ** 2)
        assert empirical_sd == pytest.approx(formula, rel=0.05)
        got = approximation_ratio(
            RevenueEstimate(m1, se1, 10, "mc"), RevenueEstimate(m2, se2, 10, "mc")
        )
        assert got.std_err == pytest.approx(formula, rel=1e-12)

    def test_zero_denominator(self):
        with pytest.raises(ZeroDenominator):
            approximation_ratio(
                RevenueEstimate(1.0, 0.0, 0, "mc"), RevenueEstimate(0.0, 0.0, 0, "mc")
            )


class TestCommensurateness:
    def lemma_market(self):
        # non-i.i.d. regular: bidders pinned to U(0,1) and U(0,2)
        return build_market(
            (Uniform(0, 2), Uniform(0, 1)), [[0.0, 1.0], [1.0, 0.0], [0.0, 1.0]]
        )

    def test_lemma_instance_verdicts(self):
        market = self.lemma_market()
        mech_m = MyersonRegular((Uniform(0, 1), Uniform(0, 2), Uniform(0, 1)))
        extras = (ComponentExtra(0), ComponentExtra(1))
        cfg = EstimatorConfig(seed=47, n_samples=200_000)
        rep = commensurateness_check(market, mech_m, SecondPrice(), extras, cfg)
        assert rep.divergence_count >= 100
        assert rep.eq5_within_noise
        assert rep.eq6_pointwise and rep.eq6_pass_rate == 1.0

    def test_hr_variant_single_extra(self):
        market = self.lemma_market()
        mech_m = MyersonRegular((Uniform(0, 1), Uniform(0, 2), Uniform(0, 1)))
        extras = (ComponentExtra(0),)  # U(0,2) hazard-rate dominates U(0,1)
        cfg = EstimatorConfig(seed=53, n_samples=200_000)
        rep = commensurateness_check(market, mech_m, SecondPrice(), extras, cfg)
        assert rep.eq5_within_noise
        assert rep.eq6_pointwise

    def test_identical_mechanisms_no_divergence(self):
        market = self.lemma_market()
        cfg = EstimatorConfig(seed=59, n_samples=20_000)
        rep = commensurateness_check(market, SecondPrice(), SecondPrice(), (), cfg)
        assert rep.no_divergence
        assert rep.divergence_count == 0
        assert rep.eq5_within_noise and rep.eq6_pointwise

    def test_insufficient_divergence(self):
        market = build_market((Uniform(0, 1), Uniform(0.0, 0.2)), [[1.0, 0.0]] * 2)
        cfg = EstimatorConfig(seed=61, n_samples=3_000)
        with pytest.raises(InsufficientDivergenceSamples):
            commensurateness_check(
                market, SecondPrice(), SecondPrice(), (ComponentExtra(1),), cfg
            )


class TestVirtualSurplusGap:
    def test_second_price_gap_within_noise(self):
        cfg = EstimatorConfig(seed=67, n_samples=300_000)
        gap = virtual_surplus_gap(two_uniform_market(), SecondPrice(), (), cfg)
        assert abs(gap.mean) <= 4 * gap.std_err

    def test_sample_reserve_mechanism_runs(self):
        market = two_uniform_market()
        cfg = EstimatorConfig(seed=71, n_samples=50_000)
        mech = SecondPriceSampleReserve((0,))
        est = estimate_mc(market, mech, (), cfg)
        # reserve ~ a third uniform: revenue strictly above plain SP
        plain = estimate_mc(market, SecondPrice(), (), cfg)
        assert est.mean > plain.mean


def test_estimate_records_csv():
    rec = EstimateRecord(
        "s1", "second_price", RevenueEstimate(0.5, 0.001, 1000, "mc"), seed=9
    )
    text = estimate_records_csv([rec])
    lines = text.strip().split("\n")
    assert lines[0] == "scenario_id,mechanism,mean,std_err,n_samples,method,seed"
    assert lines[1].startswith("s1,second_price,0.5,0.001,1000,mc,9")
