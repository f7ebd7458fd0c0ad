import math

import numpy as np
import pytest
from scipy import stats

from realitygame import analytics, maps
from realitygame.core import Outcome, PlayerPopulation, apply_outcome
from realitygame.errors import DegenerateAllZero, DomainError, NonPositiveData, UnstableFixedPoint


def test_subjective_distribution_matches_binomial_mixture():
    pop = PlayerPopulation.from_strategies([0.2, 0.5, 0.9], [0.5, 0.3, 0.2])
    t = 40
    dist = analytics.subjective_heads_distribution(pop, t)
    brute = sum(w * stats.binom.pmf(np.arange(t + 1), t, s)
                for s, w in zip(pop.strategies, pop.wealths))
    assert np.allclose(dist.probabilities, brute, atol=1e-14)
    assert dist.probabilities.sum() == pytest.approx(1.0)


def test_subjective_distribution_survives_long_horizons():
    dist = analytics.subjective_heads_distribution(PlayerPopulation.uniform_grid(29), 100_000)
    assert np.isfinite(dist.probabilities).all()
    assert dist.probabilities.sum() == pytest.approx(1.0)


def test_subjective_peaks_at_each_strategy():
    pop = PlayerPopulation.uniform_grid(29)
    dist = analytics.subjective_heads_distribution(pop, 1000)
    peaks = dist.local_maxima()
    assert peaks.size == 29
    assert np.allclose(peaks / 1000, pop.strategies, atol=2e-3)


def test_wealth_given_heads_is_order_free():
    pop = PlayerPopulation.uniform_grid(9)
    rng = np.random.default_rng(0)
    seq = rng.random(60) < 0.4
    ref = analytics.subjective_wealth_given_heads(pop, int(seq.sum()), 60)
    for _ in range(3):
        cur = pop
        for h in rng.permutation(seq):
            cur = apply_outcome(cur, Outcome.from_bool(bool(h)))
        assert np.allclose(cur.wealths, ref, atol=1e-12)


def test_wealth_given_heads_degenerate():
    pop = PlayerPopulation.from_strategies([0.0, 1.0], [0.5, 0.5])
    assert np.allclose(analytics.subjective_wealth_given_heads(pop, 3, 3), [0.0, 1.0])
    pop = PlayerPopulation.from_strategies([0.0], [1.0])
    with pytest.raises(DegenerateAllZero):
        analytics.subjective_wealth_given_heads(pop, 1, 2)
    with pytest.raises(ValueError):
        analytics.subjective_wealth_given_heads(pop, 3, 2)


def test_drift_laws():
    assert analytics.gaussian_drift(0.4, 0.5, 10) == pytest.approx(0.01)
    pop = PlayerPopulation.uniform_grid(99)
    d = analytics.strategy_variance(pop)
    p = 0.5
    assert analytics.exact_drift(p, 0.6, d) == pytest.approx(0.1 * d / 0.25)
    with pytest.raises(DomainError):
        analytics.gaussian_drift(1.0, 0.5, 3)


def test_exact_drift_matches_one_step_expectation():
    pop = PlayerPopulation.from_strategies([0.1, 0.5, 0.8], [0.3, 0.3, 0.4])
    p = float(pop.strategies @ pop.wealths)
    q = 0.7
    heads = apply_outcome(pop, Outcome.HEADS)
    tails = apply_outcome(pop, Outcome.TAILS)
    expected = q * heads.strategies @ heads.wealths + (1 - q) * tails.strategies @ tails.wealths - p
    assert analytics.exact_drift(p, q, analytics.strategy_variance(pop)) == pytest.approx(expected)


@pytest.mark.parametrize("reality_map, fixed_point, gamma, case", [
    (maps.Constant(0.5), 0.5, 1.0, analytics.INTERIOR_NONNEGATIVE),
    (maps.SelfDefeating(), 0.5, 1.0, analytics.INTERIOR_NEGATIVE),
    (maps.ArctanFamily(0.5), 0.5, 0.5, analytics.INTERIOR_NONNEGATIVE),
    (maps.ArctanFamily(0.75), 0.5, 0.25, analytics.INTERIOR_NONNEGATIVE),
    (maps.ArctanFamily(1.5), 0.0, 0.5 * (1 - 8 / (1.5 * math.pi**2)), analytics.BOUNDARY),
    (maps.ArctanFamily(2.0), 1.0, 0.5 * (1 - 4 / math.pi**2), analytics.BOUNDARY),
])
def test_predicted_exponents(reality_map, fixed_point, gamma, case):
    pred = analytics.predict_convergence(reality_map, fixed_point)
    assert pred.gamma == pytest.approx(gamma)
    assert pred.case == case


def test_table_one_predicted_row():
    rows = [analytics.predict_convergence(m, x).gamma for m, x in [
        (maps.ArctanFamily(2), 0.0), (maps.ArctanFamily(1.5), 0.0),
        (maps.ArctanFamily(0.75), 0.5), (maps.ArctanFamily(0.5), 0.5),
        (maps.Constant(0.5), 0.5), (maps.SelfDefeating(), 0.5)]]
    assert [round(g, 2) for g in rows] == [0.30, 0.23, 0.25, 0.5, 1.0, 1.0]


def test_unstable_fixed_point_rejected():
    with pytest.raises(UnstableFixedPoint):
        analytics.predict_convergence(maps.ArctanFamily(2.0), 0.5)


def test_inefficiency_is_kl():
    p, q = 0.3, 0.6
    kl = q * math.log(q / p) + (1 - q) * math.log((1 - q) / (1 - p))
    assert analytics.inefficiency(p, q) == pytest.approx(kl)
    assert analytics.inefficiency(0.4, 0.4) == 0.0
    assert analytics.inefficiency(0.0, 0.0) == 0.0
    assert analytics.inefficiency(0.5, 1.0) == pytest.approx(math.log(2))
    with pytest.raises(DomainError):
        analytics.inefficiency(0.0, 0.2)


def test_expansions_match_kl_near_fixed_points():
    q = maps.ArctanFamily(0.5)
    y = 1e-4
    exact = analytics.inefficiency(0.5 + y, q(0.5 + y))
    assert analytics.interior_expansion(0.5, 0.5, y) == pytest.approx(exact, rel=1e-3)
    q = maps.ArctanFamily(1.5)
    mu = q.boundary_slope
    exact = analytics.inefficiency(y, q(y))
    assert analytics.boundary_expansion(mu, y) == pytest.approx(exact, rel=1e-2)


def test_power_law_fit_recovers_exponent():
    t = np.arange(1, 10_001)
    fit = analytics.fit_power_law(3.0 * t**-0.7)
    assert fit.gamma == pytest.approx(0.7, abs=1e-12)
    assert fit.r2 == pytest.approx(1.0)
    assert (fit.t_lo, fit.t_hi) == (100, 1000)
    assert fit.n_points >= 60


def test_power_law_fit_errors():
    y = np.ones(1000)
    y[140:160] = 0.0
    with pytest.raises(NonPositiveData):
        analytics.fit_power_law(y, (100, 900))
    with pytest.raises(ValueError):
        analytics.fit_power_law(np.ones(1000), (100, 101))


def test_format_table_layout():
    text = analytics.format_table(["a", "b"], [0.123, None], [1, 0.5])
    lines = text.splitlines()
    assert lines[0].split(" | ")[0].strip() == "reality map"
    assert "0.12" in lines[1] and "-" in lines[1]
    assert lines[2].endswith("0.50")
