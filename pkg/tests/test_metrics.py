"""Metric formulas, closed-form anchors, and Monte Carlo distribution checks."""

import math

import numpy as np
import pytest

from oabf import (ChannelRealization, OutageCurve, OutagePoint,
                  PowerConstraint, achievable_rate, antenna_select,
                  antenna_selection_array_gain, diversity_order_estimate,
                  expected_optimal_received_power, from_values, normalized_snr,
                  oabf_mean_snr_lower_bound, oabf_s, outage_probability,
                  phase_aligned_value, rate_gap_bound, sample_block,
                  snr_separate, snr_total)


def test_power_constraint_validation():
    with pytest.raises(ValueError):
        PowerConstraint("separate", 0.0, 1.0)
    with pytest.raises(ValueError):
        PowerConstraint("separate", 1.0, -1.0)
    with pytest.raises(ValueError):
        PowerConstraint("weird", 1.0, 1.0)


def test_snr_separate_examples():
    sel = oabf_s(from_values([(1, 0), (0, 1)]))  # |f|^2 = 2
    assert snr_separate(sel, PowerConstraint.separate(1.0, 1.0)) == pytest.approx(2.0)
    assert snr_separate(sel, PowerConstraint.separate(3.0, 2.0)) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        snr_separate(sel, PowerConstraint.total(1.0, 1.0))


def test_snr_total_examples():
    from oabf import oabf_t

    sel = oabf_t(from_values([(2, 0), (1, 0)]))  # |3|^2/2 = 4.5
    assert snr_total(sel, PowerConstraint.total(1.0, 1.0)) == pytest.approx(4.5)
    sel1 = oabf_t(from_values([(2, 0), (0.1, 0)]))  # singleton, |2|^2
    assert snr_total(sel1, PowerConstraint.total(1.0, 1.0)) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        snr_total(sel, PowerConstraint.separate(1.0, 1.0))


def test_snr_scales_linearly_with_power_and_noise():
    from oabf import oabf_t

    rng = np.random.default_rng(3)
    ch = ChannelRealization(sample_block(6, 3, 0, 1)[0])
    sel_s, sel_t = oabf_s(ch), oabf_t(ch)
    for _ in range(20):
        p, s2 = rng.uniform(0.1, 10.0, size=2)
        base = snr_separate(sel_s, PowerConstraint.separate(1.0, 1.0))
        assert snr_separate(sel_s, PowerConstraint.separate(p, s2)) == pytest.approx(base * p / s2)
        base_t = snr_total(sel_t, PowerConstraint.total(1.0, 1.0))
        assert snr_total(sel_t, PowerConstraint.total(p, s2)) == pytest.approx(base_t * p / s2)


def test_snr_total_dominates_scaled_separate_selection():
    # feasibility bridge: the total-mode optimum is at least the separate-mode
    # optimum run at its own cardinality
    pc = PowerConstraint.total(1.0, 1.0)
    from oabf import oabf_t

    for row in sample_block(7, 44, 0, 100):
        ch = ChannelRealization(row)
        s = oabf_s(ch)
        t = oabf_t(ch)
        assert snr_total(t, pc) >= s.objective / s.selection.cardinality


def test_normalized_snr_examples():
    sel = antenna_select(from_values([(3, 0)]))  # K=1, |h|^2=9
    assert normalized_snr(sel) == pytest.approx(9.0)
    sel = oabf_s(from_values([(1, 0), (0, 1)]))  # |1+i|^2 / 2
    assert normalized_snr(sel) == pytest.approx(1.0)
    # phase-aligned on [1, i]: (1+1)^2 / 2 = 2
    assert phase_aligned_value(from_values([(1, 0), (0, 1)])) / 2 == pytest.approx(2.0)


def test_achievable_rate():
    assert achievable_rate(0.0) == 0.0
    assert achievable_rate(1.0) == pytest.approx(1.0)
    assert achievable_rate(3.0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        achievable_rate(-0.1)
    snr = np.linspace(0, 50, 100)
    rate = achievable_rate(snr)
    assert np.all(np.diff(rate) >= 0)


def test_outage_probability_examples():
    assert outage_probability([1, 2, 3], 2.5).probability == pytest.approx(2 / 3)
    assert outage_probability([1, 2, 3], 0.5).probability == 0.0
    # strictly below: samples at the threshold do not count
    assert outage_probability([1.0, 2.0], 1.0).probability == 0.0
    with pytest.raises(ValueError):
        outage_probability([], 1.0)


def test_outage_monotone_in_threshold():
    samples = np.random.default_rng(1).exponential(size=1000)
    probs = [outage_probability(samples, t).probability for t in np.linspace(0.01, 5, 40)]
    assert all(a <= b for a, b in zip(probs, probs[1:]))


def test_outage_matches_exponential_closed_form():
    # N=1: |h|^2 is Exp(1), so outage(t) = 1 - exp(-t) at unit transmit SNR
    m = 100000
    snr = np.abs(sample_block(1, 808, 0, m)[:, 0]) ** 2
    for t in (0.1, 1.0):
        expect = 1.0 - math.exp(-t)
        se = math.sqrt(expect * (1 - expect) / m)
        assert abs(outage_probability(snr, t).probability - expect) < 3 * se


def test_diversity_slope_on_synthetic_curves():
    # outage = 1/rho over rho = 1/threshold -> slope 1; 1/rho^2 -> slope 2
    rhos = np.array([10.0, 100.0, 1000.0])
    c1 = OutageCurve(tuple(OutagePoint(1 / r, 1 / r, 1000) for r in rhos))
    assert diversity_order_estimate(c1) == pytest.approx(1.0)
    c2 = OutageCurve(tuple(OutagePoint(1 / r, 1 / r ** 2, 1000) for r in rhos))
    assert diversity_order_estimate(c2) == pytest.approx(2.0)


def test_diversity_slope_errors():
    with pytest.raises(ValueError):
        diversity_order_estimate(OutageCurve((OutagePoint(0.1, 0.5, 10),)))
    same = OutageCurve((OutagePoint(0.1, 0.5, 10), OutagePoint(0.1, 0.4, 10)))
    with pytest.raises(ValueError):
        diversity_order_estimate(same)


def test_closed_form_anchors():
    assert expected_optimal_received_power(1) == pytest.approx(1.0)
    assert expected_optimal_received_power(2) == pytest.approx(2 + math.pi / 2)
    assert expected_optimal_received_power(16) == pytest.approx(16 + 60 * math.pi)
    assert abs(expected_optimal_received_power(16) - 204.50) < 0.01

    assert antenna_selection_array_gain(1) == pytest.approx(1.0)
    assert antenna_selection_array_gain(3) == pytest.approx(11 / 6)

    assert oabf_mean_snr_lower_bound(1) == pytest.approx(1 / math.pi ** 2)
    assert abs(oabf_mean_snr_lower_bound(1) - 0.10132) < 1e-4
    assert oabf_mean_snr_lower_bound(2) == pytest.approx((2 + math.pi / 2) / math.pi ** 2)
    assert abs(oabf_mean_snr_lower_bound(2) - 0.3618) < 1e-4

    assert rate_gap_bound() == pytest.approx(2 * math.log2(math.pi))
    assert abs(rate_gap_bound() - 3.303) < 1e-3  # the "3.3 bits/symbol" constant


def test_antenna_selection_gain_monte_carlo():
    # E[max_j |h_j|^2] over CN(0,1) equals the harmonic sum
    m = 100000
    H = sample_block(3, 515, 0, m)
    best = (np.abs(H) ** 2).max(axis=1)
    se = np.std(best, ddof=1) / math.sqrt(m)
    assert abs(np.mean(best) - 11 / 6) < 3 * se


def test_phase_aligned_power_monte_carlo():
    # E[(sum |h_j|)^2] = n + n(n-1) pi/4
    m = 20000
    H = sample_block(8, 616, 0, m)
    power = np.abs(H).sum(axis=1) ** 2
    se = np.std(power, ddof=1) / math.sqrt(m)
    assert abs(np.mean(power) - expected_optimal_received_power(8)) < 3 * se


def test_oabf_s_mean_snr_bracketed_by_bounds():
    from oabf.selection import oabf_s_batch

    m = 30000
    for n in (2, 8):
        H = sample_block(n, 717 + n, 0, m)
        _, _, power, _ = oabf_s_batch(H)
        mean = float(np.mean(power))
        assert mean >= oabf_mean_snr_lower_bound(n)
        assert mean <= expected_optimal_received_power(n)
