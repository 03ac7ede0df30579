"""Empirical distributions, K-L divergence and matchup validation."""

import math

import numpy as np
import pytest

import courtvec as cv
from courtvec.errors import ArgumentError, SupportError

from conftest import forced_outcome_model, make_play


def plays_with_outcomes(outcomes, offense=(0, 1, 2, 3, 4), defense=(5, 6, 7, 8, 9), game="g"):
    return [make_play(offense, defense, o, game=game, seq=i) for i, o in enumerate(outcomes)]


class TestEmpiricalDistribution:
    def test_counting(self):
        emp = cv.empirical_distribution(plays_with_outcomes([17, 17, 18, 21]))
        assert emp.total == 4
        assert emp.p[17] == 0.5 and emp.p[18] == 0.25 and emp.p[21] == 0.25
        assert emp.p.sum() == 1.0

    def test_single_play(self):
        emp = cv.empirical_distribution(plays_with_outcomes([4]))
        assert emp.p[4] == 1.0 and emp.total == 1

    def test_one_of_each_class_is_uniform(self):
        emp = cv.empirical_distribution(plays_with_outcomes(list(range(23))))
        np.testing.assert_allclose(emp.p, 1.0 / 23.0, atol=1e-15)

    def test_empty_group_rejected(self):
        with pytest.raises(ArgumentError):
            cv.empirical_distribution([])


class TestKlDivergence:
    def test_identity_is_zero(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            p = rng.dirichlet(np.ones(23))
            assert cv.kl_divergence(p, p, base=2) == 0.0

    def test_point_mass_vs_fair_coin_is_one_bit(self):
        assert cv.kl_divergence([1.0, 0.0], [0.5, 0.5], base=2) == 1.0

    def test_hand_computed_value(self):
        # 0.75*log2(1.5) + 0.25*log2(0.5) = 0.188722...
        got = cv.kl_divergence([0.75, 0.25], [0.5, 0.5], base=2)
        expected = 0.75 * math.log2(1.5) + 0.25 * math.log2(0.5)
        assert abs(got - expected) < 1e-12
        assert abs(got - 0.188722) < 1e-6

    def test_non_negative_on_random_pairs(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            p = rng.dirichlet(np.ones(23))
            q = rng.dirichlet(np.ones(23))
            assert cv.kl_divergence(p, q, base=2) >= 0.0

    def test_bits_are_nats_over_ln2(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            p = rng.dirichlet(np.ones(23))
            q = rng.dirichlet(np.ones(23))
            bits = cv.kl_divergence(p, q, base=2)
            nats = cv.kl_divergence(p, q, base=math.e)
            assert abs(bits - nats / math.log(2)) < 1e-12

    def test_zero_p_terms_contribute_nothing(self):
        assert cv.kl_divergence([0.0, 1.0], [0.5, 0.5], base=2) == 1.0

    def test_support_violation_is_an_error(self):
        with pytest.raises(SupportError):
            cv.kl_divergence([0.5, 0.5], [1.0, 0.0], base=2)


class TestValidateMatchups:
    def test_everything_filtered_gives_empty_marker(self, small_generator):
        plays = plays_with_outcomes([1] * 15)  # exactly 15, filter is strict
        report = cv.validate_matchups(small_generator.truth, plays, min_plays=15)
        assert report.empty and report.mean_kl is None

    def test_single_matchup_single_outcome(self):
        """16 identical outcomes vs a model putting 0.9 there: the K-L is
        log2(1/0.9)."""
        model = forced_outcome_model(12, 17, strength=math.log(0.9 * 22 / 0.1))
        probs = cv.forward(model, range(5), range(5, 10))
        assert abs(probs[17] - 0.9) < 1e-12
        report = cv.validate_matchups(model, plays_with_outcomes([17] * 16), min_plays=15)
        assert len(report.results) == 1
        assert abs(report.results[0].kl_bits - math.log2(1 / 0.9)) < 1e-9

    def test_planted_model_beats_uniform_baseline(self, small_generator, small_corpus):
        _, val = cv.chronological_split(small_corpus, 10)
        report = cv.validate_matchups(small_generator.truth, val, min_plays=15)
        baseline = cv.uniform_baseline(val, min_plays=15)
        assert not report.empty
        assert report.mean_kl < baseline

    def test_order_invariance(self, small_generator, small_corpus):
        _, val = cv.chronological_split(small_corpus, 10)
        rng = np.random.default_rng(4)
        shuffled = [val[i] for i in rng.permutation(len(val))]
        a = cv.validate_matchups(small_generator.truth, val, min_plays=15)
        b = cv.validate_matchups(small_generator.truth, shuffled, min_plays=15)
        assert a.mean_kl == b.mean_kl and a.std_kl == b.std_kl
        assert [r.key for r in a.results] == [r.key for r in b.results]

    def test_grouping_ignores_lineup_listing_order(self, small_generator):
        plays = plays_with_outcomes([3] * 10, offense=(4, 3, 2, 1, 0)) + \
            plays_with_outcomes([5] * 10, offense=(0, 1, 2, 3, 4))
        report = cv.validate_matchups(small_generator.truth, plays, min_plays=15)
        assert len(report.results) == 1
        assert report.results[0].plays == 20


class TestKlVsPlaysCurve:
    def test_full_sample_equals_validate_kl(self, small_generator):
        outcomes = list(np.random.default_rng(5).integers(0, 23, size=24))
        plays = plays_with_outcomes(outcomes)
        curve = cv.kl_vs_plays_curve(small_generator.truth, plays, max_n=24,
                                     trials=1, seed=0)
        report = cv.validate_matchups(small_generator.truth, plays, min_plays=15)
        assert abs(curve[-1][1] - report.results[0].kl_bits) < 1e-12

    def test_single_play_prefix_is_one_hot_kl(self, small_generator):
        plays = plays_with_outcomes([7] * 30)
        q = cv.forward(small_generator.truth, range(5), range(5, 10))
        curve = cv.kl_vs_plays_curve(small_generator.truth, plays, max_n=5,
                                     trials=3, seed=1)
        assert abs(curve[0][1] - math.log2(1.0 / q[7])) < 1e-9

    def test_curve_decreases_after_smoothing(self, small_generator, small_corpus):
        curve = cv.kl_vs_plays_curve(small_generator.truth, small_corpus,
                                     max_n=40, trials=150, seed=2)
        values = np.array([v for _, v in curve])
        smoothed = np.convolve(values, np.ones(5) / 5, mode="valid")
        assert (np.diff(smoothed) <= 1e-9).all()

    def test_max_n_beyond_largest_group_rejected(self, small_generator):
        plays = plays_with_outcomes([1] * 10)
        with pytest.raises(ArgumentError):
            cv.kl_vs_plays_curve(small_generator.truth, plays, max_n=11, trials=1, seed=0)
