import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binexp.errors import ValidationError
from binexp.losses import min_cost_risk
from binexp.experiments import (BinaryExperiment, BinaryTest, Task, bayes_risk_01,
                                classification_rates, lambda_inv, lambda_map, load_experiment,
                                neyman_pearson_beta, random_experiment, roc_vertices,
                                statistical_information_01)

from conftest import experiments

E = BinaryExperiment.from_masses
SKEW = E([0.8, 0.2], [0.2, 0.8])


def brute_bayes_risk(pi, exp):
    best = np.inf
    for bits in itertools.product((0.0, 1.0), repeat=exp.n):
        tp, fp, _, fn = classification_rates(exp, BinaryTest(np.array(bits)))
        best = min(best, pi * fn + (1 - pi) * fp)
    return best


class TestTypes:
    def test_masses_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            E([0.5, 0.6], [0.5, 0.5])

    def test_negative_mass(self):
        with pytest.raises(ValidationError):
            E([1.2, -0.2], [0.5, 0.5])

    def test_size_mismatch(self):
        with pytest.raises(ValidationError):
            E([1.0], [0.5, 0.5])

    def test_immutable(self, small_exp):
        with pytest.raises(ValueError):
            small_exp.p[0] = 0.9

    def test_task_posterior(self, small_exp):
        t = Task(0.5, small_exp)
        assert np.allclose(t.mixture, [0.375, 0.625])
        assert np.allclose(t.posterior, [0.25 / 0.375, 0.25 / 0.625])

    def test_task_drops_null_outcomes(self):
        t = Task(0.3, E([0.5, 0.5, 0.0], [0.5, 0.0, 0.5]))
        assert t.mixture.size == 3
        t = Task(0.3, E([0.5, 0.5, 0.0], [0.5, 0.5, 0.0]))
        assert t.mixture.size == 2

    def test_task_prior_range(self, small_exp):
        for pi in (0.0, 1.0, -0.1):
            with pytest.raises(ValidationError):
                Task(pi, small_exp)

    def test_test_range(self):
        with pytest.raises(ValidationError):
            BinaryTest(np.array([0.5, 1.5]))


class TestClassificationRates:
    def test_always_positive(self, small_exp):
        assert classification_rates(small_exp, BinaryTest(np.ones(2))) == (1.0, 1.0, 0.0, 0.0)

    def test_always_negative(self, small_exp):
        assert classification_rates(small_exp, BinaryTest(np.zeros(2))) == (0.0, 0.0, 1.0, 1.0)

    def test_hand_value(self):
        tp, fp, tn, fn = classification_rates(SKEW, BinaryTest(np.array([1.0, 0.0])))
        assert (tp, fp) == pytest.approx((0.8, 0.2))
        assert tp + fn == pytest.approx(1.0) and fp + tn == pytest.approx(1.0)

    def test_size_mismatch(self, small_exp):
        with pytest.raises(ValidationError):
            classification_rates(small_exp, BinaryTest(np.ones(3)))


class TestLambda:
    def test_symmetric_point(self):
        assert lambda_map(0.5, 0.5) == 1.0

    def test_hand_value(self):
        assert lambda_map(0.25, 0.5) == pytest.approx(3.0)

    def test_cost_one(self):
        assert lambda_map(0.3, 1.0) == np.inf and lambda_inv(0.3, np.inf) == 1.0

    @pytest.mark.parametrize("pi", [0.2, 0.5, 0.8])
    @pytest.mark.parametrize("c", [0.1, 0.5, 0.9])
    def test_round_trip(self, pi, c):
        assert lambda_inv(pi, lambda_map(pi, c)) == pytest.approx(c, abs=1e-12)


class TestBayesRisk:
    def test_identical(self):
        e = E([0.3, 0.7], [0.3, 0.7])
        for pi in (0.2, 0.5, 0.9):
            assert bayes_risk_01(pi, e) == pytest.approx(min(pi, 1 - pi))

    def test_disjoint(self):
        assert bayes_risk_01(0.4, E([1, 0], [0, 1])) == 0.0

    def test_hand_value(self, small_exp):
        assert bayes_risk_01(0.5, small_exp) == pytest.approx(0.375)

    def test_brute_force(self, rng):
        for e in experiments(rng, 10, n_max=7):
            for pi in (0.1, 0.37, 0.5, 0.8):
                assert bayes_risk_01(pi, e) == pytest.approx(brute_bayes_risk(pi, e), abs=1e-14)

    def test_concave_in_prior(self, rng):
        pis = np.linspace(0.01, 0.99, 61)
        for e in experiments(rng, 10):
            L = np.array([bayes_risk_01(p, e) for p in pis])
            assert np.all(L[1:-1] >= 0.5 * (L[:-2] + L[2:]) - 1e-14)
            assert np.all(L <= np.minimum(pis, 1 - pis) + 1e-15) and np.all(L >= 0)


class TestStatisticalInformation:
    def test_identical(self):
        assert statistical_information_01(0.3, E([0.3, 0.7], [0.3, 0.7])) == 0.0

    def test_hand_value(self, small_exp):
        si = statistical_information_01(0.5, small_exp)
        assert si == pytest.approx(0.125)
        assert 2 - 4 * bayes_risk_01(0.5, small_exp) == pytest.approx(0.5)

    def test_merging_outcomes_loses_information(self, rng):
        for e in experiments(rng, 15, n_min=3):
            merged = E(np.r_[e.p[0] + e.p[1], e.p[2:]], np.r_[e.q[0] + e.q[1], e.q[2:]])
            for pi in np.linspace(0.05, 0.95, 19):
                assert statistical_information_01(pi, e) >= statistical_information_01(pi, merged) - 1e-15

    def test_zero_iff_proportional(self, rng):
        for e in experiments(rng, 10):
            if np.allclose(e.p, e.q):
                continue
            assert max(statistical_information_01(pi, e) for pi in np.linspace(0.01, 0.99, 99)) > 0

    def test_cost_prior_exchange(self, rng):
        def risk(prior, c, e):
            t = Task(prior, e)
            return float(t.mixture @ [min_cost_risk(c, eta) for eta in t.posterior])

        for e in experiments(rng, 10):
            for pi, c in rng.uniform(0.05, 0.95, (5, 2)):
                assert risk(1 - pi, c, e) == pytest.approx(risk(1 - c, pi, e), abs=1e-14)

    @given(st.floats(0.01, 0.99))
    @settings(max_examples=50, deadline=None)
    def test_nonnegative(self, pi):
        e = random_experiment(np.random.default_rng(int(pi * 1e6)), 5)
        assert statistical_information_01(pi, e) >= 0.0


class TestNeymanPearson:
    def test_identical(self):
        e = E([0.2, 0.3, 0.5], [0.2, 0.3, 0.5])
        for a in (0.0, 0.3, 0.77, 1.0):
            assert neyman_pearson_beta(e, a) == pytest.approx(a)

    def test_hand_values(self):
        assert neyman_pearson_beta(SKEW, 0.2) == pytest.approx(0.8)
        assert neyman_pearson_beta(SKEW, 0.1) == pytest.approx(0.4)

    def test_disjoint(self):
        assert neyman_pearson_beta(E([0.5, 0.5, 0], [0, 0, 1]), 0.0) == 1.0

    def test_vectorised(self):
        out = neyman_pearson_beta(SKEW, [0.0, 0.2, 1.0])
        assert np.allclose(out, [0.0, 0.8, 1.0])

    def test_alpha_range(self):
        with pytest.raises(ValidationError):
            neyman_pearson_beta(SKEW, 1.5)

    def test_concave_nondecreasing(self, rng):
        a = np.linspace(0, 1, 101)
        for e in experiments(rng, 15):
            b = neyman_pearson_beta(e, a)
            assert np.all(np.diff(b) >= -1e-15)
            assert np.all(b[1:-1] >= 0.5 * (b[:-2] + b[2:]) - 1e-12)
            assert b[-1] == 1.0

    def test_dominates_deterministic_tests(self, rng):
        for e in experiments(rng, 8, n_max=6):
            for bits in itertools.product((0.0, 1.0), repeat=e.n):
                tp, fp, _, _ = classification_rates(e, BinaryTest(np.array(bits)))
                assert neyman_pearson_beta(e, fp) >= tp - 1e-12

    def test_ties_merged(self):
        fp, tp = roc_vertices(E([0.2, 0.4, 0.4], [0.1, 0.2, 0.7]))
        assert fp.size == 3


class TestIO:
    def test_json(self, tmp_path):
        f = tmp_path / "e.json"
        f.write_text(json.dumps({"p": [0.5, 0.5], "q": [0.25, 0.75]}))
        e = load_experiment(f)
        assert np.allclose(e.q, [0.25, 0.75])

    def test_csv(self, tmp_path):
        f = tmp_path / "e.csv"
        f.write_text("p,q\n0.5,0.25\n0.5,0.75\n")
        assert np.allclose(load_experiment(f).p, [0.5, 0.5])

    @pytest.mark.parametrize("text,needle", [
        ('{"p": [0.5, 0.5]}', "keys"),
        ('{"p": [0.5, "x"], "q": [0.5, 0.5]}', "'p'[1]"),
        ('{"p": [0.5, 0.6], "q": [0.5, 0.5]}', "sum"),
        ("{bad", "invalid JSON"),
    ])
    def test_json_errors(self, tmp_path, text, needle):
        f = tmp_path / "e.json"
        f.write_text(text)
        with pytest.raises(ValidationError, match=None) as ei:
            load_experiment(f)
        assert needle in str(ei.value)

    def test_csv_bad_cell(self, tmp_path):
        f = tmp_path / "e.csv"
        f.write_text("p,q\n0.5,abc\n0.5,0.75\n")
        with pytest.raises(ValidationError, match="row 2 column 2"):
            load_experiment(f)

    def test_random_experiment_positive(self, rng):
        e = random_experiment(rng, 6)
        assert np.all(e.p > 0) and np.all(e.q > 0)
