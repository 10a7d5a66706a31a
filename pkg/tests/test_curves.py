import math

import numpy as np
import pytest

from binexp.curves import (CurvePoints, auc, beta_from_minLL, beta_from_minLL_explicit, beta_gamma,
                           minLL_from_beta, minLL_from_beta_explicit, risk_curve, risk_point_to_roc_line,
                           roc_curve, roc_point_to_risk_line)
from binexp.errors import DomainError, ValidationError
from binexp.experiments import (BinaryExperiment, Task, bayes_risk_01, neyman_pearson_beta,
                                random_experiment)

from conftest import experiments

E = BinaryExperiment.from_masses
ALPHAS = np.linspace(0.01, 0.99, 99)


def beta_gamma_via_Lcheck(g, a):
    r = min(math.sqrt(a / g), 1.0)
    return (a + g * r * r + r * (1 - a - g)) / r


def Ltilde_inv(g):
    return lambda a: min(math.sqrt(a / g), 1.0)


class TestCurvePoints:
    def test_x_increasing(self):
        with pytest.raises(ValidationError):
            CurvePoints([0, 0.5, 0.4], [0, 0.1, 0.2], "risk_vs_cost")

    def test_roc_allows_vertical(self):
        CurvePoints([0, 0, 1], [0, 0.5, 1], "roc")

    def test_roc_range(self):
        with pytest.raises(ValidationError):
            CurvePoints([0, 0.5, 1], [0, 0.7, 0.6], "roc")

    def test_kind(self):
        with pytest.raises(ValidationError):
            CurvePoints([0, 1], [0, 1], "pr")

    def test_samples(self):
        assert CurvePoints([0, 1], [0, 1], "roc").samples() == [(0.0, 0.0), (1.0, 1.0)]


class TestRiskCurve:
    def test_three_point_example(self):
        e = E([0.5, 0.3, 0.2], [0.1, 0.3, 0.6])
        t = Task(0.4, e)
        eh = np.array([0.8, 0.5, 0.2])
        cs = np.array([0.1, 0.3, 0.5, 0.7, 0.9])
        curve = risk_curve(t, eh, cs)
        # oracle: direct summation of (1 - eta) c [eh >= c] + eta (1 - c) [eh < c] over outcomes
        oracle = []
        for c in cs:
            oracle.append(sum(m * ((1 - eta) * c * (h >= c) + eta * (1 - c) * (h < c))
                              for m, eta, h in zip(t.mixture, t.posterior, eh)))
        assert np.allclose(curve.y, oracle, atol=1e-15)
        assert np.allclose(curve.y, [0.06, 0.128, 0.16, 0.102, 0.04], atol=1e-12)

    def test_perfect_separation(self):
        t = Task(0.3, E([1, 0], [0, 1]))
        curve = risk_curve(t, t.posterior, np.linspace(0.01, 0.99, 20))
        assert np.all(curve.y == 0)

    def test_bayes_dominance(self, rng):
        cs = np.linspace(0.01, 0.99, 50)
        for e in experiments(rng, 15):
            t = Task(float(rng.uniform(0.1, 0.9)), e)
            best = risk_curve(t, t.posterior, cs).y
            other = risk_curve(t, rng.uniform(0, 1, e.n), cs).y
            assert np.all(best <= other + 1e-12)

    def test_length(self, small_exp):
        with pytest.raises(ValidationError):
            risk_curve(Task(0.5, small_exp), [0.5], [0.5])


class TestROC:
    def test_identical_auc(self):
        e = E([0.2, 0.3, 0.5], [0.2, 0.3, 0.5])
        assert auc(roc_curve(e, [3.0, 1.0, 2.0])) == pytest.approx(0.5)

    def test_example_auc(self):
        e = E([0.8, 0.2], [0.2, 0.8])
        curve = roc_curve(e, e.p / e.q)
        assert curve.samples() == pytest.approx([(0, 0), (0.2, 0.8), (1, 1)])
        assert auc(curve) == pytest.approx(0.8)

    def test_lr_dominates(self, rng):
        xs = np.linspace(0, 1, 101)
        for e in experiments(rng, 20):
            lr = roc_curve(e, e.p / e.q)
            other = roc_curve(e, rng.normal(size=e.n))
            assert np.all(np.interp(xs, lr.x, lr.y) >= np.interp(xs, other.x, other.y) - 1e-12)
            assert 0.5 - 1e-12 <= auc(lr) <= 1.0

    def test_ties_grouped(self):
        curve = roc_curve(E([0.5, 0.3, 0.2], [0.2, 0.3, 0.5]), [1.0, 1.0, 0.0])
        assert curve.x.size == 3

    def test_auc_kind(self):
        with pytest.raises(ValidationError):
            auc(CurvePoints([0, 1], [0, 1], "risk_vs_cost"))


class TestMinLLFromBeta:
    def test_diagonal(self):
        for pi in (0.2, 0.5, 0.8):
            assert minLL_from_beta(lambda a: a, pi) == pytest.approx(min(pi, 1 - pi), abs=1e-12)

    def test_perfect(self):
        assert minLL_from_beta(lambda a: 1.0, 0.3) == pytest.approx(0.0, abs=1e-15)

    def test_beta_gamma(self):
        assert minLL_from_beta(lambda a: beta_gamma(0.5, a), 0.5) == pytest.approx(0.125, abs=1e-12)

    def test_experiments(self, rng):
        for e in experiments(rng, 10):
            for pi in (0.2, 0.5, 0.77):
                val = minLL_from_beta(lambda a: neyman_pearson_beta(e, a), pi)
                assert val == pytest.approx(bayes_risk_01(pi, e), abs=1e-9)

    def test_range_and_concavity(self, rng):
        pis = np.linspace(0.02, 0.98, 49)
        for e in experiments(rng, 5):
            L = np.array([minLL_from_beta(lambda a: neyman_pearson_beta(e, a), p) for p in pis])
            assert np.all(L >= 0) and np.all(L <= np.minimum(pis, 1 - pis) + 1e-15)
            assert np.all(L[1:-1] >= 0.5 * (L[:-2] + L[2:]) - 1e-9)


class TestBetaFromMinLL:
    def test_tent(self):
        for a in (0.1, 0.5, 0.9):
            assert beta_from_minLL(lambda p: min(p, 1 - p), a) == pytest.approx(a, abs=1e-9)

    def test_zero(self):
        for a in (0.01, 0.5, 1.0):
            assert beta_from_minLL(lambda p: 0.0, a) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("g", [0.25, 0.5, 0.75])
    def test_beta_gamma_family(self, g):
        for a in ALPHAS:
            want = beta_gamma_via_Lcheck(g, a)
            assert beta_gamma(g, a) == pytest.approx(want, abs=1e-13)
            assert beta_from_minLL(lambda p: g * p * (1 - p), a) == pytest.approx(want, abs=1e-8)

    def test_experiment_consistency(self, rng):
        grid = np.linspace(0, 1, 21)
        for _ in range(12):
            e = random_experiment(rng, int(rng.integers(2, 9)))
            for a in grid:
                b = beta_from_minLL(lambda p: bayes_risk_01(p, e), a)
                assert b == pytest.approx(neyman_pearson_beta(e, a), abs=1e-8)

    def test_output_shape(self):
        L = lambda p: 0.6 * p * (1 - p)
        b = np.array([beta_from_minLL(L, a) for a in np.linspace(0, 1, 41)])
        assert np.all(np.diff(b) >= -1e-12) and b[-1] == pytest.approx(1.0)
        assert np.all(b[1:-1] >= 0.5 * (b[:-2] + b[2:]) - 1e-9)


class TestExplicit:
    @pytest.mark.parametrize("g", [0.25, 0.5, 0.75])
    def test_round_trip(self, g):
        L = lambda p: g * p * (1 - p)
        dL = lambda p: g * (1 - 2 * p)
        err = 0.0
        for a in ALPHAS:
            b, fb = beta_from_minLL_explicit(L, dL, a)
            assert not fb
            err = max(err, abs(b - beta_gamma(g, a)))
        assert err <= 1e-4
        beta = lambda a: beta_gamma(g, a)
        dbeta = lambda a: math.sqrt(g / a) - 1 if a < g else 0.0
        for pi in np.linspace(0.05, 0.95, 19):
            v, fb = minLL_from_beta_explicit(beta, dbeta, pi)
            assert not fb and v == pytest.approx(L(pi), abs=1e-6)

    def test_ltilde(self):
        g = 0.5
        L = lambda p: g * p * (1 - p)
        dL = lambda p: g * (1 - 2 * p)
        for p in (0.2, 0.6):
            assert L(p) - p * dL(p) == pytest.approx(g * p * p)
        for a in (0.1, 0.3, 0.7):
            v1, _ = beta_from_minLL_explicit(L, dL, a, Ltilde_inv=Ltilde_inv(g))
            assert v1 == pytest.approx(beta_gamma(g, a), abs=1e-12)

    def test_random_smooth_concave(self, rng):
        # smoothed tent mixtures: softmin of lines through the corners
        for _ in range(20):
            ks = rng.uniform(0.2, 0.9, 3)
            wts = rng.dirichlet(np.ones(3))
            L = lambda p: float(sum(w * k * p * (1 - p) / (k * p + (1 - k) * (1 - p) + 0.5)
                                     for w, k in zip(wts, ks)))
            h = 1e-6
            dL = lambda p: (L(min(p + h, 1)) - L(max(p - h, 0))) / (min(p + h, 1) - max(p - h, 0))
            for a in (0.05, 0.3, 0.6):
                v, _ = beta_from_minLL_explicit(L, dL, a)
                assert v == pytest.approx(beta_from_minLL(L, a), abs=1e-6)

    def test_fallback_warns(self):
        # the diagonal has constant slope 1, which never equals (1 - pi) / pi at pi = 0.3
        with pytest.warns(UserWarning):
            v, fb = minLL_from_beta_explicit(lambda a: a, lambda a: 1.0, 0.3)
        assert fb and v == pytest.approx(0.3, abs=1e-12)

    def test_step_derivative_hits_vertex(self):
        e = E([0.8, 0.2], [0.2, 0.8])
        beta = lambda a: neyman_pearson_beta(e, a)
        dbeta = lambda a: 4.0 if a < 0.2 else 0.25
        v, fb = minLL_from_beta_explicit(beta, dbeta, 0.5)
        assert not fb and v == pytest.approx(bayes_risk_01(0.5, e), abs=1e-12)


class TestBetaGamma:
    def test_range(self):
        with pytest.raises(ValidationError):
            beta_gamma(0.0, 0.5)

    def test_endpoints(self):
        assert beta_gamma(0.5, 0.0) == pytest.approx(0.5)
        assert beta_gamma(0.5, 1.0) == 1.0


class TestDuality:
    def test_constant_line(self):
        slope, icpt = roc_point_to_risk_line(0.2, 0.8, 0.5)
        assert slope == pytest.approx(0.0) and icpt == pytest.approx(0.1)

    def test_diagonal_touches_tent(self):
        pi = 0.3
        for t in (0.0, 0.4, 1.0):
            s, b = roc_point_to_risk_line(t, t, pi)
            for c in np.linspace(0, 1, 11):
                assert s * c + b >= min((1 - pi) * c, pi * (1 - c)) - 1e-15

    def test_involution(self, rng):
        for _ in range(50):
            pi, c = rng.uniform(0.05, 0.95, 2)
            fp, tp = sorted(rng.uniform(0, 1, 2))
            s, b = roc_point_to_risk_line(fp, tp, pi)
            L = s * c + b
            rs, rb = risk_point_to_roc_line(c, L, pi)
            assert rs * fp + rb == pytest.approx(tp, abs=1e-12)

    def test_degenerate(self):
        with pytest.raises(DomainError):
            risk_point_to_roc_line(0.0, 0.1, 0.5)
