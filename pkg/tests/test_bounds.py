import math

import numpy as np
import pytest

from binexp.bounds import (SPECIAL_NAMES, BoundResult, PinskerConstraint, classic_comparators,
                           fedotov_reference, kl_pinsker_explicit, pinsker_general, pinsker_special,
                           surrogate_bound, three_atom_minimum)
from binexp.divergences import WeightFunction, builtin, f_divergence_direct, variational
from binexp.errors import InfeasibleError, ValidationError
from binexp.experiments import BinaryExperiment
from binexp.losses import ProperLoss, builtin_loss, regret, regret_cost

from conftest import experiments

E = BinaryExperiment.from_masses
VALIDITY_NAMES = ("kl", "hellinger", "jeffreys", "chi2", "sym_chi2", "jensen_shannon", "triangular")
CLOSED_NAMES = ("hellinger", "jeffreys", "sym_chi2", "jensen_shannon", "agm", "chi2", "triangular")


def half_constraint(V):
    return PinskerConstraint(((0.5, 0.5 - V / 4),))


class TestSurrogateBound:
    @pytest.mark.parametrize("alpha", [0.05, 0.25, 0.45])
    def test_exp(self, alpha):
        val = surrogate_bound(builtin_loss("exp"), 0.5, alpha)
        assert val == pytest.approx(1 - math.sqrt(1 - 4 * alpha * alpha), abs=1e-9)

    def test_exp_quarter(self):
        assert surrogate_bound(builtin_loss("exp"), 0.5, 0.25) == pytest.approx(0.1339745962155614, abs=1e-12)

    def test_tq(self):
        assert surrogate_bound(builtin_loss("tq"), 0.5, 0.2) == pytest.approx(4 * 0.04, abs=1e-12)

    def test_square(self):
        assert surrogate_bound(builtin_loss("square"), 0.5, 0.3) == pytest.approx(0.09, abs=1e-12)

    def test_log(self):
        oracle = 0.25 * math.log(0.25) + 0.75 * math.log(0.75) + math.log(2)
        assert oracle == pytest.approx(0.130812, abs=1e-6)
        assert surrogate_bound(builtin_loss("log"), 0.5, 0.25) == pytest.approx(oracle, abs=1e-12)

    def test_alpha_range(self):
        with pytest.raises(ValidationError):
            surrogate_bound(builtin_loss("log"), 0.3, 0.35)

    def test_anchor_invariance(self):
        L = builtin_loss("log")
        shifted = ProperLoss(L.w, lambda c: L.W(c) - 2.1, lambda c: L.Wbar(c) - 2.1 * c + 0.8)
        for c0, a in ((0.5, 0.2), (0.3, 0.1), (0.7, 0.25)):
            assert surrogate_bound(shifted, c0, a) == pytest.approx(surrogate_bound(L, c0, a), abs=1e-12)

    @pytest.mark.parametrize("name", ["square", "log", "exp", "tq"])
    def test_validity_on_grid(self, name):
        L = builtin_loss(name)
        g = np.linspace(0.0025, 0.9975, 200)
        for c0 in (0.5, 0.3):
            for eta in g[::4]:
                for eh in g:
                    a = regret_cost(c0, eta, eh)
                    if a <= 1e-3 or a >= min(c0, 1 - c0):
                        continue
                    assert regret(L, eta, eh) >= surrogate_bound(L, c0, a - 1e-3 if a > 2e-3 else a) - 1e-9

    def test_asymmetric_c0_branches(self):
        L = builtin_loss("log")
        c0, a = 0.3, 0.2
        left = L.Wbar(c0 - a) + a * L.W(c0) - L.Wbar(c0)
        right = L.Wbar(c0 + a) - a * L.W(c0) - L.Wbar(c0)
        assert surrogate_bound(L, c0, a) == pytest.approx(min(left, right))
        assert regret(L, c0 - a, c0) == pytest.approx(left, abs=1e-12)


class TestConstraint:
    def test_increasing(self):
        with pytest.raises(ValidationError):
            PinskerConstraint(((0.6, 0.1), (0.4, 0.1)))

    def test_tent(self):
        with pytest.raises(InfeasibleError):
            PinskerConstraint(((0.3, 0.35),))

    def test_not_concave(self):
        with pytest.raises(InfeasibleError):
            PinskerConstraint(((0.2, 0.2), (0.5, 0.05), (0.8, 0.2)))

    def test_box_nonempty_from_experiment(self, rng):
        for e in experiments(rng, 10):
            c = PinskerConstraint.from_experiment(e, [0.2, 0.5, 0.7])
            lo, hi = c.slope_box()
            assert np.all(lo <= hi + 1e-12)

    def test_result_nonnegative(self):
        with pytest.raises(ValidationError):
            BoundResult(-0.1)


class TestPinskerGeneral:
    @pytest.mark.parametrize("V", [0.3, 1.0, 1.7])
    def test_triangular_closed_form(self, V):
        r = pinsker_general(WeightFunction(lambda x: 8.0), half_constraint(V))
        assert r.value == pytest.approx(V * V / 2, abs=1e-8)

    @pytest.mark.parametrize("name", CLOSED_NAMES)
    @pytest.mark.parametrize("V", [0.4, 1.0, 1.6])
    def test_matches_special(self, name, V):
        r = pinsker_general(builtin(name).gamma, half_constraint(V))
        assert r.value == pytest.approx(pinsker_special(name, V), abs=1e-8)

    @pytest.mark.parametrize("V", [0.4, 1.0, 1.6])
    def test_matches_kl(self, V):
        r = pinsker_general(builtin("kl").gamma, half_constraint(V))
        assert r.value == pytest.approx(kl_pinsker_explicit(V).value, abs=1e-8)

    def test_validity_and_monotonicity(self, rng):
        for e in experiments(rng, 15):
            pis = sorted(rng.choice(np.linspace(0.1, 0.9, 17), 3, replace=False))
            for name in VALIDITY_NAMES:
                spec = builtin(name)
                d = f_divergence_direct(e, spec.f)
                prev = 0.0
                for k in (1, 2, 3):
                    b = pinsker_general(spec.gamma, PinskerConstraint.from_experiment(e, pis[:k])).value
                    assert b <= d + 1e-9 * (1 + d)
                    assert b >= prev - 1e-9 * (1 + prev)
                    prev = b

    def test_witness_in_box(self):
        c = PinskerConstraint(((0.3, 0.2), (0.6, 0.25)))
        r = pinsker_general(builtin("hellinger").gamma, c)
        lo, hi = c.slope_box()
        a = np.array(r.witness["a"])
        assert np.all(a >= lo - 1e-12) and np.all(a <= hi + 1e-12)

    def test_tent_constraint_gives_zero(self):
        assert pinsker_general(builtin("kl").gamma, half_constraint(0.0)).value == pytest.approx(0.0, abs=1e-12)


class TestSpecialCases:
    def test_hellinger(self):
        assert pinsker_special("hellinger", 1.0) == pytest.approx(2 - math.sqrt(3))
        assert pinsker_special("hellinger", 1.0) == pytest.approx(0.267949, abs=1e-6)

    def test_chi2(self):
        assert pinsker_special("chi2", 0.5) == pytest.approx(0.25)
        assert pinsker_special("chi2", 1.5) == pytest.approx(3.0)

    @pytest.mark.parametrize("name", SPECIAL_NAMES)
    def test_zero_at_zero(self, name):
        assert pinsker_special(name, 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_jeffreys_two_point_achieves(self):
        J = builtin("jeffreys").f
        for V in (0.5, 1.0, 1.5):
            e = E([(2 + V) / 4, (2 - V) / 4], [(2 - V) / 4, (2 + V) / 4])
            assert variational(e) == pytest.approx(V, abs=1e-15)
            assert f_divergence_direct(e, J) == pytest.approx(pinsker_special("jeffreys", V), abs=1e-10)

    def test_unknown(self):
        with pytest.raises(ValidationError):
            pinsker_special("renyi", 0.5)

    def test_range(self):
        with pytest.raises(ValidationError):
            pinsker_special("hellinger", 2.0)

    @pytest.mark.parametrize("name", ["hellinger", "jeffreys", "jensen_shannon"])
    @pytest.mark.parametrize("V", [0.5, 1.0])
    def test_three_atom_tightness(self, name, V):
        val, e = three_atom_minimum(builtin(name).f, V, grid=21)
        bound = pinsker_special(name, V)
        assert variational(e) == pytest.approx(V, abs=1e-9)
        assert bound - 1e-9 <= val <= 1.02 * bound


class TestKL:
    def test_zero(self):
        assert kl_pinsker_explicit(0.0).value == 0.0

    @pytest.mark.parametrize("V", [0.2, 0.5, 1.0, 1.5, 1.9])
    def test_fedotov_agreement(self, V):
        assert kl_pinsker_explicit(V).value == pytest.approx(fedotov_reference(V), abs=1e-3)

    def test_dominates_classic_pinsker(self):
        assert kl_pinsker_explicit(1.0).value >= 0.5
        for V in np.linspace(0.05, 1.5, 30):
            val = kl_pinsker_explicit(V).value
            assert val >= V * V / 2 + V ** 4 / 36 - 1e-12

    def test_witness_range(self):
        r = kl_pinsker_explicit(1.2)
        assert -0.8 <= r.witness["beta"] <= 0.8

    def test_near_two(self):
        r = kl_pinsker_explicit(2 - 1e-8)
        assert math.isfinite(r.value) and r.value > 5 and "note" in r.witness

    def test_two_point_attains(self):
        # the bound is attained by a two-outcome experiment
        V = 1.0
        val, e = three_atom_minimum(builtin("kl").f, V, grid=21)
        assert val == pytest.approx(kl_pinsker_explicit(V).value, rel=1e-6)


class TestFedotov:
    def test_small_v(self):
        assert fedotov_reference(1e-3) == pytest.approx(0.0, abs=1e-6)

    def test_monotone(self):
        vals = [fedotov_reference(v) for v in np.linspace(0.01, 1.99, 100)]
        assert np.all(np.diff(vals) >= 0)


class TestComparators:
    def test_values_at_one(self):
        c = classic_comparators(1.0)
        assert c["pinsker"] == 0.5
        assert c["kullback"] == pytest.approx(0.52778, abs=1e-5)

    def test_zero(self):
        assert all(v == pytest.approx(0.0, abs=1e-15) for v in classic_comparators(0.0).values())

    def test_dominance_except_toussaint(self):
        for V in np.linspace(0.02, 1.98, 50):
            kl = kl_pinsker_explicit(V).value
            for name, val in classic_comparators(V).items():
                if name != "toussaint":
                    assert val <= kl + 1e-9, (name, V)

    def test_toussaint_exceeds_achievable_kl(self):
        # a two-outcome experiment with V = 1.5 has KL below the toussaint value,
        # so that comparator is not a valid lower bound for large V
        V, x = 1.5, 0.9605
        e = E([x, 1 - x], [x - V / 2, 1 - x + V / 2])
        kl = f_divergence_direct(e, builtin("kl").f)
        assert variational(e) == pytest.approx(V, abs=1e-12)
        assert kl < classic_comparators(V)["toussaint"]
        assert kl >= kl_pinsker_explicit(V).value - 1e-9
