"""Statistical and Bregman information, and the loss <-> f-divergence bridge.

For a prior pi the maps f_from_loss / loss_from_f identify a concave Bayes
risk with a convex generator so that statistical information of a task equals
the f-divergence of its experiment. The weights of the two sides are related
by the involutive change of variables T(c) = (1 - c) pi / nu(c) with
nu(c) = (1 - c) pi + (1 - pi) c.
"""

from __future__ import annotations

import math
from typing import Callable, Union

from ._numerics import minimize_bounded, quad
from .convex_core import INF, ConvexFunction, mul0
from .divergences import WeightFunction, _diverges, gamma_from_f
from .errors import ValidationError
from .experiments import Task
from .losses import ProperLoss, _invert_monotone, bayes_risk, regret

__all__ = [
    "statistical_information",
    "bregman_information",
    "f_from_loss",
    "loss_from_f",
    "w_from_gamma",
    "gamma_from_w",
]

BayesRisk = Union[ProperLoss, Callable[[float], float]]


def _check_prior(pi):
    if not 0 < pi < 1:
        raise ValidationError("prior must lie in (0, 1)")


def _Lbar(loss: BayesRisk) -> Callable[[float], float]:
    if isinstance(loss, ProperLoss):
        return lambda e: bayes_risk(loss, e)
    return loss


def statistical_information(task: Task, loss: BayesRisk) -> float:
    """L(pi) - sum_i m_i L(eta_i).

    Without a closed-form Bayes risk the equivalent sum_i m_i Wb(eta_i) - Wb(pi)
    is used; the affine part of L cancels because sum_i m_i eta_i = pi, so this
    stays finite even when the partial losses themselves are not.
    """
    if isinstance(loss, ProperLoss) and loss.Lbar is None:
        L = lambda e: -loss.Wbar(e)
    else:
        L = _Lbar(loss)
    prior_risk = L(task.prior)
    terms = [m * L(float(e)) for m, e in zip(task.mixture, task.posterior)]
    if not math.isfinite(prior_risk) or not all(map(math.isfinite, terms)):
        return INF
    val = prior_risk - math.fsum(terms)
    return max(val, 0.0) if abs(val) < 1e-15 else val


def bregman_information(task: Task, loss: ProperLoss, return_minimizer: bool = False):
    """min_s sum_i m_i B(eta_i, s); the minimiser is the mean posterior pi."""
    m, eta = task.mixture, task.posterior

    def obj(s):
        return math.fsum(mi * regret(loss, float(ei), s) for mi, ei in zip(m, eta))

    # the minimiser is a mean of the posteriors, so it lies in their hull
    lo, hi = float(eta.min()), float(eta.max())
    if hi - lo <= 1e-15:
        s = 0.5 * (lo + hi)
        return (0.0, s) if return_minimizer else 0.0
    s, val = minimize_bounded(obj, lo, hi, xatol=1e-12)
    return (val, s) if return_minimizer else val


# --- loss <-> f ---------------------------------------------------------------

def f_from_loss(loss: BayesRisk, pi: float, name: str = "") -> ConvexFunction:
    """f(t) = L(pi) - (pi t + 1 - pi) L(pi t / (pi t + 1 - pi))."""
    _check_prior(pi)
    L = _Lbar(loss)
    Lpi = L(pi)

    def fn(t):
        d = pi * t + 1 - pi
        return Lpi - d * L(pi * t / d)

    deriv2 = None
    kinks = ()
    if isinstance(loss, ProperLoss):
        w = loss.w
        if w.smooth is not None:
            def deriv2(t):
                d = pi * t + 1 - pi
                return (pi * (1 - pi)) ** 2 / d ** 3 * w.smooth(pi * t / d)
        else:
            deriv2 = lambda t: 0.0
        kinks = tuple(((1 - pi) * c0 / (pi * (1 - c0)), pi * mass * (1 - c0))
                      for c0, mass in w.atoms)
    return ConvexFunction(
        fn, deriv2=deriv2,
        limit_at_zero=Lpi - (1 - pi) * L(0.0),
        slope_at_infinity=-pi * L(1.0),
        kinks=kinks, name=name or f"f[{getattr(loss, 'name', '')},{pi:g}]",
    )


def loss_from_f(f: ConvexFunction, pi: float, name: str = "") -> ProperLoss:
    """Proper loss with L(eta) = -((1 - eta)/(1 - pi)) f(((1 - pi)/pi) eta / (1 - eta))."""
    _check_prior(pi)
    if abs(f.value_at_one) > 1e-9 * (1 + abs(f(2.0))):
        raise ValidationError("f must satisfy f(1) = 0")
    k = (1 - pi) / pi

    def Lbar(eta):
        if eta == 1.0:
            return -f.slope_at_infinity / pi
        if eta == 0.0:
            return -f.limit_at_zero / (1 - pi)
        return -(1 - eta) / (1 - pi) * f(k * eta / (1 - eta))

    def dL(eta):
        t = k * eta / (1 - eta)
        return (f(t) - f.first_derivative(t) * (t + k)) / (1 - pi)

    L_half, dL_half = Lbar(0.5), dL(0.5)
    w = w_from_gamma(gamma_from_f(f), pi)

    def Wbar(c):
        val = -Lbar(c) + L_half + (c - 0.5) * dL_half
        return INF if math.isnan(val) else val

    def W(c):
        if 0 < c < 1:
            return -dL(c) + dL_half
        # endpoint values as limits of the integral of w
        inner = 0.25 if c == 0 else 0.75
        tail = 0.0
        if w.smooth is not None:
            if _diverges(w.smooth, at_one=(c == 1)):
                return -INF if c == 0 else INF
            tail = quad(w.smooth, 0.0, inner) if c == 0 else quad(w.smooth, inner, 1.0)
        jumps = sum(m for loc, m in w.atoms if (loc < inner if c == 0 else loc >= inner))
        return W(inner) - tail - jumps if c == 0 else W(inner) + tail + jumps

    return ProperLoss(w, W, Wbar, name=name or f"loss[{f.name},{pi:g}]",
                      W_inv=lambda u: _invert_monotone(W, u), Lbar=Lbar)


# --- w <-> gamma ---------------------------------------------------------

def _nu(pi, c):
    return (1 - c) * pi + (1 - pi) * c


def _T(pi, c):
    return (1 - c) * pi / _nu(pi, c)


def w_from_gamma(gamma: WeightFunction, pi: float) -> WeightFunction:
    """w(c) = pi (1 - pi) / nu(c)^3 * gamma(T(c))."""
    _check_prior(pi)
    smooth = None
    if gamma.smooth is not None:
        smooth = lambda c: pi * (1 - pi) / _nu(pi, c) ** 3 * gamma.smooth(_T(pi, c))
    atoms = tuple((_T(pi, x), m / _nu(pi, _T(pi, x))) for x, m in gamma.atoms)
    breaks = tuple(_T(pi, b) for b in gamma.breaks)
    return WeightFunction(smooth, atoms, name=f"w[{gamma.name},{pi:g}]", breaks=breaks)


def gamma_from_w(w: WeightFunction, pi: float) -> WeightFunction:
    """gamma(x) = pi^2 (1 - pi)^2 / nu(x)^3 * w(T(x)); inverse of w_from_gamma."""
    _check_prior(pi)
    smooth = None
    if w.smooth is not None:
        smooth = lambda x: (pi * (1 - pi)) ** 2 / _nu(pi, x) ** 3 * w.smooth(_T(pi, x))
    atoms = tuple((_T(pi, c), m * _nu(pi, c)) for c, m in w.atoms)
    breaks = tuple(_T(pi, b) for b in w.breaks)
    return WeightFunction(smooth, atoms, name=f"gamma[{w.name},{pi:g}]", breaks=breaks)
