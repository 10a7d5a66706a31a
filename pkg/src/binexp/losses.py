"""Proper losses generated by a weight w on the cost parameter c.

A proper loss is determined by w through W (antiderivative of w) and W_bar
(antiderivative of W). Both are anchored so that W(1/2) = W_bar(1/2) = 0;
every quantity below is invariant to that choice.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from ._numerics import maximize_concave, quad
from .convex_core import INF, mul0
from .divergences import WeightFunction, _diverges
from .errors import DivergenceError, DomainError, ShapeError, ValidationError

__all__ = [
    "ProperLoss",
    "LinkFunction",
    "LOSS_NAMES",
    "cost_loss",
    "pointwise_risk",
    "min_cost_risk",
    "conditional_risk",
    "bayes_risk",
    "regret",
    "regret_cost",
    "partial_loss",
    "weight_from_bayes_risk",
    "loss_from_weight",
    "canonical_link",
    "composite_loss",
    "bregman_dual_check",
    "builtin_loss",
    "load_weight_file",
    "parse_loss",
]


@dataclass(frozen=True)
class LinkFunction:
    forward: Callable[[float], float]
    inverse: Callable[[float], float]
    name: str = ""


@dataclass(frozen=True)
class ProperLoss:
    """A proper loss given by its weight and the anchored antiderivatives.

    ``Lbar`` optionally holds a closed-form Bayes risk; ``W_inv`` the inverse
    of W (the inverse canonical link); ``link`` a conventional link when it
    differs from the canonical one.
    """

    w: WeightFunction
    W: Callable[[float], float]
    Wbar: Callable[[float], float]
    name: str = ""
    W_inv: Optional[Callable[[float], float]] = field(default=None, compare=False)
    Lbar: Optional[Callable[[float], float]] = field(default=None, compare=False)
    link: Optional[LinkFunction] = field(default=None, compare=False)

    @cached_property
    def Wbar0(self) -> float:
        return float(self.Wbar(0.0))

    @cached_property
    def Wbar1(self) -> float:
        return float(self.Wbar(1.0))

    def __call__(self, eta: float) -> float:
        return bayes_risk(self, eta)


# --- cost-weighted primitives ----------------------------------------------

def _check_label(y):
    if y not in (-1, 1):
        raise ValidationError("label must be -1 or +1")


def cost_loss(c: float, y: int, eta_hat: float) -> float:
    """Cost c for a false positive, 1 - c for a false negative at threshold c."""
    if not 0 < c < 1:
        raise ValidationError("cost must lie in (0, 1)")
    _check_label(y)
    if y == -1:
        return c if eta_hat >= c else 0.0
    return (1 - c) if eta_hat < c else 0.0


def pointwise_risk(loss: Callable[[int, float], float], eta: float, eta_hat: float) -> float:
    """E_{Y ~ eta} loss(Y, eta_hat) for a partial-loss callable loss(y, eta_hat)."""
    return mul0(loss(-1, eta_hat), 1 - eta) + mul0(loss(1, eta_hat), eta)


def min_cost_risk(c: float, eta: float) -> float:
    return min((1 - eta) * c, (1 - c) * eta)


def regret_cost(c: float, eta: float, eta_hat: float) -> float:
    lo, hi = min(eta, eta_hat), max(eta, eta_hat)
    return abs(eta - c) if lo < c <= hi else 0.0


# --- risks of a weighted loss ------------------------------------------------

def _endpoint_values(loss: ProperLoss) -> tuple[float, float]:
    w0, w1 = loss.Wbar0, loss.Wbar1
    if not (math.isfinite(w0) and math.isfinite(w1)):
        raise DivergenceError(f"W_bar is infinite at an endpoint for loss {loss.name!r}")
    return w0, w1


def conditional_risk(loss: ProperLoss, eta: float, eta_hat: float) -> float:
    """L(eta, eta_hat) = -Wb(eta_hat) + W(eta_hat)(eta_hat - eta) + eta Wb(1) + (1 - eta) Wb(0)."""
    w0, w1 = _endpoint_values(loss)
    wb = loss.Wbar(eta_hat)
    slope = loss.W(eta_hat)
    val = -wb + mul0(slope, eta_hat - eta) + eta * w1 + (1 - eta) * w0
    if math.isnan(val):
        return INF
    return float(val)


def bayes_risk(loss: ProperLoss, eta: float) -> float:
    if loss.Lbar is not None:
        return float(loss.Lbar(eta))
    w0, w1 = _endpoint_values(loss)
    return float(-loss.Wbar(eta) + eta * w1 + (1 - eta) * w0)


def regret(loss: ProperLoss, eta: float, eta_hat: float) -> float:
    """B(eta, eta_hat) = Wb(eta) - Wb(eta_hat) - (eta - eta_hat) W(eta_hat)."""
    if eta == eta_hat:
        return 0.0
    val = loss.Wbar(eta) - loss.Wbar(eta_hat) - mul0(eta - eta_hat, loss.W(eta_hat))
    if math.isnan(val):
        return INF
    return float(max(val, 0.0)) if abs(val) < 1e-15 else float(val)


def partial_loss(loss: ProperLoss, y: int, eta_hat: float) -> float:
    """ell(y, eta_hat) as the w-mixture of cost-weighted losses."""
    _check_label(y)
    if not 0 <= eta_hat <= 1:
        raise DomainError("eta_hat must lie in [0, 1]")
    w = loss.w
    total = 0.0
    if w.smooth is not None:
        if y == 1:
            lo, hi, kern = eta_hat, 1.0, (lambda c: (1 - c) * w.smooth(c))
            if eta_hat == 0.0 and _diverges(w.smooth):
                return INF
        else:
            lo, hi, kern = 0.0, eta_hat, (lambda c: c * w.smooth(c))
            if eta_hat == 1.0 and _diverges(w.smooth, at_one=True):
                return INF
        if lo < hi:
            total = quad(kern, lo, hi, points=w.breaks)
    for loc, mass in w.atoms:
        total += mass * cost_loss(loc, y, eta_hat)
    return float(total)


def weight_from_bayes_risk(Lbar: Callable[[float], float], name: str = "",
                           h: float = 1e-5) -> WeightFunction:
    """w = -Lbar'' by Richardson-extrapolated central differences."""
    def second(c, step):
        return (Lbar(c + step) - 2 * Lbar(c) + Lbar(c - step)) / step ** 2

    def w(c):
        step = min(h, 0.5 * c, 0.5 * (1 - c))
        return -(4 * second(c, step / 2) - second(c, step)) / 3

    for c in np.linspace(0.01, 0.99, 99):
        v = w(float(c))
        if v < -1e-6 * max(1.0, abs(v)):
            raise ShapeError(f"Bayes risk is not concave near c={c:.3g} (w={v:.3g})")
    return WeightFunction(lambda c: max(w(c), 0.0), name=name)


# --- building losses from weights -------------------------------------------

def _atom_W(atoms, c):
    return sum(m * (float(c >= loc) - float(0.5 >= loc)) for loc, m in atoms)


def _atom_Wbar(atoms, c):
    return sum(m * (max(c - loc, 0.0) - max(0.5 - loc, 0.0) - float(0.5 >= loc) * (c - 0.5))
               for loc, m in atoms)


def loss_from_weight(w: WeightFunction, name: str = "", **extra) -> ProperLoss:
    """Proper loss with W, W_bar anchored at 1/2; closed forms used when present."""
    G, Gb = w.antiderivative, w.second_antiderivative
    G_half = G(0.5) if G is not None else 0.0
    Gb_half = Gb(0.5) if Gb is not None else 0.0

    def W(c):
        if not 0 <= c <= 1:
            raise DomainError(f"{c} outside [0, 1]")
        val = _atom_W(w.atoms, c)
        if w.smooth is None:
            return float(val)
        if c == 0.0:
            return -INF if _diverges(w.smooth) else val - quad(w.smooth, 0.0, 0.5, points=w.breaks)
        if c == 1.0:
            return INF if _diverges(w.smooth, at_one=True) else val + quad(w.smooth, 0.5, 1.0, points=w.breaks)
        return float(val + w.Gamma(c) - G_half)

    def Wbar(c):
        if not 0 <= c <= 1:
            raise DomainError(f"{c} outside [0, 1]")
        val = _atom_Wbar(w.atoms, c)
        if w.smooth is None:
            return float(val)
        if c == 0.0:
            return val + w.tail_at_zero
        if c == 1.0:
            return val + w.tail_at_one
        return float(val + w.Gamma_bar(c) - Gb_half - (c - 0.5) * G_half)

    if "W_inv" not in extra and w.smooth is not None:
        extra["W_inv"] = lambda u: _invert_monotone(W, u)
    return ProperLoss(w, W, Wbar, name=name or w.name, **extra)


def _invert_monotone(W, u):
    lo, hi = W(0.0), W(1.0)
    if not lo <= u <= hi:
        raise DomainError(f"{u} outside the range [{lo}, {hi}] of W")
    if u == lo:
        return 0.0
    if u == hi:
        return 1.0
    a, b = 1e-300, 1 - 1e-16
    if W(a) >= u:
        return 0.0
    if W(b) <= u:
        return 1.0
    return float(optimize.brentq(lambda c: W(c) - u, a, b, xtol=1e-15, rtol=1e-15))


def canonical_link(loss: ProperLoss) -> LinkFunction:
    if loss.W_inv is None:
        raise DomainError("W is not invertible for this loss")
    return LinkFunction(loss.W, loss.W_inv, name=f"canonical({loss.name})")


def composite_loss(loss: ProperLoss, link: LinkFunction, eta: float, h: float) -> float:
    """L(eta, link^{-1}(h))."""
    try:
        eta_hat = link.inverse(h)
    except (ValueError, ArithmeticError) as exc:
        raise DomainError(f"{h} outside the range of the link: {exc}") from None
    if eta_hat is None or not 0 <= eta_hat <= 1 or math.isnan(eta_hat):
        raise DomainError(f"{h} outside the range of the link")
    return conditional_risk(loss, eta, eta_hat)


def _conjugate_on_unit(Wbar, s):
    """sup_{c in [0,1]} s c - Wbar(c)."""
    _, val = maximize_concave(lambda c: s * c - Wbar(c), 0.0, 1.0)
    return max(val, -Wbar(0.0), s - Wbar(1.0))


def bregman_dual_check(loss: ProperLoss, x: float, y: float) -> tuple[float, float]:
    """(B_Wbar(x, y), B_{Wbar*}(W(y), W(x))) with Wbar* computed numerically."""
    if loss.w.smooth is None:
        raise DomainError("W is a step function; it has no inverse")
    if not (0 < x < 1 and 0 < y < 1):
        raise DomainError("x and y must lie in (0, 1)")
    if x == y:
        return 0.0, 0.0
    Wx, Wy = loss.W(x), loss.W(y)
    if Wx == Wy:
        raise DomainError("W is flat between x and y")
    lhs = loss.Wbar(x) - loss.Wbar(y) - (x - y) * Wy
    star = lambda s: _conjugate_on_unit(loss.Wbar, s)
    rhs = star(Wy) - star(Wx) - (Wy - Wx) * x
    return float(lhs), float(rhs)


# --- builtin catalog ------------------------------------------------------

def _xlogx(x):
    return 0.0 if x == 0 else x * math.log(x)


def _logit(c):
    if c == 0.0:
        return -INF
    if c == 1.0:
        return INF
    return math.log(c / (1 - c))


def _sigmoid(u):
    if u >= 0:
        return 1.0 / (1.0 + math.exp(-u))
    e = math.exp(u)
    return e / (1.0 + e)


def _square():
    w = WeightFunction(lambda c: 2.0, name="square")
    return ProperLoss(w, lambda c: 2 * c - 1, lambda c: (c - 0.5) ** 2, name="square",
                      W_inv=lambda u: _range_checked((u + 1) / 2, u),
                      Lbar=lambda e: e * (1 - e))


def _range_checked(c, u):
    if not 0 <= c <= 1:
        raise DomainError(f"{u} outside the range of W")
    return c


def _log():
    w = WeightFunction(lambda c: 1 / (c * (1 - c)), name="log")
    return ProperLoss(w, _logit, lambda c: _xlogx(c) + _xlogx(1 - c) + math.log(2),
                      name="log", W_inv=_sigmoid,
                      Lbar=lambda e: -_xlogx(e) - _xlogx(1 - e))


def _exp():
    w = WeightFunction(lambda c: 0.5 * (c * (1 - c)) ** -1.5, name="exp")

    def W(c):
        if c in (0.0, 1.0):
            return INF if c else -INF
        return (2 * c - 1) / math.sqrt(c * (1 - c))

    half_logit = LinkFunction(lambda c: 0.5 * _logit(c), lambda u: _sigmoid(2 * u), "half_logit")
    return ProperLoss(w, W, lambda c: 1 - 2 * math.sqrt(c * (1 - c)), name="exp",
                      W_inv=lambda u: 0.5 + 0.5 * u / math.sqrt(u * u + 4),
                      Lbar=lambda e: 2 * math.sqrt(e * (1 - e)), link=half_logit)


def _tq():
    w = WeightFunction(lambda c: 8.0, name="tq")
    return ProperLoss(w, lambda c: 8 * c - 4, lambda c: 4 * (c - 0.5) ** 2, name="tq",
                      W_inv=lambda u: _range_checked((u + 4) / 8, u),
                      Lbar=lambda e: 4 * e * (1 - e))


def _zero_one():
    w = WeightFunction(atoms=((0.5, 2.0),), name="zero_one")
    return loss_from_weight(w, Lbar=lambda e: min(e, 1 - e))


def _cost(c0: float):
    if not 0 < c0 < 1:
        raise ValidationError("cost parameter must lie in (0, 1)")
    w = WeightFunction(atoms=((c0, 1.0),), name=f"cost:{c0:g}")
    return loss_from_weight(w, Lbar=lambda e: min_cost_risk(c0, e))


_BUILDERS = {"square": _square, "log": _log, "exp": _exp, "tq": _tq, "zero_one": _zero_one}
_ALIASES = {"exponential": "exp", "truncated_quadratic": "tq", "brier": "square"}
LOSS_NAMES = ("square", "log", "exp", "tq", "zero_one", "cost")


def builtin_loss(name: str, c0: float = 0.5) -> ProperLoss:
    name = _ALIASES.get(name, name)
    if name == "cost":
        return _cost(c0)
    if name not in _BUILDERS:
        raise ValidationError(f"unknown loss {name!r}; choose from {', '.join(LOSS_NAMES)}")
    return _BUILDERS[name]()


def load_weight_file(path: str | Path) -> WeightFunction:
    """CSV of ``c,w`` rows (linearly interpolated) plus ``atom,loc,mass`` rows."""
    path = Path(path)
    xs, ys, atoms = [], [], []
    for r, row in enumerate(csv.reader(path.read_text().splitlines()), start=1):
        cells = [c.strip() for c in row]
        if not cells or all(not c for c in cells) or cells[0].startswith("#"):
            continue
        if cells[0].lower() == "atom":
            if len(cells) != 3:
                raise ValidationError(f"{path}: row {r}: atom rows need 'atom,loc,mass'")
            vals = cells[1:]
        else:
            if len(cells) != 2:
                raise ValidationError(f"{path}: row {r} has {len(cells)} columns, expected 2")
            vals = cells
        try:
            a, b = float(vals[0]), float(vals[1])
        except ValueError:
            if r == 1 and cells[0].lower() == "c":
                continue
            raise ValidationError(f"{path}: row {r}: non-numeric entry") from None
        if cells[0].lower() == "atom":
            atoms.append((a, b))
        else:
            if not 0 < a < 1 or b < 0:
                raise ValidationError(f"{path}: row {r}: need 0 < c < 1 and w >= 0")
            xs.append(a)
            ys.append(b)
    if xs and np.any(np.diff(xs) <= 0):
        raise ValidationError(f"{path}: c values must be strictly increasing")
    smooth = None
    if xs:
        xa, ya = np.array(xs), np.array(ys)
        smooth = lambda c: float(np.interp(c, xa, ya))
    return WeightFunction(smooth, tuple(atoms), name=path.stem, breaks=tuple(xs))


def parse_loss(text: str) -> ProperLoss:
    """Parse ``log``, ``cost:0.3`` or ``weight-file:<path>``."""
    if text.startswith("weight-file:"):
        return loss_from_weight(load_weight_file(text.split(":", 1)[1]))
    if text.startswith("cost:"):
        try:
            c0 = float(text.split(":", 1)[1])
        except ValueError:
            raise ValidationError(f"bad cost parameter in {text!r}") from None
        return builtin_loss("cost", c0)
    return builtin_loss(text)
