"""Risk curves, ROC curves and conversions between beta and the 0-1 Bayes risk.

The Neyman-Pearson function beta(alpha) and the 0-1 Bayes risk curve
L(pi) determine each other:
    L(pi)      = min_alpha (1 - pi) alpha + pi (1 - beta(alpha))
    beta(alpha) = inf_pi ((1 - pi) alpha + pi - L(pi)) / pi
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from ._numerics import minimize_bounded
from .errors import DomainError, ValidationError
from .experiments import BinaryExperiment, Task

__all__ = [
    "CurvePoints",
    "risk_curve",
    "roc_curve",
    "auc",
    "minLL_from_beta",
    "beta_from_minLL",
    "minLL_from_beta_explicit",
    "beta_from_minLL_explicit",
    "beta_gamma",
    "roc_point_to_risk_line",
    "risk_point_to_roc_line",
]

KINDS = ("risk_vs_cost", "risk_vs_prior", "roc", "beta")


@dataclass(frozen=True)
class CurvePoints:
    x: np.ndarray
    y: np.ndarray
    kind: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        y = np.array(self.y, dtype=float)
        if self.kind not in KINDS:
            raise ValidationError(f"unknown curve kind {self.kind!r}")
        if x.shape != y.shape or x.ndim != 1:
            raise ValidationError("x and y must be 1-D of equal length")
        dx = np.diff(x)
        # ROC curves may rise vertically where an outcome has no Q-mass
        if np.any(dx < 0) or (self.kind != "roc" and np.any(dx == 0)):
            raise ValidationError("x must be increasing")
        if self.kind in ("roc", "beta"):
            if np.any(y < -1e-12) or np.any(y > 1 + 1e-12) or np.any(np.diff(y) < -1e-12):
                raise ValidationError("ROC / beta curves must be non-decreasing in [0, 1]")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def samples(self):
        return list(zip(self.x.tolist(), self.y.tolist()))


def risk_curve(task: Task, eta_hat, costs) -> CurvePoints:
    """Cost-weighted 0-1 risk of thresholding eta_hat at each cost c."""
    e = task.experiment
    eh = np.asarray(eta_hat, dtype=float)
    if eh.shape != (e.n,):
        raise ValidationError(f"eta_hat must have length {e.n}")
    if np.any(eh < 0) or np.any(eh > 1):
        raise ValidationError("eta_hat entries must lie in [0, 1]")
    pi = task.prior
    neg, pos = (1 - pi) * e.q, pi * e.p
    cs = np.asarray(costs, dtype=float)
    vals = [float(c * neg[eh >= c].sum() + (1 - c) * pos[eh < c].sum()) for c in cs]
    return CurvePoints(cs, np.array(vals), "risk_vs_cost", {"prior": pi})


def roc_curve(exp: BinaryExperiment, stat) -> CurvePoints:
    """Vertices (FP, TP) of threshold tests on a score, highest score first."""
    s = np.asarray(stat, dtype=float)
    if s.shape != (exp.n,):
        raise ValidationError(f"stat must have length {exp.n}")
    order = np.argsort(-s, kind="stable")
    fp, tp = [0.0], [0.0]
    i = 0
    while i < order.size:
        j = i
        dq = dp = 0.0
        while j < order.size and s[order[j]] == s[order[i]]:
            dq += exp.q[order[j]]
            dp += exp.p[order[j]]
            j += 1
        fp.append(fp[-1] + dq)
        tp.append(tp[-1] + dp)
        i = j
    fp_a, tp_a = np.minimum(np.array(fp), 1.0), np.minimum(np.array(tp), 1.0)
    fp_a[-1] = tp_a[-1] = 1.0
    return CurvePoints(fp_a, tp_a, "roc")


def auc(curve: CurvePoints) -> float:
    if curve.kind not in ("roc", "beta"):
        raise ValidationError("AUC needs an ROC or beta curve")
    x, y = curve.x, curve.y
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2))


# --- beta <-> L -------------------------------------------------------------

def minLL_from_beta(beta: Callable[[float], float], pi: float) -> float:
    """min over alpha of (1 - pi) alpha + pi (1 - beta(alpha)); convex in alpha."""
    if not 0 < pi < 1:
        raise ValidationError("pi must lie in (0, 1)")
    obj = lambda a: (1 - pi) * a + pi * (1 - beta(a))
    _, val = minimize_bounded(obj, 0.0, 1.0, xatol=1e-13)
    return float(min(max(val, 0.0), min(pi, 1 - pi)))


def beta_from_minLL(L: Callable[[float], float], alpha: float, pi_min: float = 1e-9) -> float:
    """inf over pi in (0, 1] of ((1 - pi) alpha + pi - L(pi)) / pi.

    With u = 1/pi the objective alpha (u - 1) + 1 - u L(1/u) is convex, so a
    geometric scan in u followed by a bounded search between the neighbours
    of the best grid point finds the infimum.
    """
    if not 0 <= alpha <= 1:
        raise ValidationError("alpha must lie in [0, 1]")
    g = lambda u: alpha * (u - 1) + 1 - u * L(1.0 / u)
    us = np.geomspace(1.0, 1.0 / pi_min, 256)
    vals = np.array([g(u) for u in us])
    k = int(np.argmin(vals))
    lo, hi = us[max(k - 1, 0)], us[min(k + 1, us.size - 1)]
    _, val = minimize_bounded(g, lo, hi, xatol=1e-13 * hi)
    return float(min(max(min(val, vals[k]), 0.0), 1.0))


def _invert_decreasing(fun, target, lo, hi):
    flo, fhi = fun(lo) - target, fun(hi) - target
    if flo * fhi > 0:
        return None
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    return float(optimize.brentq(lambda a: fun(a) - target, lo, hi, xtol=1e-15, rtol=1e-15))


def minLL_from_beta_explicit(beta, dbeta, pi: float,
                             dbeta_inv: Optional[Callable[[float], float]] = None
                             ) -> tuple[float, bool]:
    """L(pi) = (1 - pi) a + pi (1 - beta(a)) at a = (beta')^{-1}((1 - pi) / pi).

    Returns (value, fallback) where fallback is True when beta' could not be
    inverted and the optimisation form was used instead.
    """
    target = (1 - pi) / pi
    a = dbeta_inv(target) if dbeta_inv is not None else _invert_decreasing(dbeta, target, 1e-15, 1.0)
    if a is None or not 0 <= a <= 1 or math.isnan(a):
        warnings.warn("beta' is not invertible at this prior; using the optimisation form")
        return minLL_from_beta(beta, pi), True
    return float((1 - pi) * a + pi * (1 - beta(a))), False


def beta_from_minLL_explicit(L, dL, alpha: float,
                             Ltilde_inv: Optional[Callable[[float], float]] = None
                             ) -> tuple[float, bool]:
    """beta(alpha) at pi = min(Ltilde^{-1}(alpha), 1), Ltilde(pi) = L(pi) - pi L'(pi).

    Returns (value, fallback) as for minLL_from_beta_explicit.
    """
    Lt = lambda p: L(p) - p * dL(p)
    if Ltilde_inv is not None:
        p = Ltilde_inv(alpha)
    elif alpha >= Lt(1.0):
        p = 1.0
    else:
        p = _invert_decreasing(lambda x: -Lt(x), -alpha, 1e-12, 1.0)
    if p is None or math.isnan(p) or p <= 0:
        warnings.warn("L - pi L' is not invertible at this alpha; using the optimisation form")
        return beta_from_minLL(L, alpha), True
    p = min(p, 1.0)
    return float(((1 - p) * alpha + p - L(p)) / p), False


def beta_gamma(gamma: float, alpha: float) -> float:
    """Neyman-Pearson curve whose 0-1 Bayes risk is gamma pi (1 - pi)."""
    if not 0 < gamma <= 1:
        raise ValidationError("gamma must lie in (0, 1]")
    if alpha >= gamma:
        return 1.0
    return 2 * math.sqrt(alpha * gamma) + 1 - alpha - gamma


# --- point-line duality ---------------------------------------------------

def roc_point_to_risk_line(fp: float, tp: float, pi: float) -> tuple[float, float]:
    """(slope, intercept) of c -> (1 - pi) c FP + pi (1 - c)(1 - TP)."""
    if not 0 < pi < 1:
        raise ValidationError("pi must lie in (0, 1)")
    return (1 - pi) * fp - pi * (1 - tp), pi * (1 - tp)


def risk_point_to_roc_line(c: float, risk: float, pi: float) -> tuple[float, float]:
    """(slope, intercept) of the ROC line FP -> TP of all points with risk L at cost c."""
    if not 0 < pi < 1:
        raise ValidationError("pi must lie in (0, 1)")
    if c <= 0 or c >= 1:
        raise DomainError("cost 0 or 1 gives a degenerate line")
    d = pi * (1 - c)
    return (1 - pi) * c / d, (d - risk) / d
