"""Thin wrappers around scipy's 1-D optimisation and quadrature."""

from __future__ import annotations

import math
import warnings
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import DivergenceError

QUAD_EPSREL = 1e-11
QUAD_LIMIT = 400


def quad(fun: Callable[[float], float], a: float, b: float, points=None,
         epsrel: float = QUAD_EPSREL) -> float:
    """Adaptive Gauss-Kronrod integral of ``fun`` over [a, b]."""
    if a == b:
        return 0.0
    if points is not None:
        points = [p for p in points if min(a, b) < p < max(a, b)] or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(fun, a, b, points=points, epsabs=0.0,
                                epsrel=epsrel, limit=QUAD_LIMIT)
    return float(val)


def _centred_brent(fun, lo, hi, xatol):
    mid = 0.5 * (lo + hi)
    res = optimize.minimize_scalar(lambda v: fun(mid + v), bounds=(lo - mid, hi - mid),
                                   method="bounded",
                                   options={"xatol": xatol, "maxiter": 1000})
    return mid + float(res.x), float(res.fun)


def minimize_bounded(fun: Callable[[float], float], lo: float, hi: float,
                     xatol: float = 1e-12) -> tuple[float, float]:
    """Minimise a unimodal function on [lo, hi], endpoints included."""
    if hi - lo <= xatol:
        x = 0.5 * (lo + hi)
        return x, fun(x)
    # scipy's stopping rule adds sqrt(eps) * |x|; centring the bracket at the
    # origin makes that term scale with the bracket width instead of |x|
    best_x, best_f = _centred_brent(fun, lo, hi, xatol)
    # second pass on a narrow bracket shrinks the relative term as well
    w = 1e-6 * (hi - lo) + 10 * xatol
    a, b = max(lo, best_x - w), min(hi, best_x + w)
    if b - a < 0.5 * (hi - lo):
        x2, f2 = _centred_brent(fun, a, b, xatol)
        if f2 <= best_f:
            best_x, best_f = x2, f2
    for x in (lo, hi):
        fx = fun(x)
        if fx < best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def minimize_scan(fun: Callable[[float], float], lo: float, hi: float,
                  n: int = 256, xatol: float = 1e-12) -> tuple[float, float]:
    """Grid scan followed by bounded refinement around the best grid point."""
    xs = np.linspace(lo, hi, n)
    vals = np.array([fun(x) for x in xs])
    k = int(np.argmin(vals))
    a, b = xs[max(k - 1, 0)], xs[min(k + 1, n - 1)]
    x, fx = minimize_bounded(fun, a, b, xatol=xatol)
    if vals[k] < fx:
        return float(xs[k]), float(vals[k])
    return x, fx


def minimize_log_bracket(fun: Callable[[float], float], lo: float = 1e-8,
                         hi: float = 1e8, xatol: float = 1e-10
                         ) -> tuple[float, float]:
    """Minimise a unimodal function of x > 0 by searching over log x.

    Raises DivergenceError when the minimum sits on the upper bracket edge and
    the function is still decreasing there (unbounded below).
    """
    g = lambda u: fun(math.exp(u))
    u, fu = minimize_bounded(g, math.log(lo), math.log(hi), xatol=xatol)
    if u >= math.log(hi) - 1e-6:
        far = fun(hi * 1e4)
        if far < fu - 1e-9 * (1.0 + abs(fu)):
            raise DivergenceError("objective is unbounded below")
    return math.exp(u), fu


def maximize_concave(fun: Callable[[float], float], lo: float = -math.inf,
                     hi: float = math.inf, xatol: float = 1e-12
                     ) -> tuple[float, float]:
    """Maximise a concave function on an interval that may be unbounded.

    ``fun`` may return -inf outside its effective domain. A finite bracket is
    grown geometrically from the origin before bounded refinement.
    """
    def neg(x):
        v = fun(x)
        return math.inf if v == -math.inf else -v

    a = lo if math.isfinite(lo) else None
    b = hi if math.isfinite(hi) else None
    start = 0.0
    if a is not None and b is not None:
        start = 0.5 * (a + b)
    elif a is not None:
        start = a + 1.0
    elif b is not None:
        start = b - 1.0
    step = 1.0
    if a is None:
        a = start - step
        while neg(a) < neg(a + 0.5 * step) and a > -1e12:
            step *= 2.0
            a = start - step
    step = 1.0
    if b is None:
        b = start + step
        while neg(b) < neg(b - 0.5 * step) and b < 1e12:
            step *= 2.0
            b = start + step
    x, fx = minimize_bounded(neg, a, b, xatol=xatol)
    return x, -fx
