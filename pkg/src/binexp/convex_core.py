"""Convex functions on the half line and the transforms built on them.

Values are plain floats; ``math.inf`` plays the role of the extended real
+infinity and the convention 0 * inf = 0 is used throughout.
"""

from __future__ import annotations

import math
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from ._numerics import maximize_concave, minimize_bounded, minimize_log_bracket
from .errors import DivergenceError, DomainError, ValidationError

INF = math.inf

__all__ = [
    "INF",
    "ConvexFunction",
    "mul0",
    "perspective_eval",
    "csiszar_dual",
    "lf_conjugate_eval",
    "lf_conjugate",
    "jensen_gap",
    "inf_convolve",
    "infimal_convolution",
]


def mul0(a: float, b: float) -> float:
    """Product with the convention 0 * inf = 0."""
    if a == 0.0 or b == 0.0:
        return 0.0
    return a * b


class ConvexFunction:
    """A convex function of one real variable with endpoint data.

    Parameters
    ----------
    fn : callable
        Evaluates the function at interior points of ``domain``.
    deriv1, deriv2 : callable, optional
        First and second derivatives.
    deriv1_inv : callable, optional
        Inverse of ``deriv1``; returns nan outside the range of ``deriv1``.
        Enables the closed-form Legendre transform.
    limit_at_zero, slope_at_infinity : float, optional
        ``f(0) = lim_{s->0} f(s)`` and ``lim_{s->inf} f(s)/s``. Probed
        numerically when omitted.
    domain : (lo, hi)
        ``(0, inf)`` for divergence generators.
    kinks : sequence of (location, jump in f')
        Points where f is not differentiable. Used to place Dirac atoms in
        weight functions.
    """

    def __init__(self, fn: Callable[[float], float], *,
                 deriv1: Optional[Callable[[float], float]] = None,
                 deriv2: Optional[Callable[[float], float]] = None,
                 deriv1_inv: Optional[Callable[[float], float]] = None,
                 limit_at_zero: Optional[float] = None,
                 slope_at_infinity: Optional[float] = None,
                 domain: tuple[float, float] = (0.0, INF),
                 kinks: Sequence[tuple[float, float]] = (),
                 name: str = ""):
        self._fn = fn
        self.deriv1 = deriv1
        self.deriv2 = deriv2
        self.deriv1_inv = deriv1_inv
        self.domain = (float(domain[0]), float(domain[1]))
        self.kinks = tuple((float(a), float(b)) for a, b in kinks)
        self.name = name
        if limit_at_zero is not None:
            self.__dict__["limit_at_zero"] = float(limit_at_zero)
        if slope_at_infinity is not None:
            self.__dict__["slope_at_infinity"] = float(slope_at_infinity)

    def __repr__(self):
        return f"ConvexFunction({self.name or self._fn!r})"

    @cached_property
    def limit_at_zero(self) -> float:
        v8, v12, v16 = (float(self._fn(t)) for t in (1e-8, 1e-12, 1e-16))
        if v12 > 1e12 or v8 > 1e10:
            return INF
        # steady growth per decade signals a logarithmic singularity
        if v12 - v8 > 1.0 and v16 - v12 > 1.0:
            return INF
        return v12

    @cached_property
    def slope_at_infinity(self) -> float:
        r3 = float(self._fn(1e3)) / 1e3
        r6 = float(self._fn(1e6)) / 1e6
        if not math.isfinite(r6) or r6 - r3 > 0.5:
            return INF
        # difference quotient far out converges faster than f(s)/s
        return float(self._fn(2e12) - self._fn(1e12)) / 1e12

    @property
    def value_at_one(self) -> float:
        return float(self(1.0))

    def __call__(self, s: float) -> float:
        lo, hi = self.domain
        if s < lo or s > hi:
            raise DomainError(f"{s} outside domain {self.domain}")
        if s == 0.0 and lo == 0.0:
            return self.limit_at_zero
        if s == INF:
            return INF
        return float(self._fn(s))

    def second_derivative(self, s: float) -> float:
        """f''(s), analytic when available, else by central differences."""
        if self.deriv2 is not None:
            return float(self.deriv2(s))
        h = 1e-4 * max(1.0, abs(s))
        if self.deriv1 is not None:
            d = lambda k: (self.deriv1(s + k) - self.deriv1(s - k)) / (2 * k)
            h = min(h, 0.5 * s) if self.domain[0] == 0.0 else h
            return float((4 * d(h / 2) - d(h)) / 3)
        h = min(1e-3 * max(1.0, abs(s)), 0.25 * s) if self.domain[0] == 0.0 else 1e-3
        d = lambda k: (self._fn(s + k) - 2 * self._fn(s) + self._fn(s - k)) / k ** 2
        return float((4 * d(h / 2) - d(h)) / 3)

    def first_derivative(self, s: float) -> float:
        if self.deriv1 is not None:
            return float(self.deriv1(s))
        h = 1e-5 * max(1.0, abs(s))
        if self.domain[0] == 0.0:
            h = min(h, 0.5 * s)
        d = lambda k: (self._fn(s + k) - self._fn(s - k)) / (2 * k)
        return float((4 * d(h / 2) - d(h)) / 3)


def perspective_eval(f: ConvexFunction, s: float, tau: float) -> float:
    """tau * f(s / tau), extended to the boundary of the quadrant by limits."""
    if s < 0 or tau < 0:
        raise DomainError("perspective requires s >= 0 and tau >= 0")
    if tau == 0.0:
        if s == 0.0:
            return 0.0
        return mul0(s, f.slope_at_infinity)
    if s == 0.0:
        return mul0(tau, f.limit_at_zero)
    return tau * f(s / tau)


def csiszar_dual(f: ConvexFunction) -> ConvexFunction:
    """The function tau -> tau * f(1 / tau)."""
    d1 = d2 = None
    if f.deriv1 is not None:
        d1 = lambda t: f(1.0 / t) - f.deriv1(1.0 / t) / t
    if f.deriv2 is not None:
        d2 = lambda t: f.deriv2(1.0 / t) / t ** 3
    kinks = tuple((1.0 / k, j / k) for k, j in f.kinks if k > 0)
    return ConvexFunction(
        lambda t: t * f(1.0 / t),
        deriv1=d1, deriv2=d2,
        limit_at_zero=f.slope_at_infinity,
        slope_at_infinity=f.limit_at_zero,
        kinks=kinks,
        name=f"dual({f.name})" if f.name else "",
    )


def lf_conjugate_eval(f: ConvexFunction, s_star: float) -> float:
    """Legendre-Fenchel conjugate sup_s (s * s_star - f(s)) over the domain."""
    lo, hi = f.domain
    if lo == 0.0 and hi == INF:
        slope = f.slope_at_infinity
        if s_star > slope:
            return INF
    if f.deriv1_inv is not None and f.deriv1 is not None:
        u = f.deriv1_inv(s_star)
        if u is not None and math.isfinite(u) and lo < u < hi:
            return s_star * u - f(u)
    if lo == 0.0 and hi == INF:
        return _conjugate_halfline(f, s_star)
    obj = lambda u: s_star * u - f(u)
    _, val = maximize_concave(obj, lo, hi)
    if math.isfinite(lo):
        val = max(val, obj(lo))
    if math.isfinite(hi):
        val = max(val, obj(hi))
    return float(val)


def _conjugate_halfline(f: ConvexFunction, s_star: float) -> float:
    slope = f.slope_at_infinity
    # -f(u) + s u is concave; unimodal in log u as well
    try:
        u, neg = minimize_log_bracket(lambda u: f(u) - s_star * u, 1e-8, 1e8, xatol=1e-11)
    except DivergenceError:
        return INF
    best = -neg
    f0 = f.limit_at_zero
    if math.isfinite(f0):
        best = max(best, -f0)
    if s_star == slope and u >= 1e7:
        # supremum approached at infinity; refine along a geometric ray
        ray = [s_star * x - f(x) for x in (1e9, 1e11, 1e13)]
        best = max(best, ray[-1])
    return float(best)


def lf_conjugate(f: ConvexFunction, domain: tuple[float, float] = (-INF, INF)
                 ) -> ConvexFunction:
    """The conjugate as a ConvexFunction on ``domain`` (numerical)."""
    return ConvexFunction(lambda s: lf_conjugate_eval(f, s), domain=domain,
                          limit_at_zero=lf_conjugate_eval(f, 0.0) if domain[0] == 0.0 else None,
                          name=f"conj({f.name})" if f.name else "")


def jensen_gap(f: Callable[[float], float], values: Sequence[float],
               probs: Sequence[float]) -> float:
    """sum_i p_i f(v_i) - f(sum_i p_i v_i)."""
    v = np.asarray(values, dtype=float)
    p = np.asarray(probs, dtype=float)
    if v.shape != p.shape or v.ndim != 1:
        raise ValidationError("values and probs must be 1-D of equal length")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValidationError("probs must be a probability vector")
    mean = float(p @ v)
    return float(sum(pi * f(vi) for pi, vi in zip(p, v) if pi > 0) - f(mean))


def inf_convolve(f: ConvexFunction, g: ConvexFunction, tau: float) -> float:
    """Extended infimal convolution inf_{x>0} f(x) + tau * g(x / tau)."""
    if not tau > 0:
        raise DomainError("tau must be positive")
    obj = lambda x: f(x) + tau * g(x / tau)
    try:
        _, val = minimize_log_bracket(obj, 1e-8, 1e8, xatol=1e-11)
    except DivergenceError:
        raise DivergenceError(f"f box g is unbounded below at tau={tau}") from None
    at_zero = f.limit_at_zero + mul0(tau, g.limit_at_zero)
    return float(min(val, at_zero))


def infimal_convolution(f: ConvexFunction, g: ConvexFunction) -> ConvexFunction:
    """f box g as a ConvexFunction of tau."""
    return ConvexFunction(lambda t: inf_convolve(f, g, t),
                          name=f"{f.name}[]{g.name}" if f.name else "")
