"""f-divergences, their weight functions on (0, 1), and the builtin catalog.

An f-divergence of a finite experiment can be computed two ways: by summing
perspective terms q_i f(p_i / q_i), or by integrating the 0-1 statistical
information against the weight gamma(pi) = f''((1 - pi) / pi) / pi^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from ._numerics import quad
from .convex_core import INF, ConvexFunction, perspective_eval
from .errors import DivergenceError, NumericError, ValidationError
from .experiments import BinaryExperiment, statistical_information_01

__all__ = [
    "WeightFunction",
    "DivergenceSpec",
    "BUILTIN_NAMES",
    "f_divergence_direct",
    "variational",
    "gamma_from_f",
    "f_from_gamma",
    "divergence_via_weight",
    "is_symmetric_weight",
    "builtin",
    "primitive_f_pi",
]

INF_CAP = 1e15


@dataclass(frozen=True)
class WeightFunction:
    """Non-negative density on (0, 1) plus Dirac atoms.

    ``antiderivative`` and ``second_antiderivative`` are optional closed
    forms for the smooth part (any constants of integration). ``breaks`` lists
    interior points where the density is not smooth.
    """

    smooth: Optional[Callable[[float], float]] = None
    atoms: tuple = ()
    name: str = ""
    antiderivative: Optional[Callable[[float], float]] = field(default=None, compare=False)
    second_antiderivative: Optional[Callable[[float], float]] = field(default=None, compare=False)
    breaks: tuple = ()

    def __post_init__(self):
        atoms = tuple(sorted((float(a), float(m)) for a, m in self.atoms))
        for loc, mass in atoms:
            if not 0.0 < loc < 1.0 or not mass > 0:
                raise ValidationError("atoms need location in (0, 1) and positive mass")
        if len({a for a, _ in atoms}) != len(atoms):
            raise ValidationError("atom locations must be distinct")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "breaks", tuple(sorted(float(b) for b in self.breaks)))

    def density(self, x: float) -> float:
        if self.smooth is None:
            return 0.0
        return float(self.smooth(x))

    __call__ = density

    def Gamma(self, x: float) -> float:
        """Antiderivative of the smooth part (anchored at 1/2 when numeric)."""
        if self.smooth is None:
            return 0.0
        if self.antiderivative is not None:
            return float(self.antiderivative(x))
        return quad(self.smooth, 0.5, x, points=self.breaks)

    def Gamma_bar(self, x: float) -> float:
        """Antiderivative of Gamma (anchored at 1/2 when numeric)."""
        if self.smooth is None:
            return 0.0
        if self.second_antiderivative is not None:
            return float(self.second_antiderivative(x))
        return quad(lambda t: (x - t) * self.smooth(t), 0.5, x, points=self.breaks)

    @cached_property
    def tail_at_zero(self) -> float:
        """int_0^{1/2} pi gamma(pi) d pi over the smooth part."""
        if self.smooth is None:
            return 0.0
        if _diverges(lambda x: x * self.smooth(x)):
            return INF
        return quad(lambda x: x * self.smooth(x), 0.0, 0.5, points=self.breaks)

    @cached_property
    def tail_at_one(self) -> float:
        """int_{1/2}^1 (1 - pi) gamma(pi) d pi over the smooth part."""
        if self.smooth is None:
            return 0.0
        if _diverges(lambda x: (1 - x) * self.smooth(x), at_one=True):
            return INF
        return quad(lambda x: (1 - x) * self.smooth(x), 0.5, 1.0, points=self.breaks)


def _diverges(h: Callable[[float], float], at_one: bool = False) -> bool:
    """Heuristic test for a non-integrable endpoint singularity of h."""
    g = (lambda d: h(1.0 - d)) if at_one else h
    # substitute x = e^u so the singular end is spread over a long interval
    gu = lambda u: g(math.exp(u)) * math.exp(u)
    I = [quad(gu, math.log(d), math.log(1e-2)) for d in (1e-6, 1e-10, 1e-14)]
    if not all(map(math.isfinite, I)):
        return True
    inc1, inc2 = I[1] - I[0], I[2] - I[1]
    return inc2 > 1e-6 and inc2 > 0.5 * inc1


@dataclass(frozen=True)
class DivergenceSpec:
    name: str
    f: Optional[ConvexFunction]
    gamma: Optional[WeightFunction]
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.f is None and self.gamma is None:
            raise ValidationError("a divergence needs f, gamma or both")


def f_divergence_direct(exp: BinaryExperiment, f: ConvexFunction) -> float:
    """sum_i q_i f(p_i / q_i) - f(1), with boundary terms by limits."""
    p, q = exp.p, exp.q
    # structural infinities before any arithmetic
    if np.any((q == 0) & (p > 0)) and f.slope_at_infinity == INF:
        return INF
    if np.any((p == 0) & (q > 0)) and f.limit_at_zero == INF:
        return INF
    total = math.fsum(perspective_eval(f, float(a), float(b)) for a, b in zip(p, q))
    val = total - f.value_at_one
    if not math.isfinite(val) or val > INF_CAP:
        return INF
    return max(val, 0.0) if abs(val) < 1e-14 else val


def variational(exp: BinaryExperiment) -> float:
    """sum_i |p_i - q_i|."""
    return float(np.abs(exp.p - exp.q).sum())


def gamma_from_f(f: ConvexFunction, name: str = "") -> WeightFunction:
    """Weight gamma(pi) = f''((1 - pi) / pi) / pi^3, atoms from declared kinks."""
    def smooth(x):
        t = (1 - x) / x
        try:
            v = f.second_derivative(t)
        except (ArithmeticError, ValueError) as exc:
            raise NumericError(f"f'' failed at t={t} (pi={x}): {exc}") from None
        if not math.isfinite(v):
            raise NumericError(f"f'' is not finite at t={t} (pi={x})")
        return v / x ** 3

    # a jump J in f' at t corresponds to gamma mass J (1 + t) at 1 / (1 + t)
    atoms = tuple((1.0 / (1.0 + t), j * (1.0 + t)) for t, j in f.kinks if t > 0)
    return WeightFunction(smooth, atoms, name=name or f.name)


def f_from_gamma(gamma: WeightFunction, name: str = "") -> ConvexFunction:
    """Invert the weight map: f(s) = int_1^s (s - tau) phi(tau) d tau.

    phi(tau) = gamma(1 / (1 + tau)) / (1 + tau)^3 is f''. Anchoring the double
    integral at 1 gives f(1) = f'(1) = 0 and keeps it finite for weights whose
    f' blows up at 0 (e.g. KL).
    """
    phi = lambda t: gamma.density(1.0 / (1.0 + t)) / (1.0 + t) ** 3
    kinks = tuple(((1 - a) / a, m * a) for a, m in gamma.atoms)
    tbreaks = [(1 - b) / b for b in gamma.breaks]

    def atoms_val(s):
        return sum(0.5 * j * (abs(s - t) - abs(1 - t)) for t, j in kinks)

    def atoms_d1(s):
        return sum(0.5 * j * math.copysign(1.0, s - t) for t, j in kinks)

    def fn(s):
        v = quad(lambda t: (s - t) * phi(t), 1.0, s, points=tbreaks) if gamma.smooth else 0.0
        if not math.isfinite(v):
            raise DivergenceError(f"weight is not integrable near s={s}")
        return v + atoms_val(s)

    def d1(s):
        v = quad(phi, 1.0, s, points=tbreaks) if gamma.smooth else 0.0
        return v + atoms_d1(s)

    f0_atoms = sum(0.5 * j * (t - abs(1 - t)) for t, j in kinks)
    slope_atoms = sum(0.5 * j for _, j in kinks)
    return ConvexFunction(
        fn, deriv1=d1,
        limit_at_zero=gamma.tail_at_one + f0_atoms,
        slope_at_infinity=gamma.tail_at_zero + slope_atoms,
        kinks=kinks, name=name or (f"f[{gamma.name}]" if gamma.name else ""),
    )


def _delta_segments(exp: BinaryExperiment):
    """Yield (a, b, A, B) with Delta L01(pi) = A pi + B on [a, b]."""
    p, q = exp.p, exp.q
    s = p + q
    keep = s > 0
    p, q = p[keep], q[keep]
    kinks = q / (p + q)
    pts = sorted(set([0.0, 0.5, 1.0] + kinks.tolist()))
    for a, b in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (a + b)
        below = kinks > mid  # on this segment min(pi p_i, (1-pi) q_i) = pi p_i
        sp = math.fsum(p[below])
        sq = math.fsum(q[~below])
        if mid < 0.5:
            A, B = 1.0 - sp + sq, -sq
        else:
            A, B = -1.0 - sp + sq, 1.0 - sq
        yield a, b, A, B


def divergence_via_weight(exp: BinaryExperiment, gamma: WeightFunction) -> float:
    """int_0^1 Delta L01(pi) gamma(pi) d pi plus atom terms."""
    total = 0.0
    if gamma.smooth is not None:
        for a, b, A, B in _delta_segments(exp):
            va, vb = A * a + B, A * b + B
            if max(abs(va), abs(vb)) <= 1e-14:
                continue
            if a == 0.0 and gamma.tail_at_zero == INF:
                return INF
            if b == 1.0 and gamma.tail_at_one == INF:
                return INF
            pts = [x for x in gamma.breaks if a < x < b]
            total += quad(lambda x: (A * x + B) * gamma.smooth(x), a, b, points=pts or None)
    for loc, mass in gamma.atoms:
        total += mass * statistical_information_01(loc, exp)
    if not math.isfinite(total) or total > INF_CAP:
        return INF
    return total


def is_symmetric_weight(gamma: WeightFunction) -> bool:
    """True when gamma(pi) = gamma(1 - pi), atoms included."""
    for k in range(1, 100):
        x = k / 100
        a, b = gamma.density(x), gamma.density(1 - x)
        if abs(a - b) > 1e-9 * (1 + abs(a)):
            return False
    locs = dict(gamma.atoms)
    for loc, mass in gamma.atoms:
        match = [m for l2, m in locs.items() if abs(l2 - (1 - loc)) <= 1e-12]
        if not match or abs(match[0] - mass) > 1e-12 * (1 + mass):
            return False
    return True


def primitive_f_pi(pi: float) -> ConvexFunction:
    """f_pi(t) = min(pi, 1 - pi) - min(1 - pi, pi t); I_{f_pi} is the 0-1 information."""
    if not 0 < pi < 1:
        raise ValidationError("pi must lie in (0, 1)")
    lo = min(pi, 1 - pi)
    hinge = (1 - pi) / pi
    return ConvexFunction(
        lambda t: lo - min(1 - pi, pi * t),
        deriv1=lambda t: -pi if t < hinge else 0.0,
        deriv2=lambda t: 0.0,
        limit_at_zero=lo, slope_at_infinity=0.0,
        kinks=((hinge, pi),), name=f"primitive({pi:g})",
    )


# --- builtin catalog -------------------------------------------------------

_ln = math.log


def _xlogx(x):
    return 0.0 if x == 0 else x * _ln(x)


def _f_variational():
    return ConvexFunction(lambda t: abs(t - 1), deriv1=lambda t: math.copysign(1.0, t - 1),
                          deriv2=lambda t: 0.0, limit_at_zero=1.0, slope_at_infinity=1.0,
                          kinks=((1.0, 2.0),), name="variational")


def _f_triangular():
    return ConvexFunction(lambda t: (t - 1) ** 2 / (t + 1), deriv1=lambda t: 1 - 4 / (t + 1) ** 2,
                          deriv2=lambda t: 8 / (t + 1) ** 3, limit_at_zero=1.0,
                          slope_at_infinity=1.0, name="triangular")


def _f_jensen_shannon():
    return ConvexFunction(
        lambda t: 0.5 * _xlogx(t) - 0.5 * (t + 1) * _ln(t + 1) + _ln(2),
        deriv1=lambda t: 0.5 * _ln(t / (t + 1)),
        deriv2=lambda t: 0.5 / (t * (t + 1)),
        deriv1_inv=lambda s: (1 / (math.exp(-2 * s) - 1)) if s < 0 else math.nan,
        limit_at_zero=_ln(2), slope_at_infinity=0.0, name="jensen_shannon")


def _f_agm():
    return ConvexFunction(
        lambda t: 0.5 * (t + 1) * _ln((t + 1) / (2 * math.sqrt(t))),
        deriv1=lambda t: 0.5 * _ln((t + 1) / (2 * math.sqrt(t))) + 0.5 - (t + 1) / (4 * t),
        deriv2=lambda t: (t * t + 1) / (4 * t * t * (t + 1)),
        limit_at_zero=INF, slope_at_infinity=INF, name="agm")


def _f_jeffreys():
    return ConvexFunction(lambda t: (t - 1) * _ln(t), deriv1=lambda t: _ln(t) + 1 - 1 / t,
                          deriv2=lambda t: 1 / t + 1 / t ** 2, limit_at_zero=INF,
                          slope_at_infinity=INF, name="jeffreys")


def _f_hellinger():
    return ConvexFunction(lambda t: (math.sqrt(t) - 1) ** 2, deriv1=lambda t: 1 - 1 / math.sqrt(t),
                          deriv2=lambda t: 0.5 * t ** -1.5,
                          deriv1_inv=lambda s: 1 / (1 - s) ** 2 if s < 1 else math.nan,
                          limit_at_zero=1.0, slope_at_infinity=1.0, name="hellinger")


def _f_chi2():
    return ConvexFunction(lambda t: (t - 1) ** 2, deriv1=lambda t: 2 * (t - 1),
                          deriv2=lambda t: 2.0, deriv1_inv=lambda s: 1 + s / 2,
                          limit_at_zero=1.0, slope_at_infinity=INF, name="chi2")


def _f_sym_chi2():
    return ConvexFunction(lambda t: (t - 1) ** 2 * (t + 1) / t, deriv1=lambda t: 2 * t - 1 - 1 / t ** 2,
                          deriv2=lambda t: 2 + 2 / t ** 3, limit_at_zero=INF,
                          slope_at_infinity=INF, name="sym_chi2")


def _f_kl():
    return ConvexFunction(_xlogx, deriv1=lambda t: _ln(t) + 1, deriv2=lambda t: 1 / t,
                          deriv1_inv=lambda s: math.exp(s - 1), limit_at_zero=0.0,
                          slope_at_infinity=INF, name="kl")


def _l1m(x):
    return _ln(1 - x)


# closed-form antiderivatives (Gamma, Gamma_bar) of the smooth weights
_ANTIDERIVATIVES = {
    "triangular": (lambda x: 8 * x, lambda x: 4 * x * x),
    "jensen_shannon": (lambda x: 0.5 * (_ln(x) - _l1m(x)),
                       lambda x: 0.5 * (_xlogx(x) + _xlogx(1 - x))),
    "agm": (lambda x: 0.25 * (1 / (1 - x) - 1 / x), lambda x: -0.25 * (_l1m(x) + _ln(x))),
    "jeffreys": (lambda x: -1 / x + 2 * _ln(x) + 1 / (1 - x) - 2 * _l1m(x),
                 lambda x: -_ln(x) + 2 * _xlogx(x) - _l1m(x) + 2 * _xlogx(1 - x)),
    "hellinger": (lambda x: (2 * x - 1) / math.sqrt(x * (1 - x)),
                  lambda x: -2 * math.sqrt(x * (1 - x))),
    "chi2": (lambda x: -1 / x ** 2, lambda x: 1 / x),
    "sym_chi2": (lambda x: -1 / x ** 2 + 1 / (1 - x) ** 2, lambda x: 1 / x + 1 / (1 - x)),
    "kl": (lambda x: -1 / x + _ln(x) - _l1m(x), lambda x: -_ln(x) + _xlogx(x) + _xlogx(1 - x)),
}

_F_BUILDERS = {
    "variational": _f_variational,
    "triangular": _f_triangular,
    "jensen_shannon": _f_jensen_shannon,
    "agm": _f_agm,
    "jeffreys": _f_jeffreys,
    "hellinger": _f_hellinger,
    "chi2": _f_chi2,
    "sym_chi2": _f_sym_chi2,
    "kl": _f_kl,
}

BUILTIN_NAMES = ("variational", "triangular", "jensen_shannon", "agm", "uninformative",
                 "jeffreys", "hellinger", "chi2", "sym_chi2", "kl", "kl_eps")


def _gamma_uninformative():
    return WeightFunction(lambda x: 1 / min(x, 1 - x), name="uninformative", breaks=(0.5,))


def _gamma_kl_eps(eps: float):
    if not 0 <= eps < 0.5:
        raise ValidationError("kl_eps needs eps in [0, 1/2)")
    lo, hi = eps, 1 - eps

    def g(x):
        return 1 / (x * x * (1 - x)) if lo <= x <= hi else 0.0

    breaks = (lo, hi) if eps > 0 else ()
    return WeightFunction(g, name=f"kl_eps({eps:g})", breaks=breaks)


def builtin(name: str, params: Optional[dict] = None) -> DivergenceSpec:
    """Look up a named divergence; gamma is always derived from f when f exists."""
    params = dict(params or {})
    if name in _F_BUILDERS:
        f = _F_BUILDERS[name]()
        gamma = gamma_from_f(f, name=name)
        if name in _ANTIDERIVATIVES:
            G, Gb = _ANTIDERIVATIVES[name]
            gamma = replace(gamma, antiderivative=G, second_antiderivative=Gb)
        if name == "variational":
            gamma = replace(gamma, smooth=None)
        return DivergenceSpec(name, f, gamma, params)
    if name == "uninformative":
        return DivergenceSpec(name, None, _gamma_uninformative(), params)
    if name == "kl_eps":
        eps = float(params.setdefault("eps", 0.05))
        return DivergenceSpec(name, None, _gamma_kl_eps(eps), params)
    raise ValidationError(f"unknown divergence {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
