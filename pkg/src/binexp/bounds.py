"""Surrogate regret bounds and Pinsker-type lower bounds on f-divergences.

The generalized Pinsker bound fixes the 0-1 Bayes risk psi_i at priors pi_i.
Any concave risk curve through those points lies below
U_a(pi) = min(pi, 1 - pi, psi_i + a_i (pi - pi_i)) for its supergradients a,
so the divergence is at least min_a int (tent - U_a) gamma. The objective is
convex in a and is minimised over the box of admissible slopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import interpolate, optimize

from ._numerics import minimize_bounded, minimize_scan, quad
from .convex_core import INF, ConvexFunction
from .divergences import WeightFunction, builtin, f_divergence_direct
from .errors import DomainError, InfeasibleError, ValidationError
from .experiments import BinaryExperiment, bayes_risk_01
from .losses import ProperLoss

__all__ = [
    "BoundResult",
    "PinskerConstraint",
    "SPECIAL_NAMES",
    "surrogate_bound",
    "pinsker_general",
    "pinsker_special",
    "kl_pinsker_explicit",
    "fedotov_reference",
    "classic_comparators",
    "three_atom_minimum",
]


@dataclass(frozen=True)
class BoundResult:
    value: float
    witness: Optional[dict] = None
    method: str = ""

    def __post_init__(self):
        if not self.value >= 0:
            raise ValidationError(f"bound value must be non-negative, got {self.value}")


@dataclass(frozen=True)
class PinskerConstraint:
    """Points (pi_i, psi_i) of the 0-1 Bayes risk curve, pi strictly increasing."""

    points: tuple
    tol: float = field(default=1e-12, compare=False)

    def __post_init__(self):
        pts = tuple((float(p), float(s)) for p, s in self.points)
        if not pts:
            raise ValidationError("at least one constraint point is required")
        pis = [p for p, _ in pts]
        if any(not 0 < p < 1 for p in pis) or any(b <= a for a, b in zip(pis, pis[1:])):
            raise ValidationError("constraint priors must be strictly increasing in (0, 1)")
        for p, s in pts:
            if s < -self.tol or s > min(p, 1 - p) + self.tol:
                raise InfeasibleError(f"psi={s} at pi={p} lies outside [0, min(pi, 1 - pi)]")
        object.__setattr__(self, "points", pts)
        lo, hi = self.slope_box()
        if np.any(lo > hi + self.tol):
            k = int(np.argmax(lo - hi))
            raise InfeasibleError(f"no concave curve passes through the points (at pi={pts[k][0]})")

    @classmethod
    def from_experiment(cls, exp: BinaryExperiment, priors: Sequence[float]) -> "PinskerConstraint":
        pis = sorted(float(p) for p in priors)
        return cls(tuple((p, bayes_risk_01(p, exp)) for p in pis))

    @property
    def pis(self) -> np.ndarray:
        return np.array([p for p, _ in self.points])

    @property
    def psis(self) -> np.ndarray:
        return np.array([s for _, s in self.points])

    def slope_box(self) -> tuple[np.ndarray, np.ndarray]:
        """Admissible slopes a_i in [chord(i, i+1), chord(i-1, i)]."""
        x = np.concatenate([[0.0], self.pis, [1.0]])
        y = np.concatenate([[0.0], self.psis, [0.0]])
        chords = np.diff(y) / np.diff(x)
        return chords[1:], chords[:-1]


# --- surrogate regret bound -------------------------------------------------

def surrogate_bound(loss: ProperLoss, c0: float, alpha: float) -> float:
    """Smallest regret B_w compatible with cost-weighted regret alpha at c0."""
    if not 0 < c0 < 1:
        raise ValidationError("c0 must lie in (0, 1)")
    if not 0 < alpha < min(c0, 1 - c0):
        raise ValidationError("alpha must lie in (0, min(c0, 1 - c0))")
    Wc, base = loss.W(c0), loss.Wbar(c0)
    left = loss.Wbar(c0 - alpha) + alpha * Wc
    right = loss.Wbar(c0 + alpha) - alpha * Wc
    return float(min(left, right) - base)


# --- generalized Pinsker ------------------------------------------------------

class _PinskerObjective:
    """F(a) = int (tent - U_a) dgamma evaluated segment by segment."""

    def __init__(self, gamma: WeightFunction, cons: PinskerConstraint):
        self.gamma = gamma
        self.pis, self.psis = cons.pis, cons.psis
        self._G: dict = {}

    def _GG(self, x):
        v = self._G.get(x)
        if v is None:
            v = (self.gamma.Gamma(x), self.gamma.Gamma_bar(x))
            self._G[x] = v
        return v

    def lines(self, a):
        slopes = np.concatenate([[1.0], a, [-1.0]])
        icpts = np.concatenate([[0.0], self.psis - a * self.pis, [1.0]])
        return slopes, icpts

    def segments(self, a):
        """Yield (lo, hi, line index) of the lower envelope on [0, 1]."""
        slopes, icpts = self.lines(a)
        # slopes are non-increasing, so the active line index grows with pi
        hull = []
        for k in range(slopes.size):
            while hull:
                j = hull[-1]
                if slopes[j] == slopes[k]:
                    if icpts[k] <= icpts[j]:
                        hull.pop()
                        continue
                    break
                if len(hull) >= 2:
                    i = hull[-2]
                    x_ik = (icpts[k] - icpts[i]) / (slopes[i] - slopes[k])
                    x_ij = (icpts[j] - icpts[i]) / (slopes[i] - slopes[j])
                    if x_ik <= x_ij:
                        hull.pop()
                        continue
                break
            if not hull or slopes[hull[-1]] != slopes[k]:
                hull.append(k)
        cuts = [0.0]
        for i, j in zip(hull, hull[1:]):
            cuts.append((icpts[j] - icpts[i]) / (slopes[i] - slopes[j]))
        cuts.append(1.0)
        out = []
        for idx, lo, hi in zip(hull, cuts, cuts[1:]):
            lo, hi = max(lo, 0.0), min(hi, 1.0)
            if hi <= lo:
                continue
            if lo < 0.5 < hi:
                out.append((lo, 0.5, idx))
                out.append((0.5, hi, idx))
            else:
                out.append((lo, hi, idx))
        return out, slopes, icpts

    def value(self, a) -> float:
        segs, slopes, icpts = self.segments(np.asarray(a, dtype=float))
        g = self.gamma
        total = 0.0
        for lo, hi, k in segs:
            left = 0.5 * (lo + hi) < 0.5
            # gap = tent - line = A pi + B on the segment
            A = (1.0 if left else -1.0) - slopes[k]
            B = (0.0 if left else 1.0) - icpts[k]
            if abs(A * lo + B) <= 1e-15 and abs(A * hi + B) <= 1e-15:
                continue
            if g.smooth is not None:
                total += self._segment(A, B, lo, hi)
                if total == INF:
                    return INF
        for loc, mass in g.atoms:
            tent = min(loc, 1 - loc)
            total += mass * (tent - float(np.min(slopes * loc + icpts)))
        return float(total)

    def _segment(self, A, B, lo, hi):
        g = self.gamma
        if lo == 0.0 or hi == 1.0:
            if lo == 0.0 and g.tail_at_zero == INF:
                return INF
            if hi == 1.0 and g.tail_at_one == INF:
                return INF
            return quad(lambda x: (A * x + B) * g.smooth(x), lo, hi, points=g.breaks)
        Ga, Gba = self._GG(lo)
        Gb, Gbb = self._GG(hi)
        return ((A * hi + B) * Gb - A * Gbb) - ((A * lo + B) * Ga - A * Gba)

    def gradient(self, a) -> np.ndarray:
        """dF/da_i = -int_{S_i} (pi - pi_i) dgamma over the region where line i is active."""
        a = np.asarray(a, dtype=float)
        segs, slopes, icpts = self.segments(a)
        grad = np.zeros_like(a)
        g = self.gamma
        for lo, hi, k in segs:
            if k == 0 or k == a.size + 1 or g.smooth is None:
                continue
            left = 0.5 * (lo + hi) < 0.5
            A = (1.0 if left else -1.0) - slopes[k]
            B = (0.0 if left else 1.0) - icpts[k]
            if abs(A * lo + B) <= 1e-15 and abs(A * hi + B) <= 1e-15:
                continue
            p0 = self.pis[k - 1]
            if lo == 0.0 or hi == 1.0:
                val = quad(lambda x: (x - p0) * g.smooth(x), lo, hi, points=g.breaks)
            else:
                Ga, Gba = self._GG(lo)
                Gb, Gbb = self._GG(hi)
                val = ((hi - p0) * Gb - Gbb) - ((lo - p0) * Ga - Gba)
            grad[k - 1] -= val
        for loc, mass in g.atoms:
            k = int(np.argmin(slopes * loc + icpts))
            if 0 < k <= a.size:
                grad[k - 1] -= mass * (loc - self.pis[k - 1])
        return grad


def pinsker_general(gamma: WeightFunction, constraints: PinskerConstraint) -> BoundResult:
    """Tight lower bound on I_f given 0-1 Bayes risk values at several priors."""
    obj = _PinskerObjective(gamma, constraints)
    lo, hi = constraints.slope_box()
    width = hi - lo
    # stay a hair inside the box: on its faces a line can pass through a
    # corner of the tent, where weights with endpoint poles integrate to inf
    shrink = 1e-10 * np.maximum(width, 1e-300)
    blo, bhi = lo + np.where(width > 0, shrink, 0.0), hi - np.where(width > 0, shrink, 0.0)
    fixed = width <= 0
    a0 = 0.5 * (blo + bhi)
    if not math.isfinite(obj.value(a0)):
        return BoundResult(INF, {"a": a0.tolist()}, "pinsker_general:divergent")

    n = a0.size
    if n == 1:
        x, fx = minimize_bounded(lambda t: obj.value(np.array([t])), blo[0], bhi[0], xatol=1e-13)
        a_best, f_best = np.array([x]), fx
    else:
        bounds = [(l, h) if not fx_ else (l, l) for l, h, fx_ in zip(blo, bhi, fixed)]
        res = optimize.minimize(obj.value, a0, jac=obj.gradient, method="L-BFGS-B", bounds=bounds,
                                options={"ftol": 1e-15, "gtol": 1e-13, "maxiter": 500})
        a_best, f_best = np.clip(res.x, blo, bhi), float(res.fun)
        a_best, f_best = _coordinate_polish(obj, a_best, f_best, blo, bhi, fixed)
    return BoundResult(max(float(f_best), 0.0), {"a": [float(v) for v in a_best]}, "pinsker_general")


def _coordinate_polish(obj, a, fa, lo, hi, fixed, sweeps=4, tol=1e-8):
    """Exact line searches along each coordinate until the step is below tol."""
    a = a.copy()
    for _ in range(sweeps):
        moved = 0.0
        for i in range(a.size):
            if fixed[i]:
                continue
            def along(t, i=i):
                b = a.copy()
                b[i] = t
                return obj.value(b)
            t, ft = minimize_bounded(along, lo[i], hi[i], xatol=1e-13)
            if ft < fa:
                moved = max(moved, abs(t - a[i]))
                a[i], fa = t, ft
        if moved < tol:
            break
    return a, fa


SPECIAL_NAMES = ("hellinger", "jeffreys", "sym_chi2", "jensen_shannon", "agm", "chi2", "kl",
                 "triangular", "variational")


def _check_V(V):
    if not 0 <= V < 2:
        raise ValidationError("V must lie in [0, 2)")


def pinsker_special(name: str, V: float) -> float:
    """Closed-form best lower bound of a builtin divergence in terms of V."""
    _check_V(V)
    if name == "hellinger":
        return 2 - math.sqrt(4 - V * V)
    if name == "jeffreys":
        return V * math.log((2 + V) / (2 - V))
    if name == "sym_chi2":
        return 8 * V * V / (4 - V * V)
    if name == "jensen_shannon":
        return (0.5 - V / 4) * math.log(2 - V) + (0.5 + V / 4) * math.log(2 + V) - math.log(2)
    if name == "agm":
        return math.log(4 / math.sqrt(4 - V * V)) - math.log(2)
    if name == "chi2":
        return V * V if V < 1 else V / (2 - V)
    if name == "triangular":
        return V * V / 2
    if name == "variational":
        return V
    if name == "kl":
        return kl_pinsker_explicit(V).value
    raise ValidationError(f"no closed-form bound for {name!r}; choose from {', '.join(SPECIAL_NAMES)}")


def _xlogy(x, y):
    if x == 0:
        return 0.0
    if y == 0 or y == INF:
        return INF if (x > 0) == (y == INF) else -INF
    return x * math.log(y)


def _kl_delta(beta, V):
    # the numerators vanish at the ends of the beta range; clamp rounding noise
    u = max(V + 2 - beta, 0.0)
    v = max(beta + 2 - V, 0.0)
    den = beta - 2 + V
    a = _xlogy(u / 4, (beta - 2 - V) / den if den < 0 else INF)
    b = _xlogy(v / 4, v / (beta + 2 + V))
    return a + b


def kl_pinsker_explicit(V: float) -> BoundResult:
    """Best lower bound on KL(P, Q) given V(P, Q) = V, by a 1-D minimisation over beta."""
    _check_V(V)
    if V == 0:
        return BoundResult(0.0, {"beta": 0.0}, "kl_pinsker_explicit")
    beta, val = minimize_scan(lambda b: _kl_delta(b, V), V - 2, 2 - V, n=1000, xatol=1e-14)
    diag = {"beta": float(beta)}
    if 2 - V < 1e-6:
        diag["note"] = "V is close to 2; the bound grows without limit"
    return BoundResult(max(float(val), 0.0), diag, "kl_pinsker_explicit")


def _fedotov_table(tmin=1e-4, tmax=1e5, n=6000):
    t = np.geomspace(tmin, tmax, n)
    small = t < 1e-2
    langevin = np.where(small, t / 3 - t ** 3 / 45 + 2 * t ** 5 / 945,
                        1 / np.tanh(np.maximum(t, 1e-2)) - 1 / t)
    Vt = t * (1 - langevin ** 2)
    # log sinh t, stable for large t
    lsinh = np.where(t > 20, t - math.log(2) + np.log1p(-np.exp(-2 * t)), np.log(np.sinh(np.minimum(t, 20))))
    coth = 1 / np.tanh(t)
    Lt = np.log(t) - lsinh + t * coth - np.exp(2 * np.log(t) - 2 * lsinh)
    keep = np.concatenate([[True], np.diff(Vt) > 0])
    return Vt[keep], Lt[keep]


_FEDOTOV = None


def fedotov_reference(V: float) -> float:
    """KL lower bound from the parametric (V(t), L(t)) curve by monotone interpolation."""
    global _FEDOTOV
    _check_V(V)
    if V == 0:
        return 0.0
    if _FEDOTOV is None:
        Vt, Lt = _fedotov_table()
        _FEDOTOV = (Vt[0], Vt[-1], interpolate.PchipInterpolator(Vt, Lt, extrapolate=False))
    vmin, vmax, interp = _FEDOTOV
    if not vmin <= V <= vmax:
        raise DomainError(f"V={V} outside the tabulated range [{vmin:.3g}, {vmax:.6g}]")
    return float(interp(V))


def classic_comparators(V: float) -> dict:
    _check_V(V)
    v2 = V * V / 2
    vajda = math.log((2 + V) / (2 - V)) - 2 * V / (2 + V)
    return {
        "pinsker": v2,
        "kullback": v2 + V ** 4 / 36,
        "topsoe": v2 + V ** 4 / 36 + V ** 6 / 270,
        "vajda": vajda,
        "toussaint": max(vajda, v2 + V ** 4 / 36 + V ** 8 / 288),
    }


def three_atom_minimum(f: ConvexFunction, V: float, grid: int = 41) -> tuple[float, BinaryExperiment]:
    """Smallest I_f over three-outcome experiments with variational divergence V.

    P = (x, y - V/2, r), Q = (x - V/2, y, r) with r = 1 - x - y + V/2; the
    family contains the two-point extremal experiment at r = 0.
    """
    _check_V(V)
    h = V / 2

    def build(x, y):
        r = 1 - x - y + h
        return BinaryExperiment.from_masses([x, y - h, r], [x - h, y, r])

    def feasible(x, y):
        return x >= h and y >= h and x + y <= 1 + h

    def obj(z):
        x, y = z
        if not feasible(x, y):
            return INF
        try:
            return f_divergence_direct(build(x, y), f)
        except ValidationError:
            return INF

    best = (INF, None)
    for x in np.linspace(h, 1, grid):
        for y in np.linspace(h, 1, grid):
            v = obj((x, y))
            if v < best[0]:
                best = (v, (x, y))
    res = optimize.minimize(obj, best[1], method="Nelder-Mead",
                            options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    if res.fun < best[0]:
        best = (float(res.fun), tuple(res.x))
    x, y = best[1]
    return float(best[0]), build(x, y)
