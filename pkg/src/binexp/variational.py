"""Variational divergences over function classes, MMD, and the I_{f,g} family.

A function class is a finite set of real vectors indexed by the support of an
experiment. Generalized variational divergence is

    V_{R,pi}(P, Q) = 2 max_r |pi E_P r - (1 - pi) E_Q r|,

and the f-divergence variational forms replace the whole space of functions
by such a class, or by the pointwise-complete class where the supremum
decomposes into one scalar problem per outcome.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from ._numerics import maximize_concave
from .convex_core import INF, ConvexFunction, lf_conjugate_eval, mul0
from .errors import DivergenceError, PreconditionError, ValidationError
from .experiments import BinaryExperiment

__all__ = [
    "FunctionClass",
    "KernelSample",
    "sign_class",
    "linear_kernel",
    "rbf_kernel",
    "generalized_variational",
    "linear_loss_risk",
    "restricted_01_risk",
    "mmd_biased",
    "aco_hull_invariance",
    "variational_f_divergence",
    "generalized_I_fg",
]

PSD_TOL = 1e-8
WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class FunctionClass:
    """Rows of ``functions`` are the class members r_j over outcomes 0..n-1."""

    functions: np.ndarray
    bound: float = 1.0
    symmetric: bool = False

    def __post_init__(self):
        R = np.array(self.functions, dtype=float)
        if R.ndim == 1:
            R = R[None, :]
        if R.ndim != 2 or R.shape[0] == 0 or R.shape[1] == 0:
            raise ValidationError("a function class needs at least one function")
        if not np.all(np.isfinite(R)):
            raise ValidationError("class members must be finite")
        if np.any(np.abs(R) > self.bound + 1e-12):
            raise ValidationError(f"class members must satisfy |r| <= {self.bound}")
        R.setflags(write=False)
        object.__setattr__(self, "functions", R)
        if self.symmetric and not _closed_under(R, -R):
            raise ValidationError("class flagged symmetric but not closed under negation")

    @classmethod
    def with_negations(cls, functions, bound: float = 1.0) -> "FunctionClass":
        """Close a set of functions under r -> -r and flag it symmetric."""
        R = np.atleast_2d(np.array(functions, dtype=float))
        rows = []
        for r in np.vstack([R, -R]):
            if not any(np.array_equal(r, s) for s in rows):
                rows.append(r)
        return cls(np.array(rows), bound=bound, symmetric=True)

    @property
    def size(self) -> int:
        return self.functions.shape[0]

    @property
    def n(self) -> int:
        return self.functions.shape[1]

    @property
    def sign_closed(self) -> bool:
        return _closed_under(self.functions, np.sign(self.functions))


def _closed_under(R, images) -> bool:
    return all(any(np.array_equal(img, r) for r in R) for img in images)


def sign_class(n: int) -> FunctionClass:
    """All 2^n sign vectors; symmetric and sign closed."""
    if not 1 <= n <= 20:
        raise ValidationError("sign class is enumerated only for 1 <= n <= 20")
    return FunctionClass(np.array(list(itertools.product((-1.0, 1.0), repeat=n))),
                         symmetric=True)


def _check(exp: BinaryExperiment, pi: float, cls: FunctionClass):
    if not 0 < pi < 1:
        raise ValidationError("pi must lie in (0, 1)")
    if cls.n != exp.n:
        raise ValidationError(f"class is defined on {cls.n} outcomes, experiment on {exp.n}")


def _signed_gaps(exp, pi, cls) -> np.ndarray:
    """pi E_P r - (1 - pi) E_Q r for every r in the class."""
    return cls.functions @ (pi * exp.p - (1 - pi) * exp.q)


# --- generalized variational divergence -------------------------------------

def generalized_variational(exp: BinaryExperiment, pi: float, cls: FunctionClass,
                            return_witness: bool = False):
    _check(exp, pi, cls)
    gaps = _signed_gaps(exp, pi, cls)
    # for a symmetric class the maximum of the signed gap is already |.|
    vals = gaps if cls.symmetric else np.abs(gaps)
    j = int(np.argmax(vals))
    v = float(2 * vals[j])
    return (v, j) if return_witness else v


def linear_loss_risk(exp: BinaryExperiment, pi: float, cls: FunctionClass,
                     return_witness: bool = False):
    """min over r of the risk of the linear loss 1 - y r."""
    if not cls.symmetric:
        raise PreconditionError("linear loss equivalence needs a class symmetric about zero")
    _check(exp, pi, cls)
    risks = (pi * (1 - cls.functions @ exp.p)
             + (1 - pi) * (1 + cls.functions @ exp.q))
    j = int(np.argmin(risks))
    v = float(risks[j])
    return (v, j) if return_witness else v


def restricted_01_risk(exp: BinaryExperiment, pi: float, cls: FunctionClass) -> float:
    """1/2 - V_{R,pi}/4: the best 0-1 risk of the classifiers sgn r."""
    if not cls.symmetric or not cls.sign_closed:
        raise PreconditionError("restricted 0-1 risk needs a symmetric, sign-closed class")
    return 0.5 - generalized_variational(exp, pi, cls) / 4


def aco_hull_invariance(exp: BinaryExperiment, pi: float, cls: FunctionClass,
                        coefficients: Optional[np.ndarray] = None,
                        n_samples: int = 500,
                        rng: Optional[np.random.Generator] = None) -> tuple[float, float]:
    """(V over the class, V over samples of its absolute convex hull).

    Hull members are sum_j a_j r_j with sum_j |a_j| <= 1. ``coefficients``
    supplies them as rows; otherwise random ones are drawn. The vertices
    (+-r_j) are always included.
    """
    _check(exp, pi, cls)
    v_class = generalized_variational(exp, pi, cls)
    k = cls.size
    if coefficients is None:
        rng = rng if rng is not None else np.random.default_rng(0)
        a = rng.standard_normal((n_samples, k))
        a *= rng.uniform(0, 1, (n_samples, 1)) / np.abs(a).sum(axis=1, keepdims=True)
    else:
        a = np.atleast_2d(np.array(coefficients, dtype=float))
        if a.shape[1] != k:
            raise ValidationError(f"coefficient rows must have length {k}")
        if np.any(np.abs(a).sum(axis=1) > 1 + 1e-12):
            raise ValidationError("hull coefficients must satisfy sum |a| <= 1")
    a = np.vstack([a, np.eye(k), -np.eye(k)])
    gaps = (a @ cls.functions) @ (pi * exp.p - (1 - pi) * exp.q)
    return v_class, float(2 * np.abs(gaps).max())


# --- MMD ----------------------------------------------------------------------

@dataclass(frozen=True)
class KernelSample:
    labels: np.ndarray
    K: np.ndarray
    alpha: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        y = np.array(self.labels, dtype=float)
        K = np.array(self.K, dtype=float)
        m = y.size
        if y.ndim != 1 or m == 0 or not np.all(np.isin(y, (-1.0, 1.0))):
            raise ValidationError("labels must be a non-empty vector of -1/+1")
        if K.shape != (m, m):
            raise ValidationError(f"kernel matrix must be {m}x{m}")
        if not np.allclose(K, K.T, rtol=0, atol=1e-12 * max(1.0, np.abs(K).max())):
            raise ValidationError("kernel matrix must be symmetric")
        lam = np.linalg.eigvalsh(0.5 * (K + K.T))
        if lam.min() < -PSD_TOL * max(1.0, abs(lam).max()):
            raise ValidationError(f"kernel matrix is not PSD (eigenvalue {lam.min():.3g})")
        a = np.full(m, 1.0 / m) if self.alpha is None else np.array(self.alpha, dtype=float)
        if a.shape != (m,) or np.any(a < 0):
            raise ValidationError("weights must be a non-negative vector over the sample")
        m_pos = float((y > 0).sum())
        for cls_mask, target in ((y > 0, m_pos / m), (y < 0, 1 - m_pos / m)):
            if abs(a[cls_mask].sum() - target) > WEIGHT_TOL:
                raise ValidationError("class-wise weight sums must equal the class fractions")
        for arr in (y, K, a):
            arr.setflags(write=False)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "alpha", a)

    @property
    def m(self) -> int:
        return self.labels.size


def linear_kernel(X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return X @ X.T


def rbf_kernel(X, sigma: float) -> np.ndarray:
    if not sigma > 0:
        raise ValidationError("rbf bandwidth must be positive")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.exp(-cdist(X, X, "sqeuclidean") / (2 * sigma ** 2))


def mmd_biased(sample: KernelSample, alpha: Optional[Sequence[float]] = None) -> float:
    """J(alpha) = sum_ij alpha_i alpha_j y_i y_j K_ij; uniform weights by default."""
    if alpha is not None:
        sample = KernelSample(sample.labels, sample.K, alpha)
    v = sample.alpha * sample.labels
    J = float(v @ sample.K @ v)
    if J < -1e-9:
        raise ValidationError(f"negative MMD estimate {J:.3g}; kernel not PSD")
    return max(J, 0.0)


# --- variational f-divergences ---------------------------------------------

def _conj(f: ConvexFunction, s: float) -> float:
    if s > f.slope_at_infinity:
        return INF
    return lf_conjugate_eval(f, s)


def _finite_class_max(terms_per_row) -> float:
    best = -INF
    for val in terms_per_row:
        if val > best:
            best = val
    if best == -INF:
        raise DivergenceError("every member of the class is infeasible")
    return float(best)


def _row_value(row, p, q, g_term, f_term):
    total = []
    for r, pi_, qi in zip(row, p, q):
        a, b = g_term(r), f_term(r)
        if (a == INF and pi_ > 0) or (b == INF and qi > 0):
            return -INF
        total.append(-mul0(pi_, a) - mul0(qi, b))
    return math.fsum(total)


def variational_f_divergence(exp: BinaryExperiment, f: ConvexFunction,
                             cls: Optional[FunctionClass] = None) -> float:
    """sup over rho of E_P rho - E_Q f*(rho); ``cls=None`` is the pointwise-complete class."""
    p, q = exp.p, exp.q
    if cls is not None:
        if cls.n != exp.n:
            raise ValidationError(f"class is defined on {cls.n} outcomes, experiment on {exp.n}")
        return _finite_class_max(
            _row_value(row, p, q, lambda r: -r, lambda r: _conj(f, r)) for row in cls.functions)
    slope = f.slope_at_infinity
    total = []
    for pi_, qi in zip(p, q):
        if qi == 0:
            total.append(mul0(pi_, slope))
        elif pi_ == 0:
            # sup_rho -q f*(rho) = q f**(0) = q f(0)
            total.append(mul0(qi, f.limit_at_zero))
        else:
            obj = lambda r, a=pi_, b=qi: a * r - b * _conj(f, r)
            _, val = maximize_concave(obj, hi=slope)
            total.append(val)
    return math.fsum(total)


def _box_edge(f, g):
    """inf_x f(x) + x g'(inf), the value of f box g at 0."""
    slope = g.slope_at_infinity
    if slope == INF:
        return f.limit_at_zero
    return -_conj(f, -slope)


def generalized_I_fg(exp: BinaryExperiment, f: ConvexFunction, g: ConvexFunction,
                     cls: Optional[FunctionClass] = None) -> float:
    """sup over rho of -E_P g*(-rho) - E_Q f*(rho).

    With the pointwise-complete class (``cls=None``) this is
    sum_i q_i (f box g)(p_i / q_i) by Fenchel duality outcome by outcome.
    """
    p, q = exp.p, exp.q
    g_term = lambda r: _conj(g, -r)
    f_term = lambda r: _conj(f, r)
    if cls is not None:
        if cls.n != exp.n:
            raise ValidationError(f"class is defined on {cls.n} outcomes, experiment on {exp.n}")
        return _finite_class_max(_row_value(row, p, q, g_term, f_term) for row in cls.functions)
    lo, hi = -g.slope_at_infinity, f.slope_at_infinity
    total = []
    for pi_, qi in zip(p, q):
        if pi_ == 0 and qi == 0:
            continue
        if pi_ == 0:
            total.append(mul0(qi, _box_edge(f, g)))
            continue
        if qi == 0:
            total.append(mul0(pi_, _box_edge(g, f)))
            continue
        obj = lambda r, a=pi_, b=qi: -a * g_term(r) - b * f_term(r)
        _, val = maximize_concave(obj, lo=lo, hi=hi)
        total.append(val)
    return math.fsum(total)
