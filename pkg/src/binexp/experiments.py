"""Finite binary experiments, tasks with a prior, tests and 0-1 primitives."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ValidationError

__all__ = [
    "DiscreteDistribution",
    "BinaryExperiment",
    "Task",
    "BinaryTest",
    "classification_rates",
    "lambda_map",
    "lambda_inv",
    "bayes_risk_01",
    "statistical_information_01",
    "roc_vertices",
    "neyman_pearson_beta",
    "load_experiment",
    "random_experiment",
]

MASS_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DiscreteDistribution:
    """Probability masses over outcomes 0..n-1."""

    masses: np.ndarray

    def __post_init__(self):
        m = _frozen(self.masses)
        if m.ndim != 1 or m.size == 0:
            raise ValidationError("masses must be a non-empty 1-D array")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise ValidationError("masses must be finite and non-negative")
        if abs(m.sum() - 1.0) > MASS_TOL * max(1, m.size):
            raise ValidationError(f"masses sum to {m.sum()!r}, not 1")
        object.__setattr__(self, "masses", m)

    def __len__(self):
        return self.masses.size


@dataclass(frozen=True)
class BinaryExperiment:
    """A pair (P, Q) of distributions on a shared finite outcome space."""

    P: DiscreteDistribution
    Q: DiscreteDistribution

    def __post_init__(self):
        if len(self.P) != len(self.Q):
            raise ValidationError("P and Q must have the same support size")

    @classmethod
    def from_masses(cls, p: Sequence[float], q: Sequence[float]) -> "BinaryExperiment":
        return cls(DiscreteDistribution(p), DiscreteDistribution(q))

    @property
    def p(self) -> np.ndarray:
        return self.P.masses

    @property
    def q(self) -> np.ndarray:
        return self.Q.masses

    @property
    def n(self) -> int:
        return len(self.P)

    def swapped(self) -> "BinaryExperiment":
        return BinaryExperiment(self.Q, self.P)

    def kinks(self) -> np.ndarray:
        """Priors q_i / (p_i + q_i) at which the 0-1 Bayes risk bends."""
        s = self.p + self.q
        keep = s > 0
        return np.unique(self.q[keep] / s[keep])


@dataclass(frozen=True)
class Task:
    """A binary experiment together with a prior pi on the positive class."""

    prior: float
    experiment: BinaryExperiment
    mixture: np.ndarray = field(init=False, repr=False)
    posterior: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pi = float(self.prior)
        if not 0.0 < pi < 1.0:
            raise ValidationError("prior must lie in (0, 1)")
        e = self.experiment
        m = pi * e.p + (1 - pi) * e.q
        keep = m > 0
        eta = np.zeros_like(m)
        eta[keep] = pi * e.p[keep] / m[keep]
        object.__setattr__(self, "prior", pi)
        # outcomes with no mass carry no information and are dropped
        object.__setattr__(self, "mixture", _frozen(m[keep]))
        object.__setattr__(self, "posterior", _frozen(np.clip(eta[keep], 0.0, 1.0)))


@dataclass(frozen=True)
class BinaryTest:
    """Randomised test: probability of declaring 'P' on each outcome."""

    accept_prob: np.ndarray

    def __post_init__(self):
        a = _frozen(self.accept_prob)
        if a.ndim != 1 or np.any(a < 0) or np.any(a > 1):
            raise ValidationError("accept probabilities must lie in [0, 1]")
        object.__setattr__(self, "accept_prob", a)


def classification_rates(exp: BinaryExperiment, test: BinaryTest):
    """(TP, FP, TN, FN) of a test, treating P as the positive class."""
    a = test.accept_prob
    if a.size != exp.n:
        raise ValidationError("test and experiment sizes differ")
    tp = float(exp.p @ a)
    fp = float(exp.q @ a)
    return tp, fp, 1.0 - fp, 1.0 - tp


def lambda_map(pi: float, c: float) -> float:
    """Threshold on the likelihood ratio equivalent to cost c under prior pi."""
    if c == 1.0:
        return math.inf
    return (1 - pi) / pi * c / (1 - c)


def lambda_inv(pi: float, t: float) -> float:
    if t == math.inf:
        return 1.0
    return pi * t / (pi * t + 1 - pi)


def bayes_risk_01(pi: float, exp: BinaryExperiment) -> float:
    """Minimal cost-weighted 0-1 risk sum_i min(pi p_i, (1-pi) q_i)."""
    return float(np.minimum(pi * exp.p, (1 - pi) * exp.q).sum())


def statistical_information_01(pi: float, exp: BinaryExperiment) -> float:
    """Reduction of the 0-1 Bayes risk from observing the outcome."""
    return max(min(pi, 1 - pi) - bayes_risk_01(pi, exp), 0.0)


def roc_vertices(exp: BinaryExperiment) -> tuple[np.ndarray, np.ndarray]:
    """Vertices (FP, TP) of the optimal ROC curve.

    Outcomes are ordered by decreasing likelihood ratio p/q and tied ratios
    are merged, so consecutive vertices span the concave upper envelope.
    """
    p, q = exp.p, exp.q
    keep = (p + q) > 0
    p, q = p[keep], q[keep]
    # sort by p/q descending without dividing: compare angles
    order = np.argsort(-np.arctan2(p, q), kind="stable")
    p, q = p[order], q[order]
    fp, tp = [0.0], [0.0]
    i = 0
    while i < p.size:
        dp, dq = p[i], q[i]
        j = i + 1
        while j < p.size and abs(p[j] * q[i] - p[i] * q[j]) <= 1e-15 * (p[i] + q[i]) * (p[j] + q[j]):
            dp += p[j]
            dq += q[j]
            j += 1
        fp.append(fp[-1] + dq)
        tp.append(tp[-1] + dp)
        i = j
    fp_a, tp_a = np.array(fp), np.array(tp)
    fp_a[-1] = tp_a[-1] = 1.0
    return fp_a, tp_a


def neyman_pearson_beta(exp: BinaryExperiment, alpha) -> float | np.ndarray:
    """Largest power attainable with false-positive rate at most alpha."""
    fp, tp = roc_vertices(exp)
    a = np.asarray(alpha, dtype=float)
    if np.any(a < 0) or np.any(a > 1):
        raise ValidationError("alpha must lie in [0, 1]")
    # leading vertices with FP = 0 collapse to their highest TP
    start = int(np.flatnonzero(fp == 0.0)[-1])
    out = np.interp(a, fp[start:], tp[start:])
    return float(out) if out.ndim == 0 else out


def load_experiment(path: str | Path) -> BinaryExperiment:
    """Read {"p": [...], "q": [...]} JSON or a CSV with header ``p,q``."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None
        if not isinstance(obj, dict) or "p" not in obj or "q" not in obj:
            raise ValidationError(f"{path}: expected an object with keys 'p' and 'q'")
        p, q = obj["p"], obj["q"]
        for key, arr in (("p", p), ("q", q)):
            if not isinstance(arr, list):
                raise ValidationError(f"{path}: '{key}' must be a list")
            for k, v in enumerate(arr):
                if not isinstance(v, (int, float)) or isinstance(v, bool):
                    raise ValidationError(f"{path}: '{key}'[{k}] is not a number")
    else:
        rows = list(csv.reader(text.splitlines()))
        if not rows or [c.strip().lower() for c in rows[0]] != ["p", "q"]:
            raise ValidationError(f"{path}: row 1 must be the header 'p,q'")
        p, q = [], []
        for r, row in enumerate(rows[1:], start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ValidationError(f"{path}: row {r} has {len(row)} columns, expected 2")
            for col, cell in enumerate(row, start=1):
                try:
                    val = float(cell)
                except ValueError:
                    raise ValidationError(f"{path}: row {r} column {col}: {cell!r} is not a number") from None
                (p if col == 1 else q).append(val)
    try:
        return BinaryExperiment.from_masses(p, q)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def random_experiment(rng: np.random.Generator, n: int,
                      strictly_positive: bool = True) -> BinaryExperiment:
    """Draw (P, Q) from a flat Dirichlet; optional zeros for testing edge cases."""
    p = rng.dirichlet(np.ones(n))
    q = rng.dirichlet(np.ones(n))
    if strictly_positive:
        floor = 1e-3
        p = (p + floor) / (1 + n * floor)
        q = (q + floor) / (1 + n * floor)
    return BinaryExperiment.from_masses(p / p.sum(), q / q.sum())
