"""Command-line front end.

Every subcommand writes CSV or JSON to stdout. Exit codes: 0 success,
2 invalid input, 3 result is +inf (printed as ``inf``), 1 anything else.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import bounds as B
from . import convex_core as C
from . import curves as R
from . import divergences as D
from . import experiments as E
from . import information as I
from . import losses as L
from . import variational as V
from .errors import BinexpError, DivergenceError, ValidationError

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID, EXIT_INF = 0, 1, 2, 3

# One example invocation per library operation; "{exp}" and "{sample}" are
# placeholders for an experiment file and an MMD sample file.
ROUTES = {
    # convex_core
    "perspective_eval": ["divergence", "--experiment", "{exp}", "--f", "kl", "--method", "perspective"],
    "csiszar_dual": ["divergence", "--experiment", "{exp}", "--f", "kl", "--reverse"],
    "lf_conjugate_eval": ["translate", "--from", "f", "--to", "conjugate", "--div", "kl", "--grid", "5"],
    "jensen_gap": ["divergence", "--experiment", "{exp}", "--f", "kl", "--method", "jensen"],
    "lf_conjugate": ["translate", "--from", "f", "--to", "conjugate", "--div", "hellinger", "--grid", "5"],
    "inf_convolve": ["translate", "--from", "f", "--to", "box", "--div", "chi2", "--g", "chi2", "--grid", "5"],
    "infimal_convolution": ["translate", "--from", "f", "--to", "box", "--div", "kl", "--g", "kl", "--grid", "5"],
    "mul0": ["divergence", "--experiment", "{exp}", "--f", "kl", "--method", "perspective"],
    # experiments
    "load_experiment": ["info", "--experiment", "{exp}", "--pi", "0.5"],
    "classification_rates": ["info", "--experiment", "{exp}", "--pi", "0.3", "--cost", "0.4"],
    "lambda_map": ["info", "--experiment", "{exp}", "--pi", "0.3", "--cost", "0.4"],
    "lambda_inv": ["info", "--experiment", "{exp}", "--pi", "0.3", "--cost", "0.4"],
    "bayes_risk_01": ["info", "--experiment", "{exp}", "--pi", "0.5"],
    "statistical_information_01": ["info", "--experiment", "{exp}", "--pi", "0.5"],
    "neyman_pearson_beta": ["curve", "beta", "--experiment", "{exp}", "--points", "5"],
    "roc_vertices": ["curve", "beta", "--experiment", "{exp}", "--points", "5"],
    # divergences
    "f_divergence_direct": ["divergence", "--experiment", "{exp}", "--f", "kl"],
    "variational": ["divergence", "--experiment", "{exp}", "--f", "variational", "--method", "closed"],
    "gamma_from_f": ["translate", "--from", "f", "--to", "gamma", "--div", "kl", "--grid", "5"],
    "f_from_gamma": ["translate", "--from", "gamma", "--to", "f", "--div", "kl", "--grid", "5"],
    "divergence_via_weight": ["divergence", "--experiment", "{exp}", "--f", "kl", "--method", "weight"],
    "is_symmetric_weight": ["table", "--points", "3"],
    "builtin": ["table", "--points", "3"],
    "primitive_f_pi": ["divergence", "--experiment", "{exp}", "--f", "primitive", "--pi", "0.3"],
    # losses
    "cost_loss": ["loss", "--loss", "square", "--eta", "0.3", "--eta-hat", "0.6", "--cost", "0.4"],
    "min_cost_risk": ["loss", "--loss", "square", "--eta", "0.3", "--eta-hat", "0.6", "--cost", "0.4"],
    "regret_cost": ["loss", "--loss", "square", "--eta", "0.3", "--eta-hat", "0.6", "--cost", "0.4"],
    "pointwise_risk": ["loss", "--loss", "log", "--eta", "0.3", "--eta-hat", "0.6"],
    "conditional_risk": ["loss", "--loss", "log", "--eta", "0.3", "--eta-hat", "0.6"],
    "bayes_risk": ["loss", "--loss", "log", "--eta", "0.3"],
    "regret": ["loss", "--loss", "log", "--eta", "0.3", "--eta-hat", "0.6"],
    "partial_loss": ["loss", "--loss", "log", "--eta", "0.3", "--eta-hat", "0.6"],
    "weight_from_bayes_risk": ["translate", "--from", "loss", "--to", "w", "--loss", "log", "--grid", "5"],
    "loss_from_weight": ["loss", "--loss", "weight-file:{weights}", "--eta", "0.3"],
    "canonical_link": ["loss", "--loss", "square", "--eta", "0.3", "--h", "0.2"],
    "composite_loss": ["loss", "--loss", "square", "--eta", "0.3", "--h", "0.2"],
    "bregman_dual_check": ["loss", "--loss", "log", "--eta", "0.3", "--x", "0.2", "--y", "0.7"],
    "builtin_loss": ["loss", "--loss", "exp", "--eta", "0.3"],
    "load_weight_file": ["loss", "--loss", "weight-file:{weights}", "--eta", "0.3"],
    "parse_loss": ["loss", "--loss", "cost:0.3", "--eta", "0.3"],
    # information
    "statistical_information": ["info", "--experiment", "{exp}", "--pi", "0.5", "--loss", "log"],
    "bregman_information": ["info", "--experiment", "{exp}", "--pi", "0.5", "--loss", "log"],
    "f_from_loss": ["translate", "--from", "loss", "--to", "f", "--loss", "log", "--pi", "0.3", "--grid", "5"],
    "loss_from_f": ["translate", "--from", "f", "--to", "loss", "--div", "kl", "--pi", "0.3", "--grid", "5"],
    "w_from_gamma": ["translate", "--from", "gamma", "--to", "w", "--div", "kl", "--pi", "0.3", "--grid", "5"],
    "gamma_from_w": ["translate", "--from", "w", "--to", "gamma", "--loss", "log", "--pi", "0.3", "--grid", "5"],
    # bounds
    "surrogate_bound": ["bound", "surrogate", "--loss", "log", "--c0", "0.5", "--alpha", "0.1"],
    "pinsker_general": ["bound", "pinsker", "--div", "kl", "--constraints", "0.5:0.3"],
    "pinsker_special": ["bound", "pinsker", "--div", "hellinger", "--v", "1.0"],
    "kl_pinsker_explicit": ["bound", "kl", "--v", "1.0"],
    "fedotov_reference": ["bound", "fedotov", "--v", "1.0"],
    "classic_comparators": ["bound", "comparators", "--v", "1.0"],
    "three_atom_minimum": ["bound", "three-atom", "--div", "hellinger", "--v", "1.0", "--grid", "9"],
    # curves
    "risk_curve": ["curve", "risk", "--experiment", "{exp}", "--pi", "0.4", "--points", "5"],
    "roc_curve": ["curve", "roc", "--experiment", "{exp}"],
    "auc": ["curve", "roc", "--experiment", "{exp}"],
    "minLL_from_beta": ["curve", "risk-prior", "--experiment", "{exp}", "--points", "5"],
    "beta_from_minLL": ["curve", "beta", "--experiment", "{exp}", "--from-risk", "--points", "5"],
    "minLL_from_beta_explicit": ["curve", "risk-gamma", "--gamma", "0.5", "--explicit", "--points", "5"],
    "beta_from_minLL_explicit": ["curve", "beta-gamma", "--gamma", "0.5", "--explicit", "--points", "5"],
    "beta_gamma": ["curve", "beta-gamma", "--gamma", "0.5", "--points", "5"],
    "roc_point_to_risk_line": ["curve", "duality", "--pi", "0.5", "--fp", "0.2", "--tp", "0.8"],
    "risk_point_to_roc_line": ["curve", "duality", "--pi", "0.5", "--cost", "0.5", "--risk", "0.1"],
    # variational
    "generalized_variational": ["info", "--experiment", "{exp}", "--pi", "0.5", "--class", "sign"],
    "linear_loss_risk": ["info", "--experiment", "{exp}", "--pi", "0.5", "--class", "sign"],
    "restricted_01_risk": ["info", "--experiment", "{exp}", "--pi", "0.5", "--class", "sign"],
    "aco_hull_invariance": ["info", "--experiment", "{exp}", "--pi", "0.5", "--class", "sign"],
    "mmd_biased": ["mmd", "--sample", "{sample}", "--kernel", "rbf:1.0"],
    "linear_kernel": ["mmd", "--sample", "{sample}", "--kernel", "linear"],
    "rbf_kernel": ["mmd", "--sample", "{sample}", "--kernel", "rbf:1.0"],
    "variational_f_divergence": ["divergence", "--experiment", "{exp}", "--f", "kl", "--method", "pointwise"],
    "sign_class": ["divergence", "--experiment", "{exp}", "--f", "variational", "--method", "sign"],
    "generalized_I_fg": ["divergence", "--experiment", "{exp}", "--f", "chi2", "--g", "chi2"],
}


# --- formatting -------------------------------------------------------------

def fmt(x) -> str:
    x = float(x)
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return f"{x:.9g}"


def _json_num(x):
    if x is None:
        return None
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_json_num(v) for v in x]
    if isinstance(x, dict):
        return {k: _json_num(v) for k, v in x.items()}
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(fmt(x))


def _emit_json(obj, out):
    out.write(json.dumps(_json_num(obj), sort_keys=True) + "\n")


def _emit_csv(rows, out, header=None, comments=()):
    for c in comments:
        out.write(f"# {c}\n")
    w = csv.writer(out, lineterminator="\n")
    if header:
        w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])


# --- argument helpers ------------------------------------------------------

def _divergence(name: str, eps: Optional[float], pi: Optional[float] = None) -> D.DivergenceSpec:
    if name == "primitive":
        if pi is None:
            raise ValidationError("--f primitive needs --pi")
        f = D.primitive_f_pi(pi)
        return D.DivergenceSpec(f"primitive({pi:g})", f, D.gamma_from_f(f))
    params = {"eps": eps} if eps is not None else None
    return D.builtin(name, params)


def _f_of(spec: D.DivergenceSpec) -> C.ConvexFunction:
    return spec.f if spec.f is not None else D.f_from_gamma(spec.gamma, name=spec.name)


def _interior(n: int) -> np.ndarray:
    return np.arange(1, n + 1) / (n + 1)


def _unit_grid(n: int) -> np.ndarray:
    if n < 2:
        raise ValidationError("--points must be at least 2")
    return np.linspace(0.0, 1.0, n)


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise ValidationError(f"--{n.replace('_', '-')} is required here")


# --- subcommands -----------------------------------------------------------

def cmd_divergence(args, out):
    exp = E.load_experiment(args.experiment)
    spec = _divergence(args.f, args.eps, args.pi)
    if args.g is not None:
        g = _f_of(_divergence(args.g, args.eps, args.pi))
        val = V.generalized_I_fg(exp, _f_of(spec), g)
        out.write(fmt(val) + "\n")
        return val
    f = _f_of(spec)
    if args.reverse:
        f = C.csiszar_dual(f)
    m = args.method
    if m == "direct":
        val = D.f_divergence_direct(exp, f)
    elif m == "perspective":
        val = math.fsum(C.perspective_eval(f, float(a), float(b)) for a, b in zip(exp.p, exp.q)) - f(1.0)
    elif m == "jensen":
        if np.any(exp.q == 0):
            raise ValidationError("the Jensen form needs q > 0 on every outcome")
        val = C.jensen_gap(f, exp.p / exp.q, exp.q)
    elif m == "weight":
        val = D.divergence_via_weight(exp.swapped() if args.reverse else exp, spec.gamma)
    elif m == "pointwise":
        val = V.variational_f_divergence(exp, f) - f(1.0)
    elif m == "sign":
        val = V.variational_f_divergence(exp, f, V.sign_class(exp.n)) - f(1.0)
    elif m == "closed":
        if args.f != "variational":
            raise ValidationError("--method closed is only available for --f variational")
        val = D.variational(exp)
    else:  # pragma: no cover - argparse restricts choices
        raise ValidationError(f"unknown method {m!r}")
    out.write(fmt(val) + "\n")
    return val


def _source_object(args):
    """The object named by --from: a ConvexFunction, a WeightFunction or a loss."""
    src = args.source
    if src in ("f", "gamma"):
        _need(args, "div")
        spec = _divergence(args.div, args.eps, args.pi)
        return _f_of(spec) if src == "f" else spec.gamma
    _need(args, "loss")
    loss = L.parse_loss(args.loss)
    return loss.w if src == "w" else loss


def _weight_rows(w: D.WeightFunction, xs):
    rows = [(x, w.density(float(x))) for x in xs]
    atoms = [("atom", fmt(loc), fmt(m)) for loc, m in w.atoms]
    return rows, atoms


def cmd_translate(args, out):
    src, dst = args.source, args.target
    obj = _source_object(args)
    n = args.grid
    pi_needed = {("gamma", "w"), ("w", "gamma"), ("f", "w"), ("w", "f"), ("loss", "f"), ("f", "loss")}
    if (src, dst) in pi_needed:
        _need(args, "pi")
    comments = [f"from={src} to={dst}" + (f" pi={args.pi:g}" if args.pi is not None else "")]
    atoms = []
    if dst == src:
        raise ValidationError("--from and --to must differ")

    if dst in ("gamma", "w"):
        if src == "f":
            w = D.gamma_from_f(obj)
            if dst == "w":
                w = I.w_from_gamma(w, args.pi)
        elif src == "gamma":
            w = I.w_from_gamma(obj, args.pi) if dst == "w" else obj
        elif src == "w":
            w = I.gamma_from_w(obj, args.pi)
        else:  # loss: differentiate the Bayes risk
            lb = lambda e, loss=obj: L.bayes_risk(loss, e)
            w = L.weight_from_bayes_risk(lb, name=obj.name)
            if dst == "gamma":
                _need(args, "pi")
                w = I.gamma_from_w(w, args.pi)
        rows, atoms = _weight_rows(w, _interior(n))
    elif dst == "f":
        if src == "gamma":
            f = D.f_from_gamma(obj)
        elif src == "w":
            f = I.f_from_loss(L.loss_from_weight(obj), args.pi)
        else:
            f = I.f_from_loss(obj, args.pi)
        rows = [(t, f(float(t))) for t in np.geomspace(0.1, 10.0, n)]
    elif dst == "loss":
        if src == "f":
            loss = I.loss_from_f(obj, args.pi)
        elif src == "gamma":
            loss = I.loss_from_f(D.f_from_gamma(obj), args.pi) if args.pi is not None else None
            if loss is None:
                raise ValidationError("--pi is required here")
        else:
            loss = L.loss_from_weight(obj)
        rows = [(c, L.bayes_risk(loss, float(c))) for c in _unit_grid(max(n, 2))]
    elif dst == "conjugate":
        if src != "f":
            raise ValidationError("--to conjugate needs --from f")
        hi = min(obj.slope_at_infinity, 3.0)
        conj = C.lf_conjugate(obj)
        rows = [(s, conj(float(s))) for s in np.linspace(-3.0, hi, n)]
    elif dst == "dual":
        if src != "f":
            raise ValidationError("--to dual needs --from f")
        d = C.csiszar_dual(obj)
        rows = [(t, d(float(t))) for t in np.geomspace(0.1, 10.0, n)]
    elif dst == "box":
        if src != "f":
            raise ValidationError("--to box needs --from f")
        _need(args, "g")
        g = _f_of(_divergence(args.g, args.eps, args.pi))
        box = C.infimal_convolution(obj, g)
        rows = [(t, box(float(t))) for t in np.geomspace(0.1, 10.0, n)]
    else:  # pragma: no cover
        raise ValidationError(f"unknown target {dst!r}")
    _emit_csv(rows, out, header=["x", "value"], comments=comments)
    if atoms:
        out.write("# atoms\n")
        _emit_csv(atoms, out, header=["atom", "loc", "mass"])
    return 0.0


def cmd_bound(args, out):
    kind = args.kind
    if kind == "surrogate":
        _need(args, "loss", "c0", "alpha")
        val = B.surrogate_bound(L.parse_loss(args.loss), args.c0, args.alpha)
        res = {"value": val, "witness": None, "method": "surrogate_bound"}
    elif kind == "pinsker":
        _need(args, "div")
        if args.constraints is not None:
            pairs = []
            for item in args.constraints.split(","):
                try:
                    a, b = item.split(":")
                    pairs.append((float(a), float(b)))
                except ValueError:
                    raise ValidationError(f"bad constraint {item!r}; expected pi:psi") from None
            spec = _divergence(args.div, args.eps)
            r = B.pinsker_general(spec.gamma, B.PinskerConstraint(sorted(pairs)))
            res = {"value": r.value, "witness": r.witness, "method": r.method}
        else:
            _need(args, "v")
            res = {"value": B.pinsker_special(args.div, args.v), "witness": None,
                   "method": f"pinsker_special:{args.div}"}
    elif kind == "kl":
        _need(args, "v")
        r = B.kl_pinsker_explicit(args.v)
        res = {"value": r.value, "witness": r.witness, "method": r.method}
    elif kind == "fedotov":
        _need(args, "v")
        res = {"value": B.fedotov_reference(args.v), "witness": None, "method": "fedotov_reference"}
    elif kind == "comparators":
        _need(args, "v")
        comp = B.classic_comparators(args.v)
        res = {"value": max(comp.values()), "witness": comp, "method": "classic_comparators"}
    elif kind == "three-atom":
        _need(args, "div", "v")
        f = _f_of(_divergence(args.div, args.eps))
        val, ex = B.three_atom_minimum(f, args.v, grid=args.grid)
        res = {"value": val, "witness": {"p": ex.p.tolist(), "q": ex.q.tolist()},
               "method": "three_atom_minimum"}
    else:  # pragma: no cover
        raise ValidationError(f"unknown bound {kind!r}")
    _emit_json(res, out)
    return res["value"]


def _likelihood_ratio(exp):
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(exp.q > 0, exp.p / np.where(exp.q > 0, exp.q, 1.0), math.inf)
    return s


def cmd_curve(args, out):
    kind = args.kind
    n = args.points
    if kind == "duality":
        _need(args, "pi")
        if args.fp is not None and args.tp is not None:
            slope, icpt = R.roc_point_to_risk_line(args.fp, args.tp, args.pi)
            comment = "risk line c -> slope * c + intercept"
        elif args.cost is not None and args.risk is not None:
            slope, icpt = R.risk_point_to_roc_line(args.cost, args.risk, args.pi)
            comment = "ROC line FP -> slope * FP + intercept"
        else:
            raise ValidationError("duality needs --fp/--tp or --cost/--risk")
        _emit_csv([(slope, icpt)], out, header=["slope", "intercept"], comments=[comment])
        return 0.0
    if kind in ("beta-gamma", "risk-gamma"):
        _need(args, "gamma")
        g = args.gamma
        xs = _interior(n)
        Lg = lambda p: g * p * (1 - p)
        dLg = lambda p: g * (1 - 2 * p)
        bg = lambda a: R.beta_gamma(g, a)
        dbg = lambda a: (math.sqrt(g / a) - 1) if a < g else 0.0
        if kind == "beta-gamma":
            ys = [R.beta_from_minLL_explicit(Lg, dLg, float(a))[0] if args.explicit else bg(float(a))
                  for a in xs]
            curve = R.CurvePoints(xs, ys, "beta", {"gamma": g})
        else:
            ys = [R.minLL_from_beta_explicit(bg, dbg, float(p))[0] if args.explicit
                  else R.minLL_from_beta(bg, float(p)) for p in xs]
            curve = R.CurvePoints(xs, ys, "risk_vs_prior", {"gamma": g})
        _emit_curve(curve, out, args)
        return 0.0

    _need(args, "experiment")
    exp = E.load_experiment(args.experiment)
    if kind == "risk":
        _need(args, "pi")
        task = E.Task(args.pi, exp)
        eta = np.zeros(exp.n)
        m = args.pi * exp.p + (1 - args.pi) * exp.q
        eta[m > 0] = task.posterior
        curve = R.risk_curve(task, eta, _interior(n))
    elif kind == "risk-prior":
        beta = lambda a: E.neyman_pearson_beta(exp, a)
        xs = _interior(n)
        curve = R.CurvePoints(xs, [R.minLL_from_beta(beta, float(p)) for p in xs], "risk_vs_prior")
    elif kind == "roc":
        curve = R.roc_curve(exp, _likelihood_ratio(exp))
        curve = R.CurvePoints(curve.x, curve.y, "roc", {"auc": R.auc(curve)})
    elif kind == "beta":
        xs = _unit_grid(n)
        if args.from_risk:
            Lr = lambda p: E.bayes_risk_01(p, exp)
            ys = [R.beta_from_minLL(Lr, float(a)) for a in xs]
        else:
            ys = E.neyman_pearson_beta(exp, xs)
        fp, tp = E.roc_vertices(exp)
        # AUC of the exact piecewise-linear curve, not of the sampled grid
        curve = R.CurvePoints(xs, ys, "beta", {"auc": R.auc(R.CurvePoints(fp, tp, "roc")),
                                                 "vertices": str(fp.size)})
    else:  # pragma: no cover
        raise ValidationError(f"unknown curve {kind!r}")
    _emit_curve(curve, out, args)
    return 0.0


def _emit_curve(curve, out, args):
    meta = " ".join(f"{k}={fmt(v) if not isinstance(v, str) else v}" for k, v in sorted(curve.metadata.items()))
    comments = [f"kind={curve.kind}" + (f" {meta}" if meta else "")]
    _emit_csv(curve.samples(), out, header=["x", "y"], comments=comments)


def cmd_loss(args, out):
    loss = L.parse_loss(args.loss)
    eta = args.eta
    res = {"bayes_risk": L.bayes_risk(loss, eta)}
    if args.eta_hat is not None:
        eh = args.eta_hat
        partial = lambda y, e: L.partial_loss(loss, y, e)
        res.update({
            "conditional_risk": L.conditional_risk(loss, eta, eh),
            "pointwise_risk": L.pointwise_risk(partial, eta, eh),
            "regret": L.regret(loss, eta, eh),
            "partial_loss_pos": L.partial_loss(loss, 1, eh),
            "partial_loss_neg": L.partial_loss(loss, -1, eh),
        })
        if args.cost is not None:
            c = args.cost
            res.update({
                "cost_loss_pos": L.cost_loss(c, 1, eh),
                "cost_loss_neg": L.cost_loss(c, -1, eh),
                "min_cost_risk": L.min_cost_risk(c, eta),
                "regret_cost": L.regret_cost(c, eta, eh),
            })
    if args.h is not None:
        link = L.canonical_link(loss)
        res["composite_loss"] = L.composite_loss(loss, link, eta, args.h)
    if args.x is not None or args.y is not None:
        _need(args, "x", "y")
        lhs, rhs = L.bregman_dual_check(loss, args.x, args.y)
        res["bregman_lhs"], res["bregman_dual_rhs"] = lhs, rhs
    _emit_json(res, out)
    return res["bayes_risk"]


def _load_class(spec: str, n: int) -> V.FunctionClass:
    if spec == "sign":
        return V.sign_class(n)
    rows = []
    for r, row in enumerate(csv.reader(Path(spec).read_text().splitlines()), start=1):
        if not row or row[0].strip().startswith("#"):
            continue
        try:
            rows.append([float(c) for c in row])
        except ValueError:
            raise ValidationError(f"{spec}: row {r}: non-numeric entry") from None
    return V.FunctionClass.with_negations(rows)


def cmd_info(args, out):
    exp = E.load_experiment(args.experiment)
    pi = args.pi
    res = {
        "bayes_risk_01": E.bayes_risk_01(pi, exp),
        "statistical_information_01": E.statistical_information_01(pi, exp),
    }
    if args.loss is not None:
        loss = L.parse_loss(args.loss)
        task = E.Task(pi, exp)
        res["statistical_information"] = I.statistical_information(task, loss)
        res["bregman_information"] = I.bregman_information(task, loss)
    if args.cost is not None:
        t = E.lambda_map(pi, args.cost)
        test = E.BinaryTest((_likelihood_ratio(exp) >= t).astype(float))
        tp, fp, tn, fn = E.classification_rates(exp, test)
        res.update({"lambda": t, "lambda_inv": E.lambda_inv(pi, t),
                    "TP": tp, "FP": fp, "TN": tn, "FN": fn})
    if args.cls is not None:
        cls = _load_class(args.cls, exp.n)
        res["generalized_variational"] = V.generalized_variational(exp, pi, cls)
        res["linear_loss_risk"] = V.linear_loss_risk(exp, pi, cls)
        if cls.sign_closed:
            res["restricted_01_risk"] = V.restricted_01_risk(exp, pi, cls)
        res["aco_hull_value"] = V.aco_hull_invariance(exp, pi, cls)[1]
    _emit_json(res, out)
    return res["bayes_risk_01"]


def _load_sample(path: str):
    labels, feats = [], []
    for r, row in enumerate(csv.reader(Path(path).read_text().splitlines()), start=1):
        cells = [c.strip() for c in row]
        if not cells or not cells[0] or cells[0].startswith("#"):
            continue
        try:
            vals = [float(c) for c in cells]
        except ValueError:
            if r == 1:
                continue  # header
            raise ValidationError(f"{path}: row {r}: non-numeric entry") from None
        if len(vals) < 2:
            raise ValidationError(f"{path}: row {r}: need a label and at least one feature")
        if feats and len(vals) - 1 != len(feats[0]):
            raise ValidationError(f"{path}: row {r} has {len(vals)} columns, expected {len(feats[0]) + 1}")
        labels.append(vals[0])
        feats.append(vals[1:])
    if not labels:
        raise ValidationError(f"{path}: no samples")
    return np.array(labels), np.array(feats)


def cmd_mmd(args, out):
    y, X = _load_sample(args.sample)
    if args.kernel == "linear":
        K = V.linear_kernel(X)
    elif args.kernel.startswith("rbf:"):
        try:
            sigma = float(args.kernel.split(":", 1)[1])
        except ValueError:
            raise ValidationError(f"bad kernel {args.kernel!r}") from None
        K = V.rbf_kernel(X, sigma)
    else:
        raise ValidationError("--kernel must be 'linear' or 'rbf:<sigma>'")
    J = V.mmd_biased(V.KernelSample(y, K))
    _emit_csv([("mmd_b2", fmt(J)), ("mmd_b", fmt(math.sqrt(J)))], out, header=["quantity", "value"])
    return J


def cmd_table(args, out):
    xs = _interior(args.points)
    names = [n for n in D.BUILTIN_NAMES]
    specs = [D.builtin(n) for n in names]
    rows = [[x] + [s.gamma.density(float(x)) for s in specs] for x in xs]
    sym = ["symmetric"] + ["yes" if D.is_symmetric_weight(s.gamma) else "no" for s in specs]
    atoms = [f"{s.name}:" + ";".join(f"{fmt(loc)}@{fmt(m)}" for loc, m in s.gamma.atoms)
             for s in specs if s.gamma.atoms]
    comments = ["gamma weights of the builtin divergences"] + [f"atoms {a}" for a in atoms]
    _emit_csv(rows, out, header=["pi"] + names, comments=comments)
    out.write("# " + ",".join(sym) + "\n")
    return 0.0


# --- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="binexp", description="Binary experiments, divergences and losses.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("divergence", help="f-divergence of an experiment")
    d.add_argument("--experiment", required=True)
    d.add_argument("--f", required=True, help="builtin name, or 'primitive' with --pi")
    d.add_argument("--eps", type=float)
    d.add_argument("--pi", type=float)
    d.add_argument("--g", help="second generator: report I_{f,g}")
    d.add_argument("--reverse", action="store_true", help="use the Csiszar dual (swap P and Q)")
    d.add_argument("--method", default="direct",
                   choices=["direct", "perspective", "jensen", "weight", "pointwise", "sign", "closed"])
    d.set_defaults(func=cmd_divergence)

    t = sub.add_parser("translate", help="convert between f, gamma, w and losses")
    t.add_argument("--from", dest="source", required=True, choices=["f", "gamma", "w", "loss"])
    t.add_argument("--to", dest="target", required=True,
                   choices=["f", "gamma", "w", "loss", "conjugate", "dual", "box"])
    t.add_argument("--div")
    t.add_argument("--loss")
    t.add_argument("--g")
    t.add_argument("--eps", type=float)
    t.add_argument("--pi", type=float)
    t.add_argument("--grid", type=int, default=11)
    t.set_defaults(func=cmd_translate)

    b = sub.add_parser("bound", help="surrogate and Pinsker-type bounds (JSON)")
    b.add_argument("kind", choices=["surrogate", "pinsker", "kl", "fedotov", "comparators", "three-atom"])
    b.add_argument("--loss")
    b.add_argument("--c0", type=float)
    b.add_argument("--alpha", type=float)
    b.add_argument("--div")
    b.add_argument("--eps", type=float)
    b.add_argument("--v", type=float)
    b.add_argument("--constraints", help="pi1:psi1,pi2:psi2,...")
    b.add_argument("--grid", type=int, default=41)
    b.set_defaults(func=cmd_bound)

    c = sub.add_parser("curve", help="risk, ROC and beta curves (CSV)")
    c.add_argument("kind", choices=["risk", "risk-prior", "roc", "beta", "beta-gamma", "risk-gamma", "duality"])
    c.add_argument("--experiment")
    c.add_argument("--pi", type=float)
    c.add_argument("--points", type=int, default=101)
    c.add_argument("--gamma", type=float)
    c.add_argument("--explicit", action="store_true")
    c.add_argument("--from-risk", action="store_true")
    c.add_argument("--fp", type=float)
    c.add_argument("--tp", type=float)
    c.add_argument("--cost", type=float)
    c.add_argument("--risk", type=float)
    c.set_defaults(func=cmd_curve)

    lo = sub.add_parser("loss", help="risks and regrets of a proper loss (JSON)")
    lo.add_argument("--loss", required=True)
    lo.add_argument("--eta", type=float, required=True)
    lo.add_argument("--eta-hat", type=float)
    lo.add_argument("--cost", type=float)
    lo.add_argument("--h", type=float, help="score for the composite loss with canonical link")
    lo.add_argument("--x", type=float)
    lo.add_argument("--y", type=float)
    lo.set_defaults(func=cmd_loss)

    i = sub.add_parser("info", help="Bayes risks and information of a task (JSON)")
    i.add_argument("--experiment", required=True)
    i.add_argument("--pi", type=float, required=True)
    i.add_argument("--loss")
    i.add_argument("--cost", type=float)
    i.add_argument("--class", dest="cls", help="'sign' or a CSV of function values")
    i.set_defaults(func=cmd_info)

    m = sub.add_parser("mmd", help="biased MMD estimate of a labelled sample")
    m.add_argument("--sample", required=True)
    m.add_argument("--kernel", default="linear")
    m.set_defaults(func=cmd_mmd)

    tb = sub.add_parser("table", help="gamma weights of the builtin divergences (CSV)")
    tb.add_argument("--points", type=int, default=9)
    tb.set_defaults(func=cmd_table)
    return p


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        val = args.func(args, out)
    except DivergenceError as exc:
        out.write("inf\n")
        err.write(f"binexp: {exc}\n")
        return EXIT_INF
    except (ValidationError, FileNotFoundError, IsADirectoryError) as exc:
        err.write(f"binexp: {exc}\n")
        return EXIT_INVALID
    except BinexpError as exc:
        err.write(f"binexp: {exc}\n")
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        err.write(f"binexp: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL
    return EXIT_INF if val == math.inf else EXIT_OK


def main() -> None:
    sys.exit(run())
