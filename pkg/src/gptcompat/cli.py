"""Command-line front end: ``gptcompat <command> [options]``."""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import compat, spectra, tensor_norms as tn, witness as wt
from .cones import dumps
from .gpt import (dichotomic_family, family_from_json, make_ball, gpt_from_json, make_crosspolytope, make_hypercube,
                  validate_effect, validate_measurement)
from .lp import LpNumericalError

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3


class ParseError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: str | None
    measurements: str | None
    tol: float = 1e-9
    bisect_tol: float = 1e-6
    seed: int = 0
    budget: int = 200
    fmt: str = "json"
    exact: bool = False
    g: int | None = None
    grid: int = 11

    @classmethod
    def from_args(cls, a) -> "RunConfig":
        return cls(a.command, a.model, a.measurements, a.tol, a.bisect_tol, a.seed, a.budget,
                   a.format, a.exact, getattr(a, "g", None), getattr(a, "grid", 11))


def _load_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ParseError(f"{path}: {e}") from e


def _load(cfg: RunConfig, need_family=True):
    if cfg.model is None:
        raise ParseError("--model is required")
    try:
        gpt = gpt_from_json(_load_json(cfg.model), exact=cfg.exact)
        fam = None
        if cfg.measurements is not None:
            fam = family_from_json(_load_json(cfg.measurements), exact=cfg.exact)
            if fam.dim != gpt.dim:
                raise ParseError("measurement dimension does not match the model")
        elif need_family:
            raise ParseError("--measurements is required")
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(str(e)) from e
    return gpt, fam


def _first_effects(fam):
    if any(k != 2 for k in fam.k):
        raise ParseError("this command needs two-outcome measurements")
    return [np.asarray(m.effects[0], float) for m in fam.measurements]


# ---- commands ----------------------------------------------------------------

def cmd_validate(cfg):
    gpt, fam = _load(cfg)
    per = [bool(validate_measurement(gpt, m, max(cfg.tol, 1e-12))) for m in fam.measurements]
    eff = [[bool(validate_effect(gpt, f, cfg.tol)) for f in m.effects] for m in fam.measurements]
    return {"command": "validate", "valid": all(per), "measurements": per, "effects": eff}, EXIT_OK


def cmd_compat(cfg):
    gpt, fam = _load(cfg)
    r = compat.is_compatible(gpt, fam, exact=cfg.exact, tol=cfg.tol)
    ext = compat.is_compatible_via_extension(gpt, fam, exact=cfg.exact, tol=cfg.tol)
    inc = spectra.jewel_inclusion(gpt, fam.with_exact(False) if cfg.exact else fam, tol=cfg.tol)
    rep = {"command": "compat", "compatible": r.compatible, "extension": ext.compatible,
           "jewel_inclusion": inc.included, "k": list(fam.k)}
    if r.compatible:
        rep["joint"] = np.asarray(r.joint, float).tolist()
    else:
        z0, zs = r.jewel_point
        rep["certificate"] = {"farkas": [np.asarray(b, float).tolist() for b in r.farkas_blocks],
                              "z0": np.asarray(z0, float).tolist(),
                              "z": [np.asarray(z, float).tolist() for z in zs]}
    if all(k == 2 for k in fam.k):
        rep["rho"] = tn.rho_norm(gpt, tn.phi_bar_blocks(gpt, _first_effects(fam)))
    return rep, EXIT_OK


def cmd_gamma(cfg):
    gpt, fam = _load(cfg, need_family=False)
    if fam is None:
        g = cfg.g or 2
        iv = compat.gamma_model(gpt, g, budget=cfg.budget, seed=cfg.seed)
        return {"command": "gamma", "g": g, "lower": iv.lower, "upper": iv.upper,
                "lower_source": iv.lower_source, "upper_source": iv.upper_source,
                "evaluations": iv.evaluations}, EXIT_OK
    gam = compat.gamma_of_family(gpt, fam, tol=cfg.bisect_tol)
    rep = {"command": "gamma", "gamma": gam, "k": list(fam.k)}
    if all(k == 2 for k in fam.k):
        rho = tn.rho_norm(gpt, tn.phi_bar_blocks(gpt, _first_effects(fam)))
        rep["rho"] = rho
        rep["gamma_from_rho"] = tn.gamma_from_rho(rho)
    return rep, EXIT_OK


def cmd_region(cfg):
    gpt, fam = _load(cfg, need_family=False)
    g = fam.g if fam is not None else (cfg.g or 2)
    pts = np.linspace(0, 1, cfg.grid)
    rows = []
    tuples = None if fam is not None else compat.worst_case_tuples(gpt, g)
    for s in itertools.product(pts, repeat=g):
        if fam is not None:
            inside = compat.region_membership(gpt, fam, list(s), exact=False, tol=cfg.tol)
        else:
            inside = compat.model_region_membership(gpt, s)
        rows.append({**{f"s{i + 1}": float(v) for i, v in enumerate(s)}, "member": bool(inside)})
    return {"command": "region", "g": g, "rows": rows}, EXIT_OK


def cmd_rho(cfg):
    gpt, fam = _load(cfg)
    P = tn.phi_bar_blocks(gpt, _first_effects(fam))
    p = tn.rho_norm_primal(gpt, P)
    d = tn.rho_norm_dual(gpt, P)
    if abs(p - d) > tn.RHO_DUALITY_TOL * max(1, abs(p)):
        raise LpNumericalError("primal and dual rho values disagree")
    return {"command": "rho", "rho": p, "rho_dual": d,
            "injective": tn.injective_norm_linf(P, (gpt, "A")),
            "gamma": tn.gamma_from_rho(p)}, EXIT_OK


def cmd_witness(cfg):
    gpt, fam = _load(cfg)
    effs = _first_effects(fam)
    w = wt.extract_witness(gpt, effs, tol=cfg.tol)
    if w is None:
        return {"command": "witness", "compatible": True, "witness": None}, EXIT_OK
    rep = {"command": "witness", "compatible": False, **w.to_json(gpt),
           "value": wt.evaluate(w, tn.phi_bar_blocks(gpt, effs))}
    return rep, EXIT_OK


def reproduce_rows(budget=200, seed=0):
    """(name, computed, expected, tol, kind) rows for the desk-scale results."""
    rows = []

    def add(name, val, exp, tol, kind="computed"):
        rows.append({"name": name, "computed": float(val), "expected": float(exp), "tol": tol,
                     "kind": kind, "pass": bool(abs(float(val) - float(exp)) <= tol)})

    h2 = make_hypercube(2)
    fam = dichotomic_family(h2, [[0.5, 0.5, 0], [0.5, 0, 0.5]])
    add("gamma(2, hypercube n=2) bisection", compat.gamma_of_family(h2, fam), 0.5, 1e-6)
    iv = compat.gamma_model(h2, 3, budget=budget, seed=seed)
    add("gamma(3, hypercube n=2)", iv.upper, 0.5, 1e-6)
    add("gamma(3, hypercube n=2) closed form", iv.lower, 0.5, 1e-12)
    add("hypercube n=2 g=3 (1/2,1/2,1/2) in region", compat.model_region_membership(h2, [.5, .5, .5]), 1, 0)
    add("hypercube n=2 g=3 (.51,.51,.51) in region", compat.model_region_membership(h2, [.51] * 3), 0, 0)
    add("QC_2 boundary point in region_ball", bool(tn.region_ball(2, 3, [2 ** -.5] * 2)), 1, 0)
    add("euclidean pair gamma(e1, e2)", compat.euclidean_pair_gamma([1, 0, 0], [0, 1, 0]), 2 ** -.5, 1e-12)
    add("gamma(3, ball n=3) upper bound", tn.gamma_upper_reference(make_ball(3), (2, 2, 2))[0], 3 ** -.5, 1e-12)
    add("f(2) cross-polytope", tn.gamma_crosspolytope(2), 0.5, 1e-12)
    add("f(3) cross-polytope", tn.gamma_crosspolytope(3), 0.5, 1e-12)
    add("gamma(2, cross-polytope n=2) search upper", compat.gamma_model(make_crosspolytope(2), 2, budget=budget, seed=seed).upper, 0.5, 1e-6)
    for n in range(1, 11):
        add(f"pi1(linf,{n})", tn.one_summing("linf", n), n, 0)
    add("pi1(l2,3)", tn.one_summing("l2", 3), 2.0, 1e-12)
    add("pi1(l1,2)", tn.one_summing("l1", 2), 2.0, 1e-12)
    add("qubit lower bound g>=4", tn.REFERENCE["qubit_lower_g_ge_4"], 0.5, 1e-15, "reference, not recomputed")
    add("qubit upper bound g>=4", tn.REFERENCE["qubit_upper_g_ge_4"], 3 ** -.5, 1e-15, "reference, not recomputed")
    add("pi1(S1^2) bound constant c", tn.one_summing("S1_selfadjoint_bound", 1), 7.79, 1e-15, "reference, not recomputed")
    return rows


def cmd_reproduce(cfg):
    rows = reproduce_rows(cfg.budget, cfg.seed)
    ok = all(r["pass"] for r in rows)
    return {"command": "reproduce", "all_pass": ok, "rows": rows}, (EXIT_OK if ok else EXIT_MISMATCH)


COMMANDS = {"validate": cmd_validate, "compat": cmd_compat, "gamma": cmd_gamma, "region": cmd_region,
            "rho": cmd_rho, "witness": cmd_witness, "reproduce": cmd_reproduce}


# ---- output --------------------------------------------------------------

def _scalar(v):
    if isinstance(v, float):
        return repr(v + 0.0)
    if isinstance(v, (list, dict)):
        return dumps(v)
    return str(v)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report)
    rows = report.get("rows")
    if rows is None:
        rows = [{"key": k, "value": v} for k, v in report.items()]
    cols = list(rows[0].keys()) if rows else []
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_scalar(r[c]) for c in cols])
        return buf.getvalue().rstrip("\n")
    cells = [[_scalar(r[c]) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(x[i]) for x in cells]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(x.ljust(w) for x, w in zip(r, widths)) for r in cells]
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gptcompat", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--model")
        s.add_argument("--measurements")
        s.add_argument("--tol", type=float, default=1e-9)
        s.add_argument("--bisect-tol", type=float, default=1e-6)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--budget", type=int, default=200)
        s.add_argument("--format", choices=["json", "csv", "table"], default="json")
        s.add_argument("--exact", action="store_true")
        if name in ("gamma", "region"):
            s.add_argument("--g", type=int)
        if name == "region":
            s.add_argument("--grid", type=int, default=11)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig.from_args(args)
    try:
        report, code = COMMANDS[cfg.command](cfg)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except LpNumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    print(render(report, cfg.fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())
