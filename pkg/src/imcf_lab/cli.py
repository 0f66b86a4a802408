"""``imcf-lab`` command line.

    imcf-lab <verify|flow|masses|chain|study> --config FILE --out DIR
             [--mode delta-covariant|coordinate-partial] [--refine K]

Exit status: 0 ok, 1 verification failure, 2 input error, 3 flow breakdown.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import chain, masses
from .ambient import WarpedProfile
from .errors import (CaseMassMismatch, FamilyTooSmall, FlowBreakdown, GridMismatch,
                     LapseSingular, NoConvergence, NonGraphical, ParameterNotDecreasing,
                     ParseError, RadiusOutOfDomain, StepTooLarge, ValidationError)
from .flow import _jsonable, class_membership_report, exact_round_flow
from .scenario import bounds_or_inf, parse_family, parse_scenario

INPUT_ERRORS = (ParseError, ValidationError, CaseMassMismatch, LapseSingular, GridMismatch,
                FamilyTooSmall, ParameterNotDecreasing, OSError)
FLOW_ERRORS = (FlowBreakdown, NoConvergence, NonGraphical, StepTooLarge, RadiusOutOfDomain)


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _bump(t, a, b):
    """Smooth bump supported in ``(a, b)``."""
    x = (t - a) / (b - a)
    out = np.zeros_like(t)
    inside = (x > 0) & (x < 1)
    out[inside] = np.exp(-1 / (x[inside] * (1 - x[inside])))
    return out


def verification_checks(N_theta=64, N_t=256, T=2.0):
    """``(name, value, tolerance, passed)`` rows of the exact-flow oracle suite."""
    rows = []

    def check(name, value, tol, passed=None):
        value = float(value)
        rows.append((name, value, tol, abs(value) <= tol if passed is None else bool(passed)))

    models = [
        ("flat", WarpedProfile.flat(), "euclidean", "pmt-flat", 0.0, 1.0),
        ("schwarzschild", WarpedProfile.schwarzschild(0.2), "euclidean", "rpi-schwarzschild", 0.2, 2.0),
        ("hyperbolic", WarpedProfile.hyperbolic(), "hyperbolic", "pmt-hyperbolic", 0.0, 1.0),
        ("adss", WarpedProfile.adss(0.2), "hyperbolic", "rpi-adss", 0.2, 2.0),
    ]
    for name, prof, variant, case, m, r0 in models:
        rec = exact_round_flow(prof, r0, T, N_t, N_theta)
        mass = masses.mass_history(rec, variant)
        check(f"{name}.hawking_mass", np.max(np.abs(mass - m)), 1e-10)
        check(f"{name}.area_law", rec.area_law_error(), 1e-10)
        geroch = masses.geroch_diagnostics(rec, variant)
        check(f"{name}.geroch_identity", geroch.max_abs_residual(), 1e-8)
        for tag, table in masses.average_evolution_residuals(rec, variant).items():
            check(f"{name}.{tag}", table.max_abs_residual(), 1e-6)
        ric = masses.ricci_inequality_margin(rec)
        for k, v in ric.items():
            check(f"{name}.ricci_margin_{k}", v, 1e-6, v >= -1e-6)
        rep = chain.chain_report(rec, case, m)
        worst = max(max(lk["l2"], lk["w12"]) for lk in rep.links)
        check(f"{name}.chain_links", worst, 1e-9)
        check(f"{name}.chain_direct", rep.direct["w12"], 1e-9)
        sw = chain.metric_sandwich_margin(rec)
        check(f"{name}.sandwich", min(sw.lower, sw.upper), 1e-10)
        phi = _bump(rec.times, 0.25 * T, 0.75 * T)[:, None] * np.cos(rec.grid.theta) ** 2
        wr = masses.weak_ricci_residual(rec, phi, 0.0, T)
        check(f"{name}.weak_ricci", wr.residual, 1e-6)
        decay = masses.second_ff_gradient_decay(rec)
        check(f"{name}.second_ff_gradient", np.max(decay["grad_A"]), 1e-12)
        cor = masses.corollary_integral_table(rec, variant)
        check(f"{name}.gauss_bonnet", np.max(np.abs(cor["chi"] - 2)), 1e-3)
        if m == 0:
            for col, target in (("H2", 16 * math.pi), ("A2", 8 * math.pi), ("lam12", 4 * math.pi)):
                check(f"{name}.{col}_integral", np.max(np.abs(cor[col] - target)), 1e-8)
        else:
            t = rec.times
            want = 16 * math.pi / r0 * m * np.exp(-t / 2)
            check(f"{name}.geroch_rate", np.max(np.abs(geroch["lhs"] / want - 1)), 1e-6)
            for col in ("Rc", "K12", "H2"):
                rel = np.max(np.abs(cor[col] - cor[f"{col}_limit"]) / np.abs(cor[f"{col}_limit"]))
                check(f"{name}.{col}_limit", rel, 1e-8)
    flat = exact_round_flow(WarpedProfile.flat(), 1.0, T, N_t, N_theta)
    state = flat.states[0]
    check("flat.interpolation_metric", masses.interpolation_ratio(state, state.metric_tensor()), 0.0)
    return rows


def cmd_verify(args, scenario=None):
    kw = {}
    if scenario is not None:
        kw = dict(N_theta=scenario.N_theta, N_t=scenario.N_t, T=scenario.T)
    rows = verification_checks(**kw)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "verify.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["check", "value", "tolerance", "passed"])
        for name, value, tol, ok in rows:
            w.writerow([name, f"{value:.17g}", f"{tol:.17g}", int(ok)])
    failed = [r for r in rows if not r[3]]
    for name, value, tol, ok in rows:
        print(f"{'PASS' if ok else 'FAIL'} {name} {value:.3e} (tol {tol:.0e})")
    print(f"{len(rows) - len(failed)}/{len(rows)} checks passed")
    return 1 if failed else 0


def cmd_flow(args, s):
    rec = s.build_record()
    rec.save(args.out)
    report = class_membership_report(rec, bounds_or_inf(s))
    _write_json(os.path.join(args.out, "class_report.json"), report)
    return 0


def cmd_masses(args, s):
    rec = s.build_record()
    os.makedirs(args.out, exist_ok=True)
    v = s.mass_variant
    masses.geroch_diagnostics(rec, v).to_csv(os.path.join(args.out, "geroch.csv"))
    masses.corollary_integral_table(rec, v).to_csv(os.path.join(args.out, "leaf_integrals.csv"))
    masses.mass_bracket(rec, v).to_csv(os.path.join(args.out, "mass_bracket.csv"))
    masses.second_ff_gradient_decay(rec).to_csv(os.path.join(args.out, "second_ff_gradient.csv"))
    for tag, table in masses.average_evolution_residuals(rec, v).items():
        table.to_csv(os.path.join(args.out, f"{tag}.csv"))
    sw = chain.metric_sandwich_margin(rec)
    summary = {
        "ricci_margins": masses.ricci_inequality_margin(rec),
        "sandwich": vars(sw),
        "metric_evolution": chain.metric_evolution_residual(rec),
        "mass_initial": masses.hawking_mass(rec.states[0], v),
        "mass_final": masses.hawking_mass(rec.states[-1], v),
    }
    _write_json(os.path.join(args.out, "summary.json"), summary)
    return 0


def cmd_chain(args, s):
    rec = s.build_record()
    os.makedirs(args.out, exist_ok=True)
    base = "0" if s.g3_base_slice == "zero" else "T"
    rep = chain.chain_report(rec, s.case, s.m, args.mode or s.derivative_mode, base)
    rep.metadata["warnings"] = list(s.warnings)
    rep.to_json(os.path.join(args.out, "chain_report.json"))
    rep.to_csv(os.path.join(args.out, "chain_links.csv"))
    return 0


def cmd_study(args, text):
    values, scenarios = parse_family(text)
    if args.refine:
        scenarios = [s.refined(args.refine) for s in scenarios]
    members = [(v, s.build_record()) for v, s in zip(values, scenarios)]
    s0 = scenarios[0]
    rep = chain.convergence_study(members, s0.case, s0.m, args.mode or s0.derivative_mode,
                                  variant=s0.mass_variant)
    os.makedirs(args.out, exist_ok=True)
    rep.to_json(os.path.join(args.out, "study_report.json"))
    rep.to_csv(os.path.join(args.out, "study.csv"))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="imcf-lab", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=["verify", "flow", "masses", "chain", "study"])
    p.add_argument("--config", help="scenario JSON (family JSON for study)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--mode", choices=list(chain.MODES))
    p.add_argument("--refine", type=int, default=0, help="multiply N_theta and N_t by 2**K")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        text = None
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        if args.command == "study":
            if text is None:
                raise ParseError("study needs --config")
            return cmd_study(args, text)
        scenario = parse_scenario(text) if text is not None else None
        if scenario is not None and args.refine:
            scenario = scenario.refined(args.refine)
        if args.command == "verify":
            return cmd_verify(args, scenario)
        if scenario is None:
            raise ParseError(f"{args.command} needs --config")
        handler = {"flow": cmd_flow, "masses": cmd_masses, "chain": cmd_chain}[args.command]
        return handler(args, scenario)
    except FLOW_ERRORS as exc:
        print(f"flow breakdown: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except INPUT_ERRORS as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
