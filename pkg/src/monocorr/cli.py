"""monocorr command line.

Exit codes: 0 when every asserted property holds, 1 when a property or a
pinned ratio fails (the report is still written), 2 on usage, parse or I/O
errors.  ``--config file.json`` supplies flag values (keys are flag names
with ``_`` or ``-``); explicit flags win over the config file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import campaigns, catalog, gauss, mc, reports
from .cube import FamilyDescriptor
from .errors import AuditError
from .quadrature import QuadratureConfig
from .stieltjes import MonotoneStep

COMMANDS = ("cube-audit", "gauss-grid", "gamma-min", "theorem3-audit", "mc-calibrate")


class UsageError(Exception):
    pass


def thread_cap() -> int:
    raw = os.environ.get("MONOCORR_THREADS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        raise UsageError(f"MONOCORR_THREADS must be an integer, got {raw!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", required=True, help="report path (.csv or .json)")
    p.add_argument("--pins", help="regression pins file; created (pin mode) when missing")
    p.add_argument("--abs-tol", type=float, default=1e-12)
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--max-subdiv", type=int, default=200)
    p.add_argument("--mc-seed", type=int, default=0)
    p.add_argument("--mc-samples", type=int, default=10**6)
    p.add_argument("--mc-streams", type=int, default=4)
    p.add_argument("--config", help="JSON file of flag values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monocorr", description="Audit correlation inequalities for monotone families.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cube-audit", help="exact audit of Boolean families")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--families", help="JSON list of family descriptors")
    src.add_argument("--catalog", choices=("harris", "balanced"), help="built-in catalog")
    _common(p)

    for name, helptext in (("gauss-grid", "Gamma and halfspace ratios on a grid"),
                           ("gamma-min", "minimum of Gamma over a grid")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--t-range", required=True, help="lo:hi:count")
        p.add_argument("--s-range", required=True, help="lo:hi:count")
        p.add_argument("--rho-range", required=True, help="lo:hi:count")
        _common(p)

    p = sub.add_parser("theorem3-audit", help="monotone step functions of correlated projections")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--instances", help="JSON list of {label, f, g, w, v}")
    src.add_argument("--random", type=int, metavar="N", help="N seeded random instances")
    p.add_argument("--seed", type=int, default=0, help="seed for --random")
    p.add_argument("--mc-check", action="store_true", help="also compare each covariance with Monte Carlo")
    _common(p)

    p = sub.add_parser("mc-calibrate", help="Monte-Carlo estimators against closed forms")
    _common(p)
    return parser


_RANGE_FLAGS = ("--t-range", "--s-range", "--rho-range")


def _glue_ranges(argv: Sequence[str]) -> list[str]:
    # "-8:8:65" looks like an option to argparse; bind it to its flag
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _RANGE_FLAGS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def _config_args(argv: Sequence[str]) -> list[str]:
    """Expand ``--config`` into flags placed before the explicit ones."""
    argv = _glue_ranges(argv)
    path = None
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif a.startswith("--config="):
            path = a.split("=", 1)[1]
    if path is None:
        return argv
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    cmd = cfg.pop("command", None)
    extra = []
    for key, val in cfg.items():
        flag = "--" + str(key).replace("_", "-")
        if isinstance(val, bool):
            if val:
                extra.append(flag)
        else:
            extra += [flag, str(val)]
    extra = _glue_ranges(extra)
    if argv and argv[0] in COMMANDS:
        return [argv[0]] + extra + argv[1:]
    if cmd is None:
        raise UsageError("no command given on the command line or in the config")
    return [cmd] + extra + argv


def _quad(args) -> QuadratureConfig:
    return QuadratureConfig(args.abs_tol, args.rel_tol, args.max_subdiv)


def _mc(args) -> mc.McConfig:
    return mc.McConfig(args.mc_samples, args.mc_seed, args.mc_streams)


def _load_json(path: str, what: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {what} {path}: {exc}") from None


def _pin_scope(args) -> str:
    """Pins are minima over one input set, so keys carry the command and its inputs."""
    if args.command == "cube-audit":
        src = args.catalog or os.path.basename(args.families)
    elif args.command in ("gauss-grid", "gamma-min"):
        src = f"{args.t_range},{args.s_range},{args.rho_range}"
    elif args.command == "theorem3-audit":
        src = f"random={args.random},seed={args.seed}" if args.random is not None else os.path.basename(args.instances)
    else:
        src = ""
    return f"{args.command}[{src}]"


def _pins(args, observed: dict) -> Optional[dict]:
    """Pinned values for this campaign with the scope prefix stripped; pin mode adds missing keys."""
    if not args.pins:
        return None
    scope = _pin_scope(args) + "/"
    stored = reports.update_pins(args.pins, {scope + k: v for k, v in observed.items()})
    return {k[len(scope):]: v for k, v in stored.items() if k.startswith(scope)}


def _fail(messages: Sequence[str]) -> None:
    for m in messages:
        print(f"monocorr: violation: {m}", file=sys.stderr)


def cmd_cube_audit(args) -> int:
    if args.catalog == "harris":
        descs = catalog.harris_catalog()
    elif args.catalog == "balanced":
        descs = catalog.balanced_catalog(range(4, 17))
    else:
        raw = _load_json(args.families, "families")
        if isinstance(raw, dict):
            raw = raw.get("families")
        if not isinstance(raw, list):
            raise UsageError(f"{args.families}: expected a list of descriptors")
        descs = [FamilyDescriptor.from_dict(d) for d in raw]
    run = campaigns.cube_campaign(descs)
    if not run.reports:
        raise UsageError("no increasing or balanced families to audit")
    pins = _pins(args, reports.observed_minima(run.reports))
    pins_ok = reports.write_report(run.reports, args.out, pins)
    _fail(run.violations)
    return 0 if run.ok and pins_ok else 1


def _grid(args):
    try:
        return (gauss.parse_axis(args.t_range), gauss.parse_axis(args.s_range), gauss.parse_axis(args.rho_range))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_gauss_grid(args) -> int:
    ts, ss, rhos = _grid(args)
    if any(not 0 <= r <= 1 for r in rhos):
        raise UsageError("correlations must lie in [0, 1]")
    rows = campaigns.grid_rows(ts, ss, rhos, _quad(args))
    gmin = min(r["gamma"] for r in rows)
    ratios = [r["ratio"] for r in rows if r["ratio"] is not None and math.isfinite(r["ratio"])]
    observed = {"gamma": gmin}
    if ratios:
        observed["ltf_pair"] = min(ratios)
    pins = _pins(args, observed)
    fields = list(reports.GRID_FIELDS)
    out_rows = []
    ok = True
    violations = []
    for r in rows:
        if not r["gamma"] > 0:
            violations.append(f"Gamma not positive at t={r['t']}, s={r['s']}, rho={r['rho']}")
        if r["cov"] < 0:
            violations.append(f"negative covariance at t={r['t']}, s={r['s']}, rho={r['rho']}")
        row = {k: reports.fmt(r[k]) for k in fields}
        if pins is not None:
            good = reports.passes(r["gamma"], pins.get("gamma")) and reports.passes(r["ratio"], pins.get("ltf_pair"))
            row["pass"] = "pass" if good else "fail"
            ok &= good
        out_rows.append(row)
    if pins is not None:
        fields.append("pass")
    if args.out.endswith(".json"):
        reports.write_json(out_rows, args.out)
    else:
        with reports._open_for_write(args.out) as fh:
            fh.write(reports.render_csv(out_rows, fields))
    _fail(violations)
    return 0 if ok and not violations else 1


def cmd_gamma_min(args) -> int:
    ts, ss, rhos = _grid(args)
    if any(not 0 <= r <= 1 for r in rhos):
        raise UsageError("correlations must lie in [0, 1]")
    res = gauss.gamma_grid_min(ts, ss, rhos, _quad(args))
    pins = _pins(args, {"gamma": res.min})
    out = {
        "min": res.min,
        "argmin": {"t": res.argmin.t, "s": res.argmin.s, "rho": res.argmin.rho},
        "points": res.points,
    }
    ok = res.min > 0
    if pins is not None:
        good = reports.passes(res.min, pins.get("gamma"))
        out["pass"] = good
        ok &= good
    reports.write_json(out, args.out)
    if res.min <= 0:
        _fail([f"Gamma minimum {res.min!r} is not positive"])
    return 0 if ok else 1


def _instances(args):
    if args.random is not None:
        if args.random < 1:
            raise UsageError("--random needs a positive count")
        return catalog.theorem3_instances(args.random, args.seed)
    raw = _load_json(args.instances, "instances")
    if not isinstance(raw, list):
        raise UsageError(f"{args.instances}: expected a list of instances")
    out = []
    for j, obj in enumerate(raw):
        try:
            label = str(obj.get("label", f"instance#{j}"))
            out.append((label, MonotoneStep.from_dict(obj["f"]), MonotoneStep.from_dict(obj["g"]),
                        np.asarray(obj["w"], dtype=float), np.asarray(obj["v"], dtype=float)))
        except (KeyError, TypeError, AttributeError, ValueError) as exc:
            if isinstance(exc, AuditError):
                raise
            raise UsageError(f"malformed instance #{j}: {exc}") from None
    return out


def cmd_theorem3_audit(args) -> int:
    insts = _instances(args)
    run = campaigns.theorem3_campaign(insts, _quad(args))
    if args.mc_check:
        cfg = _mc(args)
        workers = min(thread_cap(), cfg.streams)
        for rep, (label, f, g, _, _) in zip(run.reports, insts):
            est = mc.mc_general_cov(f, g, rep.metadata["rho"], cfg, workers)
            rep.metadata["mc_mean"] = est.mean
            rep.metadata["mc_se"] = est.std_error
            if not est.contains(rep.cov):
                run.violations.append(f"Monte Carlo disagrees with the atom sum for {label}")
    pins = _pins(args, reports.observed_minima(run.reports))
    extra = ("a_f", "a_g", "rho") + (("mc_mean", "mc_se") if args.mc_check else ())
    pins_ok = reports.write_report(run.reports, args.out, pins, extra)
    _fail(run.violations)
    return 0 if run.ok and pins_ok else 1


def cmd_mc_calibrate(args) -> int:
    cases = campaigns.calibration_cases(_mc(args))
    inside = sum(c.inside for c in cases)
    out = {
        "cases": [
            {"name": c.name, "exact": c.exact, "mean": c.estimate.mean,
             "std_error": c.estimate.std_error, "n": c.estimate.n, "inside": c.inside}
            for c in cases
        ],
        "inside": inside,
        "total": len(cases),
    }
    reports.write_json(out, args.out)
    if inside < 48:
        _fail([f"only {inside} of {len(cases)} estimates within 4 standard errors"])
        return 1
    return 0


_HANDLERS = {
    "cube-audit": cmd_cube_audit,
    "gauss-grid": cmd_gauss_grid,
    "gamma-min": cmd_gamma_min,
    "theorem3-audit": cmd_theorem3_audit,
    "mc-calibrate": cmd_mc_calibrate,
}


def execute(argv: Sequence[str]) -> int:
    try:
        args = build_parser().parse_args(_config_args(argv))
        thread_cap()
        return _HANDLERS[args.command](args)
    except SystemExit as exc:
        # argparse reports usage errors (and --help) through SystemExit
        return exc.code if isinstance(exc.code, int) else 2
    except (UsageError, AuditError, OSError) as exc:
        print(f"monocorr: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"monocorr: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(execute(sys.argv[1:]))
