"""ucslab command line: verify, smooth, kkt and symbolic subcommands.

Exit codes: 0 success, 1 property violation, 2 usage or input error,
3 cap refusal, 4 the family consisting only of the empty set.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import family as fam
from .halfspace import HalfspaceError, HalfspaceSystem, synthesize_halfspaces
from .io import InputError, dump, family_from_json, family_to_json, system_from_json

log = logging.getLogger("ucslab")

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_CAP, EXIT_EXCLUDED = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)

    def canonical(self) -> str:
        return json.dumps({"command": self.command, "options": self.options}, sort_keys=True)

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:12]

    def to_dict(self) -> dict:
        return {"command": self.command, "options": self.options, "hash": self.digest()}


# --- argument parsing helpers ----------------------------------------------

def int_range(text: str) -> list[int]:
    """'5', '4-6' or '1,3,4' (non-negative integers)."""
    out: list[int] = []
    try:
        for part in text.split(","):
            lo, _, hi = part.strip().partition("-")
            out.extend(range(int(lo), int(hi or lo) + 1))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer range {text!r}") from exc
    if not out:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return out


def rational_list(text: str) -> list[Fraction]:
    try:
        return [Fraction(p.strip()) for p in text.split(",") if p.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational list {text!r}") from exc


def float_list(text: str) -> list[float]:
    try:
        vals = [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from exc
    if not vals or any(not v > 0 for v in vals):
        raise argparse.ArgumentTypeError("sigma values must be positive")
    return vals


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_config(out: Path, cfg: RunConfig, stem: str) -> None:
    dump(cfg.to_dict(), out / f"{stem}.config.json")


def _load_system(args) -> tuple[HalfspaceSystem, fam.SetFamily]:
    if args.system:
        system = system_from_json(args.system)
        return system, system.family()
    if args.family:
        family = family_from_json(args.family)
        try:
            return synthesize_halfspaces(family), family
        except HalfspaceError as exc:
            raise InputError(str(exc)) from exc
    raise UsageError("one of --family or --system is required")


def _str_options(args, keys) -> dict:
    out = {"seed": getattr(args, "seed", 0)}
    for k in keys:
        v = getattr(args, k, None)
        if isinstance(v, list):
            v = [str(x) for x in v]
        elif isinstance(v, Fraction):
            v = str(v)
        out[k] = v
    return out


# --- verify -----------------------------------------------------------------

def cmd_verify(args) -> int:
    cfg = RunConfig("verify", _str_options(args, ["family", "enumerate", "final_step"]))
    if args.final_step is not None:
        report = fam.verify_final_inequality(args.final_step)
        summary = {"final_step": report.to_dict(), "ok": report.ok}
        _emit(args, cfg, summary)
        print(f"final-step n<={args.final_step}: checked {report.checked}, "
              f"violations {len(report.violations)}")
        return EXIT_OK if report.ok else EXIT_VIOLATION
    if args.enumerate is not None:
        families = fam.enumerate_union_closed(args.enumerate)
        checked = 0
        for f in families:
            if len(f) == 0 or f.is_empty_set_only:
                continue
            checked += 1
            rep = fam.frankl_check(f)
            if not rep.holds:
                _emit(args, cfg, {"checked": checked, "counterwitness": family_to_json(f),
                                  "report": rep.to_dict()})
                print(f"violation: {json.dumps(family_to_json(f))}")
                return EXIT_VIOLATION
        _emit(args, cfg, {"checked": checked, "counterwitness": None, "n": args.enumerate})
        print(f"n={args.enumerate}: {checked} union-closed families checked, no violation")
        return EXIT_OK
    if args.family:
        f = family_from_json(args.family)
        closed, witness = fam.is_union_closed(f)
        rep = fam.frankl_check(f)
        doc = {"family": family_to_json(f), "union_closed": closed,
               "witness": None if witness is None else [fam.mask_elements(m) for m in witness],
               "report": rep.to_dict()}
        _emit(args, cfg, doc)
        print(json.dumps(rep.to_dict(), sort_keys=True))
        if rep.excluded_case:
            print("excluded case: the family {∅} is outside the conjecture's scope", file=sys.stderr)
            return EXIT_EXCLUDED
        if not closed:
            print("note: family is not union-closed; the check is informational", file=sys.stderr)
        return EXIT_OK if rep.holds or not closed else EXIT_VIOLATION
    raise UsageError("verify needs --family, --enumerate or --final-step")


def _emit(args, cfg: RunConfig, doc: dict) -> None:
    if not args.out:
        return
    out = _out_dir(args)
    stem = f"{cfg.command}-{cfg.digest()}"
    dump(doc, out / f"{stem}.json")
    _write_config(out, cfg, stem)


# --- smooth -----------------------------------------------------------------

SWEEP_FIELDS = ["quantity", "sigma", "value", "reference", "abs_err"]


def _params(args, sigma: float):
    from .smoothed import SmoothingParams
    return SmoothingParams(sigma=sigma, S_const=args.S_const, gamma=args.gamma, l_shift=args.l_shift)


def _sigmas(args, system) -> list[float]:
    from .smoothed import sigma_for
    if args.sigma_schedule:
        return sorted(args.sigma_schedule, reverse=True)
    return [sigma_for(system, k) for k in (5, 10, 25)]


def sweep_rows(system: HalfspaceSystem, family: fam.SetFamily, sigmas, args) -> list[dict]:
    from .smoothed import count_approx, l_eval, limit_references, r_eval, s_eval
    ref = limit_references(system)
    closed, _ = fam.is_union_closed(system.family())
    closure_sys = None
    if not closed:
        closure_sys = synthesize_halfspaces(fam.union_closure(system.family()))
    rows = []

    def add(q, s, v, r):
        rows.append({"quantity": q, "sigma": repr(s), "value": repr(v),
                     "reference": "" if r is None else repr(float(r)),
                     "abs_err": "" if r is None else repr(abs(v - r))})

    for s in sigmas:
        prm = _params(args, s)
        add("count", s, count_approx(system, s), ref.size)
        add("r", s, r_eval(system, prm).value, ref.r_limit)
        add("s", s, s_eval(system, prm).value, ref.s_limit)
        add("l", s, l_eval(system, prm).value, 0 if closed else None)
        if closure_sys is not None:
            add("l_closure", s, l_eval(closure_sys, prm).value, 0)
    return rows


def cmd_smooth(args) -> int:
    system, family = _load_system(args)
    sigmas = _sigmas(args, system)
    cfg = RunConfig("smooth", {**_str_options(args, ["family", "system", "S_const", "gamma", "l_shift"]),
                               "sigmas": [repr(s) for s in sigmas]})
    rows = sweep_rows(system, family, sigmas, args)
    out = _out_dir(args)
    stem = f"smooth-{cfg.digest()}"
    with open(out / f"{stem}.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SWEEP_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    from .plotting import sweep_figure
    sweep_figure(rows, out / f"{stem}.png")
    _write_config(out, cfg, stem)
    print(out / f"{stem}.csv")
    return EXIT_OK


# --- kkt --------------------------------------------------------------------

def cmd_kkt(args) -> int:
    from .smoothed import kkt_residual, sigma_for
    system, _ = _load_system(args)
    sigmas = sorted(args.sigma_schedule, reverse=True) if args.sigma_schedule else [sigma_for(system, 25)]
    cfg = RunConfig("kkt", {**_str_options(args, ["family", "system", "lam", "projected",
                                                  "S_const", "gamma", "l_shift"]),
                            "sigmas": [repr(s) for s in sigmas]})
    results = []
    for s in sigmas:
        res = kkt_residual(system, _params(args, s), args.lam, projected=args.projected)
        results.append({"sigma": s, **res.to_dict()})
    out = _out_dir(args)
    stem = f"kkt-{cfg.digest()}"
    dump({"results": results}, out / f"{stem}.json")
    _write_config(out, cfg, stem)
    for r in results:
        print(f"sigma={r['sigma']:.6g} max|residual|={r['max_abs']:.3e}")
    return EXIT_OK


# --- symbolic ---------------------------------------------------------------

def cmd_symbolic(args) -> int:
    from .symbolic.appendix import AUDIT_RANGE, appendix_audit
    from .symbolic.pipeline import (SCAN_CAP, build_reduced_system, eliminate_and_resultant,
                                    lambda_zero_system, scan_resultants)
    if not (args.audit or args.scan or args.reduced or args.lambda_zero):
        raise UsageError("choose at least one of --audit, --scan, --reduced, --lambda-zero")
    ns = args.n or [5]
    if max(ns) > SCAN_CAP:
        raise fam.CapExceeded(f"symbolic runs are capped at n={SCAN_CAP}")
    if min(ns) < AUDIT_RANGE[0]:
        raise UsageError(f"symbolic runs need n >= {AUDIT_RANGE[0]}")
    cs = args.C or [Fraction(1)]
    cfg = RunConfig("symbolic", _str_options(
        args, ["audit", "scan", "reduced", "lambda_zero", "n", "C", "a_range", "delta_probes",
               "pivot", "exponent", "reading"]))
    out = _out_dir(args)
    h = cfg.digest()
    written = []

    def a_values(n):
        return [a for a in (args.a_range or range(1, n - 1)) if 0 <= a <= n - 2]

    if args.audit:
        for n in ns:
            rep = appendix_audit(n, args.exponent)
            p = out / f"audit-n{n}-{h}.json"
            dump(rep, p)
            written.append(p)
            flags = ", ".join(rep["unbound_symbols"]) or "none"
            print(f"audit n={n}: divisible={rep['all_divisible']} unbound symbols: {flags}")
    if args.reduced:
        cells = []
        for n in ns:
            for C in cs:
                for a in a_values(n) if args.a_range else range(0, n - 1):
                    system = build_reduced_system(n, a, C, args.exponent)
                    res = eliminate_and_resultant(system, args.pivot)
                    cells.append({"equations": {k: v.to_json() for k, v in system.equations.items()},
                                  "equation_degrees": system.degrees(), **res.to_dict()})
                    print(f"reduced n={n} C={C} a={a}: {res.status} degrees={res.degrees}")
        p = out / f"reduced-{h}.json"
        dump({"cells": cells}, p)
        written.append(p)
    if args.lambda_zero:
        cells = []
        for n in ns:
            for C in cs:
                for a in a_values(n):
                    for reading in ([args.reading] if args.reading else ["m12", "m123"]):
                        r = lambda_zero_system(n, a, C, reading, args.exponent)
                        cells.append(r.to_dict())
                        print(f"lambda0 n={n} C={C} a={a} {reading}: {r.status} "
                              f"residual degrees={r.residual_degrees}")
        p = out / f"lambda0-{h}.json"
        dump({"cells": cells}, p)
        written.append(p)
    if args.scan:
        report = scan_resultants(ns, cs, args.a_range, args.delta_probes, args.pivot, args.exponent)
        rows = report.to_rows()
        p = out / f"scan-{h}.csv"
        with open(p, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]) if rows else ["n"], lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        dump(report.to_dict(), out / f"scan-{h}.json")
        from .plotting import scan_figure
        scan_figure(report, out / f"scan-{h}.png")
        written.append(p)
        for row in rows:
            print(f"scan n={row['n']} C={row['C']} a={row['a']}: degree_in_delta={row['degree_in_delta']} "
                  f"is_zero={row['is_zero']}")
        for (n, C), star in sorted(report.delta_star.items()):
            print(f"delta* for n={n} C={C}: {star['delta']}")
        if report.zero_cells():
            print("identically-zero resultant cells found", file=sys.stderr)
    _write_config(out, cfg, f"symbolic-{h}")
    return EXIT_OK


# --- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ucslab", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter,
                                epilog="UCSLAB_THREADS sets the worker count for --enumerate.")
    p.add_argument("--log-level", default="WARNING")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_default="reports"):
        sp.add_argument("--out", default=out_default, help="report directory")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized steps (recorded)")

    v = sub.add_parser("verify", help="conjecture predicate on a family, an enumeration or the threshold endgame")
    v.add_argument("--family", help="family JSON")
    v.add_argument("--enumerate", type=int, metavar="N", help=f"all union-closed families on [N], N <= {fam.ENUMERATION_CAP}")
    v.add_argument("--final-step", type=int, metavar="N", help=f"threshold families up to N <= {fam.FINAL_STEP_CAP}")
    common(v, out_default=None)

    def smoothing(sp):
        sp.add_argument("--family", help="family JSON (a system is synthesized)")
        sp.add_argument("--system", help="halfspace system JSON")
        sp.add_argument("--sigma-schedule", type=float_list, help="comma-separated sigmas")
        sp.add_argument("--S-const", dest="S_const", type=float, default=10.0)
        sp.add_argument("--gamma", type=float, default=1.0)
        sp.add_argument("--l-shift", dest="l_shift", type=float, default=5.0)
        common(sp)

    s = sub.add_parser("smooth", help="sigma sweep of the smoothed functionals")
    smoothing(s)
    k = sub.add_parser("kkt", help="stationarity residuals on the (alpha, beta, p, d, j) grid")
    smoothing(k)
    k.add_argument("--lambda", dest="lam", type=float, default=1.0)
    k.add_argument("--projected", action="store_true", help="use the row-sum preserving direction e_j - e_n")

    y = sub.add_parser("symbolic", help="exact audit, reduced systems and resultant scans")
    y.add_argument("--audit", action="store_true")
    y.add_argument("--scan", action="store_true")
    y.add_argument("--reduced", action="store_true")
    y.add_argument("--lambda-zero", action="store_true")
    y.add_argument("--n", type=int_range, help="n or a range like 5-6")
    y.add_argument("--C", type=rational_list, help="comma-separated rationals")
    y.add_argument("--a-range", type=int_range, help="a values, default 1..n-2")
    y.add_argument("--delta-probes", type=rational_list,
                   default=[Fraction(1, 2), Fraction(1, 3), Fraction(1, 7), Fraction(-1, 5), Fraction(2)])
    y.add_argument("--pivot", choices=["constraint", "cross"], default="constraint")
    y.add_argument("--exponent", choices=["gaussian", "affine"], default="gaussian")
    y.add_argument("--reading", choices=["m12", "m123"], help="lambda-zero moment orders (default both)")
    common(y)
    return p


HANDLERS = {"verify": cmd_verify, "smooth": cmd_smooth, "kkt": cmd_kkt, "symbolic": cmd_symbolic}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING))
    try:
        return HANDLERS[args.command](args)
    except fam.CapExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HalfspaceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
