"""Reduced stationarity system under the two-value ansatz, elimination and scans."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ..family import CapExceeded
from .expsum import exp_moment
from .poly import InexactDivision, MultiPoly, NonAffinePivot, as_number
from .resultant import (RootInterval, ZeroPolynomialError, isolate_real_roots, poly_eval,
                        resultant, to_fraction_list)
from .tilde import ExponentMap, ansatz_substitution, build_tilde

SCAN_CAP = 8
EQUATIONS = ("moment1", "moment2", "cross", "row_sum")
# which equation supplies w1: "constraint" uses row_sum, "cross" tries cross first
PIVOTS = ("constraint", "cross")
LAMBDA_ZERO_READINGS = {"m12": (1, 2), "m123": (1, 2, 3)}


class PipelineError(ArithmeticError):
    """A pipeline step failed; ``poly`` is the offending polynomial."""

    def __init__(self, step: str, message: str, poly: MultiPoly | None = None):
        super().__init__(f"{step}: {message}")
        self.step = step
        self.poly = poly


def _c_poly(C_val) -> MultiPoly:
    return MultiPoly.var("C") if C_val is None else MultiPoly.const(as_number(Fraction(C_val)))


def _wn(n: int) -> str:
    return f"w{n}"


@dataclass
class ReducedSystem:
    n: int
    a: int
    C_val: Fraction | None
    equations: dict[str, MultiPoly]
    exponent: str = "gaussian"

    @property
    def factor(self) -> MultiPoly:
        return MultiPoly.var(_wn(self.n)) - MultiPoly.var("w2")

    def degrees(self) -> dict[str, dict[str, int]]:
        names = ("w1", "w2", _wn(self.n), "delta")
        return {k: {v: e.degree(v) for v in names} for k, e in self.equations.items()}

    def is_collapsed(self) -> bool:
        return all(self.equations[k].is_zero() for k in ("moment1", "moment2", "cross"))


def tilde_moments(n: int, a: int | None, exponent: str = "gaussian") -> dict[str, MultiPoly]:
    """Exp and Exp^2 of R~_1, R~_2, (S~+L~)_1, (S~+L~)_2, optionally under the ansatz."""
    sub = ansatz_substitution(n, a) if a is not None else None
    emap = ExponentMap(n, exponent, sub)
    r1, r2 = (build_tilde("R", j, n, exponents=emap) for j in (1, 2))
    sl1 = build_tilde("S", 1, n, exponents=emap) + build_tilde("L", 1, n, exponents=emap)
    sl2 = build_tilde("S", 2, n, exponents=emap) + build_tilde("L", 2, n, exponents=emap)
    return {
        "E1_R1": exp_moment(r1, 1), "E1_R2": exp_moment(r2, 1),
        "E2_R2": exp_moment(r2, 2),
        "E1_SL1": exp_moment(sl1, 1), "E1_SL2": exp_moment(sl2, 1),
        "E2_SL2": exp_moment(sl2, 2),
        "N_R1": MultiPoly.const(r1.N), "N_SL1": MultiPoly.const(sl1.N),
    }


def build_reduced_system(n: int, a: int, C_val=1, exponent: str = "gaussian") -> ReducedSystem:
    """Four relations in w1, w2, wn, delta (each stored as lhs - rhs)."""
    if n < 4:
        raise ValueError(f"n must be at least 4, got {n}")
    if not 0 <= a <= n - 2:
        raise ValueError(f"a={a} outside [0, {n - 2}]")
    mo = tilde_moments(n, a, exponent)
    half_n = Fraction(n, 2)
    eqs = {
        "moment1": mo["E1_R2"].scale(half_n) - mo["E1_SL2"],
        "moment2": mo["E2_R2"].scale(half_n) - mo["E2_SL2"],
        "cross": mo["E1_R2"] * mo["E1_SL1"] - mo["E1_R1"] * mo["E1_SL2"],
        "row_sum": MultiPoly.linear({"w1": 1, "w2": a, _wn(n): n - 1 - a}) - _c_poly(C_val),
    }
    c = None if C_val is None else Fraction(C_val)
    return ReducedSystem(n, a, c, eqs, exponent)


@dataclass
class EliminationResult:
    n: int
    a: int
    C_val: Fraction | None
    pivot: str
    status: str                      # "ok", "collapsed" or "error"
    f: MultiPoly | None = None
    g: MultiPoly | None = None
    w1_expr: MultiPoly | None = None
    wn_expr: MultiPoly | None = None
    resultant: MultiPoly | None = None
    error: str | None = None
    error_step: str | None = None
    error_poly: MultiPoly | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def degrees(self) -> tuple[int, int] | None:
        if self.f is None or self.g is None:
            return None
        return self.f.degree("w2"), self.g.degree("w2")

    @property
    def resultant_is_zero(self) -> bool | None:
        return None if self.resultant is None else self.resultant.is_zero()

    def to_dict(self) -> dict:
        def pj(p):
            return None if p is None else p.to_json()
        return {
            "n": self.n, "a": self.a,
            "C": None if self.C_val is None else str(self.C_val),
            "pivot": self.pivot, "status": self.status,
            "degrees_in_w2": None if self.degrees is None else list(self.degrees),
            "f": pj(self.f), "g": pj(self.g),
            "w1": pj(self.w1_expr), "wn": pj(self.wn_expr),
            "resultant": pj(self.resultant),
            "resultant_is_zero": self.resultant_is_zero,
            "error": self.error, "error_step": self.error_step,
            "error_poly": pj(self.error_poly),
            "notes": list(self.notes),
        }


def _divide_factor(p: MultiPoly, factor: MultiPoly, label: str) -> MultiPoly:
    try:
        return p.div_exact(factor)
    except InexactDivision as exc:
        raise PipelineError(f"remove factor from {label}", str(exc), exc.remainder) from exc


def _solve(p: MultiPoly, v: str, label: str) -> MultiPoly:
    try:
        return p.affine_solve(v)
    except NonAffinePivot as exc:
        raise PipelineError(f"solve {label} for {v}", exc.reason, p) from exc


def eliminate_and_resultant(system: ReducedSystem, pivot: str = "constraint") -> EliminationResult:
    """Eliminate w1 and wn, strip (wn - w2), and take the resultant in w2.

    ``pivot="constraint"`` takes w1 from row_sum; ``pivot="cross"`` takes it
    from cross, which fails when cross is not affine in w1. Failures are returned as ``status="error"`` with the
    offending polynomial attached.
    """
    if pivot not in PIVOTS:
        raise ValueError(f"pivot must be one of {PIVOTS}")
    n, wn = system.n, _wn(system.n)
    eq = system.equations
    out = EliminationResult(n, system.a, system.C_val, pivot, "ok")
    if system.is_collapsed():
        out.status = "collapsed"
        out.notes.append("moment1, moment2, cross vanish identically under the ansatz")
        return out
    factor = system.factor
    try:
        if pivot == "constraint":
            w1 = _solve(eq["row_sum"], "w1", "row_sum")
            rest = {k: eq[k] for k in ("moment1", "moment2", "cross")}
        else:
            w1 = _solve(eq["cross"], "w1", "cross")
            rest = {k: eq[k] for k in ("moment1", "moment2", "row_sum")}
        out.w1_expr = w1
        rest = {k: p.substitute({"w1": w1}) for k, p in rest.items()}
        if pivot == "constraint":
            reduced = {k: _divide_factor(p, factor, k) for k, p in rest.items()}
            wn_expr = _solve(reduced["moment1"], wn, "moment1 / (wn - w2)")
            f = reduced["moment2"].substitute({wn: wn_expr})
            g = reduced["cross"].substitute({wn: wn_expr})
        else:
            reduced = {k: _divide_factor(p, factor, k) for k, p in rest.items() if k != "row_sum"}
            wn_expr = _solve(reduced["moment1"], wn, "moment1 / (wn - w2)")
            f = reduced["moment2"].substitute({wn: wn_expr})
            g = rest["row_sum"].substitute({wn: wn_expr})
        out.wn_expr = wn_expr
        out.f, out.g = f, g
        out.resultant = resultant(f, g, "w2")
    except PipelineError as exc:
        out.status = "error"
        out.error, out.error_step, out.error_poly = str(exc), exc.step, exc.poly
        return out
    except ZeroPolynomialError as exc:
        out.status = "error"
        out.error, out.error_step = str(exc), "resultant"
        return out
    if out.degrees != (3, 3):
        out.notes.append(f"post-elimination degrees in w2 are {out.degrees}, not (3, 3)")
    if out.resultant.is_zero():
        out.notes.append("resultant vanishes identically")
    return out


@dataclass
class LambdaZeroResult:
    n: int
    a: int
    C_val: Fraction | None
    reading: str
    orders: tuple[int, ...]
    collapsed_zero: dict[int, bool]
    quotients: dict[int, MultiPoly]
    linear_solution: dict[str, MultiPoly]
    residuals: dict[int, MultiPoly]
    resultant: MultiPoly | None
    status: str
    notes: list[str] = field(default_factory=list)

    @property
    def residual_degrees(self) -> dict[int, int]:
        return {m: p.degree("w2") for m, p in self.residuals.items()}

    def to_dict(self) -> dict:
        return {
            "n": self.n, "a": self.a,
            "C": None if self.C_val is None else str(self.C_val),
            "reading": self.reading, "orders": list(self.orders),
            "collapsed_point_annihilates": {str(m): v for m, v in self.collapsed_zero.items()},
            "quotients": {str(m): p.to_json() for m, p in self.quotients.items()},
            "quotient_degrees_in_w2": {str(m): p.degree("w2") for m, p in self.quotients.items()},
            "linear_solution": {k: p.to_json() for k, p in self.linear_solution.items()},
            "residual_degrees_in_w2": {str(m): d for m, d in self.residual_degrees.items()},
            "residuals": {str(m): p.to_json() for m, p in self.residuals.items()},
            "resultant": None if self.resultant is None else self.resultant.to_json(),
            "resultant_is_zero": None if self.resultant is None else self.resultant.is_zero(),
            "status": self.status,
            "notes": list(self.notes),
        }


def lambda_zero_system(n: int, a: int, C_val=1, reading: str = "m123",
                       exponent: str = "gaussian") -> LambdaZeroResult:
    """Branch where only the R~ moments must vanish.

    The m=1 quotient (after removing wn - w2) is linear and fixes one of w1,
    wn; the row-sum constraint fixes the other. The remaining quotients are
    the residual polynomials in w2. ``reading`` selects the moment orders.
    """
    if reading not in LAMBDA_ZERO_READINGS:
        raise ValueError(f"reading must be one of {sorted(LAMBDA_ZERO_READINGS)}")
    if n < 4 or not 1 <= a <= n - 2:
        raise ValueError(f"need n >= 4 and 1 <= a <= n-2, got n={n}, a={a}")
    orders = LAMBDA_ZERO_READINGS[reading]
    wn = _wn(n)
    emap = ExponentMap(n, exponent, ansatz_substitution(n, a))
    r2 = build_tilde("R", 2, n, exponents=emap)
    factor = MultiPoly.var(wn) - MultiPoly.var("w2")
    moments = {m: exp_moment(r2, m) for m in orders}
    collapsed = {m: p.substitute({"w2": MultiPoly.var(wn)}).is_zero() for m, p in moments.items()}
    quotients = {m: p.div_exact(factor) for m, p in moments.items()}
    notes = []
    lin = quotients[1]
    constraint = MultiPoly.linear({"w1": 1, "w2": a, wn: n - 1 - a}) - _c_poly(C_val)
    solution: dict[str, MultiPoly] = {}
    first = "w1" if lin.degree("w1") == 1 and lin.coeffs_in("w1")[1].is_constant() else wn
    solution[first] = lin.affine_solve(first)
    second = wn if first == "w1" else "w1"
    solution[second] = constraint.substitute(solution).affine_solve(second)
    solution[first] = solution[first].substitute({second: solution[second]})
    notes.append(f"m=1 quotient fixes {first}: {first} = {solution[first]}")
    residuals = {m: quotients[m].substitute(solution) for m in orders if m != 1}
    res = None
    status = "ok"
    if len(residuals) < 2:
        status = "single-residual"
        notes.append("one residual polynomial only; no resultant is formed")
    elif any(p.is_zero() for p in residuals.values()):
        status = "degenerate"
        res = MultiPoly.zero()
        notes.append("a residual vanishes identically, so every w2 solves it")
    else:
        res = resultant(*residuals.values(), "w2")
        if res.is_zero():
            notes.append("resultant vanishes identically")
    return LambdaZeroResult(n, a, None if C_val is None else Fraction(C_val), reading, orders,
                            collapsed, quotients, solution, residuals, res, status, notes)


@dataclass
class ScanCell:
    n: int
    C_val: Fraction
    a: int
    result: EliminationResult
    roots: list[RootInterval]

    @property
    def poly(self) -> MultiPoly | None:
        return self.result.resultant

    @property
    def is_zero(self) -> bool | None:
        return self.result.resultant_is_zero

    @property
    def degree_in_delta(self) -> int | None:
        return None if self.poly is None else self.poly.degree("delta")


@dataclass
class ResultantScanReport:
    cells: list[ScanCell]
    delta_star: dict[tuple[int, str], dict]

    def zero_cells(self) -> list[ScanCell]:
        return [c for c in self.cells if c.is_zero]

    def to_rows(self) -> list[dict]:
        rows = []
        for c in self.cells:
            rows.append({
                "n": c.n, "C": str(c.C_val), "a": c.a,
                "status": c.result.status,
                "degrees_in_w2": "" if c.result.degrees is None else "{} {}".format(*c.result.degrees),
                "degree_in_delta": "" if c.degree_in_delta is None else c.degree_in_delta,
                "is_zero": "" if c.is_zero is None else str(c.is_zero).lower(),
                "root_intervals": ";".join(f"[{r.lo},{r.hi}]" for r in c.roots),
            })
        return rows

    def to_dict(self) -> dict:
        return {
            "cells": [dict(row, resultant=None if c.poly is None else c.poly.to_json(),
                           notes=c.result.notes, error=c.result.error)
                      for row, c in zip(self.to_rows(), self.cells)],
            "delta_star": [dict(v, n=k[0], C=k[1]) for k, v in sorted(self.delta_star.items())],
            "zero_cells": [{"n": c.n, "C": str(c.C_val), "a": c.a} for c in self.zero_cells()],
        }


DEFAULT_PROBES = (Fraction(1, 2), Fraction(1, 3), Fraction(1, 7), Fraction(-1, 5), Fraction(2))


def _univariate_delta(p: MultiPoly) -> list[Fraction]:
    return to_fraction_list(p, "delta") if p.free_vars() else [Fraction(p.constant_value())]


def certify_delta(polys: Sequence[MultiPoly], probes: Iterable = DEFAULT_PROBES) -> dict:
    """First rational delta at which every polynomial is nonzero (exact evaluation)."""
    if any(p.is_zero() for p in polys):
        return {"delta": None, "source": None, "reason": "a cell polynomial is identically zero"}
    coeffs = [_univariate_delta(p) for p in polys]
    for t in probes:
        t = Fraction(t)
        if all(poly_eval(c, t) != 0 for c in coeffs):
            return {"delta": str(t), "source": "probe", "reason": None}
    k = 1
    while True:
        # finitely many roots, so this terminates
        t = Fraction(k, 1009)
        if all(poly_eval(c, t) != 0 for c in coeffs):
            return {"delta": str(t), "source": "search", "reason": None}
        k += 1


def scan_resultants(n_range: Iterable[int], C_vals: Iterable, a_range: Iterable[int] | None = None,
                    delta_probes: Iterable = DEFAULT_PROBES, pivot: str = "constraint",
                    exponent: str = "gaussian", width: Fraction = Fraction(1, 2**20)
                    ) -> ResultantScanReport:
    """Resultant in delta for every (n, C, a) cell, root isolation and a common delta*.

    ``a_range=None`` means a = 1 .. n-2 for each n.
    """
    probes = [Fraction(p) for p in delta_probes]
    cells = []
    stars = {}
    for n in n_range:
        if n > SCAN_CAP:
            raise CapExceeded(f"resultant scans are capped at n={SCAN_CAP}")
        for C in C_vals:
            C = Fraction(C)
            group = []
            for a in (range(1, n - 1) if a_range is None else a_range):
                if not 0 <= a <= n - 2:
                    continue
                res = eliminate_and_resultant(build_reduced_system(n, a, C, exponent), pivot)
                roots = []
                if res.resultant is not None and not res.resultant.is_zero():
                    roots = isolate_real_roots(_univariate_delta(res.resultant), width)
                cell = ScanCell(n, C, a, res, roots)
                cells.append(cell)
                group.append(cell)
            polys = [c.poly for c in group if c.poly is not None]
            if len(polys) != len(group):
                star = {"delta": None, "source": None,
                        "reason": "some cells have no resultant (see status)"}
                usable = certify_delta(polys, probes) if polys and all(not p.is_zero() for p in polys) else None
                if usable:
                    star["delta_for_available_cells"] = usable["delta"]
            else:
                star = certify_delta(polys, probes)
            stars[(n, str(C))] = star
    return ResultantScanReport(cells, stars)
