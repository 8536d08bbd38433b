"""Audit of reference closed forms for Exp(R~_2), Exp(S~_2), Exp(L~_2).

The enumerated moments are authoritative. Each reference form is encoded
symbol for symbol as a polynomial (with C replaced by w1 + ... + wn) and
compared term by term; symbols that are never bound are kept as extra variables and
reported.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .expsum import exp_moment
from .poly import MultiPoly, var_key
from .tilde import build_tilde, row_sum

AUDIT_RANGE = (4, 8)


def _w(k: int) -> MultiPoly:
    return MultiPoly.var(f"w{k}")


def _subsets(items: list[int]):
    for r in range(len(items) + 1):
        yield from combinations(items, r)


def _dot(xs) -> MultiPoly:
    return MultiPoly.linear({f"w{k}": 1 for k in xs}) if xs else MultiPoly.zero()


def _pair_sum(n: int, index: list[int], head_a: MultiPoly, head_b: MultiPoly) -> MultiPoly:
    """sum over x' in subsets(index) of (head_a + (w,x') - delta + head_b + (w,x') - delta)."""
    d = MultiPoly.var("delta")
    total = MultiPoly.zero()
    for xs in _subsets(index):
        t = _dot(xs) - d
        total = total + head_a + t + head_b + t
    return total


def reference_forms(n: int) -> dict[str, dict[str, MultiPoly]]:
    """Reference forms; "middle" is the summed form, "final" the simplified one."""
    C = row_sum(n)
    d = MultiPoly.var("delta")
    w1, w2, wn = _w(1), _w(2), _w(n)
    fac = wn - w2
    mid = list(range(3, n))
    mid1 = [1] + mid

    r_middle = fac * (_pair_sum(n, mid1, wn, w2) - _pair_sum(n, mid, w1 + wn, w1 + w2).scale(2))
    r_final = fac * ((w2 + wn - d.scale(2)) - w1.scale(4 * (2 ** (n - 3) - 1)))

    s_inner = MultiPoly.zero()
    for ell in mid:
        s_inner = s_inner + _pair_sum(n, [k for k in mid1 if k != ell], _w(ell) + wn, _w(ell) + w2)
    s_middle = fac * (s_inner + _pair_sum(n, mid1, wn, w2)
                      - _pair_sum(n, mid, w1 + wn, w1 + w2).scale(n - 1))
    a, b = MultiPoly.var("a"), MultiPoly.var("b")
    k = 2 ** (n - 3) * (3 * n - 1)
    s_final = fac * (
        w2 * (a.scale(k) + a.scale(2 * (n - 1)) - 2 ** (n - 1) + 3)
        + w2 * (b.scale(k) + b.scale(2 * (n - 1)) - 2 ** (n - 1) + 3)
        - (d * C).scale(4 * (2 ** (n - 4) - 1))
        - C.scale(2 ** (n - 3) * (3 * n - 1) + 2 * (n - 1))
    )

    l_final = fac * (
        (w2 + wn).scale(5 * 2 ** (2 * n - 5) + 2 ** n - 1)
        - d.scale(7 * 2 ** (2 * n - 3) + 3 * 2 ** n - 2)
        + C.scale(9 * 2 ** (2 * n - 5) + 2 ** (n - 1))
    )
    return {
        "R2": {"middle": r_middle, "final": r_final},
        "S2": {"middle": s_middle, "final": s_final},
        "L2": {"final": l_final},
    }


def _bound(name: str) -> bool:
    return name == "delta" or (name.startswith("w") and name[1:].isdigit())


def _solve_unbound(diff: MultiPoly, names: list[str]) -> dict | None:
    """Rational values of ``names`` making ``diff`` vanish identically.

    Only diffs affine in the unbound symbols (no products among them) are
    handled; otherwise None. An inconsistent system gives ``solution: None``.
    """
    parts = {}
    rest = diff
    for v in names:
        cs = rest.coeffs_in(v)
        if max(cs, default=0) > 1:
            return None
        parts[v] = cs.get(1, MultiPoly.zero())
        rest = cs.get(0, MultiPoly.zero())
    if any(set(p.free_vars()) & set(names) for p in parts.values()):
        return None
    # one linear equation per monomial of the bound variables
    allvars = tuple(sorted(set(rest.free_vars()).union(*(p.free_vars() for p in parts.values())),
                           key=var_key))
    lifted = [p.compact()._lift(allvars) for p in (*parts.values(), rest)]
    monos = sorted(set().union(*lifted))
    mat = [[Fraction(t.get(m, 0)) for t in lifted] for m in monos]
    k = len(names)
    pivots = []
    r0 = 0
    for col in range(k):
        piv = next((i for i in range(r0, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[r0], mat[piv] = mat[piv], mat[r0]
        p = mat[r0][col]
        mat[r0] = [x / p for x in mat[r0]]
        for i in range(len(mat)):
            if i != r0 and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r0])]
        pivots.append(col)
        r0 += 1
    if any(all(x == 0 for x in r[:k]) and r[k] != 0 for r in mat):
        return {"solution": None, "free": []}
    sol = {names[c]: str(-mat[i][k]) for i, c in enumerate(pivots)}
    return {"solution": sol, "free": [names[c] for c in range(k) if c not in pivots]}


def _compare(enumerated: MultiPoly, reference: MultiPoly) -> dict:
    diff = enumerated - reference
    unbound = sorted((v for v in reference.free_vars() if not _bound(v)), key=var_key)
    out = {
        "reference": str(reference),
        "reference_json": reference.to_json(),
        "unbound_symbols": unbound,
        "agrees": diff.is_zero(),
        "diff": str(diff),
        "diff_json": diff.to_json(),
        "diff_terms": len(diff.terms),
        "reference_degree": reference.degree(),
    }
    if unbound:
        out["unbound_solution"] = _solve_unbound(diff, unbound)
    return out


def appendix_audit(n: int, exponent: str = "gaussian") -> dict:
    """Enumerate the three moments, check divisibility and diff the reference forms.

    The L~_2 union sum is enumerated under both pair readings; "ordered" is
    the reading used everywhere else in the engine.
    """
    lo, hi = AUDIT_RANGE
    if not lo <= n <= hi:
        raise ValueError(f"appendix audit needs {lo} <= n <= {hi}, got {n}")
    fac = _w(n) - _w(2)
    forms = reference_forms(n)
    enumerated = {
        "R2": exp_moment(build_tilde("R", 2, n, exponent), 1),
        "S2": exp_moment(build_tilde("S", 2, n, exponent), 1),
        "L2": exp_moment(build_tilde("L", 2, n, exponent), 1),
        "L2_distinct": exp_moment(build_tilde("L", 2, n, exponent, pairs="distinct"), 1),
    }
    report: dict = {"n": n, "exponent": exponent, "factor": str(fac), "quantities": {}}
    for key, value in enumerated.items():
        q, r = value.divmod(fac)
        entry = {
            "enumerated": str(value),
            "enumerated_json": value.to_json(),
            "divisible": r.is_zero(),
            "quotient": str(q) if r.is_zero() else None,
            "comparisons": {},
        }
        for label, reference in forms[key.split("_")[0]].items():
            entry["comparisons"][label] = _compare(value, reference)
        report["quantities"][key] = entry
    report["all_divisible"] = all(e["divisible"] for e in report["quantities"].values())
    report["unbound_symbols"] = sorted(
        {s for e in report["quantities"].values() for c in e["comparisons"].values()
         for s in c["unbound_symbols"]}, key=var_key)
    return report
