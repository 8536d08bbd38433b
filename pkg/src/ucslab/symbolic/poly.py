"""Sparse multivariate polynomials with exact rational coefficients.

A ``MultiPoly`` maps exponent tuples to coefficients over an ordered tuple of
variable names. Coefficients are ``int`` when integral and ``Fraction``
otherwise. Instances are treated as immutable and are hashable, so they can
key dictionaries (the exponents of signed exponential sums do).
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]

_W = re.compile(r"^w(\d+)$")


class InexactDivision(ArithmeticError):
    """Division left a nonzero remainder; the remainder is attached."""

    def __init__(self, remainder: "MultiPoly", divisor: "MultiPoly"):
        super().__init__(f"{divisor} does not divide exactly; remainder {remainder}")
        self.remainder = remainder
        self.divisor = divisor


def var_key(name: str):
    """Canonical variable order: w1 < w2 < ... < delta < C < others."""
    m = _W.match(name)
    if m:
        return (0, int(m.group(1)), "")
    if name == "delta":
        return (1, 0, "")
    if name == "C":
        return (2, 0, "")
    return (3, 0, name)


def _norm(c) -> Number:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def as_number(x) -> Number:
    if isinstance(x, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return _norm(x)
    if isinstance(x, str):
        return _norm(Fraction(x))
    raise TypeError(f"not an exact number: {x!r}")


class MultiPoly:
    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars: Iterable[str] = (), terms: Mapping[tuple, Number] | None = None):
        self.vars = tuple(vars)
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("duplicate variable names")
        clean = {}
        for e, c in (terms or {}).items():
            if len(e) != len(self.vars):
                raise ValueError("exponent length does not match variables")
            c = _norm(c)
            if c:
                clean[tuple(e)] = c
        self.terms = clean
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "MultiPoly":
        c = as_number(c)
        return cls((), {(): c} if c else {})

    @classmethod
    def var(cls, name: str) -> "MultiPoly":
        return cls((name,), {(1,): 1})

    @classmethod
    def zero(cls) -> "MultiPoly":
        return cls()

    @classmethod
    def linear(cls, coeffs: Mapping[str, Number], constant: Number = 0) -> "MultiPoly":
        names = sorted(coeffs, key=var_key)
        terms = {}
        k = len(names)
        for i, v in enumerate(names):
            e = [0] * k
            e[i] = 1
            terms[tuple(e)] = coeffs[v]
        if constant:
            terms[(0,) * k] = constant
        return cls(names, terms)

    # variable alignment -----------------------------------------------
    def _lift(self, new_vars: tuple[str, ...]) -> dict:
        if new_vars == self.vars:
            return self.terms
        pos = [new_vars.index(v) for v in self.vars]
        k = len(new_vars)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * k
            for p, x in zip(pos, e):
                ne[p] = x
            out[tuple(ne)] = c
        return out

    @staticmethod
    def _union(a: tuple[str, ...], b: tuple[str, ...]) -> tuple[str, ...]:
        if a == b:
            return a
        return tuple(sorted(set(a) | set(b), key=var_key))

    def compact(self) -> "MultiPoly":
        """Drop variables that no term uses."""
        used = [i for i in range(len(self.vars)) if any(e[i] for e in self.terms)]
        if len(used) == len(self.vars):
            return self
        return MultiPoly([self.vars[i] for i in used],
                         {tuple(e[i] for i in used): c for e, c in self.terms.items()})

    # predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Number:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return next(iter(self.terms.values()), 0)

    def free_vars(self) -> tuple[str, ...]:
        return self.compact().vars

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            try:
                other = MultiPoly.const(other)
            except TypeError:
                return NotImplemented
        a, b = self.compact(), other.compact()
        if a.vars != b.vars:
            return False
        return a.terms == b.terms

    def __hash__(self) -> int:
        if self._hash is None:
            c = self.compact()
            self._hash = hash((c.vars, frozenset(c.terms.items())))
        return self._hash

    # arithmetic -------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "MultiPoly":
        return x if isinstance(x, MultiPoly) else MultiPoly.const(x)

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        vs = self._union(self.vars, other.vars)
        out = dict(self._lift(vs))
        for e, c in other._lift(vs).items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(vs, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def scale(self, k) -> "MultiPoly":
        k = as_number(k)
        return MultiPoly(self.vars, {e: c * k for e, c in self.terms.items()})

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        vs = self._union(self.vars, other.vars)
        a, b = self._lift(vs), other._lift(vs)
        out: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return MultiPoly(vs, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MultiPoly":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = MultiPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def leading(self) -> tuple[tuple, Number]:
        """Lexicographic leading term in this polynomial's variable order."""
        e = max(self.terms)
        return e, self.terms[e]

    def divmod(self, divisor: "MultiPoly") -> tuple["MultiPoly", "MultiPoly"]:
        """Multivariate division by one polynomial in lex order."""
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        vs = self._union(self.vars, divisor.vars)
        rem = dict(self._lift(vs))
        dv = divisor._lift(vs)
        de = max(dv)
        dc = dv[de]
        quot: dict = {}
        out_rem: dict = {}
        while rem:
            e = max(rem)
            c = rem[e]
            if all(x >= y for x, y in zip(e, de)):
                qe = tuple(x - y for x, y in zip(e, de))
                qc = _norm(Fraction(c) / dc)
                quot[qe] = quot.get(qe, 0) + qc
                for te, tc in dv.items():
                    ne = tuple(x + y for x, y in zip(qe, te))
                    v = _norm(rem.get(ne, 0) - qc * tc)
                    if v:
                        rem[ne] = v
                    else:
                        rem.pop(ne, None)
            else:
                out_rem[e] = c
                del rem[e]
        return MultiPoly(vs, quot), MultiPoly(vs, out_rem)

    def div_exact(self, divisor: "MultiPoly") -> "MultiPoly":
        q, r = self.divmod(divisor)
        if not r.is_zero():
            raise InexactDivision(r, self._coerce(divisor))
        if q * divisor != self:
            raise ArithmeticError("quotient check failed")
        return q

    def divides(self, other: "MultiPoly") -> bool:
        return other.divmod(self)[1].is_zero()

    # structure --------------------------------------------------------
    def degree(self, var: str | None = None) -> int:
        """Total degree, or degree in ``var``; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        if var not in self.vars:
            return 0
        i = self.vars.index(var)
        return max(e[i] for e in self.terms)

    def coeffs_in(self, var: str) -> dict[int, "MultiPoly"]:
        """Coefficients of powers of ``var`` as polynomials in the rest."""
        if var not in self.vars:
            return {0: self} if self.terms else {}
        i = self.vars.index(var)
        rest = self.vars[:i] + self.vars[i + 1:]
        parts: dict[int, dict] = {}
        for e, c in self.terms.items():
            parts.setdefault(e[i], {})[e[:i] + e[i + 1:]] = c
        return {k: MultiPoly(rest, t) for k, t in parts.items()}

    def univariate(self, var: str) -> list["MultiPoly"]:
        """Coefficient list, highest power first."""
        cs = self.coeffs_in(var)
        if not cs:
            return []
        deg = max(cs)
        return [cs.get(k, MultiPoly.zero()) for k in range(deg, -1, -1)]

    @classmethod
    def from_univariate(cls, coeffs: list["MultiPoly"], var: str) -> "MultiPoly":
        x = cls.var(var)
        out = cls.zero()
        for c in coeffs:
            out = out * x + cls._coerce(c)
        return out

    def substitute(self, mapping: Mapping[str, object]) -> "MultiPoly":
        """Simultaneous substitution of variables by polynomials or numbers."""
        subs = {v: self._coerce(mapping[v]) for v in self.vars if v in mapping}
        if not subs:
            return self
        keep = [v for v in self.vars if v not in subs]
        keep_idx = [self.vars.index(v) for v in keep]
        sub_vars = list(subs)
        sub_idx = [self.vars.index(v) for v in sub_vars]
        powers: dict[tuple[str, int], MultiPoly] = {}

        def pw(name: str, k: int) -> MultiPoly:
            if (name, k) not in powers:
                powers[(name, k)] = subs[name] ** k
            return powers[(name, k)]

        # group by the exponents of substituted variables so each power
        # product is formed once
        grouped: dict[tuple, dict] = {}
        for e, c in self.terms.items():
            rest = tuple(e[i] for i in sub_idx)
            grouped.setdefault(rest, {})[tuple(e[i] for i in keep_idx)] = c
        out = MultiPoly.zero()
        for rest, kt in grouped.items():
            factor = MultiPoly.const(1)
            for name, k in zip(sub_vars, rest):
                if k:
                    factor = factor * pw(name, k)
            out = out + MultiPoly(keep, kt) * factor
        return out

    def evaluate(self, values: Mapping[str, object]) -> Number:
        missing = [v for v in self.free_vars() if v not in values]
        if missing:
            raise ValueError(f"unbound variables: {missing}")
        vals = [as_number(values[v]) if v in values else 0 for v in self.vars]
        total: Number = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(vals, e):
                if k:
                    t = t * x**k
            total += t
        return _norm(Fraction(total)) if isinstance(total, Fraction) else total

    def diff(self, var: str) -> "MultiPoly":
        if var not in self.vars:
            return MultiPoly.zero()
        i = self.vars.index(var)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                out[ne] = c * e[i]
        return MultiPoly(self.vars, out)

    def affine_solve(self, var: str) -> "MultiPoly":
        """``var`` as a polynomial in the others when ``self == 0`` is affine in it.

        The coefficient of ``var`` must be a nonzero constant.
        """
        cs = self.coeffs_in(var)
        if max(cs, default=0) != 1:
            raise NonAffinePivot(self, var, f"degree {self.degree(var)} in {var}")
        lead = cs[1]
        if not lead.is_constant():
            raise NonAffinePivot(self, var, f"coefficient of {var} is not constant: {lead}")
        return (-cs.get(0, MultiPoly.zero())).scale(Fraction(1) / Fraction(lead.constant_value()))

    # presentation -----------------------------------------------------
    def sorted_terms(self) -> list[tuple[tuple, Number]]:
        """Terms in descending graded-lexicographic order."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __repr__(self) -> str:
        return f"MultiPoly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> list[dict]:
        out = []
        for e, c in self.sorted_terms():
            out.append({"coef": str(c), "exps": {v: k for v, k in zip(self.vars, e) if k}})
        return out

    @classmethod
    def from_json(cls, items: list[dict]) -> "MultiPoly":
        names = sorted({v for it in items for v in it["exps"]}, key=var_key)
        terms: dict = {}
        for it in items:
            e = tuple(int(it["exps"].get(v, 0)) for v in names)
            terms[e] = terms.get(e, 0) + as_number(it["coef"])
        return cls(names, terms)


class NonAffinePivot(ValueError):
    """A designated pivot equation is not affine (with constant slope) in its target."""

    def __init__(self, poly: MultiPoly, var: str, reason: str):
        super().__init__(f"cannot solve for {var}: {reason}")
        self.poly = poly
        self.var = var
        self.reason = reason


def var(name: str) -> MultiPoly:
    return MultiPoly.var(name)


def w(j: int) -> MultiPoly:
    return MultiPoly.var(f"w{j}")


DELTA = "delta"
