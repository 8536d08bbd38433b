"""Resultants and real-root isolation.

``resultant`` is the Sylvester determinant, computed with Bareiss
fraction-free elimination over the polynomial coefficient ring. Two
independent routes serve as oracles: the Euclidean remainder-sequence
resultant over Q, and evaluation at sample points followed by Lagrange
interpolation. Univariate polynomials over Q are plain coefficient lists,
highest degree first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .poly import MultiPoly, as_number


class ZeroPolynomialError(ValueError):
    pass


def sylvester_matrix(f: Sequence, g: Sequence) -> list[list]:
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    zero = 0 * f[0]
    rows = []
    for i in range(n):
        rows.append([zero] * i + list(f) + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + list(g) + [zero] * (size - n - 1 - i))
    return rows


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, MultiPoly) else x == 0


def _exact_div(a, b):
    if isinstance(a, MultiPoly) or isinstance(b, MultiPoly):
        a = a if isinstance(a, MultiPoly) else MultiPoly.const(a)
        b = b if isinstance(b, MultiPoly) else MultiPoly.const(b)
        if b.is_constant():
            return a.scale(Fraction(1) / Fraction(b.constant_value()))
        return a.div_exact(b)
    q = Fraction(a) / Fraction(b)
    return q.numerator if q.denominator == 1 else q


def bareiss_det(matrix: list[list]):
    """Determinant by fraction-free Gaussian elimination with row swaps."""
    a = [list(r) for r in matrix]
    size = len(a)
    if size == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(size - 1):
        if _is_zero(a[k][k]):
            swap = next((i for i in range(k + 1, size) if not _is_zero(a[i][k])), None)
            if swap is None:
                return 0 * a[0][0]
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                a[i][j] = _exact_div(a[i][j] * a[k][k] - a[i][k] * a[k][j], prev)
            a[i][k] = 0 * a[k][k]
        prev = a[k][k]
    det = a[-1][-1]
    return -det if sign < 0 else det


def _coeff_list(p, v: str | None):
    if isinstance(p, MultiPoly):
        if v is None:
            raise ValueError("an elimination variable is required for MultiPoly input")
        return p.univariate(v)
    out = [as_number(c) for c in p]
    while out and out[0] == 0:
        out.pop(0)
    return out


def resultant(f, g, v: str | None = None):
    """Sylvester resultant of ``f`` and ``g`` in ``v``.

    Inputs are MultiPolys (with ``v`` naming the variable) or rational
    coefficient lists. The result is a MultiPoly or a rational accordingly.
    """
    fc, gc = _coeff_list(f, v), _coeff_list(g, v)
    if not fc or not gc:
        raise ZeroPolynomialError("resultant of the zero polynomial is undefined")
    if len(fc) == 1 and len(gc) == 1:
        return MultiPoly.const(1) if isinstance(f, MultiPoly) else 1
    return bareiss_det(sylvester_matrix(fc, gc))


# --- univariate helpers over Q -------------------------------------------

def _strip(p: list) -> list[Fraction]:
    p = [Fraction(c) for c in p]
    while p and p[0] == 0:
        p.pop(0)
    return p


def poly_rem(f: Sequence, g: Sequence) -> list[Fraction]:
    f, g = _strip(f), _strip(g)
    if not g:
        raise ZeroDivisionError("division by the zero polynomial")
    while len(f) >= len(g) and f:
        k = f[0] / g[0]
        for i in range(len(g)):
            f[i] -= k * g[i]
        f.pop(0)
        f = _strip(f)
    return f


def euclid_resultant(f: Sequence, g: Sequence) -> Fraction:
    """Resultant over Q by the remainder sequence (independent of Sylvester)."""
    f, g = _strip(f), _strip(g)
    if not f or not g:
        raise ZeroPolynomialError("resultant of the zero polynomial is undefined")
    acc = Fraction(1)
    while True:
        m, n = len(f) - 1, len(g) - 1
        if n == 0:
            return acc * g[0] ** m
        r = poly_rem(f, g)
        if not r:
            return Fraction(0)
        k = len(r) - 1
        acc *= (-1) ** (m * n) * g[0] ** (m - k)
        f, g = g, r


def poly_eval(p: Sequence, x) -> Fraction:
    acc = Fraction(0)
    for c in p:
        acc = acc * x + c
    return acc


def lagrange_interpolate(xs: Sequence, ys: Sequence) -> list[Fraction]:
    """Coefficients (highest first) of the unique polynomial of degree < len(xs)."""
    xs = [Fraction(x) for x in xs]
    total = [Fraction(0)] * len(xs)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = [a - xj * b for a, b in zip(basis + [Fraction(0)], [Fraction(0)] + basis)]
            denom *= xi - xj
        k = Fraction(yi) / denom
        for d, c in enumerate(basis):
            total[d] += k * c
    return _strip(total)


def interpolated_resultant(f: MultiPoly, g: MultiPoly, v: str, param: str,
                           points: Sequence | None = None) -> list[Fraction]:
    """Resultant in ``v`` as a polynomial in ``param`` via evaluation-interpolation.

    ``f`` and ``g`` may involve only ``v`` and ``param``. Each specialization
    is resolved with :func:`euclid_resultant`; the number of sample points is
    ``deg_v(f) * deg_v(g) + 1`` unless the coefficient degrees demand more.
    """
    extra = set(f.free_vars()) | set(g.free_vars())
    extra -= {v, param}
    if extra:
        raise ValueError(f"unexpected variables {sorted(extra)}")
    df, dg = f.degree(v), g.degree(v)
    bound = df * f.degree(param) + dg * g.degree(param)
    count = max(df * dg + 1, bound + 1)
    candidates = iter(points) if points is not None else (Fraction(k) for k in range(10**6))
    xs, ys = [], []
    for t in candidates:
        fl = [c.constant_value() for c in f.substitute({param: t}).univariate(v)]
        gl = [c.constant_value() for c in g.substitute({param: t}).univariate(v)]
        if len(fl) != df + 1 or len(gl) != dg + 1:
            # a leading coefficient vanishes here; the specialization would
            # not be the resultant of the generic degrees
            continue
        xs.append(Fraction(t))
        ys.append(euclid_resultant(fl, gl))
        if len(xs) == count:
            break
    if len(xs) < bound + 1:
        raise ValueError(f"need at least {bound + 1} usable sample points")
    return lagrange_interpolate(xs, ys)


def to_fraction_list(p: MultiPoly, v: str) -> list[Fraction]:
    """Coefficient list of a MultiPoly univariate in ``v``."""
    other = set(p.free_vars()) - {v}
    if other:
        raise ValueError(f"{sorted(other)} remain besides {v}")
    return [Fraction(c.constant_value()) for c in p.univariate(v)]


# --- real roots ------------------------------------------------------------

def derivative(p: Sequence) -> list[Fraction]:
    d = len(p) - 1
    return [Fraction(c) * (d - i) for i, c in enumerate(p[:-1])]


def poly_gcd(f: Sequence, g: Sequence) -> list[Fraction]:
    f, g = _strip(f), _strip(g)
    while g:
        f, g = g, poly_rem(f, g)
    if not f:
        return f
    return [c / f[0] for c in f]


def poly_div(f: Sequence, g: Sequence) -> list[Fraction]:
    f, g = _strip(f), _strip(g)
    q = []
    while len(f) >= len(g):
        k = f[0] / g[0]
        q.append(k)
        for i in range(len(g)):
            f[i] -= k * g[i]
        f.pop(0)
    if any(f):
        raise ArithmeticError("inexact univariate division")
    return q or [Fraction(0)]


def square_free(p: Sequence) -> list[Fraction]:
    p = _strip(p)
    if len(p) <= 1:
        return p
    return poly_div(p, poly_gcd(p, derivative(p)))


def sturm_sequence(p: Sequence) -> list[list[Fraction]]:
    seq = [_strip(p), derivative(_strip(p))]
    while seq[-1] and len(seq[-1]) > 1:
        r = poly_rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _sign_changes(seq, x) -> int:
    signs = [v for v in (poly_eval(s, x) for s in seq) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def _root_bound(p: list[Fraction]) -> Fraction:
    """Power of two above the Cauchy bound, so bisection points are dyadic."""
    cauchy = 1 + max(abs(c / p[0]) for c in p[1:]) if len(p) > 1 else Fraction(1)
    b = Fraction(1)
    while b <= cauchy:
        b *= 2
    return b


@dataclass(frozen=True)
class RootInterval:
    lo: Fraction
    hi: Fraction

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def to_list(self) -> list[str]:
        return [str(self.lo), str(self.hi)]


def isolate_real_roots(p: Sequence, width: Fraction = Fraction(1, 2**20)) -> list[RootInterval]:
    """Disjoint intervals, each holding exactly one distinct real root.

    Sturm counts are taken on half-open intervals (lo, hi], so bisection
    partitions roots exactly. An interval whose right end is a root is
    reported as the degenerate interval [hi, hi].
    """
    q = square_free(p)
    if len(q) <= 1:
        return []
    seq = sturm_sequence(q)
    bound = _root_bound(q)
    out: list[RootInterval] = []
    stack = [(-bound, bound, _sign_changes(seq, -bound) - _sign_changes(seq, bound))]
    while stack:
        lo, hi, count = stack.pop()
        if count == 0:
            continue
        if count == 1:
            if poly_eval(q, hi) == 0:
                out.append(RootInterval(hi, hi))
                continue
            if hi - lo <= width:
                out.append(RootInterval(lo, hi))
                continue
        mid = (lo + hi) / 2
        left = _sign_changes(seq, lo) - _sign_changes(seq, mid)
        stack.append((mid, hi, count - left))
        stack.append((lo, mid, left))
    return sorted(out, key=lambda r: r.lo)
