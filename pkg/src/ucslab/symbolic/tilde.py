"""Tilde quantities as signed exponential sums over cube vertices.

Each quantity is the difference of two gradient-kernel sums, one for
coordinate ``j`` and one for coordinate ``n``, written with the kernel
``e^{b(x)}``. Two vertex-level recipes are provided:

* ``index``: the index-condition sums (membership of j, n, 1 and an
  auxiliary index l), available for ``2 <= j <= n - 1``;
* ``gradient``: ``D_j - D_n`` with the per-coordinate kernel sums spelled
  out below, available for every ``1 <= j <= n - 1``.

They agree wherever both apply (checked in the test suite).
"""

from __future__ import annotations

from typing import Mapping

from .expsum import SignedExpSum
from .poly import MultiPoly

QUANTITIES = ("R", "S", "L")
PAIR_READINGS = ("ordered", "distinct")
EXPONENTS = ("gaussian", "affine")


def _has(x: int, j: int) -> bool:
    return bool(x >> (j - 1) & 1)


def _popcount(x: int) -> int:
    return bin(x).count("1")


# each recipe returns a list of (weight, vertex mask); weights are unmerged
# so term counts match the index sets they come from

def _union_weight(pairs: str):
    # ordered pairs (x1, x2) with union u number 3^|u|; "distinct" counts u once
    if pairs == "ordered":
        return lambda x: 3 ** _popcount(x)
    if pairs == "distinct":
        return lambda x: 1
    raise ValueError(f"pairs must be one of {PAIR_READINGS}")


def _gradient_terms(q: str, j: int, n: int, pairs: str = "ordered") -> list[tuple[int, int]]:
    union_weight = _union_weight(pairs)

    def d(k: int) -> list[tuple[int, int]]:
        out = []
        for x in range(1 << n):
            if not _has(x, k):
                continue
            if q == "R":
                out.append((1, x))
                if _has(x, 1):
                    out.append((-2, x))
            elif q == "S":
                for ell in range(2, n + 1):
                    if _has(x, ell):
                        out.append((1, x))
                if _has(x, 1):
                    out.append((-(n - 1), x))
            else:
                out.append((2 ** (n + 1), x))
                out.append((-union_weight(x), x))
        return out

    return d(j) + [(-s, x) for s, x in d(n)]


def _index_terms(q: str, j: int, n: int, pairs: str = "ordered") -> list[tuple[int, int]]:
    def diff(scale: int, need_in: tuple[int, ...], mult=lambda x: 1) -> list[tuple[int, int]]:
        # scale * (sum_{j in x, n not in x, need_in in x} - sum_{j not in x, n in x, need_in in x})
        out = []
        for x in range(1 << n):
            if not all(_has(x, k) for k in need_in):
                continue
            if _has(x, j) and not _has(x, n):
                out.append((scale * mult(x), x))
            elif _has(x, n) and not _has(x, j):
                out.append((-scale * mult(x), x))
        return out

    if q == "R":
        return diff(1, ()) + diff(-2, (1,))
    if q == "S":
        terms = []
        for ell in range(2, n):
            if ell != j:
                terms += diff(1, (ell,))
        return terms + diff(1, ()) + diff(-(n - 1), (1,))
    return diff(2 ** (n + 1), ()) + diff(-1, (), _union_weight(pairs))


def vertex_terms(quantity: str, j: int, n: int, form: str = "auto",
                 pairs: str = "ordered") -> list[tuple[int, int]]:
    """Unmerged ``(weight, vertex)`` list defining the tilde quantity."""
    if quantity not in QUANTITIES:
        raise ValueError(f"quantity must be one of {QUANTITIES}")
    if n < 4:
        raise ValueError(f"the index pattern needs n >= 4, got n={n}")
    if not 1 <= j <= n - 1:
        raise ValueError(f"coordinate j={j} outside [1, {n - 1}]")
    if form == "auto":
        form = "gradient" if j == 1 else "index"
    if form == "index":
        if j == 1:
            raise ValueError("the index-condition sums need 2 <= j <= n-1")
        return _index_terms(quantity, j, n, pairs)
    if form == "gradient":
        return _gradient_terms(quantity, j, n, pairs)
    raise ValueError(f"unknown form {form!r}")


def weights_by_vertex(quantity: str, j: int, n: int, form: str = "auto",
                      pairs: str = "ordered") -> dict[int, int]:
    out: dict[int, int] = {}
    for s, x in vertex_terms(quantity, j, n, form, pairs):
        out[x] = out.get(x, 0) + s
    return {x: s for x, s in sorted(out.items()) if s}


def linear_form(n: int, x: int) -> MultiPoly:
    """``(omega, x) - delta`` in the variables w1..wn, delta."""
    coeffs = {f"w{k}": 1 for k in range(1, n + 1) if _has(x, k)}
    return MultiPoly.linear({**coeffs, "delta": -1})


class ExponentMap:
    """Per-vertex exponents with an optional variable substitution.

    The substitution (for instance an ansatz ``w3 -> w2``) is applied to the
    linear form before squaring, which keeps the expansion small.
    """

    def __init__(self, n: int, exponent: str = "gaussian",
                 substitution: Mapping[str, object] | None = None):
        if exponent not in EXPONENTS:
            raise ValueError(f"exponent must be one of {EXPONENTS}")
        self.n = n
        self.exponent = exponent
        self.substitution = dict(substitution or {})
        self._cache: dict[int, MultiPoly] = {}

    def __call__(self, x: int) -> MultiPoly:
        b = self._cache.get(x)
        if b is None:
            t = linear_form(self.n, x)
            if self.substitution:
                t = t.substitute(self.substitution)
            b = -(t * t) if self.exponent == "gaussian" else t
            self._cache[x] = b
        return b


def build_tilde(quantity: str, j: int, n: int, exponent: str = "gaussian",
                form: str = "auto", substitution: Mapping[str, object] | None = None,
                exponents: ExponentMap | None = None, pairs: str = "ordered") -> SignedExpSum:
    """Signed exponential sum for R~_j, S~_j or L~_j; one term per vertex entry.

    ``exponent="gaussian"`` uses ``b(x) = -((omega, x) - delta)^2`` (kernel
    scale absorbed); ``"affine"`` uses ``b(x) = (omega, x) - delta``.
    """
    emap = exponents or ExponentMap(n, exponent, substitution)
    if exponents is not None and (substitution or exponent != exponents.exponent):
        raise ValueError("pass either an ExponentMap or exponent/substitution options")
    return SignedExpSum(tuple((s, emap(x)) for s, x in vertex_terms(quantity, j, n, form, pairs)))


def count_formula(quantity: str, n: int) -> int:
    """Closed form of N for the j = 1 quantities, as computed by enumeration."""
    return {"R": -(2 ** (n - 1)), "S": -n * 2 ** (n - 2), "L": 0}[quantity]


def ansatz_substitution(n: int, a: int) -> dict[str, MultiPoly]:
    """Two-value ansatz: w_j = w2 for j in [2, a+1], w_j = wn for j in [a+2, n].

    ``a = 0`` sends every coordinate j >= 2 to wn.
    """
    if not 0 <= a <= n - 2:
        raise ValueError(f"a={a} outside [0, {n - 2}]")
    w2, wn = MultiPoly.var("w2"), MultiPoly.var(f"w{n}")
    sub: dict[str, MultiPoly] = {}
    for k in range(2, n):
        sub[f"w{k}"] = w2 if k <= a + 1 else wn
    if a == 0:
        sub["w2"] = wn
    else:
        sub.pop("w2", None)
    return sub


def row_sum(n: int) -> MultiPoly:
    """C = w1 + ... + wn."""
    return MultiPoly.linear({f"w{k}": 1 for k in range(1, n + 1)})


__all__ = [
    "QUANTITIES", "EXPONENTS", "PAIR_READINGS", "ExponentMap", "build_tilde", "vertex_terms",
    "weights_by_vertex", "linear_form", "count_formula", "ansatz_substitution",
    "row_sum",
]
