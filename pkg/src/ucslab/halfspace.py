"""Strict-halfspace encodings of vertex subsets of the hypercube.

A system of rows ``(omega_i, delta_i)`` selects the vertices ``x`` with
``(omega_i, x) > delta_i`` for every ``i``. All arithmetic is exact over the
rationals; floating point only ever proposes candidate rows, which are then
rationalized and validated exactly.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .family import SetFamily

log = logging.getLogger(__name__)

SYNTHESIS_CAP = 10


class HalfspaceError(ValueError):
    pass


@dataclass(frozen=True)
class Row:
    omega: tuple[Fraction, ...]
    delta: Fraction

    @property
    def C(self) -> Fraction:
        return sum(self.omega, Fraction(0))

    def value(self, x: int) -> Fraction:
        total = Fraction(0)
        for j, w in enumerate(self.omega):
            if x >> j & 1:
                total += w
        return total - self.delta

    def integer_form(self) -> tuple[tuple[int, ...], int, int]:
        """``(w, d, q)`` with integers such that ``omega = w / q``, ``delta = d / q``."""
        q = math.lcm(*(f.denominator for f in self.omega), self.delta.denominator)
        w = tuple(int(f * q) for f in self.omega)
        return w, int(self.delta * q), q


@dataclass(frozen=True)
class HalfspaceSystem:
    n: int
    rows: tuple[Row, ...] = ()

    def __post_init__(self):
        for r in self.rows:
            if len(r.omega) != self.n:
                raise HalfspaceError(f"row of length {len(r.omega)} in dimension {self.n}")

    @property
    def N(self) -> int:
        return len(self.rows)

    def scaled_values(self) -> np.ndarray:
        """Exact integer matrix, shape (N, 2^n), with the sign of ``(omega_i, x) - delta_i``.

        Row ``i`` is multiplied by its positive common denominator, so signs
        and zeros are those of the rational values.
        """
        cached = self.__dict__.get("_scaled")
        if cached is None:
            verts = vertex_matrix(self.n)
            out = []
            for r in self.rows:
                w, d, _ = r.integer_form()
                if max(map(abs, w + (d,)), default=0) * (self.n + 1) < 2**62:
                    out.append(verts @ np.array(w, dtype=np.int64) - d)
                else:
                    out.append(np.array([sum(wi for j, wi in enumerate(w) if x >> j & 1) - d
                                         for x in range(1 << self.n)], dtype=object))
            cached = np.array(out).reshape(self.N, 1 << self.n)
            object.__setattr__(self, "_scaled", cached)
        return cached

    def validate(self) -> None:
        """Raise unless every row is strict: no vertex lies on a hyperplane."""
        if not self.rows:
            return
        zeros = np.argwhere(self.scaled_values() == 0)
        if len(zeros):
            i, x = zeros[0]
            raise HalfspaceError(f"vertex {int(x):#x} lies on hyperplane of row {int(i)}")

    def member_mask(self) -> np.ndarray:
        if not self.rows:
            return np.ones(1 << self.n, dtype=bool)
        return (self.scaled_values() > 0).all(axis=0)

    def family(self) -> SetFamily:
        return SetFamily(self.n, tuple(int(x) for x in np.flatnonzero(self.member_mask())))

    def omega_matrix(self) -> np.ndarray:
        return np.array([[float(w) for w in r.omega] for r in self.rows], dtype=float).reshape(self.N, self.n)

    def delta_vector(self) -> np.ndarray:
        return np.array([float(r.delta) for r in self.rows], dtype=float)


@lru_cache(maxsize=None)
def vertex_matrix(n: int) -> np.ndarray:
    """0/1 matrix of shape (2^n, n); row ``x`` holds the bits of ``x``."""
    x = np.arange(1 << n, dtype=np.int64)
    out = (x[:, None] >> np.arange(n, dtype=np.int64)[None, :]) & 1
    out.setflags(write=False)
    return out


def make_row(omega: Sequence, delta) -> Row:
    return Row(tuple(Fraction(w) for w in omega), Fraction(delta))


def membership(system: HalfspaceSystem, x: int) -> bool:
    return all(r.value(x) > 0 for r in system.rows)


def margin(system: HalfspaceSystem, x: int) -> Fraction | float:
    """Signed minimum of ``(omega_i, x) - delta_i``; ``inf`` for a vacuous system."""
    if not system.rows:
        return float("inf")
    return min(r.value(x) for r in system.rows)


def strict_margin(system: HalfspaceSystem) -> Fraction | float:
    """Smallest ``|(omega_i, x) - delta_i|`` over all rows and vertices."""
    if not system.rows:
        return float("inf")
    vals = np.abs(system.scaled_values())
    best = None
    for r, row_vals in zip(system.rows, vals):
        m = Fraction(int(row_vals.min()), r.integer_form()[2])
        best = m if best is None else min(best, m)
    return best


def _vertex_cut(n: int, v: int) -> Row:
    # (1 - 2v, x) = hamming(x, v) - |v|; only v itself falls below 1/2 - |v|
    omega = tuple(Fraction(-1 if v >> j & 1 else 1) for j in range(n))
    weight = bin(v).count("1")
    return Row(omega, Fraction(1, 2) - weight)


def _is_unate(n: int, members: set[int]) -> bool:
    for j in range(n):
        bit = 1 << j
        up = down = False
        for x in range(1 << n):
            if x & bit:
                continue
            lo, hi = x in members, (x | bit) in members
            if lo and not hi:
                down = True
            elif hi and not lo:
                up = True
            if up and down:
                return False
    return True


def _exact_row(n: int, inside: Sequence[int], outside: Sequence[int], omega) -> Row | None:
    """Midpoint row for a proposed direction, scaled to a half-unit margin."""
    row = make_row(omega, 0)
    lo = min(row.value(x) for x in inside)
    hi = max(row.value(x) for x in outside)
    if lo <= hi:
        return None
    gap = lo - hi
    omega_scaled = tuple(w / gap for w in row.omega)
    return Row(omega_scaled, (lo + hi) / 2 / gap)


def _threshold_row(n: int, inside: Sequence[int], outside: Sequence[int]) -> Row | None:
    # variables: omega+ (n), omega- (n), delta; minimize the L1 norm of omega
    def coords(x):
        return [float(x >> j & 1) for j in range(n)]

    a_ub, b_ub = [], []
    for x in inside:
        c = coords(x)
        a_ub.append([-v for v in c] + c + [1.0])
        b_ub.append(-1.0)
    for x in outside:
        c = coords(x)
        a_ub.append(c + [-v for v in c] + [-1.0])
        b_ub.append(-1.0)
    cost = [1.0] * (2 * n) + [0.0]
    bounds = [(0, None)] * (2 * n) + [(None, None)]
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        return None
    raw = res.x[:n] - res.x[n:2 * n]
    omega = [Fraction(float(w)).limit_denominator(1000) for w in raw]
    return _exact_row(n, inside, outside, omega)


def synthesize_halfspaces(family: SetFamily) -> HalfspaceSystem:
    """Strict system whose solution set on {0,1}^n is exactly ``family``.

    A single row is used when the family is a threshold function; otherwise
    every excluded vertex gets its own cut, which exists because each cube
    vertex is extreme. The result is validated before it is returned.
    """
    n = family.n
    if n > SYNTHESIS_CAP:
        raise HalfspaceError(f"synthesis is capped at n={SYNTHESIS_CAP}")
    if len(family) == 0:
        raise HalfspaceError("the empty family has no strict encoding with a nonempty solution set")
    inside = list(family.sets)
    members = set(inside)
    outside = [x for x in range(1 << n) if x not in members]
    if not outside:
        return HalfspaceSystem(n, ())
    rows: tuple[Row, ...] | None = None
    if _is_unate(n, members):
        row = _threshold_row(n, inside, outside)
        if row is not None:
            rows = (row,)
        else:
            log.debug("threshold LP gave no exact row for %s", family)
    if rows is None:
        rows = tuple(_vertex_cut(n, v) for v in outside)
    system = HalfspaceSystem(n, rows)
    system.validate()
    if system.family() != family:
        raise HalfspaceError("synthesized system does not reproduce the family")
    return system


def normalize_row_sums(system: HalfspaceSystem, targets: Sequence | Fraction | int) -> HalfspaceSystem:
    """Scale each row by a positive rational so that ``sum(omega) == target``."""
    if not isinstance(targets, (list, tuple)):
        targets = [targets] * system.N
    if len(targets) != system.N:
        raise HalfspaceError(f"{len(targets)} targets for {system.N} rows")
    rows = []
    for i, (r, t) in enumerate(zip(system.rows, targets)):
        t = Fraction(t)
        s = r.C
        if s == 0:
            raise HalfspaceError(f"row {i} has zero row-sum; perturb it before normalizing")
        if t == 0 or (s > 0) != (t > 0):
            raise HalfspaceError(f"row {i}: target {t} has the wrong sign for row-sum {s}")
        k = t / s
        rows.append(Row(tuple(w * k for w in r.omega), r.delta * k))
    return HalfspaceSystem(system.n, tuple(rows))


def perturb_zero_sums(system: HalfspaceSystem) -> HalfspaceSystem:
    """Nudge the first coordinate of zero-sum rows by half the strict margin."""
    rows = []
    for r in system.rows:
        if r.C == 0:
            eps = min(abs(r.value(x)) for x in range(1 << system.n)) / 2
            r = Row((r.omega[0] + eps,) + r.omega[1:], r.delta)
        rows.append(r)
    out = HalfspaceSystem(system.n, tuple(rows))
    out.validate()
    if out.family() != system.family():
        raise HalfspaceError("perturbation changed the solution set")
    return out


def shift_delta(system: HalfspaceSystem, epsilon) -> HalfspaceSystem:
    """Shift every delta by ``epsilon``; must stay strictly inside the margin."""
    epsilon = Fraction(epsilon)
    bound = strict_margin(system)
    if system.rows and abs(epsilon) >= bound:
        raise HalfspaceError(f"|epsilon| must be < {bound}")
    out = HalfspaceSystem(system.n, tuple(Row(r.omega, r.delta + epsilon) for r in system.rows))
    out.validate()
    if out.family() != system.family():
        raise HalfspaceError("shift changed the solution set")
    return out
