"""Exact combinatorics of finite set families over the universe [n].

Sets are bitmasks: element ``i`` (1-based) is bit ``i - 1``. A family is a
sorted tuple of distinct masks, so two families are equal iff their tuples
are equal.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Iterator

import numpy as np

ENUMERATION_CAP = 4
FINAL_STEP_CAP = 12


class CapExceeded(ValueError):
    """Raised when a request exceeds a hard desk-scale cap."""


@dataclass(frozen=True)
class SetFamily:
    n: int
    sets: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"universe size must be positive, got {self.n}")
        limit = 1 << self.n
        normalized = tuple(sorted(set(self.sets)))
        for s in normalized:
            if not 0 <= s < limit:
                raise ValueError(f"mask {s:#x} out of range for n={self.n}")
        object.__setattr__(self, "sets", normalized)

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        """Build from 1-based element labels, e.g. ``[[1], [2], [1, 2]]``."""
        masks = []
        for s in sets:
            mask = 0
            for e in s:
                if not 1 <= e <= n:
                    raise ValueError(f"element {e} outside [1, {n}]")
                mask |= 1 << (e - 1)
            masks.append(mask)
        return cls(n, tuple(masks))

    @classmethod
    def powerset(cls, n: int) -> "SetFamily":
        return cls(n, tuple(range(1 << n)))

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self) -> Iterator[int]:
        return iter(self.sets)

    def __contains__(self, mask: int) -> bool:
        return mask in self._members

    @property
    def _members(self) -> frozenset[int]:
        cached = self.__dict__.get("_member_cache")
        if cached is None:
            cached = frozenset(self.sets)
            object.__setattr__(self, "_member_cache", cached)
        return cached

    def as_lists(self) -> list[list[int]]:
        return [mask_elements(s) for s in self.sets]

    @property
    def is_empty_set_only(self) -> bool:
        return self.sets == (0,)


def mask_elements(mask: int) -> list[int]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def is_union_closed(family: SetFamily) -> tuple[bool, tuple[int, int] | None]:
    """Return ``(True, None)`` or ``(False, (x, y))`` with ``x | y`` missing."""
    members = family._members
    sets = family.sets
    for i, x in enumerate(sets):
        for y in sets[i + 1:]:
            if (x | y) not in members:
                return False, (x, y)
    return True, None


def union_closure(generators: SetFamily) -> SetFamily:
    closed = set(generators.sets)
    frontier = list(closed)
    while frontier:
        fresh = []
        for x in frontier:
            for y in list(closed):
                u = x | y
                if u not in closed:
                    closed.add(u)
                    fresh.append(u)
        frontier = fresh
    return SetFamily(generators.n, tuple(closed))


def element_degrees(family: SetFamily) -> list[int]:
    counts = [0] * family.n
    for s in family.sets:
        for e in mask_elements(s):
            counts[e - 1] += 1
    return counts


@dataclass
class FranklReport:
    family_size: int
    degrees: list[int]
    best_element: int | None
    holds: bool
    excluded_case: bool

    def to_dict(self) -> dict:
        return {
            "family_size": self.family_size,
            "degrees": list(self.degrees),
            "best_element": self.best_element,
            "holds": self.holds,
            "excluded_case": self.excluded_case,
        }


def frankl_check(family: SetFamily) -> FranklReport:
    """Check for an element lying in at least half of the member sets.

    ``holds`` is reported for every family; callers must consult
    ``excluded_case`` before treating ``{∅}`` as a counterexample.
    """
    degrees = element_degrees(family)
    size = len(family)
    best = max(range(family.n), key=lambda i: (degrees[i], -i)) if size else None
    best_element = None if best is None else best + 1
    holds = size == 0 or 2 * max(degrees) >= size
    excluded = family.is_empty_set_only
    if excluded:
        holds = False
        best_element = None
    return FranklReport(size, degrees, best_element, holds, excluded)


def _closed_mask(family_mask: int, n_sets: int) -> bool:
    # family_mask bit s means set s is present
    members = [s for s in range(n_sets) if family_mask >> s & 1]
    for i, x in enumerate(members):
        for y in members[i + 1:]:
            if not family_mask >> (x | y) & 1:
                return False
    return True


def _scan_range(n: int, start: int, stop: int) -> list[int]:
    n_sets = 1 << n
    return [m for m in range(start, stop) if _closed_mask(m, n_sets)]


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("UCSLAB_THREADS", "1")))
    except ValueError:
        return 1


def union_closed_masks(n: int, workers: int | None = None) -> list[int]:
    """Characteristic masks of every union-closed subfamily of 2^[n], ascending.

    The index space is split into disjoint ranges processed independently and
    concatenated in order.
    """
    if n > ENUMERATION_CAP:
        raise CapExceeded(
            f"enumeration is capped at n={ENUMERATION_CAP} "
            f"(n={n} would scan 2^{1 << n} subfamilies)"
        )
    if n < 1:
        raise ValueError("n must be positive")
    total = 1 << (1 << n)
    workers = _thread_count() if workers is None else workers
    if workers <= 1 or total < 4096:
        return _scan_range(n, 0, total)
    step = -(-total // workers)
    bounds = [(lo, min(lo + step, total)) for lo in range(0, total, step)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_scan_range, [n] * len(bounds), *zip(*bounds))
        return [m for part in parts for m in part]


def enumerate_union_closed(n: int) -> Iterator[SetFamily]:
    """Yield every union-closed subfamily of 2^[n] once, in canonical order.

    Canonical order is ascending characteristic mask. The empty family and
    ``{∅}`` are included; callers filter them for conjecture checks.
    """
    for m in union_closed_masks(n):
        yield SetFamily(n, tuple(s for s in range(1 << n) if m >> s & 1))


def count_union_closed(n: int) -> int:
    return len(union_closed_masks(n))


@dataclass
class MinSetWitness:
    element: int
    degree: int
    family_size: int
    min_set: int


def small_min_set_witness(family: SetFamily) -> MinSetWitness | None:
    """Abundant element drawn from a smallest nonempty member of size <= 2.

    The empty set is ignored when looking for the smallest member since it
    carries no elements. Returns ``None`` when the smallest nonempty member
    has three or more elements, or when no candidate verifies.
    """
    closed, _ = is_union_closed(family)
    if not closed or len(family) == 0 or family.is_empty_set_only:
        raise ValueError("family must be union-closed, nonempty and not {∅}")
    nonempty = [s for s in family.sets if s]
    k = min(popcount(s) for s in nonempty)
    if k > 2:
        return None
    degrees = element_degrees(family)
    size = len(family)
    for s in sorted(x for x in nonempty if popcount(x) == k):
        for e in mask_elements(s):
            if 2 * degrees[e - 1] >= size:
                return MinSetWitness(e, degrees[e - 1], size, s)
    return None


@dataclass(frozen=True)
class ThresholdFamilySpec:
    n: int
    lam: int
    lam1: int

    def __post_init__(self):
        if not 0 <= self.lam <= self.n - 1:
            raise ValueError(f"lambda={self.lam} outside [0, {self.n - 1}]")
        if not 1 <= self.lam1 <= self.n:
            raise ValueError(f"lambda1={self.lam1} outside [1, {self.n}]")


def build_threshold_family(spec: ThresholdFamilySpec) -> SetFamily:
    """{x : 1 ∉ x, |x| >= lam} ∪ {x : 1 ∈ x, |x| >= lam1}."""
    sets = []
    for x in range(1 << spec.n):
        size = popcount(x)
        if x & 1:
            if size >= spec.lam1:
                sets.append(x)
        elif size >= spec.lam:
            sets.append(x)
    return SetFamily(spec.n, tuple(sets))


def _union_closed_fast(family: SetFamily) -> bool:
    if len(family) < 2:
        return True
    table = np.zeros(1 << family.n, dtype=bool)
    members = np.fromiter(family.sets, dtype=np.int64)
    table[members] = True
    chunk = max(1, (1 << 22) // len(members))
    for lo in range(0, len(members), chunk):
        unions = members[lo:lo + chunk, None] | members[None, :]
        if not table[unions].all():
            return False
    return True


def _binom(a: int, b: int) -> int:
    return comb(a, b) if 0 <= b <= a else 0


def binomial_degree_formulas(n: int, lam: int, lam1: int) -> tuple[int, int]:
    """Binomial sums for |A_i| (i > 1) and |A_1| in the threshold construction, as given."""
    a_i = sum(_binom(n - 1, j - 1) for j in range(lam, n)) + sum(
        _binom(n - 1, j - 1) for j in range(lam1, n + 1)
    )
    a_1 = sum(_binom(n, j - 1) for j in range(lam1, n + 1))
    return a_i, a_1


@dataclass
class FinalStepReport:
    n_max: int
    checked: int = 0
    violations: list[dict] = field(default_factory=list)
    boundary_cases: list[dict] = field(default_factory=list)
    degree_order_exceptions: list[dict] = field(default_factory=list)
    formula_mismatches: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "checked": self.checked,
            "violations": self.violations,
            "boundary_cases": self.boundary_cases,
            "degree_order_exceptions": self.degree_order_exceptions,
            "formula_mismatches": self.formula_mismatches,
        }


def verify_final_inequality(n: int, n_min: int | None = None) -> FinalStepReport:
    """Check the threshold-family endgame for every admissible (lam, lam1).

    Admissible means ``lam1 <= lam + 1``. A violation is a constructed family
    that is not union-closed or has ``2 |A_1| < |A|``. Separately recorded:
    pairs where some element i > 1 is strictly more frequent than element 1,
    and pairs where the binomial sums differ from direct counts.
    """
    if n > FINAL_STEP_CAP:
        raise CapExceeded(f"final-step verification is capped at n={FINAL_STEP_CAP}")
    report = FinalStepReport(n)
    for m in range(n if n_min is None else n_min, n + 1):
        for lam in range(0, m):
            for lam1 in range(1, min(lam + 1, m) + 1):
                fam = build_threshold_family(ThresholdFamilySpec(m, lam, lam1))
                report.checked += 1
                degrees = element_degrees(fam)
                a1 = degrees[0]
                size = len(fam)
                closed = _union_closed_fast(fam)
                cell = {"n": m, "lambda": lam, "lambda1": lam1,
                        "size": size, "deg1": a1}
                if not closed or 2 * a1 < size:
                    report.violations.append({**cell, "union_closed": closed})
                if lam1 == lam + 1:
                    report.boundary_cases.append({**cell, "slack": 2 * a1 - size})
                others = degrees[1:]
                if others and max(others) > a1:
                    report.degree_order_exceptions.append({**cell, "max_other": max(others)})
                if m >= 2:
                    f_i, f_1 = binomial_degree_formulas(m, lam, lam1)
                    if (f_i, f_1) != (degrees[1], a1):
                        report.formula_mismatches.append(
                            {**cell, "formula_ai": f_i, "count_ai": degrees[1],
                             "formula_a1": f_1, "count_a1": a1}
                        )
    return report
