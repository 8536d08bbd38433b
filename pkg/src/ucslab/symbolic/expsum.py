"""Formal signed exponential sums  phi = sum_j s_j * e^{b_j}.

Terms carry an integer weight (a signed multiplicity) so that sums with
repeated exponents stay compact. ``N`` and ``Exp^m`` are additive in the
weights, so merging equal exponents never changes them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .poly import MultiPoly


@dataclass(frozen=True)
class SignedExpSum:
    terms: tuple[tuple[int, MultiPoly], ...] = ()

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[int, MultiPoly]]) -> "SignedExpSum":
        return cls(tuple((int(s), b) for s, b in terms if s))

    def __add__(self, other: "SignedExpSum") -> "SignedExpSum":
        return SignedExpSum(self.terms + other.terms)

    def __neg__(self) -> "SignedExpSum":
        return SignedExpSum(tuple((-s, b) for s, b in self.terms))

    def __sub__(self, other: "SignedExpSum") -> "SignedExpSum":
        return self + (-other)

    def scale(self, k: int) -> "SignedExpSum":
        return SignedExpSum.from_terms((s * k, b) for s, b in self.terms)

    def __mul__(self, other: "SignedExpSum") -> "SignedExpSum":
        """Formal product: e^b * e^c = e^(b + c)."""
        out = {}
        a, b = self.canonical(), other.canonical()
        for ea, sa in a.items():
            for eb, sb in b.items():
                e = ea + eb
                out[e] = out.get(e, 0) + sa * sb
        return SignedExpSum.from_terms(_sorted(out))

    @property
    def term_count(self) -> int:
        """Number of unit terms ``±e^b`` before any cancellation."""
        return sum(abs(s) for s, _ in self.terms)

    @property
    def N(self) -> int:
        return sum(s for s, _ in self.terms)

    def positive_count(self) -> int:
        return sum(s for s, _ in self.terms if s > 0)

    def negative_count(self) -> int:
        return -sum(s for s, _ in self.terms if s < 0)

    def canonical(self) -> dict[MultiPoly, int]:
        out: dict[MultiPoly, int] = {}
        for s, b in self.terms:
            out[b] = out.get(b, 0) + s
        return {b: s for b, s in out.items() if s}

    def canonical_form(self) -> tuple[tuple[int, MultiPoly], ...]:
        return tuple(_sorted(self.canonical()))

    def formally_equal(self, other: "SignedExpSum") -> bool:
        return self.canonical() == other.canonical()

    def substitute(self, mapping) -> "SignedExpSum":
        return SignedExpSum(tuple((s, b.substitute(mapping)) for s, b in self.terms))


def _sorted(d: dict[MultiPoly, int]) -> list[tuple[int, MultiPoly]]:
    return [(s, b) for b, s in sorted(d.items(), key=lambda t: str(t[0]))]


def exp_moment(phi: SignedExpSum, m: int) -> MultiPoly:
    """Signed power sum ``sum_j s_j b_j^m``."""
    if m < 0:
        raise ValueError("moment order must be non-negative")
    # merge equal exponents first: fewer powers to expand
    out = MultiPoly.zero()
    for b, s in phi.canonical().items():
        out = out + (b ** m).scale(s)
    return out


class RemarkHypothesisError(ValueError):
    """The product identity phi1*phi2 == phi3*phi4 does not hold formally."""


@dataclass
class RemarkResult:
    m: int
    lhs: MultiPoly
    rhs: MultiPoly
    holds: bool
    # Exp^1 is a derivation for the formal product, so the full identity
    # N1*E(phi2) + N2*E(phi1) == N3*E(phi4) + N4*E(phi3) always holds under
    # the hypothesis; reported as a consistency check
    derivation_identity: bool


def remark_check(phi1: SignedExpSum, phi2: SignedExpSum, phi3: SignedExpSum,
                 phi4: SignedExpSum, m: int = 1) -> RemarkResult:
    """Test ``N(phi1) Exp^m(phi2) == N(phi4) Exp^m(phi3)`` given ``phi1 phi2 = phi3 phi4``.

    The product hypothesis is checked by exact term matching of the formal
    products; failure raises :class:`RemarkHypothesisError`, distinct from a
    false conclusion (returned as ``holds=False``).
    """
    if m not in (1, 2):
        raise ValueError("m must be 1 or 2")
    if not (phi1 * phi2).formally_equal(phi3 * phi4):
        raise RemarkHypothesisError("phi1*phi2 and phi3*phi4 have no term matching")
    lhs = exp_moment(phi2, m).scale(phi1.N)
    rhs = exp_moment(phi3, m).scale(phi4.N)
    e = [exp_moment(p, 1) for p in (phi1, phi2, phi3, phi4)]
    der = (e[1].scale(phi1.N) + e[0].scale(phi2.N)) == (e[3].scale(phi3.N) + e[2].scale(phi4.N))
    return RemarkResult(m, lhs, rhs, lhs == rhs, der)
