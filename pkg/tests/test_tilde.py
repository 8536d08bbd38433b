import random

import pytest
import sympy

from ucslab.symbolic.expsum import RemarkHypothesisError, SignedExpSum, exp_moment, remark_check
from ucslab.symbolic.poly import MultiPoly, w
from ucslab.symbolic.tilde import (ExponentMap, ansatz_substitution, build_tilde, count_formula,
                                   vertex_terms, weights_by_vertex)

from _oracles import to_sympy


def esum(*pairs):
    return SignedExpSum.from_terms(pairs)


# signed exponential sums ------------------------------------------------------

def test_empty_moment():
    assert exp_moment(SignedExpSum(), 1).is_zero()
    assert exp_moment(SignedExpSum(), 2).is_zero()


def test_counts_and_product():
    a = esum((1, w(1)), (-2, w(2)))
    b = esum((3, MultiPoly.const(0)), (1, w(1)))
    assert a.N == -1 and a.term_count == 3
    assert a.positive_count() == 1 and a.negative_count() == 2
    prod = a * b
    assert prod.N == a.N * b.N
    assert prod.canonical() == {w(1): 3, w(2): -6, w(1).scale(2): 1, w(1) + w(2): -2}


def test_canonical_merges_and_cancels():
    a = esum((1, w(1)), (-1, w(1)), (2, w(2)))
    assert a.canonical() == {w(2): 2}
    assert a.formally_equal(esum((2, w(2))))


def test_moment_is_order_independent():
    terms = [(random.Random(k).choice((-2, -1, 1, 3)), w(k % 3 + 1).scale(k)) for k in range(1, 9)]
    shuffled = terms[:]
    random.Random(5).shuffle(shuffled)
    for m in (1, 2):
        assert exp_moment(esum(*terms), m) == exp_moment(esum(*shuffled), m)


def product_pair():
    p = esum((1, w(1)), (1, w(2)), (-1, MultiPoly.const(0)))
    q = esum((2, w(1)), (-1, w(3)))
    return p, q


def test_remark_trivial_swap():
    p, q = product_pair()
    for m in (1, 2):
        res = remark_check(p, q, q, p, m)
        assert res.holds and res.derivation_identity


def test_remark_identical_pairs_not_automatic():
    # phi1 = phi3 and phi2 = phi4: the conclusion reads N(p) E(q) == N(q) E(p),
    # which depends on the instance
    p, q = product_pair()
    res = remark_check(p, q, p, q, 1)
    assert res.derivation_identity
    assert res.lhs == exp_moment(q, 1).scale(p.N) and res.rhs == exp_moment(p, 1).scale(q.N)
    assert not res.holds
    assert remark_check(p, p, p, p, 1).holds


def test_remark_permuted_terms():
    p, q = product_pair()
    rng = random.Random(3)
    pt, qt = list(p.terms), list(q.terms)
    rng.shuffle(pt)
    rng.shuffle(qt)
    res = remark_check(p, q, SignedExpSum(tuple(qt)), SignedExpSum(tuple(pt)), 2)
    assert res.holds


def test_remark_broken_hypothesis():
    p, q = product_pair()
    with pytest.raises(RemarkHypothesisError):
        remark_check(p, q, p, esum((1, w(4))), 1)
    with pytest.raises(ValueError):
        remark_check(p, q, q, p, 3)


# tilde quantities ---------------------------------------------------------------

@pytest.mark.parametrize("n", range(4, 9))
def test_j1_counts(n):
    for q in ("R", "S", "L"):
        assert build_tilde(q, 1, n).N == count_formula(q, n)


def test_r2_term_count_matches_index_sets():
    for n in (4, 5, 6):
        # |{2 in x, n not in x}| + |{2 not in x, n in x}| + twice the same with 1 in x
        expected = 2 * 2 ** (n - 2) + 2 * (2 * 2 ** (n - 3))
        assert build_tilde("R", 2, n).term_count == expected


@pytest.mark.parametrize("n", [4, 5, 6])
def test_index_and_gradient_forms_agree(n):
    for q in ("R", "S", "L"):
        for j in range(2, n):
            assert weights_by_vertex(q, j, n, "index") == weights_by_vertex(q, j, n, "gradient")


def test_pair_readings_differ():
    assert weights_by_vertex("L", 2, 5, pairs="ordered") != weights_by_vertex("L", 2, 5, pairs="distinct")


@pytest.mark.parametrize("args", [("R", 2, 3), ("R", 0, 5), ("R", 5, 5), ("Q", 2, 5)])
def test_tilde_domain_errors(args):
    with pytest.raises(ValueError):
        vertex_terms(*args)
    with pytest.raises(ValueError):
        vertex_terms("R", 1, 5, form="index")


def test_r2_moment_against_sympy():
    # independent encoding of the index-condition sums at n = 4
    n = 4
    ws = sympy.symbols("w1:5")
    d = sympy.Symbol("delta")
    total = 0
    for x in range(16):
        members = [k for k in range(4) if x >> k & 1]
        b = -(sum(ws[k] for k in members) - d) ** 2
        has = lambda k: (k - 1) in members
        sign = 0
        if has(2) and not has(n):
            sign += 1
        if has(n) and not has(2):
            sign -= 1
        if has(1) and has(2) and not has(n):
            sign -= 2
        if has(1) and has(n) and not has(2):
            sign += 2
        total += sign * b
    assert to_sympy(exp_moment(build_tilde("R", 2, n), 1)) == sympy.expand(total)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_divisibility_and_collapse(n):
    emap = ExponentMap(n)
    wn = MultiPoly.var(f"w{n}")
    for j in range(2, n):
        r = build_tilde("R", j, n, exponents=emap)
        sl = build_tilde("S", j, n, exponents=emap) + build_tilde("L", j, n, exponents=emap)
        for m in (1, 2):
            for phi in (r, sl):
                e = exp_moment(phi, m)
                q = e.div_exact(wn - w(j))
                assert q * (wn - w(j)) == e
                assert e.substitute({f"w{k}": wn for k in range(2, n)}).is_zero()


def test_affine_exponent_kills_first_moment():
    # the plain exponent (w, x) - delta makes Exp(R~_j) vanish identically
    for n in (4, 5):
        assert exp_moment(build_tilde("R", 2, n, "affine"), 1).is_zero()
        assert not exp_moment(build_tilde("R", 2, n), 1).is_zero()


def test_ansatz_substitution():
    sub = ansatz_substitution(6, 2)
    assert sub == {"w3": w(2), "w4": w(6), "w5": w(6)}
    assert ansatz_substitution(5, 0)["w2"] == w(5)
    with pytest.raises(ValueError):
        ansatz_substitution(5, 4)


def test_exponent_map_rejects_mixed_options():
    with pytest.raises(ValueError):
        build_tilde("R", 2, 5, "affine", exponents=ExponentMap(5))
