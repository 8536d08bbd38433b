"""Independent oracles shared by several test files."""

from fractions import Fraction

import sympy


def to_sympy(p):
    """Expanded sympy expression for a MultiPoly."""
    syms = {v: sympy.Symbol(v) for v in p.vars}
    expr = sympy.Integer(0)
    for exps, c in p.terms.items():
        c = Fraction(c)
        term = sympy.Rational(c.numerator, c.denominator)
        for v, e in zip(p.vars, exps):
            term *= syms[v] ** e
        expr += term
    return sympy.expand(expr)
