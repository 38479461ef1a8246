"""Exact polynomial substrate: arithmetic, gcd, normal forms, evaluation."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hyperlog.multipoly import (
    MultiPoly,
    exact_div,
    poly_arith,
    poly_eval,
    poly_gcd,
)


def V(name: str) -> MultiPoly:
    return MultiPoly.var(name)


A, B, C, D = (V(n) for n in "ABCD")
one = MultiPoly.const(1)


class TestArith:
    def test_telescoping_sum(self):
        assert poly_arith(A - B, B - C, "add") == A - C

    def test_mul_by_zero(self):
        assert poly_arith(A - B, MultiPoly.zero(), "mul").is_zero()

    def test_difference_of_squares(self):
        assert poly_arith(A - B, A + B, "mul") == A * A - B * B

    def test_unknown_op(self):
        with pytest.raises(ValueError):
            poly_arith(A, B, "div")

    def test_pow(self):
        p = A - B
        assert p ** 3 == p * p * p
        assert p ** 0 == one

    def test_substitute(self):
        p = A * A - B
        q = p.substitute({"A": B + one})
        assert q == B * B + B + one


class TestEval:
    def test_difference(self):
        assert poly_eval(A - B, {"A": 3, "B": 1}) == 2

    def test_zero(self):
        assert poly_eval(MultiPoly.zero(), {}) == 0

    def test_squares(self):
        assert poly_eval(A * A - B * B, {"A": 3, "B": 2}) == 5

    def test_missing_variable(self):
        with pytest.raises(ValueError):
            poly_eval(A - B, {"A": 1})


class TestNormalForm:
    def test_primitive_strips_content(self):
        p = (A - B).scale(Fraction(6, 5))
        content, prim = p.content_and_primitive()
        assert prim == A - B
        assert content == Fraction(6, 5)
        assert content * Fraction(1) * 1 == Fraction(6, 5)

    def test_primitive_sign(self):
        # Leading coefficient positive under graded-lex ordered by name.
        p = B - A
        assert p.primitive() == A - B

    def test_const_poly(self):
        c, prim = MultiPoly.const(Fraction(-3, 4)).content_and_primitive()
        assert c == Fraction(-3, 4)
        assert prim == one


class TestExactDiv:
    def test_product_divides(self):
        p = (A - B) * (C - D)
        assert exact_div(p, A - B) == C - D

    def test_non_divisible(self):
        assert exact_div(A - B, A - C) is None

    def test_constant_divisor(self):
        assert exact_div((A - B).scale(6), MultiPoly.const(3)) == (A - B).scale(2)


class TestGcd:
    def test_coprime_linear(self):
        assert poly_gcd(A - B, A - C) == one

    def test_shared_linear_factor(self):
        p = (A - B) * (C - D)
        q = (A - B) * (A - C)
        assert poly_gcd(p, q) == A - B

    def test_univariate_example(self):
        # gcd(x^2 - 1, x^2 - 2x + 1) = x - 1, confirmed by division oracle.
        x = V("x")
        p = x * x - one
        q = x * x - x.scale(2) + one
        g = poly_gcd(p, q)
        assert g == x - one
        assert exact_div(p, g) is not None
        assert exact_div(q, g) is not None

    def test_gcd_of_equal(self):
        p = (A - B) * (A - C)
        assert poly_gcd(p, p) == p.primitive()

    def test_gcd_with_zero(self):
        assert poly_gcd(MultiPoly.zero(), (A - B).scale(3)) == A - B
        with pytest.raises(ValueError):
            poly_gcd(MultiPoly.zero(), MultiPoly.zero())

    def test_quadratic_common_factor(self):
        x, y = V("x"), V("y")
        common = x * x + y
        p = common * (x - y)
        q = common * (x + y)
        assert poly_gcd(p, q) == common

    def test_sympy_oracle_random(self):
        # Independent oracle: sympy's multivariate gcd on random products.
        import random

        import sympy

        sx, sy, sz = sympy.symbols("x y z")
        x, y, z = V("x"), V("y"), V("z")
        rng = random.Random(7)
        lin_mine = [x - y, x + y, y - z, x - one, z + one, x * y - one]
        lin_sym = [sx - sy, sx + sy, sy - sz, sx - 1, sz + 1, sx * sy - 1]
        for _ in range(25):
            ia = [rng.randrange(3) for _ in lin_mine]
            ib = [rng.randrange(3) for _ in lin_mine]
            pm = one
            qm = one
            ps = sympy.Integer(1)
            qs = sympy.Integer(1)
            for f_m, f_s, ea, eb in zip(lin_mine, lin_sym, ia, ib):
                pm, qm = pm * f_m ** ea, qm * f_m ** eb
                ps, qs = ps * f_s ** ea, qs * f_s ** eb
            g_mine = poly_gcd(pm, qm)
            g_sym = sympy.Poly(sympy.gcd(sympy.expand(ps), sympy.expand(qs)), sx, sy, sz)
            # Compare degrees and verify mutual divisibility, which pins the
            # gcd up to the constant the normal form fixes.
            assert exact_div(pm, g_mine) is not None
            assert exact_div(qm, g_mine) is not None
            assert g_mine.total_degree() == g_sym.total_degree()


small_coeff = st.integers(min_value=-4, max_value=4)


def random_poly(draw, vars_=("x", "y")):
    terms = draw(
        st.dictionaries(
            st.tuples(st.integers(0, 2), st.integers(0, 2)),
            small_coeff,
            max_size=4,
        )
    )
    p = MultiPoly.zero()
    for (ex, ey), c in terms.items():
        mono = V(vars_[0]) ** ex * V(vars_[1]) ** ey
        p = p + mono.scale(c)
    return p


@st.composite
def polys(draw):
    return random_poly(draw)


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(polys(), polys(), polys())
    def test_gcd_scaling_associate(self, p, q, r):
        # gcd(p*r, q*r) is an associate of gcd(p, q)*r.
        if p.is_zero() or q.is_zero() or r.is_zero():
            return
        lhs = poly_gcd(p * r, q * r)
        rhs = (poly_gcd(p, q) * r).primitive()
        assert exact_div(lhs, rhs) is not None and exact_div(rhs, lhs) is not None

    @settings(max_examples=60, deadline=None)
    @given(polys(), polys())
    def test_eval_is_ring_morphism(self, p, q):
        pt = {"x": Fraction(3, 2), "y": Fraction(-5, 7)}
        assert poly_eval(p * q, pt) == poly_eval(p, pt) * poly_eval(q, pt)
        assert poly_eval(p + q, pt) == poly_eval(p, pt) + poly_eval(q, pt)

    @settings(max_examples=40, deadline=None)
    @given(polys(), polys())
    def test_gcd_divides_both(self, p, q):
        if p.is_zero() and q.is_zero():
            return
        g = poly_gcd(p, q)
        if not p.is_zero():
            assert exact_div(p, g) is not None
        if not q.is_zero():
            assert exact_div(q, g) is not None
