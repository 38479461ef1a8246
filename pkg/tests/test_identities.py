"""Named weight-2/weight-4 identity builders: structure, deciders, and the
locked residual of the six-point discrepancy.

Oracles: the five-term and antisymmetry combinations are checked against
the exact zero deciders; the five-point primitive f is transcribed twice
(build_f directly, f_term_stream piecewise) and the two must agree term by
term; the six-point discrepancy's decider residual is pinned to its full
coefficient histogram so that any drift in the transcription surfaces.
"""

import random
from collections import Counter
from fractions import Fraction

import pytest

from hyperlog.errors import DegenerateArgument
from hyperlog.identities import (
    antisym_pair,
    build_f,
    build_g,
    cycl,
    discrepancy,
    embed,
    f_term_stream,
    five_term,
    five_term_pair,
    generic_term,
    pair31,
)
from hyperlog.multgroup import WedgePairElement, is_zero
from hyperlog.projective import FieldExpr, PPoint, affine_map, cross_ratio
from hyperlog.symbols import (
    IComb,
    ITerm,
    cobracket_chain,
    delta2,
    delta22,
    rho_project,
    symbol,
)


def pvars(names):
    return tuple(PPoint.var(n) for n in names)


def rational_points(rng, n, forbidden=(0, 1)):
    vals = []
    while len(vals) < n:
        v = Fraction(rng.randint(-97, 97), rng.randint(1, 97))
        if v not in vals and v not in [Fraction(f) for f in forbidden]:
            vals.append(v)
    return tuple(PPoint.const(v) for v in vals)


class TestEmbedding:
    def test_weight1_is_log_one_minus(self):
        # [x]_1 = -I(0; 1/x; 1) must carry the symbol -(1 - x): one atom,
        # coefficient -1, the multiplicative class of 1 - x.
        x = PPoint.var("x")
        terms = symbol(embed(1, x)).residual_terms()
        assert len(terms) == 1
        coeff, rendered = terms[0]
        assert coeff == -1
        one_minus_x = (FieldExpr.const(1) - x.expr).mult_image().residual_terms()
        assert [entry for _, entry in one_minus_x] == [rendered]

    def test_embed_shape(self):
        x = PPoint.var("x")
        [(term, coeff)] = embed(3, x).single_terms()
        assert coeff == -1
        assert term.weight == 3
        assert term.letters[1:] == (PPoint.const(0), PPoint.const(0))

    def test_embed_screens(self):
        with pytest.raises(DegenerateArgument):
            embed(2, PPoint.const(0))
        with pytest.raises(DegenerateArgument):
            embed(2, PPoint.infinity())
        with pytest.raises(DegenerateArgument):
            embed(1, PPoint.const(1))
        # [1]_n is allowed for n >= 2 (zeta value, not divergent).
        embed(2, PPoint.const(1))

    def test_pair31_shape(self):
        x, z = pvars("xz")
        [(term, coeff)] = pair31(x, z).single_terms()
        assert coeff == 1
        assert term.points == (
            PPoint.const(0), x, PPoint.const(0), PPoint.const(0), z, PPoint.const(1),
        )

    def test_pair31_screens(self):
        x, z = pvars("xz")
        with pytest.raises(DegenerateArgument):
            pair31(PPoint.const(0), z)
        with pytest.raises(DegenerateArgument):
            pair31(x, PPoint.const(1))

    def test_delta22_of_pair31_is_wedge_of_dilogs(self):
        x, z = pvars("xz")
        lhs = delta22(pair31(x, z))
        rhs = WedgePairElement.outer(delta2(embed(2, x)), delta2(embed(2, z)))
        assert (lhs + rhs.scale(-1)).is_zero()


class TestFiveTerm:
    def test_five_terms_with_stated_signs(self):
        x, y = pvars("xy")
        entries = five_term(x, y).single_terms()
        assert len(entries) == 5
        # each embeds as -I(...), so the visible coefficients are -signs
        assert sorted(c for _, c in entries) == [-1, -1, 1, 1, 1]

    def test_delta2_vanishes_symbolically(self):
        x, y = pvars("xy")
        ok, sample = is_zero(delta2(five_term(x, y)))
        assert ok, sample[:5]

    def test_rho_symbol_vanishes_symbolically(self):
        x, y = pvars("xy")
        ok, sample = is_zero(rho_project(symbol(five_term(x, y))))
        assert ok, sample[:5]

    def test_delta2_vanishes_at_random_rationals(self):
        rng = random.Random(11)
        for _ in range(5):
            x, y = rational_points(rng, 2)
            ok, sample = is_zero(delta2(five_term(x, y)))
            assert ok, sample[:5]

    def test_degenerate_inputs(self):
        x = PPoint.var("x")
        with pytest.raises(DegenerateArgument):
            five_term(x, x)  # x/y would be 1
        with pytest.raises(DegenerateArgument):
            five_term(PPoint.const(0), x)
        with pytest.raises(DegenerateArgument):
            five_term(x, PPoint.const(1))


class TestBElement:
    def test_five_terms(self):
        x, y, z = pvars("xyz")
        assert len(five_term_pair(x, y, z).single_terms()) == 5

    def test_delta22_vanishes_symbolically(self):
        x, y, z = pvars("xyz")
        ok, sample = is_zero(delta22(five_term_pair(x, y, z)))
        assert ok, sample[:5]

    def test_delta22_vanishes_at_random_rationals(self):
        rng = random.Random(23)
        x, y, z = rational_points(rng, 3)
        ok, sample = is_zero(delta22(five_term_pair(x, y, z)))
        assert ok, sample[:5]

    def test_degenerate_z(self):
        x, y = pvars("xy")
        with pytest.raises(DegenerateArgument):
            five_term_pair(x, y, PPoint.const(1))


class TestAntisym:
    def test_both_deciders_kill_symbolically(self):
        t, u = pvars("tu")
        comb = antisym_pair(t, u)
        ok, sample = is_zero(cobracket_chain(comb))
        assert ok, sample[:5]
        ok, sample = is_zero(rho_project(symbol(comb)))
        assert ok, sample[:5]

    def test_both_deciders_kill_at_random_rationals(self):
        rng = random.Random(37)
        t, u = rational_points(rng, 2)
        comb = antisym_pair(t, u)
        assert is_zero(cobracket_chain(comb))[0]
        assert is_zero(rho_project(symbol(comb)))[0]


class TestCycl:
    def test_constant_builder(self):
        pts = pvars("ABCDE")
        one = pair31(PPoint.var("s"), PPoint.var("w"))
        out = cycl(lambda p: one, pts)
        [(term, coeff)] = out.single_terms()
        assert coeff == 5

    def test_cyclic_invariance_exact(self):
        pts = pvars("ABCDE")
        rotated = pts[1:] + pts[:1]

        def h(p):
            return pair31(
                cross_ratio(p[0], p[1], p[2], p[3]),
                cross_ratio(p[1], p[2], p[3], p[4]),
            )

        diff = cycl(h, pts) - cycl(h, rotated)
        assert not diff.terms

    def test_five_distinct_terms_generic(self):
        pts = pvars("ABCDE")

        def h(p):
            return pair31(
                cross_ratio(p[0], p[1], p[2], p[3]),
                cross_ratio(p[1], p[2], p[3], p[4]),
            )

        assert len(cycl(h, pts).terms) == 5

    def test_wrong_arity(self):
        with pytest.raises(ValueError):
            cycl(lambda p: IComb.zero(), pvars("ABCD"))


class TestG:
    def test_twenty_terms_generic(self):
        assert len(build_g(pvars("ABCDE")).terms) == 20

    def test_one_infinity_wellposed(self):
        pts = (PPoint.infinity(),) + pvars("BCDE")
        out = build_g(pts)
        assert out.terms
        for key in out.terms:
            for term in key:
                assert term.weight == 4

    def test_specialization_consistency(self):
        rng = random.Random(5)
        vals = rational_points(rng, 5)
        symbolic = build_g(pvars("ABCDE"))
        assignment = dict(zip("ABCDE", (p.expr.constant_value() for p in vals)))
        specialized = symbolic.map_points(lambda p: _subst(p, assignment))
        direct = build_g(vals)
        assert not (specialized - direct).terms


def _subst(p, assignment):
    if p.is_inf:
        return p
    value = p.expr.evaluate(assignment)
    return PPoint.const(value)


class TestF:
    def test_term_budget(self):
        comb = build_f(pvars("ABCDE"))
        assert 0 < len(comb.terms) <= 140

    def test_stream_matches_direct_transcription_symbolically(self):
        pts = pvars("ABCDE")
        total = IComb.zero()
        count = 0
        for _descriptor, coeff, build in f_term_stream(pts):
            total = total + build().scale(coeff)
            count += 1
        assert count == 140
        assert not (build_f(pts) - total).terms

    def test_stream_matches_at_random_rationals(self):
        rng = random.Random(19)
        pts = rational_points(rng, 5)
        total = IComb.zero()
        for _descriptor, coeff, build in f_term_stream(pts):
            total = total + build().scale(coeff)
        assert not (build_f(pts) - total).terms

    def test_quad_coefficients_audit(self):
        # the four [.]_4 families enter f with -(+-10)/20 = -+1/2
        pts = pvars("ABCDE")
        quad_coeffs = Counter()
        for descriptor, coeff, _build in f_term_stream(pts):
            if descriptor[0] == "quad":
                quad_coeffs[coeff] += 1
        assert quad_coeffs == {Fraction(1, 2): 15, Fraction(-1, 2): 5}

    def test_random_rational_tuples_do_not_degenerate(self):
        rng = random.Random(29)
        for _ in range(3):
            build_f(rational_points(rng, 5))


class TestDiscrepancy:
    def test_needs_six_points(self):
        with pytest.raises(ValueError):
            discrepancy(pvars("ABCDE"))

    def test_divergent_generic_term(self):
        a, b, c, d, e = pvars("ABCDE")
        with pytest.raises(DegenerateArgument):
            generic_term((a, a, b, c, d, e))

    def test_affine_invariance_of_symbol(self):
        pts = pvars("ABCDEF")
        base = symbol(generic_term(pts))
        mapped = symbol(
            generic_term(tuple(affine_map(p, Fraction(3, 2), Fraction(-7, 5)) for p in pts))
        )
        assert (base + mapped.scale(-1)).is_zero()

    def test_printed_formula_residual_is_locked(self):
        """The as-printed six-point identity leaves a nonzero decider residual.

        This pins the transcription: the cyclic bracket combination with
        position patterns (1234,2345), (5432,5431), (1243,1245), (5423,5421),
        coefficients (1, -1, -3, 3), six g-blocks, and the four half-weight
        [.]_4 families produces exactly this residual histogram under the
        iterated-cobracket decider.  Any edit to the transcription moves it.
        """
        ch = cobracket_chain(discrepancy(pvars("ABCDEF"))).canonicalize()
        hist = Counter(ch.terms.values())
        assert sum(hist.values()) == 9918
        expected = {
            Fraction(1, 20): 3684, Fraction(-1, 20): 3684,
            Fraction(1, 10): 693, Fraction(-1, 10): 693,
            Fraction(3, 20): 243, Fraction(-3, 20): 243,
            Fraction(39, 20): 120, Fraction(-39, 20): 120,
            Fraction(19, 10): 80, Fraction(-19, 10): 80,
            Fraction(1, 5): 60, Fraction(-1, 5): 60,
            Fraction(9, 5): 30, Fraction(-9, 5): 30,
            Fraction(17, 20): 21, Fraction(-17, 20): 21,
            Fraction(2): 10, Fraction(-2): 10,
            Fraction(3, 4): 6, Fraction(-3, 4): 6,
            Fraction(4, 5): 6, Fraction(-4, 5): 6,
            Fraction(9, 10): 3, Fraction(-9, 10): 3,
            Fraction(3, 10): 3, Fraction(-3, 10): 3,
        }
        assert dict(hist) == expected

    def test_rho_residual_doubles_the_chain_count(self):
        comb = discrepancy(pvars("ABCDEF"))
        rho = rho_project(symbol(comb)).canonicalize()
        assert len(rho.terms) == 2 * 9918
