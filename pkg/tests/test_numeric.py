"""Polylogarithm evaluation, the single-valued map, and path integrals."""

import cmath
import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlog.errors import (
    BranchAmbiguity,
    DegenerateArgument,
    DivergentTerm,
    PathError,
)
from hyperlog.numeric import (
    ComplexVal,
    Path,
    bernoulli_numbers,
    bloch_wigner,
    iterated_integral_num,
    li_n,
    shuffle_check_num,
    svp,
    zeta_value,
)
from hyperlog.projective import PPoint
from hyperlog.symbols import ITerm

mpmath.mp.dps = 30

CATALAN = 0.9159655941772190150546035149324

def C(x) -> PPoint:
    return PPoint.const(Fraction(x))


def make_term(a0, letters, a1) -> ITerm:
    return ITerm.make(C(a0), [C(x) for x in letters], C(a1))


# ---------------------------------------------------------------- ComplexVal


class TestComplexVal:
    def test_arithmetic_tracks_error_conservatively(self):
        a = ComplexVal(1 + 2j, 1e-10)
        b = ComplexVal(3 - 1j, 2e-10)
        assert (a + b).err >= 3e-10
        assert (a * b).err >= abs(a.val) * 2e-10 + abs(b.val) * 1e-10
        q = a / b
        assert abs(q.val - (1 + 2j) / (3 - 1j)) < 1e-15
        assert q.err > 0

    def test_division_by_noise_refused(self):
        with pytest.raises(DegenerateArgument):
            ComplexVal(1.0) / ComplexVal(1e-12, 1e-11)

    def test_re_im_accessors(self):
        v = ComplexVal(1.5 - 2.5j)
        assert v.re == 1.5 and v.im == -2.5


# ---------------------------------------------------------------- Bernoulli


class TestBernoulli:
    def test_first_values(self):
        bs = bernoulli_numbers(9)
        assert bs[0] == 1
        assert bs[1] == Fraction(-1, 2)
        assert bs[2] == Fraction(1, 6)
        assert bs[3] == 0
        assert bs[4] == Fraction(-1, 30)
        assert bs[8] == Fraction(-1, 30)

    def test_zeta_values(self):
        assert abs(zeta_value(2) - math.pi**2 / 6) < 1e-15
        assert abs(zeta_value(4) - math.pi**4 / 90) < 1e-15
        assert abs(zeta_value(3) - 1.2020569031595942854) < 1e-14
        assert zeta_value(0) == -0.5
        assert zeta_value(-2) == 0.0
        assert abs(zeta_value(-1) - (-1.0 / 12.0)) < 1e-16
        with pytest.raises(DegenerateArgument):
            zeta_value(1)


# ---------------------------------------------------------------- li_n


class TestLi:
    def test_li1_half_is_log2(self):
        assert abs(li_n(1, 0.5).val - math.log(2)) < 1e-14

    def test_li2_at_one_is_zeta2(self):
        assert abs(li_n(2, 1).val - math.pi**2 / 6) < 1e-14

    def test_li_at_zero(self):
        for n in (1, 2, 3, 4):
            assert li_n(n, 0).val == 0

    def test_cut_raises(self):
        with pytest.raises(BranchAmbiguity):
            li_n(2, 1.5)
        with pytest.raises(BranchAmbiguity):
            li_n(3, 100.0)

    def test_li1_pole_refused(self):
        with pytest.raises(DegenerateArgument):
            li_n(1, 1)

    def test_weight_validated(self):
        with pytest.raises(DegenerateArgument):
            li_n(0, 0.5)

    def test_against_independent_oracle_all_regions(self):
        rng = random.Random(20260821)
        for n in (1, 2, 3, 4):
            for _ in range(40):
                r = rng.uniform(0.05, 4.0)
                th = rng.uniform(0.05, 2 * math.pi - 0.05)
                z = r * cmath.exp(1j * th)
                got = li_n(n, z)
                want = complex(mpmath.polylog(n, z))
                assert abs(got.val - want) < 1e-12 * (1 + abs(want))

    def test_region_seams_are_continuous(self):
        for n in (2, 3, 4):
            for base in (0.5, 2.0):
                for th in (0.3, 2.0, 4.0):
                    lo = li_n(n, (base - 1e-9) * cmath.exp(1j * th)).val
                    hi = li_n(n, (base + 1e-9) * cmath.exp(1j * th)).val
                    assert abs(lo - hi) < 1e-7

    def test_derivative_recursion(self):
        # Li_n(z+h) - Li_n(z) = Li_{n-1}(z)/z * h + O(h^2)
        rng = random.Random(5)
        h = 1e-6
        for n in (2, 3, 4):
            for _ in range(10):
                z = cmath.rect(rng.uniform(0.1, 0.8), rng.uniform(0.1, 6.2))
                lhs = li_n(n, z + h).val - li_n(n, z).val
                rhs = li_n(n - 1, z).val / z * h
                assert abs(lhs - rhs) < 1e-10

    @settings(max_examples=25, deadline=None)
    @given(
        st.floats(min_value=0.05, max_value=0.7),
        st.floats(min_value=0.05, max_value=6.2),
        st.sampled_from([2, 3, 4]),
    )
    def test_duplication(self, r, th, n):
        z = r * cmath.exp(1j * th)
        lhs = li_n(n, z * z).val
        rhs = 2 ** (n - 1) * (li_n(n, z).val + li_n(n, -z).val)
        assert abs(lhs - rhs) < 1e-12 * (1 + abs(lhs))

    def test_error_estimates_are_honest(self):
        rng = random.Random(99)
        for n in (2, 3, 4):
            for _ in range(20):
                z = cmath.rect(rng.uniform(0.1, 3.5), rng.uniform(0.1, 6.2))
                got = li_n(n, z)
                want = complex(mpmath.polylog(n, z))
                assert abs(got.val - want) <= got.err + 1e-13


# ---------------------------------------------------------------- svp


class TestSvp:
    def test_matches_bloch_wigner_at_weight_two(self):
        rng = random.Random(42)
        for _ in range(100):
            z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            if abs(z) < 1e-2 or abs(z - 1) < 1e-2:
                continue
            assert abs(svp(2, z) - bloch_wigner(z)) < 1e-10

    def test_weight_three_at_one_is_zeta3(self):
        assert abs(svp(3, 1) - 1.2020569031595943) < 1e-12

    def test_weight_four_at_one_vanishes(self):
        assert svp(4, 1) == 0.0

    def test_zero_refused(self):
        with pytest.raises(DegenerateArgument):
            svp(2, 0)

    def test_weight_one_refused(self):
        with pytest.raises(DegenerateArgument):
            svp(1, 0.5)

    def test_vanishes_on_reals_for_even_weight(self):
        for x in (-2.5, -0.4, 0.3, 0.9, 1.0, 2.0, 7.5):
            assert abs(svp(2, x)) < 1e-12
            assert abs(svp(4, x)) < 1e-12

    def test_continuous_across_cut(self):
        for n in (2, 3, 4):
            mid = svp(n, 3.0)
            up = svp(n, 3.0 + 1e-8j)
            dn = svp(n, 3.0 - 1e-8j)
            assert abs(up - mid) < 1e-6
            assert abs(dn - mid) < 1e-6

    def test_dilog_special_value(self):
        assert abs(bloch_wigner(1j) - CATALAN) < 1e-12

    def test_conjugation_antisymmetry_even_weight(self):
        # R_n is Im for even n, so conjugating z flips the sign
        rng = random.Random(3)
        for _ in range(20):
            z = complex(rng.uniform(-2, 2), rng.uniform(0.05, 2))
            assert abs(svp(2, z) + svp(2, z.conjugate())) < 1e-11
            assert abs(svp(4, z) + svp(4, z.conjugate())) < 1e-11
            assert abs(svp(3, z) - svp(3, z.conjugate())) < 1e-11


# ---------------------------------------------------------------- integrals


class TestIteratedIntegral:
    def test_empty_word_is_one(self):
        assert iterated_integral_num(make_term(0, [], 1)).val == 1

    def test_closed_path_vanishes(self):
        assert iterated_integral_num(make_term(2, [5], 2)).val == 0

    def test_divergent_endpoints_refused(self):
        with pytest.raises(DivergentTerm):
            iterated_integral_num(make_term(0, [0, 5], 1))
        with pytest.raises(DivergentTerm):
            iterated_integral_num(make_term(0, [5, 1], 1))

    def test_weight_one_is_a_logarithm(self):
        # I(0; a; 1) = log((a-1)/a) on the principal branch for a off [0,1]
        for a in (Fraction(3), Fraction(-2), Fraction(5, 2)):
            got = iterated_integral_num(make_term(0, [a], 1)).val
            want = cmath.log((a - 1) / a)
            assert abs(got - want) < 1e-12

    def test_dilog_sign_convention(self):
        # -I(0; 1/z, 0; 1) = Li_2(z) at z = 0.3
        z = Fraction(3, 10)
        term = make_term(0, [1 / z, 0], 1)
        got = -iterated_integral_num(term).val
        assert abs(got - li_n(2, complex(z)).val) < 1e-11

    def test_polylog_ladder_all_weights(self):
        rng = random.Random(20260821)
        for n in (1, 2, 3, 4):
            for _ in range(6):
                z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
                if abs(z) < 0.05:
                    continue
                term = ITerm.make(0j, [1 / z] + [0j] * (n - 1), 1 + 0j)
                got = -iterated_integral_num(term).val
                assert abs(got - li_n(n, z).val) < 1e-10

    def test_path_reversal_weight_three(self):
        rng = random.Random(17)
        for _ in range(5):
            letters = [
                complex(rng.uniform(1.2, 3.0), rng.uniform(0.3, 2.0))
                for _ in range(3)
            ]
            fwd = ITerm.make(0j, letters, 1 + 0j)
            rev = ITerm.make(1 + 0j, list(reversed(letters)), 0j)
            vf = iterated_integral_num(fwd).val
            vr = iterated_integral_num(rev).val
            assert abs(vf + vr) < 1e-10

    def test_path_independence_homotopic(self):
        term = make_term(0, [Fraction(1, 2), 2], 1)
        p1 = Path.of([0, 0.5 + 0.4j, 1])
        p2 = Path.of([0, 0.2 + 0.25j, 0.8 + 0.25j, 1])
        v1 = iterated_integral_num(term, p1).val
        v2 = iterated_integral_num(term, p2).val
        assert abs(v1 - v2) < 1e-9

    def test_interior_singularity_detoured_automatically(self):
        # letter sits exactly on the default straight path
        term = make_term(0, [Fraction(1, 2), 3], 1)
        val = iterated_integral_num(term).val
        ref = iterated_integral_num(term, Path.of([0, 0.5 + 0.3j, 1])).val
        assert abs(val - ref) < 1e-9

    def test_both_end_singular_midpoint_split(self):
        # I(0; 1, x, 0; 1): letter 1 at the endpoint value, letter 0 at the base
        term = make_term(0, [1, -3, 0], 1)
        v = iterated_integral_num(term)
        rev = make_term(1, [0, -3, 1], 0)
        vr = iterated_integral_num(rev)
        assert abs(v.val + vr.val) < 1e-9

    def test_waypoint_on_singularity_refused(self):
        term = make_term(0, [Fraction(1, 2), 3], 1)
        with pytest.raises(PathError):
            iterated_integral_num(term, Path.of([0, 0.5, 1]))

    def test_path_endpoints_must_match(self):
        term = make_term(0, [5], 1)
        with pytest.raises(PathError):
            iterated_integral_num(term, Path.of([0, 2]))

    def test_symbolic_points_refused(self):
        term = ITerm.make(PPoint.const(Fraction(0)), [PPoint.var("x")], PPoint.const(Fraction(1)))
        with pytest.raises(DegenerateArgument):
            iterated_integral_num(term)

    def test_infinity_refused(self):
        term = ITerm.make(PPoint.const(Fraction(0)), [PPoint.infinity()], PPoint.const(Fraction(1)))
        with pytest.raises(DegenerateArgument):
            iterated_integral_num(term)

    def test_error_estimate_covers_series_oracle(self):
        z = Fraction(2, 5)
        term = make_term(0, [1 / z, 0, 0], 1)
        got = iterated_integral_num(term)
        want = -li_n(3, complex(z)).val
        assert abs(got.val - want) <= max(got.err, 1e-12)


class TestShuffleNumeric:
    def test_single_letters(self):
        assert shuffle_check_num([3 + 1j], [-2 + 0.5j], 0, 1) < 1e-9

    def test_empty_factor_is_exact(self):
        assert shuffle_check_num([2 + 1j, 3], [], 0, 1) < 1e-14

    def test_weight_four(self):
        assert shuffle_check_num([3 + 1j, -1.5j], [-2 + 0.5j, 4], 0, 1) < 1e-8

    def test_mixed_lengths(self):
        assert shuffle_check_num([2.5, -1 + 1j], [3j], 0, 1) < 1e-9
