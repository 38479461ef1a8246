"""Named combinations: polylog embeddings, the two-variable depth pieces,
and the weight-4 discrepancy that the deciders must kill.

Brackets used below (all Q-linear combinations of ITerms):

  embed(n, x)    [x]_n  = -I(0; 1/x, 0^(n-1); 1)
  pair31(x, z)   [x,z]  = I(0; x, 0, 0, z; 1)       (weight 4, depth 2)

The five-point machinery: for a 5-tuple (p1..p5) and the cross-ratio
r(i,j,k,l) = (pi-pk)(pj-pl) / ((pi-pl)(pj-pk)),

  g(p) = cycl[ [r(1234), r(2345)] - [r(5432), r(5431)]
               - 3[r(1243), r(1245)] + 3[r(5423), r(5421)] ]

  -20 f(p) = g(p) - sum_{i=1..5} g(p with p_i at infinity)
             - 10 cycl[(p2-p3)/(p2-p1)]_4 - 10 cycl[(p1-p2)/(p1-p4)]_4
             + 10 cycl[(p2-p1)/(p2-p4)]_4 - 10 cycl[(p4-p2)/(p4-p1)]_4

where cycl h(p1..p5) sums h over the five cyclic rotations, read
positionally with no hidden symmetrization.

  discrepancy(a0..a5) = I(a0; a1, a2, a3, a4; a5)
                        - f(a0, a1, a2, a3, a4) + f(a1, a2, a3, a4, a5)

The headline claims: the chain and rho deciders both kill the
discrepancy; five_term(x, y) = sum of five [.]_2 with signs
(+, -, -, +, -) has vanishing weight-2 cobracket; the same five-term
pattern in the first slot of pair31 has vanishing (2,2) cobracket; and
pair31(t, u) + pair31(u, t) dies under both weight-4 deciders.

Construction is eager about degeneracy: every bracket argument is
screened and a DegenerateArgument names the offending subexpression, so
a bad specialization fails loudly at build time, not deep in recursion.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .errors import DegenerateArgument
from .projective import FieldExpr, PPoint, cross_ratio, one_minus
from .symbols import IComb, ITerm

_ZERO = PPoint.const(0)
_ONE = PPoint.const(1)


def _screen(x: PPoint, forbidden: dict[PPoint | None, str], label: str) -> None:
    for bad, why in forbidden.items():
        if bad is None:
            if x.is_inf:
                raise DegenerateArgument(f"{label} is at infinity ({why})")
        elif x == bad:
            raise DegenerateArgument(f"{label} equals {bad!r} ({why})")


def embed(n: int, x: PPoint, label: str = "argument") -> IComb:
    """[x]_n as -I(0; 1/x, 0^(n-1); 1)."""
    if n < 1:
        raise ValueError("weight must be positive")
    _screen(
        x,
        {None: "1/x would collapse to 0", _ZERO: "1/x undefined"},
        f"[{label}]_{n}",
    )
    if n == 1 and x == _ONE:
        raise DegenerateArgument(f"[{label}]_1 diverges at 1")
    inv = PPoint.finite(FieldExpr.const(1) / x.expr)
    term = ITerm.make(_ZERO, [inv] + [_ZERO] * (n - 1), _ONE)
    return IComb.from_term(term, -1)


def pair31(x: PPoint, z: PPoint, label: str = "pair") -> IComb:
    """[x, z] = I(0; x, 0, 0, z; 1), the weight-4 depth-2 bracket."""
    _screen(x, {_ZERO: "leading entry collides with the basepoint"}, f"{label}: first slot")
    _screen(z, {_ONE: "trailing entry collides with the endpoint"}, f"{label}: second slot")
    return IComb.from_term(ITerm.make(_ZERO, [x, _ZERO, _ZERO, z], _ONE))


# ---------------------------------------------------------------------------
# Five-term combinations
# ---------------------------------------------------------------------------

def _ratio_points(x: PPoint, y: PPoint, label: str) -> list[tuple[PPoint, str]]:
    """The five arguments x, y, x/y, (1-x)/(1-y), (1-1/x)/(1-1/y)."""
    for p, name in ((x, "x"), (y, "y")):
        _screen(
            p,
            {None: "ratios degenerate", _ZERO: "ratios degenerate", _ONE: "complements degenerate"},
            f"{label}: {name}",
        )
    fx, fy = x.expr, y.expr
    one = FieldExpr.const(1)
    out = [
        (x, f"{label}: x"),
        (y, f"{label}: y"),
        (PPoint.finite(fx / fy), f"{label}: x/y"),
        (PPoint.finite((one - fx) / (one - fy)), f"{label}: (1-x)/(1-y)"),
        (
            PPoint.finite((one - one / fx) / (one - one / fy)),
            f"{label}: (1-1/x)/(1-1/y)",
        ),
    ]
    for p, name in out[2:]:
        _screen(
            p,
            {_ZERO: "derived argument degenerates", _ONE: "derived argument degenerates"},
            name,
        )
    return out


_FIVE_SIGNS = (1, -1, -1, 1, -1)


def five_term(x: PPoint, y: PPoint) -> IComb:
    """The weight-2 five-term combination with signs (+, -, -, +, -)."""
    out = IComb.zero()
    for (p, name), sign in zip(_ratio_points(x, y, "five_term"), _FIVE_SIGNS):
        out = out + embed(2, p, name).scale(sign)
    return out


def five_term_pair(x: PPoint, y: PPoint, z: PPoint) -> IComb:
    """The same five-term pattern in the first slot of pair31."""
    out = IComb.zero()
    for (p, name), sign in zip(_ratio_points(x, y, "five_term_pair"), _FIVE_SIGNS):
        out = out + pair31(p, z, name).scale(sign)
    return out


# ---------------------------------------------------------------------------
# The five-point and six-point combinations
# ---------------------------------------------------------------------------

def _cr(pts: Sequence[PPoint], i: int, j: int, k: int, l: int, label: str) -> PPoint:
    """Cross-ratio of pts at 1-indexed positions; renames degeneracy."""
    try:
        return cross_ratio(pts[i - 1], pts[j - 1], pts[k - 1], pts[l - 1])
    except DegenerateArgument as exc:
        raise DegenerateArgument(f"{label}: cross-ratio({i}{j}{k}{l}) degenerate: {exc}") from exc


def cycl(fn: Callable[[Sequence[PPoint]], IComb], pts: Sequence[PPoint]) -> IComb:
    """Sum of fn over the five cyclic rotations of a 5-tuple."""
    pts = tuple(pts)
    if len(pts) != 5:
        raise ValueError("cyclic sum needs five points")
    out = IComb.zero()
    for s in range(5):
        out = out + fn(pts[s:] + pts[:s])
    return out


def build_g(pts: Sequence[PPoint]) -> IComb:
    """The 20-term cyclic combination of pair31 brackets of cross-ratios."""
    pts = tuple(pts)
    if len(pts) != 5:
        raise ValueError("g needs five points")

    def one_rotation(p: Sequence[PPoint]) -> IComb:
        label = "g"
        return (
            pair31(_cr(p, 1, 2, 3, 4, label), _cr(p, 2, 3, 4, 5, label), "g[1234,2345]")
            - pair31(_cr(p, 5, 4, 3, 2, label), _cr(p, 5, 4, 3, 1, label), "g[5432,5431]")
            - pair31(_cr(p, 1, 2, 4, 3, label), _cr(p, 1, 2, 4, 5, label), "g[1243,1245]").scale(3)
            + pair31(_cr(p, 5, 4, 2, 3, label), _cr(p, 5, 4, 2, 1, label), "g[5423,5421]").scale(3)
        )

    return cycl(one_rotation, pts)


def _diff_ratio(p: Sequence[PPoint], i: int, j: int, k: int, l: int, label: str) -> PPoint:
    """(p_i - p_j)/(p_k - p_l) for finite points."""
    for idx in (i, j, k, l):
        if p[idx - 1].is_inf:
            raise DegenerateArgument(f"{label}: difference ratio needs finite points")
    num = p[i - 1].expr - p[j - 1].expr
    den = p[k - 1].expr - p[l - 1].expr
    if den.is_zero():
        raise DegenerateArgument(f"{label}: vanishing denominator ({k},{l})")
    if num.is_zero():
        raise DegenerateArgument(f"{label}: vanishing numerator ({i},{j})")
    return PPoint.finite(num / den)


def build_f(pts: Sequence[PPoint]) -> IComb:
    """The five-point primitive: -20 f = g - (five one-point-at-infinity
    copies of g) - 10 cycl[.]_4 - 10 cycl[.]_4 + 10 cycl[.]_4 - 10 cycl[.]_4."""
    pts = tuple(pts)
    if len(pts) != 5:
        raise ValueError("f needs five points")
    acc = build_g(pts)
    for i in range(5):
        punct = pts[:i] + (PPoint.infinity(),) + pts[i + 1 :]
        acc = acc - build_g(punct)

    def quad(i: int, j: int, k: int, l: int, label: str):
        def fn(p: Sequence[PPoint]) -> IComb:
            return embed(4, _diff_ratio(p, i, j, k, l, label), label)

        return fn

    acc = acc - cycl(quad(2, 3, 2, 1, "f[(p2-p3)/(p2-p1)]"), pts).scale(10)
    acc = acc - cycl(quad(1, 2, 1, 4, "f[(p1-p2)/(p1-p4)]"), pts).scale(10)
    acc = acc + cycl(quad(2, 1, 2, 4, "f[(p2-p1)/(p2-p4)]"), pts).scale(10)
    acc = acc - cycl(quad(4, 2, 4, 1, "f[(p4-p2)/(p4-p1)]"), pts).scale(10)
    return acc.scale(Fraction(-1, 20))


_BRACKET_SHAPES: dict[str, tuple[tuple[int, int, int, int], tuple[int, int, int, int], int]] = {
    "k1": ((1, 2, 3, 4), (2, 3, 4, 5), 1),
    "k2": ((5, 4, 3, 2), (5, 4, 3, 1), -1),
    "k3": ((1, 2, 4, 3), (1, 2, 4, 5), -3),
    "k4": ((5, 4, 2, 3), (5, 4, 2, 1), 3),
}

_QUAD_SHAPES: tuple[tuple[tuple[int, int, int, int], Fraction], ...] = (
    ((2, 3, 2, 1), Fraction(1, 2)),
    ((1, 2, 1, 4), Fraction(1, 2)),
    ((2, 1, 2, 4), Fraction(-1, 2)),
    ((4, 2, 4, 1), Fraction(1, 2)),
)

FPiece = tuple[tuple, Fraction, Callable[[], IComb]]


def f_term_stream(pts: Sequence[PPoint]) -> Iterator[FPiece]:
    """Atomic pieces of the five-point primitive f, one bracket or [.]_4 at
    a time: yields (descriptor, coefficient, builder) with

        build_f(pts)  ==  sum of coefficient * builder()  over the stream.

    This is a second, independent transcription of the same formula (the
    test suite asserts exact agreement with build_f); its purpose is to let
    callers catch per-term degeneracies — the deformation check substitutes
    coinciding points and must classify each failing term individually.

    Descriptors carry the raw arguments before construction:
      ("bracket", x_quadruple, z_quadruple)  -- two 4-tuples of PPoints
        feeding the two cross-ratios of a pair31 bracket;
      ("quad", quadruple)                    -- the 4-tuple (i, j, k, l) of
        PPoints feeding the difference ratio (p_i - p_j)/(p_k - p_l).
    """
    pts = tuple(pts)
    if len(pts) != 5:
        raise ValueError("f needs five points")
    for punct in (None, 0, 1, 2, 3, 4):
        if punct is None:
            base = pts
            block_sign = 1
        else:
            base = pts[:punct] + (PPoint.infinity(),) + pts[punct + 1 :]
            block_sign = -1
        for rot in range(5):
            p = base[rot:] + base[:rot]
            for pos1, pos2, shape_coeff in _BRACKET_SHAPES.values():
                x4 = tuple(p[i - 1] for i in pos1)
                z4 = tuple(p[i - 1] for i in pos2)
                coeff = Fraction(-1, 20) * block_sign * shape_coeff

                def build(x4=x4, z4=z4) -> IComb:
                    return pair31(cross_ratio(*x4), cross_ratio(*z4), "f-piece")

                yield ("bracket", x4, z4), coeff, build
    for (i, j, k, l), quad_coeff in _QUAD_SHAPES:
        for rot in range(5):
            p = pts[rot:] + pts[:rot]
            quad = (p[i - 1], p[j - 1], p[k - 1], p[l - 1])

            def build(p=p, i=i, j=j, k=k, l=l) -> IComb:
                return embed(4, _diff_ratio(p, i, j, k, l, "f-piece"), "f-piece")

            yield ("quad", quad), quad_coeff, build


def generic_term(pts: Sequence[PPoint]) -> IComb:
    """I(a0; a1, a2, a3, a4; a5) for a 6-tuple of points."""
    pts = tuple(pts)
    if len(pts) != 6:
        raise ValueError("the generic weight-4 term needs six points")
    term = ITerm.make(pts[0], list(pts[1:5]), pts[5])
    if term.is_divergent():
        raise DegenerateArgument("generic term diverges: endpoint equals its neighbour")
    return IComb.from_term(term)


def discrepancy(pts: Sequence[PPoint]) -> IComb:
    """I(a0; ...; a5) - f(a0..a4) + f(a1..a5): the combination both
    weight-4 deciders must kill."""
    pts = tuple(pts)
    if len(pts) != 6:
        raise ValueError("the discrepancy needs six points")
    return generic_term(pts) - build_f(pts[:5]) + build_f(pts[1:])


def antisym_pair(t: PPoint, u: PPoint) -> IComb:
    """pair31(t, u) + pair31(u, t): dies under both deciders."""
    return pair31(t, u, "antisym: [t,u]") + pair31(u, t, "antisym: [u,t]")
