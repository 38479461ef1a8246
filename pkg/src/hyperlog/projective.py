"""Points on the projective line over Q(x1, ..., xn).

A PPoint is either the point at infinity or a finite value held as a
reduced FieldExpr (num/den pair of exact polynomials).  The symbol
machinery consumes *differences* of points; a difference involving the
point at infinity is dropped by the caller (the bracket of a constant
under every d log), and point_diff signals that with None.

Degeneracy discipline: building an identically degenerate object (a
cross-ratio with two coinciding anchors, an affine map with zero slope,
a division by the zero function) raises DegenerateArgument.  Evaluating
a healthy object at a bad rational tuple is not an error: specialization
returns the INFINITY or DEGENERATE sentinel as a value so bulk numeric
sweeps can discard and redraw.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping, Union

from .errors import DegenerateArgument
from .factorbase import REGISTRY, AtomRegistry
from .multgroup import MultElement
from .multipoly import MultiPoly, exact_div, poly_gcd

Rat = Union[Fraction, int]


class _Infinity:
    """The point at infinity (also the value of 1/0 under specialization)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"


class _Degenerate:
    """Specialization hit 0/0: the drawn tuple is unusable, redraw."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "degenerate"


INFINITY = _Infinity()
DEGENERATE = _Degenerate()


class FieldExpr:
    """Reduced rational function: num/den with gcd struck and the
    denominator primitive with positive leading coefficient, so equal
    functions are structurally equal."""

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None) -> None:
        if den is None:
            den = MultiPoly.const(1)
        if den.is_zero():
            raise DegenerateArgument("denominator is identically zero")
        if num.is_zero():
            self.num = MultiPoly.zero()
            self.den = MultiPoly.const(1)
            return
        g = poly_gcd(num, den)
        if not g.is_constant():
            num = exact_div(num, g)
            den = exact_div(den, g)
        c, den_p = den.content_and_primitive()
        self.num = num.scale(Fraction(1) / c)
        self.den = den_p

    # -- constructors -------------------------------------------------
    @staticmethod
    def const(c: Rat) -> "FieldExpr":
        c = Fraction(c)
        return FieldExpr(MultiPoly.const(c))

    @staticmethod
    def var(name: str) -> "FieldExpr":
        return FieldExpr(MultiPoly.var(name))

    # -- structure ----------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    def key(self):
        return (self.num.key(), self.den.key())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldExpr):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        if self.den.is_constant() and self.den.constant_value() == 1:
            return self.num.render()
        return f"({self.num.render()}) / ({self.den.render()})"

    # -- field arithmetic ---------------------------------------------
    def __add__(self, other: "FieldExpr") -> "FieldExpr":
        return FieldExpr(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other: "FieldExpr") -> "FieldExpr":
        return FieldExpr(
            self.num * other.den - other.num * self.den, self.den * other.den
        )

    def __neg__(self) -> "FieldExpr":
        return FieldExpr(-self.num, self.den)

    def __mul__(self, other: "FieldExpr") -> "FieldExpr":
        return FieldExpr(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "FieldExpr") -> "FieldExpr":
        if other.is_zero():
            raise DegenerateArgument("division by the zero function")
        return FieldExpr(self.num * other.den, self.den * other.num)

    # -- maps ---------------------------------------------------------
    def substitute(self, mapping: Mapping[str, "FieldExpr"]) -> "FieldExpr":
        num_n, num_d = _subst_rational(self.num, mapping)
        den_n, den_d = _subst_rational(self.den, mapping)
        if den_n.is_zero():
            raise DegenerateArgument("substitution sent the denominator to zero")
        return FieldExpr(num_n * den_d, num_d * den_n)

    def evaluate(self, assignment: Mapping[str, Rat]):
        n = self.num.evaluate(assignment)
        d = self.den.evaluate(assignment)
        if d == 0:
            return DEGENERATE if n == 0 else INFINITY
        return n / d

    def mult_image(self, registry: AtomRegistry = REGISTRY) -> MultElement:
        if self.is_zero():
            raise DegenerateArgument("zero has no multiplicative class")
        num_el = MultElement.from_poly(self.num, registry)
        if self.den.is_constant() and self.den.constant_value() == 1:
            return num_el
        return num_el - MultElement.from_poly(self.den, registry)


def _subst_rational(p: MultiPoly, mapping: Mapping[str, FieldExpr]) -> tuple[MultiPoly, MultiPoly]:
    """p with each variable replaced by num/den; returns (N, D) with p = N/D.

    D is the product over substituted variables of den^deg_in(p); each
    monomial of N carries den^(deg - e) so the quotient is exact.
    """
    from .multipoly import VARS

    names = {vid: VARS.name_of(vid) for vid in p.variables()}
    relevant = sorted(vid for vid, n in names.items() if n in mapping)
    if not relevant:
        return p, MultiPoly.const(1)
    degs = {vid: p.degree_in(vid) for vid in relevant}
    denom = MultiPoly.const(1)
    for vid in relevant:
        denom = denom * (mapping[names[vid]].den ** degs[vid])
    out = MultiPoly.zero()
    for mono, coeff in p.terms.items():
        term = MultiPoly.const(coeff)
        for vid in relevant:
            e = mono[vid] if vid < len(mono) else 0
            fe = mapping[names[vid]]
            if e:
                term = term * (fe.num ** e)
            if degs[vid] - e:
                term = term * (fe.den ** (degs[vid] - e))
        relevant_set = set(relevant)
        for vid, e in enumerate(mono):
            if e and vid not in relevant_set:
                term = term * (MultiPoly.var(names[vid]) ** e)
        out = out + term
    return out, denom


class PPoint:
    """A point of P^1 over the rational function field."""

    __slots__ = ("expr",)

    def __init__(self, expr: FieldExpr | None) -> None:
        # None encodes the point at infinity.
        self.expr = expr

    @staticmethod
    def infinity() -> "PPoint":
        return PPoint(None)

    @staticmethod
    def finite(expr: FieldExpr) -> "PPoint":
        return PPoint(expr)

    @staticmethod
    def const(c: Rat) -> "PPoint":
        return PPoint(FieldExpr.const(c))

    @staticmethod
    def var(name: str) -> "PPoint":
        return PPoint(FieldExpr.var(name))

    @property
    def is_inf(self) -> bool:
        return self.expr is None

    def key(self):
        return ("inf",) if self.expr is None else ("fin", self.expr.key())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PPoint):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return "inf" if self.is_inf else repr(self.expr)

    def specialize(self, assignment: Mapping[str, Rat]):
        if self.is_inf:
            return INFINITY
        return self.expr.evaluate(assignment)


def point_diff(a: PPoint, b: PPoint) -> FieldExpr | None:
    """a - b, or None when either point is at infinity (bracket dropped)."""
    if a.is_inf or b.is_inf:
        return None
    return a.expr - b.expr


def one_minus(p: PPoint) -> PPoint:
    if p.is_inf:
        return PPoint.infinity()
    return PPoint(FieldExpr.const(1) - p.expr)


def cross_ratio(a: PPoint, b: PPoint, c: PPoint, d: PPoint) -> PPoint:
    """(a-c)(b-d) / ((a-d)(b-c)) with differences through infinity struck.

    Raises DegenerateArgument when the configuration makes the ratio 0/0
    identically (coinciding anchors on both levels).
    """
    inf_count = sum(1 for p in (a, b, c, d) if p.is_inf)
    if inf_count > 1:
        raise DegenerateArgument("cross-ratio of a configuration with repeated infinity")
    num = MultiPoly.const(1)
    den = MultiPoly.const(1)
    num_zero = den_zero = False
    for p, q, target in ((a, c, "num"), (b, d, "num"), (a, d, "den"), (b, c, "den")):
        diff = point_diff(p, q)
        if diff is None:
            continue
        if diff.is_zero():
            if target == "num":
                num_zero = True
            else:
                den_zero = True
            continue
        if target == "num":
            num = num * diff.num
            den = den * diff.den
        else:
            den = den * diff.num
            num = num * diff.den
    if num_zero and den_zero:
        raise DegenerateArgument("cross-ratio is identically 0/0")
    if den_zero:
        return PPoint.infinity()
    if num_zero:
        return PPoint.const(0)
    return PPoint(FieldExpr(num, den))


def affine_map(p: PPoint, alpha: Rat | FieldExpr, beta: Rat | FieldExpr) -> PPoint:
    """z -> alpha*z + beta, fixing infinity; alpha must be nonzero."""
    if not isinstance(alpha, FieldExpr):
        alpha = FieldExpr.const(alpha)
    if not isinstance(beta, FieldExpr):
        beta = FieldExpr.const(beta)
    if alpha.is_zero():
        raise DegenerateArgument("affine map with zero slope")
    if p.is_inf:
        return PPoint.infinity()
    return PPoint(alpha * p.expr + beta)


def specialize(p: PPoint, assignment: Mapping[str, Rat]):
    """Rational value of the point, or INFINITY / DEGENERATE as sentinels."""
    return p.specialize(assignment)


PointMap = Callable[[PPoint], PPoint]
