"""Iterated-integral terms, their symbols, and the cobracket maps.

An ITerm is I(a0; a1, ..., an; a_{n+1}) with projective points for
entries; its weight is n.  The symbol lives in the weight-n tensor power
of the atom space and is computed by the drop-one-letter recursion

    S(I) = sum_i S(I with a_i removed) (x) ([a_i - a_{i+1}] - [a_i - a_{i-1}])

with three uniform bracket rules: a difference through the point at
infinity contributes nothing (constants die under d log), an identically
zero difference is skipped (its two appearances in adjacent positions
cancel in pairs, and at the path ends skipping *is* the shuffle
regularization), and rational constants keep only their prime content
(torsion is invisible in the target).  A term whose endpoints coincide
is zero outright; an empty word is the unit.

Convergence discipline: symbol() refuses a divergent term (a0 = a1 or
an = a_{n+1}) unless the term carries regularized=True.  Every term
manufactured internally -- recursion children, coproduct factors --
is regularized, so only user-facing entry points can raise.

IComb is a Q-linear combination of *products* of terms: keys are tuples
of ITerms (length one for plain combinations).  The symbol of a product
key is the shuffle product of the factors' symbols.

The cobracket maps all factor through the symbol:

    delta2          = -wedge . S           (weight 2 -> Lambda^2)
    cobracket_chain = -(wedge on slots 1,2) . S   (weight 4 chain decider)
    delta22         = -sum outer(delta2 L, delta2 R) over the (2,2)
                      subsequence coproduct  (weight 4 -> Lambda^2 ^ Lambda^2)

and rho_project is the Dynkin-style projector whose kernel is exactly
the span of nontrivial shuffles, the second weight-4 decider.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import DegenerateArgument, DivergentTerm
from .factorbase import REGISTRY
from .multgroup import (
    _SLOT_BITS,
    MultElement,
    TensorElement,
    Wedge2,
    WedgeChainElement,
    WedgePairElement,
    mult_from_ratio,
    pack_ids,
    shuffle_tensors,
    tensor_combine,
    unpack_ids,
    wedge_chain,
)
from .projective import PPoint, point_diff

Coeff = Fraction | int


class ITerm:
    """A single iterated integral with projective entries."""

    __slots__ = ("points", "regularized", "_key", "_hash")

    def __init__(self, points: Sequence[PPoint], regularized: bool = False) -> None:
        points = tuple(points)
        if len(points) < 2:
            raise DegenerateArgument("an integral needs two path endpoints")
        self.points = points
        self.regularized = regularized
        self._key = None
        self._hash = None

    @staticmethod
    def make(a0: PPoint, letters: Sequence[PPoint], a1: PPoint, regularized: bool = False) -> "ITerm":
        return ITerm((a0, *letters, a1), regularized)

    @property
    def weight(self) -> int:
        return len(self.points) - 2

    @property
    def start(self) -> PPoint:
        return self.points[0]

    @property
    def end(self) -> PPoint:
        return self.points[-1]

    @property
    def letters(self) -> tuple[PPoint, ...]:
        return self.points[1:-1]

    def is_unit(self) -> bool:
        return self.weight == 0

    def is_zero_closed(self) -> bool:
        return self.weight >= 1 and self.points[0] == self.points[-1]

    def is_divergent(self) -> bool:
        if self.weight == 0:
            return False
        return self.points[0] == self.points[1] or self.points[-1] == self.points[-2]

    def key(self) -> tuple:
        if self._key is None:
            self._key = (len(self.points), tuple(p.key() for p in self.points))
        return self._key

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ITerm):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self) -> str:
        inner = ",".join(repr(p) for p in self.letters)
        return f"I({self.points[0]!r};{inner};{self.points[-1]!r})"


ProductKey = tuple[ITerm, ...]


def _normalize_product(factors: Iterable[ITerm]) -> ProductKey | None:
    """Drop unit factors, detect zero factors (None), sort canonically."""
    kept = []
    for f in factors:
        if f.is_unit():
            continue
        if f.is_zero_closed():
            return None
        kept.append(f)
    kept.sort(key=ITerm.key)
    return tuple(kept)


class IComb:
    """Q-linear combination of products of ITerms."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[ProductKey, Coeff] | None = None) -> None:
        self.terms = terms or {}

    @staticmethod
    def zero() -> "IComb":
        return IComb({})

    @staticmethod
    def unit(coeff: Coeff = 1) -> "IComb":
        return IComb({(): Fraction(coeff)})

    @staticmethod
    def from_term(t: ITerm, coeff: Coeff = 1) -> "IComb":
        key = _normalize_product([t])
        if key is None or not coeff:
            return IComb.zero()
        return IComb({key: Fraction(coeff)})

    @staticmethod
    def from_product(factors: Sequence[ITerm], coeff: Coeff = 1) -> "IComb":
        key = _normalize_product(factors)
        if key is None or not coeff:
            return IComb.zero()
        return IComb({key: Fraction(coeff)})

    def __add__(self, other: "IComb") -> "IComb":
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return IComb(out)

    def __sub__(self, other: "IComb") -> "IComb":
        return self + other.scale(-1)

    def __neg__(self) -> "IComb":
        return self.scale(-1)

    def scale(self, c: Coeff) -> "IComb":
        if not c:
            return IComb.zero()
        return IComb({k: v * c for k, v in self.terms.items()})

    def weight(self) -> int | None:
        weights = {sum(t.weight for t in k) for k in self.terms}
        if not weights:
            return None
        if len(weights) > 1:
            raise ValueError("mixed-weight combination")
        return weights.pop()

    def term_count(self) -> int:
        return len(self.terms)

    def single_terms(self) -> list[tuple[ITerm, Coeff]]:
        out = []
        for k, c in self.terms.items():
            if len(k) != 1:
                raise ValueError("combination contains genuine products")
            out.append((k[0], c))
        return out

    def map_points(self, f) -> "IComb":
        """Apply a projective map to every entry of every factor."""
        out = IComb.zero()
        for k, c in self.terms.items():
            new_factors = [
                ITerm(tuple(f(p) for p in t.points), regularized=t.regularized)
                for t in k
            ]
            out = out + IComb.from_product(new_factors, c)
        return out

    def __repr__(self) -> str:
        return f"IComb(products={len(self.terms)})"


# ---------------------------------------------------------------------------
# The symbol
# ---------------------------------------------------------------------------

_symbol_cache: dict[tuple, TensorElement] = {}
REGISTRY.on_reset(_symbol_cache.clear)


def _bracket(a: PPoint, b: PPoint) -> MultElement | None:
    """Atom vector of [a - b]; None when the difference dies (inf or 0)."""
    diff = point_diff(a, b)
    if diff is None or diff.is_zero():
        return None
    return mult_from_ratio(diff.num, diff.den)


def _letter_weight(a_prev: PPoint, a_i: PPoint, a_next: PPoint) -> TensorElement:
    """[a_i - a_next] - [a_i - a_prev] as a weight-1 tensor."""
    acc = MultElement.zero()
    plus = _bracket(a_i, a_next)
    if plus is not None:
        acc = acc + plus
    minus = _bracket(a_i, a_prev)
    if minus is not None:
        acc = acc - minus
    return TensorElement.from_mult(acc)


def _symbol_points(points: tuple[PPoint, ...]) -> TensorElement:
    weight = len(points) - 2
    if weight == 0:
        return TensorElement.unit()
    if points[0] == points[-1]:
        return TensorElement.zero(weight)
    cached = _symbol_cache.get(_points_key(points))
    if cached is not None:
        return cached
    if weight == 1:
        result = _letter_weight(points[0], points[1], points[2])
    else:
        result = TensorElement.zero(weight)
        for i in range(1, weight + 1):
            last = _letter_weight(points[i - 1], points[i], points[i + 1])
            if not last.terms:
                continue
            head = _symbol_points(points[:i] + points[i + 1:])
            if not head.terms:
                continue
            result = result + tensor_combine([head, last])
    _symbol_cache[_points_key(points)] = result
    return result


def _points_key(points: tuple[PPoint, ...]) -> tuple:
    return tuple(p.key() for p in points)


def symbol_term(t: ITerm) -> TensorElement:
    if t.is_divergent() and not t.regularized:
        raise DivergentTerm(f"divergent endpoints in {t!r}; pass regularized=True")
    return _symbol_points(t.points)


def symbol(x: Union[ITerm, "IComb"]) -> TensorElement:
    """Symbol of a term or combination; products become shuffles."""
    if isinstance(x, ITerm):
        return symbol_term(x)
    weight = x.weight()
    if weight is None:
        # The zero combination: weight is conventional.
        return TensorElement.zero(0)
    acc = TensorElement.zero(weight)
    for key, coeff in x.terms.items():
        if not key:
            part = TensorElement.unit()
        else:
            part = symbol_term(key[0])
            for f in key[1:]:
                part = shuffle_tensors(part, symbol_term(f))
        acc = acc + part.scale(coeff)
    return acc


# ---------------------------------------------------------------------------
# Shuffle product of integrals over a common path
# ---------------------------------------------------------------------------

def shuffle_terms(t1: ITerm, t2: ITerm) -> IComb:
    """Pointwise product as a sum over shuffles of the letter words."""
    if t1.start != t2.start or t1.end != t2.end:
        raise DegenerateArgument("shuffle product needs a common path")
    u, v = t1.letters, t2.letters
    reg = t1.regularized or t2.regularized
    out = IComb.zero()
    for pattern in itertools.combinations(range(len(u) + len(v)), len(u)):
        pset = set(pattern)
        word = []
        i1 = i2 = 0
        for pos in range(len(u) + len(v)):
            if pos in pset:
                word.append(u[i1])
                i1 += 1
            else:
                word.append(v[i2])
                i2 += 1
        out = out + IComb.from_term(ITerm.make(t1.start, word, t1.end, regularized=reg))
    return out


# ---------------------------------------------------------------------------
# Subsequence coproduct
# ---------------------------------------------------------------------------

def coproduct_component(t: ITerm, left_weight: int) -> list[tuple[ITerm, ProductKey]]:
    """(left_weight, n - left_weight) component of the subsequence coproduct.

    Each term is (left integral, product of gap integrals); gap integrals
    over a closed path kill their term, empty gaps are units.  All factors
    come out regularized: the coproduct acts on regularized integrals.
    """
    n = t.weight
    if not 0 <= left_weight <= n:
        raise ValueError("left weight out of range")
    points = t.points
    out: list[tuple[ITerm, ProductKey]] = []
    for subseq in itertools.combinations(range(1, n + 1), left_weight):
        anchors = (0, *subseq, n + 1)
        left = ITerm(
            (points[0], *(points[i] for i in subseq), points[-1]), regularized=True
        )
        gaps: list[ITerm] = []
        dead = False
        for a, b in zip(anchors, anchors[1:]):
            if b - a <= 1:
                continue  # empty gap: unit factor
            gap = ITerm(points[a : b + 1], regularized=True)
            if gap.is_zero_closed():
                dead = True
                break
            gaps.append(gap)
        if dead:
            continue
        key = _normalize_product(gaps)
        if key is None:
            continue
        out.append((left, key))
    return out


# ---------------------------------------------------------------------------
# The projector rho
# ---------------------------------------------------------------------------

_rho_cache: dict[tuple[int, int], dict[int, Coeff]] = {}


def _rho_word(key: int, weight: int) -> dict[int, Coeff]:
    if weight == 1:
        return {key: 1}
    cached = _rho_cache.get((key, weight))
    if cached is not None:
        return cached
    ids = unpack_ids(key, weight)
    out: dict[int, Coeff] = {}
    head = _rho_word(pack_ids(ids[:-1]), weight - 1)
    for k, c in head.items():
        kk = (k << _SLOT_BITS) | ids[-1]
        out[kk] = out.get(kk, 0) + c
    tail = _rho_word(pack_ids(ids[1:]), weight - 1)
    for k, c in tail.items():
        kk = (k << _SLOT_BITS) | ids[0]
        s = out.get(kk, 0) - c
        if s:
            out[kk] = s
        else:
            out.pop(kk, None)
    _rho_cache[(key, weight)] = out
    return out


REGISTRY.on_reset(_rho_cache.clear)


def rho_project(t: TensorElement) -> TensorElement:
    """Projector with kernel exactly the span of nontrivial shuffles.

    rho(x) = x;  rho(w . x) = rho(w) (x) x - rho(shift w) (x) first(w).
    """
    if t.weight == 0:
        return TensorElement.zero(0, t.registry)
    canon = t.canonicalize()
    out: dict[int, Coeff] = {}
    for key, coeff in canon.terms.items():
        for k, c in _rho_word(key, t.weight).items():
            s = out.get(k, 0) + coeff * c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return TensorElement(t.weight, out, t.registry)


# ---------------------------------------------------------------------------
# Cobracket maps
# ---------------------------------------------------------------------------

def delta2(c: Union[ITerm, IComb]) -> Wedge2:
    """Weight-2 cobracket: minus the wedge of the symbol."""
    if isinstance(c, ITerm):
        c = IComb.from_term(c)
    if c.terms and c.weight() != 2:
        raise ValueError("delta2 needs weight 2")
    return Wedge2.from_tensor2(symbol(c)).scale(-1)


def _weight1_value(t: ITerm) -> MultElement:
    """The weight-1 symbol [b2 - b1] - [b0 - b1] as an atom vector."""
    b0, b1, b2 = t.points
    acc = MultElement.zero()
    plus = _bracket(b2, b1)
    if plus is not None:
        acc = acc + plus
    minus = _bracket(b0, b1)
    if minus is not None:
        acc = acc - minus
    return acc


def _delta_step(key: ProductKey) -> list[tuple[ProductKey, ITerm, int]]:
    """One Lie-cobracket step on a product of terms of total weight w:

        D = Delta_{w-1,1} - flip . Delta_{1,w-1}

    returned as (left product key, split-off weight-1 term, sign).  On a
    product, Leibniz expansion makes the two directions cancel whenever a
    whole weight-1 factor is split off, so products are annihilated by
    the iterated chain with no quotient bookkeeping.
    """
    out: list[tuple[ProductKey, ITerm, int]] = []
    factors = list(key)
    for j, t in enumerate(factors):
        others = factors[:j] + factors[j + 1 :]
        w = t.weight
        if w == 1:
            # Splitting the whole factor off left or right gives identical
            # terms with opposite signs: they cancel exactly.
            continue
        for left, right_key in coproduct_component(t, w - 1):
            # The cofactor has total weight 1: a single gap integral.
            new_key = _normalize_product(others + [left])
            if new_key is None:
                continue
            out.append((new_key, right_key[0], 1))
        for left, right_key in coproduct_component(t, 1):
            new_key = _normalize_product(others + list(right_key))
            if new_key is None:
                continue
            out.append((new_key, left, -1))
    return out


def cobracket_chain(c: Union[ITerm, IComb]) -> WedgeChainElement:
    """Weight-4 chain decider: the iterated Lie cobracket

        (delta2 (x) id (x) id) . (D3 (x) id) . D4

    landing in Lambda^2 (x) T^1 (x) T^1.  Each D step is the
    antisymmetrized subsequence coproduct (see _delta_step), so shuffle
    products die on the way down; split-off weight-1 factors are realized
    as atom vectors, the last surviving weight-2 factor through delta2.
    The first split lands in the last tensor slot.
    """
    if isinstance(c, ITerm):
        c = IComb.from_term(c)
    if c.terms and c.weight() != 4:
        raise ValueError("cobracket_chain needs weight 4")
    # Stage 1: weight 4 -> (weight-3 key, last-slot vector).
    stage: dict[ProductKey, list[tuple[MultElement, MultElement, Coeff]]] = {}
    mid: list[tuple[ProductKey, MultElement, Coeff]] = []
    for key, coeff in c.terms.items():
        for new_key, split, sign in _delta_step(key):
            m1 = _weight1_value(split)
            if not m1.entries:
                continue
            mid.append((new_key, m1, coeff * sign))
    # Stage 2: weight 3 -> (weight-2 key, middle-slot vector).
    for key3, m1, coeff in mid:
        for new_key, split, sign in _delta_step(key3):
            m2 = _weight1_value(split)
            if not m2.entries:
                continue
            stage.setdefault(new_key, []).append((m2, m1, coeff * sign))
    # Stage 3: delta2 on the weight-2 keys, then assemble.
    out: dict[tuple[tuple[int, int], int, int], Coeff] = {}
    for key2, tails in stage.items():
        w2 = delta2(IComb({key2: Fraction(1)})).canonicalize()
        if not w2.terms:
            continue
        for pair, cw in w2.terms.items():
            for m2, m1, coeff in tails:
                base = cw * coeff
                for a2, e2 in m2.resolved().items():
                    for a1, e1 in m1.resolved().items():
                        k = (pair, a2, a1)
                        s = out.get(k, 0) + base * e2 * e1
                        if s:
                            out[k] = s
                        else:
                            out.pop(k, None)
    return WedgeChainElement(out, REGISTRY)


def delta22(c: Union[ITerm, IComb]) -> WedgePairElement:
    """(2,2) cobracket realized through delta2 on both coproduct factors.

    Product right-factors die automatically: their symbol is a shuffle,
    whose wedge vanishes.
    """
    if isinstance(c, ITerm):
        c = IComb.from_term(c)
    if c.terms and c.weight() != 4:
        raise ValueError("delta22 needs weight 4")
    acc = WedgePairElement.zero()
    for t, coeff in c.single_terms():
        for left, right_key in coproduct_component(t, 2):
            wl = delta2(IComb.from_term(left))
            if not wl.terms:
                continue
            wr = delta2(IComb({right_key: Fraction(1)})) if right_key else Wedge2.zero()
            if not wr.terms:
                continue
            acc = acc + WedgePairElement.outer(wl, wr).scale(coeff)
    return acc.scale(-1)
