"""The vector space F*(x)Q and its tensor and wedge powers.

A MultElement is a Q-exponent vector over registry atoms: the image of a
field element under log, with torsion (signs, roots of unity) already
dead.  TensorElement holds fully expanded weight-k tensors whose slots are
single atoms; a slot key packs the k atom ids into one integer at 16 bits
per slot, which keeps the inner loops of the symbol expansion on plain
int dict keys.

Raw terms may reference atoms that were later refined.  Every consumer
canonicalizes first: each slot id is resolved through the registry's
split links, and because a slot is a *logarithmic* coordinate an atom
resolving to q1^e1*q2^e2 expands a term linearly into e1*(..q1..) +
e2*(..q2..).  Zero-testing is therefore independent of the order in
which inputs reached the registry.

Wedge containers canonicalize pairs by the insertion-independent atom
order (canon_key), absorbing the orientation sign into the coefficient,
so an is_zero scan over coefficients is exact.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DegenerateArgument
from .factorbase import REGISTRY, AtomRegistry
from .multipoly import MultiPoly

Coeff = Fraction | int

_SLOT_BITS = 16
_SLOT_MASK = (1 << _SLOT_BITS) - 1


def pack_ids(ids: Sequence[int]) -> int:
    key = 0
    for i in ids:
        if i > _SLOT_MASK:
            raise RuntimeError("atom registry exceeded the packing width")
        key = (key << _SLOT_BITS) | i
    return key


def unpack_ids(key: int, weight: int) -> tuple[int, ...]:
    out = []
    for _ in range(weight):
        out.append(key & _SLOT_MASK)
        key >>= _SLOT_BITS
    return tuple(reversed(out))


def _merge(d: dict, k, v) -> None:
    s = d.get(k, 0) + v
    if s:
        d[k] = s
    else:
        d.pop(k, None)


# ---------------------------------------------------------------------------
# MultElement
# ---------------------------------------------------------------------------

class MultElement:
    """Exponent vector over atoms; the identity is the empty vector."""

    __slots__ = ("entries", "registry")

    def __init__(self, entries: dict[int, Coeff], registry: AtomRegistry = REGISTRY) -> None:
        self.entries = {a: e for a, e in entries.items() if e}
        self.registry = registry

    @staticmethod
    def zero(registry: AtomRegistry = REGISTRY) -> "MultElement":
        return MultElement({}, registry)

    @staticmethod
    def from_poly(p: MultiPoly, registry: AtomRegistry = REGISTRY) -> "MultElement":
        if p.is_zero():
            raise DegenerateArgument("zero has no class in F*(x)Q")
        return MultElement(dict(registry.add_poly(p)), registry)

    @staticmethod
    def from_rational(q: Fraction | int, registry: AtomRegistry = REGISTRY) -> "MultElement":
        q = Fraction(q)
        if q == 0:
            raise DegenerateArgument("zero has no class in F*(x)Q")
        return MultElement(dict(registry.add_rational(q)), registry)

    def __add__(self, other: "MultElement") -> "MultElement":
        out = dict(self.entries)
        for a, e in other.entries.items():
            _merge(out, a, e)
        return MultElement(out, self.registry)

    def __neg__(self) -> "MultElement":
        return MultElement({a: -e for a, e in self.entries.items()}, self.registry)

    def __sub__(self, other: "MultElement") -> "MultElement":
        return self + (-other)

    def scale(self, c: Coeff) -> "MultElement":
        if not c:
            return MultElement({}, self.registry)
        return MultElement({a: e * c for a, e in self.entries.items()}, self.registry)

    def resolved(self) -> dict[int, Coeff]:
        return self.registry.resolve_vector(self.entries)

    def is_zero(self) -> bool:
        return not self.resolved()

    def residual_terms(self) -> list[tuple[Coeff, str]]:
        res = self.resolved()
        ordered = sorted(res, key=self.registry.canon_key)
        return [(res[a], self.registry.render(a)) for a in ordered]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultElement):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self) -> str:
        if not self.entries:
            return "MultElement(1)"
        bits = " ".join(f"({self.registry.render(a)})^{e}" for a, e in self.entries.items())
        return f"MultElement({bits})"


def mult_from_ratio(num: MultiPoly, den: MultiPoly, registry: AtomRegistry = REGISTRY) -> MultElement:
    if num.is_zero() or den.is_zero():
        raise DegenerateArgument("ratio with zero numerator or denominator")
    return MultElement.from_poly(num, registry) - MultElement.from_poly(den, registry)


# ---------------------------------------------------------------------------
# TensorElement
# ---------------------------------------------------------------------------

class TensorElement:
    """Fully expanded weight-k tensor over single atoms."""

    __slots__ = ("weight", "terms", "registry", "_version")

    def __init__(
        self,
        weight: int,
        terms: dict[int, Coeff],
        registry: AtomRegistry = REGISTRY,
        _version: int = -1,
    ) -> None:
        self.weight = weight
        self.terms = terms
        self.registry = registry
        self._version = _version

    @staticmethod
    def zero(weight: int, registry: AtomRegistry = REGISTRY) -> "TensorElement":
        return TensorElement(weight, {}, registry)

    @staticmethod
    def unit(registry: AtomRegistry = REGISTRY) -> "TensorElement":
        # Weight-0 unit: the empty tensor word with coefficient 1.
        return TensorElement(0, {0: 1}, registry)

    @staticmethod
    def from_mult(m: MultElement) -> "TensorElement":
        return TensorElement(1, {pack_ids((a,)): e for a, e in m.entries.items()}, m.registry)

    def __add__(self, other: "TensorElement") -> "TensorElement":
        if self.weight != other.weight:
            raise ValueError("tensor weights differ")
        out = dict(self.terms)
        for k, c in other.terms.items():
            _merge(out, k, c)
        return TensorElement(self.weight, out, self.registry)

    def __neg__(self) -> "TensorElement":
        return TensorElement(self.weight, {k: -c for k, c in self.terms.items()}, self.registry, self._version)

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + (-other)

    def scale(self, c: Coeff) -> "TensorElement":
        if not c:
            return TensorElement.zero(self.weight, self.registry)
        return TensorElement(self.weight, {k: v * c for k, v in self.terms.items()}, self.registry, self._version)

    def canonicalize(self) -> "TensorElement":
        """Resolve every slot through registry splits (log-linear expansion)."""
        reg = self.registry
        ver = reg.version
        if self._version == ver:
            return self
        out: dict[int, Coeff] = {}
        resolve = reg.resolve
        for key, c in self.terms.items():
            ids = unpack_ids(key, self.weight)
            slots = [resolve(i) for i in ids]
            if all(len(s) == 1 and s[0][1] == 1 for s in slots):
                _merge(out, pack_ids([s[0][0] for s in slots]), c)
                continue
            for combo in itertools.product(*slots):
                factor = 1
                for _, e in combo:
                    factor *= e
                if factor:
                    _merge(out, pack_ids([a for a, _ in combo]), c * factor)
        return TensorElement(self.weight, out, reg, ver)

    def is_zero(self) -> bool:
        return not self.canonicalize().terms

    def sorted_terms(self) -> list[tuple[Coeff, tuple[int, ...]]]:
        canon = self.canonicalize()
        reg = self.registry
        keyed = [
            (tuple(reg.canon_key(i) for i in unpack_ids(k, self.weight)), k, c)
            for k, c in canon.terms.items()
        ]
        keyed.sort(key=lambda t: t[0])
        return [(c, unpack_ids(k, self.weight)) for _, k, c in keyed]

    def residual_terms(self) -> list[tuple[Coeff, str]]:
        reg = self.registry
        return [
            (c, " (x) ".join(reg.render(i) for i in ids))
            for c, ids in self.sorted_terms()
        ]

    def __repr__(self) -> str:
        n = len(self.terms)
        return f"TensorElement(weight={self.weight}, terms={n})"


def tensor_combine(parts: Iterable[TensorElement]) -> TensorElement:
    parts = list(parts)
    if not parts:
        return TensorElement.unit()
    result = parts[0]
    for p in parts[1:]:
        if result.registry is not p.registry:
            raise ValueError("tensors over different registries")
        out: dict[int, Coeff] = {}
        shift = _SLOT_BITS * p.weight
        for k1, c1 in result.terms.items():
            for k2, c2 in p.terms.items():
                _merge(out, (k1 << shift) | k2, c1 * c2)
        result = TensorElement(result.weight + p.weight, out, result.registry)
    return result


def shuffle_tensors(a: TensorElement, b: TensorElement) -> TensorElement:
    """Pointwise shuffle product; the symbol of a product of integrals."""
    if a.registry is not b.registry:
        raise ValueError("tensors over different registries")
    wa, wb = a.weight, b.weight
    out: dict[int, Coeff] = {}
    patterns = list(itertools.combinations(range(wa + wb), wa))
    for k1, c1 in a.terms.items():
        ids1 = unpack_ids(k1, wa)
        for k2, c2 in b.terms.items():
            ids2 = unpack_ids(k2, wb)
            c = c1 * c2
            for pat in patterns:
                word = [0] * (wa + wb)
                i1 = i2 = 0
                pset = set(pat)
                for pos in range(wa + wb):
                    if pos in pset:
                        word[pos] = ids1[i1]
                        i1 += 1
                    else:
                        word[pos] = ids2[i2]
                        i2 += 1
                _merge(out, pack_ids(word), c)
    return TensorElement(wa + wb, out, a.registry)


# ---------------------------------------------------------------------------
# Wedge containers
# ---------------------------------------------------------------------------

def _ordered_pair(i: int, j: int, reg: AtomRegistry) -> tuple[tuple[int, int], int] | None:
    """Canonically ordered pair and orientation sign; None kills a^a."""
    if i == j:
        return None
    if reg.canon_key(i) <= reg.canon_key(j):
        return (i, j), 1
    return (j, i), -1


class Wedge2:
    """Element of Lambda^2 of the atom space."""

    __slots__ = ("terms", "registry", "_version")

    def __init__(self, terms: dict[tuple[int, int], Coeff], registry: AtomRegistry = REGISTRY, _version: int = -1) -> None:
        self.terms = terms
        self.registry = registry
        self._version = _version

    @staticmethod
    def zero(registry: AtomRegistry = REGISTRY) -> "Wedge2":
        return Wedge2({}, registry)

    @staticmethod
    def from_tensor2(t: TensorElement) -> "Wedge2":
        if t.weight != 2:
            raise ValueError("Wedge2 needs a weight-2 tensor")
        canon = t.canonicalize()
        reg = t.registry
        out: dict[tuple[int, int], Coeff] = {}
        for k, c in canon.terms.items():
            i, j = unpack_ids(k, 2)
            op = _ordered_pair(i, j, reg)
            if op is None:
                continue
            pair, sign = op
            _merge(out, pair, c * sign)
        return Wedge2(out, reg, reg.version)

    def __add__(self, other: "Wedge2") -> "Wedge2":
        out = dict(self.terms)
        for k, c in other.terms.items():
            _merge(out, k, c)
        return Wedge2(out, self.registry)

    def __sub__(self, other: "Wedge2") -> "Wedge2":
        return self + other.scale(-1)

    def scale(self, c: Coeff) -> "Wedge2":
        if not c:
            return Wedge2.zero(self.registry)
        return Wedge2({k: v * c for k, v in self.terms.items()}, self.registry, self._version)

    def canonicalize(self) -> "Wedge2":
        reg = self.registry
        ver = reg.version
        if self._version == ver:
            return self
        out: dict[tuple[int, int], Coeff] = {}
        for (i, j), c in self.terms.items():
            for (a, ea) in reg.resolve(i):
                for (b, eb) in reg.resolve(j):
                    op = _ordered_pair(a, b, reg)
                    if op is None:
                        continue
                    pair, sign = op
                    _merge(out, pair, c * ea * eb * sign)
        return Wedge2(out, reg, ver)

    def is_zero(self) -> bool:
        return not self.canonicalize().terms

    def residual_terms(self) -> list[tuple[Coeff, str]]:
        canon = self.canonicalize()
        reg = self.registry
        items = sorted(
            canon.terms.items(),
            key=lambda kv: (reg.canon_key(kv[0][0]), reg.canon_key(kv[0][1])),
        )
        return [(c, f"{reg.render(i)} ^ {reg.render(j)}") for (i, j), c in items]

    def __repr__(self) -> str:
        return f"Wedge2(terms={len(self.terms)})"


class WedgeChainElement:
    """Element of Lambda^2 (x) T^1 (x) T^1 over atoms: the target of the
    weight-4 proof chain.  Keys are ((i, j), k, l) with (i, j) oriented."""

    __slots__ = ("terms", "registry", "_version")

    def __init__(
        self,
        terms: dict[tuple[tuple[int, int], int, int], Coeff],
        registry: AtomRegistry = REGISTRY,
        _version: int = -1,
    ) -> None:
        self.terms = terms
        self.registry = registry
        self._version = _version

    @staticmethod
    def zero(registry: AtomRegistry = REGISTRY) -> "WedgeChainElement":
        return WedgeChainElement({}, registry)

    @staticmethod
    def from_tensor4(t: TensorElement) -> "WedgeChainElement":
        if t.weight != 4:
            raise ValueError("wedge chain needs a weight-4 tensor")
        canon = t.canonicalize()
        reg = t.registry
        out: dict[tuple[tuple[int, int], int, int], Coeff] = {}
        for key, c in canon.terms.items():
            i, j, k, l = unpack_ids(key, 4)
            op = _ordered_pair(i, j, reg)
            if op is None:
                continue
            pair, sign = op
            _merge(out, (pair, k, l), c * sign)
        return WedgeChainElement(out, reg, reg.version)

    def __add__(self, other: "WedgeChainElement") -> "WedgeChainElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            _merge(out, k, c)
        return WedgeChainElement(out, self.registry)

    def scale(self, c: Coeff) -> "WedgeChainElement":
        if not c:
            return WedgeChainElement.zero(self.registry)
        return WedgeChainElement({k: v * c for k, v in self.terms.items()}, self.registry, self._version)

    def canonicalize(self) -> "WedgeChainElement":
        reg = self.registry
        ver = reg.version
        if self._version == ver:
            return self
        out: dict[tuple[tuple[int, int], int, int], Coeff] = {}
        for ((i, j), k, l), c in self.terms.items():
            for (a, ea) in reg.resolve(i):
                for (b, eb) in reg.resolve(j):
                    op = _ordered_pair(a, b, reg)
                    if op is None:
                        continue
                    pair, sign = op
                    base = c * ea * eb * sign
                    for (k2, ek) in reg.resolve(k):
                        for (l2, el) in reg.resolve(l):
                            _merge(out, (pair, k2, l2), base * ek * el)
        return WedgeChainElement(out, reg, ver)

    def is_zero(self) -> bool:
        return not self.canonicalize().terms

    def residual_terms(self) -> list[tuple[Coeff, str]]:
        canon = self.canonicalize()
        reg = self.registry
        items = sorted(
            canon.terms.items(),
            key=lambda kv: (
                reg.canon_key(kv[0][0][0]),
                reg.canon_key(kv[0][0][1]),
                reg.canon_key(kv[0][1]),
                reg.canon_key(kv[0][2]),
            ),
        )
        return [
            (c, f"({reg.render(i)} ^ {reg.render(j)}) (x) {reg.render(k)} (x) {reg.render(l)}")
            for ((i, j), k, l), c in items
        ]

    def __repr__(self) -> str:
        return f"WedgeChainElement(terms={len(self.terms)})"


def wedge_chain(first: TensorElement, rest: TensorElement) -> WedgeChainElement:
    """Wedge the two slots of ``first`` and tensor on the two of ``rest``."""
    if first.weight != 2 or rest.weight != 2:
        raise ValueError("wedge_chain expects two weight-2 tensors")
    return WedgeChainElement.from_tensor4(tensor_combine([first, rest]))


class WedgePairElement:
    """Element of Lambda^2 of the Lambda^2 atom space: the realized target
    of the (2,2) cobracket component.  Keys are unordered pairs of oriented
    Wedge2 basis pairs."""

    __slots__ = ("terms", "registry", "_version")

    def __init__(
        self,
        terms: dict[tuple[tuple[int, int], tuple[int, int]], Coeff],
        registry: AtomRegistry = REGISTRY,
        _version: int = -1,
    ) -> None:
        self.terms = terms
        self.registry = registry
        self._version = _version

    @staticmethod
    def zero(registry: AtomRegistry = REGISTRY) -> "WedgePairElement":
        return WedgePairElement({}, registry)

    @staticmethod
    def outer(u: Wedge2, v: Wedge2) -> "WedgePairElement":
        """u ^ v in Lambda^2 of the Wedge2 space."""
        uc, vc = u.canonicalize(), v.canonicalize()
        reg = u.registry
        out: dict[tuple[tuple[int, int], tuple[int, int]], Coeff] = {}
        for pu, cu in uc.terms.items():
            ku = (reg.canon_key(pu[0]), reg.canon_key(pu[1]))
            for pv, cv in vc.terms.items():
                if pu == pv:
                    continue
                kv = (reg.canon_key(pv[0]), reg.canon_key(pv[1]))
                if ku <= kv:
                    _merge(out, (pu, pv), cu * cv)
                else:
                    _merge(out, (pv, pu), -cu * cv)
        return WedgePairElement(out, reg, reg.version)

    def __add__(self, other: "WedgePairElement") -> "WedgePairElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            _merge(out, k, c)
        return WedgePairElement(out, self.registry)

    def scale(self, c: Coeff) -> "WedgePairElement":
        if not c:
            return WedgePairElement.zero(self.registry)
        return WedgePairElement({k: v * c for k, v in self.terms.items()}, self.registry, self._version)

    def canonicalize(self) -> "WedgePairElement":
        reg = self.registry
        ver = reg.version
        if self._version == ver:
            return self
        acc = WedgePairElement.zero(reg)
        for (p, q), c in self.terms.items():
            u = Wedge2({p: 1}, reg).canonicalize()
            v = Wedge2({q: 1}, reg).canonicalize()
            acc = acc + WedgePairElement.outer(u, v).scale(c)
        acc._version = ver
        return acc

    def is_zero(self) -> bool:
        return not self.canonicalize().terms

    def residual_terms(self) -> list[tuple[Coeff, str]]:
        canon = self.canonicalize()
        reg = self.registry
        items = sorted(
            canon.terms.items(),
            key=lambda kv: tuple(reg.canon_key(i) for i in (*kv[0][0], *kv[0][1])),
        )
        out = []
        for (p, q), c in items:
            out.append(
                (c, f"({reg.render(p[0])} ^ {reg.render(p[1])}) ^^ ({reg.render(q[0])} ^ {reg.render(q[1])})")
            )
        return out

    def __repr__(self) -> str:
        return f"WedgePairElement(terms={len(self.terms)})"


# ---------------------------------------------------------------------------
# Zero decision with residual reporting
# ---------------------------------------------------------------------------

def is_zero(e) -> tuple[bool, list[str]]:
    """True iff every canonical coefficient vanishes; otherwise the nonzero
    terms, rendered, for diagnosis."""
    terms = e.residual_terms()
    return (not terms, [f"{c} * {s}" for c, s in terms])
