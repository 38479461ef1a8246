"""Coprime atom basis for the multiplicative group modulo torsion.

Elements of F*(x)Q are exponent vectors over "atoms": pairwise-coprime
non-constant primitive polynomials plus prime integers for rational
content.  Pairwise-coprime non-constant polynomials are multiplicatively
independent modulo constants, so exact zero-testing never needs
irreducible factorization; a gcd-free basis is enough.

The registry is the single piece of shared state in the whole engine.  It
is append-only and lock-protected.  Refining an atom (a later input shares
a proper factor with it) never mutates history: the atom keeps its id and
gains a *split* record expressing it as a product of finer atoms, and
every read path resolves ids through splits down to terminal atoms.  A
decomposition computed early therefore stays valid verbatim after any
number of later refinements, and zero-testing does not depend on the order
in which inputs arrived.

Canonical ordering of atoms (used for rendering and for wedge
orientation) is by content, not by registration id: primes ascending
first, then polynomials by degree and name-ordered term sequence.  Two
sessions that register the same atoms in different orders agree on every
canonical form.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import Iterable

from .multipoly import MultiPoly, exact_div, poly_gcd

AtomValue = int | MultiPoly  # prime integer, or primitive non-constant poly

_int_factor_cache: dict[int, dict[int, int]] = {}


def _factor_int(n: int) -> dict[int, int]:
    """Prime factorization of n >= 2 (cached)."""
    hit = _int_factor_cache.get(n)
    if hit is None:
        import sympy

        hit = {int(p): int(e) for p, e in sympy.factorint(n).items()}
        _int_factor_cache[n] = hit
    return hit


def _mono_name_key(mono: tuple[int, ...]) -> tuple:
    from .multipoly import VARS

    pairs = sorted(
        (VARS.name_of(vid), -e) for vid, e in enumerate(mono) if e
    )
    return (-sum(-e for _, e in pairs), tuple(pairs))


def poly_canon_key(p: MultiPoly) -> tuple:
    """Insertion-order-independent total-order key for a normalized poly."""
    term_keys = sorted((_mono_name_key(m), c) for m, c in p.terms.items())
    return (1, p.total_degree(), tuple(term_keys))


def atom_canon_key(value: AtomValue) -> tuple:
    if isinstance(value, int):
        return (0, value)
    return poly_canon_key(value)


class AtomRegistry:
    def __init__(self) -> None:
        self._values: list[AtomValue] = []
        self._keys: list[tuple] = []
        self._index: dict[object, int] = {}
        self._splits: dict[int, tuple[tuple[int, int], ...]] = {}
        self._version = 0
        self._resolve_cache: dict[int, tuple[int, tuple[tuple[int, int], ...]]] = {}
        self._poly_cache: dict[MultiPoly, tuple[Fraction, dict[int, int]]] = {}
        self._lock = threading.RLock()
        self._reset_hooks: list = getattr(self, "_reset_hooks", [])

    def on_reset(self, hook) -> None:
        """Register a callback fired by reset(); for cache invalidation."""
        self._reset_hooks.append(hook)

    # -- introspection -------------------------------------------------

    @property
    def version(self) -> int:
        with self._lock:
            return self._version

    def value(self, aid: int) -> AtomValue:
        return self._values[aid]

    def canon_key(self, aid: int) -> tuple:
        return self._keys[aid]

    def is_terminal(self, aid: int) -> bool:
        return aid not in self._splits

    def size(self) -> int:
        with self._lock:
            return len(self._values)

    def render(self, aid: int) -> str:
        v = self._values[aid]
        return str(v) if isinstance(v, int) else v.render()

    # -- registration --------------------------------------------------

    def _register(self, value: AtomValue) -> int:
        key = value if isinstance(value, int) else value
        aid = self._index.get(key)
        if aid is not None:
            return aid
        aid = len(self._values)
        self._values.append(value)
        self._keys.append(atom_canon_key(value))
        self._index[key] = aid
        return aid

    def add_integer(self, n: int) -> dict[int, int]:
        """Exponent vector of |n| over prime atoms; n must be nonzero.
        Signs are torsion and are dropped."""
        if n == 0:
            raise ValueError("zero has no multiplicative class")
        n = abs(n)
        if n == 1:
            return {}
        with self._lock:
            return {self._register(p): e for p, e in _factor_int(n).items()}

    def add_rational(self, q: Fraction) -> dict[int, int]:
        if q == 0:
            raise ValueError("zero has no multiplicative class")
        out = dict(self.add_integer(q.numerator or 1))
        for aid, e in self.add_integer(q.denominator).items():
            out[aid] = out.get(aid, 0) - e
            if not out[aid]:
                del out[aid]
        return out

    def add_poly(self, p: MultiPoly) -> dict[int, int]:
        """Exponent vector of p over atoms (poly atoms plus primes for the
        rational content).  p must be nonzero; the sign is dropped."""
        if p.is_zero():
            raise ValueError("zero has no multiplicative class")
        with self._lock:
            cached = self._poly_cache.get(p)
            if cached is not None:
                content, exps = cached
                return dict(exps)
            content, prim = p.content_and_primitive()
            out: dict[int, int] = {}
            for aid, e in self.add_rational(abs(content)).items():
                out[aid] = out.get(aid, 0) + e
            if not prim.is_constant():
                for aid, e in self._incorporate(prim).items():
                    out[aid] = out.get(aid, 0) + e
            out = {aid: e for aid, e in out.items() if e}
            self._poly_cache[p] = (content, dict(out))
            return out

    # -- refinement core (lock held) -----------------------------------

    def _terminal_poly_ids(self) -> list[int]:
        return [
            aid
            for aid in range(len(self._values))
            if aid not in self._splits and not isinstance(self._values[aid], int)
        ]

    def _incorporate(self, r: MultiPoly) -> dict[int, int]:
        """Decompose primitive non-constant r over terminal atoms, splitting
        existing atoms when r shares a proper factor with one of them."""
        out: dict[int, int] = {}
        while True:
            if r.is_constant():
                return out
            r_vars = r.variables()
            split_happened = False
            for aid in self._terminal_poly_ids():
                a = self._values[aid]
                assert isinstance(a, MultiPoly)
                if not (a.variables() & r_vars):
                    continue
                # Cheap peel first: a can only divide r when it fits.
                if a.total_degree() <= r.total_degree() and a.variables() <= r_vars:
                    k = 0
                    while True:
                        q = exact_div(r, a)
                        if q is None:
                            break
                        r = q
                        k += 1
                    if k:
                        out[aid] = out.get(aid, 0) + k
                        if r.is_constant():
                            return out
                        r_vars = r.variables()
                        if not (a.variables() & r_vars):
                            continue
                # a no longer divides r, but they may share a proper factor.
                g = poly_gcd(r, a)
                if g.is_constant():
                    continue
                if g == a:  # defensive: a divides r after all
                    q = exact_div(r, a)
                    assert q is not None
                    r = q
                    out[aid] = out.get(aid, 0) + 1
                    split_happened = True  # rescan with the smaller r
                    break
                # Proper common factor: refine atom aid, then rescan.
                self._split(aid, g)
                split_happened = True
                break
            if not split_happened:
                break
        # Whatever survived is coprime to every terminal atom: a new atom.
        aid = self._register(r)
        out[aid] = out.get(aid, 0) + 1
        return out

    def _split(self, aid: int, g: MultiPoly) -> None:
        """Record atom aid = g * (aid/g) with both sides refined further."""
        a = self._values[aid]
        assert isinstance(a, MultiPoly)
        rest = exact_div(a, g)
        assert rest is not None and not rest.is_constant()
        g_id = self._register(g)
        # Retire aid before refining the cofactor, otherwise the recursive
        # scan keeps rediscovering the parent atom.
        self._splits[aid] = ((g_id, 1),)
        parts: dict[int, int] = {g_id: 1}
        # rest may still share factors with g (a = g^2*h and similar), so it
        # goes through the full machinery; recursion strictly drops degree.
        for bid, e in self._incorporate(rest).items():
            parts[bid] = parts.get(bid, 0) + e
        self._splits[aid] = tuple(sorted(parts.items()))
        self._version += 1
        self._resolve_cache.clear()

    # -- resolution ----------------------------------------------------

    def resolve(self, aid: int) -> tuple[tuple[int, int], ...]:
        """aid as a product of terminal atoms (id, exponent), id-sorted."""
        with self._lock:
            return self._resolve(aid)

    def _resolve(self, aid: int) -> tuple[tuple[int, int], ...]:
        if aid not in self._splits:
            return ((aid, 1),)
        cached = self._resolve_cache.get(aid)
        if cached is not None and cached[0] == self._version:
            return cached[1]
        acc: dict[int, int] = {}
        for bid, e in self._splits[aid]:
            for cid, f in self._resolve(bid):
                acc[cid] = acc.get(cid, 0) + e * f
        result = tuple(sorted(acc.items()))
        self._resolve_cache[aid] = (self._version, result)
        return result

    def resolve_vector(self, exps: dict[int, Fraction | int]) -> dict[int, Fraction | int]:
        """Resolve a whole exponent vector down to terminal atoms."""
        with self._lock:
            if not self._splits:
                return dict(exps)
            out: dict[int, Fraction | int] = {}
            for aid, e in exps.items():
                for bid, f in self._resolve(aid):
                    v = out.get(bid, 0) + e * f
                    if v:
                        out[bid] = v
                    else:
                        out.pop(bid, None)
            return out

    def reset(self) -> None:
        # Test isolation only.
        with self._lock:
            self.__init__()  # type: ignore[misc]
            for hook in self._reset_hooks:
                hook()


REGISTRY = AtomRegistry()


def factor_refine(
    ps: Iterable[MultiPoly],
) -> tuple[list[AtomValue], list[list[int]]]:
    """GCD-free basis of the inputs.

    Returns (basis, exponents): pairwise-coprime non-constant primitive
    polynomials plus prime integers, ordered canonically, and one exponent
    row per input such that input = rational-constant * product of
    basis[j] ** exponents[i][j].  Runs on a private registry so the output
    depends only on the inputs.
    """
    ps = list(ps)
    reg = AtomRegistry()
    raw_rows: list[dict[int, int]] = []
    for p in ps:
        if p.is_zero():
            raise ValueError("factor_refine inputs must be nonzero")
        raw_rows.append(reg.add_poly(p))
    resolved = [reg.resolve_vector(row) for row in raw_rows]
    used = sorted(
        {aid for row in resolved for aid in row},
        key=reg.canon_key,
    )
    basis = [reg.value(aid) for aid in used]
    col = {aid: j for j, aid in enumerate(used)}
    matrix = []
    for row in resolved:
        out = [0] * len(used)
        for aid, e in row.items():
            out[col[aid]] = int(e)
        matrix.append(out)
    return basis, matrix
