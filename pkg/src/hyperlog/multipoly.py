"""Exact sparse multivariate polynomial arithmetic over Q.

A polynomial is a dictionary mapping monomial exponent tuples to nonzero
Fraction coefficients.  Exponent tuples are indexed by a global variable
table and stored with trailing zeros trimmed, so the same dictionary key
represents the same monomial no matter which other variables exist:

  A^2*B + 3  ->  {(2, 1): Fraction(1), (): Fraction(3)}    (A -> slot 0, B -> slot 1)

The zero polynomial is the empty dictionary.

Monomial order is graded lexicographic, with the lexicographic tie broken
by *variable name* rather than by registration index.  Registration order
of variables therefore never influences a canonical form; two sessions
that create the same polynomials in a different order agree on leading
terms, primitive normal forms and atom ordering.

The GCD is a primitive polynomial-remainder-sequence computation, exact
over Q, preceded by a certified modular coprimality test: evaluating all
but one variable at random points modulo a large prime can only *lower*
the degree of the gcd's image, and if the evaluation preserves the leading
coefficient of one input the image of the gcd keeps its full degree in the
remaining variable.  A degree-0 image under such an evaluation therefore
proves the gcd has degree 0 in that variable.  Most pairs met here are
coprime, so this fast path does almost all the work.
"""

from __future__ import annotations

import math
import random
import threading
from fractions import Fraction
from typing import Callable, Iterable, Mapping

Monomial = tuple[int, ...]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class _VarTable:
    """Global name <-> slot registry for polynomial variables.

    Append-only and lock-protected; slots are dense indices into monomial
    tuples.  All ordering decisions are made through name_ranks(), never
    through the raw slot numbers.
    """

    def __init__(self) -> None:
        self._names: list[str] = []
        self._ids: dict[str, int] = {}
        self._lock = threading.RLock()
        self._rank_cache: tuple[int, tuple[int, ...]] = (0, ())

    def id_of(self, name: str) -> int:
        with self._lock:
            vid = self._ids.get(name)
            if vid is None:
                vid = len(self._names)
                self._names.append(name)
                self._ids[name] = vid
            return vid

    def name_of(self, vid: int) -> str:
        with self._lock:
            return self._names[vid]

    def size(self) -> int:
        with self._lock:
            return len(self._names)

    def name_ranks(self) -> tuple[int, ...]:
        """rank[vid] = position of vid when variables are sorted by name."""
        with self._lock:
            n = len(self._names)
            cached_n, cached = self._rank_cache
            if cached_n == n:
                return cached
            order = sorted(range(n), key=lambda v: self._names[v])
            ranks = [0] * n
            for pos, vid in enumerate(order):
                ranks[vid] = pos
            result = tuple(ranks)
            self._rank_cache = (n, result)
            return result

    def reset(self) -> None:
        # Test isolation only; production use is append-only.
        with self._lock:
            self._names = []
            self._ids = {}
            self._rank_cache = (0, ())


VARS = _VarTable()


def _trim(exps: Iterable[int]) -> Monomial:
    t = tuple(exps)
    while t and t[-1] == 0:
        t = t[:-1]
    return t


def _mono_mul_fast(a: Monomial, b: Monomial) -> Monomial:
    # No trailing-zero trim needed: a sum of exponents ending in a positive
    # entry stays positive, and both inputs are already trimmed.
    if not a:
        return b
    if not b:
        return a
    if len(a) < len(b):
        a, b = b, a
    return tuple(x + y for x, y in zip(a, b)) + a[len(b):]


def _mono_div(a: Monomial, b: Monomial) -> Monomial | None:
    """a / b, or None when b does not divide a."""
    if len(b) > len(a):
        return None
    out = list(a)
    for i, e in enumerate(b):
        out[i] -= e
        if out[i] < 0:
            return None
    return _trim(out)


def _mono_key(m: Monomial, ranks: tuple[int, ...]) -> tuple:
    # Graded, then lexicographic by variable name: higher power of the
    # name-earliest variable wins.
    by_rank = [0] * len(ranks)
    for vid, e in enumerate(m):
        if e:
            by_rank[ranks[vid]] = e
    return (sum(m), tuple(by_rank))


class MultiPoly:
    """Immutable sparse polynomial; do not mutate ``terms`` after creation."""

    __slots__ = ("terms", "_key", "_hash")

    def __init__(self, terms: dict[Monomial, Fraction]) -> None:
        self.terms = terms
        self._key: tuple | None = None
        self._hash: int | None = None

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "MultiPoly":
        return MultiPoly({})

    @staticmethod
    def const(value: int | Fraction) -> "MultiPoly":
        c = Fraction(value)
        return MultiPoly({(): c} if c else {})

    @staticmethod
    def var(name: str) -> "MultiPoly":
        vid = VARS.id_of(name)
        mono = _trim(tuple(0 for _ in range(vid)) + (1,))
        return MultiPoly({mono: _ONE})

    @staticmethod
    def from_terms(terms: Mapping[Monomial, Fraction | int]) -> "MultiPoly":
        clean: dict[Monomial, Fraction] = {}
        for m, c in terms.items():
            fc = Fraction(c)
            if fc:
                clean[_trim(m)] = fc
        return MultiPoly(clean)

    # -- predicates and views -----------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return self.terms.get((), _ZERO)

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(m) for m in self.terms)

    def degree_in(self, vid: int) -> int:
        deg = 0
        for m in self.terms:
            if len(m) > vid and m[vid] > deg:
                deg = m[vid]
        return deg

    def variables(self) -> frozenset[int]:
        out: set[int] = set()
        for m in self.terms:
            for vid, e in enumerate(m):
                if e:
                    out.add(vid)
        return frozenset(out)

    def sorted_monomials(self) -> list[Monomial]:
        """Monomials in descending graded-lex(name) order."""
        ranks = VARS.name_ranks()
        return sorted(self.terms, key=lambda m: _mono_key(m, ranks), reverse=True)

    def leading(self) -> tuple[Monomial, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        lead = self.sorted_monomials()[0]
        return lead, self.terms[lead]

    # -- canonical identity -------------------------------------------

    def key(self) -> tuple:
        if self._key is None:
            ranks = VARS.name_ranks()
            self._key = tuple(
                (m, self.terms[m])
                for m in sorted(self.terms, key=lambda m: _mono_key(m, ranks), reverse=True)
            )
        return self._key

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, _ZERO) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return MultiPoly(out)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        if not other.terms:
            return self
        return self + (-other)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        if not self.terms or not other.terms:
            return MultiPoly({})
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict[Monomial, Fraction] = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = _mono_mul_fast(ma, mb)
                s = out.get(m, _ZERO) + ca * cb
                if s:
                    out[m] = s
                else:
                    del out[m]
        return MultiPoly(out)

    def scale(self, c: Fraction | int) -> "MultiPoly":
        fc = Fraction(c)
        if not fc:
            return MultiPoly({})
        return MultiPoly({m: co * fc for m, co in self.terms.items()})

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- normal form ----------------------------------------------------

    def content_and_primitive(self) -> tuple[Fraction, "MultiPoly"]:
        """p == content * primitive; primitive has coprime integer
        coefficients and positive leading coefficient (graded-lex by name)."""
        if not self.terms:
            return _ZERO, self
        den_lcm = 1
        num_gcd = 0
        for c in self.terms.values():
            den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
            num_gcd = math.gcd(num_gcd, c.numerator)
        content = Fraction(num_gcd, den_lcm)
        prim = MultiPoly({m: c / content for m, c in self.terms.items()})
        _, lc = prim.leading()
        if lc < 0:
            prim = -prim
            content = -content
        return content, prim

    def primitive(self) -> "MultiPoly":
        if not self.terms:
            return self
        return self.content_and_primitive()[1]

    # -- evaluation ------------------------------------------------------

    def evaluate(self, assignment: Mapping[str, Fraction | int]) -> Fraction:
        by_id: dict[int, Fraction] = {VARS.id_of(n): Fraction(v) for n, v in assignment.items()}
        for vid in self.variables():
            if vid not in by_id:
                raise ValueError(f"assignment misses variable {VARS.name_of(vid)!r}")
        total = _ZERO
        for m, c in self.terms.items():
            v = c
            for vid, e in enumerate(m):
                if e:
                    v *= by_id[vid] ** e
            total += v
        return total

    # -- substitution ----------------------------------------------------

    def substitute(self, mapping: Mapping[str, "MultiPoly"]) -> "MultiPoly":
        """Replace each named variable by a polynomial; others stay."""
        by_id = {VARS.id_of(n): p for n, p in mapping.items()}
        total = MultiPoly({})
        for m, c in self.terms.items():
            term = MultiPoly.const(c)
            for vid, e in enumerate(m):
                if not e:
                    continue
                rep = by_id.get(vid)
                if rep is None:
                    rep = MultiPoly({_trim(tuple(0 for _ in range(vid)) + (1,)): _ONE})
                term = term * rep ** e
            total = total + term
        return total

    # -- rendering -------------------------------------------------------

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts: list[str] = []
        for m in self.sorted_monomials():
            c = self.terms[m]
            factors: list[str] = []
            for vid, e in enumerate(m):
                if e == 1:
                    factors.append(VARS.name_of(vid))
                elif e:
                    factors.append(f"{VARS.name_of(vid)}^{e}")
            body = "*".join(factors)
            if not body:
                piece = str(c)
            elif c == 1:
                piece = body
            elif c == -1:
                piece = f"-{body}"
            else:
                piece = f"{c}*{body}"
            parts.append(piece)
        out = parts[0]
        for piece in parts[1:]:
            out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
        return out

    def __repr__(self) -> str:
        return f"MultiPoly({self.render()})"


# ---------------------------------------------------------------------------
# Exact division
# ---------------------------------------------------------------------------

def exact_div(p: MultiPoly, q: MultiPoly) -> MultiPoly | None:
    """p / q when q divides p exactly, else None.

    Leading-term reduction under a fixed monomial order: if q | p the
    leading term of the running remainder is always divisible by LT(q), so
    failure of that divisibility proves q does not divide p.
    """
    if q.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if p.is_zero():
        return p
    if q.is_constant():
        return p.scale(1 / q.constant_value())
    ranks = VARS.name_ranks()
    qm, qc = max(q.terms, key=lambda m: _mono_key(m, ranks)), None
    qc = q.terms[qm]
    rem = dict(p.terms)
    quot: dict[Monomial, Fraction] = {}
    while rem:
        rm = max(rem, key=lambda m: _mono_key(m, ranks))
        ratio = _mono_div(rm, qm)
        if ratio is None:
            return None
        coeff = rem[rm] / qc
        quot[ratio] = coeff
        for m, c in q.terms.items():
            mm = _mono_mul_fast(ratio, m)
            s = rem.get(mm, _ZERO) - coeff * c
            if s:
                rem[mm] = s
            else:
                rem.pop(mm, None)
    return MultiPoly(quot)


# ---------------------------------------------------------------------------
# GCD: univariate helpers over MultiPoly coefficients
# ---------------------------------------------------------------------------

def _to_univariate(p: MultiPoly, vid: int) -> dict[int, MultiPoly]:
    """View p as a polynomial in variable vid with MultiPoly coefficients."""
    out: dict[int, dict[Monomial, Fraction]] = {}
    for m, c in p.terms.items():
        e = m[vid] if len(m) > vid else 0
        rest = list(m)
        if len(rest) > vid:
            rest[vid] = 0
        key = _trim(rest)
        out.setdefault(e, {})[key] = c
    return {e: MultiPoly(t) for e, t in out.items()}


def _from_univariate(u: dict[int, MultiPoly], vid: int) -> MultiPoly:
    out: dict[Monomial, Fraction] = {}
    for e, coeff in u.items():
        for m, c in coeff.terms.items():
            full = list(m) + [0] * (max(0, vid + 1 - len(m)))
            if e:
                full[vid] += e
            out[_trim(full)] = c
    return MultiPoly(out)


def _uni_deg(u: dict[int, MultiPoly]) -> int:
    return max(u) if u else -1


def _gcd_many(ps: list[MultiPoly]) -> MultiPoly:
    g = MultiPoly.zero()
    for p in ps:
        if p.is_zero():
            continue
        g = p.primitive() if g.is_zero() else poly_gcd(g, p)
        if g.is_constant():
            return MultiPoly.const(1)
    return g if not g.is_zero() else MultiPoly.const(1)


def _uni_content_primitive(u: dict[int, MultiPoly]) -> tuple[MultiPoly, dict[int, MultiPoly]]:
    cont = _gcd_many(list(u.values()))
    if not cont.is_constant():
        prim: dict[int, MultiPoly] = {}
        for e, c in u.items():
            q = exact_div(c, cont)
            assert q is not None  # cont divides every coefficient by construction
            prim[e] = q
        u = prim
    # Strip the rational content as well; pseudo-remainders explode otherwise.
    num_gcd = 0
    den_lcm = 1
    for c in u.values():
        for coeff in c.terms.values():
            num_gcd = math.gcd(num_gcd, coeff.numerator)
            den_lcm = den_lcm * coeff.denominator // math.gcd(den_lcm, coeff.denominator)
    scale = Fraction(den_lcm, num_gcd) if num_gcd else _ONE
    if scale != 1:
        u = {e: c.scale(scale) for e, c in u.items()}
    return cont, u


def _uni_pseudo_rem(f: dict[int, MultiPoly], g: dict[int, MultiPoly]) -> dict[int, MultiPoly]:
    """Pseudo-remainder of f by g in the main variable (both nonzero)."""
    df, dg = _uni_deg(f), _uni_deg(g)
    lc_g = g[dg]
    r = dict(f)
    while r and _uni_deg(r) >= dg:
        dr = _uni_deg(r)
        lc_r = r[dr]
        # lc_g * r - lc_r * x^(dr-dg) * g
        new: dict[int, MultiPoly] = {}
        for e, c in r.items():
            new[e] = c * lc_g
        for e, c in g.items():
            shifted = e + dr - dg
            prev = new.get(shifted, MultiPoly.zero())
            val = prev - lc_r * c
            if val.is_zero():
                new.pop(shifted, None)
            else:
                new[shifted] = val
        r = {e: c for e, c in new.items() if not c.is_zero()}
    return r


# ---------------------------------------------------------------------------
# GCD: certified modular coprimality fast path
# ---------------------------------------------------------------------------

_FAST_PRIME = (1 << 31) - 1
_fast_rng = random.Random(0x5EED)


def _poly_int_terms(p: MultiPoly) -> list[tuple[Monomial, int]]:
    # Clear denominators; scaling by a nonzero constant never changes gcd
    # degrees, and the lcm of the denominators can not vanish mod the prime
    # because it is far smaller than 2^31 - 1 in this workload; when it is
    # not, the fast path simply reports "unknown".
    den_lcm = 1
    for c in p.terms.values():
        den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
    if den_lcm % _FAST_PRIME == 0:
        return []
    return [(m, int(c * den_lcm)) for m, c in p.terms.items()]


def _eval_mod(
    terms: list[tuple[Monomial, int]], vid: int, assign: dict[int, int]
) -> list[int]:
    """Univariate image in vid mod the fast prime; coefficient list by degree."""
    deg = max((m[vid] if len(m) > vid else 0) for m, _ in terms)
    out = [0] * (deg + 1)
    for m, c in terms:
        v = c % _FAST_PRIME
        e_main = 0
        for i, e in enumerate(m):
            if not e:
                continue
            if i == vid:
                e_main = e
            else:
                v = v * pow(assign[i], e, _FAST_PRIME) % _FAST_PRIME
        out[e_main] = (out[e_main] + v) % _FAST_PRIME
    return out


def _uni_gcd_mod(a: list[int], b: list[int]) -> int:
    """Degree of gcd of two univariate polys mod the fast prime."""

    def trim(x: list[int]) -> list[int]:
        while x and x[-1] == 0:
            x.pop()
        return x

    a, b = trim(list(a)), trim(list(b))
    while b:
        inv = pow(b[-1], _FAST_PRIME - 2, _FAST_PRIME)
        while len(a) >= len(b):
            f = a[-1] * inv % _FAST_PRIME
            off = len(a) - len(b)
            for i, c in enumerate(b):
                a[i + off] = (a[i + off] - f * c) % _FAST_PRIME
            trim(a)
            if not a:
                break
        a, b = b, a
    return len(a) - 1 if a else -1


def _certified_coprime(p: MultiPoly, q: MultiPoly) -> bool:
    """True only when gcd(p, q) is provably constant."""
    shared = p.variables() & q.variables()
    if not shared:
        return True
    tp = _poly_int_terms(p)
    tq = _poly_int_terms(q)
    if not tp or not tq:
        return False
    all_vars = p.variables() | q.variables()
    for vid in shared:
        ok = False
        for _ in range(6):
            assign = {v: _fast_rng.randrange(1, _FAST_PRIME) for v in all_vars if v != vid}
            a = _eval_mod(tp, vid, assign)
            b = _eval_mod(tq, vid, assign)
            # Degree preservation of either input certifies the bound.
            if (len(a) - 1 == p.degree_in(vid) and a[-1] != 0) or (
                len(b) - 1 == q.degree_in(vid) and b[-1] != 0
            ):
                if _uni_gcd_mod(a, b) == 0:
                    ok = True
                    break
                return False  # modular gcd nontrivial: likely a real common factor
        if not ok:
            return False
    return True


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def poly_arith(p: MultiPoly, q: MultiPoly, op: str) -> MultiPoly:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown op {op!r}")


def poly_gcd(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """GCD in primitive normal form (content removed, positive leading
    coefficient).  Exact; inputs must not both be zero."""
    if p.is_zero() and q.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    if p.is_zero():
        return q.primitive()
    if q.is_zero():
        return p.primitive()
    a, b = p.primitive(), q.primitive()
    if a.is_constant() or b.is_constant():
        return MultiPoly.const(1)
    if a == b:
        return a
    # Quick exact-divisibility probes catch the common "atom divides" case.
    if a.total_degree() <= b.total_degree() and exact_div(b, a) is not None:
        return a
    if b.total_degree() <= a.total_degree() and exact_div(a, b) is not None:
        return b
    if _certified_coprime(a, b):
        return MultiPoly.const(1)
    shared = sorted(
        a.variables() & b.variables(),
        key=lambda v: min(a.degree_in(v), b.degree_in(v)),
    )
    if not shared:
        return MultiPoly.const(1)
    vid = shared[0]
    ua, ub = _to_univariate(a, vid), _to_univariate(b, vid)
    cont_a, ua = _uni_content_primitive(ua)
    cont_b, ub = _uni_content_primitive(ub)
    cont = poly_gcd(cont_a, cont_b) if not (cont_a.is_constant() and cont_b.is_constant()) else MultiPoly.const(1)
    if _uni_deg(ua) < _uni_deg(ub):
        ua, ub = ub, ua
    # Primitive PRS: pseudo-divide, then strip content, until remainder 0.
    while True:
        r = _uni_pseudo_rem(ua, ub)
        if not r:
            g_main = ub
            break
        if _uni_deg(r) == 0:
            g_main = {0: MultiPoly.const(1)}
            break
        _, r = _uni_content_primitive(r)
        ua, ub = ub, r
    g = _from_univariate(g_main, vid).primitive()
    return (g * cont).primitive()


def poly_eval(p: MultiPoly, assignment: Mapping[str, Fraction | int]) -> Fraction:
    return p.evaluate(assignment)


def poly_lcm(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    if p.is_zero() or q.is_zero():
        return MultiPoly.zero()
    g = poly_gcd(p, q)
    quot = exact_div(p, g)
    assert quot is not None
    return (quot * q).primitive()
