"""Dirichlet L-values, Dedekind zeta factorization, and the imaginary
quadratic weight-2 determinant check.

For a quadratic field of fundamental discriminant D the Dedekind zeta
factors as zeta_F(s) = zeta(s) L(s, chi_D) with chi_D the Kronecker
symbol.  L-values are computed through Hurwitz zetas over one character
period (Euler-Maclaurin tails, shared Bernoulli table), which reaches
ten significant digits in microseconds at desk scale; s = 1 is the
digamma limit, available because a nontrivial character sums to zero
over a period and so cancels the pole.

The endgame is ``zagier_check_n2``: for an imaginary quadratic field
(r1 = 0, r2 = 1, so the weight-2 determinant is 1x1) and a field
element y, form

    q = zeta_F(2) * sqrt(|D|) / (pi^2 * D(sigma(y)))

with D the Bloch-Wigner dilogarithm, and attempt to reconstruct q as a
small-height rational, reporting stability under doubled working
effort.  A successful stable reconstruction is the desk-scale shadow
of the determinant law relating zeta_F(2) to single-valued dilogarithm
values at field embeddings.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import gmpy2
import numpy as np

from .errors import DegenerateWitness, InvalidDiscriminant
from .numeric import bernoulli_numbers, bloch_wigner

Rat = Union[int, Fraction]


# ------------------------------------------------------------ discriminants


def is_fundamental_discriminant(D: int) -> bool:
    """True iff D is a fundamental quadratic discriminant (1 counts, 0 does not)."""

    def squarefree(m: int) -> bool:
        m = abs(m)
        d = 2
        while d * d <= m:
            if m % (d * d) == 0:
                return False
            d += 1
        return True

    if D == 0:
        return False
    if D % 4 == 1:
        return squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


def kronecker_chi(D: int, n: int) -> int:
    """The Kronecker symbol (D/n), the quadratic character attached to D."""

    if not is_fundamental_discriminant(D):
        raise InvalidDiscriminant(f"{D} is not a fundamental discriminant")
    return int(gmpy2.kronecker(D, n))


@dataclass(frozen=True)
class QuadField:
    """An imaginary quadratic field keyed by its fundamental discriminant."""

    D: int

    def __post_init__(self) -> None:
        if self.D >= 0 or not is_fundamental_discriminant(self.D):
            raise InvalidDiscriminant(
                f"{self.D} is not a negative fundamental discriminant"
            )

    @property
    def r1(self) -> int:
        return 0

    @property
    def r2(self) -> int:
        return 1

    @property
    def d2(self) -> int:
        # number of rows in the weight-2 determinant: r2 for even weight
        return 1

    def embed(self, a: Rat, b: Rat, c: Rat) -> complex:
        """sigma((a + b sqrt(D)) / c) for the embedding with Im > 0 on sqrt(D)."""

        if c == 0:
            raise DegenerateWitness("zero denominator in field element")
        a, b, c = Fraction(a), Fraction(b), Fraction(c)
        return complex(float(a / c), math.sqrt(-self.D) * float(b / c))


# ------------------------------------------------------------ Hurwitz zeta


_EM_TERMS = 11
_EM_SHIFT = 28


def hurwitz_zeta(s: int, x: float) -> float:
    """zeta(s, x) for integer s >= 2 and x > 0, by Euler-Maclaurin."""

    if s < 2:
        raise InvalidDiscriminant("hurwitz_zeta here serves integer s >= 2 only")
    head = sum((x + k) ** (-s) for k in range(_EM_SHIFT))
    X = x + _EM_SHIFT
    acc = head + X ** (1 - s) / (s - 1) + 0.5 * X ** (-s)
    bs = bernoulli_numbers(2 * _EM_TERMS + 2)
    for j in range(1, _EM_TERMS + 1):
        rising = 1.0  # rising factorial s (s+1) ... (s + 2j - 2)
        for i in range(2 * j - 1):
            rising *= s + i
        acc += float(bs[2 * j]) / math.factorial(2 * j) * rising * X ** (-s - 2 * j + 1)
    return acc


def digamma(x: float) -> float:
    """psi(x) for x > 0; the s -> 1 limit partner of the Hurwitz zeta."""

    head = sum(1.0 / (x + k) for k in range(_EM_SHIFT))
    X = x + _EM_SHIFT
    acc = math.log(X) - 0.5 / X - head
    bs = bernoulli_numbers(2 * _EM_TERMS + 2)
    for j in range(1, _EM_TERMS + 1):
        acc -= float(bs[2 * j]) / (2 * j) * X ** (-2 * j)
    return acc


def dirichlet_L(s: int, D: int) -> float:
    """L(s, chi_D) for integer s >= 1 (s = 1 needs a nontrivial character)."""

    if not is_fundamental_discriminant(D):
        raise InvalidDiscriminant(f"{D} is not a fundamental discriminant")
    q = abs(D)
    if s == 1:
        if D == 1:
            raise DegenerateWitness("L(1) diverges for the trivial character")
        # pole of each Hurwitz term cancels because sum chi(a) = 0
        acc = 0.0
        for a in range(1, q + 1):
            chi = kronecker_chi(D, a)
            if chi:
                acc += chi * (-digamma(a / q))
        return acc / q
    acc = 0.0
    for a in range(1, q + 1):
        chi = kronecker_chi(D, a)
        if chi:
            acc += chi * hurwitz_zeta(s, a / q)
    return acc / q**s


def dedekind_zeta2(D: int) -> float:
    """zeta_F(2) for the quadratic field of discriminant D, by factorization."""

    return (math.pi**2 / 6.0) * dirichlet_L(2, D)


def dedekind_zeta2_direct(D: int, cutoff: int = 400_000) -> float:
    """Independent oracle: sum r(n)/n^2 with r(n) = sum_{d | n} chi_D(d).

    A divisor sieve accumulates r, and the smooth part of the tail is
    restored with the ideal-count density L(1, chi_D), leaving an error
    of order cutoff^(-3/2).
    """

    q = abs(D)
    chi = np.array([kronecker_chi(D, n) for n in range(q)], dtype=np.int64)
    r = np.zeros(cutoff + 1, dtype=np.int64)
    for d in range(1, cutoff + 1):
        c = chi[d % q]
        if c:
            r[d::d] += c
    n = np.arange(1, cutoff + 1, dtype=np.float64)
    main = float(np.sum(r[1:] / n**2))
    tail = dirichlet_L(1, D) / cutoff
    return main + tail


# ------------------------------------------------------------ the n=2 check


@dataclass(frozen=True)
class ZagierReport:
    """Outcome of the weight-2 determinant reconstruction for one witness."""

    D: int
    y: complex
    zeta_f2: float
    dilog: float
    q: float
    rational: Fraction | None
    stable: bool
    elapsed_ms: float

    @property
    def ok(self) -> bool:
        return self.rational is not None and self.stable


FieldElement = Union[complex, tuple]


def _witness_to_complex(field: QuadField, y: FieldElement) -> complex:
    if isinstance(y, tuple):
        a, b, c = y
        return field.embed(a, b, c)
    return complex(y)


def zagier_check_n2(
    D: int,
    ys: Sequence[FieldElement],
    den_bound: int = 10_000,
    tol: float = 1e-8,
) -> list[ZagierReport]:
    """Reconstruct zeta_F(2) * sqrt|D| / (pi^2 * D(sigma(y))) as a rational.

    For an imaginary quadratic field the weight-2 determinant is 1x1, so
    a single witness y decides the statement: the ratio must be rational
    (and, conjecturally, of small height for natural witnesses).  Each
    report carries the reconstructed rational and whether the same
    rational survives a doubled-effort recomputation.
    """

    field = QuadField(D)
    out: list[ZagierReport] = []
    for y in ys:
        t0 = time.perf_counter()
        sigma_y = _witness_to_complex(field, y)
        dval = bloch_wigner(sigma_y)
        if abs(dval) < 1e-12:
            raise DegenerateWitness(
                f"Bloch-Wigner value vanishes at {sigma_y}; no reconstruction possible"
            )
        zf2 = dedekind_zeta2(D)
        q = zf2 * math.sqrt(abs(D)) / (math.pi**2 * dval)
        rat = Fraction(q).limit_denominator(den_bound)
        rational = rat if abs(q - float(rat)) < tol else None
        # doubled effort: direct-series zeta_F as the second, slower route
        zf2_b = dedekind_zeta2_direct(D, cutoff=120_000)
        q_b = zf2_b * math.sqrt(abs(D)) / (math.pi**2 * dval)
        rat_b = Fraction(q_b).limit_denominator(den_bound)
        stable = rational is not None and rat_b == rational and abs(q_b - float(rat_b)) < 1e-6
        out.append(
            ZagierReport(
                D=D,
                y=sigma_y,
                zeta_f2=zf2,
                dilog=dval,
                q=q,
                rational=rational,
                stable=stable,
                elapsed_ms=(time.perf_counter() - t0) * 1000.0,
            )
        )
    return out
