"""Floating-point evaluation: polylogarithms, the single-valued real
polylogarithm, and iterated integrals along explicit complex paths.

Three cooperating evaluators live here.

``li_n`` computes the classical polylogarithm on its principal branch
(cut along [1, oo)) by region dispatch: the defining power series on
|z| <= 1/2, the logarithmic series around z = 1 (in mu = log z, with
integer-argument zeta coefficients) on the middle annulus, and the
inversion formula with a Bernoulli polynomial for |z| >= 2.  All three
agree on the overlaps, which the tests check explicitly.

``svp`` is the single-valued real combination

    R_n( sum_{k=0}^{n-1} B_k/k! * log^k(z zbar) * Li_{n-k}(z) )

with R_n the real part for odd n and the imaginary part for even n;
for n = 2 it collapses to the familiar Im Li_2(z) + log|z| arg(1-z).
It is real-analytic across the cut, so on [1, oo) it is evaluated on
the upper-edge branch, where the one-sided limits agree.

``iterated_integral_num`` integrates I(a0; a1..an; a_end) as the
first-order system over prefix subwords: F_0 = 1 and

    dF_k/dt = F_{k-1}(t) / (t - a_k),   F_k(a0) = 0  (k >= 1),

driven along a polyline.  Letters equal to the basepoint make the
system 0/0 at the start; a truncated power-series solution around a0
supplies initial values a safe radius out.  Letters equal to the
endpoint are handled by path reversal (picking up (-1)^weight), and a
term singular at both ends is split at a midpoint via the path
composition rule, whose pieces are each singular at one end at most.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BranchAmbiguity, DegenerateArgument, DivergentTerm, PathError
from .projective import PPoint
from .symbols import ITerm

Number = Union[int, float, complex, Fraction]

_TWO_PI = 2.0 * math.pi


# --------------------------------------------------------------------------
# values with a propagated error estimate


@dataclass(frozen=True)
class ComplexVal:
    """A complex double with a conservative absolute-error estimate."""

    val: complex
    err: float = 0.0

    @property
    def re(self) -> float:
        return self.val.real

    @property
    def im(self) -> float:
        return self.val.imag

    @staticmethod
    def of(x: "ComplexVal | Number", err: float = 0.0) -> "ComplexVal":
        if isinstance(x, ComplexVal):
            return x
        return ComplexVal(complex(x), err)

    def __add__(self, other: "ComplexVal | Number") -> "ComplexVal":
        o = ComplexVal.of(other)
        return ComplexVal(self.val + o.val, self.err + o.err + 1e-16 * abs(self.val + o.val))

    __radd__ = __add__

    def __neg__(self) -> "ComplexVal":
        return ComplexVal(-self.val, self.err)

    def __sub__(self, other: "ComplexVal | Number") -> "ComplexVal":
        return self + (-ComplexVal.of(other))

    def __rsub__(self, other: "ComplexVal | Number") -> "ComplexVal":
        return ComplexVal.of(other) + (-self)

    def __mul__(self, other: "ComplexVal | Number") -> "ComplexVal":
        o = ComplexVal.of(other)
        err = abs(self.val) * o.err + abs(o.val) * self.err + self.err * o.err
        return ComplexVal(self.val * o.val, err + 1e-16 * abs(self.val * o.val))

    __rmul__ = __mul__

    def __truediv__(self, other: "ComplexVal | Number") -> "ComplexVal":
        o = ComplexVal.of(other)
        mag = abs(o.val)
        if mag == 0.0 or o.err >= mag:
            raise DegenerateArgument("division by a value indistinguishable from zero")
        err = self.err / mag + abs(self.val) * o.err / (mag * (mag - o.err))
        return ComplexVal(self.val / o.val, err + 1e-16 * abs(self.val / o.val))

    def __abs__(self) -> float:
        return abs(self.val)

    def __complex__(self) -> complex:
        return self.val


def _as_complex(x: "ComplexVal | Number") -> complex:
    if isinstance(x, ComplexVal):
        return x.val
    return complex(x)


# --------------------------------------------------------------------------
# Bernoulli numbers and integer zeta values


@lru_cache(maxsize=None)
def bernoulli_numbers(count: int) -> tuple[Fraction, ...]:
    """The first ``count`` Bernoulli numbers B_0 .. B_{count-1}, with B_1 = -1/2."""

    out: list[Fraction] = []
    for m in range(count):
        if m == 0:
            out.append(Fraction(1))
            continue
        acc = Fraction(0)
        for j in range(m):
            acc += Fraction(math.comb(m + 1, j)) * out[j]
        out.append(-acc / (m + 1))
    return tuple(out)


def bernoulli_poly(n: int, x: complex) -> complex:
    """B_n(x) as the binomial sum over Bernoulli numbers."""

    bs = bernoulli_numbers(n + 1)
    return sum(math.comb(n, k) * complex(bs[k]) * x ** (n - k) for k in range(n + 1))


def _alternating_sum(terms: Sequence[float]) -> float:
    """Accelerated value of sum_k (-1)^k terms[k] (Chebyshev acceleration).

    Error is about (3+sqrt 8)^(-len(terms)), so ~30 terms deliver full
    double precision for smooth positive term sequences.
    """

    n = len(terms)
    d = (3.0 + math.sqrt(8.0)) ** n
    d = (d + 1.0 / d) / 2.0
    b, c, s = -1.0, -d, 0.0
    for k in range(n):
        c = b - c
        s += c * terms[k]
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0))
    return s / d


@lru_cache(maxsize=None)
def zeta_value(s: int) -> float:
    """zeta(s) at integer s != 1 (trivial zeros and Bernoulli values included)."""

    if s == 1:
        raise DegenerateArgument("zeta has a pole at 1")
    if s >= 2:
        eta = _alternating_sum([1.0 / (k + 1) ** s for k in range(32)])
        return eta / (1.0 - 2.0 ** (1 - s))
    if s == 0:
        return -0.5
    m = -s
    if m % 2 == 0:
        return 0.0
    return float(-bernoulli_numbers(m + 2)[m + 1] / (m + 1))


# --------------------------------------------------------------------------
# polylogarithms on the principal branch


def _li_series(n: int, z: complex) -> tuple[complex, float]:
    """Direct power series; caller guarantees |z| <= 0.75 or so."""

    acc = 0.0 + 0.0j
    zk = 1.0 + 0.0j
    r = abs(z)
    for k in range(1, 600):
        zk *= z
        term = zk / k**n
        acc += term
        if abs(term) <= 1e-17 * (1.0 + abs(acc)) and k > 4:
            tail = abs(term) * r / max(1e-300, 1.0 - r)
            return acc, tail + 1e-15 * abs(acc)
    raise PathError("series region called with |z| too close to 1")


def _li_log_series(n: int, mu: complex) -> tuple[complex, float]:
    """Li_n(e^mu) for |mu| < 2*pi via the integer-argument zeta expansion."""

    if mu == 0:
        return complex(zeta_value(n)), 1e-15
    harmonic = sum(1.0 / j for j in range(1, n))
    acc = (mu ** (n - 1) / math.factorial(n - 1)) * (harmonic - cmath.log(-mu))
    muk = 1.0 + 0.0j
    kfac = 1.0
    largest = abs(acc)
    small_run = 0
    for k in range(0, 120):
        if k > 0:
            muk *= mu
            kfac *= k
        if k == n - 1:
            continue
        term = zeta_value(n - k) * muk / kfac
        acc += term
        largest = max(largest, abs(term))
        # zeta's trivial zeros blank every other term, so a single tiny
        # term proves nothing; demand a run of them before stopping
        if abs(term) < 1e-18 * (1.0 + abs(acc)):
            small_run += 1
            if small_run >= 3 and k > 2 * n + 6:
                break
        else:
            small_run = 0
    ratio = abs(mu) / _TWO_PI
    tail = 3.0 * ratio ** 120 / max(1e-300, 1.0 - ratio)
    return acc, tail + 1e-15 * largest


def _li_principal(n: int, z: complex) -> tuple[complex, float]:
    """Region dispatch; z must not be on the open cut (1, oo) exactly."""

    if z == 0:
        return 0.0 + 0.0j, 0.0
    if n == 1:
        val = -cmath.log(1.0 - z)
        return val, 1e-15 * (1.0 + abs(val))
    r = abs(z)
    if r <= 0.5:
        return _li_series(n, z)
    if r < 2.0:
        return _li_log_series(n, cmath.log(z))
    # Li_n(z) + (-1)^n Li_n(1/z) = -(2 pi i)^n / n! * B_n(1/2 + log(-z)/(2 pi i))
    inv, inv_err = _li_series(n, 1.0 / z)
    w = 0.5 + cmath.log(-z) / (2j * math.pi)
    poly = -((2j * math.pi) ** n / math.factorial(n)) * bernoulli_poly(n, w)
    sign = -1.0 if n % 2 else 1.0
    val = poly - sign * inv
    return val, inv_err + 1e-14 * (1.0 + abs(poly))


def li_n(n: int, z: "ComplexVal | Number") -> ComplexVal:
    """Li_n(z) on the principal branch, cut along [1, oo).

    The boundary point z = 1 is allowed for n >= 2 (the series converges
    absolutely there); elsewhere on the cut the two one-sided limits
    differ and BranchAmbiguity is raised.
    """

    if n < 1:
        raise DegenerateArgument("polylogarithm weight must be a positive integer")
    zc = _as_complex(z)
    if zc.imag == 0.0 and zc.real >= 1.0:
        if zc.real == 1.0:
            if n == 1:
                raise DegenerateArgument("li_1 has a pole at z = 1")
            return ComplexVal(complex(zeta_value(n)), 1e-15 * zeta_value(n))
        raise BranchAmbiguity("z lies on the branch cut [1, oo)")
    val, err = _li_principal(n, zc)
    base = ComplexVal.of(z)
    return ComplexVal(val, err + base.err * _li_derivative_bound(n, zc))


def _li_derivative_bound(n: int, z: complex) -> float:
    """Crude |d Li_n / dz| bound used to propagate incoming error."""

    d = abs(1.0 - z)
    if d < 1e-12:
        return 1e12
    if n == 1:
        return 1.0 / d
    return abs(math.log(max(1e-12, abs(z)))) / max(1e-12, abs(z)) + 2.0 / d + 2.0


def svp(n: int, z: "ComplexVal | Number") -> float:
    """The single-valued real polylogarithm of weight n >= 2.

    R_n(sum_{k=0}^{n-1} B_k/k! log^k(z zbar) Li_{n-k}(z)) with R_n = Re
    for odd n, Im for even n.  Continuous on C with value 0 at z = 0
    excluded (the argument must be nonzero); on the cut the upper-edge
    branch is used, where the combination's one-sided limits agree.
    """

    if n < 2:
        raise DegenerateArgument("the single-valued polylogarithm needs n >= 2")
    zc = _as_complex(z)
    if zc == 0:
        raise DegenerateArgument("the single-valued polylogarithm is not defined at 0")
    if zc.imag == 0.0 and zc.real > 1.0:
        # evaluate the multivalued pieces on the upper edge of the cut;
        # single-valuedness makes the choice immaterial for the output
        zc = complex(zc.real, 1e-250)
    if zc == 1.0:
        # log(z zbar) = 0, so only the k = 0 term survives
        val = complex(zeta_value(n))
        return val.real if n % 2 else val.imag
    big_l = 2.0 * math.log(abs(zc))
    bs = bernoulli_numbers(n)
    acc = 0.0 + 0.0j
    for k in range(n):
        li_val, _ = _li_principal(n - k, zc)
        acc += float(bs[k]) / math.factorial(k) * big_l**k * li_val
    return acc.real if n % 2 else acc.imag


def bloch_wigner(z: "ComplexVal | Number") -> float:
    """D(z) = Im Li_2(z) + log|z| arg(1-z), the weight-2 single-valued map."""

    zc = _as_complex(z)
    if zc == 0:
        raise DegenerateArgument("D is not defined at 0")
    if zc.imag == 0.0:
        return 0.0
    li2, _ = _li_principal(2, zc)
    return li2.imag + math.log(abs(zc)) * cmath.phase(1.0 - zc)


# --------------------------------------------------------------------------
# iterated integrals along paths


@dataclass(frozen=True)
class Path:
    """An ordered polyline of complex waypoints from basepoint to endpoint."""

    points: tuple[complex, ...]

    @staticmethod
    def of(points: Iterable[complex]) -> "Path":
        pts = tuple(complex(p) for p in points)
        if len(pts) < 2:
            raise PathError("a path needs at least two waypoints")
        return Path(pts)

    @property
    def start(self) -> complex:
        return self.points[0]

    @property
    def end(self) -> complex:
        return self.points[-1]


def _point_to_complex(p: "PPoint | Number") -> complex:
    if isinstance(p, PPoint):
        if p.is_inf:
            raise DegenerateArgument("numeric evaluation cannot place a letter at infinity")
        expr = p.expr
        if not expr.is_constant():
            raise DegenerateArgument(
                "numeric evaluation needs constant points; specialize the term first"
            )
        return complex(expr.constant_value())
    return complex(p)


def _config_scale(pts: Sequence[complex]) -> float:
    mags = [abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1 :] if a != b]
    return max(mags) if mags else 1.0


def _seg_distance(p: complex, q: complex, s: complex) -> float:
    """Distance from s to the segment [p, q]."""

    d = q - p
    L2 = (d * d.conjugate()).real
    if L2 == 0.0:
        return abs(s - p)
    t = ((s - p) * d.conjugate()).real / L2
    t = min(1.0, max(0.0, t))
    return abs(p + t * d - s)


def _detoured(path: Sequence[complex], sings: Sequence[complex], scale: float) -> list[complex]:
    """Insert waypoints so every segment clears every singularity.

    The clearance radius around a singularity s is
    max(0.01 * scale, min-endpoint-distance / 10); path endpoints that
    coincide with a singularity are exempt (the series start / reversal
    machinery owns those neighbourhoods).
    """

    pts = list(path)
    for _ in range(8):
        changed = False
        out = [pts[0]]
        for p, q in zip(pts, pts[1:]):
            worst, s_bad, r_bad = 0.0, None, 0.0
            for s in sings:
                if s == pts[0] or s == pts[-1]:
                    continue
                r = max(0.01 * scale, min(abs(s - pts[0]), abs(s - pts[-1])) / 10.0)
                d = _seg_distance(p, q, s)
                if d < r and r - d > worst:
                    worst, s_bad, r_bad = r - d, s, r
            if s_bad is not None:
                d = q - p
                L = abs(d)
                u = d / L
                t = max(0.0, min(1.0, ((s_bad - p) * u.conjugate()).real / L))
                foot = p + t * L * u
                normal = foot - s_bad
                if abs(normal) < 1e-14 * scale:
                    normal = u * 1j
                normal /= abs(normal)
                out.append(s_bad + 1.25 * r_bad * normal)
                changed = True
            out.append(q)
        pts = out
        if not changed:
            return pts
    raise PathError("could not route the path clear of the singularities")


def _series_start(letters: Sequence[complex], a0: complex, direction: complex, eps: float, order: int = 60) -> list[complex]:
    """Power-series values of all prefix integrals at a0 + eps*direction.

    Solves the prefix system exactly as truncated series in u = t - a0;
    the letter offsets c_k = a_k - a0 with c_k = 0 give the 1/u kernel,
    integrable term by term because every F_{k-1} with k >= 2 vanishes
    at the basepoint.
    """

    series: list[list[complex]] = [[1.0 + 0.0j] + [0.0j] * order]
    for k, a in enumerate(letters, start=1):
        c = a - a0
        prev = series[-1]
        if c == 0:
            if k == 1:
                raise DivergentTerm("first letter equals the basepoint")
            # integral of sum_{j>=1} prev[j] u^{j-1} is sum_{j>=1} prev[j] u^j / j
            cur = [0.0j] + [prev[j] / j for j in range(1, order + 1)]
            cur = cur[: order + 1]
        else:
            inv_pow = [(-1.0 / c) * (1.0 / c) ** m for m in range(order + 1)]
            conv = [0.0j] * (order + 1)
            for j, pj in enumerate(prev):
                if pj == 0:
                    continue
                for m in range(order + 1 - j):
                    conv[j + m] += pj * inv_pow[m]
            cur = [0.0j] * (order + 1)
            for j in range(order):
                cur[j + 1] = conv[j] / (j + 1)
        series.append(cur)
    u = eps * direction
    vals = []
    for coeffs in series:
        acc = 0.0j
        for coef in reversed(coeffs):
            acc = acc * u + coef
        vals.append(acc)
    return vals


def _ode_run(letters: Sequence[complex], y0: Sequence[complex], path_pts: Sequence[complex], s0_frac: float, rtol: float) -> tuple[list[complex], float]:
    """Drive the prefix system along the polyline; returns values and an error estimate."""

    n = len(letters)
    y = np.empty(2 * (n + 1))
    for k, v in enumerate(y0):
        y[2 * k] = v.real
        y[2 * k + 1] = v.imag
    err = 0.0
    first = True
    for p, q in zip(path_pts, path_pts[1:]):
        dq = q - p

        def rhs(s: float, yv: np.ndarray) -> np.ndarray:
            t = p + s * dq
            out = np.zeros_like(yv)
            fk = complex(yv[0], yv[1])
            for k in range(1, n + 1):
                d = dq * fk / (t - letters[k - 1])
                out[2 * k] = d.real
                out[2 * k + 1] = d.imag
                fk = complex(yv[2 * k], yv[2 * k + 1])
            return out

        start = s0_frac if first else 0.0
        first = False
        if start >= 1.0:
            continue
        sol = solve_ivp(rhs, (start, 1.0), y, method="DOP853", rtol=rtol, atol=1e-14)
        if not sol.success:
            raise PathError(f"integrator failed on a path segment: {sol.message}")
        y = sol.y[:, -1]
        err += rtol * float(np.max(np.abs(y))) * 10.0 + 1e-13
    return [complex(y[2 * k], y[2 * k + 1]) for k in range(n + 1)], err


def _eval_core(cpts: list[complex], path_pts: list[complex], rtol: float, depth: int) -> ComplexVal:
    """Evaluate I(cpts[0]; cpts[1:-1]; cpts[-1]) along an explicit polyline."""

    a0, a_end = cpts[0], cpts[-1]
    letters = cpts[1:-1]
    n = len(letters)
    if n == 0:
        return ComplexVal(1.0 + 0.0j, 0.0)
    if a0 == a_end:
        return ComplexVal(0.0 + 0.0j, 0.0)
    if letters[0] == a0 or letters[-1] == a_end:
        raise DivergentTerm("endpoint letter coincides with an endpoint")
    scale = _config_scale(cpts)
    start_singular = any(a == a0 for a in letters)
    end_singular = any(a == a_end for a in letters)
    if end_singular and not start_singular:
        rev = [a_end, *reversed(letters), a0]
        flipped = _eval_core(rev, list(reversed(path_pts)), rtol, depth)
        sign = -1.0 if n % 2 else 1.0
        return ComplexVal(sign * flipped.val, flipped.err)
    if end_singular and start_singular:
        if depth > 0:
            raise PathError("midpoint splitting recursed; the configuration is too degenerate")
        mid_idx, mid = _half_length_point(path_pts)
        if any(abs(mid - a) < 1e-6 * scale for a in letters):
            seg = path_pts[mid_idx + 1] - path_pts[mid_idx]
            mid = mid + 0.1 * scale * 1j * seg / abs(seg)
        left_path = path_pts[: mid_idx + 1] + [mid]
        right_path = [mid] + path_pts[mid_idx + 1 :]
        total = ComplexVal(0.0j, 0.0)
        for k in range(n + 1):
            left = _eval_core([a0, *letters[:k], mid], list(left_path), rtol, depth + 1)
            right = _eval_core([mid, *letters[k:], a_end], list(right_path), rtol, depth + 1)
            total = total + left * right
        return total
    path_pts = _detoured(path_pts, letters, scale)
    if start_singular:
        nonzero = [abs(a - a0) for a in letters if a != a0]
        seg_len = abs(path_pts[1] - path_pts[0])
        eps = 0.5 * min(nonzero)
        eps = min(eps, 0.9 * seg_len)
        direction = (path_pts[1] - path_pts[0]) / seg_len
        y0 = _series_start(letters, a0, direction, eps)
        taylor_err = 2.0 ** -58.0 * max(abs(v) for v in y0)
        vals, ode_err = _ode_run(letters, y0, path_pts, eps / seg_len, rtol)
        return ComplexVal(vals[-1], taylor_err + ode_err)
    y0 = [1.0 + 0.0j] + [0.0j] * n
    vals, ode_err = _ode_run(letters, y0, path_pts, 0.0, rtol)
    return ComplexVal(vals[-1], ode_err)


def _half_length_point(path_pts: Sequence[complex]) -> tuple[int, complex]:
    lengths = [abs(q - p) for p, q in zip(path_pts, path_pts[1:])]
    total = sum(lengths)
    target = total / 2.0
    acc = 0.0
    for i, L in enumerate(lengths):
        if acc + L >= target:
            frac = (target - acc) / L if L else 0.0
            return i, path_pts[i] + frac * (path_pts[i + 1] - path_pts[i])
        acc += L
    return len(path_pts) - 2, path_pts[-1]


def iterated_integral_num(term: ITerm, path: "Path | Sequence[complex] | None" = None, rtol: float = 1e-12) -> ComplexVal:
    """Numerically evaluate an iterated integral term with constant points.

    ``path`` is an optional polyline from the basepoint to the endpoint;
    by default the straight segment, automatically detoured around any
    interior singularity.  Accuracy is governed by ``rtol`` plus the
    series start; the returned error estimate is conservative.
    """

    cpts = [_point_to_complex(p) for p in term.points]
    if term.weight >= 1 and (cpts[0] == cpts[1] or cpts[-1] == cpts[-2]):
        raise DivergentTerm("divergent endpoints: a0 = a1 or an = a_end")
    if path is None:
        path_pts = [cpts[0], cpts[-1]]
    else:
        pts = path.points if isinstance(path, Path) else tuple(complex(p) for p in path)
        if len(pts) < 2 or pts[0] != cpts[0] or pts[-1] != cpts[-1]:
            raise PathError("path must run from the basepoint to the endpoint")
        scale = _config_scale(cpts)
        for w in pts[1:-1]:
            for s in cpts[1:-1]:
                if abs(w - s) < 1e-3 * scale:
                    raise PathError("a waypoint sits on top of a singularity")
        path_pts = list(pts)
    return _eval_core(cpts, list(path_pts), rtol, 0)


def _shuffle_words(w1: Sequence, w2: Sequence):
    n1, n2 = len(w1), len(w2)
    for positions in itertools.combinations(range(n1 + n2), n1):
        out, i1, i2 = [], 0, 0
        pos = set(positions)
        for slot in range(n1 + n2):
            if slot in pos:
                out.append(w1[i1])
                i1 += 1
            else:
                out.append(w2[i2])
                i2 += 1
        yield tuple(out)


def shuffle_check_num(w1: Sequence[Number], w2: Sequence[Number], a0: Number, a_end: Number, path: "Path | Sequence[complex] | None" = None) -> float:
    """|I(w1) I(w2) - sum I(shuffles)| on a common path; small iff encoded correctly.

    Letters are plain numbers here (there is no symbolic content to keep);
    every interleaving shares the same singularity set, so one path serves
    all the terms.
    """

    if path is None:
        path_pts = [complex(a0), complex(a_end)]
    else:
        path_pts = list(path.points if isinstance(path, Path) else (complex(p) for p in path))

    def value(word: Sequence[Number]) -> complex:
        cpts = [complex(a0), *[complex(a) for a in word], complex(a_end)]
        return _eval_core(cpts, list(path_pts), 1e-12, 0).val

    lhs = value(w1) * value(w2)
    rhs = sum(value(w) for w in _shuffle_words(tuple(w1), tuple(w2)))
    return abs(lhs - rhs)
