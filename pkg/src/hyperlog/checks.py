"""End-to-end verification procedures producing machine-readable reports.

Each verify target names an identity from the weight-4 calculus:

  theorem3      the six-point discrepancy I(a0;...;a5) - f(first five)
                + f(last five) under the weight-4 deciders
  fiveterm      the weight-2 five-term combination under the wedge
                cobracket (chain) and the shuffle projector (rho)
  b-element     the five-term pattern in the first slot of pair31; its
                (2,2)-wedge image is the assertable claim, so this target
                always runs the delta_{2,2} decider
  antisym31     pair31(t,u) + pair31(u,t) under both weight-4 deciders
  t0-tautology  the degenerate endpoint of the deformation
                C -> tC + (1-t)A, D -> tD + (1-t)A at t = 0: a best-effort
                check that degenerate terms pair-cancel and that the
                surviving combination dies under the deciders; residual
                degenerate terms are reported rather than assigned limits

A report's status is "pass" exactly when its residual term count is zero;
"error" marks checks that could not run to completion (degenerate input),
and such reports carry no residual count.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from . import __version__
from .errors import DegenerateArgument, DivergentTerm
from .identities import (
    antisym_pair,
    discrepancy,
    f_term_stream,
    five_term,
    five_term_pair,
    generic_term,
)
from .projective import PPoint, cross_ratio
from .symbols import (
    IComb,
    cobracket_chain,
    delta2,
    delta22,
    rho_project,
    symbol,
)

__all__ = [
    "SCHEMA",
    "VERIFY_TARGETS",
    "DECIDERS",
    "CheckReport",
    "run_verify",
    "draw_rational",
]

SCHEMA = "hyperlog.check-report/1"

VERIFY_TARGETS = ("theorem3", "fiveterm", "b-element", "antisym31", "t0-tautology")
DECIDERS = ("chain", "rho", "both")

_RETRY_BUDGET = 10


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one verification step.

    Invariants: status "pass" iff the residual term count is zero; an
    "error" report (the check could not complete) carries residual_terms
    None.  Reports are append-only value objects.
    """

    check: str
    status: str
    residual_terms: int | None
    residual_sample: tuple[str, ...]
    elapsed_ms: float
    seed: int | None
    version: str = __version__
    detail: str = ""

    def __post_init__(self) -> None:
        if self.status not in ("pass", "fail", "error"):
            raise ValueError(f"unknown status {self.status!r}")
        if (self.status == "error") != (self.residual_terms is None):
            raise ValueError("error reports, and only they, omit the residual count")
        if self.residual_terms is not None and (self.residual_terms == 0) != (
            self.status == "pass"
        ):
            raise ValueError("status pass iff residual term count is zero")
        if len(self.residual_sample) > 10:
            raise ValueError("residual sample holds at most 10 terms")

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "check": self.check,
            "status": self.status,
            "residual_terms": self.residual_terms,
            "residual_sample": list(self.residual_sample),
            "elapsed_ms": round(self.elapsed_ms, 3),
            "seed": self.seed,
            "version": self.version,
            "detail": self.detail,
        }


def _finish(
    check: str,
    element,
    started: float,
    seed: int | None,
    detail: str = "",
) -> CheckReport:
    terms = element.residual_terms()
    sample = tuple(f"{c} * {s}" for c, s in terms[:10])
    return CheckReport(
        check=check,
        status="pass" if not terms else "fail",
        residual_terms=len(terms),
        residual_sample=sample,
        elapsed_ms=(time.perf_counter() - started) * 1000.0,
        seed=seed,
        detail=detail,
    )


def _error(
    check: str, exc: Exception, started: float, seed: int | None
) -> CheckReport:
    return CheckReport(
        check=check,
        status="error",
        residual_terms=None,
        residual_sample=(),
        elapsed_ms=(time.perf_counter() - started) * 1000.0,
        seed=seed,
        detail=f"{type(exc).__name__}: {exc}",
    )


# ---------------------------------------------------------------------------
# Randomized specialization
# ---------------------------------------------------------------------------

def draw_rational(rng: random.Random) -> Fraction:
    """A random rational with numerator and denominator in [-97, 97]."""
    den = 0
    while den == 0:
        den = rng.randint(-97, 97)
    return Fraction(rng.randint(-97, 97), den)


def _draw_assignment(
    rng: random.Random, names: Sequence[str], forbidden: frozenset[Fraction]
) -> dict[str, Fraction]:
    """Pairwise distinct random rationals avoiding the forbidden values."""
    values: list[Fraction] = []
    for _ in names:
        v = draw_rational(rng)
        while v in forbidden or v in values:
            v = draw_rational(rng)
        values.append(v)
    return dict(zip(names, values))


# ---------------------------------------------------------------------------
# Target definitions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Target:
    name: str
    variables: tuple[str, ...]
    # values the random sampler must avoid to keep arguments off {0, 1}
    forbidden: frozenset[Fraction]
    build: Callable[[Sequence[PPoint]], IComb]
    # decider name -> element factory
    deciders: Mapping[str, Callable[[IComb], object]]


def _chain_decider(comb: IComb):
    return cobracket_chain(comb)


def _rho_decider(comb: IComb):
    return rho_project(symbol(comb))


_TARGETS: dict[str, _Target] = {
    "theorem3": _Target(
        name="theorem3",
        variables=("A", "B", "C", "D", "E", "F"),
        forbidden=frozenset(),
        build=lambda pts: discrepancy(pts),
        deciders={"chain": _chain_decider, "rho": _rho_decider},
    ),
    "fiveterm": _Target(
        name="fiveterm",
        variables=("x", "y"),
        forbidden=frozenset((Fraction(0), Fraction(1))),
        build=lambda pts: five_term(*pts),
        deciders={"chain": lambda comb: delta2(comb), "rho": _rho_decider},
    ),
    "b-element": _Target(
        name="b-element",
        variables=("x", "y", "z"),
        forbidden=frozenset((Fraction(0), Fraction(1))),
        build=lambda pts: five_term_pair(*pts),
        # The identity asserted lives at the (2,2)-wedge level; both decider
        # flags run the same delta_{2,2} projection.
        deciders={"delta22": lambda comb: delta22(comb)},
    ),
    "antisym31": _Target(
        name="antisym31",
        variables=("t", "u"),
        forbidden=frozenset((Fraction(0), Fraction(1))),
        build=lambda pts: antisym_pair(*pts),
        deciders={"chain": _chain_decider, "rho": _rho_decider},
    ),
}


def _selected_deciders(target: _Target, decider: str) -> list[str]:
    if decider not in DECIDERS:
        raise ValueError(f"unknown decider {decider!r}; expected one of {DECIDERS}")
    names = list(target.deciders)
    if len(names) == 1:
        return names
    if decider == "both":
        return names
    return [decider]


def _points_for(
    variables: Sequence[str], assignment: Mapping[str, Fraction] | None
) -> list[PPoint]:
    if assignment is None:
        return [PPoint.var(v) for v in variables]
    unknown = set(assignment) - set(variables)
    if unknown:
        raise ValueError(
            f"unknown variable(s) {sorted(unknown)}; this target has {list(variables)}"
        )
    return [
        PPoint.const(assignment[v]) if v in assignment else PPoint.var(v)
        for v in variables
    ]


def _render_assignment(assignment: Mapping[str, Fraction]) -> str:
    return ", ".join(f"{k}={assignment[k]}" for k in assignment)


# ---------------------------------------------------------------------------
# The t = 0 deformation check
# ---------------------------------------------------------------------------

def _point_sig(p: PPoint):
    return ("inf",) if p.is_inf else ("fin", p.key())


def _klein_min(sig_quad):
    i, j, k, l = sig_quad
    return min([(i, j, k, l), (j, i, l, k), (k, l, i, j), (l, k, j, i)])


def _render_point(p: PPoint) -> str:
    return repr(p)


def _cr_class(four: Sequence[PPoint]):
    """(signature, value) of a cross-ratio: value None when identically 0/0."""
    try:
        val = cross_ratio(*four)
        return ("val", _point_sig(val), _render_point(val)), val
    except DegenerateArgument:
        sig = _klein_min(tuple(_point_sig(p) for p in four))
        label = "cr(0/0: " + ", ".join(_render_point(p) for p in four) + ")"
        return ("zz", sig, label), None


def _ratio_class(quad: Sequence[PPoint]):
    """(signature, value) of a difference ratio (p0-p1)/(p2-p3)."""
    rendered = ", ".join(_render_point(p) for p in quad)
    if any(p.is_inf for p in quad):
        return ("inf", tuple(_point_sig(p) for p in quad), f"ratio(inf: {rendered})"), None
    num = quad[0].expr - quad[1].expr
    den = quad[2].expr - quad[3].expr
    if num.is_zero() and den.is_zero():
        sig = min(
            (_point_sig(quad[0]), _point_sig(quad[1])),
            (_point_sig(quad[2]), _point_sig(quad[3])),
        )
        return ("zz", sig, f"ratio(0/0: {rendered})"), None
    if den.is_zero():
        return ("val", ("inf",), "inf"), None
    val = PPoint.const(0) if num.is_zero() else PPoint.finite(num / den)
    return ("val", _point_sig(val), _render_point(val)), val


def _t0_reports(
    decider: str,
    assignment: Mapping[str, Fraction] | None,
    seed: int | None,
    suffix: str,
) -> list[CheckReport]:
    """Substitute C -> A, D -> A into the six-point discrepancy and report.

    Degenerate pieces are grouped by the structural class of their failing
    argument (exact value when the argument is well-defined but screened,
    the Klein-reduced point quadruple when it is identically 0/0); classes
    whose coefficients do not sum to zero are the pairing residual.  The
    well-defined remainder then runs through the selected deciders.
    """
    started = time.perf_counter()
    reports: list[CheckReport] = []
    free = _points_for(("A", "B", "E", "F"), assignment)
    a, b, e, f = free
    pts0 = (a, b, a, a, e, f)
    detail = _render_assignment(assignment) if assignment else "symbolic A, B, E, F"

    try:
        survivors = generic_term(pts0)
        degenerate: dict[tuple, Fraction] = {}
        labels: dict[tuple, str] = {}
        raw_count = 0
        for fsign, five in ((-1, pts0[:5]), (1, pts0[1:])):
            for descriptor, coeff, build in f_term_stream(five):
                coeff = coeff * fsign
                if descriptor[0] == "bracket":
                    (sx, vx), (sz, vz) = _cr_class(descriptor[1]), _cr_class(descriptor[2])
                    if vx is not None and vz is not None:
                        try:
                            survivors = survivors + build().scale(coeff)
                            continue
                        except DegenerateArgument:
                            pass
                    sig = ("bracket", sx[:2], sz[:2])
                    labels[sig] = f"bracket(x={sx[2]}, z={sz[2]})"
                else:
                    sq, vq = _ratio_class(descriptor[1])
                    if vq is not None:
                        try:
                            survivors = survivors + build().scale(coeff)
                            continue
                        except DegenerateArgument:
                            pass
                    sig = ("quad", sq[:2])
                    labels[sig] = f"[{sq[2]}]_4"
                degenerate[sig] = degenerate.get(sig, Fraction(0)) + coeff
                raw_count += 1
        residual = {s: c for s, c in degenerate.items() if c}
        sample = tuple(
            f"{residual[s]} * {labels[s]}"
            for s in sorted(residual, key=lambda s: labels[s])[:10]
        )
        reports.append(
            CheckReport(
                check=f"t0-tautology.pairing{suffix}",
                status="pass" if not residual else "fail",
                residual_terms=len(residual),
                residual_sample=sample,
                elapsed_ms=(time.perf_counter() - started) * 1000.0,
                seed=seed,
                detail=(
                    f"{detail}; {raw_count} degenerate pieces in "
                    f"{len(degenerate)} classes"
                ),
            )
        )
    except (DegenerateArgument, DivergentTerm) as exc:
        return [_error(f"t0-tautology.pairing{suffix}", exc, started, seed)]

    for name in (("chain", "rho") if decider == "both" else (decider,)):
        tick = time.perf_counter()
        check = f"t0-tautology.survivors.{name}{suffix}"
        try:
            element = (_chain_decider if name == "chain" else _rho_decider)(survivors)
            reports.append(_finish(check, element, tick, seed, detail=detail))
        except (DegenerateArgument, DivergentTerm) as exc:
            reports.append(_error(check, exc, tick, seed))
    return reports


# ---------------------------------------------------------------------------
# The runner
# ---------------------------------------------------------------------------

def run_verify(
    target: str,
    *,
    decider: str = "both",
    specialize: str | Mapping[str, Fraction] | None = None,
    trials: int = 20,
    seed: int | None = None,
) -> list[CheckReport]:
    """Run one verify target; returns its report stream in declaration order.

    specialize: None for the symbolic check, "random" for seeded random
    rational specializations (`trials` of them), or a variable -> rational
    mapping for one explicit specialization.  Unknown targets, deciders, or
    variables raise ValueError (usage errors); degenerate specializations
    become reports with status "error".
    """
    if target not in VERIFY_TARGETS:
        raise ValueError(f"unknown target {target!r}; expected one of {VERIFY_TARGETS}")
    if decider not in DECIDERS:
        raise ValueError(f"unknown decider {decider!r}; expected one of {DECIDERS}")
    if isinstance(specialize, str) and specialize != "random":
        raise ValueError("specialize must be None, 'random', or an assignment mapping")

    if target == "t0-tautology":
        return _run_t0(decider, specialize, trials, seed)

    spec = _TARGETS[target]
    decider_names = _selected_deciders(spec, decider)
    reports: list[CheckReport] = []

    if specialize is None or isinstance(specialize, Mapping):
        assignment = dict(specialize) if isinstance(specialize, Mapping) else None
        mode = "symbolic" if assignment is None else f"[{_render_assignment(assignment)}]"
        detail = "" if assignment is None else _render_assignment(assignment)
        started = time.perf_counter()
        try:
            comb = spec.build(_points_for(spec.variables, assignment))
        except (DegenerateArgument, DivergentTerm) as exc:
            return [
                _error(f"{spec.name}.{name}.{mode}", exc, started, seed)
                for name in decider_names
            ]
        for name in decider_names:
            tick = time.perf_counter()
            check = f"{spec.name}.{name}.{mode}"
            try:
                element = spec.deciders[name](comb)
                reports.append(_finish(check, element, tick, seed, detail=detail))
            except (DegenerateArgument, DivergentTerm) as exc:
                reports.append(_error(check, exc, tick, seed))
        return reports

    # specialize == "random"
    rng = random.Random(seed)
    for trial in range(1, trials + 1):
        comb = None
        assignment: dict[str, Fraction] = {}
        failure: Exception | None = None
        for _ in range(_RETRY_BUDGET):
            assignment = _draw_assignment(rng, spec.variables, spec.forbidden)
            try:
                comb = spec.build(_points_for(spec.variables, assignment))
                break
            except (DegenerateArgument, DivergentTerm) as exc:
                failure = exc
                comb = None
        detail = _render_assignment(assignment)
        for name in decider_names:
            tick = time.perf_counter()
            check = f"{spec.name}.{name}.trial-{trial:02d}"
            if comb is None:
                reports.append(
                    _error(
                        check,
                        failure
                        or DegenerateArgument("no admissible specialization found"),
                        tick,
                        seed,
                    )
                )
                continue
            try:
                element = spec.deciders[name](comb)
                reports.append(_finish(check, element, tick, seed, detail=detail))
            except (DegenerateArgument, DivergentTerm) as exc:
                reports.append(_error(check, exc, tick, seed))
    return reports


def _run_t0(
    decider: str,
    specialize: str | Mapping[str, Fraction] | None,
    trials: int,
    seed: int | None,
) -> list[CheckReport]:
    if specialize is None:
        return _t0_reports(decider, None, seed, "")
    if isinstance(specialize, Mapping):
        return _t0_reports(decider, dict(specialize), seed, "")
    rng = random.Random(seed)
    reports: list[CheckReport] = []
    for trial in range(1, trials + 1):
        assignment = _draw_assignment(
            rng, ("A", "B", "E", "F"), frozenset((Fraction(0), Fraction(1)))
        )
        reports.extend(
            _t0_reports(decider, assignment, seed, f".trial-{trial:02d}")
        )
    return reports
