"""Request/response models and the exit-code contract for the HTTP facade.

The exit-code mapping is the single source of truth shared by the service
(which embeds a suggested code in verdict-bearing responses) and the CLI
(which turns error bodies into process exit codes):

    0  every check passed
    1  at least one check failed (a nonzero residual)
    2  usage or parse error (bad flags, malformed expressions, bad
       discriminants)
    3  degeneracy or divergence (forbidden argument values, divergent
       integral terms, branch-cut evaluation, bad integration paths)
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_DEGENERATE = 3

# error kinds that signal a caller mistake (malformed input)
USAGE_KINDS = frozenset({"ExprParseError", "InvalidDiscriminant", "UsageError"})
# error kinds raised by well-formed input hitting a mathematical degeneracy
DEGENERACY_KINDS = frozenset(
    {
        "DegenerateArgument",
        "DivergentTerm",
        "BranchAmbiguity",
        "PathError",
        "DegenerateWitness",
    }
)


def exit_code_for_kind(kind: str) -> int:
    if kind in USAGE_KINDS:
        return EXIT_USAGE
    if kind in DEGENERACY_KINDS:
        return EXIT_DEGENERATE
    return EXIT_FAIL


class ErrorBody(BaseModel):
    """Uniform error payload: a stable kind plus a human message."""

    kind: str
    message: str


class HealthResponse(BaseModel):
    status: str
    version: str


class VerifyRequest(BaseModel):
    target: str
    decider: str = "both"
    # None for the symbolic run, "random" for seeded random specializations,
    # or assignment text such as "x=1/2, y=-3" in the exact grammar
    specialize: str | None = None
    trials: int = Field(20, ge=1, le=10_000)
    seed: int | None = None


class ReportModel(BaseModel):
    """JSON form of one CheckReport (schema field names the report format)."""

    model_config = ConfigDict(populate_by_name=True)

    schema_version: str = Field(alias="schema")
    check: str
    status: str
    residual_terms: int | None
    residual_sample: list[str]
    elapsed_ms: float
    seed: int | None
    version: str
    detail: str


class VerifyResponse(BaseModel):
    ok: bool
    exit_code: int
    reports: list[ReportModel]


class SymbolRequest(BaseModel):
    expr: str
    mod_shuffle: bool = False


class SymbolTerm(BaseModel):
    coeff: str
    atoms: str


class SymbolResponse(BaseModel):
    weight: int
    term_count: int
    terms: list[SymbolTerm]


class LiRequest(BaseModel):
    n: int = Field(ge=1)
    z: str


class SvpRequest(BaseModel):
    n: int = Field(ge=2)
    z: str


class IintRequest(BaseModel):
    expr: str
    # optional polyline of complex waypoints from basepoint to endpoint
    path: list[str] | None = None
    rtol: float = Field(1e-12, gt=0.0)


class NumericResponse(BaseModel):
    re: float
    im: float
    # absolute-error estimate when the evaluator provides one
    err: float | None


class ZetaCheckRequest(BaseModel):
    D: int
    # witness field element: a complex scalar ("i") or a rational triple
    # "a,b,c" meaning (a + b*sqrt(D)) / c
    y: str
    den_bound: int = Field(10_000, ge=1)
    tol: float = Field(1e-8, gt=0.0)


class ZetaCheckResponse(BaseModel):
    ok: bool
    exit_code: int
    D: int
    y_re: float
    y_im: float
    zeta_f2: float
    dilog: float
    q: float
    rational: str | None
    stable: bool
    elapsed_ms: float
