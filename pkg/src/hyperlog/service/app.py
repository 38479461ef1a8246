"""FastAPI application exposing the verification engine over HTTP.

Routes:

    GET  /health           liveness + version
    POST /verify           run one verify target, returns a report stream
    POST /symbol           symbol (optionally shuffle-projected) of a term
    POST /eval/li          polylogarithm value on the principal branch
    POST /eval/svp         single-valued real polylogarithm
    POST /eval/iint        numeric iterated path integral
    POST /eval/zeta-check  imaginary-quadratic zeta(2) reconstruction

Domain errors surface as HTTP 422 with an ``ErrorBody`` whose ``kind`` is
the stable exception-class name; usage errors (unknown targets, invalid
request shapes) surface as 400/422 with kind ``UsageError``.  The CLI maps
these kinds onto its exit-code contract.
"""

from __future__ import annotations

from collections.abc import Mapping
from fractions import Fraction

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__
from ..checks import CheckReport, run_verify
from ..errors import HyperlogError
from ..grammar import (
    parse_assignments,
    parse_complex,
    parse_iterm,
    parse_numeric_iterm,
    parse_witness,
)
from ..numeric import Path, iterated_integral_num, li_n, svp
from ..symbols import rho_project, symbol
from ..zeta import zagier_check_n2
from .models import (
    EXIT_DEGENERATE,
    EXIT_FAIL,
    EXIT_PASS,
    HealthResponse,
    IintRequest,
    LiRequest,
    NumericResponse,
    ReportModel,
    SvpRequest,
    SymbolRequest,
    SymbolResponse,
    SymbolTerm,
    VerifyRequest,
    VerifyResponse,
    ZetaCheckRequest,
    ZetaCheckResponse,
)

__all__ = ["create_app"]


def _specialize_argument(text: str | None) -> str | Mapping[str, Fraction] | None:
    if text is None or text == "random":
        return text
    return parse_assignments(text)


def _exit_code_for_reports(reports: list[CheckReport]) -> int:
    if any(r.status == "error" for r in reports):
        return EXIT_DEGENERATE
    if any(r.status == "fail" for r in reports):
        return EXIT_FAIL
    return EXIT_PASS


def create_app() -> FastAPI:
    app = FastAPI(title="hyperlog", version=__version__)

    @app.exception_handler(HyperlogError)
    async def _domain_error(request: Request, exc: HyperlogError) -> JSONResponse:
        return JSONResponse(
            status_code=422, content={"kind": exc.kind, "message": str(exc)}
        )

    @app.exception_handler(ValueError)
    async def _usage_error(request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"kind": "UsageError", "message": str(exc)}
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(
        request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        return JSONResponse(
            status_code=422, content={"kind": "UsageError", "message": str(exc)}
        )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest) -> VerifyResponse:
        reports = run_verify(
            req.target,
            decider=req.decider,
            specialize=_specialize_argument(req.specialize),
            trials=req.trials,
            seed=req.seed,
        )
        code = _exit_code_for_reports(reports)
        return VerifyResponse(
            ok=code == EXIT_PASS,
            exit_code=code,
            reports=[ReportModel.model_validate(r.to_json_dict()) for r in reports],
        )

    @app.post("/symbol", response_model=SymbolResponse)
    def symbol_of(req: SymbolRequest) -> SymbolResponse:
        term = parse_iterm(req.expr)
        tensor = symbol(term)
        if req.mod_shuffle:
            tensor = rho_project(tensor)
        terms = tensor.residual_terms()
        return SymbolResponse(
            weight=term.weight,
            term_count=len(terms),
            terms=[SymbolTerm(coeff=str(c), atoms=s) for c, s in terms],
        )

    @app.post("/eval/li", response_model=NumericResponse)
    def eval_li(req: LiRequest) -> NumericResponse:
        value = li_n(req.n, parse_complex(req.z))
        return NumericResponse(re=value.re, im=value.im, err=value.err)

    @app.post("/eval/svp", response_model=NumericResponse)
    def eval_svp(req: SvpRequest) -> NumericResponse:
        value = svp(req.n, parse_complex(req.z))
        return NumericResponse(re=value, im=0.0, err=None)

    @app.post("/eval/iint", response_model=NumericResponse)
    def eval_iint(req: IintRequest) -> NumericResponse:
        term = parse_numeric_iterm(req.expr)
        path = (
            Path.of([parse_complex(p) for p in req.path])
            if req.path is not None
            else None
        )
        value = iterated_integral_num(term, path, rtol=req.rtol)
        return NumericResponse(re=value.re, im=value.im, err=value.err)

    @app.post("/eval/zeta-check", response_model=ZetaCheckResponse)
    def eval_zeta_check(req: ZetaCheckRequest) -> ZetaCheckResponse:
        witness = parse_witness(req.y)
        report = zagier_check_n2(
            req.D, [witness], den_bound=req.den_bound, tol=req.tol
        )[0]
        return ZetaCheckResponse(
            ok=report.ok,
            exit_code=EXIT_PASS if report.ok else EXIT_FAIL,
            D=report.D,
            y_re=report.y.real,
            y_im=report.y.imag,
            zeta_f2=report.zeta_f2,
            dilog=report.dilog,
            q=report.q,
            rational=None if report.rational is None else str(report.rational),
            stable=report.stable,
            elapsed_ms=report.elapsed_ms,
        )

    return app
