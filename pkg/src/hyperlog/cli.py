"""Command-line client for the verification service.

By default every command runs against an in-process instance of the HTTP
service (no network involved); ``--server URL`` points the same commands
at a remote instance started with ``hyperlog serve``.

Output contract: primary results go to standard output — JSON when
``--json`` is given (one object per check for ``verify``, a single object
elsewhere, keys sorted so reruns with the same flags and seed are
byte-identical apart from elapsed-time fields) — while human-oriented
progress and summaries go to standard error.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 usage or
parse error, 3 degeneracy or divergence.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from typing import Sequence

import httpx

from . import __version__
from .checks import DECIDERS, VERIFY_TARGETS
from .grammar import _split_top_level
from .service.models import (
    EXIT_FAIL,
    EXIT_PASS,
    EXIT_USAGE,
    exit_code_for_kind,
)

__all__ = ["main"]

_SEED_ENV = "HYPERLOG_SEED"


# ---------------------------------------------------------------------------
# Transport
# ---------------------------------------------------------------------------

def _request(server: str | None, method: str, path: str, body: dict | None) -> tuple[int, dict]:
    """One request against the chosen service instance; returns (status, json)."""

    async def go():
        if server is None:
            from .service import create_app

            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(
                transport=transport, base_url="http://hyperlog.internal", timeout=None
            ) as client:
                return await client.request(method, path, json=body)
        async with httpx.AsyncClient(base_url=server, timeout=None) as client:
            return await client.request(method, path, json=body)

    response = asyncio.run(go())
    try:
        data = response.json()
    except ValueError:
        data = {"kind": "InternalError", "message": response.text}
    return response.status_code, data


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _fail_from_error(status: int, data: dict) -> int:
    kind = data.get("kind", "InternalError")
    message = data.get("message", "")
    _log(f"error [{kind}]: {message}")
    return exit_code_for_kind(kind)


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_verify(args: argparse.Namespace) -> int:
    seed = args.seed
    if seed is None:
        env = os.environ.get(_SEED_ENV)
        if env is not None:
            try:
                seed = int(env)
            except ValueError:
                _log(f"error [UsageError]: {_SEED_ENV}={env!r} is not an integer")
                return EXIT_USAGE
    body = {
        "target": args.target,
        "decider": args.decider,
        "specialize": args.specialize,
        "trials": args.trials,
        "seed": seed,
    }
    status, data = _request(args.server, "POST", "/verify", body)
    if status != 200:
        return _fail_from_error(status, data)
    counts = {"pass": 0, "fail": 0, "error": 0}
    for report in data["reports"]:
        counts[report["status"]] += 1
        if args.json:
            print(_dump(report))
        else:
            label = report["status"].upper()
            line = f"[{label}] {report['check']}"
            if report["residual_terms"] is not None:
                line += f"  residual={report['residual_terms']}"
            line += f"  ({report['elapsed_ms']:.1f} ms)"
            if report["status"] == "error":
                line += f"  {report['detail']}"
            elif report["status"] == "fail" and report["residual_sample"]:
                line += f"\n        e.g. {report['residual_sample'][0]}"
            print(line)
    _log(
        f"{args.target}: {counts['pass']} passed, {counts['fail']} failed, "
        f"{counts['error']} errors"
    )
    return data["exit_code"]


def _cmd_symbol(args: argparse.Namespace) -> int:
    body = {"expr": args.expr, "mod_shuffle": args.mod_shuffle}
    status, data = _request(args.server, "POST", "/symbol", body)
    if status != 200:
        return _fail_from_error(status, data)
    if args.json:
        print(_dump(data))
    elif not data["terms"]:
        print("0")
    else:
        for term in data["terms"]:
            atoms = term["atoms"]
            print(f"{term['coeff']} * ({atoms})" if atoms else term["coeff"])
    _log(f"weight {data['weight']}, {data['term_count']} term(s)")
    return EXIT_PASS


def _print_numeric(data: dict, as_json: bool) -> None:
    if as_json:
        print(_dump(data))
        return
    value = complex(data["re"], data["im"])
    rendered = repr(value.real) if value.imag == 0.0 else repr(value)
    if data["err"] is not None:
        rendered += f"  (err <= {data['err']:.3g})"
    print(rendered)


def _cmd_eval(args: argparse.Namespace) -> int:
    kind = args.kind
    if kind == "zeta-check":
        body = {
            "D": args.D,
            "y": args.y,
            "den_bound": args.den_bound,
            "tol": args.tol,
        }
        status, data = _request(args.server, "POST", "/eval/zeta-check", body)
        if status != 200:
            return _fail_from_error(status, data)
        if args.json:
            print(_dump(data))
        else:
            print(
                f"D={data['D']}  witness={complex(data['y_re'], data['y_im'])}\n"
                f"zeta_F(2) = {data['zeta_f2']!r}\n"
                f"dilog     = {data['dilog']!r}\n"
                f"ratio     = {data['q']!r}\n"
                f"rational  = {data['rational']}  (stable: {data['stable']})"
            )
        _log("zeta-check: " + ("pass" if data["ok"] else "fail"))
        return data["exit_code"]

    if kind == "iint":
        body = {"expr": args.expr, "rtol": args.rtol}
        if args.path is not None:
            body["path"] = [p for p in _split_top_level(args.path, ",")]
        status, data = _request(args.server, "POST", "/eval/iint", body)
    else:  # li | svp
        body = {"n": args.n, "z": args.z}
        status, data = _request(args.server, "POST", f"/eval/{kind}", body)
    if status != 200:
        return _fail_from_error(status, data)
    _print_numeric(data, args.json)
    return EXIT_PASS


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return EXIT_PASS


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--server",
        default=None,
        metavar="URL",
        help="base URL of a running service (default: in-process)",
    )
    parser.add_argument(
        "--json", action="store_true", help="emit JSON on standard output"
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperlog",
        description="Exact hyperlogarithm identity verification and evaluation.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run one verification target")
    p_verify.add_argument("target", choices=VERIFY_TARGETS)
    p_verify.add_argument("--decider", choices=DECIDERS, default="both")
    p_verify.add_argument(
        "--specialize",
        default=None,
        metavar="ASSIGN|random",
        help="'random' or assignments such as \"x=1/2, y=-3\"",
    )
    p_verify.add_argument("--trials", type=int, default=20)
    p_verify.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"RNG seed (default: ${_SEED_ENV} if set)",
    )
    _add_common(p_verify)
    p_verify.set_defaults(handler=_cmd_verify)

    p_symbol = sub.add_parser("symbol", help="print the symbol of a term")
    p_symbol.add_argument("expr", help="integral term, e.g. \"I(0; 1/x, 0; 1)\"")
    p_symbol.add_argument(
        "--mod-shuffle",
        action="store_true",
        help="project modulo shuffle products first",
    )
    _add_common(p_symbol)
    p_symbol.set_defaults(handler=_cmd_symbol)

    p_eval = sub.add_parser("eval", help="numeric evaluation")
    eval_sub = p_eval.add_subparsers(dest="kind", required=True)

    p_li = eval_sub.add_parser("li", help="polylogarithm on the principal branch")
    p_li.add_argument("-n", type=int, required=True, help="weight (>= 1)")
    p_li.add_argument("-z", required=True, help="argument, e.g. 1/2 or 0.3+0.4i")
    _add_common(p_li)
    p_li.set_defaults(handler=_cmd_eval)

    p_svp = eval_sub.add_parser("svp", help="single-valued real polylogarithm")
    p_svp.add_argument("-n", type=int, required=True, help="weight (>= 2)")
    p_svp.add_argument("-z", required=True, help="argument")
    _add_common(p_svp)
    p_svp.set_defaults(handler=_cmd_eval)

    p_iint = eval_sub.add_parser("iint", help="numeric iterated path integral")
    p_iint.add_argument(
        "-e", "--expr", required=True, help="term with numeric points"
    )
    p_iint.add_argument(
        "--path",
        default=None,
        help="comma-separated waypoints from basepoint to endpoint",
    )
    p_iint.add_argument("--rtol", type=float, default=1e-12)
    _add_common(p_iint)
    p_iint.set_defaults(handler=_cmd_eval)

    p_zeta = eval_sub.add_parser(
        "zeta-check", help="imaginary-quadratic zeta(2) reconstruction"
    )
    p_zeta.add_argument("-D", type=int, required=True, help="fundamental discriminant (< 0)")
    p_zeta.add_argument(
        "-y",
        required=True,
        help="witness: complex scalar like 'i', or rational triple a,b,c for (a+b*sqrt(D))/c",
    )
    p_zeta.add_argument("--den-bound", type=int, default=10_000)
    p_zeta.add_argument("--tol", type=float, default=1e-8)
    _add_common(p_zeta)
    p_zeta.set_defaults(handler=_cmd_eval)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8321)
    p_serve.set_defaults(handler=_cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except httpx.HTTPError as exc:
        _log(f"error [Transport]: {exc}")
        return EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
