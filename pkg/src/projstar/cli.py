"""Command-line front end: a thin client over the computation service.

Every subcommand builds the same request model the HTTP API accepts and
dispatches it in-process by default, or to a running server with --server.
Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 excluded weight.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .ring import ParseError
from .geometry import ExcludedWeightError, NonSymmetricRicciError
from .service import handlers
from .service.models import (
    ConnectionSpec,
    GaugeRequest,
    LBetaRequest,
    LiftRequest,
    QuantizeRequest,
    RCRequest,
    StarInfRequest,
    StarRequest,
    TensorArg,
    VerifyRequest,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_EXCLUDED = 3


def load_connection(path: Optional[str]) -> Optional[ConnectionSpec]:
    if path is None:
        return None
    with open(path) as fh:
        payload = json.load(fh)
    return ConnectionSpec(**payload)


def _mu_text(args) -> str:
    if getattr(args, "formal_mu", False):
        return "formal"
    return getattr(args, "mu", None) or "formal"


def _emit(payload, as_json: bool, pretty_field: Optional[str] = None) -> None:
    data = payload.model_dump()
    if as_json:
        print(json.dumps(data, sort_keys=True, indent=2))
        return
    if pretty_field and data.get(pretty_field):
        print(data[pretty_field])
        return
    for key, value in data.items():
        if isinstance(value, dict):
            print("%s:" % key)
            for k in value:
                print("  %s: %s" % (k, value[k]))
        else:
            print("%s: %s" % (key, value))


def _post_remote(server: str, route: str, payload) -> dict:
    import httpx

    resp = httpx.post(server.rstrip("/") + route, json=payload.model_dump(), timeout=600.0)
    if resp.status_code >= 400:
        body = resp.json()
        code = body.get("code", "invalid-input")
        message = body.get("message", resp.text)
        if code == "excluded-weight":
            raise ExcludedWeightError(message)
        raise ParseError(message)
    return resp.json()


def _dispatch(args, route: str, payload, handler, as_json: bool, pretty_field=None) -> int:
    if args.server:
        data = _post_remote(args.server, route, payload)
        if as_json:
            print(json.dumps(data, sort_keys=True, indent=2))
        elif pretty_field and data.get(pretty_field):
            print(data[pretty_field])
        else:
            print(json.dumps(data, sort_keys=True, indent=2))
        return EXIT_OK
    result = handler(payload)
    _emit(result, as_json, pretty_field)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="projstar",
        description="Exact calculator for projectively invariant operators and star products",
    )
    parser.add_argument("--server", default=None, help="dispatch to a running service URL")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, mu=False):
        p.add_argument("--n", type=int, default=2)
        p.add_argument("--connection", default=None, help="connection spec JSON file")
        p.add_argument("--json", action="store_true", dest="as_json")
        if mu:
            p.add_argument("--mu", default=None, help="rational density weight")
            p.add_argument("--formal-mu", action="store_true", help="keep mu formal")

    p = sub.add_parser("lift", help="invariant lift of a weighted symmetric tensor")
    p.add_argument("tensor")
    p.add_argument("--weight", default="0")
    common(p)

    p = sub.add_parser("lbeta", help="multilinear invariant operator")
    p.add_argument("--beta", type=int, required=True)
    p.add_argument(
        "--arg", action="append", required=True, metavar="WEIGHT:POLY", help="repeatable argument slot"
    )
    common(p)

    p = sub.add_parser("quantize", help="operator on densities with given principal symbol")
    p.add_argument("symbol")
    p.add_argument("--weight", default="0")
    common(p, mu=True)

    p = sub.add_parser("star", help="graded star product of weight-zero symbols")
    p.add_argument("a")
    p.add_argument("b")
    common(p, mu=True)

    p = sub.add_parser("star-inf", help="commutative limit product")
    p.add_argument("a")
    p.add_argument("b")
    common(p)

    p = sub.add_parser("gauge", help="symbol-level intertwiner between two structures")
    p.add_argument("symbol")
    p.add_argument("--weight", default="0")
    p.add_argument("--connection2", default=None, help="second connection spec JSON file")
    common(p)

    p = sub.add_parser("rc", help="one-dimensional brackets and multiplications")
    p.add_argument("op", choices=["bracket", "multilinear", "cmz-mu", "cmz-inf", "star1d"])
    p.add_argument("--u", action="append", required=True, help="polynomial in x1 (repeatable)")
    p.add_argument("--sigma", action="append", required=True, help="weight per function")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--ks", default=None, help="comma-separated valences for multilinear")
    p.add_argument("--mu", default="0")
    p.add_argument("--truncation", type=int, default=3)
    p.add_argument("--json", action="store_true", dest="as_json")

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("suite")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--maxdeg", type=int, default=2)
    p.add_argument("--cases", type=int, default=4)
    p.add_argument("--json", action="store_true", dest="as_json")

    p = sub.add_parser("suites", help="list verification suites")
    p.add_argument("--json", action="store_true", dest="as_json")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8710)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return run(args)
    except ExcludedWeightError as exc:
        print("excluded weight: %s" % exc, file=sys.stderr)
        return EXIT_EXCLUDED
    except (ParseError, NonSymmetricRicciError, FileNotFoundError, json.JSONDecodeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


def run(args) -> int:
    if args.command == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    if args.command == "suites":
        from .suites import all_suite_names

        names = all_suite_names()
        if args.as_json:
            print(json.dumps({"suites": names}, indent=2))
        else:
            print("\n".join(names))
        return EXIT_OK

    if args.command == "lift":
        payload = LiftRequest(
            n=args.n,
            tensor=args.tensor,
            weight=args.weight,
            connection=load_connection(args.connection),
        )
        return _dispatch(args, "/lift", payload, handlers.handle_lift, args.as_json)

    if args.command == "lbeta":
        tensor_args = []
        for spec in args.arg:
            if ":" not in spec:
                raise ParseError("argument %r must look like WEIGHT:POLY" % spec)
            weight, poly = spec.split(":", 1)
            tensor_args.append(TensorArg(poly=poly, weight=weight))
        payload = LBetaRequest(
            n=args.n, args=tensor_args, beta=args.beta, connection=load_connection(args.connection)
        )
        return _dispatch(args, "/lbeta", payload, handlers.handle_lbeta, args.as_json)

    if args.command == "quantize":
        payload = QuantizeRequest(
            n=args.n,
            symbol=args.symbol,
            weight=args.weight,
            mu=_mu_text(args),
            connection=load_connection(args.connection),
        )
        return _dispatch(args, "/quantize", payload, handlers.handle_quantize, args.as_json)

    if args.command == "star":
        payload = StarRequest(
            n=args.n, a=args.a, b=args.b, mu=_mu_text(args), connection=load_connection(args.connection)
        )
        return _dispatch(args, "/star", payload, handlers.handle_star, args.as_json, pretty_field="pretty")

    if args.command == "star-inf":
        payload = StarInfRequest(
            n=args.n, a=args.a, b=args.b, connection=load_connection(args.connection)
        )
        return _dispatch(
            args, "/star-inf", payload, handlers.handle_star_inf, args.as_json, pretty_field="pretty"
        )

    if args.command == "gauge":
        payload = GaugeRequest(
            n=args.n,
            symbol=args.symbol,
            weight=args.weight,
            connection1=load_connection(args.connection),
            connection2=load_connection(args.connection2),
        )
        return _dispatch(args, "/gauge", payload, handlers.handle_gauge, args.as_json)

    if args.command == "rc":
        if len(args.u) != len(args.sigma):
            raise ParseError("need one --sigma per --u")
        ks = [int(x) for x in args.ks.split(",")] if args.ks else None
        payload = RCRequest(
            op=args.op,
            us=args.u,
            sigmas=args.sigma,
            k=args.k,
            ks=ks,
            mu=args.mu,
            truncation=args.truncation,
        )
        if args.server:
            return _dispatch(args, "/rc", payload, handlers.handle_rc, args.as_json)
        result = handlers.handle_rc(payload)
        _emit(result, args.as_json)
        return EXIT_OK

    if args.command == "verify":
        payload = VerifyRequest(
            suite=args.suite, n=args.n, seed=args.seed, maxdeg=args.maxdeg, cases=args.cases
        )
        if args.server:
            data = _post_remote(args.server, "/verify", payload)
        else:
            try:
                data = handlers.handle_verify(payload).model_dump()
            except KeyError as exc:
                raise ParseError(str(exc)) from exc
        if args.as_json:
            print(json.dumps(data, sort_keys=True, indent=2))
        else:
            for check in data["checks"]:
                print("%-40s %s" % (check["name"], "pass" if check["ok"] else "FAIL"))
            print("suite %s: %s" % (data["suite"], "pass" if data["ok"] else "FAIL"))
        return EXIT_OK if data["ok"] else EXIT_VERIFY_FAILED

    raise ParseError("unknown command %r" % args.command)


if __name__ == "__main__":
    sys.exit(main())
