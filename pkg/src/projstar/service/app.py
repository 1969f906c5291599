"""FastAPI application wrapping the symbolic engine."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..ring import ParseError
from ..geometry import ExcludedWeightError, NonSymmetricRicciError
from ..starprod import StarExtractionError
from . import handlers
from .models import (
    GaugeRequest,
    GaugeResponse,
    LBetaRequest,
    LiftRequest,
    LiftResponse,
    QuantizeRequest,
    QuantizeResponse,
    RCRequest,
    RCResponse,
    StarInfRequest,
    StarRequest,
    StarResponse,
    TensorResponse,
    VerifyRequest,
    VerifyResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="projstar",
        description="Exact projectively invariant operator and star product calculator",
        version="0.1.0",
    )

    @app.exception_handler(ParseError)
    async def _parse_error(_: Request, exc: ParseError):
        return JSONResponse(status_code=400, content={"code": "parse-error", "message": str(exc)})

    @app.exception_handler(ExcludedWeightError)
    async def _excluded(_: Request, exc: ExcludedWeightError):
        return JSONResponse(status_code=422, content={"code": "excluded-weight", "message": str(exc)})

    @app.exception_handler(NonSymmetricRicciError)
    async def _ricci(_: Request, exc: NonSymmetricRicciError):
        return JSONResponse(status_code=422, content={"code": "invalid-input", "message": str(exc)})

    @app.exception_handler(StarExtractionError)
    async def _extract(_: Request, exc: StarExtractionError):
        return JSONResponse(
            status_code=500, content={"code": "internal-inconsistency", "message": str(exc)}
        )

    @app.exception_handler(ValueError)
    async def _value(_: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"code": "invalid-input", "message": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/suites")
    def suites():
        from ..suites import all_suite_names

        return {"suites": all_suite_names()}

    @app.post("/lift", response_model=LiftResponse)
    def lift(req: LiftRequest):
        return handlers.handle_lift(req)

    @app.post("/lbeta", response_model=TensorResponse)
    def lbeta(req: LBetaRequest):
        return handlers.handle_lbeta(req)

    @app.post("/quantize", response_model=QuantizeResponse)
    def quantize(req: QuantizeRequest):
        return handlers.handle_quantize(req)

    @app.post("/star", response_model=StarResponse)
    def star(req: StarRequest):
        return handlers.handle_star(req)

    @app.post("/star-inf", response_model=StarResponse)
    def star_inf(req: StarInfRequest):
        return handlers.handle_star_inf(req)

    @app.post("/gauge", response_model=GaugeResponse)
    def gauge(req: GaugeRequest):
        return handlers.handle_gauge(req)

    @app.post("/rc", response_model=RCResponse)
    def rc(req: RCRequest):
        return handlers.handle_rc(req)

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest):
        try:
            return handlers.handle_verify(req)
        except KeyError as exc:
            raise ParseError(str(exc)) from exc

    return app


app = create_app()
