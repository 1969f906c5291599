"""Request and response models for the computation service."""

from __future__ import annotations

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field


class ConnectionSpec(BaseModel):
    """Connection file payload: omitted Christoffel entries are zero.

    Keys are "i,j,k" with 1-based indices, values are polynomial text in
    the x variables; symmetry in (i, j) is validated on load.
    """

    n: int
    gamma: Dict[str, str] = Field(default_factory=dict)


class TensorArg(BaseModel):
    poly: str
    weight: str = "0"


class LiftRequest(BaseModel):
    n: int
    tensor: str
    weight: str = "0"
    connection: Optional[ConnectionSpec] = None


class LiftResponse(BaseModel):
    n: int
    k: int
    weight: str
    components: Dict[str, str]


class LBetaRequest(BaseModel):
    n: int
    args: List[TensorArg]
    beta: int
    connection: Optional[ConnectionSpec] = None


class TensorResponse(BaseModel):
    n: int
    k: int
    weight: str
    body: str
    monomials: Dict[str, str]


class QuantizeRequest(BaseModel):
    n: int
    symbol: str
    weight: str = "0"
    mu: str = "formal"
    connection: Optional[ConnectionSpec] = None


class QuantizeResponse(BaseModel):
    n: int
    order: int
    mu: str
    terms: Dict[str, str]


class StarRequest(BaseModel):
    n: int
    a: str
    b: str
    mu: str = "formal"
    connection: Optional[ConnectionSpec] = None


class StarResponse(BaseModel):
    n: int
    k: int
    l: int
    mu: str
    orders: Dict[str, Dict[str, str]]
    pretty: str


class StarInfRequest(BaseModel):
    n: int
    a: str
    b: str
    connection: Optional[ConnectionSpec] = None


class GaugeRequest(BaseModel):
    n: int
    symbol: str
    weight: str = "0"
    connection1: Optional[ConnectionSpec] = None
    connection2: Optional[ConnectionSpec] = None


class GaugeResponse(BaseModel):
    n: int
    orders: Dict[str, str]


class RCRequest(BaseModel):
    op: Literal["bracket", "multilinear", "cmz-mu", "cmz-inf", "star1d"]
    us: List[str]
    sigmas: List[str]
    k: int = 0
    ks: Optional[List[int]] = None
    mu: str = "0"
    truncation: int = 3


class RCResponse(BaseModel):
    sigma: str
    value: str
    coefficients: Dict[str, str] = Field(default_factory=dict)


class VerifyRequest(BaseModel):
    suite: str
    n: int = 2
    seed: int = 0
    maxdeg: int = 2
    cases: int = 4


class CheckModel(BaseModel):
    name: str
    ok: bool
    detail: str = ""


class VerifyResponse(BaseModel):
    suite: str
    n: int
    seed: int
    ok: bool
    checks: List[CheckModel]


class ErrorPayload(BaseModel):
    code: Literal["parse-error", "excluded-weight", "invalid-input", "internal-inconsistency"]
    message: str
