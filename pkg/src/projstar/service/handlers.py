"""Pure service handlers: request model in, response model out.

The FastAPI app and the CLI both dispatch through these functions, so the
in-process CLI path and the HTTP path compute identical results.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional

from ..ring import MU, ParseError, Poly, WVAR, parse_poly, var_key
from ..geometry import (
    AffineConnection,
    DensityField,
    ExcludedWeightError,
    NonSymmetricRicciError,
    SymTensorField,
    flat_connection,
)
from ..ambient import invariant_lift
from ..multilinear import l_beta
from ..starprod import StarExtractionError, quantization_map, star_product, star_infinity, gauge_transform
from ..suites import CheckResult, SuiteConfig, run_suite
from .. import onedim
from .models import (
    CheckModel,
    ConnectionSpec,
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


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError("bad rational %r" % text) from exc


def build_connection(spec: Optional[ConnectionSpec], n: int) -> AffineConnection:
    if spec is None:
        return flat_connection(n)
    if spec.n != n:
        raise ParseError("connection dimension %d does not match n=%d" % (spec.n, n))
    table = {}
    for key, text in spec.gamma.items():
        parts = key.split(",")
        if len(parts) != 3:
            raise ParseError("bad Christoffel key %r (expected 'i,j,k')" % key)
        try:
            i, j, k = (int(p) for p in parts)
        except ValueError as exc:
            raise ParseError("bad Christoffel key %r" % key) from exc
        table[(i, j, k)] = parse_poly(text, n)
    # fill symmetric partners that were omitted
    for (i, j, k), v in list(table.items()):
        if (j, i, k) not in table:
            table[(j, i, k)] = v
    return AffineConnection(n, table)


def parse_tensor(text: str, n: int, weight: str) -> SymTensorField:
    body = parse_poly(text, n)
    k = body.degree_of_kind("z", "w")
    return SymTensorField(n, k, parse_fraction(weight), body)


def monomial_map(p: Poly) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for mono, coeff in p.sorted_terms():
        factors = []
        for vid, e in sorted(mono, key=lambda q: var_key(q[0])):
            from ..ring import var_name

            nm = var_name(vid)
            factors.append(nm if e == 1 else "%s^%d" % (nm, e))
        out["*".join(factors) if factors else "1"] = str(coeff)
    return out


def handle_lift(req: LiftRequest) -> LiftResponse:
    conn = build_connection(req.connection, req.n)
    a = parse_tensor(req.tensor, req.n, req.weight)
    lifted = invariant_lift(a, conn)
    comps = {str(m): str(lifted.component_body(m)) for m in range(lifted.k + 1)}
    return LiftResponse(n=req.n, k=lifted.k, weight=str(a.weight), components=comps)


def handle_lbeta(req: LBetaRequest) -> TensorResponse:
    conn = build_connection(req.connection, req.n)
    args = [parse_tensor(t.poly, req.n, t.weight) for t in req.args]
    out = l_beta(args, req.beta, conn)
    weight = out.weight if isinstance(out.weight, Fraction) else out.weight.as_fraction()
    return TensorResponse(
        n=req.n, k=out.k, weight=str(weight), body=str(out.body), monomials=monomial_map(out.body)
    )


def _mu_weight(text: str):
    if text == "formal":
        return None
    return parse_fraction(text)


def handle_quantize(req: QuantizeRequest) -> QuantizeResponse:
    conn = build_connection(req.connection, req.n)
    a = parse_tensor(req.symbol, req.n, req.weight)
    mu = _mu_weight(req.mu)
    op = quantization_map(a, conn, MU if mu is None else mu)
    terms = {
        ",".join(str(e) for e in alpha): str(c)
        for alpha, c in sorted(op.terms.items(), key=lambda it: (sum(it[0]), it[0]))
    }
    return QuantizeResponse(n=req.n, order=op.order, mu=req.mu, terms=terms)


def handle_star(req: StarRequest) -> StarResponse:
    conn = build_connection(req.connection, req.n)
    a = parse_tensor(req.a, req.n, "0")
    b = parse_tensor(req.b, req.n, "0")
    mu = _mu_weight(req.mu)
    exp = star_product(a, b, conn, mu)
    orders = {
        str(r): monomial_map(exp.coefficient(r).body)
        for r in range(a.k + b.k + 1)
    }
    pretty = _pretty_star(exp, a.k + b.k)
    return StarResponse(n=req.n, k=a.k, l=b.k, mu=req.mu, orders=orders, pretty=pretty)


def handle_star_inf(req: StarInfRequest) -> StarResponse:
    conn = build_connection(req.connection, req.n)
    a = parse_tensor(req.a, req.n, "0")
    b = parse_tensor(req.b, req.n, "0")
    series = star_infinity(a, b, conn)
    orders = {str(r): monomial_map(sym.body) for r, sym in series.items()}
    lines = ["c^%d: %s" % (r, series[r].body) for r in sorted(series)]
    return StarResponse(
        n=req.n, k=a.k, l=b.k, mu="infinity", orders=orders, pretty="\n".join(lines)
    )


def _pretty_star(exp, K: int) -> str:
    lines = []
    for r in range(K + 1):
        body = exp.coefficient(r).body
        if body.is_zero() and r:
            continue
        lines.append("eps^%d: %s" % (r, body))
    return "\n".join(lines)


def handle_gauge(req: GaugeRequest) -> GaugeResponse:
    conn1 = build_connection(req.connection1, req.n)
    conn2 = build_connection(req.connection2, req.n)
    a = parse_tensor(req.symbol, req.n, req.weight)
    parts = gauge_transform(conn1, conn2, a)
    return GaugeResponse(n=req.n, orders={str(r): str(p.body) for r, p in enumerate(parts)})


def handle_rc(req: RCRequest) -> RCResponse:
    us = [
        onedim.WeightedFunction1D(parse_fraction(s), parse_poly(u, 1))
        for u, s in zip(req.us, req.sigmas)
    ]
    if req.op == "bracket":
        if len(us) != 2:
            raise ParseError("bracket takes two functions")
        out = onedim.rc_bracket(us[0], us[1], req.k)
        return RCResponse(sigma=str(out.sigma), value=str(out.u))
    if req.op == "multilinear":
        ks = req.ks if req.ks is not None else [req.k] * len(us)
        out = onedim.rc_multilinear(us, ks)
        return RCResponse(sigma=str(out.sigma), value=str(out.u))
    if req.op == "cmz-mu":
        if len(us) != 2:
            raise ParseError("cmz-mu takes two functions")
        out, coeffs = onedim.cmz_mu_product(us[0], us[1], parse_fraction(req.mu), req.truncation)
        return RCResponse(
            sigma=str(out.sigma),
            value=str(out.u),
            coefficients={str(r): str(c) for r, c in sorted(coeffs.items())},
        )
    if req.op == "cmz-inf":
        if len(us) != 2:
            raise ParseError("cmz-inf takes two functions")
        out, coeffs = onedim.cmz_infinity_product(us[0], us[1], req.truncation)
        return RCResponse(
            sigma=str(out.sigma),
            value=str(out.u),
            coefficients={str(r): str(c) for r, c in sorted(coeffs.items())},
        )
    if req.op == "star1d":
        if len(us) != 2:
            raise ParseError("star1d takes two functions")
        series = onedim.star_one_dim(us[0], us[1], parse_fraction(req.mu), req.k)
        value = "; ".join("eps^%d: %s" % (s, series[s].u) for s in sorted(series))
        return RCResponse(sigma=str(series[0].sigma), value=value)
    raise ParseError("unknown rc operation %r" % req.op)


def handle_verify(req: VerifyRequest) -> VerifyResponse:
    config = SuiteConfig(n=req.n, seed=req.seed, maxdeg=req.maxdeg, cases=req.cases)
    checks = run_suite(req.suite, config)
    return VerifyResponse(
        suite=req.suite,
        n=req.n,
        seed=req.seed,
        ok=all(c.ok for c in checks),
        checks=[CheckModel(name=c.name, ok=c.ok, detail=c.detail) for c in checks],
    )
