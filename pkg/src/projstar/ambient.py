"""Lifts of weighted symmetric tensors to the scale bundle.

An ambient symmetric k-tensor is stored in a fixed scale as a fiber
polynomial in (z, w): the component list (a_0, ..., a_k) of the expansion
along horizontal frame directions and Euler-field padding corresponds to
sum_m A_m(x, z) w^(k-m).  No (n+1)-dimensional chart is ever materialized;
the vertical direction is the w variable and homogeneity is the weight tag.

The trace of the ambient covariant derivative acts on such a body as

    k * tr = D_Gamma + w P_pq d/dz_p d/dz_q + d/dw o (lam + n + 2 E_z + E_w)

where D_Gamma is the base divergence operator and E_z, E_w are fiber Euler
operators.  This one formula reproduces the component recursions defining
the invariant lift as well as the Euler-padding identity used by the peel
decomposition; the tests cross-check it against an independent flat
ambient-coordinate oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import List, Optional, Tuple

from .ring import (
    MU,
    POLY_W,
    WVAR,
    Poly,
    Weight,
    binomial,
    falling_factorial,
    jetvar,
    poly_z,
    total_x_diff,
    var_key,
    weight_add,
    weight_poly,
)
from .geometry import (
    AffineConnection,
    DensityField,
    ExcludedWeightError,
    SymTensorField,
    divergence_operator,
    nabla_body,
)


@dataclass(frozen=True)
class AmbientSymTensor:
    """Ambient symmetric k-tensor of fixed homogeneity in a chosen scale."""

    n: int
    k: int
    weight: Weight
    body: Poly

    def __post_init__(self):
        for d, p in self.body.graded_parts("z", "w").items():
            if p and d != self.k:
                raise ValueError("ambient body not homogeneous of fiber degree %d" % self.k)

    def component_body(self, m: int) -> Poly:
        return self.body.coefficient_of(WVAR, self.k - m)

    def component(self, m: int) -> SymTensorField:
        """The valence-m piece a_m (coefficient of w^(k-m))."""
        return SymTensorField(self.n, m, self.weight, self.component_body(m))

    def components(self) -> List[Poly]:
        return [self.component_body(m) for m in range(self.k + 1)]

    def top(self) -> SymTensorField:
        return self.component(self.k)

    def horizontal_part(self) -> Poly:
        return self.component_body(self.k)


def ambient_sym_product(A: AmbientSymTensor, B: AmbientSymTensor) -> AmbientSymTensor:
    if A.n != B.n:
        raise ValueError("dimension mismatch")
    return AmbientSymTensor(A.n, A.k + B.k, weight_add(A.weight, B.weight), A.body * B.body)


def pad_with_euler(T: AmbientSymTensor, s: int) -> AmbientSymTensor:
    """Symmetric product with s copies of the Euler field."""
    return AmbientSymTensor(T.n, T.k + s, T.weight, T.body * POLY_W ** s)


def _schouten_contract(body: Poly, conn: AffineConnection) -> Poly:
    """P_pq d_zp d_zq applied to a fiber polynomial."""
    out = Poly.zero()
    for (p, q), val in conn.curvature().schouten.items():
        second = body.diff(zvar_cached(p)).diff(zvar_cached(q))
        if not second.is_zero():
            out = out + val * second
    return out


_ZVARS = {}


def zvar_cached(i: int):
    key = _ZVARS.get(i)
    if key is None:
        key = ("z", i)
        _ZVARS[i] = key
    return key


def _scale_bidegree(body: Poly, fn) -> Poly:
    """Multiply each (z-degree, w-degree) graded piece by the weight fn(m, d)."""
    out = Poly.zero()
    for m, part_m in body.graded_parts("z").items():
        for d, piece in part_m.graded_parts("w").items():
            out = out + weight_poly(fn(m, d)) * piece
    return out


def ambient_trace_div(T: AmbientSymTensor, conn: AffineConnection) -> AmbientSymTensor:
    """Contract the ambient covariant derivative into one slot (valence drops by 1)."""
    if T.k < 1:
        raise ValueError("valence must be at least 1")
    n, lam = T.n, T.weight
    out = divergence_operator(T.body, conn)
    ptrace = _schouten_contract(T.body, conn)
    if not ptrace.is_zero():
        out = out + POLY_W * ptrace

    def diag(m, d):
        return weight_add(lam, Fraction(n + 2 * m + d))

    out = out + _scale_bidegree(T.body, diag).diff(WVAR)
    return AmbientSymTensor(n, T.k - 1, lam, out / Fraction(T.k))


def excluded_weights(n: int, k: int) -> List[Fraction]:
    return [Fraction(-n - k - m) for m in range(k)]


def _excluded_message(n: int, k: int, m: int) -> str:
    order = k - m
    return (
        "weight %d is excluded for valence %d in dimension %d: there is instead an "
        "invariant operator of order %d with leading term the %d-fold divergence "
        "(see excluded_weight_operator)" % (-n - k - m, k, n, order, order)
    )


def invariant_lift(a: SymTensorField, conn: AffineConnection) -> AmbientSymTensor:
    """The unique trace-free ambient extension of a weighted symmetric tensor.

    Fails exactly on the excluded weights, where the obstruction is the
    invariant operator returned by excluded_weight_operator.
    """
    n, k, lam = a.n, a.k, a.weight
    if k == 0:
        return AmbientSymTensor(n, 0, lam, a.body)
    if isinstance(lam, Poly):
        raise ValueError("invariant lift needs an exact rational weight")
    comps: List[Optional[Poly]] = [None] * (k + 1)
    comps[k] = a.body
    den = lam + n + 2 * k - 1
    if den == 0:
        raise ExcludedWeightError(_excluded_message(n, k, k - 1))
    comps[k - 1] = -divergence_operator(comps[k], conn) / den
    for m in range(k - 1, 0, -1):
        den = lam + n + m + k - 1
        if den == 0:
            raise ExcludedWeightError(_excluded_message(n, k, m - 1))
        num = divergence_operator(comps[m], conn) + _schouten_contract(comps[m + 1], conn)
        comps[m - 1] = -num / ((k - m + 1) * den)
    body = Poly.zero()
    for m in range(k + 1):
        body = body + comps[m] * POLY_W ** (k - m)
    return AmbientSymTensor(n, k, lam, body)


def flat_lift_closed_form(a: SymTensorField, conn: AffineConnection) -> AmbientSymTensor:
    """Closed-form lift components, valid for a Ricci-flat representative."""
    if not conn.curvature().is_ricci_flat:
        raise ValueError("closed-form lift requires a Ricci-flat connection")
    n, k, lam = a.n, a.k, a.weight
    if isinstance(lam, Poly):
        raise ValueError("closed form needs an exact rational weight")
    if any(lam == w for w in excluded_weights(n, k)):
        raise ExcludedWeightError(_excluded_message(n, k, int(-lam) - n - k))
    body = Poly.zero()
    div = a.body
    for m in range(k + 1):
        coeff = Fraction((-1) ** m) * binomial(k, m) / falling_factorial(lam + n + 2 * k - 1, m)
        body = body + div * coeff * POLY_W ** m
        if m < k:
            div = divergence_operator(div, conn) / (k - m)
    return AmbientSymTensor(n, k, lam, body)


def excluded_weight_operator(a: SymTensorField, conn: AffineConnection) -> SymTensorField:
    """The invariant operator existing precisely at an excluded weight.

    For weight -n-k-m it has order k-m and leading term the (k-m)-fold
    divergence, normalized here to unit leading coefficient.
    """
    n, k, lam = a.n, a.k, a.weight
    if isinstance(lam, Poly):
        raise ValueError("excluded weights are exact rationals")
    m = None
    for mm in range(k):
        if lam == Fraction(-n - k - mm):
            m = mm
            break
    if m is None:
        raise ValueError("weight %s is not excluded for valence %d in dimension %d" % (lam, k, n))
    comps: List[Optional[Poly]] = [None] * (k + 3)
    comps[k] = a.body
    if k - 1 >= m + 1:
        comps[k - 1] = -divergence_operator(comps[k], conn) / (lam + n + 2 * k - 1)
    for g in range(k - 1, m + 1, -1):
        den = lam + n + g + k - 1
        num = divergence_operator(comps[g], conn) + _schouten_contract(comps[g + 1], conn)
        comps[g - 1] = -num / ((k - g + 1) * den)
    upper1 = comps[m + 1] if comps[m + 1] is not None else Poly.zero()
    upper2 = comps[m + 2] if m + 2 <= k and comps[m + 2] is not None else Poly.zero()
    raw = (divergence_operator(upper1, conn) + _schouten_contract(upper2, conn)) / Fraction(k)
    lead = (
        Fraction((-1) ** (k - m - 1))
        * Fraction(m + 1)
        * binomial(k, k - m - 1)
        / Fraction(k * factorial(k - m - 1))
    )
    return SymTensorField(n, m, lam, raw / lead)


# ---------------------------------------------------------------------------
# ambient covariant derivative with a free base slot, and the ambient bracket


def ambient_nabla_horizontal(T: AmbientSymTensor, conn: AffineConnection, i: int) -> Poly:
    """Body of the i-th horizontal ambient covariant derivative."""
    body = T.body
    out = nabla_body(body, conn, i)
    curv = conn.curvature()
    for p in range(1, T.n + 1):
        dz = body.diff(zvar_cached(p))
        if dz.is_zero():
            continue
        pv = curv.P(i, p)
        if pv:
            out = out + pv * POLY_W * dz
    dw = body.diff(WVAR)
    if not dw.is_zero():
        out = out + poly_z(i) * dw
    return out


def ambient_poisson(A: AmbientSymTensor, B: AmbientSymTensor, conn: AffineConnection) -> AmbientSymTensor:
    """Schouten bracket of ambient tensors, computed through the ambient connection."""
    n = A.n
    body = Poly.zero()
    for p in range(1, n + 1):
        da = A.body.diff(zvar_cached(p))
        db = B.body.diff(zvar_cached(p))
        if not da.is_zero():
            body = body + da * ambient_nabla_horizontal(B, conn, p)
        if not db.is_zero():
            body = body - db * ambient_nabla_horizontal(A, conn, p)
    # vertical slot: differentiating along the Euler field is homogeneity scaling
    da_w = A.body.diff(WVAR)
    db_w = B.body.diff(WVAR)
    if not da_w.is_zero():
        body = body + da_w * (weight_poly(weight_add(B.weight, Fraction(B.k))) * B.body)
    if not db_w.is_zero():
        body = body - db_w * (weight_poly(weight_add(A.weight, Fraction(A.k))) * A.body)
    return AmbientSymTensor(n, A.k + B.k - 1, weight_add(A.weight, B.weight), body)


# ---------------------------------------------------------------------------
# ambient jets of densities


@dataclass(frozen=True)
class AmbientDensityJet:
    """Symmetrized ambient derivatives of a density, as covariant fiber polys.

    polys[r] is the order-r symmetric jet; base slots are carried by the z
    variables, Euler-field slots by w.  The pure base part of polys[r] is
    the invariant horizontal jet used by the quantization pairing.
    """

    n: int
    mu: Weight
    order: int
    polys: Tuple[Poly, ...]

    def horizontal(self, r: int) -> Poly:
        return self.polys[r].coefficient_of(WVAR, 0)

    def euler_contraction(self, r: int, s: int) -> Poly:
        """Contract s Euler slots into the order-r jet (r + s <= order)."""
        piece = self.polys[r + s]
        for _ in range(s):
            piece = piece.diff(WVAR)
        denom = 1
        for j in range(s):
            denom *= r + s - j
        return piece / Fraction(denom)


def ambient_density_jet(
    f: DensityField,
    conn: AffineConnection,
    order: int,
    max_order: int = 6,
) -> AmbientDensityJet:
    """Iterated symmetrized ambient covariant derivatives of a density."""
    if order > max_order:
        raise ValueError("jet order %d exceeds the configured maximum %d" % (order, max_order))
    n = f.n
    mu = f.weight
    curv = conn.curvature()
    polys = [f.comp]
    current = f.comp
    for r in range(order):
        nxt = weight_poly(weight_add(mu, Fraction(-r))) * POLY_W * current
        for j in range(1, n + 1):
            nxt = nxt + poly_z(j) * total_x_diff(current, j)
        dzs = {i: current.diff(zvar_cached(i)) for i in range(1, n + 1)}
        dw = current.diff(WVAR)
        for j in range(1, n + 1):
            zj = poly_z(j)
            for i in range(1, n + 1):
                zz = zj * poly_z(i)
                for kk in range(1, n + 1):
                    g = conn.gamma(j, i, kk)
                    if g and not dzs[kk].is_zero():
                        nxt = nxt - g * zz * dzs[kk]
                pv = curv.P(j, i)
                if pv and not dw.is_zero():
                    nxt = nxt - pv * zz * dw
        euler = Poly.zero()
        for kk in range(1, n + 1):
            if not dzs[kk].is_zero():
                euler = euler + poly_z(kk) * dzs[kk]
        if not euler.is_zero():
            nxt = nxt - POLY_W * euler
        polys.append(nxt)
        current = nxt
    return AmbientDensityJet(n, mu, order, tuple(polys))


def generic_density(n: int, name: str = "f", mu: Optional[Weight] = None) -> DensityField:
    """A density whose component is an undetermined jet symbol."""
    if mu is None:
        mu = MU
    return DensityField(n, mu, Poly.variable(jetvar(name, (0,) * n)))


def contract_full(contra: Poly, cov: Poly, k: int) -> Poly:
    """Full contraction of a degree-k contravariant body with a covariant one.

    Realized by substituting each fiber variable of the first factor with
    the corresponding derivative acting on the second.
    """
    out = Poly.zero()
    for mono, coeff in contra.terms.items():
        piece = cov
        rest = []
        for vid, e in mono:
            key = var_key(vid)
            if key[0] in ("z", "w"):
                for _ in range(e):
                    piece = piece.diff(key)
                    if piece.is_zero():
                        break
                if piece.is_zero():
                    break
            else:
                rest.append((vid, e))
        if piece.is_zero():
            continue
        out = out + Poly({tuple(rest): coeff}) * piece
    return out / Fraction(factorial(k))
