"""Multilinear invariant operators built from products of lifts.

The central routine applies the ambient trace-divergence repeatedly to a
symmetric product of invariant lifts and reads off the horizontal part.
The peel decomposition recovers all the lower operators at once from a
single product of lifts and is cross-checked against the direct route.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .ring import (
    Poly,
    Weight,
    binomial,
    falling_factorial,
    weight_add,
    weight_poly,
    zvar,
)
from .geometry import (
    AffineConnection,
    DensityField,
    ExcludedWeightError,
    SymTensorField,
    covariant_derivative,
    divergence_tensor,
    schouten_bracket,
)
from .ambient import (
    AmbientDensityJet,
    AmbientSymTensor,
    ambient_density_jet,
    ambient_poisson,
    ambient_sym_product,
    ambient_trace_div,
    contract_full,
    excluded_weights,
    invariant_lift,
)

Arg = Union[SymTensorField, DensityField]


def _as_field(arg: Arg) -> SymTensorField:
    if isinstance(arg, DensityField):
        return arg.as_symbol()
    return arg


def _lift(arg: SymTensorField, conn: AffineConnection) -> AmbientSymTensor:
    if arg.k == 0:
        return AmbientSymTensor(arg.n, 0, arg.weight, arg.body)
    return invariant_lift(arg, conn)


def product_of_lifts(args: Sequence[Arg], conn: AffineConnection) -> AmbientSymTensor:
    fields = [_as_field(a) for a in args]
    lifted = _lift(fields[0], conn)
    for f in fields[1:]:
        lifted = ambient_sym_product(lifted, _lift(f, conn))
    return lifted


def l_beta(args: Sequence[Arg], beta: int, conn: AffineConnection) -> SymTensorField:
    """Invariant multilinear operator of order K - beta, valence beta output.

    Applies K - beta ambient trace-divergences to the product of the lifts
    of the arguments and extracts the horizontal component.
    """
    prod = product_of_lifts(args, conn)
    K = prod.k
    if not 0 <= beta <= K:
        raise ValueError("beta must lie between 0 and the total valence %d" % K)
    for _ in range(K - beta):
        prod = ambient_trace_div(prod, conn)
    return SymTensorField(prod.n, beta, prod.weight, prod.horizontal_part())


def quantize_pair(a: SymTensorField, f: DensityField, conn: AffineConnection) -> DensityField:
    """Pair a weighted symmetric tensor with a density: the order-k invariant
    operator with principal symbol a applied to f."""
    lift = _lift(a, conn)
    jet = ambient_density_jet(f, conn, a.k, max_order=max(6, a.k))
    value = contract_full(lift.body, jet.polys[a.k], a.k)
    return DensityField(a.n, weight_add(a.weight, f.weight), value)


@dataclass(frozen=True)
class PeelDecomposition:
    """How the product of lifts differs from the lift of the product.

    u[0] is the symmetric product of the arguments; for s >= 1 the Euler
    padding of lift(u[s]) carries coefficient 1, so that

        product of lifts = sum_s w^s * lift(u[s])  (u[s] of valence K - s)

    and u[s] is a fixed multiple of the order-s multilinear operator.
    """

    n: int
    K: int
    weight: Weight
    u: Tuple[SymTensorField, ...]

    def implied_l_beta(self, beta: int) -> SymTensorField:
        """Recover the direct operator from the peel component u[K - beta]."""
        s = self.K - beta
        if s == 0:
            return self.u[0]
        coeff = falling_factorial(_to_fraction(self.weight) + self.n + 2 * self.K - s, s) / binomial(self.K, s)
        return self.u[s].scaled(coeff)


def _to_fraction(w: Weight) -> Fraction:
    if isinstance(w, Poly):
        return w.as_fraction()
    return w


def peel_decompose(args: Sequence[Arg], conn: AffineConnection) -> PeelDecomposition:
    """Iteratively peel the product of lifts into lifted graded pieces."""
    prod = product_of_lifts(args, conn)
    n, K = prod.n, prod.k
    lam = _to_fraction(prod.weight)
    for s in range(1, K + 1):
        if falling_factorial(lam + n + 2 * K - s, s) == 0:
            raise ExcludedWeightError(
                "peel denominator vanishes at padding depth %d for total weight %s" % (s, lam)
            )
    us: List[SymTensorField] = []
    residue = prod.body
    for s in range(K + 1):
        valence = K - s
        horizontal = residue.coefficient_of(("w",), 0)
        u_s = SymTensorField(n, valence, prod.weight, horizontal)
        us.append(u_s)
        if s == K:
            if residue != horizontal:
                raise ExcludedWeightError("peel residue not exhausted at depth %d" % s)
            break
        if valence > 0 and any(lam == w for w in excluded_weights(n, valence)):
            raise ExcludedWeightError(
                "total weight %s is excluded at valence %d; peel cannot continue" % (lam, valence)
            )
        residue = residue - _lift(u_s, conn).body
        residue = _divide_by_w(residue)
    return PeelDecomposition(n, K, prod.weight, tuple(us))


def _divide_by_w(p: Poly) -> Poly:
    """Exact division by w (every term must contain w)."""
    from .ring import var_id

    wid = var_id(("w",))
    out = {}
    for m, c in p.terms.items():
        hit = False
        for idx, (v, e) in enumerate(m):
            if v == wid:
                nm = m[:idx] + m[idx + 1 :] if e == 1 else m[:idx] + ((v, e - 1),) + m[idx + 1 :]
                out[nm] = c
                hit = True
                break
        if not hit:
            raise ExcludedWeightError("peel failed: residue term without Euler padding")
    return Poly(out)


def weighted_pairing(a: SymTensorField, b: SymTensorField, conn: AffineConnection) -> SymTensorField:
    """Skew pairing of weighted tensors: ambient bracket of the lifts, mod Euler.

    For weight-zero arguments this is the Schouten bracket.
    """
    br = ambient_poisson(_lift(a, conn), _lift(b, conn), conn)
    return SymTensorField(a.n, a.k + b.k - 1, br.weight, br.horizontal_part())


# ---------------------------------------------------------------------------
# the invariant operator on densities of integer weight


@dataclass(frozen=True)
class CovariantSymTensor:
    """Symmetric covariant tensor, slots carried by the z variables."""

    n: int
    r: int
    body: Poly

    def component(self, idx: Sequence[int]) -> Poly:
        from math import factorial as _f

        mono = self.body
        for i in idx:
            mono = mono.diff(zvar(i))
        return mono / Fraction(_f(self.r))


def _cov_sym_nabla(body: Poly, conn: AffineConnection) -> Poly:
    """Symmetrized covariant derivative of a covariant symmetric body."""
    n = conn.n
    out = Poly.zero()
    for j in range(1, n + 1):
        term = _total(body, j)
        for i in range(1, n + 1):
            for p in range(1, n + 1):
                g = conn.gamma(j, i, p)
                if g:
                    dp = body.diff(zvar(p))
                    if not dp.is_zero():
                        term = term - g * Poly.variable(zvar(i)) * dp
        out = out + Poly.variable(zvar(j)) * term
    return out


def _total(body: Poly, j: int) -> Poly:
    from .ring import total_x_diff

    return total_x_diff(body, j)


def invariant_operator_L(u: DensityField, k: int, conn: AffineConnection) -> CovariantSymTensor:
    """Order k+1 operator annihilating, in the flat case, polynomials of degree <= k.

    Defined by the two-term recursion seeded with the Hessian minus the
    Schouten correction; requires the density weight to equal k exactly.
    """
    if _to_fraction(u.weight) != Fraction(k):
        raise ValueError("the density weight must equal %d exactly" % k)
    return _l_operator_any_weight(u, k + 1, conn)


def _l_operator_any_weight(u: DensityField, order: int, conn: AffineConnection) -> CovariantSymTensor:
    lam = weight_poly(u.weight)
    p_poly = Poly.zero()
    for (i, j), val in conn.curvature().schouten.items():
        p_poly = p_poly + val * Poly.variable(zvar(i)) * Poly.variable(zvar(j))
    prev = u.comp  # order 0
    if order == 0:
        return CovariantSymTensor(u.n, 0, prev)
    cur = _cov_sym_nabla(prev, conn)  # order 1
    for r in range(1, order):
        nxt = _cov_sym_nabla(cur, conn) + Fraction(r) * (Fraction(r - 1) - lam) * p_poly * prev
        prev, cur = cur, nxt
    return CovariantSymTensor(u.n, order, cur)


def jet_symbol_orders(p: Poly, name: str) -> int:
    """Highest derivative order of the named jet symbol appearing in p."""
    from .ring import var_key

    best = -1
    for vid in p.vars_present():
        key = var_key(vid)
        if key[0] == "jet" and key[1] == name:
            best = max(best, sum(key[2]))
    return best
