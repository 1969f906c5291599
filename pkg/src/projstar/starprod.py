"""Quantization map, symbol calculus, and the star products.

Operators on densities are stored as finite sums c_alpha(x; mu) d^alpha.
The star products are obtained by composing quantized symbols and peeling
the composite back to graded symbols; the order index of each graded piece
carries the deformation grading, so no extra formal variable is stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .ring import (
    MU,
    MUVAR,
    Poly,
    Weight,
    binomial,
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
    SymTensorField,
    divergence_tensor,
    is_projective_vector_field,
    schouten_bracket,
    sym_product,
)
from .ambient import generic_density
from .multilinear import l_beta, quantize_pair


class StarExtractionError(RuntimeError):
    """Nonzero residue after the last peel; indicates an internal inconsistency."""


MultiIndex = Tuple[int, ...]


def _alpha_add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def _alpha_binom(a: MultiIndex, b: MultiIndex) -> int:
    out = 1
    for x, y in zip(a, b):
        out *= comb(x, y)
    return out


def _alpha_le(a: MultiIndex, b: MultiIndex) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _sub_indices(alpha: MultiIndex):
    ranges = [range(x + 1) for x in alpha]
    return iproduct(*ranges)


@dataclass(frozen=True)
class DensityDiffOp:
    """Differential operator from weight-mu densities to weight-(mu+shift).

    source is the weight symbol of the densities acted on: either an exact
    rational or the formal mu polynomial.  Coefficients may involve mu only
    when the source is formal.
    """

    n: int
    source: Weight
    shift: Weight
    terms: Dict[MultiIndex, Poly]

    @property
    def order(self) -> int:
        return max((sum(a) for a in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def apply(self, f: DensityField) -> DensityField:
        comp = f.comp
        out = Poly.zero()
        for alpha, c in self.terms.items():
            piece = comp
            for i, e in enumerate(alpha):
                for _ in range(e):
                    piece = total_x_diff(piece, i + 1)
            if isinstance(self.source, Poly) and not isinstance(f.weight, Poly):
                c = c.subs(MUVAR, f.weight)
            out = out + c * piece
        return DensityField(self.n, weight_add(f.weight, self.shift), out)

    def __add__(self, other: "DensityDiffOp") -> "DensityDiffOp":
        terms = dict(self.terms)
        for a, c in other.terms.items():
            v = terms.get(a, Poly.zero()) + c
            if v:
                terms[a] = v
            elif a in terms:
                del terms[a]
        return DensityDiffOp(self.n, self.source, self.shift, terms)

    def __sub__(self, other: "DensityDiffOp") -> "DensityDiffOp":
        return self + other.scaled(Fraction(-1))

    def scaled(self, c) -> "DensityDiffOp":
        return DensityDiffOp(self.n, self.source, self.shift, {a: v * c for a, v in self.terms.items()})

    def subs_mu(self, value) -> "DensityDiffOp":
        terms = {}
        for a, c in self.terms.items():
            v = c.subs(MUVAR, value)
            if v:
                terms[a] = v
        src = value if not isinstance(value, Poly) else value
        return DensityDiffOp(self.n, src if isinstance(self.source, Poly) else self.source, self.shift, terms)

    def principal_symbol(self, weight: Weight = Fraction(0)) -> SymTensorField:
        k = self.order
        if k < 0:
            return SymTensorField(self.n, 0, weight, Poly.zero())
        body = Poly.zero()
        for alpha, c in self.terms.items():
            if sum(alpha) != k:
                continue
            mono = c
            for i, e in enumerate(alpha):
                if e:
                    mono = mono * poly_z(i + 1) ** e
            body = body + mono
        return SymTensorField(self.n, k, weight, body)


def identity_operator(n: int, source: Weight) -> DensityDiffOp:
    return DensityDiffOp(n, source, Fraction(0), {(0,) * n: Poly.const(1)})


def compose(D1: DensityDiffOp, D2: DensityDiffOp) -> DensityDiffOp:
    """Leibniz expansion of D1 after D2."""
    if D1.n != D2.n:
        raise ValueError("dimension mismatch")
    target_of_2 = weight_add(D2.source, D2.shift)
    if weight_poly(D1.source) != weight_poly(target_of_2):
        raise ValueError("weight mismatch in composition")
    n = D1.n
    terms: Dict[MultiIndex, Poly] = {}
    for alpha, c1 in D1.terms.items():
        for beta, c2 in D2.terms.items():
            for gamma in _sub_indices(alpha):
                gamma = tuple(gamma)
                rest = tuple(a - g for a, g in zip(alpha, gamma))
                dc2 = c2
                for i, e in enumerate(rest):
                    for _ in range(e):
                        dc2 = total_x_diff(dc2, i + 1)
                    if dc2.is_zero():
                        break
                if dc2.is_zero():
                    continue
                coeff = c1 * dc2 * _alpha_binom(alpha, gamma)
                key = _alpha_add(gamma, beta)
                v = terms.get(key, Poly.zero()) + coeff
                if v:
                    terms[key] = v
                elif key in terms:
                    del terms[key]
    return DensityDiffOp(n, D2.source, weight_add(D1.shift, D2.shift), terms)


def _collect_jet_linear(p: Poly, name: str, n: int) -> Dict[MultiIndex, Poly]:
    """Split a polynomial linear in the jets of one symbol by jet order."""
    out: Dict[MultiIndex, Poly] = {}
    for mono, coeff in p.terms.items():
        alpha = None
        rest = []
        for vid, e in mono:
            key = var_key(vid)
            if key[0] == "jet" and key[1] == name:
                if alpha is not None or e != 1:
                    raise ValueError("expression is not linear in the %s jets" % name)
                alpha = key[2]
            else:
                rest.append((vid, e))
        if alpha is None:
            raise ValueError("term without any %s jet symbol" % name)
        cur = out.get(alpha)
        piece = Poly({tuple(rest): coeff})
        out[alpha] = piece if cur is None else cur + piece
    return {a: c for a, c in out.items() if c}


def quantization_map(
    symbol: SymTensorField,
    conn: AffineConnection,
    source: Optional[Weight] = None,
) -> DensityDiffOp:
    """Invariant operator on densities with the given principal symbol."""
    n = symbol.n
    src: Weight = MU if source is None else source
    f = generic_density(n, "f", mu=src if isinstance(src, Poly) else Fraction(src))
    value = quantize_pair(symbol, f, conn)
    terms = _collect_jet_linear(value.comp, "f", n)
    return DensityDiffOp(n, src, symbol.weight, terms)


def quantize_graded(pieces: Sequence[SymTensorField], conn: AffineConnection, source: Optional[Weight] = None) -> DensityDiffOp:
    ops = [quantization_map(p, conn, source) for p in pieces]
    out = ops[0]
    for op in ops[1:]:
        out = out + op
    return out


def symbol_map(D: DensityDiffOp, conn: AffineConnection, weight: Weight = Fraction(0)) -> List[SymTensorField]:
    """Exact inverse of the quantization map: peel by principal symbols.

    Returns the graded symbols from valence order(D) down to 0 (some may be
    zero); their quantizations sum back to D.
    """
    out: List[SymTensorField] = []
    rem = D
    k = D.order
    if k < 0:
        return [SymTensorField(D.n, 0, weight, Poly.zero())]
    for valence in range(k, -1, -1):
        if rem.order > valence:
            raise StarExtractionError("operator order grew during symbol peeling")
        sym = _symbol_at_order(rem, valence, weight)
        out.append(sym)
        if not sym.body.is_zero():
            rem = rem - quantization_map(sym, conn, D.source)
    if not rem.is_zero():
        raise StarExtractionError("nonzero residue after symbol peeling")
    return out


def _symbol_at_order(D: DensityDiffOp, k: int, weight: Weight) -> SymTensorField:
    body = Poly.zero()
    for alpha, c in D.terms.items():
        if sum(alpha) != k:
            continue
        mono = c
        for i, e in enumerate(alpha):
            if e:
                mono = mono * poly_z(i + 1) ** e
        body = body + mono
    return SymTensorField(D.n, k, weight, body)


def formal_adjoint(D: DensityDiffOp) -> DensityDiffOp:
    """Term-wise integration by parts on the flat chart.

    The returned operator acts on densities of the dual weight; when the
    source is formal its coefficients are re-expressed in terms of the
    adjoint's own source weight, so mu keeps meaning "weight acted on".
    """
    n = D.n
    terms: Dict[MultiIndex, Poly] = {}
    for alpha, c in D.terms.items():
        sign = Fraction((-1) ** sum(alpha))
        for gamma in _sub_indices(alpha):
            gamma = tuple(gamma)
            rest = tuple(a - g for a, g in zip(alpha, gamma))
            dc = c
            for i, e in enumerate(rest):
                for _ in range(e):
                    dc = total_x_diff(dc, i + 1)
                if dc.is_zero():
                    break
            if dc.is_zero():
                continue
            coeff = dc * (sign * _alpha_binom(alpha, gamma))
            v = terms.get(gamma, Poly.zero()) + coeff
            if v:
                terms[gamma] = v
            elif gamma in terms:
                del terms[gamma]
    dual_const = Fraction(-n - 1)
    if isinstance(D.source, Poly):
        # old mu = -n-1-shift - mu_new
        swap = Poly.const(dual_const) - weight_poly(D.shift) - MU
        terms = {a: c.subs(MUVAR, swap) for a, c in terms.items()}
        terms = {a: c for a, c in terms.items() if c}
        new_source: Weight = MU
    else:
        new_source = dual_const - D.source - _as_frac(D.shift)
    return DensityDiffOp(n, new_source, D.shift, terms)


def _as_frac(w: Weight) -> Fraction:
    return w.as_fraction() if isinstance(w, Poly) else w


# ---------------------------------------------------------------------------
# star products


@dataclass(frozen=True)
class StarExpansion:
    """Graded expansion of a star product of two weight-zero symbols.

    orders[r] has valence k + l - r; orders[0] is the plain symmetric
    product.  The order index carries the deformation grading.
    """

    n: int
    k: int
    l: int
    orders: Dict[int, SymTensorField]

    def coefficient(self, r: int) -> SymTensorField:
        got = self.orders.get(r)
        if got is not None:
            return got
        valence = self.k + self.l - r
        return SymTensorField(self.n, max(valence, 0), Fraction(0), Poly.zero())

    def max_order(self) -> int:
        return max((r for r, s in self.orders.items() if not s.body.is_zero()), default=0)


def star_product(
    a: SymTensorField,
    b: SymTensorField,
    conn: AffineConnection,
    mu: Optional[Weight] = None,
) -> StarExpansion:
    """Graded star product of weight-zero symbols at density weight mu.

    mu defaults to the formal parameter; pass an exact rational to
    specialize (the symmetric product arises at -(n+1)/2).
    """
    if a.weight != Fraction(0) or b.weight != Fraction(0):
        raise ValueError("star product acts on weight-zero symbols")
    return _star_general(a, b, conn, mu)


def star_product_weighted(
    a: SymTensorField,
    b: SymTensorField,
    conn: AffineConnection,
    mu: Optional[Weight] = None,
) -> StarExpansion:
    """The two-weight variant; not part of the verified surface."""
    return _star_general(a, b, conn, mu)


def _star_general(a, b, conn, mu) -> StarExpansion:
    n = a.n
    src: Weight = MU if mu is None else mu
    La = quantization_map(a, conn, weight_add(src, b.weight) if isinstance(src, Poly) or b.weight else src)
    Lb = quantization_map(b, conn, src)
    D = compose(La, Lb)
    K = a.k + b.k
    orders: Dict[int, SymTensorField] = {}
    prod = sym_product(a, b)
    top = _symbol_at_order(D, K, prod.weight)
    if top.body != prod.body:
        raise StarExtractionError("leading symbol does not match the symmetric product")
    orders[0] = prod
    rem = D - quantization_map(prod, conn, src)
    for r in range(1, K + 1):
        if rem.order > K - r:
            raise StarExtractionError("unexpected operator order at star level %d" % r)
        sym = _symbol_at_order(rem, K - r, weight_add(a.weight, b.weight))
        orders[r] = sym
        if not sym.body.is_zero():
            rem = rem - quantization_map(sym, conn, src)
    if not rem.is_zero():
        raise StarExtractionError("nonzero residue after star extraction")
    return StarExpansion(n, a.k, b.k, orders)


def c1_cochain(a: SymTensorField, conn: AffineConnection) -> SymTensorField:
    """Divergence cochain whose coboundary produces the first-order defect."""
    k = a.k
    if k == 0:
        return SymTensorField(a.n, 0, a.weight, Poly.zero())
    return divergence_tensor(a, conn).scaled(Fraction(k, a.n + 2 * k - 1))


def c1_coboundary(a: SymTensorField, b: SymTensorField, conn: AffineConnection) -> SymTensorField:
    """Coboundary of the divergence cochain on a pair of symbols.

    Sign convention: the defect of the cochain on a product,
    C1(a b) - a C1(b) - C1(a) b.  This is the orientation under which the
    coboundary reproduces the first-order star defect with a plus sign.
    """
    first = sym_product(a, c1_cochain(b, conn))
    middle = c1_cochain(sym_product(a, b), conn)
    last = sym_product(c1_cochain(a, conn), b)
    body = middle.body - first.body - last.body
    return SymTensorField(a.n, a.k + b.k - 1, weight_add(a.weight, b.weight), body)


def star_infinity(a: SymTensorField, b: SymTensorField, conn: AffineConnection) -> Dict[int, SymTensorField]:
    """Commutative limit product: coefficient of c^r for r = 0..k+l."""
    if a.weight != Fraction(0) or b.weight != Fraction(0):
        raise ValueError("limit product acts on weight-zero symbols")
    K = a.k + b.k
    n = a.n
    out: Dict[int, SymTensorField] = {0: sym_product(a, b)}
    for r in range(1, K + 1):
        coeff = binomial(K, r) / (binomial(n + 2 * K - r, r) * factorial(r))
        out[r] = l_beta([a, b], K - r, conn).scaled(coeff)
    return out


def mu_leading_limit(expansion: StarExpansion) -> Dict[int, SymTensorField]:
    """Coefficient of mu^r in each B_r: the t -> 0 limit of the rescaled family."""
    out: Dict[int, SymTensorField] = {0: expansion.coefficient(0)}
    for r in range(1, expansion.k + expansion.l + 1):
        sym = expansion.coefficient(r)
        body = sym.body.coefficient_of(MUVAR, r)
        out[r] = SymTensorField(expansion.n, sym.k, sym.weight, body)
    return out


def gauge_transform(
    conn1: AffineConnection,
    conn2: AffineConnection,
    a: SymTensorField,
    mu: Optional[Weight] = None,
) -> List[SymTensorField]:
    """Graded components D_r(a) of the symbol-level intertwiner.

    Quantize with the first structure, take symbols with the second;
    entry r has valence k - r and D_0 = a.
    """
    src: Weight = MU if mu is None else mu
    op = quantization_map(a, conn1, src)
    syms = symbol_map(op, conn2, weight=a.weight)
    return syms


def derivation_check(
    X: SymTensorField,
    a: SymTensorField,
    conn: AffineConnection,
    mu: Optional[Weight] = None,
) -> Dict[str, bool]:
    """Check the star commutator of a vector field against the Poisson bracket.

    The first-order part always agrees; all higher commutator terms vanish
    exactly when the field generates an automorphism of the structure.
    """
    if X.k != 1:
        raise ValueError("first argument must be a vector field")
    if mu is None:
        mu = Fraction(-(conn.n + 1), 2)
    s1 = star_product(X, a, conn, mu)
    s2 = star_product(a, X, conn, mu)
    bracket = schouten_bracket(X, a, conn)
    adapted = (s1.coefficient(1).body - s2.coefficient(1).body) == bracket.body
    higher = all(
        (s1.coefficient(r).body - s2.coefficient(r).body).is_zero()
        for r in range(2, a.k + 2)
    )
    projective = is_projective_vector_field(X, conn)
    return {
        "adapted": adapted,
        "higher_orders_vanish": higher,
        "projective_field": projective,
        "inner_derivation": adapted and higher,
    }
