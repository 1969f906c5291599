"""Tensor calculus on a polynomial coordinate chart.

Weighted symmetric k-vector fields are stored as fiber polynomials: the
tensor a^{i1...ik} corresponds to the z-homogeneous polynomial
a^{i1...ik} z_{i1} ... z_{ik}, so the symmetric product is plain polynomial
multiplication and components are recovered by z-derivatives.

Connections are torsion-free and given by polynomial Christoffel symbols.
Only representatives with symmetric Ricci tensor are accepted: these are
exactly the connections preserving some volume, and for them the covariant
derivative of a trivialized density component is the plain partial
derivative.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .ring import (
    MUVAR,
    Poly,
    Rat,
    Weight,
    as_weight,
    multinomial,
    poly_z,
    total_x_diff,
    var_key,
    weight_add,
    weight_poly,
    xvar,
    zvar,
)


class NonSymmetricRicciError(ValueError):
    """The connection does not preserve any volume in the working scale."""


class ExcludedWeightError(ValueError):
    """A weight hit the excluded set where the invariant lift fails."""


def _idx_range(n: int):
    return range(1, n + 1)


# ---------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class SymTensorField:
    """Weighted symmetric k-vector field on the chart.

    body is homogeneous of degree k in the z variables; the projective
    weight lives on the field, not in the polynomial.
    """

    n: int
    k: int
    weight: Weight
    body: Poly

    def __post_init__(self):
        parts = self.body.graded_parts("z", "w")
        for d, p in parts.items():
            if p and d != self.k:
                raise ValueError("body not homogeneous of fiber degree %d" % self.k)
        if self.body.degree_of_kind("w"):
            raise ValueError("base tensor field must not involve w")

    def component(self, idx: Sequence[int]) -> Poly:
        """Component a^{i1...ik}; idx is a tuple of 1-based direction indices."""
        if len(idx) != self.k:
            raise ValueError("need %d indices" % self.k)
        counts = [0] * self.n
        for i in idx:
            counts[i - 1] += 1
        mono = self.body
        for i, c in enumerate(counts):
            for _ in range(c):
                mono = mono.diff(zvar(i + 1))
        from math import factorial

        return mono / Fraction(factorial(self.k))

    def __mul__(self, other: "SymTensorField") -> "SymTensorField":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return SymTensorField(
            self.n,
            self.k + other.k,
            weight_add(self.weight, other.weight),
            self.body * other.body,
        )

    def scaled(self, c) -> "SymTensorField":
        return SymTensorField(self.n, self.k, self.weight, self.body * c)


def sym_product(a: SymTensorField, b: SymTensorField) -> SymTensorField:
    return a * b


def tensor_from_components(n: int, k: int, weight, comps: Dict[Tuple[int, ...], Poly]) -> SymTensorField:
    """Build a field from components keyed by sorted index tuples."""
    body = Poly.zero()
    for idx, val in comps.items():
        if len(idx) != k:
            raise ValueError("index tuple of wrong length")
        counts = [0] * n
        mono = Poly.const(multinomial_of(idx, n))
        for i in idx:
            counts[i - 1] += 1
        for i, c in enumerate(counts):
            if c:
                mono = mono * poly_z(i + 1) ** c
        body = body + mono * val
    return SymTensorField(n, k, as_weight(weight), body)


def multinomial_of(idx: Sequence[int], n: int) -> int:
    counts = [0] * n
    for i in idx:
        counts[i - 1] += 1
    return multinomial([c for c in counts if c])


@dataclass(frozen=True)
class DensityField:
    """Projective density in the working scale: one component function."""

    n: int
    weight: Weight
    comp: Poly

    def as_symbol(self) -> SymTensorField:
        """View as a valence-0 symmetric tensor."""
        return SymTensorField(self.n, 0, self.weight, self.comp)


# ---------------------------------------------------------------------------
# connections and curvature


class AffineConnection:
    """Torsion-free connection with polynomial Christoffel symbols.

    Construction validates that the derived Ricci tensor is symmetric and
    caches all curvature data.
    """

    def __init__(self, n: int, gamma: Optional[Dict[Tuple[int, int, int], Poly]] = None):
        if n < 1:
            raise ValueError("dimension must be at least 1")
        self.n = n
        table: Dict[Tuple[int, int, int], Poly] = {}
        for (i, j, k), p in (gamma or {}).items():
            if not (1 <= i <= n and 1 <= j <= n and 1 <= k <= n):
                raise ValueError("Christoffel index out of range")
            if not isinstance(p, Poly):
                raise TypeError("Christoffel entries must be polynomials")
            if p.degree_of_kind("z", "w", "mu", "jet"):
                raise ValueError("Christoffel entries must depend on x (and t) only")
            key = (i, j, k)
            prev = table.get(key)
            table[key] = p if prev is None else prev + p
        # enforce symmetry in the first two slots
        for (i, j, k), p in list(table.items()):
            q = table.get((j, i, k), Poly.zero())
            if p != q:
                raise ValueError("Christoffel symbols not symmetric in (i, j)")
        self._gamma = {key: p for key, p in table.items() if p}
        if n == 1 and self._gamma:
            raise ValueError("one-dimensional connections must be flat here")
        self._curv: Optional[CurvatureData] = None
        self.curvature()  # reject non-symmetric Ricci eagerly

    def gamma(self, i: int, j: int, k: int) -> Poly:
        return self._gamma.get((i, j, k), Poly.zero())

    def gamma_items(self):
        return self._gamma.items()

    @property
    def is_flat_table(self) -> bool:
        return not self._gamma

    def curvature(self) -> "CurvatureData":
        if self._curv is None:
            self._curv = CurvatureData._compute(self)
        return self._curv

    def __eq__(self, other):
        return isinstance(other, AffineConnection) and self.n == other.n and self._gamma == other._gamma

    def __repr__(self):
        return "AffineConnection(n=%d, %d nonzero symbols)" % (self.n, len(self._gamma))


def flat_connection(n: int) -> AffineConnection:
    return AffineConnection(n, {})


def projective_change(conn: AffineConnection, gamma_cov: Sequence[Poly]) -> AffineConnection:
    """Representative with the same geodesics: Gamma + gamma_i d_j^k + gamma_j d_i^k."""
    n = conn.n
    if len(gamma_cov) != n:
        raise ValueError("need %d covector components" % n)
    table: Dict[Tuple[int, int, int], Poly] = dict(conn.gamma_items())
    for i in _idx_range(n):
        for j in _idx_range(n):
            for k in _idx_range(n):
                extra = Poly.zero()
                if j == k:
                    extra = extra + gamma_cov[i - 1]
                if i == k:
                    extra = extra + gamma_cov[j - 1]
                if extra:
                    table[(i, j, k)] = table.get((i, j, k), Poly.zero()) + extra
    return AffineConnection(n, table)


@dataclass(frozen=True)
class CurvatureData:
    """Curvature tensors derived from a connection; never set directly.

    Convention: 2 nabla_[i nabla_j] alpha_k = -R_ijk^p alpha_p, Ric_ij =
    R_ipj^p, (n-1) P_ij = Ric_ij for the accepted (symmetric-Ricci)
    representatives, B_ijk^l = R_ijk^l + d_i^l P_jk - d_j^l P_ik and
    C_ijk = nabla_i P_jk - nabla_j P_ik.
    """

    n: int
    riemann: Dict[Tuple[int, int, int, int], Poly]
    ricci: Dict[Tuple[int, int], Poly]
    schouten: Dict[Tuple[int, int], Poly]
    weyl: Dict[Tuple[int, int, int, int], Poly]
    cotton: Dict[Tuple[int, int, int], Poly]

    def R(self, i, j, k, l) -> Poly:
        return self.riemann.get((i, j, k, l), Poly.zero())

    def ric(self, i, j) -> Poly:
        return self.ricci.get((i, j), Poly.zero())

    def P(self, i, j) -> Poly:
        return self.schouten.get((i, j), Poly.zero())

    def B(self, i, j, k, l) -> Poly:
        return self.weyl.get((i, j, k, l), Poly.zero())

    def C(self, i, j, k) -> Poly:
        return self.cotton.get((i, j, k), Poly.zero())

    @property
    def is_flat(self) -> bool:
        return not self.riemann

    @property
    def is_ricci_flat(self) -> bool:
        return not self.ricci

    @staticmethod
    def _compute(conn: AffineConnection) -> "CurvatureData":
        n = conn.n
        rng = list(_idx_range(n))
        riemann: Dict[Tuple[int, int, int, int], Poly] = {}
        for i, j, k, l in itertools.product(rng, repeat=4):
            if i >= j:
                continue  # antisymmetry in (i, j); store i < j and derive
            val = total_x_diff(conn.gamma(j, k, l), i) - total_x_diff(conn.gamma(i, k, l), j)
            for p in rng:
                val = val + conn.gamma(j, k, p) * conn.gamma(i, p, l)
                val = val - conn.gamma(i, k, p) * conn.gamma(j, p, l)
            if val:
                riemann[(i, j, k, l)] = val
                riemann[(j, i, k, l)] = -val
        ricci: Dict[Tuple[int, int], Poly] = {}
        for i, j in itertools.product(rng, repeat=2):
            val = Poly.zero()
            for p in rng:
                val = val + riemann.get((i, p, j, p), Poly.zero())
            if val:
                ricci[(i, j)] = val
        for i in rng:
            for j in rng:
                if i < j and ricci.get((i, j), Poly.zero()) != ricci.get((j, i), Poly.zero()):
                    raise NonSymmetricRicciError(
                        "Ricci tensor is not symmetric (entry %d,%d); the connection "
                        "preserves no volume in this scale" % (i, j)
                    )
        if n == 1:
            schouten: Dict[Tuple[int, int], Poly] = {}
        else:
            schouten = {
                key: val / Fraction(n - 1) for key, val in ricci.items()
            }

        def P(i, j):
            return schouten.get((i, j), Poly.zero())

        weyl: Dict[Tuple[int, int, int, int], Poly] = {}
        for (i, j, k, l), val in riemann.items():
            w = val
            if i == l:
                w = w + P(j, k)
            if j == l:
                w = w - P(i, k)
            if w:
                weyl[(i, j, k, l)] = w
        for i, j, k, l in itertools.product(rng, repeat=4):
            if (i, j, k, l) in riemann or i == j:
                continue
            w = Poly.zero()
            if i == l:
                w = w + P(j, k)
            if j == l:
                w = w - P(i, k)
            if w:
                weyl[(i, j, k, l)] = w
        cotton: Dict[Tuple[int, int, int], Poly] = {}
        for i, j, k in itertools.product(rng, repeat=3):
            if i >= j:
                continue
            val = _cov_deriv_P(conn, schouten, i, j, k) - _cov_deriv_P(conn, schouten, j, i, k)
            if val:
                cotton[(i, j, k)] = val
                cotton[(j, i, k)] = -val
        return CurvatureData(n, riemann, ricci, schouten, weyl, cotton)


def _cov_deriv_P(conn: AffineConnection, P: Dict[Tuple[int, int], Poly], i: int, j: int, k: int) -> Poly:
    val = total_x_diff(P.get((j, k), Poly.zero()), i)
    for p in _idx_range(conn.n):
        val = val - conn.gamma(i, j, p) * P.get((p, k), Poly.zero())
        val = val - conn.gamma(i, k, p) * P.get((j, p), Poly.zero())
    return val


# ---------------------------------------------------------------------------
# covariant calculus on fiber polynomials


def nabla_body(body: Poly, conn: AffineConnection, i: int) -> Poly:
    """i-th covariant derivative of a contravariant symmetric body."""
    out = total_x_diff(body, i)
    for p in _idx_range(conn.n):
        dz = body.diff(zvar(p))
        if dz.is_zero():
            continue
        for j in _idx_range(conn.n):
            g = conn.gamma(i, p, j)
            if g:
                out = out + g * poly_z(j) * dz
    return out


def covariant_derivative(a: SymTensorField, conn: AffineConnection) -> List[Poly]:
    """One covariant slot added: entry i is the body of nabla_i a."""
    if a.n != conn.n:
        raise ValueError("dimension mismatch")
    return [nabla_body(a.body, conn, i) for i in _idx_range(conn.n)]


def divergence_operator(body: Poly, conn: AffineConnection) -> Poly:
    """The second-order divergence operator on fiberwise polynomials.

    On the polynomial of a symmetric k-vector a it returns k times the
    polynomial of nabla_p a^{...p}.
    """
    n = conn.n
    out = Poly.zero()
    for i in _idx_range(n):
        dz = body.diff(zvar(i))
        if not dz.is_zero():
            out = out + total_x_diff(dz, i)
    for i in _idx_range(n):
        for j in _idx_range(n):
            second = body.diff(zvar(i)).diff(zvar(j))
            if second.is_zero():
                continue
            for k in _idx_range(n):
                g = conn.gamma(i, j, k)
                if g:
                    out = out + g * poly_z(k) * second
    for i in _idx_range(n):
        trace = Poly.zero()
        for p in _idx_range(n):
            trace = trace + conn.gamma(i, p, p)
        if trace:
            out = out + trace * body.diff(zvar(i))
    return out


def divergence_tensor(a: SymTensorField, conn: AffineConnection) -> SymTensorField:
    """nabla_p a^{i1...i(k-1) p} as a field of valence k-1."""
    if a.k == 0:
        raise ValueError("cannot take the divergence of a scalar")
    return SymTensorField(a.n, a.k - 1, a.weight, divergence_operator(a.body, conn) / Fraction(a.k))


def schouten_bracket(a: SymTensorField, b: SymTensorField, conn: Optional[AffineConnection] = None) -> SymTensorField:
    """Symmetric Schouten bracket of weight-zero fields.

    Computed through a connection when one is given; with the flat chart
    connection this is the coordinate Poisson bracket.  The result does not
    depend on the choice.
    """
    if a.weight != Fraction(0) or b.weight != Fraction(0):
        raise ValueError("schouten bracket requires weight-0 fields; use the weighted pairing")
    if conn is None:
        conn = flat_connection(a.n)
    body = Poly.zero()
    for p in _idx_range(a.n):
        da = a.body.diff(zvar(p))
        db = b.body.diff(zvar(p))
        if not da.is_zero():
            body = body + da * nabla_body(b.body, conn, p)
        if not db.is_zero():
            body = body - db * nabla_body(a.body, conn, p)
    k = a.k + b.k - 1
    if body.is_zero():
        k = max(k, 0)
    return SymTensorField(a.n, k, Fraction(0), body)


def coordinate_poisson(a: Poly, b: Poly, n: int) -> Poly:
    out = Poly.zero()
    for i in _idx_range(n):
        out = out + a.diff(zvar(i)) * total_x_diff(b, i) - b.diff(zvar(i)) * total_x_diff(a, i)
    return out


# ---------------------------------------------------------------------------
# index-array helpers (used for curvature identities)


Array = Dict[Tuple[int, ...], Poly]


def cov_deriv_array(arr: Array, sig: str, conn: AffineConnection) -> Array:
    """Covariant derivative of a component array; the new slot comes first.

    sig marks each existing slot 'u' (contravariant) or 'd' (covariant).
    """
    n = conn.n
    out: Array = {}
    rng = list(_idx_range(n))
    slots = len(sig)
    for idx in itertools.product(rng, repeat=slots):
        base = arr.get(idx, Poly.zero())
        for i in rng:
            val = total_x_diff(base, i)
            for s in range(slots):
                for p in rng:
                    swapped = idx[:s] + (p,) + idx[s + 1:]
                    entry = arr.get(swapped, Poly.zero())
                    if entry.is_zero():
                        continue
                    if sig[s] == "u":
                        val = val + conn.gamma(i, p, idx[s]) * entry
                    else:
                        val = val - conn.gamma(i, idx[s], p) * entry
            if val:
                out[(i,) + idx] = val
    return out


def bianchi_check(conn: AffineConnection) -> Dict[str, bool]:
    """Verify the curvature identities as exact polynomial identities."""
    n = conn.n
    curv = conn.curvature()
    rng = list(_idx_range(n))
    gradB = cov_deriv_array(curv.weyl, "dddu", conn)
    gradP = cov_deriv_array(curv.schouten, "dd", conn)
    ok_first = True
    for i, j, k, l, p in itertools.product(rng, repeat=5):
        lhs = (
            gradB.get((i, j, k, l, p), Poly.zero())
            + gradB.get((j, k, i, l, p), Poly.zero())
            + gradB.get((k, i, j, l, p), Poly.zero())
        )
        rhs = Poly.zero()
        if p == i:
            rhs = rhs - curv.C(j, k, l)
        if p == j:
            rhs = rhs - curv.C(k, i, l)
        if p == k:
            rhs = rhs - curv.C(i, j, l)
        if lhs != rhs:
            ok_first = False
            break
    ok_second = True
    gradBfull = gradB
    for i, j, k in itertools.product(rng, repeat=3):
        div = Poly.zero()
        for p in rng:
            div = div + gradBfull.get((p, i, j, k, p), Poly.zero())
        if div != curv.C(i, j, k) * Fraction(2 - n):
            ok_second = False
            break
    ok_third = True
    for i, j, k in itertools.product(rng, repeat=3):
        tot = (
            gradP.get((i, j, k), Poly.zero())
            + gradP.get((j, k, i), Poly.zero())
            + gradP.get((k, i, j), Poly.zero())
            - gradP.get((j, i, k), Poly.zero())
            - gradP.get((i, k, j), Poly.zero())
            - gradP.get((k, j, i), Poly.zero())
        )
        if not tot.is_zero():
            ok_third = False
            break
    return {
        "weyl-divergence-cotton": ok_second,
        "skew-weyl-gradient": ok_first,
        "closed-schouten": ok_third,
    }


# ---------------------------------------------------------------------------
# projective Lie derivative of a structure along a vector field


def lie_derivative_connection(X: SymTensorField, conn: AffineConnection) -> Array:
    """Lie derivative of the Christoffel table along a vector field."""
    if X.k != 1:
        raise ValueError("need a vector field")
    n = conn.n
    rng = list(_idx_range(n))
    comps = {i: X.component((i,)) for i in rng}
    out: Array = {}
    for i, j, k in itertools.product(rng, repeat=3):
        val = total_x_diff(total_x_diff(comps[k], j), i)
        for p in rng:
            val = val + comps[p] * total_x_diff(conn.gamma(i, j, k), p)
            val = val + conn.gamma(p, j, k) * total_x_diff(comps[p], i)
            val = val + conn.gamma(i, p, k) * total_x_diff(comps[p], j)
            val = val - conn.gamma(i, j, p) * total_x_diff(comps[k], p)
        if val:
            out[(i, j, k)] = val
    return out


def trace_free_part(arr: Array, n: int) -> Array:
    """Trace-free projection of a tensor symmetric in its two lower slots."""
    rng = list(_idx_range(n))
    traces = {}
    for j in rng:
        t = Poly.zero()
        for p in rng:
            t = t + arr.get((j, p, p), Poly.zero())
        traces[j] = t
    out: Array = {}
    c = Fraction(1, n + 1)
    for i, j, k in itertools.product(rng, repeat=3):
        val = arr.get((i, j, k), Poly.zero())
        if k == i:
            val = val - c * traces[j]
        if k == j:
            val = val - c * traces[i]
        if val:
            out[(i, j, k)] = val
    return out


def is_projective_vector_field(X: SymTensorField, conn: AffineConnection) -> bool:
    return not trace_free_part(lie_derivative_connection(X, conn), conn.n)
