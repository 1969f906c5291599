"""One-dimensional specialization: Rankin-Cohen brackets and their relatives.

Weighted functions in one variable are polynomials with D = d/dx in the
flat scale; the dictionary with the tensor engine views a weight-sigma
function as a symmetric k-tensor of projective weight sigma - 2k.  All the
classical bilinear and multilinear brackets here are universal polynomial
identities, so polynomial instances of high enough degree verify them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .ring import (
    Poly,
    binomial,
    falling_factorial,
    multinomial,
    poly_z,
    total_x_diff,
)
from .geometry import (
    AffineConnection,
    ExcludedWeightError,
    SymTensorField,
    flat_connection,
)
from .multilinear import l_beta
from .starprod import StarExpansion, star_product


@dataclass(frozen=True)
class WeightedFunction1D:
    """Polynomial section of density weight sigma on the line."""

    sigma: Fraction
    u: Poly

    def __post_init__(self):
        if self.u.degree_of_kind("z", "w", "mu", "jet"):
            raise ValueError("expected a polynomial in x1 only")


def D(u: Poly, m: int = 1) -> Poly:
    for _ in range(m):
        u = total_x_diff(u, 1)
    return u


def to_tensor(f: WeightedFunction1D, k: int) -> SymTensorField:
    """View a weight-sigma function as a valence-k tensor of weight sigma - 2k."""
    return SymTensorField(1, k, f.sigma - 2 * k, f.u * poly_z(1) ** k)


def from_tensor(a: SymTensorField) -> WeightedFunction1D:
    """Inverse dictionary: read off the single component."""
    if a.n != 1:
        raise ValueError("one-dimensional fields only")
    comp = a.body
    for _ in range(a.k):
        comp = comp.diff(("z", 1))
    from math import factorial

    weight = a.weight if isinstance(a.weight, Fraction) else a.weight.as_fraction()
    return WeightedFunction1D(weight + 2 * a.k, comp / Fraction(factorial(a.k)))


def lift_1d(f: WeightedFunction1D, k: int) -> List[Poly]:
    """Component list of the invariant lift of a weight-sigma function.

    Component m (valence k - m Euler paddings ... valence index m) equals
    (-1)^(k-m) binom(k, k-m) / (sigma)_(k-m) times D^(k-m) u; the weight
    sigma must avoid {0, 1, ..., k-1}.
    """
    sigma = f.sigma
    if sigma in [Fraction(j) for j in range(k)]:
        raise ExcludedWeightError(
            "weight %s is excluded for valence %d on the line (excluded set 0..%d)" % (sigma, k, k - 1)
        )
    comps = []
    for m in range(k + 1):
        j = k - m
        coeff = Fraction((-1) ** j) * binomial(k, j) / falling_factorial(sigma, j)
        comps.append(D(f.u, j) * coeff)
    return comps


def rc_bracket(u1: WeightedFunction1D, u2: WeightedFunction1D, k: int) -> WeightedFunction1D:
    """Classical bilinear bracket of weighted functions, output weight drops by 2k."""
    s1, s2 = u1.sigma, u2.sigma
    total = Poly.zero()
    for m in range(k + 1):
        c = Fraction((-1) ** m) * binomial(k - 1 - s2, m) * binomial(k - 1 - s1, k - m)
        if c:
            total = total + c * D(u1.u, m) * D(u2.u, k - m)
    return WeightedFunction1D(s1 + s2 - 2 * k, total)


def rc_multilinear(
    us: Sequence[WeightedFunction1D],
    ks: Sequence[int],
) -> WeightedFunction1D:
    """Fully contracted multilinear bracket via the closed quadruple sum.

    Normalized so that it matches the engine's order-K operator after the
    one-dimensional dictionary (the beta = 0 slice).
    """
    p = len(us)
    if len(ks) != p:
        raise ValueError("need one valence per argument")
    sigmas = [u.sigma for u in us]
    K = sum(ks)
    Sigma = sum(sigmas, Fraction(0))
    pref = Fraction((-1) ** K)
    for s, k in zip(sigmas, ks):
        b = binomial(s, k)
        if b == 0:
            raise ExcludedWeightError("weight %s excluded at valence %d on the line" % (s, k))
        pref *= b
    total = Poly.zero()
    from itertools import product as iproduct

    for ms in iproduct(*[range(k + 1) for k in ks]):
        M = sum(ms)
        coeff = multinomial(list(ms)) * binomial(Sigma - K + 1, M)
        for s, k, m in zip(sigmas, ks, ms):
            coeff *= binomial(k - 1 - s, k - m)
        if not coeff:
            continue
        prod = Poly.const(1)
        for u, m in zip(us, ms):
            prod = prod * D(u.u, m)
        total = total + coeff * D(prod, K - M)
    return WeightedFunction1D(Sigma - 2 * K, total / pref)


def rc_via_engine(
    us: Sequence[WeightedFunction1D],
    ks: Sequence[int],
    beta: int = 0,
    conn: Optional[AffineConnection] = None,
) -> WeightedFunction1D:
    """The same multilinear pairing computed by the tensor engine at n = 1."""
    if conn is None:
        conn = flat_connection(1)
    args = [to_tensor(u, k) for u, k in zip(us, ks)]
    return from_tensor(l_beta(args, beta, conn))


# ---------------------------------------------------------------------------
# the noncommutative and limiting multiplications on weighted functions


def t_mu(r: int, k1: Fraction, k2: Fraction, mu: Fraction) -> Fraction:
    """Coefficient of the r-th bracket in the weight-parametrized multiplication."""
    acc = Fraction(0)
    for j in range(r + 1):
        num = (
            binomial(r, j)
            * binomial(Fraction(-1, 2), j)
            * binomial(Fraction(-3, 2) - mu, j)
            * binomial(Fraction(1, 2) + mu, j)
        )
        den = (
            binomial(k1 - Fraction(1, 2), j)
            * binomial(k2 - Fraction(1, 2), j)
            * binomial(r - k1 - k2 - Fraction(3, 2), j)
        )
        if den == 0:
            raise ZeroDivisionError("vanishing denominator in series coefficient (j=%d)" % j)
        acc += num / den
    return Fraction(-1, 4) ** r * acc


def t_infinity(two_r: int, k1: Fraction, k2: Fraction) -> Fraction:
    """Even-order coefficient of the limiting commutative multiplication.

    Carries the 4^(-r) prefactor that makes the specialization of the limit
    star product at parameter 2i reproduce the limiting multiplication; see
    the correspondence tests, which pin this normalization exactly.
    """
    if two_r % 2:
        raise ValueError("defined for even orders only")
    r = two_r // 2
    num = falling_factorial(Fraction(-1, 2), r)
    den = (
        falling_factorial(r - k1 - Fraction(1, 2), r)
        * falling_factorial(r - k2 - Fraction(1, 2), r)
        * falling_factorial(2 * r - k1 - k2 - Fraction(3, 2), r)
    )
    if den == 0:
        raise ZeroDivisionError("vanishing denominator in limiting coefficient")
    return Fraction(1, 4) ** r * num / den


def cmz_mu_product(
    u1: WeightedFunction1D,
    u2: WeightedFunction1D,
    mu: Fraction,
    truncation: int,
) -> Tuple[WeightedFunction1D, Dict[int, Fraction]]:
    """Associative multiplication of even-weight functions, truncated.

    Returns the truncated sum and the bracket coefficients used; the
    arguments are taken to have weights 2 k_i.
    """
    k1 = u1.sigma / 2
    k2 = u2.sigma / 2
    coeffs: Dict[int, Fraction] = {}
    total = u1.u * u2.u
    for r in range(1, truncation + 1):
        tr = t_mu(r, k1, k2, mu)
        coeffs[r] = tr
        if tr:
            total = total + tr * rc_bracket(u1, u2, r).u
    return WeightedFunction1D(u1.sigma + u2.sigma, total), coeffs


def cmz_mu_graded(
    u1: WeightedFunction1D,
    u2: WeightedFunction1D,
    mu: Fraction,
    truncation: int,
) -> Dict[int, WeightedFunction1D]:
    """The multiplication kept graded by bracket order.

    Each bracket order lands in its own weight (dropping by two per order),
    which is what iterated products need: the series coefficients of the
    second multiplication depend on the weight of each graded piece.
    """
    k1 = u1.sigma / 2
    k2 = u2.sigma / 2
    out: Dict[int, WeightedFunction1D] = {0: WeightedFunction1D(u1.sigma + u2.sigma, u1.u * u2.u)}
    for r in range(1, truncation + 1):
        tr = t_mu(r, k1, k2, mu)
        if tr:
            out[r] = WeightedFunction1D(u1.sigma + u2.sigma - 2 * r, tr * rc_bracket(u1, u2, r).u)
    return out


def cmz_mu_graded_family(
    family: Dict[int, WeightedFunction1D],
    u: WeightedFunction1D,
    mu: Fraction,
    truncation: int,
    reverse: bool = False,
) -> Dict[int, WeightedFunction1D]:
    """Multiply a graded family by one more function, piece by piece."""
    out: Dict[int, WeightedFunction1D] = {}
    for r0, piece in family.items():
        prod = cmz_mu_graded(u, piece, mu, truncation) if reverse else cmz_mu_graded(piece, u, mu, truncation)
        for r1, term in prod.items():
            total = r0 + r1
            if total > truncation:
                continue
            prev = out.get(total)
            if prev is None:
                out[total] = term
            else:
                out[total] = WeightedFunction1D(prev.sigma, prev.u + term.u)
    return out


def cmz_infinity_product(
    u1: WeightedFunction1D,
    u2: WeightedFunction1D,
    truncation: int,
) -> Tuple[WeightedFunction1D, Dict[int, Fraction]]:
    """Limiting commutative multiplication: even brackets only."""
    k1 = u1.sigma / 2
    k2 = u2.sigma / 2
    coeffs: Dict[int, Fraction] = {}
    total = u1.u * u2.u
    for two_r in range(2, truncation + 1, 2):
        t = t_infinity(two_r, k1, k2)
        coeffs[two_r] = t
        if t:
            total = total + t * rc_bracket(u1, u2, two_r).u
    return WeightedFunction1D(u1.sigma + u2.sigma, total), coeffs


def star_one_dim(
    u1: WeightedFunction1D,
    u2: WeightedFunction1D,
    mu: Fraction,
    k: int,
) -> Dict[int, WeightedFunction1D]:
    """Closed-form expansion of the line star product of u1 (weight 2k) with
    u2 (weight 0); order s carries the bracket of order s."""
    if u1.sigma != Fraction(2 * k) or u2.sigma != Fraction(0):
        raise ExcludedWeightError("closed form needs weights (2k, 0)")
    out: Dict[int, WeightedFunction1D] = {0: WeightedFunction1D(Fraction(2 * k), u1.u * u2.u)}
    for s in range(1, k + 1):
        c = (
            Fraction((-1) ** s)
            * binomial(k, s)
            * binomial(Fraction(k) + mu + 1, s)
            / (binomial(2 * k, s) * binomial(2 * k + 1 - s, s))
        )
        out[s] = WeightedFunction1D(Fraction(2 * k - 2 * s), c * rc_bracket(u1, u2, s).u)
    return out


def star_one_dim_engine(
    u1: WeightedFunction1D,
    u2: WeightedFunction1D,
    mu,
    k: int,
) -> Dict[int, WeightedFunction1D]:
    """The same expansion from the full engine specialized to the line."""
    conn = flat_connection(1)
    a = to_tensor(u1, k)
    b = to_tensor(u2, 0)
    exp = star_product(a, b, conn, mu)
    out: Dict[int, WeightedFunction1D] = {}
    for r in range(0, k + 1):
        out[r] = from_tensor(exp.coefficient(r))
    return out


def star_infinity_one_dim(
    u1: WeightedFunction1D,
    u2: WeightedFunction1D,
    k: int,
) -> Dict[int, WeightedFunction1D]:
    """Limit product on the line through the tensor engine (coefficients of c^r)."""
    from .starprod import star_infinity

    conn = flat_connection(1)
    a = to_tensor(u1, k)
    b = to_tensor(u2, 0)
    out = star_infinity(a, b, conn)
    return {r: from_tensor(sym) for r, sym in out.items()}


def infinity_correspondence(
    u1: WeightedFunction1D,
    u2: WeightedFunction1D,
    k: int,
    q: Fraction,
    truncation: Optional[int] = None,
) -> Dict[str, object]:
    """Compare the limit product at the imaginary parameter q*i with the
    limiting multiplication of weighted functions.

    Returns the real and imaginary parts of the specialization and the
    reference product; the caller asserts which q makes them agree.
    """
    series = star_infinity_one_dim(u1, u2, k)
    R = truncation if truncation is not None else k
    real = u1.u * u2.u
    imag = Poly.zero()
    for r in range(1, R + 1):
        term = series.get(r)
        if term is None:
            continue
        # (q i)^r: even r real with sign (-1)^(r/2), odd r imaginary
        if r % 2 == 0:
            real = real + Fraction((-1) ** (r // 2)) * q ** r * term.u
        else:
            imag = imag + Fraction((-1) ** ((r - 1) // 2)) * q ** r * term.u
    reference, tcoeffs = cmz_infinity_product(u1, u2, R)
    return {
        "real": real,
        "imag": imag,
        "reference": reference.u,
        "matches": real == reference.u,
        "t_coefficients": tcoeffs,
    }
