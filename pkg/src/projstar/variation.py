"""First-order scale variation: exact invariance checks for weighted slots.

A change of scale by exp(t psi) moves the representative connection by the
closed one-form t d(psi), rescales the components of a weight-lam object by
exp(t lam psi), and mixes ambient components through the change of
horizontal lift.  Everything here works to first order in t, where all
quantities stay polynomial, so invariance of an operator on weighted data
becomes an exact identity between t-coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, List, Sequence

from .ring import Poly, T, TVAR, Weight, total_x_diff, weight_poly, zvar
from .geometry import AffineConnection, DensityField, SymTensorField, projective_change
from .ambient import AmbientSymTensor


def varied_connection(conn: AffineConnection, psi: Poly) -> AffineConnection:
    """Representative moved by the closed one-form t d(psi)."""
    gamma = [T * total_x_diff(psi, i) for i in range(1, conn.n + 1)]
    return projective_change(conn, gamma)


def varied_field(a: SymTensorField, psi: Poly) -> SymTensorField:
    """Components rescaled to first order: (1 + t lam psi) a."""
    factor = Poly.const(1) + T * weight_poly(a.weight) * psi
    return SymTensorField(a.n, a.k, a.weight, factor * a.body)


def varied_density(f: DensityField, psi: Poly) -> DensityField:
    factor = Poly.const(1) + T * weight_poly(f.weight) * psi
    return DensityField(f.n, f.weight, factor * f.comp)


def t_coefficient(p: Poly) -> Poly:
    return p.coefficient_of(TVAR, 1)


def expected_variation_base(body: Poly, weight: Weight, psi: Poly) -> Poly:
    """First-order change of a base tensor's components: pure density scaling."""
    return weight_poly(weight) * psi * body


def expected_variation_ambient(body: Poly, weight: Weight, psi: Poly, n: int) -> Poly:
    """First-order change of ambient components under the new horizontal lift.

    The valence-m piece acquires, besides the density scaling, the slot
    contraction of the valence-(m+1) piece with d(psi); on bodies this is
    lam psi - w * dpsi_p d/dz_p.
    """
    out = weight_poly(weight) * psi * body
    w = Poly.variable(("w",))
    for p in range(1, n + 1):
        dz = body.diff(zvar(p))
        if not dz.is_zero():
            out = out - w * total_x_diff(psi, p) * dz
    return out


def base_operator_is_invariant(
    value_flat: Poly,
    value_varied: Poly,
    out_weight: Weight,
    psi: Poly,
) -> bool:
    """Check that an operator's output transforms purely by its output weight."""
    return t_coefficient(value_varied) == expected_variation_base(value_flat, out_weight, psi)


def ambient_is_invariant(
    flat: AmbientSymTensor,
    varied: AmbientSymTensor,
    psi: Poly,
) -> bool:
    got = t_coefficient(varied.body)
    want = expected_variation_ambient(flat.body, flat.weight, psi, flat.n)
    return got == want
