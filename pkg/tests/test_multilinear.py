import random
from fractions import Fraction

import pytest

from projstar.ambient import contract_full, generic_density, invariant_lift
from projstar.geometry import (
    DensityField,
    ExcludedWeightError,
    SymTensorField,
    covariant_derivative,
    divergence_tensor,
    flat_connection,
    nabla_body,
    schouten_bracket,
    sym_product,
)
from projstar.multilinear import (
    invariant_operator_L,
    jet_symbol_orders,
    l_beta,
    peel_decompose,
    quantize_pair,
    weighted_pairing,
)
from projstar.randgen import random_base_poly, random_density, random_tensor
from projstar.ring import MU, Poly, falling_factorial, binomial, poly_x, poly_z, total_x_diff, zvar
from projstar.variation import (
    expected_variation_base,
    t_coefficient,
    varied_connection,
    varied_density,
    varied_field,
)


def test_beta_K_returns_product(curved2, rng):
    a = random_tensor(rng, 2, 2, weight=Fraction(1, 2), deg=2)
    b = random_tensor(rng, 2, 1, weight=Fraction(-1, 3), deg=2)
    out = l_beta([a, b], 3, curved2)
    assert out.body == a.body * b.body


def test_quantize_k1_lie_derivative(curved2):
    # weight-0 vector: the pairing is the Lie derivative on densities
    n = 2
    a = SymTensorField(n, 1, Fraction(0), poly_x(1) * poly_z(1) + poly_x(2) ** 2 * poly_z(2))
    f = generic_density(n)
    out = quantize_pair(a, f, curved2)
    want = Poly.zero()
    for p in range(1, n + 1):
        want = want + a.body.diff(zvar(p)) * total_x_diff(f.comp, p)
    want = want - MU * f.comp * divergence_tensor(a, curved2).body / (n + 1)
    assert out.comp == want


def test_quantize_second_order_display(curved2, rng):
    n = 2
    lam = Fraction(1, 2)
    a = random_tensor(rng, n, 2, weight=lam, deg=2)
    f = generic_density(n)
    out = quantize_pair(a, f, curved2)
    div = divergence_tensor(a, curved2)
    divdiv = divergence_tensor(div, curved2).body
    hess = Poly.zero()
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            v = total_x_diff(total_x_diff(f.comp, i), j)
            for p in range(1, n + 1):
                v = v - curved2.gamma(i, j, p) * total_x_diff(f.comp, p)
            hess = hess + poly_z(i) * poly_z(j) * v
    a_hess = contract_full(a.body, hess, 2)
    grad_f = Poly.zero()
    for i in range(1, n + 1):
        grad_f = grad_f + poly_z(i) * total_x_diff(f.comp, i)
    div_grad = contract_full(div.body, grad_f, 1)
    aP = Poly.zero()
    for (p, q), val in curved2.curvature().schouten.items():
        aP = aP + val * a.body.diff(zvar(p)).diff(zvar(q))
    aP = aP / 2
    want = (
        a_hess
        + 2 * (1 - MU) / (lam + n + 3) * div_grad
        + falling_factorial(MU, 2) / falling_factorial(lam + n + 3, 2) * f.comp * divdiv
        - MU * (MU + lam + n + 1) / (lam + n + 2) * aP * f.comp
    )
    assert out.comp == want


def test_op011_display(curved2, rng):
    n = 2
    m1, l1 = Fraction(1, 5), Fraction(-1, 4)
    a = random_tensor(rng, n, 1, weight=m1, deg=2)
    b = random_tensor(rng, n, 1, weight=l1, deg=2)
    lhs = l_beta([a, b], 0, curved2).body
    nab_a = covariant_derivative(a, curved2)
    nab_b = covariant_derivative(b, curved2)
    t1 = Poly.zero()
    for p in range(1, n + 1):
        for q in range(1, n + 1):
            t1 = t1 + nab_a[p - 1].diff(zvar(q)) * nab_b[q - 1].diff(zvar(p))
    diva = divergence_tensor(a, curved2).body
    divb = divergence_tensor(b, curved2).body
    t2 = Poly.zero()
    t3 = Poly.zero()
    for p in range(1, n + 1):
        t2 = t2 + a.body.diff(zvar(p)) * nabla_body(divb, curved2, p)
        t3 = t3 + b.body.diff(zvar(p)) * nabla_body(diva, curved2, p)
    abP = Poly.zero()
    for (p, q), val in curved2.curvature().schouten.items():
        abP = abP + val * a.body.diff(zvar(p)) * b.body.diff(zvar(q))
    want = (
        t1
        - (m1 + 1) / (n + 1 + l1) * t2
        - (l1 + 1) / (n + 1 + m1) * t3
        + (m1 * l1 - n - 1) / ((n + 1 + m1) * (n + 1 + l1)) * diva * divb
        + (m1 + l1 + 2) * abP
    )
    assert lhs == want


def test_op011_weight_minus_one_factorization(curved2, rng):
    # at weights (-1, -1) the pairing factors through the trace-free gradient
    n = 2
    a = random_tensor(rng, n, 1, weight=Fraction(-1), deg=2)
    b = random_tensor(rng, n, 1, weight=Fraction(-1), deg=2)

    def K(v):
        grads = covariant_derivative(v, curved2)
        div = divergence_tensor(v, curved2).body
        out = {}
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                val = grads[i - 1].diff(zvar(j))
                if i == j:
                    val = val - div / n
                out[(i, j)] = val
        return out

    Ka, Kb = K(a), K(b)
    want0 = Poly.zero()
    for p in range(1, n + 1):
        for q in range(1, n + 1):
            want0 = want0 + Ka[(p, q)] * Kb[(q, p)]
    assert l_beta([a, b], 0, curved2).body == want0
    lhs1 = l_beta([a, b], 1, curved2).body * 2
    want1 = Poly.zero()
    for p in range(1, n + 1):
        for i in range(1, n + 1):
            want1 = want1 + poly_z(i) * (
                b.body.diff(zvar(p)) * Ka[(p, i)] + a.body.diff(zvar(p)) * Kb[(p, i)]
            )
    assert lhs1 == want1


def test_opkminusone_general_rows(curved2, rng):
    n = 2
    # row (s, 0) and the general two-slot first-order operator
    for k1, k2 in ((1, 0), (2, 0), (3, 0), (1, 1), (2, 1)):
        lam1 = Fraction(rng.randint(-1, 2), 2)
        lam2 = Fraction(rng.randint(-1, 2), 3)
        a = random_tensor(rng, n, k1, weight=lam1, deg=2)
        b = random_tensor(rng, n, k2, weight=lam2, deg=2)
        K = k1 + k2
        got = l_beta([a, b], K - 1, curved2).body
        grads_a = covariant_derivative(a, curved2)
        grads_b = covariant_derivative(b, curved2)
        term1 = Poly.zero()
        term2 = Poly.zero()
        for p in range(1, n + 1):
            if k1:
                term1 = term1 + a.body.diff(zvar(p)) * grads_b[p - 1]
            if k2:
                term2 = term2 + b.body.diff(zvar(p)) * grads_a[p - 1]
        want = Fraction(1, K) * (term1 + term2)
        if k2:
            divb = divergence_tensor(b, curved2).body
            want = want - Fraction(k2, K) * (lam1 + 2 * k1) / (lam2 + n + 2 * k2 - 1) * a.body * divb
        if k1:
            diva = divergence_tensor(a, curved2).body
            want = want - Fraction(k1, K) * (lam2 + 2 * k2) / (lam1 + n + 2 * k1 - 1) * b.body * diva
        assert got == want


def test_documented_table_typo(curved2, rng):
    # the printed (1,1) table row with denominators n+2+lambda disagrees with
    # the general first-order formula (denominators n+1+lambda); the engine
    # follows the general formula
    n = 2
    lam1 = lam2 = Fraction(0)
    a = random_tensor(rng, n, 1, weight=lam1, deg=2)
    b = random_tensor(rng, n, 1, weight=lam2, deg=2)
    got = l_beta([a, b], 1, curved2).body
    diva = divergence_tensor(a, curved2).body
    divb = divergence_tensor(b, curved2).body
    grads_a = covariant_derivative(a, curved2)
    grads_b = covariant_derivative(b, curved2)
    lie = Poly.zero()
    for p in range(1, n + 1):
        lie = lie + a.body.diff(zvar(p)) * grads_b[p - 1] + b.body.diff(zvar(p)) * grads_a[p - 1]
    correct = lie / 2 - a.body * divb / (n + 1 + lam2) - b.body * diva / (n + 1 + lam1)
    typo = lie / 2 - a.body * divb / (n + 2 + lam2) - b.body * diva / (n + 2 + lam1)
    assert got == correct
    assert got != typo


def test_peel_single_argument(flat2, rng):
    a = random_tensor(rng, 2, 2, weight=Fraction(1, 2), deg=2)
    peel = peel_decompose([a], flat2)
    assert peel.u[0].body == a.body
    assert all(peel.u[s].body.is_zero() for s in range(1, 3))


def test_peel_matches_direct_three_slots(flat2, curved2, rng):
    for conn in (flat2, curved2):
        args = [random_tensor(rng, 2, 1, deg=1) for _ in range(3)]
        peel = peel_decompose(args, conn)
        for beta in range(0, 4):
            assert peel.implied_l_beta(beta).body == l_beta(args, beta, conn).body


def test_peel_excluded_partial_sum(flat2):
    n = 2
    a = SymTensorField(n, 1, Fraction(-n - 2), poly_z(1))
    b = SymTensorField(n, 1, Fraction(0), poly_z(2))
    # total weight -n-2 is excluded at valence 1 (= -n-1-1), reached mid-peel
    with pytest.raises(ExcludedWeightError):
        peel_decompose([a, b], flat2)


def test_weighted_pairing_weight_zero_is_schouten(curved2, rng):
    a = random_tensor(rng, 2, 2, deg=2)
    b = random_tensor(rng, 2, 1, deg=2)
    assert weighted_pairing(a, b, curved2).body == schouten_bracket(a, b).body


def test_invariant_operator_L_flat_kernel(flat2):
    # flat: L annihilates exactly the polynomials of degree <= k
    for k in (1, 2):
        u = DensityField(2, Fraction(k), (poly_x(1) + 2 * poly_x(2)) ** k)
        assert invariant_operator_L(u, k, flat2).body.is_zero()
        v = DensityField(2, Fraction(k), poly_x(1) ** (k + 1))
        assert not invariant_operator_L(v, k, flat2).body.is_zero()


def test_invariant_operator_L_factorization(curved2, rng):
    k = 2
    u = random_density(rng, 2, Fraction(k), deg=3)
    L = invariant_operator_L(u, k, curved2)
    for _ in range(2):
        a = random_tensor(rng, 2, k + 1, weight=Fraction(1, 3), deg=2)
        q = quantize_pair(a, u, curved2)
        assert q.comp == contract_full(a.body, L.body, k + 1)


def test_invariant_operator_L_wrong_weight_rejected(flat2):
    u = DensityField(2, Fraction(3), poly_x(1))
    with pytest.raises(ValueError):
        invariant_operator_L(u, 2, flat2)


def test_tensorlemma_flat(flat2):
    u = DensityField(2, Fraction(2), poly_x(1) ** 2 + poly_x(2))
    v = DensityField(2, Fraction(1), poly_x(1) - 3 * poly_x(2))
    w = DensityField(2, Fraction(3), u.comp * v.comp)
    assert invariant_operator_L(w, 3, flat2).body.is_zero()


def test_invariant_operator_L_infinitesimal_invariance(flat2, rng):
    psi = random_base_poly(rng, 2, 2)
    for k in (1, 2):
        u = random_density(rng, 2, Fraction(k), deg=3)
        L0 = invariant_operator_L(u, k, flat2)
        L1 = invariant_operator_L(varied_density(u, psi), k, varied_connection(flat2, psi))
        assert t_coefficient(L1.body) == Fraction(k) * psi * L0.body


def test_order_bound_via_jets(curved2, rng):
    f = generic_density(2)
    for k in (1, 2, 3):
        a = random_tensor(rng, 2, k, deg=1)
        for beta in range(0, k + 1):
            val = l_beta([a, f.as_symbol()], beta, curved2)
            assert jet_symbol_orders(val.body, "f") <= k - beta


def test_weighted_invariance_infinitesimal(flat2, rng):
    psi = random_base_poly(rng, 2, 2)
    a = random_tensor(rng, 2, 2, weight=Fraction(1, 3), deg=1)
    b = random_tensor(rng, 2, 1, weight=Fraction(-1, 2), deg=1)
    for beta in (0, 1, 2):
        v0 = l_beta([a, b], beta, flat2)
        v1 = l_beta(
            [varied_field(a, psi), varied_field(b, psi)], beta, varied_connection(flat2, psi)
        )
        assert t_coefficient(v1.body) == expected_variation_base(v0.body, v0.weight, psi)
