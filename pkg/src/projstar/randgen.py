"""Seeded random inputs for the verification suites.

Connections are always generated with symmetric Ricci tensor: either as a
projective change of the flat chart by an exact one-form, or as a general
symmetric Christoffel table whose trace is corrected to be exact.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .ring import Poly, poly_x, poly_z, total_x_diff
from .geometry import AffineConnection, DensityField, SymTensorField, flat_connection, projective_change


def random_base_poly(rng: random.Random, n: int, deg: int, terms: int = 3, coeff_bound: int = 3) -> Poly:
    out = Poly.zero()
    for _ in range(terms):
        c = rng.randint(-coeff_bound, coeff_bound)
        if c == 0:
            c = 1
        mono = Poly.const(c)
        d = rng.randint(0, deg)
        for _ in range(d):
            mono = mono * poly_x(rng.randint(1, n))
        out = out + mono
    return out


def random_tensor(
    rng: random.Random,
    n: int,
    k: int,
    weight: Fraction = Fraction(0),
    deg: int = 2,
    terms: int = 2,
) -> SymTensorField:
    body = Poly.zero()
    for _ in range(max(terms, 1)):
        mono = random_base_poly(rng, n, deg, terms=1)
        for _ in range(k):
            mono = mono * poly_z(rng.randint(1, n))
        body = body + mono
    if body.is_zero():
        body = poly_z(1) ** k
    return SymTensorField(n, k, weight, body)


def random_density(rng: random.Random, n: int, weight, deg: int = 3) -> DensityField:
    return DensityField(n, weight, random_base_poly(rng, n, deg))


def random_exact_one_form(rng: random.Random, n: int, deg: int = 2) -> List[Poly]:
    """d(phi) for a random polynomial potential: always closed."""
    phi = random_base_poly(rng, n, deg + 1)
    return [total_x_diff(phi, i) for i in range(1, n + 1)]


def random_projective_change(rng: random.Random, n: int, deg: int = 2) -> AffineConnection:
    return projective_change(flat_connection(n), random_exact_one_form(rng, n, deg))


def random_volume_connection(rng: random.Random, n: int, deg: int = 1) -> AffineConnection:
    """General symmetric Christoffel table with exact trace one-form.

    The trace tau_i = Gamma_ip^p is shifted by a delta-type correction so
    that tau = d(sigma), which makes the Ricci tensor symmetric.
    """
    table = {}
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            for k in range(1, n + 1):
                if rng.random() < 0.5:
                    continue
                p = random_base_poly(rng, n, deg, terms=1, coeff_bound=2)
                table[(i, j, k)] = table.get((i, j, k), Poly.zero()) + p
                if i != j:
                    table[(j, i, k)] = table[(i, j, k)]
    sigma = random_base_poly(rng, n, deg + 1)
    tau = []
    for i in range(1, n + 1):
        t = Poly.zero()
        for p in range(1, n + 1):
            t = t + table.get((i, p, p), Poly.zero())
        tau.append(t)
    rho = [(total_x_diff(sigma, i) - tau[i - 1]) / Fraction(n + 1) for i in range(1, n + 1)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                extra = Poly.zero()
                if j == k:
                    extra = extra + rho[i - 1]
                if i == k:
                    extra = extra + rho[j - 1]
                if extra:
                    table[(i, j, k)] = table.get((i, j, k), Poly.zero()) + extra
    return AffineConnection(n, table)


def random_trace_free_difference(rng: random.Random, n: int, deg: int = 1):
    """Symmetric difference tensor with both traces zero (not a projective change)."""
    table = {}
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            for k in range(1, n + 1):
                p = random_base_poly(rng, n, deg, terms=1, coeff_bound=2)
                table[(i, j, k)] = p
                table[(j, i, k)] = p
    # remove the delta-trace part
    tau = []
    for i in range(1, n + 1):
        t = Poly.zero()
        for p in range(1, n + 1):
            t = t + table.get((i, p, p), Poly.zero())
        tau.append(t)
    out = {}
    c = Fraction(1, n + 1)
    for (i, j, k), v in table.items():
        val = v
        if j == k:
            val = val - c * tau[i - 1]
        if i == k:
            val = val - c * tau[j - 1]
        if val:
            out[(i, j, k)] = val
    return out
