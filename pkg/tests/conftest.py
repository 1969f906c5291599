import random
from fractions import Fraction

import pytest

from projstar.geometry import flat_connection, projective_change
from projstar.ring import poly_x


@pytest.fixture
def flat2():
    return flat_connection(2)


@pytest.fixture
def flat3():
    return flat_connection(3)


@pytest.fixture
def curved2(flat2):
    # projective change by the exact one-form d(x1 x2)
    return projective_change(flat2, [poly_x(2), poly_x(1)])


@pytest.fixture
def curved3(flat3):
    # d(x1 x2 x3)
    return projective_change(
        flat3,
        [poly_x(2) * poly_x(3), poly_x(1) * poly_x(3), poly_x(1) * poly_x(2)],
    )


@pytest.fixture
def rng():
    return random.Random(20240817)
