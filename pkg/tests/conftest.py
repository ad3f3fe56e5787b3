import random
from fractions import Fraction

import pytest

from apcalc.scalars import EXACT, FLOAT, convert
from apcalc.trigpoly import TrigPoly


def random_trigpoly(rng: random.Random, dim=1, n_terms=5, mode=EXACT, max_freq=3, denom=(1, 2)):
    """Seeded random trig polynomial with small rational frequencies and Gaussian-integer coefficients."""
    terms = {}
    for _ in range(n_terms):
        xi = tuple(Fraction(rng.randint(-max_freq, max_freq), rng.choice(denom)) for _ in range(dim))
        c = complex(rng.randint(-3, 3), rng.randint(-3, 3))
        if c == 0:
            c = 1
        if mode == EXACT:
            c = convert((Fraction(int(c.real)), Fraction(int(c.imag))), EXACT)
        terms[xi] = terms[xi] + c if xi in terms else c
    return TrigPoly(terms, dim, mode=mode)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(params=[EXACT, FLOAT])
def mode(request):
    return request.param
