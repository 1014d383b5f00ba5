"""Shared fixtures; backend modules import each other by bare name"""

import os
import random
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "backend"))

from intpoly import IntPoly, get_size_cap, set_size_cap  # noqa: E402


@pytest.fixture
def rng():
    return random.Random(20240917)


@pytest.fixture
def restore_size_cap():
    cap = get_size_cap()
    yield
    set_size_cap(cap)


def random_poly(rng, max_degree=8, max_coeff=50, min_degree=0):
    """Random IntPoly with a nonzero leading coefficient"""
    degree = rng.randint(min_degree, max_degree)
    coeffs = [rng.randint(-max_coeff, max_coeff) for _ in range(degree)]
    lead = 0
    while lead == 0:
        lead = rng.randint(-max_coeff, max_coeff)
    return IntPoly(tuple(coeffs) + (lead,))


def random_padic_poly(rng, p, max_degree=6, max_exponent=4, min_degree=0):
    """Random polynomial whose coefficients carry visible powers of p"""
    degree = rng.randint(min_degree, max_degree)
    coeffs = []
    for i in range(degree + 1):
        if i < degree and rng.randrange(5) == 0:
            coeffs.append(0)
            continue
        unit = 0
        while unit % p == 0:
            unit = rng.randint(-30, 30)
        coeffs.append(unit * p ** rng.randint(0, max_exponent))
    return IntPoly(tuple(coeffs))
