"""Tests for exact integer polynomial arithmetic"""

import pytest
from sympy.polys.densearith import dup_exquo, dup_mul
from sympy.polys.domains import ZZ

from conftest import random_poly
from intpoly import (
    B,
    MINUS_INFINITY,
    ONE,
    PLUS_INFINITY,
    ZERO,
    IntPoly,
    NotDivisible,
    ResourceGuardError,
    add,
    degree,
    exact_div,
    mul,
    poly,
    power,
    product,
    set_size_cap,
)


def to_dup(f):
    return [ZZ(c) for c in reversed(f.coeffs)]


def from_dup(coeffs):
    return IntPoly(tuple(int(c) for c in reversed(coeffs)))


def test_normalization_and_zero():
    assert IntPoly((1, 2, 0, 0)).coeffs == (1, 2)
    assert IntPoly((0, 0)).is_zero()
    assert degree(ZERO) is MINUS_INFINITY
    assert degree(poly([0, 0, 81, 27])) == 3
    assert MINUS_INFINITY < 0 < PLUS_INFINITY
    assert MINUS_INFINITY < -10 ** 100


def test_add():
    f = poly([0, 0, 81, 27])
    assert add(f, ZERO) == f
    assert add(poly([1, 1]), poly([-1, -1])) == ZERO
    assert add(f, poly([0, 0, -81])) == poly([0, 0, 0, 27])
    assert (f - f).coeffs == ()


def test_mul_examples():
    f = poly([3, -7, 2])
    assert mul(f, ONE) == f
    assert mul(poly([1, 1]), poly([-1, 1])) == poly([-1, 0, 1])
    three_b = poly([0, 3])
    assert product([three_b, poly([-9, -3]), poly([0, -3])]) == poly([0, 0, 81, 27])
    assert mul(f, ZERO) == ZERO


def test_mul_matches_sympy_oracle(rng):
    # small factors use the schoolbook product, long ones go through Kronecker packing
    for _ in range(40):
        f = random_poly(rng, max_degree=60, max_coeff=2 ** rng.randint(1, 300))
        g = random_poly(rng, max_degree=60, max_coeff=2 ** rng.randint(1, 300))
        assert mul(f, g) == from_dup(dup_mul(to_dup(f), to_dup(g), ZZ))
        assert mul(f, g).degree == f.degree + g.degree


def test_mul_square_of_long_poly(rng):
    f = random_poly(rng, min_degree=40, max_degree=80, max_coeff=10 ** 40)
    assert mul(f, f) == from_dup(dup_mul(to_dup(f), to_dup(f), ZZ))


def test_mul_commutative_associative(rng):
    for _ in range(30):
        f, g, h = (random_poly(rng, max_degree=30) for _ in range(3))
        assert mul(f, g) == mul(g, f)
        assert mul(mul(f, g), h) == mul(f, mul(g, h))


def test_power():
    f = poly([1, 1])
    assert power(f, 0) == ONE
    assert power(f, 3) == poly([1, 3, 3, 1])
    s2 = poly([81, 81, 81, 27])
    assert power(s2, 3) == mul(mul(s2, s2), s2)
    with pytest.raises(ValueError):
        power(f, -1)


def test_power_matches_repeated_mul(rng):
    for _ in range(20):
        f = random_poly(rng, max_degree=10)
        k = rng.randint(1, 7)
        expected = ONE
        for _ in range(k):
            expected = mul(expected, f)
        assert power(f, k) == expected


def test_exact_div_examples():
    assert exact_div(poly([-1, 0, 1]), poly([1, 1])) == poly([-1, 1])
    assert exact_div(poly([0, 0, 81, 27]), poly([0, 3])) == poly([0, 27, 9])
    with pytest.raises(NotDivisible):
        exact_div(poly([1, 1]), B)
    with pytest.raises(NotDivisible):
        exact_div(poly([1, 2]), poly([0, 2]))
    with pytest.raises(ZeroDivisionError):
        exact_div(ONE, ZERO)
    assert exact_div(ZERO, B) == ZERO


def test_exact_div_inverts_mul(rng):
    for _ in range(40):
        f = random_poly(rng, max_degree=25, max_coeff=10 ** 6)
        g = random_poly(rng, max_degree=25, max_coeff=10 ** 6).shift(rng.randint(0, 3))
        assert exact_div(mul(f, g), g) == f
        assert exact_div(mul(f, g), g) == from_dup(dup_exquo(to_dup(mul(f, g)), to_dup(g), ZZ))


def test_exact_div_detects_perturbation(rng):
    f = random_poly(rng, min_degree=5, max_degree=10)
    g = poly([5, 0, 3])
    with pytest.raises(NotDivisible):
        exact_div(mul(f, g) + 1, g)


def test_operators_accept_ints():
    assert B + 1 == poly([1, 1])
    assert 1 - B == poly([1, -1])
    assert 3 * B == poly([0, 3])
    assert (B + 1) ** 2 == poly([1, 2, 1])


def test_content_and_primitive():
    g1 = poly([-9, -3])
    assert g1.content() == 3
    assert g1.content_and_primitive() == (-3, poly([3, 1]))
    assert poly([0, 0, 81, 27]).content_and_primitive() == (27, poly([0, 0, 3, 1]))
    with pytest.raises(ValueError):
        ZERO.content_and_primitive()


def test_evaluate_derivative_shift():
    f = poly([-9, -3])
    assert f.evaluate(-3) == 0
    assert poly([1, 3, 3, 1]).derivative() == poly([3, 6, 3])
    assert f.shift(2) == poly([0, 0, -9, -3])
    assert poly([0, 0, 5]).low_order() == 2


def test_str_and_json():
    f = poly([0, 0, 81, 27])
    assert str(f) == "27*b^3 + 81*b^2"
    assert str(poly([-9, -3])) == "-3*b - 9"
    assert str(ZERO) == "0"
    big = poly([10 ** 60, -1])
    data = big.to_json()
    assert data == {"degree": 1, "coeffs": [str(10 ** 60), "-1"]}
    assert IntPoly.from_json(data) == big
    assert ZERO.to_json() == {"degree": None, "coeffs": []}
    with pytest.raises(ValueError):
        IntPoly.from_json({"degree": 3, "coeffs": ["1"]})


def test_resource_guard(restore_size_cap):
    f = poly([1] * 50)
    set_size_cap(100)
    with pytest.raises(ResourceGuardError):
        mul(f, f)
    with pytest.raises(ResourceGuardError):
        power(f, 10)
    with pytest.raises(ValueError):
        set_size_cap(0)
