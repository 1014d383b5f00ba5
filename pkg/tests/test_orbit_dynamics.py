"""Tests for orbit polynomials and Misiurewicz polynomials"""

import pytest

from intpoly import ONE, NotDivisible, ResourceGuardError, mul, poly, power
from orbit_dynamics import (
    FamilyParams,
    InvalidParameter,
    OrbitTable,
    Route,
    bd,
    decomposition_terms,
    expected_degrees,
    expected_misiurewicz_degree,
    expected_sigma_tau_degrees,
    get_orbit_table,
    misiurewicz,
    misiurewicz_direct,
    misiurewicz_literal,
    misiurewicz_via_tau,
    named_polynomial,
    nij,
    orbit,
    r_closed_form,
    repunit,
    sigma_tau,
    tau_product_form,
)
from padic_newton import gauss_valuation, ord_p


def test_family_params():
    params = FamilyParams(3, 4)
    assert params.p == 3
    assert FamilyParams(5, 2, p=7).p == 7
    for d, m in ((4, 1), (2, 1), (9, 2), (3, 0)):
        with pytest.raises(InvalidParameter):
            FamilyParams(d, m)
    with pytest.raises(InvalidParameter):
        FamilyParams(3, 1, p=6)


def test_orbit_first_steps():
    table = orbit(3, 2)
    assert len(table) == 3
    assert table.r(0) == ONE and table.s(0) == ONE
    assert table.r(1) == poly([3, 3])
    assert table.s(1) == poly([3])
    assert table.r(2) == poly([81, 162, 81])
    assert table.s(2) == mul(power(poly([1, 1]), 3) + 2, poly([27]))


def test_orbit_rejects_bad_parameters():
    with pytest.raises(InvalidParameter):
        orbit(4, 2)
    with pytest.raises(InvalidParameter):
        orbit(3, -1)
    assert orbit(3, 0).entries == [(ONE, ONE)]


def test_orbit_recurrence_holds():
    table = orbit(3, 6)
    assert table.check_recurrence() == []
    assert table.corrupted(2).check_recurrence() == [2]


def test_orbit_table_extends_incrementally():
    table = OrbitTable(5)
    table.extend(2)
    first = table.s(2)
    table.extend(4)
    assert table.s(2) is first
    assert table.max_n == 4


def test_nij_and_expected_degrees():
    assert nij(3, 2) == (0, 2)
    assert nij(3, 5) == (1, 2)
    assert nij(3, 4) == (0, 4)
    assert expected_degrees(3, 2) == (2, 3, 0, 2)
    assert expected_degrees(3, 5)[1] == 84
    assert expected_degrees(3, 4)[:2] == (28, 27)
    with pytest.raises(InvalidParameter):
        nij(3, 1)


@pytest.mark.parametrize("d, top", [(3, 8), (5, 5), (7, 4)])
def test_degrees_match_closed_form(d, top):
    table = get_orbit_table(d)
    for n in range(2, top + 1):
        deg_r, deg_s, _, _ = expected_degrees(d, n)
        assert (table.r(n).degree, table.s(n).degree) == (deg_r, deg_s)


def test_degree_two_entries_for_any_d():
    for d in (3, 5, 7):
        table = get_orbit_table(d)
        assert table.r(2).degree == 2
        assert table.s(2).degree == d


def test_sigma_tau_examples():
    sigma, tau = sigma_tau(3, 1)
    assert tau == poly([0, -3])
    sigma, tau = sigma_tau(3, 2)
    assert sigma == poly([81, 81])
    assert tau == poly([0, 0, 81, 27])
    with pytest.raises(InvalidParameter):
        sigma_tau(3, 0)


def test_sigma_tau_degrees():
    assert expected_sigma_tau_degrees(3, 5) == (82, 84)
    assert expected_sigma_tau_degrees(3, 3) == (10, 10)
    assert expected_sigma_tau_degrees(3, 4)[1] == 28
    for m in range(2, 9):
        sigma, tau = sigma_tau(3, m)
        assert (sigma.degree, tau.degree) == expected_sigma_tau_degrees(3, m)
    for m in range(2, 5):
        sigma, tau = sigma_tau(5, m)
        assert (sigma.degree, tau.degree) == expected_sigma_tau_degrees(5, m)


def test_misiurewicz_first_polynomial():
    assert misiurewicz_direct(3, 1).poly == poly([-9, -3])
    assert misiurewicz_via_tau(3, 1).poly == poly([-9, -3])
    assert misiurewicz_literal(3, 1).poly == poly([-9, -3])
    assert misiurewicz_direct(3, 1).construction_route == Route.DIRECT


def test_misiurewicz_degrees():
    assert [misiurewicz(3, m).degree for m in range(1, 6)] == [1, 6, 17, 55, 168]
    assert [expected_misiurewicz_degree(3, m) for m in range(1, 6)] == [1, 6, 17, 55, 168]
    assert misiurewicz(3, 3).degree == 3 ** 3 - 3 ** 2 - 1
    for m in range(3, 5):
        assert misiurewicz(5, m).degree == 5 ** m - 5 ** (m - 1) - 1
    assert misiurewicz(5, 2).degree == expected_misiurewicz_degree(5, 2) == 20


def test_routes_agree():
    for m in range(1, 6):
        assert misiurewicz_direct(3, m).poly == misiurewicz_via_tau(3, m).poly
    for m in range(1, 4):
        assert misiurewicz_direct(5, m).poly == misiurewicz_via_tau(5, m).poly
    for m in range(1, 5):
        assert misiurewicz_literal(3, m).poly == misiurewicz_direct(3, m).poly


def test_literal_route_is_guarded():
    with pytest.raises(ResourceGuardError):
        misiurewicz_literal(3, 6)


def test_routes_fail_loudly_on_corrupted_orbit():
    table = get_orbit_table(3).corrupted(2)
    with pytest.raises(NotDivisible):
        misiurewicz_via_tau(3, 2, table)
    with pytest.raises(NotDivisible):
        misiurewicz_direct(3, 3, table)


def test_tau_product_form():
    assert tau_product_form(3, 1) == poly([0, -3])
    assert tau_product_form(3, 2) == poly([0, 0, 81, 27])
    for m in range(1, 7):
        assert tau_product_form(3, m) == sigma_tau(3, m)[1]


def test_decomposition_terms():
    for d, m in ((3, 1), (3, 2), (3, 3), (5, 2)):
        terms = decomposition_terms(d, m)
        assert len(terms.terms) == d
        assert terms.negated_sum() == mul(bd(d), misiurewicz(d, m).poly)


def test_decomposition_term_valuations():
    # F_{d-1} and bd G_m share the valuation d^m at b^1
    g = misiurewicz(3, 2).poly
    assert ord_p(mul(bd(3), g)[1], 3) == 9
    last = decomposition_terms(3, 2).terms[-1]
    assert ord_p(last[1], 3) == 9


def test_repunit():
    assert repunit(3, 2) == 4
    assert repunit(3, 3) == 13
    assert repunit(5, 0) == 0
    for m in range(1, 11):
        assert 3 * repunit(3, m - 1) + 1 == repunit(3, m)


def test_r_closed_form():
    table = get_orbit_table(3)
    for m in range(3, 7):
        assert r_closed_form(3, m) == table.r(m)
    assert r_closed_form(5, 4) == get_orbit_table(5).r(4)
    with pytest.raises(InvalidParameter):
        r_closed_form(3, 2)


def test_valuation_chains():
    table = get_orbit_table(3)
    for m in range(1, 7):
        assert ord_p(table.s(m)[0], 3) == repunit(3, m)
    for m in range(2, 7):
        assert gauss_valuation(table.r(m), 3) > gauss_valuation(table.s(m), 3) >= 3 ** (m - 1)


def test_named_polynomial():
    assert named_polynomial(3, "r", 1) == poly([3, 3])
    assert named_polynomial(3, "tau", 2) == poly([0, 0, 81, 27])
    assert named_polynomial(3, "G", 1) == poly([-9, -3])
    assert named_polynomial(3, "F_2", 2) == decomposition_terms(3, 2).terms[2]
    assert named_polynomial(3, "F0", 2) == decomposition_terms(3, 2).terms[0]
    with pytest.raises(InvalidParameter):
        named_polynomial(3, "F3", 2)
    with pytest.raises(InvalidParameter):
        named_polynomial(3, "phi", 2)
    for bad in ("F", "F_", "Fx"):
        with pytest.raises(InvalidParameter):
            named_polynomial(3, bad, 2)


def test_misiurewicz_json():
    data = misiurewicz(3, 1).to_json()
    assert data == {"d": 3, "m": 1, "route": "direct", "degree": 1, "coeffs": ["-9", "-3"]}


@pytest.mark.slow
def test_misiurewicz_large_instance():
    g = misiurewicz(5, 5)
    assert g.degree == 5 ** 5 - 5 ** 4 - 1 == 2499
    assert misiurewicz(5, 4).poly == misiurewicz_via_tau(5, 4).poly
