"""Tests for reduction mod q and distinct-degree factorization"""

from itertools import islice

import pytest
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor_sqf

from intpoly import poly
from modp_factor import (
    DegreeDrop,
    DegreeMultiset,
    ModPoly,
    NoUsablePrime,
    NotSquarefree,
    SkippedPrime,
    candidate_primes,
    ddf,
    degree_multisets,
    is_squarefree,
    possible_factor_degrees,
    reduce_mod,
)
from orbit_dynamics import misiurewicz


def berlekamp_degrees(f: ModPoly):
    _, factors = gf_factor_sqf(f.to_gf(), f.q, ZZ, method="berlekamp")
    return sorted(len(factor) - 1 for factor in factors)


def test_reduce_mod():
    f = poly([7, -3, 5])
    assert reduce_mod(f, 3).coeffs == (1, 0, 2)
    assert reduce_mod(f, 3).degree == 2
    with pytest.raises(DegreeDrop):
        reduce_mod(f, 5)
    with pytest.raises(DegreeDrop):
        reduce_mod(poly([3, 6]), 3)
    with pytest.raises(ValueError):
        reduce_mod(f, 4)


def test_is_squarefree():
    assert is_squarefree(ModPoly(5, (1, 0, 1)))
    assert not is_squarefree(ModPoly(3, (1, 1, 1)))  # (b - 1)^2 mod 3
    assert not is_squarefree(ModPoly(2, (1, 0, 1)))


def test_ddf_examples():
    assert ddf(ModPoly(5, (1, 0, 1))).entries == ((1, 2),)
    assert ddf(ModPoly(3, (1, 0, 1))).entries == ((2, 1),)
    # b^4 + 1 = (b^2 + b + 2)(b^2 + 2b + 2) mod 3
    assert ddf(ModPoly(3, (1, 0, 0, 0, 1))).entries == ((2, 2),)
    # b^5 - b splits completely over F_5
    assert ddf(ModPoly(5, (0, -1, 0, 0, 0, 1))).entries == ((1, 5),)
    # b^3 - b - 1 is irreducible over F_3
    assert ddf(ModPoly(3, (-1, -1, 0, 1))).degrees() == [3]


def test_ddf_rejects_bad_input():
    with pytest.raises(NotSquarefree):
        ddf(ModPoly(3, (1, 1, 1)))
    with pytest.raises(ValueError):
        ddf(ModPoly(3, (2,)))


def test_ddf_non_monic():
    # 2(b^2 + 1) mod 3 has the degrees of b^2 + 1
    assert ddf(ModPoly(3, (2, 0, 2))).degrees() == [2]


def test_ddf_matches_berlekamp(rng):
    checked = 0
    for _ in range(150):
        q = rng.choice([2, 3, 5, 7, 11])
        degree = rng.randint(1, 12)
        f = ModPoly(q, tuple(rng.randrange(q) for _ in range(degree)) + (1,))
        if not is_squarefree(f):
            continue
        multiset = ddf(f)
        assert multiset.degrees() == berlekamp_degrees(f)
        assert multiset.total_degree == degree
        checked += 1
    assert checked >= 50


def test_ddf_degree_sum_monic_degree_eight(rng):
    for _ in range(40):
        f = ModPoly(5, tuple(rng.randrange(5) for _ in range(8)) + (1,))
        if is_squarefree(f):
            assert ddf(f).total_degree == 8


def test_subset_sums():
    multiset = DegreeMultiset(5, ((1, 2), (3, 1)))
    assert multiset.degrees() == [1, 1, 3]
    assert multiset.subset_sums() == frozenset({0, 1, 2, 3, 4, 5})
    assert DegreeMultiset(3, ((2, 2),)).subset_sums() == frozenset({0, 2, 4})


def test_possible_factor_degrees():
    linear = DegreeMultiset(5, ((1, 2),))
    quadratic = DegreeMultiset(3, ((2, 1),))
    assert possible_factor_degrees([linear]) == frozenset({0, 1, 2})
    assert possible_factor_degrees([linear, quadratic]) == frozenset({0, 2})
    with pytest.raises(NoUsablePrime):
        possible_factor_degrees([])


def test_candidate_primes():
    assert list(islice(candidate_primes(exclude={3}), 4)) == [2, 5, 7, 11]
    assert list(islice(candidate_primes(start=20), 2)) == [23, 29]


def test_degree_multisets_skips_bad_primes():
    # 3b^2 + 1: square mod 2, degree drop mod 3, irreducible mod 5
    f = poly([1, 0, 3])
    usable, skipped = degree_multisets(f, [2, 3, 5, 7], count=1)
    assert [m.q for m in usable] == [5]
    assert usable[0].degrees() == [2]
    assert skipped == [SkippedPrime(2, "NotSquarefree"), SkippedPrime(3, "DegreeDrop")]


def test_degree_multisets_respects_max_tried():
    f = poly([1, 0, 3])
    usable, skipped = degree_multisets(f, candidate_primes(), count=5, max_tried=2)
    assert usable == []
    assert len(skipped) == 2


def test_misiurewicz_degrees_mod_q():
    g = misiurewicz(3, 2).poly
    usable, _ = degree_multisets(g, candidate_primes(exclude={3}), count=6)
    assert len(usable) == 6
    for multiset in usable:
        assert multiset.total_degree == g.degree
        assert multiset.degrees() == berlekamp_degrees(reduce_mod(g, multiset.q))


def test_multiset_json():
    data = DegreeMultiset(7, ((1, 1), (4, 2))).to_json()
    assert data == {
        "q": 7,
        "squarefree": True,
        "entries": [{"degree": 1, "count": 1}, {"degree": 4, "count": 2}],
    }
