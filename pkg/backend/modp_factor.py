"""
Reduction mod q and distinct-degree factorization over F_q

Only the multiset of irreducible factor degrees is computed (no
equal-degree splitting). The field arithmetic is sympy's galoistools, which
works on dense coefficient lists with the highest power first.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from sympy import isprime, nextprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import (
    gf_diff,
    gf_gcd,
    gf_monic,
    gf_pow_mod,
    gf_quo,
    gf_rem,
    gf_sub,
)

from intpoly import IntPoly

logger = logging.getLogger("modp")


class DegreeDrop(ValueError):
    """q divides the leading coefficient; the prime is skipped"""


class NotSquarefree(ValueError):
    """gcd(f, f') != 1 mod q; the prime is skipped"""


class NoUsablePrime(RuntimeError):
    """Every candidate auxiliary prime was skipped"""


@dataclass(frozen=True)
class ModPoly:
    """Polynomial over F_q, ascending residues in [0, q)"""

    q: int
    coeffs: Tuple[int, ...] = ()

    def __post_init__(self):
        coeffs = [c % self.q for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def to_gf(self) -> List[int]:
        """galoistools layout (highest power first)"""
        return [ZZ(c) for c in reversed(self.coeffs)]

    @classmethod
    def from_gf(cls, q: int, coeffs: Sequence[int]) -> "ModPoly":
        return cls(q, tuple(int(c) for c in reversed(coeffs)))

    def __str__(self):
        return f"{IntPoly(self.coeffs)} (mod {self.q})"


@dataclass(frozen=True)
class DegreeMultiset:
    """Degrees of the irreducible factors of f mod q, as (degree, count) pairs"""

    q: int
    entries: Tuple[Tuple[int, int], ...]
    squarefree: bool = True

    @property
    def total_degree(self) -> int:
        return sum(degree * count for degree, count in self.entries)

    def degrees(self) -> List[int]:
        return [degree for degree, count in self.entries for _ in range(count)]

    def subset_sums(self) -> FrozenSet[int]:
        """Every degree a divisor of f mod q can have"""
        sums = 1
        for degree in self.degrees():
            sums |= sums << degree
        return frozenset(i for i in range(sums.bit_length()) if sums >> i & 1)

    def to_json(self) -> Dict:
        return {
            "q": self.q,
            "squarefree": self.squarefree,
            "entries": [{"degree": degree, "count": count} for degree, count in self.entries],
        }


def reduce_mod(f: IntPoly, q: int) -> ModPoly:
    """
    Coefficientwise reduction of f modulo the prime q

    Raises:
        DegreeDrop: q divides the leading coefficient (or f is zero)
    """
    if not isprime(q):
        raise ValueError(f"modulus must be prime, got {q}")
    if f.is_zero() or f.leading_coefficient % q == 0:
        raise DegreeDrop(f"{q} divides the leading coefficient")
    return ModPoly(q, f.coeffs)


def is_squarefree(f: ModPoly) -> bool:
    g = f.to_gf()
    common = gf_gcd(g, gf_diff(g, f.q, ZZ), f.q, ZZ)
    return len(common) == 1


def ddf(f: ModPoly) -> DegreeMultiset:
    """
    Distinct-degree factorization of a squarefree f mod q

    For e = 1, 2, ... the product of the degree-e irreducible factors is
    gcd(f, x^(q^e) - x); x^(q^e) is kept reduced modulo the remaining cofactor.

    Raises:
        NotSquarefree: gcd(f, f') != 1
    """
    if f.degree < 1:
        raise ValueError("ddf needs a polynomial of degree >= 1")
    if not is_squarefree(f):
        raise NotSquarefree(f"f is not squarefree mod {f.q}")

    q = f.q
    x = [ZZ(1), ZZ(0)]
    _, g = gf_monic(f.to_gf(), q, ZZ)
    h = gf_rem(x, g, q, ZZ)
    counts: Counter = Counter()
    e = 0

    while 2 * (e + 1) <= len(g) - 1:
        e += 1
        h = gf_pow_mod(h, q, g, q, ZZ)
        common = gf_gcd(g, gf_sub(h, x, q, ZZ), q, ZZ)
        block = len(common) - 1
        if block > 0:
            counts[e] += block // e
            g = gf_quo(g, common, q, ZZ)
            h = gf_rem(h, g, q, ZZ)

    if len(g) - 1 > 0:
        counts[len(g) - 1] += 1

    multiset = DegreeMultiset(q, tuple(sorted(counts.items())), squarefree=True)
    logger.debug(f"q={q}: factor degrees {multiset.degrees()}")
    return multiset


def possible_factor_degrees(multisets: Sequence[DegreeMultiset]) -> FrozenSet[int]:
    """
    Intersection over primes of the subset sums of each degree multiset

    Raises:
        NoUsablePrime: no multiset given
    """
    if not multisets:
        raise NoUsablePrime("no auxiliary prime survived")
    result = multisets[0].subset_sums()
    for multiset in multisets[1:]:
        result &= multiset.subset_sums()
    return result


@dataclass(frozen=True)
class SkippedPrime:
    q: int
    reason: str

    def to_json(self) -> Dict:
        return {"q": self.q, "reason": self.reason}


def candidate_primes(exclude: Iterable[int] = (), start: int = 2) -> Iterable[int]:
    """Primes >= start in increasing order, skipping the excluded ones"""
    excluded = set(exclude)
    q = start if isprime(start) else nextprime(start)
    while True:
        if q not in excluded:
            yield q
        q = nextprime(q)


def degree_multisets(f: IntPoly, primes: Iterable[int], count: int,
                     max_tried: Optional[int] = None) -> Tuple[List[DegreeMultiset], List[SkippedPrime]]:
    """
    DDF of f modulo the first `count` usable primes from `primes`

    Primes hitting DegreeDrop or NotSquarefree are recorded and skipped.
    At most max_tried primes are examined.
    """
    usable: List[DegreeMultiset] = []
    skipped: List[SkippedPrime] = []
    iterator = iter(primes)
    tried = 0
    while len(usable) < count and (max_tried is None or tried < max_tried):
        q = next(iterator, None)
        if q is None:
            break
        tried += 1
        try:
            usable.append(ddf(reduce_mod(f, q)))
        except DegreeDrop:
            logger.info(f"q={q}: skipped (degree drop)")
            skipped.append(SkippedPrime(q, "DegreeDrop"))
        except NotSquarefree:
            logger.info(f"q={q}: skipped (not squarefree)")
            skipped.append(SkippedPrime(q, "NotSquarefree"))
    return usable, skipped
