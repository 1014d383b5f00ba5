"""
Orbit polynomials and Misiurewicz polynomials of the family
phi_a(z) = a z / (z^d + d - 1), written in the variable b with a = (b+1)d

In homogeneous coordinates phi_b([x, y]) = [(b+1)d x y^(d-1), x^d + (d-1) y^d]
and phi_b^n([1, 1]) = [r_n, s_n]. The Misiurewicz polynomial of portrait
(m, 1) is G_m in Z[b]; the Z[a] version is the affine substitution
b = a/d - 1 of it, which preserves degree and irreducibility over Q, so it is
never built here.
"""

import logging
import threading
from dataclasses import dataclass, field
from enum import Enum
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import isprime

from config import CACHE_PATH, LITERAL_DIVISION_MAX_DEGREE
from intpoly import (
    ONE,
    ZERO,
    IntPoly,
    ResourceGuardError,
    exact_div,
    mul,
    power,
    product,
)

logger = logging.getLogger("orbit")


class InvalidParameter(ValueError):
    """Family parameter outside its domain (d not prime, m < 1, ...)"""


def validate_prime(d: int, minimum: int = 2, name: str = "d"):
    if not isinstance(d, int) or d < minimum or not isprime(d):
        raise InvalidParameter(f"{name} must be a prime >= {minimum}, got {d!r}")


@dataclass(frozen=True)
class FamilyParams:
    """Degree d (prime >= 3), portrait length m, polygon prime p (default d)"""

    d: int
    m: int
    p: Optional[int] = None

    def __post_init__(self):
        validate_prime(self.d, minimum=3)
        if not isinstance(self.m, int) or self.m < 1:
            raise InvalidParameter(f"m must be >= 1, got {self.m!r}")
        if self.p is None:
            object.__setattr__(self, "p", self.d)
        validate_prime(self.p, name="p")


def b_plus_one_times_d(d: int) -> IntPoly:
    """(b+1)d, the parameter a"""
    return IntPoly((d, d))


def bd(d: int) -> IntPoly:
    return IntPoly((0, d))


def step(d: int, r: IntPoly, s: IntPoly) -> Tuple[IntPoly, IntPoly]:
    """One application of phi_b to [r, s]"""
    s_pow = power(s, d - 1)
    r_next = mul(mul(b_plus_one_times_d(d), r), s_pow)
    s_next = power(r, d) + mul(s_pow, s).scale(d - 1)
    return r_next, s_next


class OrbitTable:
    """
    The sequences (r_0..r_N, s_0..s_N) for fixed d

    Built incrementally; entries already computed are never recomputed.
    When a cache database is attached new entries are written back to it.
    """

    def __init__(self, d: int, entries: Optional[Sequence[Tuple[IntPoly, IntPoly]]] = None,
                 database=None):
        validate_prime(d)
        self.d = d
        self.entries: List[Tuple[IntPoly, IntPoly]] = list(entries) if entries else [(ONE, ONE)]
        self.database = database
        self._lock = threading.Lock()

    def __len__(self):
        return len(self.entries)

    @property
    def max_n(self) -> int:
        return len(self.entries) - 1

    def extend(self, n: int) -> "OrbitTable":
        """Make sure entries 0..n exist"""
        if n < 0:
            raise InvalidParameter(f"orbit index must be >= 0, got {n}")
        with self._lock:
            new_rows = []
            try:
                while len(self.entries) <= n:
                    r, s = self.entries[-1]
                    r_next, s_next = step(self.d, r, s)
                    self.entries.append((r_next, s_next))
                    new_rows.append((len(self.entries) - 1, r_next, s_next))
                    logger.debug(
                        f"d={self.d}: n={len(self.entries) - 1} deg r={r_next.degree} deg s={s_next.degree}"
                    )
            finally:
                if new_rows and self.database is not None:
                    self.database.insert_entries_batch(self.d, new_rows)
        return self

    def r(self, n: int) -> IntPoly:
        self.extend(n)
        return self.entries[n][0]

    def s(self, n: int) -> IntPoly:
        self.extend(n)
        return self.entries[n][1]

    def truncated(self, n: int) -> "OrbitTable":
        """A detached table holding exactly entries 0..n"""
        self.extend(n)
        return OrbitTable(self.d, self.entries[: n + 1])

    def corrupted(self, n: int, delta: int = 1) -> "OrbitTable":
        """Detached copy with the constant term of s_n shifted by delta (negative control)"""
        self.extend(n)
        entries = list(self.entries[: n + 1])
        r, s = entries[n]
        entries[n] = (r, s + delta)
        return OrbitTable(self.d, entries)

    def check_recurrence(self) -> List[int]:
        """Indices n whose (r_n, s_n) does not follow from (r_{n-1}, s_{n-1})"""
        bad = []
        for n in range(1, len(self.entries)):
            if step(self.d, *self.entries[n - 1]) != self.entries[n]:
                bad.append(n)
        return bad


_tables: Dict[int, OrbitTable] = {}
_tables_lock = threading.Lock()
_database = None


def set_cache_path(path: Optional[str]):
    """Attach (or detach, with an empty path) the sqlite orbit cache"""
    global _database
    from database import OrbitDatabase

    with _tables_lock:
        _database = OrbitDatabase(path) if path else None
        _tables.clear()


def get_orbit_table(d: int) -> OrbitTable:
    """Shared table for d, seeded from the cache database when one is attached"""
    validate_prime(d)
    with _tables_lock:
        table = _tables.get(d)
        if table is None:
            cached = _database.get_entries(d) if _database is not None else []
            if cached:
                logger.info(f"d={d}: loaded {len(cached)} cached orbit entries")
            table = OrbitTable(d, [(ONE, ONE)] + cached, database=_database)
            _tables[d] = table
        return table


if CACHE_PATH:
    set_cache_path(CACHE_PATH)


def _table(d: int, table: Optional[OrbitTable]) -> OrbitTable:
    if table is None:
        return get_orbit_table(d)
    if table.d != d:
        raise InvalidParameter(f"table is for d={table.d}, not d={d}")
    return table


def orbit(d: int, n: int, table: Optional[OrbitTable] = None) -> OrbitTable:
    """phi_b^k([1, 1]) = [r_k, s_k] for k = 0..n"""
    validate_prime(d)
    if n < 0:
        raise InvalidParameter(f"n must be >= 0, got {n}")
    return _table(d, table).truncated(n)


def nij(d: int, n: int) -> Tuple[int, int]:
    """The unique (i, j) with n = d*i + j and j in {2, ..., d+1}"""
    if n < 2:
        raise InvalidParameter(f"n must be >= 2, got {n}")
    i = (n - 2) // d
    return i, n - d * i


def expected_degrees(d: int, n: int) -> Tuple[int, int, int, int]:
    """
    Closed-form degrees of r_n and s_n

    Returns:
        (deg r_n, deg s_n, i, j)
    """
    i, j = nij(d, n)
    deg_s = (d ** (n + d - 1) - d ** (j - 1)) // (d ** d - 1)
    return deg_s - (d - j), deg_s, i, j


def sigma_tau(d: int, m: int, table: Optional[OrbitTable] = None) -> Tuple[IntPoly, IntPoly]:
    """sigma_m = (b+1)d s_{m-1}^d and tau_m = s_m - sigma_m"""
    if m < 1:
        raise InvalidParameter(f"m must be >= 1, got {m}")
    t = _table(d, table)
    sigma = mul(b_plus_one_times_d(d), power(t.s(m - 1), d))
    return sigma, t.s(m) - sigma


def expected_sigma_tau_degrees(d: int, m: int) -> Tuple[int, int]:
    """Closed-form (deg sigma_m, deg tau_m) for m >= 2"""
    _, j = nij(d, m)
    denominator = d ** d - 1
    if m % d == 2 % d:
        deg_sigma = (d ** (m + d - 1) - d ** (d + 1)) // denominator + 1
        deg_tau = (d ** (m + d - 1) - d) // denominator
        return deg_sigma, deg_tau
    deg = (d ** (m + d - 1) - d ** (j - 1)) // denominator + 1
    return deg, deg


def expected_tau_degree(d: int, m: int) -> int:
    if m == 1:
        return 1
    return expected_sigma_tau_degrees(d, m)[1]


def expected_misiurewicz_degree(d: int, m: int) -> int:
    """deg G_m = deg tau_{m+1} - deg tau_m - 1"""
    return expected_tau_degree(d, m + 1) - expected_tau_degree(d, m) - 1


def repunit(d: int, m: int) -> int:
    """D_m = 1 + d + ... + d^(m-1) = (d^m - 1)/(d - 1)"""
    if m < 0:
        raise InvalidParameter(f"m must be >= 0, got {m}")
    return (d ** m - 1) // (d - 1)


class Route(str, Enum):
    DIRECT = "direct"
    VIA_TAU = "via_tau"
    LITERAL = "literal"


@dataclass(frozen=True)
class MisiurewiczPoly:
    d: int
    m: int
    poly: IntPoly
    construction_route: Route

    @property
    def degree(self) -> int:
        return self.poly.degree

    def to_json(self) -> Dict:
        return {
            "d": self.d,
            "m": self.m,
            "route": self.construction_route.value,
            **self.poly.to_json(),
        }


def _bd_times_g(d: int, sigma: IntPoly, geometric: IntPoly) -> IntPoly:
    """(b+1)d sigma^(d-1) - (bd+1) * geometric"""
    first = mul(b_plus_one_times_d(d), power(sigma, d - 1))
    return first - mul(IntPoly((1, d)), geometric)


def misiurewicz_direct(d: int, m: int, table: Optional[OrbitTable] = None) -> MisiurewiczPoly:
    """
    G_m from its defining bracket

    (s_m^d - sigma_m^d)/(s_m - sigma_m) is expanded as the geometric sum
    sum_k sigma_m^k s_m^(d-1-k), so the large numerator is never formed.
    """
    FamilyParams(d, m)
    t = _table(d, table)
    sigma, _ = sigma_tau(d, m, t)
    s_m = t.s(m)
    sigma_powers = [ONE]
    s_powers = [ONE]
    for _ in range(d - 1):
        sigma_powers.append(mul(sigma_powers[-1], sigma))
        s_powers.append(mul(s_powers[-1], s_m))
    geometric = ZERO
    for k in range(d):
        geometric = geometric + mul(sigma_powers[k], s_powers[d - 1 - k])
    numerator = _bd_times_g(d, sigma, geometric)
    g = exact_div(numerator, bd(d))
    logger.info(f"d={d} m={m}: direct route gave deg G_m = {g.degree}")
    return MisiurewiczPoly(d, m, g, Route.DIRECT)


def misiurewicz_literal(d: int, m: int, table: Optional[OrbitTable] = None) -> MisiurewiczPoly:
    """G_m with the literal division by (s_m - sigma_m); cross-check for small m"""
    FamilyParams(d, m)
    t = _table(d, table)
    sigma, tau = sigma_tau(d, m, t)
    s_m = t.s(m)
    if s_m.degree * d > LITERAL_DIVISION_MAX_DEGREE:
        raise ResourceGuardError(
            f"literal route needs deg {s_m.degree * d} > {LITERAL_DIVISION_MAX_DEGREE}"
        )
    geometric = exact_div(power(s_m, d) - power(sigma, d), tau)
    g = exact_div(_bd_times_g(d, sigma, geometric), bd(d))
    return MisiurewiczPoly(d, m, g, Route.LITERAL)


def misiurewicz_via_tau(d: int, m: int, table: Optional[OrbitTable] = None) -> MisiurewiczPoly:
    """G_m = tau_{m+1} / (bd tau_m)"""
    FamilyParams(d, m)
    t = _table(d, table)
    _, tau_m = sigma_tau(d, m, t)
    _, tau_next = sigma_tau(d, m + 1, t)
    g = exact_div(tau_next, mul(bd(d), tau_m))
    logger.info(f"d={d} m={m}: tau route gave deg G_m = {g.degree}")
    return MisiurewiczPoly(d, m, g, Route.VIA_TAU)


_ROUTES = {
    Route.DIRECT: misiurewicz_direct,
    Route.VIA_TAU: misiurewicz_via_tau,
    Route.LITERAL: misiurewicz_literal,
}

_misiurewicz_cache: Dict[Tuple[int, int, Route], MisiurewiczPoly] = {}


def misiurewicz(d: int, m: int, route: Route = Route.DIRECT,
                table: Optional[OrbitTable] = None) -> MisiurewiczPoly:
    """G_m by the chosen route; results on the shared tables are memoized"""
    route = Route(route)
    if table is not None:
        return _ROUTES[route](d, m, table)
    key = (d, m, route)
    if key not in _misiurewicz_cache:
        _misiurewicz_cache[key] = _ROUTES[route](d, m)
    return _misiurewicz_cache[key]


@dataclass(frozen=True)
class DecompositionTerms:
    """F_0..F_{d-1} with bd G_m = -sum F_k"""

    d: int
    m: int
    terms: Tuple[IntPoly, ...] = field(default_factory=tuple)

    def negated_sum(self) -> IntPoly:
        total = ZERO
        for term in self.terms:
            total = total - term
        return total


def decomposition_terms(d: int, m: int, table: Optional[OrbitTable] = None) -> DecompositionTerms:
    """
    F_k = (bd+1) C(d,k) sigma^k tau^(d-1-k) for k <= d-2,
    F_{d-1} = bd (d-1) sigma^(d-1)
    """
    FamilyParams(d, m)
    sigma, tau = sigma_tau(d, m, _table(d, table))
    sigma_powers = [ONE]
    tau_powers = [ONE]
    for _ in range(d - 1):
        sigma_powers.append(mul(sigma_powers[-1], sigma))
        tau_powers.append(mul(tau_powers[-1], tau))
    bd_plus_one = IntPoly((1, d))
    terms = []
    for k in range(d - 1):
        term = mul(bd_plus_one, mul(sigma_powers[k], tau_powers[d - 1 - k]))
        terms.append(term.scale(comb(d, k)))
    terms.append(mul(bd(d), sigma_powers[d - 1]).scale(d - 1))
    return DecompositionTerms(d, m, tuple(terms))


def r_closed_form(d: int, m: int, table: Optional[OrbitTable] = None) -> IntPoly:
    """((b+1)d)^m d^(d-1) (s_2 ... s_{m-1})^(d-1), valid for m >= 3"""
    if m < 3:
        raise InvalidParameter(f"closed form of r_m needs m >= 3, got {m}")
    t = _table(d, table)
    middle = product(t.s(k) for k in range(2, m))
    return mul(power(b_plus_one_times_d(d), m), power(middle, d - 1)).scale(d ** (d - 1))


def tau_product_form(d: int, m: int, table: Optional[OrbitTable] = None) -> IntPoly:
    """-(bd)^m G_{m-1} ... G_1"""
    if m < 1:
        raise InvalidParameter(f"m must be >= 1, got {m}")
    gs = [misiurewicz(d, k, table=table).poly for k in range(1, m)]
    return -mul(power(bd(d), m), product(gs))


def named_polynomial(d: int, name: str, index: int, table: Optional[OrbitTable] = None) -> IntPoly:
    """
    Look up r, s (index n), sigma, tau, G (index m) or F_k (index m)

    F_k names look like "F0", "F_2".
    """
    t = _table(d, table)
    key = name.strip()
    if key == "r":
        return t.r(index)
    if key == "s":
        return t.s(index)
    if key == "sigma":
        return sigma_tau(d, index, t)[0]
    if key == "tau":
        return sigma_tau(d, index, t)[1]
    if key == "G":
        return misiurewicz(d, index, table=table).poly
    if key.startswith("F"):
        digits = key[1:].lstrip("_")
        if not digits.isdigit():
            raise InvalidParameter(f"F_k names look like F0 or F_2, got {name!r}")
        k = int(digits)
        if not 0 <= k < d:
            raise InvalidParameter(f"F_k needs 0 <= k < {d}, got {k}")
        return decomposition_terms(d, index, t).terms[k]
    raise InvalidParameter(f"unknown polynomial name {name!r} (r, s, sigma, tau, G, F_k)")
