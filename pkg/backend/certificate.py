"""
Irreducibility certificates: Newton polygon constraints over Q_p combined
with mod-q factor degree sets
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence

from config import AUX_PRIME_COUNT, AUX_PRIME_SEARCH_LIMIT, DEFAULT_PRECISION
from intpoly import IntPoly
from modp_factor import (
    DegreeMultiset,
    NoUsablePrime,
    SkippedPrime,
    candidate_primes,
    ddf,
    degree_multisets,
    possible_factor_degrees,
    reduce_mod,
)
from orbit_dynamics import FamilyParams, OrbitTable, Route, misiurewicz, validate_prime
from padic_newton import (
    MAX_RESIDUE_PRIME,
    NewtonPolygon,
    PrecisionTooLow,
    newton_polygon,
    padic_root_count,
    polygon_degree_sums,
    segment_constraints,
)

logger = logging.getLogger("certificate")


class Verdict(str, Enum):
    IRREDUCIBLE_OVER_Q = "IrreducibleOverQ"
    LARGE_FACTOR_ONLY = "LargeFactorOnly"
    INCONCLUSIVE = "Inconclusive"


class LocalVerdict(str, Enum):
    IRREDUCIBLE_OVER_QP = "IrreducibleOverQd"
    REDUCIBLE_OVER_QP = "ReducibleOverQd"
    UNDETERMINED = "Undetermined"


class CertificateRoute(str, Enum):
    TRIVIAL = "trivial"
    POLYGON = "polygon"
    MODULAR = "modular"
    NONE = "none"


@dataclass
class IrreducibilityCertificate:
    """
    Verdict plus the evidence it rests on

    Claims are about the core: f = content * b^leading_gap * core, with the
    core primitive and of positive leading coefficient.
    """

    d: Optional[int]
    m: Optional[int]
    p: int
    degree: int
    content: str
    leading_gap: int
    core_degree: int
    newton_polygon: NewtonPolygon
    polygon_bound: int
    local_degrees: List[int]
    per_prime: List[DegreeMultiset] = field(default_factory=list)
    skipped_primes: List[SkippedPrime] = field(default_factory=list)
    possible_degrees: List[int] = field(default_factory=list)
    excluded_degrees: List[int] = field(default_factory=list)
    large_factor_degree_min: Optional[int] = None
    padic_root_count: Optional[int] = None
    verdict: Verdict = Verdict.INCONCLUSIVE
    local_verdict: LocalVerdict = LocalVerdict.UNDETERMINED
    route: CertificateRoute = CertificateRoute.NONE
    narrative: List[str] = field(default_factory=list)

    def to_json(self) -> Dict:
        """Stable field order; every integer that can grow is a decimal string"""
        return {
            "d": self.d,
            "m": self.m,
            "p": self.p,
            "degree": self.degree,
            "content": self.content,
            "leading_gap": self.leading_gap,
            "core_degree": self.core_degree,
            "verdict": self.verdict.value,
            "local_verdict": self.local_verdict.value,
            "route": self.route.value,
            "polygon_bound": self.polygon_bound,
            "large_factor_degree_min": self.large_factor_degree_min,
            "newton_polygon": self.newton_polygon.to_json(),
            "local_degrees": list(self.local_degrees),
            "per_prime": [multiset.to_json() for multiset in self.per_prime],
            "skipped_primes": [skipped.to_json() for skipped in self.skipped_primes],
            "possible_degrees": list(self.possible_degrees),
            "excluded_degrees": list(self.excluded_degrees),
            "padic_root_count": self.padic_root_count,
            "narrative": list(self.narrative),
        }

    @classmethod
    def from_json(cls, data: Dict) -> "IrreducibilityCertificate":
        polygon = data["newton_polygon"]
        return cls(
            d=data["d"],
            m=data["m"],
            p=data["p"],
            degree=data["degree"],
            content=data["content"],
            leading_gap=data["leading_gap"],
            core_degree=data["core_degree"],
            newton_polygon=NewtonPolygon(
                tuple(tuple(v) for v in polygon["vertices"]), p=polygon["p"]
            ),
            polygon_bound=data["polygon_bound"],
            local_degrees=list(data["local_degrees"]),
            per_prime=[
                DegreeMultiset(
                    entry["q"],
                    tuple((e["degree"], e["count"]) for e in entry["entries"]),
                    entry["squarefree"],
                )
                for entry in data["per_prime"]
            ],
            skipped_primes=[SkippedPrime(s["q"], s["reason"]) for s in data["skipped_primes"]],
            possible_degrees=list(data["possible_degrees"]),
            excluded_degrees=list(data["excluded_degrees"]),
            large_factor_degree_min=data["large_factor_degree_min"],
            padic_root_count=data["padic_root_count"],
            verdict=Verdict(data["verdict"]),
            local_verdict=LocalVerdict(data["local_verdict"]),
            route=CertificateRoute(data["route"]),
            narrative=list(data["narrative"]),
        )


def split_core(f: IntPoly):
    """f = content * b^gap * core with core primitive, core(0) != 0, lc(core) > 0"""
    gap = f.low_order()
    content, primitive = IntPoly(f.coeffs[gap:]).content_and_primitive()
    return content, gap, primitive


def _local_verdict(polygon: NewtonPolygon, local: frozenset, n: int,
                   root_count: Optional[int]) -> LocalVerdict:
    if local == frozenset({0, n}):
        return LocalVerdict.IRREDUCIBLE_OVER_QP
    # one factor per slope
    if len(polygon.segments()) >= 2:
        return LocalVerdict.REDUCIBLE_OVER_QP
    if root_count and n >= 2:
        return LocalVerdict.REDUCIBLE_OVER_QP
    return LocalVerdict.UNDETERMINED


def _decide(n: int, local: frozenset, possible: Optional[frozenset], bound: int):
    """(verdict, route, large_factor_degree_min) from the evidence sets"""
    if n <= 1:
        return Verdict.IRREDUCIBLE_OVER_Q, CertificateRoute.TRIVIAL, n
    trivial = frozenset({0, n})
    if local == trivial:
        return Verdict.IRREDUCIBLE_OVER_Q, CertificateRoute.POLYGON, n
    if possible is not None and possible == trivial:
        return Verdict.IRREDUCIBLE_OVER_Q, CertificateRoute.MODULAR, n
    if bound >= 2:
        candidates = possible if possible is not None else local
        large = min(s for s in candidates if s >= bound)
        return Verdict.LARGE_FACTOR_ONLY, CertificateRoute.NONE, large
    return Verdict.INCONCLUSIVE, CertificateRoute.NONE, None


def _render(degrees: Iterable[int]) -> str:
    return "{" + ", ".join(str(s) for s in sorted(degrees)) + "}"


def certify_polynomial(f: IntPoly, p: int, primes: Optional[Sequence[int]] = None,
                       precision: int = DEFAULT_PRECISION, aux_count: int = AUX_PRIME_COUNT,
                       search_limit: int = AUX_PRIME_SEARCH_LIMIT, d: Optional[int] = None,
                       m: Optional[int] = None) -> IrreducibilityCertificate:
    """
    Certify the core of any nonzero integer polynomial

    Args:
        f: polynomial to certify
        p: prime for the Newton polygon
        primes: explicit auxiliary primes (empty: polygon evidence only); default is
            the first usable primes != p, widened up to search_limit tries while
            the verdict is not reached
        precision: p-adic lifting precision for the root count

    Returns:
        IrreducibilityCertificate
    """
    if f.is_zero():
        raise ValueError("cannot certify the zero polynomial")
    validate_prime(p, name="p")
    for q in primes or ():
        validate_prime(q, name="auxiliary prime")
    content, gap, core = split_core(f)
    n = core.degree
    if n < 1:
        raise ValueError("nothing to certify: the core of f is constant")

    narrative = [f"deg f = {f.degree}; content {content} removed; b^{gap} split off; core degree {n}"]

    polygon = newton_polygon(core, p)
    principal = polygon.principal()
    constraints = segment_constraints(principal)
    bound = max((c.reduced_run for c in constraints), default=0)
    local = polygon_degree_sums(polygon)
    narrative.append(f"N_{p}^-(core) = {principal}; forced Q_{p} factor degree >= {bound}")
    for c in constraints:
        kind = "one irreducible factor" if c.single_factor else f"factors of degree divisible by {c.reduced_run}"
        narrative.append(f"segment rise {c.rise} run {c.run}: {kind}")
    narrative.append(f"Q_{p} factor degree sums {_render(local)}")

    root_count = None
    if p <= MAX_RESIDUE_PRIME:
        try:
            root_count = padic_root_count(core, p, precision)
            narrative.append(f"{root_count} simple Q_{p} roots lifted to precision {precision}")
        except PrecisionTooLow as e:
            narrative.append(f"Q_{p} root count undetermined: {e}")

    per_prime: List[DegreeMultiset] = []
    skipped: List[SkippedPrime] = []
    possible = None
    if n >= 2 and local != frozenset({0, n}) and (primes is None or len(primes) > 0):
        if primes is not None:
            per_prime, skipped = degree_multisets(core, primes, count=len(primes))
        else:
            pool = candidate_primes(exclude={p})
            per_prime, skipped = degree_multisets(core, pool, count=aux_count,
                                                  max_tried=search_limit)
            tried = len(per_prime) + len(skipped)
            while per_prime and tried < search_limit and \
                    (local & possible_factor_degrees(per_prime)) != frozenset({0, n}):
                more, more_skipped = degree_multisets(core, pool, count=1,
                                                      max_tried=search_limit - tried)
                if not more and not more_skipped:
                    break
                per_prime.extend(more)
                skipped.extend(more_skipped)
                tried += len(more) + len(more_skipped)
            if len(per_prime) > aux_count:
                logger.info(f"widened auxiliary primes to {len(per_prime)}")
        if not per_prime:
            raise NoUsablePrime(f"no usable auxiliary prime for a degree {n} core")
        for multiset in per_prime:
            narrative.append(f"mod {multiset.q}: factor degrees {multiset.degrees()}")
        possible = local & possible_factor_degrees(per_prime)
        narrative.append(f"possible Q factor degrees {_render(possible)}")

    verdict, route, large = _decide(n, local, possible, bound)
    local_verdict = _local_verdict(polygon, local, n, root_count)
    narrative.append(f"verdict {verdict.value} via {route.value}; over Q_{p}: {local_verdict.value}")
    logger.info(f"d={d} m={m}: {verdict.value} ({route.value})")

    survivors = possible if possible is not None else local
    return IrreducibilityCertificate(
        d=d,
        m=m,
        p=p,
        degree=f.degree,
        content=str(content),
        leading_gap=gap,
        core_degree=n,
        newton_polygon=polygon,
        polygon_bound=bound,
        local_degrees=sorted(local),
        per_prime=per_prime,
        skipped_primes=skipped,
        possible_degrees=sorted(survivors),
        excluded_degrees=sorted(set(range(n + 1)) - survivors),
        large_factor_degree_min=large,
        padic_root_count=root_count,
        verdict=verdict,
        local_verdict=local_verdict,
        route=route,
        narrative=narrative,
    )


def certify(d: int, m: int, primes: Optional[Sequence[int]] = None,
            precision: int = DEFAULT_PRECISION, p: Optional[int] = None,
            table: Optional[OrbitTable] = None, route: Route = Route.DIRECT,
            aux_count: int = AUX_PRIME_COUNT) -> IrreducibilityCertificate:
    """Certificate for the Misiurewicz polynomial G_m of degree d"""
    params = FamilyParams(d, m, p)
    g = misiurewicz(d, m, route=route, table=table)
    return certify_polynomial(g.poly, params.p, primes=primes, precision=precision,
                              aux_count=aux_count, d=d, m=m)


def audit_certificate(cert: IrreducibilityCertificate, f: Optional[IntPoly] = None) -> List[str]:
    """
    Replay the evidence chain and re-derive the verdict

    With f given, the polygon and every degree multiset are recomputed too.

    Returns:
        list of discrepancies (empty when the certificate holds)
    """
    problems = []
    n = cert.core_degree

    if f is not None:
        content, gap, core = split_core(f)
        if (str(content), gap, core.degree) != (cert.content, cert.leading_gap, n):
            problems.append("content/leading gap/core degree do not match f")
        elif newton_polygon(core, cert.p) != cert.newton_polygon:
            problems.append("recorded Newton polygon differs from f")
        else:
            for multiset in cert.per_prime:
                if ddf(reduce_mod(core, multiset.q)) != multiset:
                    problems.append(f"degree multiset mod {multiset.q} differs from f")

    local = polygon_degree_sums(cert.newton_polygon)
    if sorted(local) != list(cert.local_degrees):
        problems.append("local degree sums do not follow from the polygon")
    bound = max((c.reduced_run for c in segment_constraints(cert.newton_polygon.principal())),
                default=0)
    if bound != cert.polygon_bound:
        problems.append(f"polygon bound {cert.polygon_bound} != replayed {bound}")

    for multiset in cert.per_prime:
        if multiset.total_degree != n:
            problems.append(f"mod {multiset.q} degrees sum to {multiset.total_degree}, not {n}")

    possible = None
    if cert.per_prime:
        possible = local & possible_factor_degrees(cert.per_prime)
    survivors = possible if possible is not None else local
    if sorted(survivors) != list(cert.possible_degrees):
        problems.append("possible degrees do not follow from the evidence")
    if sorted(set(range(n + 1)) - survivors) != list(cert.excluded_degrees):
        problems.append("excluded degrees do not follow from the evidence")

    verdict, route, large = _decide(n, local, possible, bound)
    if (verdict, route, large) != (cert.verdict, cert.route, cert.large_factor_degree_min):
        problems.append(
            f"verdict {cert.verdict.value}/{cert.route.value} but evidence gives {verdict.value}/{route.value}"
        )
    if _local_verdict(cert.newton_polygon, local, n, cert.padic_root_count) != cert.local_verdict:
        problems.append("local verdict does not follow from the polygon")
    return problems
