"""
p-adic valuations and Newton polygons of integer polynomials

The principal polygon N_p^-(f) is the part of the lower convex hull of
{(i, ord_p(a_i))} made of negative-slope segments, starting at the first
nonzero coefficient. Factors of b are never a segment; they are counted by
leading_gap.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from sympy import multiplicity

from config import POWER_BOUND_MAX_DEGREE, POWER_BOUND_MAX_K
from intpoly import PLUS_INFINITY, Infinite, IntPoly

logger = logging.getLogger("padic")

INFINITY = PLUS_INFINITY

Valuation = Union[int, Infinite]
Point = Tuple[int, int]

# Brute-force residue search for root counting stays below this prime
MAX_RESIDUE_PRIME = 100_000


class ZeroPolynomial(ValueError):
    """Operation is undefined for the zero polynomial"""


class PrecisionTooLow(ArithmeticError):
    """A root candidate has a non-unit derivative, so lifting is ambiguous"""


class PowerBoundTooLarge(RuntimeError):
    """Power-valuation enumeration requested beyond its hard cap"""


def ord_p(x: int, p: int) -> Valuation:
    """Largest e with p^e | x; +inf for x = 0"""
    if x == 0:
        return INFINITY
    return int(multiplicity(p, abs(x)))


def coeff_valuations(f: IntPoly, p: int) -> List[Valuation]:
    """ord_p of every coefficient, index i for b^i"""
    return [ord_p(c, p) for c in f.coeffs]


def gauss_valuation(f: IntPoly, p: int) -> int:
    """V_p(f) = min_i ord_p(a_i); additive on products"""
    if f.is_zero():
        raise ZeroPolynomial("V_p of the zero polynomial")
    return min(v for v in coeff_valuations(f, p) if v is not INFINITY)


@dataclass(frozen=True)
class SegmentConstraint:
    """
    One polygon segment of slope -rise/run

    Every Q_p-irreducible factor attached to the segment has degree divisible
    by reduced_run; lattice_length = gcd(rise, run) bounds how many there are.
    """

    rise: int
    run: int
    reduced_run: int
    lattice_length: int

    @classmethod
    def from_segment(cls, rise: int, run: int) -> "SegmentConstraint":
        g = math.gcd(rise, run)
        return cls(rise=rise, run=run, reduced_run=run // g, lattice_length=g)

    @property
    def slope(self) -> Fraction:
        return Fraction(-self.rise, self.run)

    @property
    def single_factor(self) -> bool:
        """A lattice length of 1 forces exactly one irreducible factor"""
        return self.lattice_length == 1

    def to_json(self) -> Dict:
        return {
            "rise": self.rise,
            "run": self.run,
            "reduced_run": self.reduced_run,
            "lattice_length": self.lattice_length,
        }


def _segments_of(vertices: Sequence[Point]) -> List[Tuple[int, int]]:
    """(rise, run) per edge, rise = y drop (negative for rising edges)"""
    return [
        (y0 - y1, x1 - x0)
        for (x0, y0), (x1, y1) in zip(vertices, vertices[1:])
    ]


@dataclass(frozen=True)
class NewtonPolygon:
    """Full lower convex hull of the finite points (i, v_i)"""

    vertices: Tuple[Point, ...]
    p: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple((int(x), int(y)) for x, y in self.vertices))
        if not self.vertices:
            raise ValueError("a Newton polygon has at least one vertex")
        slopes = [Fraction(-rise, run) for rise, run in self.segments()]
        if any(run <= 0 for _, run in self.segments()):
            raise ValueError(f"vertex x must increase: {self.vertices}")
        if any(a >= b for a, b in zip(slopes, slopes[1:])):
            raise ValueError(f"slopes must increase strictly: {self.vertices}")

    @property
    def initial_point(self) -> Point:
        return self.vertices[0]

    @property
    def leading_gap(self) -> int:
        return self.vertices[0][0]

    @property
    def width(self) -> int:
        return self.vertices[-1][0] - self.vertices[0][0]

    def segments(self) -> List[Tuple[int, int]]:
        return _segments_of(self.vertices)

    def principal(self) -> "PrincipalPolygon":
        kept = [self.vertices[0]]
        for vertex in self.vertices[1:]:
            if vertex[1] >= kept[-1][1]:
                break
            kept.append(vertex)
        return PrincipalPolygon(tuple(kept), leading_gap=kept[0][0], p=self.p)

    def to_json(self) -> Dict:
        return {
            "p": self.p,
            "leading_gap": self.leading_gap,
            "vertices": [[x, y] for x, y in self.vertices],
            "segments": [
                {"rise": rise, "run": run, "slope": str(Fraction(-rise, run))}
                for rise, run in self.segments()
            ],
        }


@dataclass(frozen=True)
class PrincipalPolygon:
    """N_p^-(f): finite vertices from the initial point, all slopes negative"""

    vertices: Tuple[Point, ...]
    leading_gap: int
    p: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple((int(x), int(y)) for x, y in self.vertices))
        if not self.vertices:
            raise ValueError("a principal polygon has an initial point")
        if self.vertices[0][0] != self.leading_gap:
            raise ValueError("first vertex must sit at the leading gap")
        if any(x < 0 or y < 0 for x, y in self.vertices):
            raise ValueError(f"lattice vertices must be nonnegative: {self.vertices}")
        segs = self.segments()
        if any(run <= 0 or rise <= 0 for rise, run in segs):
            raise ValueError(f"principal segments must have negative slope: {self.vertices}")
        slopes = [Fraction(-rise, run) for rise, run in segs]
        if any(a >= b for a, b in zip(slopes, slopes[1:])):
            raise ValueError(f"slopes must increase strictly: {self.vertices}")

    @property
    def initial_point(self) -> Point:
        return self.vertices[0]

    def segments(self) -> List[Tuple[int, int]]:
        return _segments_of(self.vertices)

    def __eq__(self, other):
        if not isinstance(other, PrincipalPolygon):
            return NotImplemented
        return self.vertices == other.vertices and self.leading_gap == other.leading_gap

    def __hash__(self):
        return hash((self.vertices, self.leading_gap))

    def __str__(self):
        return "L(" + ",".join(f"({x},{y})" for x, y in self.vertices) + ")"

    def to_json(self) -> Dict:
        return {
            "p": self.p,
            "leading_gap": self.leading_gap,
            "vertices": [[x, y] for x, y in self.vertices],
            "segments": [c.to_json() for c in segment_constraints(self)],
        }


def _lower_hull(points: Sequence[Point]) -> List[Point]:
    """Andrew's monotone chain on points sorted by x; collinear points dropped"""
    hull: List[Point] = []
    for point in points:
        while len(hull) >= 2:
            (ox, oy), (ax, ay) = hull[-2], hull[-1]
            cross = (ax - ox) * (point[1] - oy) - (ay - oy) * (point[0] - ox)
            if cross > 0:
                break
            hull.pop()
        hull.append(point)
    return hull


def newton_polygon(f: IntPoly, p: int) -> NewtonPolygon:
    """Lower convex hull of {(i, ord_p(a_i)) : a_i != 0}"""
    if f.is_zero():
        raise ZeroPolynomial("Newton polygon of the zero polynomial")
    points = [(i, v) for i, v in enumerate(coeff_valuations(f, p)) if v is not INFINITY]
    return NewtonPolygon(tuple(_lower_hull(points)), p=p)


def principal_polygon(f: IntPoly, p: int) -> PrincipalPolygon:
    """N_p^-(f): negative-slope part of the Newton polygon"""
    return newton_polygon(f, p).principal()


def _assemble(initial: Point, segments: Iterable[Tuple[int, int]]) -> List[Point]:
    """Attach segments from the initial point in increasing slope, merging ties"""
    merged: Dict[Fraction, List[int]] = {}
    for rise, run in segments:
        slope = Fraction(-rise, run)
        bucket = merged.setdefault(slope, [0, 0])
        bucket[0] += rise
        bucket[1] += run
    vertices = [initial]
    for slope in sorted(merged):
        rise, run = merged[slope]
        x, y = vertices[-1]
        vertices.append((x + run, y - rise))
    return vertices


def polygon_sum(polys: Sequence[PrincipalPolygon]) -> PrincipalPolygon:
    """
    Sum of principal polygons: summed initial points, then every segment
    in increasing slope order. Equals the principal polygon of the product.
    """
    if not polys:
        return PrincipalPolygon(((0, 0),), leading_gap=0)
    x0 = sum(poly.initial_point[0] for poly in polys)
    y0 = sum(poly.initial_point[1] for poly in polys)
    segments = [seg for poly in polys for seg in poly.segments()]
    p = polys[0].p if all(poly.p == polys[0].p for poly in polys) else None
    return PrincipalPolygon(tuple(_assemble((x0, y0), segments)), leading_gap=x0, p=p)


def full_polygon_sum(polys: Sequence[NewtonPolygon]) -> NewtonPolygon:
    """Same rule for full polygons (all slopes)"""
    if not polys:
        return NewtonPolygon(((0, 0),))
    x0 = sum(poly.initial_point[0] for poly in polys)
    y0 = sum(poly.initial_point[1] for poly in polys)
    segments = [seg for poly in polys for seg in poly.segments()]
    p = polys[0].p if all(poly.p == polys[0].p for poly in polys) else None
    return NewtonPolygon(tuple(_assemble((x0, y0), segments)), p=p)


def segment_constraints(poly: Union[PrincipalPolygon, NewtonPolygon]) -> List[SegmentConstraint]:
    """Reduced slope and lattice length of every segment"""
    return [SegmentConstraint.from_segment(rise, run) for rise, run in poly.segments()]


def qp_factor_degree_bound(f: IntPoly, p: int) -> Tuple[int, int]:
    """
    Degree guaranteed for some Q_p-irreducible factor, from N_p^-(f)

    A segment with lattice length 1 carries exactly one irreducible factor of
    degree run; a longer segment only guarantees a factor of degree at least
    reduced_run.

    Returns:
        (bound, leading_gap); bound is 0 when there is no negative-slope segment
    """
    principal = principal_polygon(f, p)
    # reduced_run == run when the segment is a single factor
    bound = max((c.reduced_run for c in segment_constraints(principal)), default=0)
    return bound, principal.leading_gap


def local_degree_sums(f: IntPoly, p: int) -> FrozenSet[int]:
    """Degrees a factor of f over Q_p can have, from the full Newton polygon"""
    return polygon_degree_sums(newton_polygon(f, p))


def polygon_degree_sums(polygon: NewtonPolygon) -> FrozenSet[int]:
    """
    Each segment of run l and reduced run e contributes partial degrees
    {0, e, 2e, ..., l}; factors b contribute {0, ..., leading_gap}.
    """
    sums = (1 << (polygon.leading_gap + 1)) - 1
    for constraint in segment_constraints(polygon):
        step = constraint.reduced_run
        shifted = 0
        for multiple in range(0, constraint.run + 1, step):
            shifted |= sums << multiple
        sums = shifted
    return frozenset(i for i in range(sums.bit_length()) if sums >> i & 1)


def _nondecreasing_tuples(k: int, n: int, total: int) -> Iterable[Tuple[int, ...]]:
    for alpha in combinations_with_replacement(range(n + 1), k):
        if sum(alpha) == total:
            yield alpha


def power_valuation_bound(f: IntPoly, p: int, k: int, i: int) -> Valuation:
    """
    Lower bound for v_i(f^k)

    Minimum over nondecreasing k-tuples alpha with sum i of
    ord_p(k! / N(alpha)) + sum_j v_{alpha_j}(f), where N(alpha) counts the
    permutations that keep alpha sorted.
    """
    if f.is_zero():
        raise ZeroPolynomial("power bound of the zero polynomial")
    if k < 1:
        raise ValueError("k must be positive")
    n = f.degree
    if not 0 <= i <= k * n:
        raise ValueError(f"index {i} outside [0, {k * n}]")
    if k > POWER_BOUND_MAX_K or n > POWER_BOUND_MAX_DEGREE:
        raise PowerBoundTooLarge(
            f"k={k}, deg={n} beyond cap (k <= {POWER_BOUND_MAX_K}, deg <= {POWER_BOUND_MAX_DEGREE})"
        )
    vals = coeff_valuations(f, p)
    k_factorial = math.factorial(k)
    best: Valuation = INFINITY
    for alpha in _nondecreasing_tuples(k, n, i):
        if any(vals[a] is INFINITY for a in alpha):
            continue
        keep_order = math.prod(math.factorial(c) for c in Counter(alpha).values())
        term = ord_p(k_factorial // keep_order, p) + sum(vals[a] for a in alpha)
        if term < best:
            best = term
    return best


@dataclass(frozen=True)
class PadicRoot:
    """A simple root p^valuation * unit with the unit known mod p^precision"""

    valuation: Valuation
    unit: int
    precision: int

    def to_json(self) -> Dict:
        valuation = "inf" if self.valuation is INFINITY else self.valuation
        return {"valuation": valuation, "unit": str(self.unit), "precision": self.precision}


def _unit_part(c: int, p: int, v: int) -> int:
    return c // p ** v


def _hensel_lift(h: IntPoly, root: int, p: int, precision: int) -> int:
    """Newton iteration for a simple root, doubling precision each step"""
    dh = h.derivative()
    current = 1
    while current < precision:
        current = min(2 * current, precision)
        modulus = p ** current
        inverse = pow(dh.evaluate(root) % modulus, -1, modulus)
        root = (root - h.evaluate(root) * inverse) % modulus
    return root


def padic_simple_roots(f: IntPoly, p: int, precision: int) -> List[PadicRoot]:
    """
    Roots of f in Q_p found through the residual polynomials of the
    integer-slope segments of the full Newton polygon

    A segment of slope -s gives the roots of valuation s; substituting
    b = p^s u and dividing out the segment's level leaves an integral h(u) whose
    reduction on the segment is the residual polynomial. Its simple nonzero
    roots lift uniquely. Segments with non-integral slope carry no Q_p root.
    A simple root at b = 0 is reported with infinite valuation and unit 0.

    Raises:
        PrecisionTooLow: a repeated nonzero residual root, or b^2 | f
    """
    if f.is_zero():
        raise ZeroPolynomial("roots of the zero polynomial")
    if precision < 1:
        raise ValueError("precision must be at least 1")
    if p > MAX_RESIDUE_PRIME:
        raise ValueError(f"residue search limited to p <= {MAX_RESIDUE_PRIME}")

    gap = f.low_order()
    if gap >= 2:
        raise PrecisionTooLow(f"b = 0 is a root of multiplicity {gap}")

    vals = coeff_valuations(f, p)
    polygon = newton_polygon(f, p)
    roots: List[PadicRoot] = []
    if gap == 1:
        roots.append(PadicRoot(valuation=INFINITY, unit=0, precision=precision))

    for (x0, y0), (x1, y1) in zip(polygon.vertices, polygon.vertices[1:]):
        rise, run = y0 - y1, x1 - x0
        if rise % run:
            continue
        s = rise // run
        level = y0 + s * x0
        h_coeffs = []
        for i, c in enumerate(f.coeffs):
            if c == 0:
                h_coeffs.append(0)
                continue
            excess = vals[i] + s * i - level
            h_coeffs.append(_unit_part(c, p, vals[i]) * p ** excess)
        h = IntPoly(tuple(h_coeffs))
        residual = IntPoly(tuple(h[i] % p for i in range(x0, x1 + 1)))
        d_residual = residual.derivative()

        for u in range(1, p):
            if residual.evaluate(u) % p:
                continue
            if d_residual.evaluate(u) % p == 0:
                raise PrecisionTooLow(
                    f"repeated residual root {u} mod {p} on slope {Fraction(-rise, run)}"
                )
            unit = _hensel_lift(h, u, p, precision)
            roots.append(PadicRoot(valuation=s, unit=unit, precision=precision))
        logger.debug(f"p={p}: segment ({x0},{y0})-({x1},{y1}) slope -{s} gave {len(roots)} roots so far")

    return roots


def padic_root_count(f: IntPoly, p: int, precision: int) -> int:
    """Number of simple Q_p roots detected; evidence '>= count', not a factorization"""
    return len(padic_simple_roots(f, p, precision))
