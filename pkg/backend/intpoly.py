"""
Exact dense univariate polynomials over the integers

Coefficients are Python ints (arbitrary precision), index i holds the
coefficient of b^i. Values are immutable and every operation is exact.
"""

import logging
import math
import operator
import sys
from dataclasses import dataclass
from functools import total_ordering
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from config import SIZE_CAP

logger = logging.getLogger("intpoly")

# Coefficient dumps routinely exceed the 4300-digit str() default
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

# Below this many terms in the shorter factor the schoolbook product wins
KRONECKER_THRESHOLD = 24


class NotDivisible(ArithmeticError):
    """Exact division left a nonzero remainder"""


class ResourceGuardError(RuntimeError):
    """A computation would exceed the configured size cap"""


@total_ordering
class Infinite:
    """Signed infinity marker, comparable with ints (degree of 0, ord_p of 0)"""

    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = 1 if sign > 0 else -1

    def __eq__(self, other):
        return isinstance(other, Infinite) and other.sign == self.sign

    def __lt__(self, other):
        if isinstance(other, Infinite):
            return self.sign < other.sign
        if isinstance(other, int):
            return self.sign < 0
        return NotImplemented

    def __hash__(self):
        return hash(("Infinite", self.sign))

    def __add__(self, other):
        if isinstance(other, Infinite) and other.sign != self.sign:
            raise ArithmeticError("inf - inf is undefined")
        if isinstance(other, (int, Infinite)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Infinite(-self.sign)

    def __repr__(self):
        return "+inf" if self.sign > 0 else "-inf"

    __str__ = __repr__


MINUS_INFINITY = Infinite(-1)
PLUS_INFINITY = Infinite(1)

Degree = Union[int, Infinite]

_size_cap = SIZE_CAP


def set_size_cap(cap: int):
    """Set the resource guard (max degree x max coefficient bit length)"""
    global _size_cap
    if cap <= 0:
        raise ValueError("size cap must be positive")
    _size_cap = cap


def get_size_cap() -> int:
    return _size_cap


def check_size(degree: int, bits: int, what: str = "polynomial"):
    """Abort before building a polynomial beyond the configured size cap"""
    if degree * bits > _size_cap:
        logger.error(f"Resource guard: {what} needs degree {degree} x {bits} bits > cap {_size_cap}")
        raise ResourceGuardError(
            f"{what} would have degree {degree} with ~{bits}-bit coefficients "
            f"(size {degree * bits} > cap {_size_cap})"
        )


@dataclass(frozen=True)
class IntPoly:
    """Immutable dense polynomial in Z[b]; the zero polynomial has no coefficients"""

    coeffs: Tuple[int, ...] = ()

    def __post_init__(self):
        coeffs = [operator.index(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def constant(cls, c: int) -> "IntPoly":
        return cls((c,))

    @property
    def degree(self) -> Degree:
        return len(self.coeffs) - 1 if self.coeffs else MINUS_INFINITY

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading_coefficient(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __getitem__(self, i: int) -> int:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def max_bits(self) -> int:
        """Bit length of the largest coefficient in absolute value"""
        return max((abs(c).bit_length() for c in self.coeffs), default=0)

    def low_order(self) -> int:
        """Index of the first nonzero coefficient (the number of factors b)"""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        raise ValueError("zero polynomial has no nonzero coefficient")

    def __add__(self, other):
        if isinstance(other, int):
            other = IntPoly.constant(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return IntPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, int):
            other = IntPoly.constant(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        return add(self, -other)

    def __rsub__(self, other):
        if isinstance(other, int):
            return add(IntPoly.constant(other), -self)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return power(self, k)

    def scale(self, c: int) -> "IntPoly":
        return IntPoly(tuple(c * a for a in self.coeffs))

    def shift(self, k: int) -> "IntPoly":
        """Multiply by b^k"""
        if not self.coeffs:
            return self
        return IntPoly((0,) * k + self.coeffs)

    def evaluate(self, x: int) -> int:
        result = 0
        for c in reversed(self.coeffs):
            result = result * x + c
        return result

    def derivative(self) -> "IntPoly":
        return IntPoly(tuple(i * c for i, c in enumerate(self.coeffs) if i > 0))

    def content(self) -> int:
        """Nonnegative gcd of the coefficients (0 for the zero polynomial)"""
        return math.gcd(*self.coeffs) if self.coeffs else 0

    def content_and_primitive(self) -> Tuple[int, "IntPoly"]:
        """Split f = c * g with g primitive and positive leading coefficient"""
        if not self.coeffs:
            raise ValueError("zero polynomial has no primitive part")
        c = self.content()
        if self.coeffs[-1] < 0:
            c = -c
        return c, IntPoly(tuple(a // c for a in self.coeffs))

    def to_json(self) -> Dict:
        """Coefficient dump; decimal strings, ascending powers"""
        return {
            "degree": self.degree if self.coeffs else None,
            "coeffs": [str(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: Dict) -> "IntPoly":
        poly = cls(tuple(int(c) for c in data["coeffs"]))
        expected = data.get("degree")
        if expected is not None and poly.degree != expected:
            raise ValueError(f"degree field {expected} does not match coefficients")
        return poly

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                power_part = "b" if i == 1 else f"b^{i}"
                body = power_part if mag == 1 else f"{mag}*{power_part}"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


ZERO = IntPoly()
ONE = IntPoly((1,))
B = IntPoly((0, 1))


def poly(coeffs: Iterable[int]) -> IntPoly:
    """Build an IntPoly from ascending coefficients"""
    return IntPoly(tuple(coeffs))


def degree(f: IntPoly) -> Degree:
    return f.degree


def add(f: IntPoly, g: IntPoly) -> IntPoly:
    """Coefficientwise exact sum"""
    a, b = f.coeffs, g.coeffs
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return IntPoly(tuple(out))


def _schoolbook(a: Sequence[int], b: Sequence[int]) -> List[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _pack(coeffs: Sequence[int], nbytes: int) -> int:
    """Evaluate at 2^(8*nbytes); every |c| must fit in nbytes bytes"""
    pos = b"".join((c if c > 0 else 0).to_bytes(nbytes, "little") for c in coeffs)
    neg = b"".join((-c if c < 0 else 0).to_bytes(nbytes, "little") for c in coeffs)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _unpack(value: int, nbytes: int, count: int) -> List[int]:
    """Inverse of _pack for balanced digits in [-2^(k-1), 2^(k-1))"""
    half = 1 << (8 * nbytes - 1)
    offset = int.from_bytes(half.to_bytes(nbytes, "little") * count, "little")
    raw = (value + offset).to_bytes(nbytes * count, "little")
    return [
        int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half
        for i in range(count)
    ]


def _kronecker(a: Sequence[int], b: Sequence[int], bits: int) -> List[int]:
    nbytes = (bits + 1 + 7) // 8
    count = len(a) + len(b) - 1
    if a is b:
        packed = _pack(a, nbytes)
        product = packed * packed
    else:
        product = _pack(a, nbytes) * _pack(b, nbytes)
    return _unpack(product, nbytes, count)


def mul(f: IntPoly, g: IntPoly) -> IntPoly:
    """
    Exact product

    Small operands use the schoolbook product; larger ones are packed into a
    single integer (Kronecker substitution) so the big-int multiply does the work.
    """
    if not f.coeffs or not g.coeffs:
        return ZERO
    a, b = f.coeffs, g.coeffs
    shorter = min(len(a), len(b))
    bits = f.max_bits() + g.max_bits() + shorter.bit_length()
    check_size(len(a) + len(b) - 2, bits, "product")
    if shorter <= KRONECKER_THRESHOLD:
        return IntPoly(tuple(_schoolbook(a, b)))
    if f is g:
        return IntPoly(tuple(_kronecker(a, a, bits)))
    return IntPoly(tuple(_kronecker(a, b, bits)))


def power(f: IntPoly, k: int) -> IntPoly:
    """Exact k-th power by repeated squaring; power(f, 0) = 1"""
    if k < 0:
        raise ValueError("exponent must be nonnegative")
    if k == 0:
        return ONE
    if f.coeffs:
        check_size(f.degree * k, f.max_bits() * k, "power")
    result = None
    base = f
    while k:
        if k & 1:
            result = base if result is None else mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


def product(factors: Iterable[IntPoly]) -> IntPoly:
    """Balanced product of several polynomials"""
    items = list(factors)
    if not items:
        return ONE
    while len(items) > 1:
        paired = [mul(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            paired.append(items[-1])
        items = paired
    return items[0]


def exact_div(f: IntPoly, g: IntPoly) -> IntPoly:
    """
    Return q with f = q * g exactly

    Raises:
        ZeroDivisionError: g is the zero polynomial
        NotDivisible: g does not divide f in Z[b]
    """
    if not g.coeffs:
        raise ZeroDivisionError("exact_div by the zero polynomial")
    if not f.coeffs:
        return ZERO

    # Strip common factors of b first; tau_m carries b^m
    shift = g.low_order()
    fc, gc = list(f.coeffs), g.coeffs[shift:]
    if shift:
        if any(fc[:shift]):
            raise NotDivisible(f"divisor has b^{shift} but the dividend does not")
        fc = fc[shift:]

    df, dg = len(fc) - 1, len(gc) - 1
    if df < dg:
        raise NotDivisible(f"deg {df} dividend is below deg {dg} divisor")
    lc = gc[-1]
    quotient = [0] * (df - dg + 1)
    for i in range(df - dg, -1, -1):
        c, r = divmod(fc[i + dg], lc)
        if r:
            raise NotDivisible(f"leading coefficient step at b^{i + dg} leaves remainder")
        quotient[i] = c
        if c:
            for j in range(dg):
                fc[i + j] -= c * gc[j]
        fc[i + dg] = 0
    if any(fc[:dg]):
        raise NotDivisible("nonzero remainder")
    return IntPoly(tuple(quotient))
