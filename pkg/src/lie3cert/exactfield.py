"""Exact arithmetic in the field Q(i, sqrt2, sqrt3).

An element is stored as eight integer numerators over one positive common
denominator, on the basis

    1, r2, r3, r6, i, i*r2, i*r3, i*r6      (r2 = sqrt 2, etc.)

Basis index k encodes (bit0 = r2, bit1 = r3, bit2 = i), so the product of two
basis vectors e_j * e_k is a rational multiple of e_{j xor k}.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union


class ZeroInverse(ZeroDivisionError):
    pass


class NotReal(ValueError):
    pass


def _basis_factor(j: int, k: int) -> int:
    shared = j & k
    f = 1
    if shared & 1:
        f *= 2
    if shared & 2:
        f *= 3
    if shared & 4:
        f = -f
    return f


_MUL = tuple(tuple(_basis_factor(j, k) for k in range(8)) for j in range(8))

BASIS_NAMES = ("1", "r2", "r3", "r6", "i", "i*r2", "i*r3", "i*r6")

Scalar = Union["FieldElement", int, Fraction]


class FieldElement:
    __slots__ = ("nums", "den", "_hash")

    def __init__(self, nums: Iterable[int], den: int = 1, _normalized: bool = False):
        nums = tuple(nums)
        if len(nums) != 8:
            raise ValueError("a field element has exactly 8 coordinates")
        if not _normalized:
            if den == 0:
                raise ZeroDivisionError("zero denominator")
            if den < 0:
                nums = tuple(-n for n in nums)
                den = -den
            g = math.gcd(den, *nums)
            if g > 1:
                nums = tuple(n // g for n in nums)
                den //= g
        self.nums = nums
        self.den = den
        self._hash = None

    # -- construction -------------------------------------------------
    @classmethod
    def from_coords(cls, coords: Iterable[Fraction | int]) -> "FieldElement":
        fr = [Fraction(c) for c in coords]
        den = 1
        for c in fr:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return cls([c.numerator * (den // c.denominator) for c in fr], den)

    @classmethod
    def rational(cls, q: Fraction | int) -> "FieldElement":
        q = Fraction(q)
        return cls((q.numerator, 0, 0, 0, 0, 0, 0, 0), q.denominator)

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(n, self.den) for n in self.nums)

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.nums)

    def is_real(self) -> bool:
        n = self.nums
        return not (n[4] or n[5] or n[6] or n[7])

    def is_rational(self) -> bool:
        n = self.nums
        return not any(n[1:])

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other: Scalar) -> "FieldElement":
        o = as_fe(other)
        if o is NotImplemented:
            return NotImplemented
        d1, d2 = self.den, o.den
        if d1 == d2:
            return FieldElement([a + b for a, b in zip(self.nums, o.nums)], d1)
        return FieldElement([a * d2 + b * d1 for a, b in zip(self.nums, o.nums)], d1 * d2)

    __radd__ = __add__

    def __neg__(self) -> "FieldElement":
        return FieldElement([-a for a in self.nums], self.den, _normalized=True)

    def __sub__(self, other: Scalar) -> "FieldElement":
        o = as_fe(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Scalar) -> "FieldElement":
        o = as_fe(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other: Scalar) -> "FieldElement":
        o = as_fe(other)
        if o is NotImplemented:
            return NotImplemented
        x, y = self.nums, o.nums
        out = [0] * 8
        for j in range(8):
            a = x[j]
            if not a:
                continue
            row = _MUL[j]
            for k in range(8):
                b = y[k]
                if b:
                    out[j ^ k] += row[k] * a * b
        return FieldElement(out, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "FieldElement":
        o = as_fe(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other: Scalar) -> "FieldElement":
        o = as_fe(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inv()

    def __pow__(self, n: int) -> "FieldElement":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inv() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> "FieldElement":
        n = self.nums
        return FieldElement(n[:4] + tuple(-a for a in n[4:]), self.den, _normalized=True)

    def real_part(self) -> "FieldElement":
        return FieldElement(self.nums[:4] + (0, 0, 0, 0), self.den)

    def imag_part(self) -> "FieldElement":
        return FieldElement(self.nums[4:] + (0, 0, 0, 0), self.den)

    def inv(self) -> "FieldElement":
        return _inverse(self)

    # -- comparison ---------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, FieldElement):
            return self.den == other.den and self.nums == other.nums
        if isinstance(other, (int, Fraction)):
            return self == FieldElement.rational(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nums, self.den))
        return self._hash

    def sign(self) -> int:
        return fe_real_sign(self)

    def __repr__(self) -> str:
        return f"FieldElement({format_fe(self)!r})"

    def __str__(self) -> str:
        return format_fe(self)


def as_fe(x) -> FieldElement:
    if isinstance(x, FieldElement):
        return x
    if isinstance(x, bool):
        return NotImplemented
    if isinstance(x, int):
        return FieldElement((x, 0, 0, 0, 0, 0, 0, 0), 1, _normalized=True)
    if isinstance(x, Fraction):
        return FieldElement((x.numerator, 0, 0, 0, 0, 0, 0, 0), x.denominator, _normalized=True)
    return NotImplemented


def _unit(k: int) -> FieldElement:
    nums = [0] * 8
    nums[k] = 1
    return FieldElement(nums, 1, _normalized=True)


ZERO = FieldElement((0,) * 8, 1, _normalized=True)
ONE = _unit(0)
R2 = _unit(1)
R3 = _unit(2)
R6 = _unit(3)
I = _unit(4)


@lru_cache(maxsize=65536)
def _inverse(x: FieldElement) -> FieldElement:
    # 1/x = conj(x) / N, N = x*conj(x) in Q(r2, r3); then rationalize
    # N = u + v*r3 with u, v in Q(r2), then u^2 - 3 v^2 = s + t*r2 in Q(r2).
    if x.is_zero():
        raise ZeroInverse("inverse of zero")
    if x.is_rational():
        return FieldElement((x.den, 0, 0, 0, 0, 0, 0, 0), x.nums[0])
    num = x.conj()
    n = x * num
    if not n.is_rational():
        c3 = _flip(n, 2)  # u - v*r3
        num = num * c3
        n = n * c3
        if not n.is_rational():
            c2 = _flip(n, 1)  # s - t*r2
            num = num * c2
            n = n * c2
    q = n.nums[0]
    return FieldElement([a * n.den for a in num.nums], num.den * q)


def _flip(x: FieldElement, bit: int) -> FieldElement:
    return FieldElement(
        [(-a if k & bit else a) for k, a in enumerate(x.nums)], x.den, _normalized=True
    )


def fe_arith(x: Scalar, y: Scalar, op: str) -> FieldElement:
    x, y = as_fe(x), as_fe(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown op {op!r}")


def fe_inv(x: Scalar) -> FieldElement:
    return as_fe(x).inv()


def fe_conj(x: Scalar) -> FieldElement:
    return as_fe(x).conj()


# -- sign of a real element ---------------------------------------------

def _sqrt_enclosure(n: int, bits: int) -> tuple[Fraction, Fraction]:
    s = math.isqrt(n << (2 * bits))
    return Fraction(s, 1 << bits), Fraction(s + 1, 1 << bits)


def _interval_of(x: FieldElement, bits: int) -> tuple[Fraction, Fraction]:
    lo = hi = Fraction(x.nums[0], x.den)
    for k, n in ((1, 2), (2, 3), (3, 6)):
        c = Fraction(x.nums[k], x.den)
        if not c:
            continue
        a, b = _sqrt_enclosure(n, bits)
        p, q = c * a, c * b
        lo += min(p, q)
        hi += max(p, q)
    return lo, hi


def fe_real_sign(x: Scalar) -> int:
    """Sign of a real element, decided by refining rational enclosures."""
    x = as_fe(x)
    if not x.is_real():
        raise NotReal(f"sign of non-real element {format_fe(x)}")
    if x.is_zero():
        return 0
    bits = 16
    while True:
        lo, hi = _interval_of(x, bits)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        bits *= 2


# -- text form ----------------------------------------------------------

def _fmt_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_quad(cs: tuple[Fraction, ...]) -> str:
    parts = []
    for c, name in zip(cs, ("", "r2", "r3", "r6")):
        if not c:
            continue
        if name == "":
            term = _fmt_rat(abs(c))
        elif abs(c) == 1:
            term = name
        else:
            term = f"{_fmt_rat(abs(c))}*{name}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if c > 0 else f"- {term}")
    return " ".join(parts)


def format_fe(x: FieldElement) -> str:
    """Canonical text: real part, then `(...)*i`; zero terms are dropped."""
    cs = x.coords
    re, im = cs[:4], cs[4:]
    if not any(im):
        return _fmt_quad(re) if any(re) else "0"
    ims = f"({_fmt_quad(im)})*i"
    if not any(re):
        return ims
    return f"{_fmt_quad(re)} + {ims}"


def parse_fe(text: str) -> FieldElement:
    from .expr import evaluate

    v = evaluate(text, {})
    if not isinstance(v, FieldElement):
        raise ValueError(f"{text!r} is not a scalar")
    return v
