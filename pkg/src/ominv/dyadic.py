"""Exact dyadic numbers, real intervals and complex rectangles.

All certified numerics in the package run on these types: endpoints are
dyadic rationals (m * 2**e with integer m, e), so +, -, * are exact and
rounding happens only where we ask for it (division, precision capping,
transcendental functions routed through mpmath's interval context).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

import mpmath

try:  # fast exact rationals when gmpy2 is around; Fraction otherwise
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover
    Rat = Fraction

RatLike = Union[int, Fraction, "Rat"]


def _bit_length(m: int) -> int:
    return abs(m).bit_length()


class Dyadic:
    """Exact dyadic rational m * 2**e."""

    __slots__ = ("m", "e")

    def __init__(self, m: int, e: int = 0):
        if m == 0:
            e = 0
        else:
            # normalize: strip trailing zero bits
            tz = (m & -m).bit_length() - 1
            if tz:
                m >>= tz
                e += tz
        self.m = m
        self.e = e

    @staticmethod
    def from_int(n: int) -> "Dyadic":
        return Dyadic(n, 0)

    def __repr__(self):
        return f"Dyadic({self.m}, {self.e})"

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.m == other.m and self.e == other.e
        return self.as_fraction() == other

    def __hash__(self):
        return hash((self.m, self.e))

    def __neg__(self):
        return Dyadic(-self.m, self.e)

    def __add__(self, other: "Dyadic") -> "Dyadic":
        a, b = self, other
        if a.e >= b.e:
            return Dyadic((a.m << (a.e - b.e)) + b.m, b.e)
        return Dyadic(a.m + (b.m << (b.e - a.e)), a.e)

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        return self + (-other)

    def __mul__(self, other: "Dyadic") -> "Dyadic":
        return Dyadic(self.m * other.m, self.e + other.e)

    def cmp(self, other: "Dyadic") -> int:
        d = (self - other).m
        return (d > 0) - (d < 0)

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def as_fraction(self) -> Fraction:
        if self.e >= 0:
            return Fraction(self.m << self.e)
        return Fraction(self.m, 1 << (-self.e))

    def round(self, prec: int, up: bool) -> "Dyadic":
        """Round to at most `prec` mantissa bits; `up` rounds toward +inf."""
        excess = _bit_length(self.m) - prec
        if excess <= 0:
            return self
        m, rem = self.m >> excess, self.m & ((1 << excess) - 1)
        if up and rem:
            m += 1
        return Dyadic(m, self.e + excess)

    def to_mpf(self) -> mpmath.mpf:
        return mpmath.mpf((0 if self.m >= 0 else 1, abs(self.m), self.e,
                           _bit_length(self.m)))

    @staticmethod
    def _from_raw(t) -> "Dyadic":
        sign, man, exp, _ = t
        man = int(man)
        if man == 0:
            if exp != 0:  # inf/nan have no dyadic value
                raise ValueError(f"non-finite mpf tuple {t!r}")
            return Dyadic(0)
        return Dyadic(-man if sign else man, exp)

    @staticmethod
    def from_mpf(x) -> "Dyadic":
        # never round-trip through mpf(x): that re-rounds to the *global*
        # context precision and can break interval containment
        raw = x._mpf_ if hasattr(x, "_mpf_") else mpmath.mpf(x)._mpf_
        return Dyadic._from_raw(raw)

    def serialize(self) -> str:
        """Render as "m/2^k" with k >= 0 (certificate file convention)."""
        if self.e >= 0:
            return f"{self.m << self.e}/2^0"
        return f"{self.m}/2^{-self.e}"

    @staticmethod
    def parse(s: str) -> "Dyadic":
        num, _, den = s.partition("/2^")
        if not den:
            raise ValueError(f"bad dyadic string {s!r}")
        return Dyadic(int(num), -int(den))


ZERO = Dyadic(0)
ONE = Dyadic(1)


def dyadic_bounds(x: RatLike, prec: int) -> tuple[Dyadic, Dyadic]:
    """Enclosing dyadic pair for a rational, each within 2**-prec-ish."""
    if isinstance(x, int):
        d = Dyadic(x)
        return d, d
    p, q = x.numerator, x.denominator
    if q == 1:
        d = Dyadic(int(p))
        return d, d
    p, q = int(p), int(q)
    # p/q = (p << k) // q * 2**-k with k chosen for `prec` significant bits
    k = prec + q.bit_length()
    lo_m = (p << k) // q
    lo = Dyadic(lo_m, -k)
    hi = Dyadic(lo_m + 1, -k) if lo_m * q != (p << k) else lo
    return lo, hi


class Iv:
    """Closed real interval with exact dyadic endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Dyadic, hi: Dyadic):
        if lo.cmp(hi) > 0:
            raise ValueError("empty interval")
        self.lo = lo
        self.hi = hi

    # --- constructors -------------------------------------------------
    @staticmethod
    def point(x: RatLike, prec: int = 64) -> "Iv":
        lo, hi = dyadic_bounds(x, prec)
        return Iv(lo, hi)

    @staticmethod
    def exact(d: Dyadic) -> "Iv":
        return Iv(d, d)

    @staticmethod
    def from_endpoints(lo: RatLike, hi: RatLike, prec: int = 64) -> "Iv":
        return Iv(dyadic_bounds(lo, prec)[0], dyadic_bounds(hi, prec)[1])

    def __repr__(self):
        return f"Iv[{float(self.lo.as_fraction()):.6g}, {float(self.hi.as_fraction()):.6g}]"

    # --- queries -------------------------------------------------------
    def width(self) -> Fraction:
        return (self.hi - self.lo).as_fraction()

    def mid(self) -> Dyadic:
        s = self.lo + self.hi
        return Dyadic(s.m, s.e - 1)

    def contains_zero(self) -> bool:
        return self.lo.m <= 0 <= self.hi.m

    def sign(self):
        """Certified sign: -1/0/+1, or None if the interval straddles 0."""
        if self.lo.m > 0:
            return 1
        if self.hi.m < 0:
            return -1
        if self.lo.m == 0 and self.hi.m == 0:
            return 0
        return None

    def contains(self, other: "Iv") -> bool:
        return self.lo.cmp(other.lo) <= 0 and other.hi.cmp(self.hi) <= 0

    def contains_strict(self, other: "Iv") -> bool:
        return self.lo.cmp(other.lo) < 0 and other.hi.cmp(self.hi) < 0

    def contains_value(self, x: RatLike) -> bool:
        return self.lo.as_fraction() <= x <= self.hi.as_fraction()

    def disjoint(self, other: "Iv") -> bool:
        return self.hi.cmp(other.lo) < 0 or other.hi.cmp(self.lo) < 0

    def intersect(self, other: "Iv") -> "Iv":
        lo = self.lo if self.lo.cmp(other.lo) >= 0 else other.lo
        hi = self.hi if self.hi.cmp(other.hi) <= 0 else other.hi
        return Iv(lo, hi)

    def hull(self, other: "Iv") -> "Iv":
        lo = self.lo if self.lo.cmp(other.lo) <= 0 else other.lo
        hi = self.hi if self.hi.cmp(other.hi) >= 0 else other.hi
        return Iv(lo, hi)

    # --- arithmetic (exact) ---------------------------------------------
    def __neg__(self):
        return Iv(-self.hi, -self.lo)

    def __add__(self, other: "Iv") -> "Iv":
        return Iv(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other: "Iv") -> "Iv":
        return Iv(self.lo - other.hi, self.hi - other.lo)

    def __mul__(self, other: "Iv") -> "Iv":
        cands = (self.lo * other.lo, self.lo * other.hi,
                 self.hi * other.lo, self.hi * other.hi)
        lo = hi = cands[0]
        for c in cands[1:]:
            if c.cmp(lo) < 0:
                lo = c
            if c.cmp(hi) > 0:
                hi = c
        return Iv(lo, hi)

    def scale(self, d: Dyadic) -> "Iv":
        if d.m >= 0:
            return Iv(self.lo * d, self.hi * d)
        return Iv(self.hi * d, self.lo * d)

    def inverse(self, prec: int = 128) -> "Iv":
        """1/x, requires 0 not in the interval; outward rounded."""
        if self.contains_zero():
            raise ZeroDivisionError("interval contains zero")
        a, b = self.lo.as_fraction(), self.hi.as_fraction()
        return Iv(dyadic_bounds(1 / b, prec)[0], dyadic_bounds(1 / a, prec)[1])

    def __truediv__(self, other: "Iv") -> "Iv":
        return self * other.inverse()

    def sq(self) -> "Iv":
        s = self.sign()
        if s is None or s == 0:
            hi = self.lo * self.lo
            other = self.hi * self.hi
            if other.cmp(hi) > 0:
                hi = other
            return Iv(ZERO, hi)
        return self * self

    def pow_int(self, n: int) -> "Iv":
        if n == 0:
            return Iv(ONE, ONE)
        if n < 0:
            return self.pow_int(-n).inverse()
        r = self
        out = None
        while n:
            if n & 1:
                out = r if out is None else out * r
            n >>= 1
            if n:
                r = r.sq() if r.lo.m >= 0 else r * r
        return out

    def shrink(self, prec: int) -> "Iv":
        """Round endpoints outward to `prec` mantissa bits (cap bit growth)."""
        return Iv(self.lo.round(prec, up=False), self.hi.round(prec, up=True))

    # --- mpmath bridge (transcendental functions) -----------------------
    def to_ivmpf(self):
        return mpmath.iv.mpf((self.lo.to_mpf(), self.hi.to_mpf()))

    @staticmethod
    def from_ivmpf(x) -> "Iv":
        lo, hi = x._mpi_
        return Iv(Dyadic._from_raw(lo), Dyadic._from_raw(hi))


def _with_iv_prec(prec: int, fn, *args):
    old = mpmath.iv.prec
    mpmath.iv.prec = prec
    try:
        return fn(*args)
    finally:
        mpmath.iv.prec = old


def iv_log(x: Iv, prec: int = 128) -> Iv:
    if x.lo.m <= 0:
        raise ValueError("log needs a positive interval")
    return Iv.from_ivmpf(_with_iv_prec(prec, mpmath.iv.log, x.to_ivmpf()))


def iv_exp(x: Iv, prec: int = 128) -> Iv:
    return Iv.from_ivmpf(_with_iv_prec(prec, mpmath.iv.exp, x.to_ivmpf()))


def iv_pow(base: Iv, expo: Iv, prec: int = 128) -> Iv:
    """base**expo for positive base, via exp(expo * log base); certified."""
    return iv_exp(iv_log(base, prec) * expo, prec)


IV_ZERO = Iv(ZERO, ZERO)
IV_ONE = Iv(ONE, ONE)


class Box:
    """Complex rectangle: re + i*im with interval parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Iv, im: Iv):
        self.re = re
        self.im = im

    @staticmethod
    def point(re: RatLike, im: RatLike = 0, prec: int = 64) -> "Box":
        return Box(Iv.point(re, prec), Iv.point(im, prec))

    @staticmethod
    def real(iv: Iv) -> "Box":
        return Box(iv, IV_ZERO)

    def __repr__(self):
        return f"Box({self.re!r}, {self.im!r})"

    def conj(self) -> "Box":
        return Box(self.re, -self.im)

    def __neg__(self):
        return Box(-self.re, -self.im)

    def __add__(self, o: "Box") -> "Box":
        return Box(self.re + o.re, self.im + o.im)

    def __sub__(self, o: "Box") -> "Box":
        return Box(self.re - o.re, self.im - o.im)

    def __mul__(self, o: "Box") -> "Box":
        return Box(self.re * o.re - self.im * o.im,
                   self.re * o.im + self.im * o.re)

    def scale(self, iv: Iv) -> "Box":
        return Box(self.re * iv, self.im * iv)

    def abs2(self) -> Iv:
        return self.re.sq() + self.im.sq()

    def inverse(self, prec: int = 128) -> "Box":
        n = self.abs2().inverse(prec)
        return Box(self.re * n, -(self.im * n))

    def __truediv__(self, o: "Box") -> "Box":
        return self * o.inverse()

    def pow_int(self, n: int) -> "Box":
        if n == 0:
            return Box(IV_ONE, IV_ZERO)
        if n < 0:
            return self.pow_int(-n).inverse()
        r, out = self, None
        while n:
            if n & 1:
                out = r if out is None else out * r
            n >>= 1
            if n:
                r = r * r
        return out

    def contains(self, o: "Box") -> bool:
        return self.re.contains(o.re) and self.im.contains(o.im)

    def contains_strict(self, o: "Box") -> bool:
        return self.re.contains_strict(o.re) and self.im.contains_strict(o.im)

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def disjoint(self, o: "Box") -> bool:
        return self.re.disjoint(o.re) or self.im.disjoint(o.im)

    def width(self) -> Fraction:
        return max(self.re.width(), self.im.width())

    def mid(self) -> tuple[Dyadic, Dyadic]:
        return self.re.mid(), self.im.mid()

    def shrink(self, prec: int) -> "Box":
        return Box(self.re.shrink(prec), self.im.shrink(prec))

    def quarters(self):
        """Split into 4 sub-rectangles at the midpoint."""
        mr, mi = self.re.mid(), self.im.mid()
        for r in (Iv(self.re.lo, mr), Iv(mr, self.re.hi)):
            for i in (Iv(self.im.lo, mi), Iv(mi, self.im.hi)):
                yield Box(r, i)

    def serialize(self) -> list[str]:
        return [self.re.lo.serialize(), self.re.hi.serialize(),
                self.im.lo.serialize(), self.im.hi.serialize()]

    @staticmethod
    def parse(parts: list[str]) -> "Box":
        a, b, c, d = (Dyadic.parse(p) for p in parts)
        return Box(Iv(a, b), Iv(c, d))


def horner_box(coeffs, x: Box, prec: int = 0) -> Box:
    """Evaluate sum coeffs[k] * x**k with Box coefficients; optional capping."""
    acc = Box(IV_ZERO, IV_ZERO)
    for c in reversed(coeffs):
        acc = acc * x + c
        if prec:
            acc = acc.shrink(prec)
    return acc
