"""Exact complex algebraic numbers: integer minimal polynomial + certified
isolating dyadic rectangle.

Identity questions (equality, sign, root-of-unity order) are decided
symbolically; boxes only ever *refine* a designation that the minimal
polynomial pins down.  High-precision approximations come from mpmath but
are never trusted: every box is certified by an exact Krawczyk contraction
or by exact Sturm bisection before use.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional

import mpmath
import sympy

from .dyadic import Box, Dyadic, Iv, IV_ZERO, Rat, dyadic_bounds, horner_box
from .zpoly import (ZP, cauchy_root_bound, count_real_roots, cyclotomic,
                    factor_z, isolate_real_roots, minpoly_inv, minpoly_neg,
                    minpoly_rational, resultant_add, resultant_mul, zp,
                    zp_compose_square, zp_degree, zp_derivative, zp_eval,
                    zp_eval_box, zp_eval_dyadic, zp_eval_iv, zp_primitive)

DEFAULT_BITS = 64


class PrecisionExhausted(RuntimeError):
    """A certified refinement loop ran out of its bit budget."""


# --------------------------------------------------------------------------
# Certified root sets
# --------------------------------------------------------------------------

def _taylor_shift(f: ZP, cr: Dyadic, ci: Dyadic) -> list[tuple[Dyadic, Dyadic]]:
    """Exact complex-dyadic coefficients of f(c + h) in powers of h."""
    n = zp_degree(f)
    ar = [Dyadic(c) for c in f]
    ai = [Dyadic(0)] * (n + 1)
    for i in range(n + 1):
        for j in range(n - 1, i - 1, -1):
            pr = ar[j + 1] * cr - ai[j + 1] * ci
            pi = ar[j + 1] * ci + ai[j + 1] * cr
            ar[j] = ar[j] + pr
            ai[j] = ai[j] + pi
    return list(zip(ar, ai))


def _krawczyk_step(f: ZP, df: ZP, X: Box, prec: int = 192) -> Optional[Box]:
    """One Krawczyk contraction; returns K(X) if K(X) is strictly inside X
    and the contraction factor is certified < 1, else None.

    Evaluations use the centered Taylor form, which keeps interval widths
    proportional to the box radius (plain interval Horner overestimates
    wildly for large-coefficient polynomials)."""
    cr, ci = X.mid()
    bs = _taylor_shift(f, cr, ci)
    fr, fi = bs[0]
    dr, di = bs[1]
    # y ~ 1/f'(c) as an exact dyadic point
    d2 = (dr * dr + di * di).as_fraction()
    if d2 == 0:
        return None
    yr_f, yi_f = dr.as_fraction() / d2, -di.as_fraction() / d2
    yr = dyadic_bounds(yr_f, prec)[0]
    yi = dyadic_bounds(yi_f, prec)[0]
    y = Box(Iv.exact(yr), Iv.exact(yi))
    c = Box(Iv.exact(cr), Iv.exact(ci))
    fc = Box(Iv.exact(fr), Iv.exact(fi))
    # f'(c + h) = sum (k+1) b_{k+1} h^k over the offset box h = X - c
    dcoeffs = [Box(Iv.exact(br * Dyadic(k + 1)), Iv.exact(bi * Dyadic(k + 1))).shrink(prec)
               for k, (br, bi) in enumerate(bs[1:])]
    dX = horner_box(dcoeffs, (X - c).shrink(prec), prec=prec)
    one = Box.point(1)
    g = one - y * dX                      # contraction box
    K = c - y * fc + g * (X - c)
    K = K.shrink(2 * prec)
    if not X.contains_strict(K):
        return None
    gm = g.abs2()
    if gm.hi.as_fraction() >= 1:          # |1 - y f'(X)| must be < 1
        return None
    return K


class _RootRec:
    __slots__ = ("box", "is_real")

    def __init__(self, box: Box, is_real: bool):
        self.box = box
        self.is_real = is_real


class RootSet:
    """Certified, refinable boxes for all roots of an irreducible ZP."""

    def __init__(self, poly: ZP):
        if not factor_z(poly) == ((poly, 1),) and zp_degree(poly) > 1:
            # degree-1 polys are trivially irreducible; others must be
            raise ValueError("RootSet needs an irreducible polynomial")
        self.poly = poly
        self.dpoly = zp_derivative(poly)
        self.roots: list[_RootRec] = []
        self._isolate()

    # -- initial isolation ------------------------------------------------
    def _isolate(self):
        f = self.poly
        deg = zp_degree(f)
        if deg == 1:
            val = Fraction(-f[0], f[1])
            lo, hi = dyadic_bounds(val, 64)
            self.roots = [_RootRec(Box(Iv(lo, hi), IV_ZERO), True)]
            return
        real_ivs = isolate_real_roots(f)
        n_real = len(real_ivs)
        recs = [_RootRec(Box(Iv.from_endpoints(a, b, 64), IV_ZERO), True)
                for a, b in real_ivs]
        n_cplx = (deg - n_real) // 2
        if n_cplx:
            recs += self._isolate_complex(n_cplx)
        if len(recs) != deg:
            raise RuntimeError("root count mismatch")
        # deterministic order: reals ascending, then conjugate pairs by
        # (re, im) midpoint with the +im member first
        recs.sort(key=lambda r: (0 if r.is_real else 1,
                                 r.box.re.mid().as_fraction(),
                                 -r.box.im.mid().as_fraction()))
        self.roots = recs
        self._ensure_disjoint()

    def _isolate_complex(self, n_pairs: int) -> list[_RootRec]:
        f = self.poly
        deg = zp_degree(f)
        for prec in (128, 256, 512, 1024, 2048):
            with mpmath.workprec(prec):
                try:
                    approx = mpmath.polyroots([*reversed(f)], maxsteps=100 + 10 * deg,
                                              extraprec=20 * deg)
                except mpmath.libmp.NoConvergence:
                    continue
            # real roots come back with tiny spurious imaginary parts; take
            # the n_pairs candidates farthest off the axis and certify
            cands = sorted((r for r in approx if mpmath.im(r) > 0),
                           key=lambda r: -mpmath.im(r))[:n_pairs]
            if len(cands) < n_pairs:
                continue
            recs = []
            ok = True
            for r in cands:
                box = self._certify_near(mpmath.re(r), mpmath.im(r), prec)
                if box is None or not (box.im.lo.m > 0):
                    ok = False
                    break
                recs.append(_RootRec(box, False))
                recs.append(_RootRec(box.conj(), False))
            if ok and self._pairwise_disjoint(recs):
                return recs
        raise PrecisionExhausted(f"complex isolation failed for {f}")

    def _certify_near(self, re, im, prec) -> Optional[Box]:
        rd = Dyadic.from_mpf(mpmath.mpf(re))
        idd = Dyadic.from_mpf(mpmath.mpf(im))
        rad = Fraction(1, 2) ** max(8, prec // 4)
        for _ in range(prec.bit_length() + 6):
            h = Iv.from_endpoints(-rad, rad, 64)
            X = Box(Iv.exact(rd) + h, Iv.exact(idd) + h)
            K = _krawczyk_step(self.poly, self.dpoly, X)
            if K is not None:
                return K
            rad *= 4
            if rad > 1:
                return None
        return None

    @staticmethod
    def _pairwise_disjoint(recs) -> bool:
        for i in range(len(recs)):
            for j in range(i + 1, len(recs)):
                if not recs[i].box.disjoint(recs[j].box):
                    return False
        return True

    def _ensure_disjoint(self):
        for _ in range(64):
            if self._pairwise_disjoint(self.roots):
                return
            for i in range(len(self.roots)):
                self.refine(i, bits=max(8, self._width_bits(i) + 8))
        raise PrecisionExhausted("could not separate roots")

    def _width_bits(self, i) -> int:
        w = self.roots[i].box.width()
        if w == 0:
            return 64
        return max(0, -Fraction(w).numerator.bit_length()
                   + Fraction(w).denominator.bit_length())

    # -- refinement ---------------------------------------------------------
    def refine(self, i: int, bits: int) -> Box:
        rec = self.roots[i]
        target = Fraction(1, 2) ** bits
        if rec.box.width() <= target:
            return rec.box
        if zp_degree(self.poly) == 1:
            val = Fraction(-self.poly[0], self.poly[1])
            lo, hi = dyadic_bounds(val, bits + 4)
            rec.box = Box(Iv(lo, hi), IV_ZERO)
            return rec.box
        if rec.is_real:
            rec.box = Box(self._refine_real(rec.box.re, target), IV_ZERO)
        else:
            rec.box = self._refine_complex(rec.box, target, bits)
            if rec.box.im.lo.m < 0:  # upper member stays upper
                pass
        return rec.box

    def _refine_real(self, iv: Iv, target: Fraction) -> Iv:
        f = self.poly
        lo, hi = iv.lo, iv.hi
        s_lo = self._real_sign_at(lo)
        s_hi = self._real_sign_at(hi)
        # endpoints cannot be roots (irreducible deg>1 has no dyadic roots)
        assert s_lo != 0 and s_hi != 0 and s_lo != s_hi
        while (hi - lo).as_fraction() > target:
            mid = Iv(lo, hi).mid()
            sm = self._real_sign_at(mid)
            if sm == s_lo:
                lo = mid
            else:
                hi = mid
        return Iv(lo, hi)

    def _real_sign_at(self, d: Dyadic) -> int:
        v, _ = zp_eval_dyadic(self.poly, d, Dyadic(0))
        return (v.m > 0) - (v.m < 0)

    def _refine_complex(self, box: Box, target: Fraction, bits: int) -> Box:
        X = box
        prec = max(192, bits + 64)
        for _ in range(bits + 32):
            if X.width() <= target:
                return X
            K = _krawczyk_step(self.poly, self.dpoly, X, prec)
            if K is not None and K.width() <= X.width() / 2:
                X = K
                continue
            # stalled: re-polish with mpmath from the midpoint
            X2 = self._polish(X, bits)
            if X2 is not None:
                X = X2
                continue
        raise PrecisionExhausted("complex refinement stalled")

    def _polish(self, X: Box, bits: int) -> Optional[Box]:
        mr, mi = X.mid()
        prec = max(2 * bits + 64, 128)
        with mpmath.workprec(prec):
            z0 = mpmath.mpc(mr.to_mpf(), mi.to_mpf())
            try:
                r = mpmath.findroot(
                    lambda t: mpmath.polyval([*reversed(self.poly)], t), z0)
            except (ValueError, ZeroDivisionError):
                return None
            rd = Dyadic.from_mpf(mpmath.re(r))
            idd = Dyadic.from_mpf(mpmath.im(r))
        rad = Fraction(1, 2) ** (bits + 8)
        for _ in range(8):
            h = Iv.from_endpoints(-rad, rad, bits + 64)
            C = Box(Iv.exact(rd) + h, Iv.exact(idd) + h)
            K = _krawczyk_step(self.poly, self.dpoly, C, max(192, bits + 64))
            if K is not None and not K.disjoint(X):
                return K
            rad *= 16
        return None


_ROOTSETS: dict[ZP, RootSet] = {}


def rootset(poly: ZP) -> RootSet:
    rs = _ROOTSETS.get(poly)
    if rs is None:
        rs = _ROOTSETS[poly] = RootSet(poly)
    return rs


# --------------------------------------------------------------------------
# AlgebraicNumber
# --------------------------------------------------------------------------

class AlgebraicNumber:
    """A designated root of an irreducible integer polynomial.

    Construction is via the module helpers (`from_rational`, `isolate_roots`,
    arithmetic); a valid instance always designates one certified root.
    Field-backed values (see numfield) may defer computing the minimal
    polynomial until identity truly requires it.
    """

    __slots__ = ("_rat", "_poly", "_idx", "_fe")

    def __init__(self, *, rat=None, poly: ZP = None, idx: int = None, fe=None):
        self._rat = rat
        self._poly = poly
        self._idx = idx
        self._fe = fe

    # -- constructors -------------------------------------------------------
    @staticmethod
    def from_rational(r) -> "AlgebraicNumber":
        if isinstance(r, int):
            return AlgebraicNumber(rat=Rat(r, 1))
        return AlgebraicNumber(rat=Rat(int(r.numerator), int(r.denominator)))

    @staticmethod
    def from_designated_root(poly: ZP, idx: int) -> "AlgebraicNumber":
        if zp_degree(poly) == 1:
            return AlgebraicNumber.from_rational(Fraction(-poly[0], poly[1]))
        return AlgebraicNumber(poly=poly, idx=idx)

    @staticmethod
    def from_field_element(fe) -> "AlgebraicNumber":
        r = fe.as_rational()
        if r is not None:
            return AlgebraicNumber.from_rational(r)
        return AlgebraicNumber(fe=fe)

    # -- materialization ------------------------------------------------------
    def _materialize(self):
        """Ensure minimal polynomial + designated root index are known."""
        if self._poly is None and self._rat is None:
            poly, idx = self._fe.identify_minpoly()
            self._poly, self._idx = poly, idx

    @property
    def minpoly(self) -> ZP:
        if self._rat is not None:
            return minpoly_rational(self._rat)
        self._materialize()
        return self._poly

    def degree(self) -> int:
        return zp_degree(self.minpoly)

    @property
    def box(self) -> Box:
        if self._rat is not None:
            lo, hi = dyadic_bounds(self._rat, DEFAULT_BITS)
            return Box(Iv(lo, hi), IV_ZERO)
        if self._poly is not None:
            return rootset(self._poly).roots[self._idx].box
        return self._fe.enclosure(DEFAULT_BITS)

    def refine(self, bits: int) -> Box:
        """Certified box of width <= 2**-bits (nested in previous boxes)."""
        if self._rat is not None:
            lo, hi = dyadic_bounds(self._rat, bits + 2)
            return Box(Iv(lo, hi), IV_ZERO)
        if self._poly is not None:
            return rootset(self._poly).refine(self._idx, bits)
        return self._fe.enclosure(bits)

    # -- predicates -----------------------------------------------------------
    def is_rational(self) -> bool:
        if self._rat is not None:
            return True
        if self._fe is not None and self._poly is None:
            return self._fe.as_rational() is not None
        return zp_degree(self.minpoly) == 1

    def as_rational(self):
        if self._rat is not None:
            return self._rat
        if self._fe is not None and self._poly is None:
            return self._fe.as_rational()
        p = self.minpoly
        if zp_degree(p) == 1:
            return Rat(int(-p[0]), int(p[1]))
        return None

    def is_zero(self) -> bool:
        if self._rat is not None:
            return self._rat == 0
        if self._fe is not None and self._poly is None:
            return self._fe.is_zero()
        return False  # irreducible minpoly of degree >= 2 is never z

    def is_real(self) -> bool:
        if self._rat is not None:
            return True
        if self._fe is not None and self._poly is None and self._fe.is_real():
            return True
        self._materialize()
        return rootset(self._poly).roots[self._idx].is_real

    def sign(self) -> int:
        """Exact sign; raises on non-real input."""
        if self._rat is not None:
            return (self._rat > 0) - (self._rat < 0)
        if self._fe is not None and self._poly is None:
            return self._fe.sign()
        if not self.is_real():
            raise ValueError("sign of a non-real algebraic number")
        bits = DEFAULT_BITS
        while True:
            s = self.refine(bits).re.sign()
            if s is not None:
                return s  # nonzero by irreducibility (deg >= 2) or rational path
            bits *= 2

    # -- arithmetic -------------------------------------------------------------
    def __neg__(self):
        if self._rat is not None:
            return AlgebraicNumber.from_rational(-self._rat)
        if self._fe is not None:
            return AlgebraicNumber.from_field_element(-self._fe)
        self._materialize()
        poly = minpoly_neg(self._poly)
        return _identify(poly, lambda bits: -self.refine(bits))

    def conj(self):
        if self._rat is not None:
            return self
        if self._fe is not None:
            return AlgebraicNumber.from_field_element(self._fe.conj())
        self._materialize()
        if self.is_real():
            return self
        return _identify(self._poly, lambda bits: self.refine(bits).conj())

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self._rat is not None:
            return AlgebraicNumber.from_rational(1 / Fraction(self._rat))
        if self._fe is not None:
            return AlgebraicNumber.from_field_element(self._fe.inverse())
        self._materialize()
        poly = minpoly_inv(self._poly)
        return _identify(poly, lambda bits: self.refine(bits).inverse(bits + 16))

    def __add__(self, other):
        other = _coerce(other)
        if self._rat is not None and other._rat is not None:
            return AlgebraicNumber.from_rational(self._rat + other._rat)
        fe = _common_field(self, other)
        if fe is not None:
            return AlgebraicNumber.from_field_element(fe[0] + fe[1])
        cand = resultant_add(self.minpoly, other.minpoly)
        return _identify_factors(cand,
                                 lambda bits: self.refine(bits) + other.refine(bits))

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __mul__(self, other):
        other = _coerce(other)
        if self._rat is not None and other._rat is not None:
            return AlgebraicNumber.from_rational(self._rat * other._rat)
        if self.is_zero() or other.is_zero():
            return AlgebraicNumber.from_rational(0)
        fe = _common_field(self, other)
        if fe is not None:
            return AlgebraicNumber.from_field_element(fe[0] * fe[1])
        cand = resultant_mul(self.minpoly, other.minpoly)
        return _identify_factors(cand,
                                 lambda bits: self.refine(bits) * other.refine(bits))

    def __truediv__(self, other):
        return self * _coerce(other).inverse()

    __radd__ = __add__
    __rmul__ = __mul__

    def pow_int(self, n: int) -> "AlgebraicNumber":
        if n == 0:
            return AlgebraicNumber.from_rational(1)
        if n < 0:
            return self.inverse().pow_int(-n)
        acc, base = None, self
        while n:
            if n & 1:
                acc = base if acc is None else acc * base
            n >>= 1
            if n:
                base = base * base
        return acc

    # -- identity ------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, (AlgebraicNumber, int, Fraction)) and \
                not hasattr(other, "numerator"):
            return NotImplemented
        other = _coerce(other)
        if self._rat is not None and other._rat is not None:
            return self._rat == other._rat
        fe = _common_field(self, other)
        if fe is not None:
            return fe[0] == fe[1]
        if self.is_rational() != other.is_rational():
            return False
        if self.is_rational():
            return Fraction(self.as_rational()) == Fraction(other.as_rational())
        if self.minpoly != other.minpoly:
            return False
        self._materialize(), other._materialize()
        if self._fe is not None or other._fe is not None:
            # field-backed with known minpoly: compare designations via boxes
            return _same_root(self, other)
        return self._idx == other._idx

    def __hash__(self):
        if self._rat is not None:
            return hash(Fraction(self._rat))
        self._materialize()
        return hash((self.minpoly, self._idx))

    def __repr__(self):
        if self._rat is not None:
            return f"Alg({self._rat})"
        b = self.box
        return (f"Alg~({float(b.re.mid().as_fraction()):.6g}"
                f"{float(b.im.mid().as_fraction()):+.6g}i)")

    # -- serialization ----------------------------------------------------------
    def serialize(self) -> dict:
        box = self.refine(DEFAULT_BITS)
        return {"minpoly": [str(c) for c in self.minpoly],
                "box": box.serialize()}

    @staticmethod
    def deserialize(d: dict) -> "AlgebraicNumber":
        poly = zp(int(c) for c in d["minpoly"])
        box = Box.parse(d["box"])
        return locate_in_box(poly, box)


def _coerce(x) -> AlgebraicNumber:
    if isinstance(x, AlgebraicNumber):
        return x
    return AlgebraicNumber.from_rational(x)


def _common_field(a: AlgebraicNumber, b: AlgebraicNumber):
    fa, fb = a._fe, b._fe
    if fa is not None and fb is None and b._rat is not None:
        fb = fa.field.from_rational(b._rat)
    if fb is not None and fa is None and a._rat is not None:
        fa = fb.field.from_rational(a._rat)
    if fa is not None and fb is not None and fa.field is fb.field:
        return fa, fb
    return None


def _same_root(a: AlgebraicNumber, b: AlgebraicNumber) -> bool:
    poly = a.minpoly
    rs = rootset(poly)
    ia = _designate(rs, lambda bits: a.refine(bits))
    ib = _designate(rs, lambda bits: b.refine(bits))
    return ia == ib


def _designate(rs: RootSet, enclosure) -> int:
    """Index of the unique root compatible with a refinable enclosure."""
    bits = DEFAULT_BITS
    for _ in range(24):
        val = enclosure(bits)
        hits = [i for i, r in enumerate(rs.roots) if not r.box.disjoint(val)]
        if len(hits) == 1:
            return hits[0]
        if not hits:
            for i in range(len(rs.roots)):
                rs.refine(i, bits)
            hits = [i for i, r in enumerate(rs.roots) if not r.box.disjoint(val)]
            if len(hits) == 1:
                return hits[0]
        for i in hits:
            rs.refine(i, bits + 16)
        bits *= 2
    raise PrecisionExhausted("root designation did not converge")


def _identify(poly: ZP, enclosure) -> AlgebraicNumber:
    """Designate the root of an *irreducible* poly from an enclosure."""
    if zp_degree(poly) == 1:
        return AlgebraicNumber.from_rational(Fraction(-poly[0], poly[1]))
    rs = rootset(poly)
    return AlgebraicNumber.from_designated_root(poly, _designate(rs, enclosure))


def _identify_factors(cand: ZP, enclosure) -> AlgebraicNumber:
    """The value is a root of `cand`; find which irreducible factor + root."""
    factors = [p for p, _ in factor_z(cand)]
    if len(factors) == 1:
        return _identify(factors[0], enclosure)
    bits = DEFAULT_BITS
    live = factors
    for _ in range(24):
        val = enclosure(bits)
        still = []
        for p in live:
            rs = rootset(p) if zp_degree(p) > 1 else None
            if rs is None:
                root_val = Fraction(-p[0], p[1])
                lo, hi = dyadic_bounds(root_val, bits)
                if not Box(Iv(lo, hi), IV_ZERO).disjoint(val):
                    still.append(p)
            else:
                if any(not r.box.disjoint(val) for r in rs.roots):
                    for i in range(len(rs.roots)):
                        rs.refine(i, bits)
                    if any(not r.box.disjoint(val) for r in rs.roots):
                        still.append(p)
        if len(still) == 1:
            return _identify(still[0], enclosure)
        if not still:
            raise RuntimeError("enclosure missed every candidate root")
        live = still
        bits *= 2
    raise PrecisionExhausted("factor identification did not converge")


def locate_in_box(poly: ZP, box: Box) -> AlgebraicNumber:
    """AlgebraicNumber designated by an isolating box for `poly`."""
    poly = zp_primitive(poly)
    if zp_degree(poly) == 1:
        return AlgebraicNumber.from_rational(Fraction(-poly[0], poly[1]))
    rs = rootset(poly)
    hits = [i for i, r in enumerate(rs.roots) if not r.box.disjoint(box)]
    bits = DEFAULT_BITS
    while len(hits) > 1:
        for i in hits:
            rs.refine(i, bits)
        hits = [i for i in hits if not rs.roots[i].box.disjoint(box)]
        bits *= 2
        if bits > 1 << 16:
            raise PrecisionExhausted("box does not isolate a single root")
    if not hits:
        raise ValueError("box contains no root of the polynomial")
    return AlgebraicNumber.from_designated_root(poly, hits[0])


# --------------------------------------------------------------------------
# Module-level operations
# --------------------------------------------------------------------------

def isolate_roots(p) -> list[tuple[AlgebraicNumber, int]]:
    """All distinct roots of a nonzero integer polynomial, with multiplicity.

    Roots are returned in each irreducible factor's canonical order: real
    roots ascending, then conjugate pairs (upper half-plane member first).
    """
    poly = zp(p)
    if zp_degree(poly) < 0 or (zp_degree(poly) == 0 and poly):
        raise ValueError("need a nonconstant polynomial")
    out = []
    for fac, mult in factor_z(poly):
        if zp_degree(fac) == 1:
            out.append((AlgebraicNumber.from_rational(Fraction(-fac[0], fac[1])),
                        mult))
        else:
            rs = rootset(fac)
            for i in range(len(rs.roots)):
                out.append((AlgebraicNumber.from_designated_root(fac, i), mult))
    return out


def alg_arith(a: AlgebraicNumber, b: AlgebraicNumber, op: str) -> AlgebraicNumber:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    if op == "conj":
        return a.conj()
    raise ValueError(f"unknown op {op!r}")


def real_sqrt(a: AlgebraicNumber) -> AlgebraicNumber:
    """The nonnegative square root of a real a >= 0, exactly."""
    rs = a.as_rational()
    if rs is not None:
        fr = Fraction(rs)
        if fr < 0:
            raise ValueError("negative input")
        num_r, den_r = math.isqrt(fr.numerator), math.isqrt(fr.denominator)
        if num_r * num_r == fr.numerator and den_r * den_r == fr.denominator:
            return AlgebraicNumber.from_rational(Fraction(num_r, den_r))
        cand = zp_primitive(zp((-fr.numerator, 0, fr.denominator)))
    else:
        if not a.is_real() or a.sign() < 0:
            raise ValueError("real_sqrt needs a nonnegative real input")
        cand = zp_compose_square(a.minpoly)

    def enclosure(bits):
        iv = a.refine(2 * bits + 8).re
        lo = max(Fraction(0), iv.lo.as_fraction())
        hi = iv.hi.as_fraction()
        with mpmath.workprec(max(2 * bits + 32, 64)):
            s_lo = mpmath.mpf(lo.numerator) / lo.denominator
            lo_s = Dyadic.from_mpf(mpmath.sqrt(s_lo) * (1 - mpmath.mpf(2) ** (-bits)))
            s_hi = mpmath.mpf(hi.numerator) / hi.denominator
            hi_s = Dyadic.from_mpf(mpmath.sqrt(s_hi) * (1 + mpmath.mpf(2) ** (-bits)))
        if lo_s.cmp(hi_s) > 0:
            lo_s = Dyadic(0)
        return Box(Iv(lo_s, hi_s), IV_ZERO)

    return _identify_factors(cand, enclosure)


def modulus(a: AlgebraicNumber) -> AlgebraicNumber:
    """|a| as a real algebraic number, exactly."""
    r = a.as_rational()
    if r is not None:
        return AlgebraicNumber.from_rational(abs(Fraction(r)))
    if a.is_real():
        return a if a.sign() >= 0 else -a
    return real_sqrt(a * a.conj())


def is_root_of_unity(a: AlgebraicNumber) -> Optional[int]:
    """Smallest n with a**n == 1, or None; requires |a| = 1.

    A unit-modulus algebraic number is a root of unity iff its minimal
    polynomial is cyclotomic."""
    if not (a * a.conj() == AlgebraicNumber.from_rational(1)):
        raise ValueError("is_root_of_unity requires |a| = 1")
    p = a.minpoly
    if p[-1] != 1:       # cyclotomics are monic
        return None
    d = zp_degree(p)
    for n in range(1, 2 * d * d + 7):
        if sympy.totient(n) == d and cyclotomic(n) == p:
            return n
    return None


def refine(a: AlgebraicNumber, bits: int) -> Box:
    return a.refine(bits)


def alg_sign(a: AlgebraicNumber) -> int:
    return a.sign()


def real_interval(a: AlgebraicNumber, bits: int) -> Iv:
    if not a.is_real():
        raise ValueError("not a real number")
    return a.refine(bits).re
