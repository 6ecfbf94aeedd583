"""Exact arithmetic layer: roots, arithmetic, modulus, signs, refinement."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ominv.algebraic import (AlgebraicNumber, alg_arith, alg_sign,
                             is_root_of_unity, isolate_roots, modulus, refine)
from ominv.dyadic import Box, Dyadic, Iv
from ominv.zpoly import zp, zp_eval_box


def A(x):
    return AlgebraicNumber.from_rational(x)


def roots_of(*coeffs):
    return isolate_roots(zp(coeffs))


def bisect_quadratic(c0, c1, c2, lo, hi, steps=64):
    """Independent oracle: plain bisection on sign changes."""
    f = lambda x: c0 + c1 * x + c2 * x * x
    assert f(lo) * f(hi) < 0
    for _ in range(steps):
        mid = (lo + hi) / 2
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return lo, hi


class TestIsolateRoots:
    def test_pure_imaginary_pair(self):
        rts = roots_of(4, 0, 1)  # z^2 + 4
        assert len(rts) == 2 and all(m == 1 for _, m in rts)
        vals = [r.refine(20) for r, _ in rts]
        assert vals[0].im.lo.m > 0 and vals[1].im.hi.m < 0
        for v in vals:
            assert v.re.contains_value(0)
            assert v.im.contains_value(2) or v.im.contains_value(-2)

    def test_repeated_rational_root(self):
        rts = roots_of(1, -2, 1)  # (z-1)^2
        assert len(rts) == 1
        r, mult = rts[0]
        assert mult == 2 and r.as_rational() == 1

    def test_golden_ratio_pair_against_bisection(self):
        rts = roots_of(-1, -1, 1)  # z^2 - z - 1
        assert len(rts) == 2
        lo, hi = bisect_quadratic(Fraction(-1), Fraction(-1), Fraction(1),
                                  Fraction(1), Fraction(2))
        plus = [r for r, _ in rts if r.sign() > 0][0]
        iv = plus.refine(70).re
        assert iv.lo.as_fraction() <= hi and lo <= iv.hi.as_fraction()
        minus = [r for r, _ in rts if r.sign() < 0][0]
        assert (plus + minus).as_rational() == 1  # sum of roots = 1

    def test_multiplicities_sum_to_degree(self):
        rts = roots_of(0, 0, -4, 0, 1)  # z^4 - 4 z^2 = z^2 (z-2)(z+2)
        assert sum(m for _, m in rts) == 4


def _two_i():
    rts = roots_of(4, 0, 1)
    return [r for r, _ in rts if r.refine(8).im.lo.m > 0][0]


def _phase_34():
    rts = roots_of(5, -6, 5)  # 5 z^2 - 6 z + 5, roots (3 +- 4i)/5
    return [r for r, _ in rts if r.refine(8).im.lo.m > 0][0]


class TestArith:
    def test_product_of_conjugate_imaginaries(self):
        a = _two_i()
        assert alg_arith(a, -a, "*") == A(4)

    def test_conj(self):
        p = _phase_34()
        q = alg_arith(p, p, "conj")
        assert q == p.conj()
        assert (p + q) == A(Fraction(6, 5))      # 2 Re = 6/5
        assert (p * q) == A(1)

    def test_conjugate_sum_is_one(self):
        rts = roots_of(-1, -1, 1)
        assert (rts[0][0] + rts[1][0]) == A(1)

    def test_division(self):
        a = _two_i()
        assert alg_arith(a, a, "/") == A(1)
        assert alg_arith(A(1), a, "/") == a.inverse()
        with pytest.raises(ZeroDivisionError):
            alg_arith(a, A(0), "/")

    def test_mixed_rational(self):
        s2 = [r for r, _ in roots_of(-2, 0, 1) if r.sign() > 0][0]
        v = (s2 + A(1)) * (s2 - A(1))    # (sqrt2+1)(sqrt2-1) = 1
        assert v == A(1)


class TestModulus:
    def test_modulus_of_2i(self):
        assert modulus(_two_i()) == A(2)

    def test_unit_modulus_checked_exactly(self):
        p = _phase_34()
        m = modulus(p)
        assert m == A(1)
        assert p * p.conj() == A(1)

    def test_sqrt2(self):
        one_plus_i = [r for r, _ in roots_of(2, -2, 1)
                      if r.refine(8).im.lo.m > 0][0]
        m = modulus(one_plus_i)
        assert m.minpoly == zp((-2, 0, 1))
        assert m.sign() > 0
        assert m * m == A(2)

    def test_modulus_squared_identity(self):
        for r, _ in roots_of(3, 1, 0, 2) + roots_of(5, -6, 5):
            m = modulus(r)
            assert m * m == r * r.conj()


class TestRootsOfUnity:
    def test_i(self):
        i = [r for r, _ in roots_of(1, 0, 1) if r.refine(8).im.lo.m > 0][0]
        assert is_root_of_unity(i) == 4

    def test_minus_one(self):
        assert is_root_of_unity(A(-1)) == 2

    def test_non_root_of_unity_phase(self):
        assert is_root_of_unity(_phase_34()) is None

    def test_precondition(self):
        with pytest.raises(ValueError):
            is_root_of_unity(A(2))

    def test_order_is_minimal(self):
        zeta6 = [r for r, _ in roots_of(1, -1, 1)
                 if r.refine(8).im.lo.m > 0][0]  # primitive 6th root
        n = is_root_of_unity(zeta6)
        assert n == 6
        assert zeta6.pow_int(6) == A(1)
        for m in range(1, 6):
            assert zeta6.pow_int(m) != A(1)


class TestRefine:
    def test_sqrt2_width(self):
        s2 = [r for r, _ in roots_of(-2, 0, 1) if r.sign() > 0][0]
        box = refine(s2, 10)
        assert box.width() <= Fraction(1, 1 << 10)
        assert box.re.contains_value(Fraction(14142, 10000)) or \
            box.re.lo.as_fraction() > Fraction(14142, 10000)

    def test_rational_any_depth(self):
        for k in (4, 16, 80):
            box = refine(A(1), k)
            assert box.width() <= Fraction(1, 1 << k)
            assert box.re.contains_value(1)

    def test_2i_box(self):
        box = refine(_two_i(), 4)
        assert box.width() <= Fraction(1, 16)
        assert box.re.contains_value(0) and box.im.contains_value(2)

    def test_nesting(self):
        s2 = [r for r, _ in roots_of(-2, 0, 1) if r.sign() > 0][0]
        outer = refine(s2, 12)
        inner = refine(s2, 40)
        assert outer.contains(inner)

    def test_minpoly_interval_contains_zero_at_every_depth(self):
        for r, _ in roots_of(-1, -1, 1) + roots_of(5, -6, 5):
            for bits in (16, 32, 64, 128):
                box = r.refine(bits)
                img = zp_eval_box(r.minpoly, box)
                assert img.contains_zero()


class TestSign:
    def test_sqrt2_minus_one(self):
        s2 = [r for r, _ in roots_of(-2, 0, 1) if r.sign() > 0][0]
        assert alg_sign(s2 - A(1)) == 1
        assert alg_sign(A(1) - s2) == -1

    def test_zero(self):
        assert alg_sign(A(0)) == 0

    def test_nonreal_rejected(self):
        with pytest.raises(ValueError):
            alg_sign(_two_i())


rationals = st.fractions(min_value=-50, max_value=50,
                         max_denominator=20)


class TestFieldAxioms:
    @given(rationals, rationals, rationals)
    @settings(max_examples=60, deadline=None)
    def test_ring_axioms_on_rationals(self, a, b, c):
        A_, B, C = A(a), A(b), A(c)
        assert (A_ + B) + C == A_ + (B + C)
        assert (A_ * B) * C == A_ * (B * C)
        assert A_ * (B + C) == A_ * B + A_ * C
        assert A_ + B == B + A_
        assert A_ * B == B * A_

    @given(rationals)
    @settings(max_examples=40, deadline=None)
    def test_inverse(self, a):
        if a != 0:
            assert A(a) * A(a).inverse() == A(1)

    def test_axioms_with_irrationals(self):
        s2 = [r for r, _ in roots_of(-2, 0, 1) if r.sign() > 0][0]
        i2 = _two_i()
        assert (s2 + i2) - i2 == s2
        assert (s2 * i2) * i2 == s2 * A(-4)


class TestSerialization:
    def test_round_trip(self):
        p = _phase_34()
        d = p.serialize()
        assert set(d) == {"minpoly", "box"}
        q = AlgebraicNumber.deserialize(d)
        assert q == p

    def test_dyadic_strings(self):
        d = Dyadic(5, -3)
        assert d.serialize() == "5/2^3"
        assert Dyadic.parse("5/2^3") == d
        assert Dyadic.parse(Dyadic(12, 2).serialize()) == Dyadic(48, 0)
