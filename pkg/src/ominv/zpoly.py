"""Integer-coefficient univariate polynomials as coefficient tuples.

Coefficients are ascending (index = monomial degree).  Factorization,
resultants and cyclotomic polynomials are delegated to sympy; everything
else (evaluation, Sturm sequences, real-root isolation) is exact local
arithmetic, since those run inside certified refinement loops.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import sympy
from sympy.abc import y as _y, z as _z

from .dyadic import Box, Dyadic, Iv, horner_box

ZP = tuple  # tuple[int, ...], ascending degree


def zp(coeffs) -> ZP:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(int(x) for x in c)


def zp_degree(f: ZP) -> int:
    return len(f) - 1


def zp_eval(f: ZP, x) -> object:
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
    return acc


def zp_eval_dyadic(f: ZP, re: Dyadic, im: Dyadic) -> tuple[Dyadic, Dyadic]:
    """Exact complex Horner at a dyadic point."""
    ar, ai = Dyadic(0), Dyadic(0)
    for c in reversed(f):
        ar, ai = ar * re - ai * im, ar * im + ai * re
        ar = ar + Dyadic(c)
    return ar, ai


def zp_eval_box(f: ZP, x: Box, prec: int = 0) -> Box:
    return horner_box([Box.point(c) for c in f], x, prec)


def zp_eval_iv(f: ZP, x: Iv) -> Iv:
    acc = Iv.point(0)
    for c in reversed(f):
        acc = acc * x + Iv.point(c)
    return acc


def zp_derivative(f: ZP) -> ZP:
    return zp(i * f[i] for i in range(1, len(f)))


def zp_mul(f: ZP, g: ZP) -> ZP:
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return zp(out)


def zp_compose_square(f: ZP) -> ZP:
    """f(z**2)."""
    out = [0] * (2 * len(f) - 1) if f else []
    for i, c in enumerate(f):
        out[2 * i] = c
    return zp(out)


def zp_primitive(f: ZP) -> ZP:
    """Divide out integer content; force positive leading coefficient."""
    if not f:
        return ()
    g = math.gcd(*[abs(c) for c in f])
    sgn = 1 if f[-1] > 0 else -1
    return tuple(c * sgn // g for c in f)


def qp_clear_denominators(coeffs) -> ZP:
    """Rational coefficient list -> primitive integer polynomial."""
    fracs = [Fraction(c) for c in coeffs]
    den = math.lcm(*[f.denominator for f in fracs]) if fracs else 1
    return zp_primitive(zp(int(f * den) for f in fracs))


def _to_sympy(f: ZP, var=_z):
    return sympy.Poly(list(reversed(f)), var, domain="ZZ")


def _from_sympy(p) -> ZP:
    return zp(reversed([int(c) for c in p.all_coeffs()]))


@lru_cache(maxsize=4096)
def factor_z(f: ZP) -> tuple[tuple[ZP, int], ...]:
    """Irreducible factorization over Z (content dropped, primitive factors)."""
    if zp_degree(f) < 1:
        raise ValueError("constant polynomial")
    _, factors = _to_sympy(f).factor_list()
    out = []
    for p, mult in factors:
        out.append((zp_primitive(_from_sympy(p)), int(mult)))
    out.sort(key=lambda t: (zp_degree(t[0]), t[0]))
    return tuple(out)


def is_irreducible(f: ZP) -> bool:
    fac = factor_z(f)
    return len(fac) == 1 and fac[0][1] == 1


@lru_cache(maxsize=512)
def cyclotomic(n: int) -> ZP:
    return _from_sympy(sympy.Poly(sympy.cyclotomic_poly(n, _z), _z))


def resultant_add(f: ZP, g: ZP) -> ZP:
    """Res_y(f(y), g(z - y)): vanishes on all sums root(f) + root(g)."""
    fy = sympy.Poly(list(reversed(f)), _y, domain="ZZ[z]")
    gz = sympy.Poly(sympy.Poly(list(reversed(g)), _y).as_expr().subs(_y, _z - _y),
                    _y, domain="ZZ[z]")
    return _from_res(fy.resultant(gz))


def resultant_mul(f: ZP, g: ZP) -> ZP:
    """Res_y(f(y), y**deg(g) * g(z/y)): vanishes on all products."""
    m = zp_degree(g)
    # sum_j g_j z^j y^(m-j): descending-y coefficient j is g_j * z^j
    coeffs = [sympy.Integer(g[j]) * _z ** j for j in range(m + 1)]
    fy = sympy.Poly(list(reversed(f)), _y, domain="ZZ[z]")
    gy = sympy.Poly(coeffs, _y, domain="ZZ[z]")
    return _from_res(fy.resultant(gy))


def resultant_eval(M: ZP, g_num: ZP, g_den: int) -> ZP:
    """Res_y(M(y), g_den*z - g_num(y)): vanishes on g_num(root)/g_den.

    Characteristic-polynomial construction for the value of a polynomial
    expression at the roots of M."""
    My = sympy.Poly(list(reversed(M)), _y, domain="ZZ[z]")
    expr = sympy.Integer(g_den) * _z - sympy.Poly(list(reversed(g_num)), _y).as_expr()
    gy = sympy.Poly(expr, _y, domain="ZZ[z]")
    return _from_res(My.resultant(gy))


def resultant_shifted_pair(M: ZP, m: ZP, c: int) -> ZP:
    """Res_y(M(y), m(z - c*y)).

    Vanishes on c*gamma + beta for gamma a root of M, beta a root of m;
    used by the primitive-element compositum construction."""
    s = zp_degree(m)
    expr = sum(sympy.Integer(m[j]) * (_z - c * _y) ** j for j in range(s + 1))
    My = sympy.Poly(list(reversed(M)), _y, domain="ZZ[z]")
    gy = sympy.Poly(expr, _y, domain="ZZ[z]")
    return _from_res(My.resultant(gy))


def _from_res(res) -> ZP:
    p = sympy.Poly(res, _z)
    return zp_primitive(_from_sympy(p))


def minpoly_rational(r) -> ZP:
    fr = Fraction(r.numerator, r.denominator) if not isinstance(r, (int, Fraction)) else Fraction(r)
    return zp((-fr.numerator, fr.denominator))


def minpoly_neg(f: ZP) -> ZP:
    return zp_primitive(zp(c if i % 2 == 0 else -c for i, c in enumerate(f)))


def minpoly_conj(f: ZP) -> ZP:
    return f  # real coefficients: conjugate roots share the minimal polynomial


def minpoly_inv(f: ZP) -> ZP:
    if f[0] == 0:
        raise ZeroDivisionError("0 has no inverse")
    return zp_primitive(tuple(reversed(f)))


def minpoly_shift_rational(f: ZP, r: Fraction) -> ZP:
    """Minimal-polynomial candidate of (root + r): f(z - r), cleared."""
    n = zp_degree(f)
    out = [Fraction(0)] * (n + 1)
    # expand sum f_j (z - r)^j by repeated Horner in (z - r)
    acc = [Fraction(0)] * (n + 1)
    for c in reversed(f):
        # acc = acc*(z - r) + c
        new = [Fraction(0)] * (n + 1)
        for i in range(n):
            new[i + 1] += acc[i]
            new[i] -= acc[i] * r
        new[0] += c
        acc = new
    out = acc
    return qp_clear_denominators(out)


def minpoly_scale_rational(f: ZP, r: Fraction) -> ZP:
    """Of (root * r), r nonzero: f(z/r) cleared."""
    if r == 0:
        raise ValueError("scale by zero")
    n = zp_degree(f)
    coeffs = [Fraction(f[j]) / Fraction(r) ** j for j in range(n + 1)]
    return qp_clear_denominators(coeffs)


# --- Sturm machinery (exact rational) ----------------------------------

def _qp_rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = a[:]
    while len(a) >= len(b) and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        q = a[-1] / b[-1]
        off = len(a) - len(b)
        for i in range(len(b)):
            a[off + i] -= q * b[i]
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def sturm_sequence(f: ZP) -> list[list[Fraction]]:
    seq = [[Fraction(c) for c in f], [Fraction(c) for c in zp_derivative(f)]]
    while len(seq[-1]) > 0:
        r = _qp_rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return seq


def _sign_changes(seq, x: Fraction) -> int:
    signs = []
    for p in seq:
        v = 0
        for c in reversed(p):
            v = v * x + c
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def cauchy_root_bound(f: ZP) -> int:
    lead = abs(f[-1])
    b = Fraction(1) + max(Fraction(abs(c), lead) for c in f[:-1]) if len(f) > 1 else Fraction(1)
    return int(b) + 1


def isolate_real_roots(f: ZP) -> list[tuple[Fraction, Fraction]]:
    """Disjoint open-ish rational intervals, one simple real root each.

    Requires f squarefree.  Interval endpoints are never roots."""
    seq = sturm_sequence(f)
    bound = cauchy_root_bound(f)

    def var(x):
        return _sign_changes(seq, x)

    out = []

    def split(lo, hi, nlo, nhi):
        count = nlo - nhi
        if count == 0:
            return
        if count == 1:
            out.append((lo, hi))
            return
        mid = (lo + hi) / 2
        while zp_eval(f, mid) == 0:  # nudge off an exact root
            mid = (lo + 2 * mid) / 3 if mid != lo else (lo + hi) / 3
        nm = var(mid)
        split(lo, mid, nlo, nm)
        split(mid, hi, nm, nhi)

    lo, hi = Fraction(-bound), Fraction(bound)
    split(lo, hi, var(lo), var(hi))
    out.sort()
    return out


def count_real_roots(f: ZP) -> int:
    seq = sturm_sequence(f)
    bound = cauchy_root_bound(f)
    return _sign_changes(seq, Fraction(-bound)) - _sign_changes(seq, Fraction(bound))
