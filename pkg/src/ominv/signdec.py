"""Eventual-sign analysis of exponential-log polynomials.

Substituting a ray into a polynomial atom yields a finite sum of terms
t^(n.e) * f(u) with formal exponents n.e = sum n_i log_beta(rho_i) and
polynomials f in u = log_beta(t).  Exponent equality and order are decided
exactly; the sign for large t is the sign of the leading coefficient of
the dominant term, and a dominance threshold makes "for all t >= t*"
checkable concretely.

Two coefficient modes share the machinery: exact number-field elements
(rays at root-of-unity phases) and certified interval boxes (dense-torus
phase rectangles, where an undecided leading sign means "subdivide")."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import mpmath

from .cone import (FormalExponent, PhaseVec, TrajectoryCone, ZetaField,
                   fp_eval_box)
from .dyadic import Box, Dyadic, Iv, IV_ZERO
from .numfield import FieldElement, fp_add, fp_mul, fp_scale, fp_trim
from .spectral import Regime

Atom = tuple  # (monomials: tuple[(int, tuple[int,...])], rel: ">" | "=")


@dataclass
class ExpLogTerm:
    exponent: FormalExponent
    f: list                    # ascending coefficients: FieldElement or Box


class ExpLogPoly:
    """Normalized finite sum of t^exponent * f(log_beta t) terms."""

    def __init__(self, cone: TrajectoryCone, terms: list[ExpLogTerm],
                 exact: bool):
        self.cone = cone
        self.terms = terms
        self.exact = exact

    def is_empty(self) -> bool:
        return not self.terms

    def __repr__(self):
        return f"ExpLogPoly({len(self.terms)} terms, exact={self.exact})"


# --------------------------------------------------------------------------
# Composition of an atom with a ray
# --------------------------------------------------------------------------

def _coord_symbols(cone: TrajectoryCone, zf: ZetaField, ph: list):
    """Problem-space coordinates as {exponent vector: u-poly over zf.field}."""
    k = cone.k
    coords = []
    for m in range(cone.d_out):
        acc: dict = {}
        for (i, j), q, pm in zip(cone.pairs, cone.Q, cone.P_full[m]):
            if not q:
                continue
            scale = zf.from_base(pm) * ph[i]
            if scale.is_zero():
                continue
            poly = fp_scale([zf.from_base(c) for c in q], scale)
            if not poly:
                continue
            key = cone.block_exponent(i).nvec
            acc[key] = fp_add(acc.get(key, []), poly)
        coords.append({k_: v for k_, v in acc.items() if v})
    return coords


def _sym_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            key = tuple(x + y for x, y in zip(ka, kb))
            prod = fp_mul(va, vb)
            if prod:
                out[key] = fp_add(out.get(key, []), prod)
    return {k: v for k, v in out.items() if v}


def _sym_pow(a: dict, n: int, one: dict) -> dict:
    out = one
    for _ in range(n):
        out = _sym_mul(out, a)
    return out


def compose_atom(monomials, cone: TrajectoryCone, p: PhaseVec) -> ExpLogPoly:
    """Exact substitution of the ray at phase p into an integer-coefficient
    polynomial over the problem coordinates."""
    zf, ph = cone.phase_elements(p)
    F = zf.field
    coords = _coord_symbols(cone, zf, ph)
    k = cone.k
    zero_key = (0,) * k
    one = {zero_key: [F.one()]}
    total: dict = {}
    for coef, exps in monomials:
        if coef == 0:
            continue
        term = {zero_key: [F.from_rational(coef)]}
        for m, e in enumerate(exps):
            if e:
                term = _sym_mul(term, _sym_pow(coords[m], e, one))
        for key, poly in term.items():
            total[key] = fp_add(total.get(key, []), poly)
    terms = [ExpLogTerm(FormalExponent(key), fp_trim(poly))
             for key, poly in total.items() if fp_trim(poly)]
    return normalize(ExpLogPoly(cone, terms, exact=True))


def compose_atom_boxes(monomials, cone: TrajectoryCone,
                       phase_boxes: list[Box], bits: int = 96) -> ExpLogPoly:
    """Interval-mode substitution: phases given as unit-circle boxes."""
    coords = []
    for m in range(cone.d_out):
        acc: dict = {}
        for (i, j), q, pm in zip(cone.pairs, cone.Q, cone.P_full[m]):
            if not q:
                continue
            scale = pm.enclosure(bits) * phase_boxes[i]
            poly = [c.enclosure(bits) * scale for c in q]
            key = cone.block_exponent(i).nvec
            acc[key] = _bp_add(acc.get(key, []), poly)
        coords.append(acc)
    k = cone.k
    zero_key = (0,) * k
    one = {zero_key: [Box.point(1)]}
    total: dict = {}
    for coef, exps in monomials:
        if coef == 0:
            continue
        term = {zero_key: [Box.point(coef)]}
        for m, e in enumerate(exps):
            for _ in range(e):
                term = _bsym_mul(term, coords[m], bits)
        for key, poly in term.items():
            total[key] = _bp_add(total.get(key, []), poly)
    terms = [ExpLogTerm(FormalExponent(key), poly)
             for key, poly in total.items()]
    return normalize(ExpLogPoly(cone, terms, exact=False))


def _bp_add(a: list, b: list) -> list:
    n = max(len(a), len(b))
    z = Box(IV_ZERO, IV_ZERO)
    return [(a[i] if i < len(a) else z) + (b[i] if i < len(b) else z)
            for i in range(n)]


def _bp_mul(a: list, b: list, bits: int) -> list:
    if not a or not b:
        return []
    out = [Box(IV_ZERO, IV_ZERO)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + ai * bj
    return [c.shrink(2 * bits + 64) for c in out]


def _bsym_mul(a: dict, b: dict, bits: int) -> dict:
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            key = tuple(x + y for x, y in zip(ka, kb))
            prod = _bp_mul(va, vb, bits)
            if prod:
                out[key] = _bp_add(out.get(key, []), prod)
    return out


# --------------------------------------------------------------------------
# Normalization
# --------------------------------------------------------------------------

def normalize(e: ExpLogPoly) -> ExpLogPoly:
    """Merge oracle-equal exponents, drop zero polynomials, sort descending.

    In exact mode the merged coefficient polynomials of a real-valued atom
    must come out real; that is asserted, and coefficients are replaced by
    their verified real parts."""
    cone = e.cone
    classes: list[list] = []     # [exponent, poly]
    for term in e.terms:
        placed = False
        for cl in classes:
            if cone.exponent_cmp(term.exponent, cl[0]) == 0:
                if e.exact:
                    cl[1] = fp_add(cl[1], term.f)
                else:
                    cl[1] = _bp_add(cl[1], term.f)
                placed = True
                break
        if not placed:
            classes.append([term.exponent, list(term.f)])
    out = []
    for expo, poly in classes:
        if e.exact:
            poly = fp_trim(poly)
            if not poly:
                continue
            out.append(ExpLogTerm(expo, poly))
        else:
            while poly and _box_is_tiny_zero(poly[-1]):
                poly = poly[:-1]
            if not poly:
                continue
            out.append(ExpLogTerm(expo, poly))
    import functools
    out.sort(key=functools.cmp_to_key(
        lambda t1, t2: -cone.exponent_cmp(t1.exponent, t2.exponent)))
    return ExpLogPoly(cone, out, e.exact)


def _box_is_tiny_zero(b: Box) -> bool:
    # drop only exact zeros in interval mode (soundness: cannot erase a
    # possibly-nonzero coefficient)
    return b.re.lo.m == 0 and b.re.hi.m == 0 and \
        b.im.lo.m == 0 and b.im.hi.m == 0


def assert_real_coefficients(e: ExpLogPoly) -> ExpLogPoly:
    """Exact mode: verify every merged coefficient is real (conjugation
    test in the working field) and keep the terms as they are."""
    assert e.exact
    for term in e.terms:
        for c in term.f:
            if not (c.conj() == c):
                raise RuntimeError("atom composition produced a non-real "
                                   "coefficient; conjugate pairing broke")
    return e


# --------------------------------------------------------------------------
# Eventual sign and thresholds
# --------------------------------------------------------------------------

def eventual_sign(e: ExpLogPoly) -> Optional[int]:
    """Sign of the expression as t -> infinity: -1, 0, +1.

    Exact mode always answers (empty sum means identically zero).  Interval
    mode returns None when the dominant coefficient's box straddles zero."""
    if not e.terms:
        return 0
    lead = e.terms[0]
    if e.exact:
        c = lead.f[-1]
        return c.sign()
    c = lead.f[-1].re
    s = c.sign()
    return s if s in (1, -1) else None


def _coeff_abs_upper(c, bits: int) -> Fraction:
    b = c if isinstance(c, Box) else c.enclosure(bits)
    hi = b.abs2().hi.as_fraction()
    if hi == 0:
        return Fraction(0)
    with mpmath.workprec(bits + 16):
        v = mpmath.sqrt(mpmath.mpf(hi.numerator) / hi.denominator)
        return Dyadic.from_mpf(v * (1 + mpmath.mpf(2) ** -8)).as_fraction()


def _lead_abs_lower(c, bits: int) -> Fraction:
    """Certified positive lower bound for |leading coefficient|."""
    if isinstance(c, Box):
        b = c
        lo = b.re.lo.as_fraction()
        hi = b.re.hi.as_fraction()
        if lo > 0:
            return lo
        if hi < 0:
            return -hi
        raise ValueError("leading coefficient box not separated from zero")
    bb = bits
    while True:
        box = c.enclosure(bb).re
        lo, hi = box.lo.as_fraction(), box.hi.as_fraction()
        if lo > 0:
            return lo
        if hi < 0:
            return -hi
        bb *= 2
        if bb > 1 << 18:
            raise RuntimeError("cannot separate leading coefficient from 0")


def _poly_tail_start(f: list, bits: int) -> tuple[Fraction, Fraction]:
    """(u0, L): for u >= u0, |f(u)| >= L * u^deg with L = |lead|/2.

    A constant polynomial needs no u constraint (u0 = 0)."""
    lead_lo = _lead_abs_lower(f[-1], bits)
    if len(f) == 1:
        return Fraction(0), lead_lo / 2
    others = sum((_coeff_abs_upper(c, bits) for c in f[:-1]), Fraction(0))
    u0 = max(Fraction(1), 2 * others / lead_lo)
    return u0, lead_lo / 2


def _exponent_gap_lower(cone: TrajectoryCone, diff: FormalExponent) -> Fraction:
    """Certified positive rational lower bound for value(diff) > 0."""
    bits = 96
    while True:
        iv = cone.exponent_value(diff, bits)
        lo = iv.lo.as_fraction()
        if lo > 0:
            return lo
        bits *= 2
        if bits > 1 << 18:
            raise RuntimeError("exponent gap refinement exhausted")


def _log_beta_lower(cone: TrajectoryCone) -> Fraction:
    bits = 96
    while True:
        old = mpmath.iv.prec
        mpmath.iv.prec = bits
        try:
            lb = Iv.from_ivmpf(cone._log_beta_iv(bits))
        finally:
            mpmath.iv.prec = old
        lo = lb.lo.as_fraction()
        if lo > 0:
            return lo
        bits *= 2


def _beta_pow_upper(cone: TrajectoryCone, u: Fraction) -> Fraction:
    """Rational upper bound for beta**u (u >= 0)."""
    if u <= 0:
        return Fraction(1)
    bits = 96
    old = mpmath.iv.prec
    mpmath.iv.prec = bits
    try:
        b = cone.beta_interval(bits).to_ivmpf()
        uf = mpmath.iv.mpf(u.numerator) / u.denominator
        val = Iv.from_ivmpf(mpmath.iv.exp(uf * mpmath.iv.log(b)))
    finally:
        mpmath.iv.prec = old
    return val.hi.as_fraction()


def _rat_root_upper(x: Fraction, r: Fraction) -> Fraction:
    """Rational upper bound for x**(1/r), x >= 0, r > 0."""
    if x <= 1:
        return Fraction(1)
    bits = 96
    with mpmath.workprec(bits):
        v = mpmath.mpf(x.numerator) / x.denominator
        e = mpmath.mpf(r.numerator) / r.denominator
        out = mpmath.exp(mpmath.log(v) / e) * (1 + mpmath.mpf(2) ** -16)
        return Dyadic.from_mpf(out).as_fraction()


def dominance_threshold(e: ExpLogPoly, bits: int = 96) -> Fraction:
    """Rational t* such that for all t >= t*: the leading term exceeds the
    sum of all other terms in absolute value and the leading polynomial
    keeps a constant sign.  Requires a normalized, nonempty input."""
    if not e.terms:
        raise ValueError("empty exp-log polynomial has no threshold")
    cone = e.cone
    lead = e.terms[0]
    u0, L = _poly_tail_start(lead.f, bits)
    D1 = len(lead.f) - 1
    rest = e.terms[1:]
    t_star = max(Fraction(1), cone.t0)

    if cone.regime is Regime.UNIT_MODULUS:
        # exponents all merge; after normalize there is a single term and
        # the threshold is just the polynomial's tail start (u = t)
        assert not rest
        return max(t_star, u0)

    # t must be large enough that u(t) >= u0 (and >= 1 when the sum-of-rest
    # bounds S_c * u^Dc are in play)
    u_req = max(u0, Fraction(1)) if rest else u0
    if u_req > 0:
        t_star = max(t_star, _beta_pow_upper(cone, u_req))
    M = len(rest)
    log_beta_lo = _log_beta_lower(cone)
    for term in rest:
        gap = _exponent_gap_lower(cone, lead.exponent - term.exponent)
        S = sum((_coeff_abs_upper(c, bits) for c in term.f), Fraction(0))
        if S == 0:
            continue
        Dc = len(term.f) - 1
        ratio = (2 * M * S) / L
        if Dc <= D1:
            # need t^gap >= ratio
            t_star = max(t_star, _rat_root_upper(ratio, gap))
            continue
        # need t^gap >= ratio * u^(Dc - D1), u = log_beta t; beyond the
        # monotonicity point u_mono the left side grows strictly faster
        m_exp = Dc - D1
        u_mono = Fraction(m_exp) / (gap * log_beta_lo)
        t_cand = max(t_star, _beta_pow_upper(cone, max(u0, u_mono, Fraction(1))))
        while True:
            if _dominance_check_at(cone, gap, ratio, m_exp, t_cand, bits):
                break
            t_cand *= 2
        t_star = max(t_star, t_cand)
    return t_star


def _dominance_check_at(cone, gap: Fraction, ratio: Fraction, m_exp: int,
                        t: Fraction, bits: int) -> bool:
    """Certified check: t^gap >= ratio * (log_beta t)^m_exp at this t."""
    old = mpmath.iv.prec
    mpmath.iv.prec = bits
    try:
        tf = mpmath.iv.mpf(t.numerator) / t.denominator
        g = mpmath.iv.mpf(gap.numerator) / gap.denominator
        lhs = mpmath.iv.exp(g * mpmath.iv.log(tf))
        u = Iv.from_ivmpf(mpmath.iv.log(tf) / cone._log_beta_iv(bits))
        rhs = Iv.point(ratio) * u.pow_int(m_exp)
        lhs_iv = Iv.from_ivmpf(lhs)
        return rhs.hi.as_fraction() < lhs_iv.lo.as_fraction()
    finally:
        mpmath.iv.prec = old


def eval_interval(e: ExpLogPoly, t: Fraction, bits: int = 128) -> Iv:
    """Certified interval value at a rational t (real part; exact-mode
    expressions are real, the imaginary slack is checked to contain 0)."""
    cone = e.cone
    u = cone.u_interval(t, bits)
    acc = Box(IV_ZERO, IV_ZERO)
    for term in e.terms:
        if e.exact:
            fv = fp_eval_box(term.f, u, bits)
        else:
            fv = Box(IV_ZERO, IV_ZERO)
            ub = Box(u, IV_ZERO)
            for c in reversed(term.f):
                fv = fv * ub + c
        tp = cone.t_power_interval(term.exponent, t, bits)
        acc = acc + fv.scale(tp)
    assert acc.im.contains_zero()
    return acc.re


# --------------------------------------------------------------------------
# Formula-level eventual truth
# --------------------------------------------------------------------------

def atom_eventual_state(monomials, rel: str, cone: TrajectoryCone,
                        p: PhaseVec) -> tuple[bool, Fraction]:
    """(eventual truth of `monomials rel 0` along the ray, threshold)."""
    e = assert_real_coefficients(compose_atom(monomials, cone, p))
    s = eventual_sign(e)
    if rel == ">":
        truth = s == 1
    elif rel == "=":
        truth = s == 0
    else:
        raise ValueError(f"atoms must be normalized to > or =, got {rel!r}")
    thr = max(Fraction(1), cone.t0) if e.is_empty() else dominance_threshold(e)
    return truth, thr


def eventual_truth(formula, cone: TrajectoryCone,
                   p: PhaseVec) -> tuple[bool, Fraction]:
    """Stable truth value of a {>,=}-normalized formula along the ray at
    phase p, with the threshold beyond which it holds."""
    kind = formula[0]
    if kind == "atom":
        _, monomials, rel = formula
        return atom_eventual_state(monomials, rel, cone, p)
    if kind == "and":
        parts = [eventual_truth(f, cone, p) for f in formula[1]]
        return all(t for t, _ in parts), \
            max([thr for _, thr in parts], default=max(Fraction(1), cone.t0))
    if kind == "or":
        parts = [eventual_truth(f, cone, p) for f in formula[1]]
        return any(t for t, _ in parts), \
            max([thr for _, thr in parts], default=max(Fraction(1), cone.t0))
    raise ValueError(f"unknown formula node {kind!r}")
