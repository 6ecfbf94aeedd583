"""Number fields Q(gamma) with a designated complex embedding.

A NumberField is Q[z]/(M) for an irreducible integer polynomial M together
with a designated root gamma (certified box).  Elements are polynomials in
gamma with exact rational coefficients, so equality and zero tests are
coefficient comparisons — no precision anywhere in the identity path.

Fields grow by primitive-element adjunction (`adjoin`); the compositum of
all eigenvalues of a rational matrix is conjugation-closed, which lets us
install complex conjugation as a verified field automorphism.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Optional

from .algebraic import (AlgebraicNumber, PrecisionExhausted, _designate,
                        _identify_factors, rootset)
from .dyadic import Box, Iv, IV_ZERO, Rat, dyadic_bounds, horner_box
from .zpoly import (ZP, factor_z, resultant_eval, resultant_shifted_pair, zp,
                    zp_degree)

_R0 = Rat(0, 1)
_R1 = Rat(1, 1)


def _rat(x) -> "Rat":
    if isinstance(x, int):
        return Rat(x, 1)
    return Rat(int(x.numerator), int(x.denominator))


class NumberField:
    """Q(gamma), gamma a designated root of the irreducible polynomial M."""

    def __init__(self, M: ZP, root_idx: int = 0):
        self.M = M
        self.degree = zp_degree(M)
        self.root_idx = root_idx
        if self.degree > 1:
            self._rs = rootset(M)
        else:
            self._rs = None
        # reduction table: gamma^k for k in [deg, 2 deg - 2]
        monic = [Fraction(c, M[-1]) for c in M[:-1]]
        self._red: list[tuple] = []
        prev = [_rat(-c) for c in monic]          # gamma^deg
        self._red.append(tuple(prev))
        for _ in range(self.degree - 2):
            nxt = [_R0] + prev[:-1]
            top = prev[-1]
            if top != 0:
                nxt = [nxt[i] + top * _rat(-monic[i]) for i in range(self.degree)]
            prev = nxt
            self._red.append(tuple(prev))
        # integer form of the table (one shared denominator) for fast mults
        import math
        D = 1
        for row in self._red:
            for c in row:
                D = math.lcm(D, int(c.denominator))
        self._red_den = D
        self._red_int = [[int(c.numerator) * (D // int(c.denominator))
                          for c in row] for row in self._red]
        self.conj_gen: Optional["FieldElement"] = None   # image of gamma under conj
        self._conj_pows: Optional[list["FieldElement"]] = None

    # -- basics ---------------------------------------------------------------
    def zero(self) -> "FieldElement":
        return FieldElement(self, (_R0,) * self.degree)

    def one(self) -> "FieldElement":
        return self.from_rational(1)

    def gen(self) -> "FieldElement":
        if self.degree == 1:
            return self.from_rational(Fraction(-self.M[0], self.M[1]))
        c = [_R0] * self.degree
        c[1] = _R1
        return FieldElement(self, tuple(c))

    def from_rational(self, r) -> "FieldElement":
        c = [_R0] * self.degree
        c[0] = _rat(r)
        return FieldElement(self, tuple(c))

    def gamma_box(self, bits: int) -> Box:
        if self.degree == 1:
            val = Fraction(-self.M[0], self.M[1])
            lo, hi = dyadic_bounds(val, bits)
            return Box(Iv(lo, hi), IV_ZERO)
        return self._rs.refine(self.root_idx, bits)

    def gamma_algebraic(self) -> AlgebraicNumber:
        if self.degree == 1:
            return AlgebraicNumber.from_rational(Fraction(-self.M[0], self.M[1]))
        return AlgebraicNumber.from_designated_root(self.M, self.root_idx)

    def __repr__(self):
        return f"NumberField(deg={self.degree})"

    # -- reduction -------------------------------------------------------------
    def _reduce(self, coeffs: list) -> tuple:
        """Reduce a coefficient list of length <= 2 deg - 1 mod M."""
        n = self.degree
        out = list(coeffs[:n]) + [_R0] * (n - min(n, len(coeffs)))
        for k in range(n, len(coeffs)):
            ck = coeffs[k]
            if ck != 0:
                row = self._red[k - n]
                for i in range(n):
                    if row[i] != 0:
                        out[i] = out[i] + ck * row[i]
        return tuple(out)

    # -- conjugation -------------------------------------------------------------
    def install_conj(self, conj_gen: "FieldElement"):
        """Register gamma-bar = conj_gen(gamma); verified by the caller."""
        self.conj_gen = conj_gen
        pows = [self.one()]
        for _ in range(self.degree - 1):
            pows.append(pows[-1] * conj_gen)
        self._conj_pows = pows

    def conj_of(self, e: "FieldElement") -> "FieldElement":
        if self.degree == 1:
            return e
        if self.conj_gen is None:
            raise ValueError("field has no conjugation map installed")
        acc = self.zero()
        for c, p in zip(e.coeffs, self._conj_pows):
            if c != 0:
                acc = acc + p.scale(c)
        return acc


class FieldElement:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs

    def __repr__(self):
        b = self.enclosure(24)
        return (f"FE~({float(b.re.mid().as_fraction()):.5g}"
                f"{float(b.im.mid().as_fraction()):+.5g}i)")

    # -- ring ops ------------------------------------------------------------
    def __add__(self, o: "FieldElement") -> "FieldElement":
        return FieldElement(self.field,
                            tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    def __sub__(self, o: "FieldElement") -> "FieldElement":
        return FieldElement(self.field,
                            tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field, tuple(-a for a in self.coeffs))

    def scale(self, r) -> "FieldElement":
        r = _rat(r)
        return FieldElement(self.field, tuple(r * a for a in self.coeffs))

    def __mul__(self, o: "FieldElement") -> "FieldElement":
        """Integer convolution + one normalization per output coefficient
        (mpq arithmetic per partial product would re-run gcd constantly)."""
        import math
        F = self.field
        n = F.degree
        da = math.lcm(*[int(c.denominator) for c in self.coeffs])
        db = math.lcm(*[int(c.denominator) for c in o.coeffs])
        A = [int(c.numerator) * (da // int(c.denominator)) for c in self.coeffs]
        B = [int(c.numerator) * (db // int(c.denominator)) for c in o.coeffs]
        prod = [0] * (2 * n - 1)
        for i, ai in enumerate(A):
            if ai:
                for j, bj in enumerate(B):
                    if bj:
                        prod[i + j] += ai * bj
        D = F._red_den
        out = [prod[i] * D for i in range(n)]
        for k in range(n, 2 * n - 1):
            ck = prod[k]
            if ck:
                row = F._red_int[k - n]
                for i in range(n):
                    if row[i]:
                        out[i] += ck * row[i]
        den = da * db * D
        return FieldElement(F, tuple(Rat(v, den) for v in out))

    def inverse(self) -> "FieldElement":
        """Extended Euclid against the (monicized) minimal polynomial."""
        if self.is_zero():
            raise ZeroDivisionError("field element is zero")
        n = self.field.degree
        lcM = int(self.field.M[-1])
        M = [Rat(int(c), lcM) for c in self.field.M]
        a = [Rat(int(c.numerator), int(c.denominator)) for c in self.coeffs]
        # invariants: r0 = s0 * e (mod M), r1 = s1 * e (mod M)
        r0, s0 = M, [_R0]
        r1, s1 = a, [_R1]
        while True:
            while r1 and r1[-1] == 0:
                r1.pop()
            if len(r1) == 1:
                inv = 1 / r1[0]
                out = [c * inv for c in s1] + [_R0] * n
                return FieldElement(self.field, tuple(out[:n]))
            # r0 = q r1 + r2
            q = [_R0] * (len(r0) - len(r1) + 1)
            r2 = r0[:]
            for k in range(len(r0) - len(r1), -1, -1):
                if len(r2) < len(r1) + k:
                    continue
                c = r2[len(r1) + k - 1] / r1[-1]
                q[k] = c
                if c:
                    for i in range(len(r1)):
                        r2[i + k] -= c * r1[i]
                r2.pop()
            while r2 and r2[-1] == 0:
                r2.pop()
            if not r2:
                raise ZeroDivisionError("not invertible (reducible modulus?)")
            # s2 = s0 - q s1
            s2 = s0 + [_R0] * max(0, len(q) + len(s1) - 1 - len(s0))
            for i, qi in enumerate(q):
                if qi:
                    for j, sj in enumerate(s1):
                        s2[i + j] -= qi * sj
            r0, s0, r1, s1 = r1, s1, r2, s2

    def __truediv__(self, o: "FieldElement") -> "FieldElement":
        return self * o.inverse()

    def pow_int(self, k: int) -> "FieldElement":
        if k == 0:
            return self.field.one()
        if k < 0:
            return self.inverse().pow_int(-k)
        acc, base = None, self
        while k:
            if k & 1:
                acc = base if acc is None else acc * base
            k >>= 1
            if k:
                base = base * base
        return acc

    # -- predicates --------------------------------------------------------------
    def __eq__(self, o):
        if not isinstance(o, FieldElement) or o.field is not self.field:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and all(c == 0 for c in self.coeffs[1:])

    def as_rational(self):
        if all(c == 0 for c in self.coeffs[1:]):
            return self.coeffs[0]
        return None

    def conj(self) -> "FieldElement":
        return self.field.conj_of(self)

    def is_real(self) -> bool:
        if self.field.degree == 1:
            return True
        if self.field.conj_gen is not None:
            return self.conj() == self
        poly, idx = self.identify_minpoly()
        return rootset(poly).roots[idx].is_real

    def sign(self) -> int:
        """Exact sign of a real element."""
        if self.is_zero():
            return 0
        r = self.as_rational()
        if r is not None:
            return 1 if r > 0 else -1
        if not self.is_real():
            raise ValueError("sign of a non-real field element")
        bits = 64
        while True:
            s = self.enclosure(bits).re.sign()
            if s is not None:
                return s
            bits *= 2
            if bits > 1 << 20:
                raise PrecisionExhausted("sign refinement exhausted")

    # -- numerics ------------------------------------------------------------------
    def enclosure(self, bits: int) -> Box:
        """Certified box of width <= 2**-bits around the element's value."""
        target = Fraction(1, 2) ** bits
        b = bits + 8
        for _ in range(40):
            gb = self.field.gamma_box(b)
            coeff_boxes = []
            for c in self.coeffs:
                lo, hi = dyadic_bounds(c, b)
                coeff_boxes.append(Box(Iv(lo, hi), IV_ZERO))
            val = horner_box(coeff_boxes, gb, prec=2 * b)
            if val.width() <= target:
                return val
            b *= 2
        raise PrecisionExhausted("element enclosure did not converge")

    # -- identity with the AlgebraicNumber world --------------------------------------
    def identify_minpoly(self) -> tuple[ZP, int]:
        import math
        den = math.lcm(*[int(_fraction(c).denominator) for c in self.coeffs])
        gnum = zp(int(_fraction(c) * den) for c in self.coeffs)
        if not gnum:
            gnum = (0,)
        cand = resultant_eval(self.field.M, gnum, den)
        an = _identify_factors(cand, lambda bits: self.enclosure(bits))
        if an._rat is not None:
            raise RuntimeError("rational value should use as_rational path")
        return an._poly, an._idx

    def to_algebraic(self) -> AlgebraicNumber:
        return AlgebraicNumber.from_field_element(self)


def _fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


TRIVIAL = NumberField(zp((0, 1)))  # Q itself: gamma = 0
TRIVIAL.install_conj(TRIVIAL.gen())


# --------------------------------------------------------------------------
# Field polynomial arithmetic (dense, coefficients in one field)
# --------------------------------------------------------------------------

def fp_trim(c: list) -> list:
    while c and c[-1].is_zero():
        c.pop()
    return c


def fp_add(a: list, b: list) -> list:
    if not a:
        return list(b)
    if not b:
        return list(a)
    f = a[0].field
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else f.zero()) + (b[i] if i < len(b) else f.zero())
           for i in range(n)]
    return fp_trim(out)


def fp_neg(a: list) -> list:
    return [-c for c in a]

def fp_sub(a: list, b: list) -> list:
    return fp_add(a, fp_neg(b))


def fp_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    f = a[0].field
    out = [f.zero()] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if not ai.is_zero():
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
    return fp_trim(out)


def fp_scale(a: list, s: FieldElement) -> list:
    return fp_trim([c * s for c in a])


def fp_eval(a: list, x: FieldElement) -> FieldElement:
    acc = x.field.zero()
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _fp_rational_content(a: list):
    """gcd of all rational coefficients appearing across the elements."""
    import math
    nums, dens = [], []
    for e in a:
        for c in e.coeffs:
            if c != 0:
                nums.append(abs(int(c.numerator)))
                dens.append(int(c.denominator))
    if not nums:
        return Rat(1, 1)
    return Rat(math.gcd(*nums), math.lcm(*dens))


def fp_gcd_monic(a: list, b: list) -> list:
    """Monic gcd in K[y] via pseudo-division.

    Field inverses are expensive (extended Euclid mod the generator's
    minimal polynomial), so the remainder sequence multiplies through by
    leading coefficients instead of dividing, with rational-content removal
    to keep coefficient bit growth in check.  One inverse at the end."""
    a, b = fp_trim(a[:]), fp_trim(b[:])
    while b:
        r = a[:]
        lb = b[-1]
        while len(r) >= len(b):
            lr = r[-1]
            off = len(r) - len(b)
            r = [lb * c for c in r]
            for i in range(len(b)):
                r[off + i] = r[off + i] - lr * b[i]
            r.pop()
            fp_trim(r)
            if not r:
                break
        if r:
            content = _fp_rational_content(r)
            if content != 1:
                inv_c = 1 / content
                r = [c.scale(inv_c) for c in r]
        a, b = b, r
    inv = a[-1].inverse()
    return [c * inv for c in a]


# --------------------------------------------------------------------------
# Adjunction
# --------------------------------------------------------------------------

class Extension:
    """Result of adjoining beta to K: the new field F = Q(c*gamma + beta),
    the embedding of K's generator, beta as an element of F, and the
    integer shift c (None when the field did not grow)."""

    __slots__ = ("field", "old_gen", "beta", "shift", "_embed_pows")

    def __init__(self, field: NumberField, old_gen: FieldElement,
                 beta: FieldElement, old_degree: int, shift: Optional[int]):
        self.field = field
        self.old_gen = old_gen
        self.beta = beta
        self.shift = shift
        pows = [field.one()]
        for _ in range(old_degree - 1):
            pows.append(pows[-1] * old_gen)
        self._embed_pows = pows

    def embed(self, e: FieldElement) -> FieldElement:
        acc = self.field.zero()
        for c, p in zip(e.coeffs, self._embed_pows):
            if c != 0:
                acc = acc + p.scale(c)
        return acc


def adjoin(K: NumberField, beta: AlgebraicNumber) -> Extension:
    """Compositum K(beta) via a separating primitive element c*gamma + beta."""
    r = beta.as_rational()
    if r is not None:
        return Extension(K, K.gen(), K.from_rational(r), K.degree, None)
    beta._materialize()
    m, bidx = beta._poly, beta._idx
    if K.degree == 1:
        # only the trivial field (gamma = 0) has degree 1 here
        assert K.M == (0, 1)
        F = NumberField(m, bidx)
        return Extension(F, F.from_rational(0), F.gen(), 1, 1)
    for c in range(1, 64):
        cand = resultant_shifted_pair(K.M, m, c)
        if any(mult > 1 for _, mult in factor_z(cand)):
            continue        # not a separating shift
        def enclosure(bits, c=c):
            return K.gamma_box(bits).scale(Iv.point(c, bits)) + beta.refine(bits)

        gamma_new = _identify_factors(cand, enclosure)
        if gamma_new._rat is not None:
            continue        # degenerate; try another shift
        F = NumberField(gamma_new._poly, gamma_new._idx)
        # locate the old generator: gcd(K.M(y), m(gamma' - c*y)) is linear
        My = [F.from_rational(co) for co in K.M]
        gprime = F.gen()
        base = [gprime, F.from_rational(-c)]     # gamma' - c*y
        acc = [F.one()]
        poly_y: list = []
        for j, co in enumerate(m):
            if co:
                poly_y = fp_add(poly_y, fp_scale(acc, F.from_rational(co)))
            if j < len(m) - 1:
                acc = fp_mul(acc, base)
        g = fp_gcd_monic(My, poly_y)
        if len(g) != 2:
            continue        # unlucky shift despite squarefree resultant
        old_gen = -g[0]
        beta_elt = gprime - old_gen.scale(c)
        # exact sanity: both satisfy their minimal polynomials
        if not fp_eval([F.from_rational(co) for co in K.M], old_gen).is_zero():
            raise RuntimeError("embedding verification failed")
        if not fp_eval([F.from_rational(co) for co in m], beta_elt).is_zero():
            raise RuntimeError("adjoined root verification failed")
        # designation sanity: old_gen's value is K's designated gamma
        if K.degree > 1:
            idx = _designate(rootset(K.M), lambda bits: old_gen.enclosure(bits))
            if idx != K.root_idx:
                raise RuntimeError("embedding picked a wrong conjugate")
        if zp_degree(m) > 1:
            idx = _designate(rootset(m), lambda bits: beta_elt.enclosure(bits))
            if idx != bidx:
                raise RuntimeError("adjunction picked a wrong conjugate")
        return Extension(F, old_gen, beta_elt, K.degree, c)
    raise PrecisionExhausted("no separating shift found")


def adjoin_with_conj(K: NumberField, beta: AlgebraicNumber,
                     conj_expr: Callable[[FieldElement], FieldElement]) -> Extension:
    """adjoin() that also carries the conjugation automorphism forward.

    `conj_expr(beta_elt)` must express conj(beta) in the new field, e.g.
    identity for real beta, negation for i, beta**(N-1) for an N-th root
    of unity."""
    if K.conj_gen is None:
        raise ValueError("base field has no conjugation map")
    ext = adjoin(K, beta)
    if ext.field is K:
        return ext
    new_conj = ext.embed(K.conj_gen).scale(ext.shift) + conj_expr(ext.beta)
    if not verify_conj_map(ext.field, new_conj):
        raise RuntimeError("conjugation did not extend")
    ext.field.install_conj(new_conj)
    gbar = ext.field.conj_of(ext.field.gen())
    if ext.field.conj_of(gbar) != ext.field.gen():
        raise RuntimeError("extended conjugation is not an involution")
    return ext


def verify_conj_map(F: NumberField, cand: FieldElement) -> bool:
    """cand must be a root of M designated as the conjugate of gamma."""
    Mp = [F.from_rational(co) for co in F.M]
    if not fp_eval(Mp, cand).is_zero():
        return False
    if F.degree == 1:
        return True
    idx = _designate(rootset(F.M), lambda bits: cand.enclosure(bits))
    want = _designate(rootset(F.M),
                      lambda bits: F.gamma_box(bits).conj())
    return idx == want


class SplittingField:
    """Compositum of all roots of a family of irreducible polynomials,
    with complex conjugation installed and every root located."""

    def __init__(self, polys: list[ZP]):
        self.polys = list(dict.fromkeys(polys))
        self.field = TRIVIAL
        # gamma as an integer combination of located roots: [(poly, idx, c)]
        self._gamma_combo: list[tuple[ZP, int, int]] = []
        self.located: dict[tuple[ZP, int], FieldElement] = {}
        for p in self.polys:
            self._locate_all_roots(p)
        self._install_conj()

    # each adjunction re-embeds everything located so far
    def _migrate(self, ext: Extension):
        self.field = ext.field
        self.located = {k: ext.embed(v) for k, v in self.located.items()}

    def _locate_all_roots(self, p: ZP):
        deg = zp_degree(p)
        if deg == 1:
            self.located[(p, 0)] = self.field.from_rational(Fraction(-p[0], p[1]))
            return
        remaining = list(range(deg))
        while remaining:
            # known roots of p divide it; a linear quotient is a free root
            known = [self.located[(p, i)] for i in range(deg) if (p, i) in self.located]
            if len(known) == deg - 1:
                # root sum = -p[deg-1]/p[deg] gives the last one for free
                s = self.field.zero()
                for e in known:
                    s = s + e
                last = self.field.from_rational(Fraction(-p[-2], p[-1])) - s
                self.located[(p, remaining[0])] = last
                remaining.clear()
                continue
            idx = remaining[0]
            beta = AlgebraicNumber.from_designated_root(p, idx)
            ext = adjoin(self.field, beta)
            if ext.field is not self.field:
                self._migrate(ext)
                # gamma_new = shift*gamma_old + beta
                self._gamma_combo = [(q, i, c * ext.shift)
                                     for (q, i, c) in self._gamma_combo]
                self._gamma_combo.append((p, idx, 1))
            self.located[(p, idx)] = ext.beta
            remaining.remove(idx)

    def _install_conj(self):
        if self.field.degree == 1:
            self.field.install_conj(self.field.gen())
            return
        acc = self.field.zero()
        for (p, idx, c) in self._gamma_combo:
            cidx = self._conj_index(p, idx)
            acc = acc + self.located[(p, cidx)].scale(c)
        if not verify_conj_map(self.field, acc):
            raise RuntimeError("conjugation map verification failed")
        self.field.install_conj(acc)
        # involution check
        gbar = self.field.conj_of(self.field.gen())
        if self.field.conj_of(gbar) != self.field.gen():
            raise RuntimeError("conjugation is not an involution")

    def _conj_index(self, p: ZP, idx: int) -> int:
        rs = rootset(p)
        return _designate(rs, lambda bits: rs.refine(idx, bits).conj())

    def root(self, p: ZP, idx: int) -> FieldElement:
        return self.located[(p, idx)]




