"""Trajectory cones and rays.

A cone coordinate (block i, row j) is t^{e_i} * p_i * Q_{i,j}(u), where
u = log_beta(t) for the growth base beta > 1 (the dominant modulus, or its
inverse in the contracting regime; u = t when every modulus is 1), e_i is
the formal exponent log_beta(rho_i), p ranges over the eigenvalue subtorus
and the Q polynomials collect the Jordan-chain binomials.

Everything identity-critical is exact: Q coefficients and the transform
back to problem space live in the decomposition's number field, phases are
roots of unity in a cyclotomic extension, exponents are compared through
the squared-modulus product oracle, and the J-action is verified as a
coefficient-level polynomial identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import mpmath

from .dyadic import Box, Iv, IV_ZERO, Dyadic, dyadic_bounds
from .numfield import (FieldElement, NumberField, adjoin_with_conj, fp_add,
                       fp_eval, fp_scale, fp_trim)
from .spectral import ExtendedField, JordanDecomposition, Regime, mat_vec
from .torus import ModuliSignOracle, TorusGroup, TorusPoint, zeta_power


# --------------------------------------------------------------------------
# Formal exponents
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FormalExponent:
    """Integer combination of log-moduli; value = sum n_i log_beta(rho_i).

    Equality and order are decided exactly by the moduli sign oracle,
    never by floating comparison."""
    nvec: tuple

    @staticmethod
    def zero(k: int) -> "FormalExponent":
        return FormalExponent((0,) * k)

    @staticmethod
    def unit(k: int, i: int) -> "FormalExponent":
        return FormalExponent(tuple(1 if j == i else 0 for j in range(k)))

    def __add__(self, o: "FormalExponent") -> "FormalExponent":
        return FormalExponent(tuple(a + b for a, b in zip(self.nvec, o.nvec)))

    def __sub__(self, o: "FormalExponent") -> "FormalExponent":
        return FormalExponent(tuple(a - b for a, b in zip(self.nvec, o.nvec)))

    def scaled(self, m: int) -> "FormalExponent":
        return FormalExponent(tuple(m * a for a in self.nvec))


# --------------------------------------------------------------------------
# Phase assignments
# --------------------------------------------------------------------------

@dataclass
class ZetaField:
    """A cone working field: decomposition field + moduli + zeta_N."""
    N: int
    field: NumberField
    from_base: object          # dec.field element -> field
    from_ext: object           # extended-field element -> field
    zeta: FieldElement
    moduli: list               # block moduli as elements of `field`
    phases: list               # block unit phases as elements of `field`


class PhaseVec:
    """Phases for the k blocks: a root-of-unity torus point, or explicit
    elements of a cone working field (dense-torus rays after J-shifts)."""

    def __init__(self, point: Optional[TorusPoint] = None,
                 zf: Optional[ZetaField] = None,
                 elems: Optional[list] = None):
        if (point is None) == (zf is None):
            raise ValueError("exactly one representation required")
        self.point = point
        self.zf = zf
        self.elems = elems

    @property
    def k(self) -> int:
        return len(self.point.exps) if self.point else len(self.elems)

    def boxes(self, bits: int) -> list[Box]:
        if self.point is not None:
            return self.point.coord_boxes(bits)
        return [e.enclosure(bits) for e in self.elems]

    def __repr__(self):
        if self.point is not None:
            return f"PhaseVec(zeta_{self.point.N}^{list(self.point.exps)})"
        return f"PhaseVec({self.elems!r})"


# --------------------------------------------------------------------------
# Field polynomial helpers (coefficients in one number field, variable u)
# --------------------------------------------------------------------------

def fp_compose_shift(poly: list, F: NumberField) -> list:
    """poly(u + 1): c'_j = sum_{m >= j} C(m, j) c_m."""
    n = len(poly)
    out = []
    for j in range(n):
        acc = F.zero()
        for m in range(j, n):
            acc = acc + poly[m].scale(math.comb(m, j))
        out.append(acc)
    return fp_trim(out)


def fp_eval_rational(poly: list, F: NumberField, u) -> FieldElement:
    acc = F.zero()
    un = F.from_rational(u)
    for c in reversed(poly):
        acc = acc * un + c
    return acc


def fp_eval_box(poly: list, u: Iv, bits: int) -> Box:
    acc = Box(IV_ZERO, IV_ZERO)
    ub = Box(u, IV_ZERO)
    for c in reversed(poly):
        acc = acc * ub + c.enclosure(bits)
        acc = acc.shrink(2 * bits + 64)
    return acc


def binom_poly(c: int) -> list[Fraction]:
    """C(u, c) = (1/c!) prod_{m<c} (u - m), ascending rational coefficients."""
    coeffs = [Fraction(1)]
    for m in range(c):
        # multiply by (u - m)
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for i, a in enumerate(coeffs):
            nxt[i + 1] += a
            nxt[i] -= a * m
        coeffs = nxt
    fact = math.factorial(c)
    return [a / fact for a in coeffs]


# --------------------------------------------------------------------------
# The cone
# --------------------------------------------------------------------------

class TrajectoryCone:
    """Symbolic cone for one decomposed system, truncated at t0."""

    def __init__(self, dec: JordanDecomposition, x_state, embedding,
                 t0: Fraction = Fraction(1)):
        if t0 < 1:
            raise ValueError("t0 must be >= 1")
        self.dec = dec
        self.regime = dec.regime
        self.t0 = Fraction(t0)
        F = dec.field
        self.field = F
        self.k = dec.k
        self.x_state = [F.from_rational(c) for c in x_state]
        self.x_prime = mat_vec(dec.P_inv, self.x_state)
        self.Q = q_polynomials(dec, self.x_prime)
        # transform from pre-P cone coordinates to problem space
        d_red = dec.d
        if embedding is None:
            self.P_full = dec.P
        else:
            emb = [[F.from_rational(c) for c in row] for row in embedding]
            self.P_full = [[_dot(emb_row, [dec.P[r][c] for r in range(d_red)], F)
                            for c in range(d_red)] for emb_row in emb]
        self.d_out = len(self.P_full)
        self.pairs = dec.block_row_pairs()
        self.oracle = ModuliSignOracle([b.mod_sq for b in dec.blocks])
        self._zeta_cache: dict[int, tuple] = {}

    # -- exponents -----------------------------------------------------------
    def block_exponent(self, i: int) -> FormalExponent:
        if self.regime is Regime.UNIT_MODULUS:
            return FormalExponent.zero(self.k)
        return FormalExponent.unit(self.k, i)

    def exponent_sign(self, e: FormalExponent) -> int:
        if self.regime is Regime.UNIT_MODULUS:
            return 0
        return self.oracle.sign(list(e.nvec))

    def exponent_cmp(self, a: FormalExponent, b: FormalExponent) -> int:
        return self.exponent_sign(a - b)

    def exponent_value(self, e: FormalExponent, bits: int = 96) -> Iv:
        """Certified interval for sum n_i log_beta(rho_i)."""
        if self.regime is Regime.UNIT_MODULUS:
            return Iv.point(0)
        old = mpmath.iv.prec
        mpmath.iv.prec = bits + 16
        try:
            total = mpmath.iv.mpf(0)
            for n, b in zip(e.nvec, self.dec.blocks):
                if n:
                    sq = b.mod_sq.enclosure(bits).re.to_ivmpf()
                    total += n * mpmath.iv.log(sq) / 2
            lb = self._log_beta_iv(bits)
            return Iv.from_ivmpf(total / lb)
        finally:
            mpmath.iv.prec = old

    def _log_beta_iv(self, bits: int):
        kappa = self.dec.dominant_index
        sq = self.dec.blocks[kappa].mod_sq.enclosure(bits).re.to_ivmpf()
        lb = mpmath.iv.log(sq) / 2
        if self.regime is Regime.CONTRACTING:
            lb = -lb
        return lb

    def beta_interval(self, bits: int = 96) -> Iv:
        """The growth base beta > 1 (undefined for unit-modulus)."""
        old = mpmath.iv.prec
        mpmath.iv.prec = bits + 16
        try:
            return Iv.from_ivmpf(mpmath.iv.exp(self._log_beta_iv(bits)))
        finally:
            mpmath.iv.prec = old

    def beta_rational(self) -> Optional[Fraction]:
        """beta as an exact rational when it is one."""
        kappa = self.dec.dominant_index
        sq = self.dec.blocks[kappa].mod_sq.as_rational()
        if sq is None:
            return None
        fr = Fraction(int(sq.numerator), int(sq.denominator))
        a, b = math.isqrt(fr.numerator), math.isqrt(fr.denominator)
        if a * a != fr.numerator or b * b != fr.denominator:
            return None
        beta = Fraction(a, b)
        if self.regime is Regime.CONTRACTING:
            beta = 1 / beta
        return beta

    def u_interval(self, t: Fraction, bits: int = 96) -> Iv:
        if self.regime is Regime.UNIT_MODULUS:
            return Iv.point(t, bits)
        old = mpmath.iv.prec
        mpmath.iv.prec = bits + 16
        try:
            tf = mpmath.iv.mpf(t.numerator) / t.denominator
            return Iv.from_ivmpf(mpmath.iv.log(tf) / self._log_beta_iv(bits))
        finally:
            mpmath.iv.prec = old

    def t_power_interval(self, e: FormalExponent, t: Fraction,
                         bits: int = 96) -> Iv:
        """t**value(e) as a certified interval (t >= 1 rational)."""
        if self.regime is Regime.UNIT_MODULUS or not any(e.nvec):
            return Iv.point(1)
        old = mpmath.iv.prec
        mpmath.iv.prec = bits + 16
        try:
            tf = mpmath.iv.mpf(t.numerator) / t.denominator
            ev = self.exponent_value(e, bits).to_ivmpf()
            return Iv.from_ivmpf(mpmath.iv.exp(ev * mpmath.iv.log(tf)))
        finally:
            mpmath.iv.prec = old

    # -- working fields ---------------------------------------------------------
    def with_zeta(self, N: int) -> ZetaField:
        """Working field containing moduli, phases and zeta_N."""
        hit = self._zeta_cache.get(N)
        if hit is not None:
            return hit
        ext = self.dec.extended()
        if N <= 2:
            W = ext.field

            def from_ext(e):
                return e
            zeta = W.from_rational(1 if N == 1 else -1)
        else:
            zext = adjoin_with_conj(ext.field, zeta_power(N, 1),
                                    lambda be: be.pow_int(N - 1))
            W = zext.field
            from_ext = zext.embed
            zeta = zext.beta

        def from_base(e, ext=ext, from_ext=from_ext):
            return from_ext(ext.embed_from_base(e))

        out = ZetaField(N=N, field=W, from_base=from_base, from_ext=from_ext,
                        zeta=zeta,
                        moduli=[from_ext(m) for m in ext.moduli],
                        phases=[from_ext(p) for p in ext.phases])
        self._zeta_cache[N] = out
        return out

    def phase_elements(self, phases: PhaseVec) -> tuple[ZetaField, list]:
        if phases.point is not None:
            zf = self.with_zeta(phases.point.N)
            return zf, [zf.zeta.pow_int(e) if e else zf.field.one()
                        for e in phases.point.exps]
        return phases.zf, phases.elems

    # -- evaluation ----------------------------------------------------------------
    def coords_exact_aligned(self, phases: PhaseVec, n: int):
        """Pre-P cone coordinates at the aligned parameter t = beta^n
        (t = n in the unit-modulus regime), exactly.

        Returns (zf, coords) with coords in the working field; coordinate
        (i,j) = rho_i^n * p_i * Q_{i,j}(n)."""
        zf, ph = self.phase_elements(phases)
        W = zf.field
        u = Fraction(n)
        out = []
        for (i, j), q in zip(self.pairs, self.Q):
            qv = zf.from_base(fp_eval_rational(q, self.field, u))
            if self.regime is Regime.UNIT_MODULUS:
                tpow = W.one()
            else:
                tpow = zf.moduli[i].pow_int(n)
            out.append(tpow * ph[i] * qv)
        return zf, out

    def map_to_problem_exact(self, zf: ZetaField, coords: list):
        out = []
        for row in self.P_full:
            acc = zf.field.zero()
            for entry, c in zip(row, coords):
                acc = acc + zf.from_base(entry) * c
            out.append(acc)
        return out

    def coords_boxes(self, phases_boxes: list[Box], t: Fraction,
                     bits: int = 96) -> list[Box]:
        """Certified interval pre-P coordinates at rational t >= t0."""
        u = self.u_interval(t, bits)
        out = []
        for (i, j), q in zip(self.pairs, self.Q):
            qv = fp_eval_box(q, u, bits)
            tp = Box(self.t_power_interval(self.block_exponent(i), t, bits),
                     IV_ZERO)
            out.append(tp * phases_boxes[i] * qv)
        return out

    def map_to_problem_boxes(self, coords: list[Box], bits: int = 96) -> list[Box]:
        out = []
        for row in self.P_full:
            acc = Box(IV_ZERO, IV_ZERO)
            for entry, c in zip(row, coords):
                acc = acc + entry.enclosure(bits) * c
            out.append(acc.shrink(2 * bits + 64))
        return out


def _dot(a, b, F: NumberField) -> FieldElement:
    acc = F.zero()
    for x, y in zip(a, b):
        acc = acc + x * y
    return acc


def q_polynomials(dec: JordanDecomposition, x_prime) -> list[list[FieldElement]]:
    """Block-row-indexed Q polynomials in u.

    Q_{i,j}(u) = sum_{c=0}^{d_i - j} C(u, c) / alpha_i^c * x'_{i, j+c}."""
    F = dec.field
    out = []
    offs = dec.block_offsets()
    for bi, block in enumerate(dec.blocks):
        alpha_inv = block.eig_fe.inverse()
        inv_pows = [F.one()]
        for _ in range(block.size):
            inv_pows.append(inv_pows[-1] * alpha_inv)
        for j in range(block.size):
            poly: list = []
            for c in range(block.size - j):
                coeff = x_prime[offs[bi] + j + c] * inv_pows[c]
                if coeff.is_zero():
                    continue
                binom = binom_poly(c)
                poly = fp_add(poly, fp_scale(
                    [F.from_rational(b) for b in binom], coeff))
            out.append(poly)
    return out


# --------------------------------------------------------------------------
# Rays
# --------------------------------------------------------------------------

@dataclass
class Ray:
    """Single-phase slice of the cone, truncated at t0_rat * beta^t0_shift
    (unit-modulus regime: t0_rat + t0_shift)."""
    cone: TrajectoryCone
    phases: PhaseVec
    t0_rat: Fraction = Fraction(1)
    t0_shift: int = 0

    def truncation_interval(self, bits: int = 96) -> Iv:
        if self.cone.regime is Regime.UNIT_MODULUS:
            return Iv.point(self.t0_rat + self.t0_shift, bits)
        base = Iv.point(self.t0_rat, bits)
        if self.t0_shift == 0:
            return base
        return base * self.cone.beta_interval(bits).pow_int(self.t0_shift)


def apply_J_to_ray(r: Ray) -> Ray:
    """J r(p, t0) = r(L p, beta t0) (t0 + 1 in the unit-modulus regime)."""
    cone = r.cone
    zf, ph = cone.phase_elements(r.phases)
    new_elems = [zf.phases[i] * ph[i] for i in range(cone.k)]
    new_phases = PhaseVec(zf=zf, elems=new_elems)
    if cone.regime is Regime.UNIT_MODULUS:
        return Ray(cone, new_phases, r.t0_rat + 1, r.t0_shift)
    return Ray(cone, new_phases, r.t0_rat, r.t0_shift + 1)


def j_shift_identity_holds(cone: TrajectoryCone) -> bool:
    """Coefficient-level identity behind the J-action on rays:
    alpha_i * Q_{i,j}(u+1) = alpha_i * Q_{i,j}(u) + Q_{i,j+1}(u),
    exactly in the decomposition field (Q_{i,d_i+1} = 0)."""
    F = cone.field
    offs = cone.dec.block_offsets()
    flat = 0
    for bi, block in enumerate(cone.dec.blocks):
        alpha = block.eig_fe
        for j in range(block.size):
            q = cone.Q[flat]
            q_next = cone.Q[flat + 1] if j + 1 < block.size else []
            lhs = fp_scale(fp_compose_shift(q, F), alpha)
            rhs = fp_add(fp_scale(q, alpha), q_next)
            if fp_trim(fp_add(lhs, [-c for c in rhs])):
                return False
            flat += 1
    return True


def ray_point_exact_aligned(r: Ray, n: int):
    """Pre-P ray coordinates at t = beta^n (unit: t = n), exact field
    elements; requires an aligned truncation (t0_rat == 1) and n at or
    beyond the truncation shift."""
    cone = r.cone
    if cone.regime is Regime.UNIT_MODULUS:
        if Fraction(n) < r.t0_rat + r.t0_shift:
            raise ValueError("parameter below the ray truncation")
        zf, coords = cone.coords_exact_aligned(r.phases, n)
        return zf, coords
    if r.t0_rat != 1:
        raise ValueError("exact evaluation needs an aligned truncation")
    if n < r.t0_shift:
        raise ValueError("parameter below the ray truncation")
    return cone.coords_exact_aligned(r.phases, n)


def ray_point_boxes(r: Ray, t: Fraction, bits: int = 96) -> list[Box]:
    """Pre-P ray coordinates at rational t >= truncation, as certified
    complex interval boxes."""
    tr = r.truncation_interval(bits)
    if Fraction(t) < tr.lo.as_fraction():
        if Fraction(t) < tr.hi.as_fraction():
            pass         # within truncation uncertainty: allow
        else:
            raise ValueError("t below the ray truncation")
    return cone_coords_boxes(r, Fraction(t), bits)


def cone_coords_boxes(r: Ray, t: Fraction, bits: int) -> list[Box]:
    return r.cone.coords_boxes(r.phases.boxes(bits), t, bits)


# --------------------------------------------------------------------------
# Orbit alignment
# --------------------------------------------------------------------------

def orbit_alignment(cone: TrajectoryCone, n: int):
    """(p_n, t_n) with p_n = (lambda_i^n)_i in T and t_n = beta^n
    (t_n = n in the unit-modulus regime)."""
    if n < 0:
        raise ValueError("alignment needs n >= 0")
    zf = cone.with_zeta(1)
    phases = PhaseVec(zf=zf, elems=[p.pow_int(n) for p in zf.phases])
    if cone.regime is Regime.UNIT_MODULUS:
        t_descr = (Fraction(n), 0)
    else:
        t_descr = (Fraction(1), n)
    return phases, t_descr


def aligned_orbit_coords(cone: TrajectoryCone, n: int) -> list:
    """Pre-P coordinates of the n-th orbit point: alpha_i^n * Q_{i,j}(n),
    exactly in the decomposition field (moduli and phases recombine)."""
    F = cone.field
    out = []
    for (i, j), q in zip(cone.pairs, cone.Q):
        alpha_n = cone.dec.blocks[i].eig_fe.pow_int(n)
        out.append(alpha_n * fp_eval_rational(q, F, Fraction(n)))
    return out


def orbit_alignment_check(cone: TrajectoryCone, n: int, target) -> bool:
    """P_full * (aligned coords at n) equals `target` (rational vector),
    entrywise exactly."""
    coords = aligned_orbit_coords(cone, n)
    F = cone.field
    for row, want in zip(cone.P_full, target):
        acc = F.zero()
        for entry, c in zip(row, coords):
            acc = acc + entry * c
        if acc != F.from_rational(want):
            return False
    return True


# --------------------------------------------------------------------------
# Realness
# --------------------------------------------------------------------------

@dataclass
class RealnessResult:
    verified: bool
    detail: str
    max_im_bound: Optional[Fraction] = None


def realness_certificate(cone: TrajectoryCone,
                         samples: int = 0, bits: int = 96) -> RealnessResult:
    """Certify that P * (ray coordinates) is real for every phase on the
    torus, by symbolic cancellation over conjugate eigenvalue classes.

    Blocks sharing an eigenvalue share a phase symbol (the relation lattice
    ties them); conjugate classes must carry coefficient polynomials that
    are exact conjugates.  When `samples` > 0, an interval corroboration
    on aligned phases at fractional t values is run as well."""
    dec = cone.dec
    F = cone.field
    # eigenvalue classes
    classes: list[dict] = []
    for bi, block in enumerate(dec.blocks):
        for cl in classes:
            if cl["eig"] == block.eig_fe:
                cl["blocks"].append(bi)
                break
        else:
            classes.append({"eig": block.eig_fe, "blocks": [bi]})

    def conj_class(cl):
        bar = cl["eig"].conj()
        for other in classes:
            if other["eig"] == bar:
                return other
        return None

    offs = dec.block_offsets()
    for m in range(cone.d_out):
        per_class = []
        for cl in classes:
            poly: list = []
            for bi in cl["blocks"]:
                for j in range(dec.blocks[bi].size):
                    flat = offs[bi] + j
                    contrib = fp_scale(cone.Q[flat], cone.P_full[m][flat])
                    poly = fp_add(poly, contrib)
            per_class.append(poly)
        for ci, cl in enumerate(classes):
            partner = conj_class(cl)
            if partner is None:
                return RealnessResult(False,
                                      "eigenvalue class without conjugate")
            pi = classes.index(partner)
            a = per_class[ci]
            b = per_class[pi]
            if ci == pi:
                if any(not (c.conj() == c) for c in a):
                    return _realness_numeric(cone, samples or 20, bits,
                                             "self-conjugate class has "
                                             "non-real coefficients")
            else:
                conj_a = [c.conj() for c in a]
                if fp_trim(fp_add(b, [-c for c in conj_a])) != []:
                    return _realness_numeric(cone, samples or 20, bits,
                                             "conjugate classes do not cancel")
    detail = "symbolic conjugate-pair cancellation verified"
    if samples:
        num = _realness_numeric(cone, samples, bits, "")
        return RealnessResult(True, detail, num.max_im_bound)
    return RealnessResult(True, detail)


def _realness_numeric(cone: TrajectoryCone, samples: int, bits: int,
                      reason: str) -> RealnessResult:
    """Interval bound on |Im| of problem-space coordinates over a sample
    grid of t values at orbit-aligned phases."""
    zf = cone.with_zeta(1)
    worst = Fraction(0)
    for s in range(samples):
        n_phase = s % 7
        phases = PhaseVec(zf=zf,
                          elems=[p.pow_int(n_phase) for p in zf.phases])
        t = Fraction(1) + Fraction(2 * s + 1, 2)
        coords = cone.coords_boxes(phases.boxes(bits), t, bits)
        out = cone.map_to_problem_boxes(coords, bits)
        for b in out:
            if not b.im.contains_zero():
                return RealnessResult(False,
                                      reason or "imaginary part excludes 0")
            worst = max(worst, abs(b.im.lo.as_fraction()),
                        abs(b.im.hi.as_fraction()))
    return RealnessResult(reason == "", reason or "interval corroboration",
                          worst)


# --------------------------------------------------------------------------
# Membership testing
# --------------------------------------------------------------------------

def cone_member_test(cone: TrajectoryCone, y, precision: int,
                     torus=None, hint=None, t_max: Fraction = Fraction(10 ** 6),
                     subdiv: int = 8):
    """Does some cone point lie within 2^-precision of y (problem space)?

    Returns "yes-certified", "no-certified" or "unknown".  `hint` may carry
    (phases: PhaseVec, n: int) for an aligned candidate or (phases, t) for
    a rational parameter; `torus` (a TorusGroup) enables the exhaustive
    no-certification sweep."""
    tol = Fraction(1, 2) ** precision
    y = [Fraction(int(c.numerator), int(c.denominator)) for c in
         (Fraction(v) if isinstance(v, int) else v for v in y)]
    if hint is not None:
        phases, par = hint
        if isinstance(par, int):
            zf, coords = cone.coords_exact_aligned(phases, par)
            out = cone.map_to_problem_exact(zf, coords)
            if all(v == zf.field.from_rational(w) for v, w in zip(out, y)):
                return "yes-certified"
            bits = precision + 16
            boxes = [v.enclosure(bits) for v in out]
        else:
            bits = precision + 16
            boxes = cone.map_to_problem_boxes(
                cone.coords_boxes(phases.boxes(bits), Fraction(par), bits),
                bits)
        if all(_box_within(b, w, tol) for b, w in zip(boxes, y)):
            return "yes-certified"
    if torus is None:
        return "unknown"
    # certified rejection: show every (phase box, t in [t0, t_max]) image
    # stays away from y, and beyond t_max some coordinate outgrows y
    from .signdec import compose_atom_boxes, eventual_sign, dominance_threshold
    dist_monomials = _distance_monomials(y, cone.d_out, tol)
    boxes_sets = _torus_phase_boxes(torus, cone, subdiv)
    for ph_boxes in boxes_sets:
        e = compose_atom_boxes(dist_monomials, cone, ph_boxes, precision + 16)
        s = eventual_sign(e)
        if s != 1:
            return "unknown"
        thr = dominance_threshold(e)
        if thr > t_max:
            t_max = thr
        if not _sweep_rejects(cone, ph_boxes, y, tol, cone.t0, thr,
                              precision + 16, subdiv):
            return "unknown"
    return "no-certified"


def _distance_monomials(y, d, tol):
    """Monomials of sum_m (x_m - y_m)^2 - (d+1) tol^2 (cleared to ints)."""
    monos = []
    den = 1
    for v in list(y) + [tol]:
        den = math.lcm(den, Fraction(v).denominator ** 2)
    for m in range(d):
        e2 = [0] * d
        e2[m] = 2
        monos.append((den, tuple(e2)))
        e1 = [0] * d
        e1[m] = 1
        monos.append((int(-2 * y[m] * den), tuple(e1)))
    const = sum(Fraction(v) ** 2 for v in y) - (d + 1) * tol ** 2
    monos.append((int(const * den), (0,) * d))
    return monos


def _torus_phase_boxes(torus, cone: TrajectoryCone, subdiv: int):
    """Cover of the torus by per-block phase boxes."""
    from .torus import TorusGroup
    assert isinstance(torus, TorusGroup)
    k = cone.k
    bits = 80
    if torus.kind == "finite":
        return [pt.coord_boxes(bits) for pt in torus.points]
    # dense: cover each free angle by `subdiv` arcs; torsion enumerated
    covers = []
    m = len(torus.torsion)
    torsion_ranges = [[Fraction(c, s) for c in range(s)]
                      for s in torus.torsion]
    arcs = [(Fraction(a, subdiv), Fraction(a + 1, subdiv))
            for a in range(subdiv)]
    import itertools
    for tors in itertools.product(*torsion_ranges) if torsion_ranges else [()]:
        for combo in itertools.product(arcs, repeat=torus.rank):
            ph_boxes = []
            for i in range(k):
                lo = sum(Fraction(torus.V[i][j]) * tors[j] for j in range(m))
                hi = lo
                for jj, (alo, ahi) in enumerate(combo):
                    c = torus.V[i][m + jj]
                    lo = lo + c * (alo if c >= 0 else ahi)
                    hi = hi + c * (ahi if c >= 0 else alo)
                ph_boxes.append(_unit_arc_box(lo, hi, bits))
            covers.append(ph_boxes)
    return covers


def _unit_arc_box(lo: Fraction, hi: Fraction, bits: int) -> Box:
    """Box around {e^(2 pi i s) : s in [lo, hi]} (fractions of a turn)."""
    old = mpmath.iv.prec
    mpmath.iv.prec = bits
    try:
        ang = mpmath.iv.pi * 2 * mpmath.iv.mpf([
            (Dyadic(0) + dyadic_bounds(lo, bits)[0]).to_mpf(),
            dyadic_bounds(hi, bits)[1].to_mpf()])
        return Box(Iv.from_ivmpf(mpmath.iv.cos(ang)),
                   Iv.from_ivmpf(mpmath.iv.sin(ang)))
    finally:
        mpmath.iv.prec = old


def _sweep_rejects(cone, ph_boxes, y, tol, t_lo: Fraction, t_hi: Fraction,
                   bits: int, depth: int) -> bool:
    """Certified: no parameter t in [t_lo, t_hi] maps the phase box within
    tol of y (recursive bisection on t)."""
    stack = [(Fraction(t_lo), Fraction(t_hi), 0)]
    while stack:
        a, b, d = stack.pop()
        mid = (a + b) / 2
        boxes = _range_image(cone, ph_boxes, a, b, bits)
        far = any(_box_beyond(bx, w, tol) for bx, w in zip(boxes, y))
        if far:
            continue
        if d >= depth + 12:
            return False
        stack.append((a, mid, d + 1))
        stack.append((mid, b, d + 1))
    return True


def _range_image(cone: TrajectoryCone, ph_boxes, a: Fraction, b: Fraction,
                 bits: int) -> list[Box]:
    """Image boxes over t in [a, b] (t-powers and u evaluated as ranges)."""
    u_lo = cone.u_interval(a, bits)
    u_hi = cone.u_interval(b, bits)
    u = u_lo.hull(u_hi)
    out = []
    for (i, j), q in zip(cone.pairs, cone.Q):
        qv = fp_eval_box(q, u, bits)
        tp_lo = cone.t_power_interval(cone.block_exponent(i), a, bits)
        tp_hi = cone.t_power_interval(cone.block_exponent(i), b, bits)
        tp = Box(tp_lo.hull(tp_hi), IV_ZERO)
        out.append(tp * ph_boxes[i] * qv)
    return cone.map_to_problem_boxes(out, bits)


def _box_within(b: Box, w: Fraction, tol: Fraction) -> bool:
    return b.im.contains_zero() and \
        abs(b.re.mid().as_fraction() - w) + b.re.width() <= tol


def _box_beyond(b: Box, w: Fraction, tol: Fraction) -> bool:
    lo = b.re.lo.as_fraction()
    hi = b.re.hi.as_fraction()
    return lo > w + tol or hi < w - tol
