"""Decision procedure for o-minimal invariant existence.

Given a rational linear loop (A, x) and a semi-algebraic halting set F,
decide whether an invariant containing x, closed under A and disjoint
from F exists.  Positive answers come with an explicit certificate: a
truncated trajectory cone plus the finite orbit prefix below the
truncation.  Negative answers carry a machine-checkable witness: an orbit
point inside F, or a torus phase whose ray eventually stays inside F
(no o-minimal set can avoid F while swallowing that ray).

Completeness: finite-torus instances always resolve.  Dense-torus
instances use a sound two-tier strategy (interval subdivision for YES,
root-of-unity ray search for NO) and may return Unknown; the verdict
reports that gap explicitly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .algebraic import AlgebraicNumber
from .cone import (PhaseVec, TrajectoryCone, aligned_orbit_coords,
                   orbit_alignment_check, realness_certificate)
from .dyadic import Box, Iv
from .signdec import (compose_atom, compose_atom_boxes, dominance_threshold,
                      eventual_sign, eventual_truth, assert_real_coefficients)
from .spectral import jordan_decompose, strip_nilpotent
from .torus import (PhaseSystem, RelationLattice, Completeness, TorusGroup,
                    relation_lattice_of_phases, roots_of_unity_points,
                    torus_group)

# --------------------------------------------------------------------------
# Semi-algebraic sets
# --------------------------------------------------------------------------

RELS = (">", ">=", "=", "!=", "<", "<=")


@dataclass
class SemiAlgebraicSet:
    """Boolean combination of integer-polynomial sign conditions on R^d.

    `tree` nodes: ("and"|"or", [children]) | ("not", child) |
    ("atom", monomials, rel) with monomials a tuple of (int coef, exps)."""
    d: int
    tree: tuple

    def normalized(self) -> tuple:
        """Equivalent formula with Not eliminated and atoms in {>, =}."""
        return _normalize(self.tree, False)

    def eval_rational(self, y) -> bool:
        return _eval_formula_rational(self.normalized(), y)


def _neg_monomials(monomials):
    return tuple((-c, e) for c, e in monomials)


def _normalize(node, negate: bool):
    kind = node[0]
    if kind == "not":
        return _normalize(node[1], not negate)
    if kind in ("and", "or"):
        newkind = kind if not negate else ("or" if kind == "and" else "and")
        return (newkind, [_normalize(ch, negate) for ch in node[1]])
    if kind == "atom":
        _, monomials, rel = node
        if negate:
            rel = {"<": ">=", ">": "<=", "=": "!=",
                   "!=": "=", "<=": ">", ">=": "<"}[rel]
        if rel == ">":
            return ("atom", monomials, ">")
        if rel == "<":
            return ("atom", _neg_monomials(monomials), ">")
        if rel == "=":
            return ("atom", monomials, "=")
        if rel == ">=":
            return ("or", [("atom", monomials, ">"),
                           ("atom", monomials, "=")])
        if rel == "<=":
            return ("or", [("atom", _neg_monomials(monomials), ">"),
                           ("atom", monomials, "=")])
        if rel == "!=":
            return ("or", [("atom", monomials, ">"),
                           ("atom", _neg_monomials(monomials), ">")])
    raise ValueError(f"bad formula node {node!r}")


def _eval_monomials_rational(monomials, y) -> Fraction:
    total = Fraction(0)
    for coef, exps in monomials:
        term = Fraction(coef)
        for v, e in zip(y, exps):
            if e:
                term *= Fraction(v) ** e
        total += term
    return total


def _eval_formula_rational(node, y) -> bool:
    kind = node[0]
    if kind == "and":
        return all(_eval_formula_rational(ch, y) for ch in node[1])
    if kind == "or":
        return any(_eval_formula_rational(ch, y) for ch in node[1])
    _, monomials, rel = node
    v = _eval_monomials_rational(monomials, y)
    return v > 0 if rel == ">" else v == 0


def _eval_monomials_box(monomials, boxes: list[Box]) -> Box:
    from .dyadic import IV_ZERO
    acc = Box(IV_ZERO, IV_ZERO)
    for coef, exps in monomials:
        term = Box.point(coef)
        for b, e in zip(boxes, exps):
            if e:
                term = term * b.pow_int(e)
        acc = acc + term
    return acc


def _eval_formula_box(node, boxes) -> Optional[bool]:
    """Certified three-valued evaluation on interval boxes."""
    kind = node[0]
    if kind == "and":
        out = True
        for ch in node[1]:
            v = _eval_formula_box(ch, boxes)
            if v is False:
                return False
            if v is None:
                out = None
        return out
    if kind == "or":
        out = False
        for ch in node[1]:
            v = _eval_formula_box(ch, boxes)
            if v is True:
                return True
            if v is None:
                out = None
        return out
    _, monomials, rel = node
    v = _eval_monomials_box(monomials, boxes).re
    s = v.sign()
    if rel == ">":
        if s == 1:
            return True
        if s is None:
            return None
        return False
    # rel == "=": intervals can refute equality, only degenerate zero proves it
    if s == 0:
        return True
    if s is None:
        return None
    return False


# --------------------------------------------------------------------------
# Problems, budgets, verdicts
# --------------------------------------------------------------------------

@dataclass
class Problem:
    A: list                      # d x d rational rows
    x: list                      # length-d rational vector
    F: SemiAlgebraicSet

    def __post_init__(self):
        d = len(self.A)
        if any(len(r) != d for r in self.A) or len(self.x) != d \
                or self.F.d != d:
            raise ValueError("inconsistent problem dimensions")


@dataclass
class Budget:
    max_prefix: int = 10000
    torus_order: int = 12
    subdiv_depth: int = 10
    precision: int = 128


@dataclass
class OrbitHitsF:
    n: int
    point: list


@dataclass
class RayPersistsInF:
    phase: dict                  # serialized torus point
    threshold: Fraction
    atom_trace: list


@dataclass
class UnknownReport:
    reason: str
    budget: Budget
    partial: dict


@dataclass
class Certificate:
    t0: Fraction
    prefix: list                             # rational orbit points not in F
    payload: dict                            # serializable full certificate
    cone: Optional[TrajectoryCone] = field(default=None, repr=False)
    torus: Optional[TorusGroup] = field(default=None, repr=False)


@dataclass
class Verdict:
    kind: str                    # "invariant" | "no_invariant" | "unknown"
    certificate: Optional[Certificate] = None
    reason: object = None

    def exit_code(self) -> int:
        return {"invariant": 0, "no_invariant": 1, "unknown": 2}[self.kind]


# --------------------------------------------------------------------------
# Per-ray analysis
# --------------------------------------------------------------------------

def _atom_nodes(node, acc):
    if node[0] in ("and", "or"):
        for ch in node[1]:
            _atom_nodes(ch, acc)
    else:
        acc.append(node)


def ray_persists_in_F(cone: TrajectoryCone, formula, point) -> Optional[dict]:
    """Evidence that the ray at a torus point eventually stays inside F."""
    p = PhaseVec(point=point)
    truth, thr = eventual_truth(formula, cone, p)
    if not truth:
        return None
    atoms: list = []
    _atom_nodes(formula, atoms)
    trace = []
    for _, monomials, rel in atoms:
        e = assert_real_coefficients(compose_atom(monomials, cone, p))
        s = eventual_sign(e)
        athr = max(Fraction(1), cone.t0) if e.is_empty() else \
            dominance_threshold(e)
        trace.append({"rel": rel, "eventual_sign": s,
                      "threshold": str(athr),
                      "exponent_order": [list(t.exponent.nvec)
                                         for t in e.terms]})
    return {"phase": {"N": point.N, "exps": list(point.exps)},
            "threshold": thr, "atom_trace": trace}


def _formula_eventually_false_boxes(cone, formula, ph_boxes,
                                    bits) -> Optional[Fraction]:
    """Certified threshold beyond which F is false on the whole phase box,
    or None if the interval analysis cannot decide."""
    kind = formula[0]
    if kind == "and":
        # false if some child is eventually false
        best = None
        for ch in formula[1]:
            thr = _formula_eventually_false_boxes(cone, ch, ph_boxes, bits)
            if thr is not None:
                return thr
        return None
    if kind == "or":
        # all children must be eventually false
        out = Fraction(1)
        for ch in formula[1]:
            thr = _formula_eventually_false_boxes(cone, ch, ph_boxes, bits)
            if thr is None:
                return None
            out = max(out, thr)
        return out
    _, monomials, rel = formula
    e = compose_atom_boxes(monomials, cone, ph_boxes, bits)
    if rel == "=":
        if e.is_empty():
            return None          # identically zero: eventually true, not false
        s = eventual_sign(e)
        if s is None:
            return None
        return dominance_threshold(e)
    # rel == ">": need eventual sign <= 0; empty sum is identically 0
    if e.is_empty():
        return Fraction(1)
    s = eventual_sign(e)
    if s is None or s == 1:
        return None
    return dominance_threshold(e)


def cone_avoids_from(cone: TrajectoryCone, T: TorusGroup, formula,
                     t0: Fraction, budget: Budget):
    """("avoids", t0') | ("meets", evidence) | ("unknown", info).

    Tier 1 (finite torus): exact per-ray dichotomy — complete.
    Tier 2 (dense torus): root-of-unity NO-search plus interval
    subdivision over the torus parametrization for a sound YES."""
    if T.kind == "finite":
        worst = t0
        for pt in T.points:
            evidence = ray_persists_in_F(cone, formula, pt)
            if evidence is not None:
                return ("meets", evidence)
            _, thr = eventual_truth(formula, cone, PhaseVec(point=pt))
            worst = max(worst, thr)
        return ("avoids", worst)
    # dense: NO-search on root-of-unity points of growing order
    seen = set()
    for N in range(1, budget.torus_order + 1):
        for pt in roots_of_unity_points(T, N):
            key = (pt.N, pt.exps)
            if key in seen:
                continue
            seen.add(key)
            evidence = ray_persists_in_F(cone, formula, pt)
            if evidence is not None:
                return ("meets", evidence)
    # sound YES: subdivision over the free angles
    from .cone import _torus_phase_boxes
    bits = budget.precision
    subdiv = 2
    while subdiv <= 2 ** budget.subdiv_depth:
        covers = _torus_phase_boxes(T, cone, subdiv)
        worst = t0
        ok = True
        for ph_boxes in covers:
            thr = _formula_eventually_false_boxes(cone, formula, ph_boxes,
                                                  bits)
            if thr is None:
                ok = False
                break
            worst = max(worst, thr)
        if ok:
            return ("avoids", worst)
        subdiv *= 2
    return ("unknown", {"reason": "dense torus: interval subdivision "
                                  "inconclusive and no root-of-unity ray "
                                  "persists up to the order bound",
                        "torus_order": budget.torus_order,
                        "subdiv_depth": budget.subdiv_depth})


# --------------------------------------------------------------------------
# The decision loop
# --------------------------------------------------------------------------

def _orbit_iter(A, x):
    cur = [Fraction(v) for v in x]
    Af = [[Fraction(c) for c in row] for row in A]
    while True:
        yield cur
        cur = [sum(Af[i][j] * cur[j] for j in range(len(cur)))
               for i in range(len(cur))]


def decide(prob: Problem, budget: Budget = None) -> Verdict:
    budget = budget or Budget()
    formula = prob.F.normalized()
    d = len(prob.A)

    A_red, x_red, strip_prefix, embedding = strip_nilpotent(prob.A, prob.x)
    r = len(x_red)

    # the stripped points are orbit points 0..len(prefix)-1
    for n, pt in enumerate(strip_prefix):
        if prob.F.eval_rational(pt):
            return Verdict("no_invariant", reason=OrbitHitsF(n, pt))

    if r == 0 or all(Fraction(v) == 0 for v in x_red):
        return _decide_finite_orbit(prob, strip_prefix, embedding, x_red)

    dec = jordan_decompose(A_red)
    cone = TrajectoryCone(dec, x_red, embedding)
    realness = realness_certificate(cone)
    lattice = relation_lattice_of_phases(
        PhaseSystem([b.eig_fe for b in dec.blocks]))
    T = torus_group(lattice)

    result = cone_avoids_from(cone, T, formula, Fraction(1), budget)
    offset = len(strip_prefix)
    orbit = _orbit_iter(prob.A, prob.x)

    if result[0] == "avoids":
        t0_star = result[1]
        prefix_pts = []
        for n, pt in enumerate(orbit):
            if n > budget.max_prefix:
                return Verdict("unknown", reason=UnknownReport(
                    "prefix budget exhausted before reaching the avoidance "
                    "threshold", budget, {"t0_star": str(t0_star)}))
            if prob.F.eval_rational(pt):
                return Verdict("no_invariant", reason=OrbitHitsF(n, pt))
            prefix_pts.append(pt)
            # loop until the aligned parameter passes t0_star
            if n >= offset and _aligned_at_least(cone, n - offset, t0_star):
                t0_prime = _rational_t0(cone, n - offset, t0_star)
                prefix = _prefix_for(cone, prefix_pts, offset, t0_prime)
                cert = emit_certificate(prob, cone, T, lattice, realness,
                                        t0_prime, prefix, strip_prefix)
                return Verdict("invariant", certificate=cert)
        raise RuntimeError("unreachable")

    # candidate NO or unknown: honor orbit-hit precedence first
    hit = None
    for n, pt in enumerate(orbit):
        if n > budget.max_prefix:
            break
        if prob.F.eval_rational(pt):
            hit = (n, pt)
            break
    if hit is not None:
        return Verdict("no_invariant", reason=OrbitHitsF(hit[0], hit[1]))
    if result[0] == "meets":
        ev = result[1]
        return Verdict("no_invariant", reason=RayPersistsInF(
            ev["phase"], ev["threshold"], ev["atom_trace"]))
    return Verdict("unknown", reason=UnknownReport(
        result[1]["reason"], budget,
        {k: v for k, v in result[1].items() if k != "reason"}))


def _decide_finite_orbit(prob, strip_prefix, embedding, x_red):
    """Wholly nilpotent (or zero start): the orbit is finite."""
    pts = list(strip_prefix)
    # the reduced state is a fixed point at the origin
    fixed = [Fraction(0)] * len(prob.x)
    if embedding and x_red:
        fixed = [sum(Fraction(embedding[i][j]) * Fraction(x_red[j])
                     for j in range(len(x_red))) for i in range(len(prob.x))]
    if prob.F.eval_rational(fixed):
        return Verdict("no_invariant",
                       reason=OrbitHitsF(len(pts), fixed))
    points = pts + [fixed]
    payload = {
        "kind": "finite_orbit",
        "points": [[str(c) for c in p] for p in points],
        "formula_text": "I = " + " ∪ ".join(
            "{(" + ", ".join(str(c) for c in p) + ")}" for p in points),
    }
    cert = Certificate(t0=Fraction(1), prefix=points, payload=payload)
    return Verdict("invariant", certificate=cert)


def _aligned_at_least(cone: TrajectoryCone, n: int, t0_star: Fraction) -> bool:
    """beta^n >= t0_star, exactly (t_n = n in the unit regime)."""
    from .spectral import Regime
    if cone.regime is Regime.UNIT_MODULUS:
        return Fraction(n) >= t0_star
    # compare (rho_kappa^2)^n against t0_star^2 in the field
    kappa = cone.dec.dominant_index
    sq = cone.dec.blocks[kappa].mod_sq
    if cone.regime is Regime.CONTRACTING:
        sq = sq.inverse()
    val = sq.pow_int(n) - cone.field.from_rational(t0_star * t0_star)
    return val.sign() >= 0


def _rational_t0(cone: TrajectoryCone, n: int, t0_star: Fraction) -> Fraction:
    """A rational t0' with t0_star <= t0' <= beta^n (= the aligned value)."""
    from .spectral import Regime
    if cone.regime is Regime.UNIT_MODULUS:
        return Fraction(n)
    beta_rat = cone.beta_rational()
    if beta_rat is not None:
        return beta_rat ** n
    # beta irrational: pick a rational in [t0_star, beta^n] via refinement
    bits = 64
    while True:
        b = cone.beta_interval(bits).pow_int(n)
        lo = b.lo.as_fraction()
        if lo >= t0_star:
            return lo
        bits *= 2
        if bits > 1 << 16:
            # t0_star equals beta^n exactly? fall back to the threshold
            return t0_star


def _prefix_for(cone: TrajectoryCone, orbit_pts: list, offset: int,
                t0_prime: Fraction) -> list:
    """Orbit points A^m x with aligned parameter strictly below t0'."""
    out = list(orbit_pts[:offset])
    for m in range(len(orbit_pts) - offset):
        if _aligned_at_least(cone, m, t0_prime):
            break
        out.append(orbit_pts[offset + m])
    return out


# --------------------------------------------------------------------------
# Certificates
# --------------------------------------------------------------------------

def emit_certificate(prob: Problem, cone: TrajectoryCone, T: TorusGroup,
                     lattice: RelationLattice, realness, t0_prime: Fraction,
                     prefix_pts: list, strip_prefix: list) -> Certificate:
    for pt in prefix_pts:
        if prob.F.eval_rational(pt):
            raise RuntimeError("internal error: prefix point lies in F")
    payload = {
        "kind": "cone",
        "t0": str(t0_prime),
        "prefix": [[str(c) for c in p] for p in prefix_pts],
        "regime": cone.regime.value,
        "dominant_index": cone.dec.dominant_index,
        "blocks": [{"eigenvalue": b.eig_fe.to_algebraic().serialize(),
                    "size": b.size} for b in cone.dec.blocks],
        "transform": [[e.to_algebraic().serialize() for e in row]
                      for row in cone.P_full],
        "q_polys": [[c.to_algebraic().serialize() for c in q]
                    for q in cone.Q],
        "exponents": [list(cone.block_exponent(i).nvec)
                      for (i, j) in cone.pairs],
        "lattice": {"k": lattice.k,
                    "basis": [list(r) for r in lattice.basis],
                    "completeness": lattice.completeness.label()},
        "realness": {"verified": realness.verified,
                     "detail": realness.detail,
                     "max_im": str(realness.max_im_bound)
                     if realness.max_im_bound is not None else None},
        "formula_text": _render_formula_text(cone, lattice, t0_prime,
                                             prefix_pts),
    }
    return Certificate(t0=t0_prime, prefix=prefix_pts, payload=payload,
                       cone=cone, torus=T)


def _render_formula_text(cone, lattice, t0_prime, prefix_pts) -> str:
    k = cone.k
    lines = []
    lines.append("I = P_full * C(t0) ∪ prefix, definable in the reals with "
                 "exponentiation:")
    lines.append(f"  t0 = {t0_prime}")
    if cone.regime.value == "unit_modulus":
        lines.append("  C(t0) = { (p_i * Q_ij(t))_(i,j) : p in T, t >= t0 }"
                     " (all eigenvalue moduli are 1; u = t)")
    else:
        lines.append("  C(t0) = { (t^e_i * p_i * Q_ij(u))_(i,j) : p in T, "
                     "t >= t0 },  u = log(t)/log(beta)")
        lines.append("  e_i = log(rho_i)/log(beta) with rho_i the i-th block"
                     " modulus and beta the dominant growth base")
    lines.append(f"  T = {{ p in C^{k} : |p_i| = 1, p^v = 1 for each lattice "
                 f"row v in {[list(r) for r in lattice.basis]} }}")
    lines.append("  Q_ij, P_full: exact algebraic data in the certificate "
                 "payload (minimal polynomial + isolating box records)")
    if prefix_pts:
        pts = "; ".join("(" + ", ".join(str(c) for c in p) + ")"
                        for p in prefix_pts)
        lines.append(f"  prefix = {pts}")
    else:
        lines.append("  prefix = (empty)")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# Certificate checking (independent of the synthesis path)
# --------------------------------------------------------------------------

class CheckedCone:
    """Cone evaluator rebuilt from a serialized certificate payload.

    Works purely with certified interval refinement of the stored algebraic
    records; it shares no state with the decomposition that produced the
    certificate."""

    def __init__(self, payload: dict):
        import mpmath
        self.mp = mpmath
        self.regime = payload["regime"]
        self.kappa = payload["dominant_index"]
        self.blocks = [(AlgebraicNumber.deserialize(b["eigenvalue"]),
                        b["size"]) for b in payload["blocks"]]
        self.P = [[AlgebraicNumber.deserialize(e) for e in row]
                  for row in payload["transform"]]
        self.Q = [[AlgebraicNumber.deserialize(c) for c in q]
                  for q in payload["q_polys"]]
        self.exponents = [tuple(v) for v in payload["exponents"]]
        self.pairs = []
        for i, (_, size) in enumerate(self.blocks):
            for j in range(size):
                self.pairs.append((i, j))
        self.k = len(self.blocks)
        self.lattice = RelationLattice(
            k=payload["lattice"]["k"],
            basis=[list(r) for r in payload["lattice"]["basis"]],
            completeness=Completeness(
                payload["lattice"]["completeness"] == "proven"))

    def _log_rho_iv(self, i: int, bits: int):
        iv = self.mp.iv
        sq = self.blocks[i][0].refine(bits).abs2()
        return iv.log(sq.to_ivmpf()) / 2

    def _log_beta_iv(self, bits: int):
        lb = self._log_rho_iv(self.kappa, bits)
        if self.regime == "contracting":
            lb = -lb
        return lb

    def u_iv(self, t: Iv, bits: int) -> Iv:
        iv = self.mp.iv
        old = iv.prec
        iv.prec = bits + 16
        try:
            if self.regime == "unit_modulus":
                return t
            return Iv.from_ivmpf(iv.log(t.to_ivmpf()) / self._log_beta_iv(bits))
        finally:
            iv.prec = old

    def tpow_iv(self, nvec, t: Iv, bits: int) -> Iv:
        iv = self.mp.iv
        old = iv.prec
        iv.prec = bits + 16
        try:
            if self.regime == "unit_modulus" or not any(nvec):
                return Iv.point(1)
            total = iv.mpf(0)
            for i, n in enumerate(nvec):
                if n:
                    total += n * self._log_rho_iv(i, bits)
            expo = total / self._log_beta_iv(bits)
            return Iv.from_ivmpf(iv.exp(expo * iv.log(t.to_ivmpf())))
        finally:
            iv.prec = old

    def lambda_boxes(self, bits: int) -> list[Box]:
        iv = self.mp.iv
        out = []
        old = iv.prec
        iv.prec = bits + 16
        try:
            for eig, _ in self.blocks:
                b = eig.refine(bits)
                inv_rho = Iv.from_ivmpf(1 / iv.sqrt(b.abs2().to_ivmpf()))
                out.append(b.scale(inv_rho))
        finally:
            iv.prec = old
        return out

    def beta_iv(self, bits: int) -> Iv:
        iv = self.mp.iv
        old = iv.prec
        iv.prec = bits + 16
        try:
            if self.regime == "unit_modulus":
                return Iv.point(1)
            return Iv.from_ivmpf(iv.exp(self._log_beta_iv(bits)))
        finally:
            iv.prec = old

    def coords_boxes(self, phase_boxes: list[Box], t: Iv,
                     bits: int) -> list[Box]:
        from .dyadic import IV_ZERO, horner_box
        u = self.u_iv(t, bits)
        out = []
        for (i, j), q, nvec in zip(self.pairs, self.Q, self.exponents):
            qb = horner_box([c.refine(bits) for c in q], Box(u, IV_ZERO),
                            prec=2 * bits + 64)
            tp = Box(self.tpow_iv(nvec, t, bits), IV_ZERO)
            out.append(tp * phase_boxes[i] * qb)
        return out

    def problem_boxes(self, coords: list[Box], bits: int) -> list[Box]:
        from .dyadic import IV_ZERO
        out = []
        for row in self.P:
            acc = Box(IV_ZERO, IV_ZERO)
            for entry, c in zip(row, coords):
                acc = acc + entry.refine(bits) * c
            out.append(acc.shrink(2 * bits + 64))
        return out


def check_certificate(payload: dict, prob: Problem, samples: int = 1000,
                      seed: int = 20240901) -> dict:
    """Verify the three invariant conditions on a serialized certificate.

    (1) the initial vector is covered (prefix or cone alignment);
    (2) A-stability on sampled cone points via the ray-shift closure, and
        the step off the last prefix point lands in the cone;
    (3) disjointness from F: exact on prefix points, certified intervals
        on sampled cone points."""
    rng = random.Random(seed)
    report = {"passed": True, "checks": [], "samples": samples}

    def fail(name, detail):
        report["passed"] = False
        report["checks"].append({"check": name, "ok": False,
                                 "detail": detail})

    def ok(name, detail=""):
        report["checks"].append({"check": name, "ok": True, "detail": detail})

    if payload.get("kind") == "finite_orbit":
        pts = [[Fraction(c) for c in p] for p in payload["points"]]
        if pts[0] != [Fraction(v) for v in prob.x]:
            fail("initial_in_I", "x is not the first stored point")
        else:
            ok("initial_in_I")
        pset = {tuple(p) for p in pts}
        stable = all(tuple(_mat_vec_rat(prob.A, p)) in pset for p in pts)
        (ok if stable else fail)("A_stability",
                                 "" if stable else "a step leaves the set")
        bad = [p for p in pts if prob.F.eval_rational(p)]
        (ok if not bad else fail)("disjoint_from_F",
                                  "" if not bad else f"point in F: {bad[0]}")
        return report

    cone = CheckedCone(payload)
    t0 = Fraction(payload["t0"])
    prefix = [[Fraction(c) for c in p] for p in payload["prefix"]]
    formula = prob.F.normalized()
    bits = 128

    # (1) initial vector
    if prefix:
        if prefix[0] == [Fraction(v) for v in prob.x]:
            ok("initial_in_I", "x is the first prefix point")
        else:
            fail("initial_in_I", "prefix does not start at x")
    else:
        ones = [Box.point(1)] * cone.k
        boxes = cone.problem_boxes(cone.coords_boxes(ones, Iv.point(1), bits),
                                   bits)
        if all(b.im.contains_zero() and b.re.contains_value(Fraction(v))
               for b, v in zip(boxes, prob.x)):
            ok("initial_in_I", "x consistent with the t=1 aligned cone point")
        else:
            fail("initial_in_I", "x is not in the cone at t=1")

    # exact orbit prefix checks + the step off the last prefix point
    cur = [Fraction(v) for v in prob.x]
    prefix_ok = True
    for i, p in enumerate(prefix):
        if p != cur:
            prefix_ok = False
            fail("prefix_is_orbit", f"stored point {i} is not A^{i} x")
            break
        cur = _mat_vec_rat(prob.A, cur)
    if prefix_ok:
        ok("prefix_is_orbit")
        # `cur` is now the first orbit point claimed to lie in the cone
        hit = _point_in_cone_box(cone, t0, cur, bits)
        (ok if hit else fail)("prefix_step_into_cone",
                              "" if hit else "A*(last prefix) missed the cone")

    # sampled phases: root-of-unity points of the stored lattice
    T = torus_group(cone.lattice)
    pool = []
    order = 1
    while len(pool) < 24 and order <= 48:
        for pt in roots_of_unity_points(T, order):
            key = (pt.N, pt.exps)
            if key not in {(q.N, q.exps) for q in pool}:
                pool.append(pt)
        order += 1
    lam = cone.lambda_boxes(bits)
    beta = cone.beta_iv(bits)

    stab_bad = disj_bad = 0
    for s in range(samples):
        pt = pool[rng.randrange(len(pool))]
        t = t0 * (1 + Fraction(rng.randrange(0, 2 ** 20), 2 ** 18))
        ph = pt.coord_boxes(bits)
        coords = cone.coords_boxes(ph, Iv.point(t, bits), bits)
        y = cone.problem_boxes(coords, bits)
        # (3) disjointness, certified
        v = _eval_formula_box(formula, y)
        if v is None:
            y2 = cone.problem_boxes(
                cone.coords_boxes(pt.coord_boxes(2 * bits),
                                  Iv.point(t, 2 * bits), 2 * bits), 2 * bits)
            v = _eval_formula_box(formula, y2)
        if v is not False:
            disj_bad += 1
            if disj_bad == 1:
                fail("disjoint_from_F",
                     f"sample (order-{pt.N} phase, t={t}) not certified "
                     f"outside F (result {v})")
        # (2) stability: A*y must match the shifted parameters (L p, beta t)
        Ay = [_box_dot_rat(row, y) for row in prob.A]
        ph2 = [lb * pb for lb, pb in zip(lam, ph)]
        t2 = Iv.point(t, bits) * beta
        coords2 = cone.coords_boxes(ph2, t2, bits)
        y2 = cone.problem_boxes(coords2, bits)
        if any(a.disjoint(b) for a, b in zip(Ay, y2)):
            stab_bad += 1
            if stab_bad == 1:
                fail("A_stability",
                     f"A*sample and the shifted ray point are certified "
                     f"distinct at t={t}")
    if stab_bad == 0:
        ok("A_stability", f"{samples} samples, no certified rejection")
    if disj_bad == 0:
        ok("disjoint_from_F", f"{samples} samples certified outside F")

    bad_prefix = [p for p in prefix if prob.F.eval_rational(p)]
    (ok if not bad_prefix else fail)(
        "prefix_disjoint_from_F",
        "" if not bad_prefix else f"prefix point in F: {bad_prefix[0]}")
    return report


def _point_in_cone_box(cone: CheckedCone, t0: Fraction, y, bits: int) -> bool:
    """Consistency: y (rational) is compatible with some aligned cone point.

    y = A^M x is claimed to equal the cone point at phase lambda^m and
    aligned t; the checker scans small alignments for a containing box."""
    lam = cone.lambda_boxes(bits)
    beta = cone.beta_iv(bits)
    t_iv = Iv.point(1)
    ph = [Box.point(1)] * cone.k
    for m in range(0, 64):
        if cone.regime == "unit_modulus":
            t_iv = Iv.point(m, bits)
        tr = t_iv
        if not (tr.hi.as_fraction() < t0):
            coords = cone.coords_boxes(ph, tr, bits)
            boxes = cone.problem_boxes(coords, bits)
            if all(b.im.contains_zero() and b.re.contains_value(Fraction(v))
                   for b, v in zip(boxes, y)):
                return True
        ph = [lb * pb for lb, pb in zip(lam, ph)]
        if cone.regime != "unit_modulus":
            t_iv = t_iv * beta
    return False


def _mat_vec_rat(A, v):
    return [sum(Fraction(A[i][j]) * Fraction(v[j]) for j in range(len(v)))
            for i in range(len(A))]


def _box_dot_rat(row, boxes):
    from .dyadic import IV_ZERO
    acc = Box(IV_ZERO, IV_ZERO)
    for c, b in zip(row, boxes):
        fr = Fraction(c)
        acc = acc + b.scale(Iv.point(fr, 96))
    return acc
