"""Multiplicative relations of the normalized eigenvalues.

The relation lattice G = {v : lambda_1^v1 ... lambda_k^vk = 1} is computed
with exact tests in the eigenvalue field: lambda^v = 1 iff the power
product of the (un-normalized) eigenvalues alpha_i = rho_i lambda_i is real
and positive.  Root-of-unity orders and a bounded exhaustive search provide
generators; the completeness flag records whether the construction is
provably complete or search-bounded.

The subtorus T cut out by G is materialized through a Smith-normal-form
parametrization: torsion coordinates enumerate finite points, free
coordinates are angle parameters of a dense subtorus.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from .algebraic import AlgebraicNumber, _designate, rootset
from .dyadic import Box, Iv
from .numfield import FieldElement, SplittingField
from .zpoly import cyclotomic

SEARCH_CAP = 12          # default cap for the exhaustive-search radius
ORDER_SCAN_LIMIT = 520   # phi(n) <= 128 implies n <= 510


# --------------------------------------------------------------------------
# Integer lattice utilities
# --------------------------------------------------------------------------

def hnf(rows: list[list[int]], k: int) -> list[list[int]]:
    """Row-style Hermite normal form: echelon, positive pivots, entries
    above each pivot reduced; canonical for a given lattice."""
    M = [list(r) for r in rows if any(r)]
    r = 0
    for c in range(k):
        while True:
            nz = [i for i in range(r, len(M)) if M[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(M[i][c]))
            M[r], M[i0] = M[i0], M[r]
            done = True
            for i in range(r + 1, len(M)):
                if M[i][c] != 0:
                    q = M[i][c] // M[r][c]
                    M[i] = [a - q * b for a, b in zip(M[i], M[r])]
                    if M[i][c] != 0:
                        done = False
            if done:
                break
        if r < len(M) and M[r][c] != 0:
            if M[r][c] < 0:
                M[r] = [-x for x in M[r]]
            for i in range(r):
                q = M[i][c] // M[r][c]
                if q:
                    M[i] = [a - q * b for a, b in zip(M[i], M[r])]
            r += 1
    return [row for row in M[:r] if any(row)]


def snf_with_transforms(B: list[list[int]]):
    """Smith normal form D = U B V with unimodular U, V.

    Returns (U, D, V) for an m x k integer matrix B."""
    m = len(B)
    k = len(B[0]) if m else 0
    D = [row[:] for row in B]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    V = [[1 if i == j else 0 for j in range(k)] for i in range(k)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):      # row_dst -= q * row_src
        D[dst] = [a - q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, q):      # col_dst -= q * col_src
        for row in D:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    t = 0
    while t < min(m, k):
        # find a nonzero pivot in the submatrix
        piv = None
        for i in range(t, m):
            for j in range(t, k):
                if D[i][j] != 0:
                    if piv is None or abs(D[i][j]) < abs(D[piv[0]][piv[1]]):
                        piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        again = True
        while again:
            again = False
            for i in range(t + 1, m):
                if D[i][t] != 0:
                    q = D[i][t] // D[t][t]
                    add_row(t, i, q)
                    if D[i][t] != 0:
                        swap_rows(t, i)
                        again = True
            for j in range(t + 1, k):
                if D[t][j] != 0:
                    q = D[t][j] // D[t][t]
                    add_col(t, j, q)
                    if D[t][j] != 0:
                        swap_cols(t, j)
                        again = True
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V


def row_kernel(w: list[int]) -> list[list[int]]:
    """Basis of {v : w . v = 0} over Z, via unimodular column reduction."""
    K = len(w)
    V = [[1 if i == j else 0 for j in range(K)] for i in range(K)]
    w = list(w)
    # reduce w to (g, 0, ..., 0)
    while True:
        nz = [j for j in range(K) if w[j] != 0]
        if len(nz) <= 1:
            break
        j0 = min(nz, key=lambda j: abs(w[j]))
        for j in nz:
            if j != j0:
                q = w[j] // w[j0]
                w[j] -= q * w[j0]
                for row in V:
                    row[j] -= q * row[j0]
        nz2 = [j for j in range(K) if w[j] != 0]
        if nz2 == [j0] or len(nz2) <= 1:
            break
    nz = [j for j in range(K) if w[j] != 0]
    if not nz:
        return [[V[i][j] for i in range(K)] for j in range(K)]
    pivot = nz[0]
    return [[V[i][j] for i in range(K)] for j in range(K) if j != pivot]


# --------------------------------------------------------------------------
# Relation lattice
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Completeness:
    proven: bool
    search_bound: Optional[int] = None

    def label(self) -> str:
        return "proven" if self.proven else f"search_bounded({self.search_bound})"


@dataclass
class RelationLattice:
    k: int
    basis: list[list[int]]           # HNF rows
    completeness: Completeness

    @property
    def rank(self) -> int:
        return len(self.basis)

    def full_rank(self) -> bool:
        return self.rank == self.k

    def index(self) -> Optional[int]:
        """Lattice index [Z^k : G] = product of HNF pivots (full rank only)."""
        if not self.full_rank():
            return None
        out = 1
        piv = 0
        for row in self.basis:
            out *= row[piv]
            piv += 1
        return out


class PhaseSystem:
    """Exact relation tests for the phases of a list of field elements.

    alpha_i are the (nonzero) eigenvalues in one number field with
    conjugation; the phase lambda_i = alpha_i/|alpha_i| satisfies
    lambda^v = 1 iff prod alpha_i^v_i is real and positive."""

    def __init__(self, alphas: list[FieldElement]):
        self.alphas = alphas
        self.k = len(alphas)
        self._pow: list[dict[int, FieldElement]] = [dict() for _ in alphas]
        self._args: Optional[list[mpmath.mpf]] = None
        self._rel_cache: dict[tuple, bool] = {}

    def _power(self, i: int, n: int) -> FieldElement:
        cache = self._pow[i]
        if n in cache:
            return cache[n]
        if n == 0:
            v = self.alphas[i].field.one()
        elif n < 0:
            v = self._power(i, -n).inverse()
        elif n == 1:
            v = self.alphas[i]
        else:
            v = self._power(i, n // 2)
            v = v * v
            if n % 2:
                v = v * self.alphas[i]
        cache[n] = v
        return v

    def args(self) -> list[mpmath.mpf]:
        """Float phase angles (prefilter only; never decides anything)."""
        if self._args is None:
            out = []
            with mpmath.workprec(160):
                for a in self.alphas:
                    b = a.enclosure(140)
                    re = b.re.mid().to_mpf()
                    im = b.im.mid().to_mpf()
                    out.append(mpmath.atan2(im, re))
            self._args = out
        return self._args

    def _passes_prefilter(self, v) -> bool:
        with mpmath.workprec(160):
            s = mpmath.fsum(n * a for n, a in zip(v, self.args()) if n)
            r = s / (2 * mpmath.pi)
            return abs(r - mpmath.nint(r)) < mpmath.mpf(2) ** -40

    def is_relation(self, v) -> bool:
        """Exact: lambda^v = 1."""
        key = tuple(v)
        hit = self._rel_cache.get(key)
        if hit is not None:
            return hit
        if not self._passes_prefilter(v):
            self._rel_cache[key] = False
            return False
        e = None
        for i, n in enumerate(v):
            if n:
                p = self._power(i, n)
                e = p if e is None else e * p
        out = e is None or (e.conj() == e and e.sign() > 0)
        self._rel_cache[key] = out
        return out

    def phase_order(self, i: int) -> Optional[int]:
        """Smallest n >= 1 with lambda_i^n = 1, scanning with a float
        prefilter; None when no order below the scan limit exists (for a
        phase of bounded degree that means: not a root of unity)."""
        v = [0] * self.k
        for n in range(1, ORDER_SCAN_LIMIT):
            v[i] = n
            if self._passes_prefilter(v) and self.is_relation(v):
                return n
        return None

    def conj_partner(self, i: int) -> Optional[int]:
        bar = self.alphas[i].conj()
        for j, a in enumerate(self.alphas):
            if a == bar:
                return j
        return None


def _ru_kernel_basis(orders: dict[int, int], phases: PhaseSystem, k: int):
    """Complete relation lattice of the root-of-unity coordinates.

    Each RU phase is pinned down as an exact power of a primitive N-th root
    of unity; the lattice is the kernel of v -> sum v_i t_i mod N."""
    idxs = sorted(orders)
    if not idxs:
        return []
    N = math.lcm(*[orders[i] for i in idxs])
    ts = {}
    for i in idxs:
        ts[i] = _ru_exponent(phases, i, orders[i], N)
    w = [ts[i] for i in idxs] + [N]
    kern = row_kernel(w)
    rows = []
    for vec in kern:
        full = [0] * k
        for pos, i in enumerate(idxs):
            full[i] = vec[pos]
        rows.append(full)
    return rows


def _phase_box(alpha: FieldElement, bits: int) -> Box:
    """Certified box for alpha/|alpha|."""
    ab = alpha.enclosure(bits)
    sq = ab.abs2()
    old = mpmath.iv.prec
    mpmath.iv.prec = bits + 16
    try:
        inv_mod = Iv.from_ivmpf(1 / mpmath.iv.sqrt(sq.to_ivmpf()))
    finally:
        mpmath.iv.prec = old
    return ab.scale(inv_mod)


def _ru_exponent(phases: PhaseSystem, i: int, order: int, N: int) -> int:
    """t with lambda_i = zeta_N^t, by certified box separation.

    lambda_i has exact order `order`, so it is one of the phi(order)
    primitive order-th roots of unity; disjoint certified boxes identify
    which."""
    cands = [s for s in range(order) if math.gcd(s, order) == 1] or [0]
    bits = 64
    while True:
        lam_box = _phase_box(phases.alphas[i], bits)
        hits = [s for s in cands
                if not lam_box.disjoint(zeta_power(order, s).refine(bits))]
        if len(hits) == 1:
            return (hits[0] * (N // order)) % N
        bits *= 2
        if bits > 1 << 16:
            raise RuntimeError("could not separate root-of-unity candidates")


def relation_lattice_of_phases(phases: PhaseSystem,
                               search_bound: Optional[int] = None) -> RelationLattice:
    k = phases.k
    orders = {}
    for i in range(k):
        n = phases.phase_order(i)
        if n is not None:
            orders[i] = n
    gens = _ru_kernel_basis(orders, phases, k)
    nru = [i for i in range(k) if i not in orders]

    # group non-root-of-unity coordinates into equal-or-conjugate classes
    classes: list[dict] = []
    for i in nru:
        placed = False
        for cl in classes:
            rep = cl["rep"]
            if phases.is_relation(_unit_diff(k, i, rep)):
                cl["members"].append((i, +1))
                placed = True
                break
            if phases.is_relation(_unit_sum(k, i, rep)):
                cl["members"].append((i, -1))
                placed = True
                break
        if not placed:
            classes.append({"rep": i, "members": [(i, +1)]})

    for cl in classes:
        rep = cl["rep"]
        for (i, sgn) in cl["members"]:
            if i == rep:
                continue
            v = _unit_diff(k, i, rep) if sgn > 0 else _unit_sum(k, i, rep)
            gens.append(v)

    if len(classes) <= 1:
        comp = Completeness(proven=True)
    else:
        B = search_bound if search_bound is not None else \
            min(SEARCH_CAP, max(4, 2 * k))
        gens.extend(_bounded_search(phases, B, gens))
        comp = Completeness(proven=False, search_bound=B)

    basis = hnf(gens, k)
    for row in basis:
        assert phases.is_relation(row), "basis row failed exact verification"
    return RelationLattice(k=k, basis=basis, completeness=comp)


def _unit_diff(k, i, j):
    v = [0] * k
    v[i] += 1
    v[j] -= 1
    return v


def _unit_sum(k, i, j):
    v = [0] * k
    v[i] += 1
    v[j] += 1
    return v


def _bounded_search(phases: PhaseSystem, B: int, known: list[list[int]]):
    """Exhaustive relation search |v_i| <= B (prefiltered, then exact)."""
    import itertools
    k = phases.k
    found = []
    for v in itertools.product(range(-B, B + 1), repeat=k):
        if not any(v) or v[next(i for i in range(k) if v[i])] < 0:
            continue     # skip zero and mirror duplicates
        if not phases._passes_prefilter(v):
            continue
        if phases.is_relation(v):
            found.append(list(v))
    return found


# --------------------------------------------------------------------------
# Torus group
# --------------------------------------------------------------------------

@functools.lru_cache(maxsize=4096)
def zeta_power(N: int, j: int) -> AlgebraicNumber:
    """zeta_N^j as an exact algebraic number."""
    j %= N
    if j == 0:
        return AlgebraicNumber.from_rational(1)
    m = N // math.gcd(N, j)
    if m == 1:
        return AlgebraicNumber.from_rational(1)
    if m == 2:
        return AlgebraicNumber.from_rational(-1)
    poly = cyclotomic(m)

    def enclosure(bits):
        old = mpmath.iv.prec
        mpmath.iv.prec = bits + 16
        try:
            ang = mpmath.iv.pi * 2 * j / N
            re = Iv.from_ivmpf(mpmath.iv.cos(ang))
            im = Iv.from_ivmpf(mpmath.iv.sin(ang))
        finally:
            mpmath.iv.prec = old
        return Box(re, im)

    idx = _designate(rootset(poly), enclosure)
    return AlgebraicNumber.from_designated_root(poly, idx)


@dataclass
class TorusPoint:
    """A root-of-unity point of T: coordinate i is zeta_N ** exps[i]."""
    N: int
    exps: tuple[int, ...]

    def coords(self) -> tuple[AlgebraicNumber, ...]:
        return tuple(zeta_power(self.N, e) for e in self.exps)

    def coord_boxes(self, bits: int) -> list[Box]:
        return [zeta_power(self.N, e).refine(bits) for e in self.exps]

    def satisfies(self, lat: RelationLattice) -> bool:
        return all(sum(v * e for v, e in zip(row, self.exps)) % self.N == 0
                   for row in lat.basis)


class TorusGroup:
    """The subtorus T cut out by a relation lattice.

    kind "finite": T enumerated as TorusPoints.  kind "dense": T has
    free angle parameters; `angle_basis` columns give the integer exponent
    pattern of each coordinate in the free angles and the torsion part."""

    def __init__(self, lattice: RelationLattice):
        self.lattice = lattice
        k = lattice.k
        m = lattice.rank
        if m == 0:
            U, D, V = None, [], [[1 if i == j else 0 for j in range(k)]
                                 for i in range(k)]
            self.torsion: list[int] = []
        else:
            U, D, V = snf_with_transforms(lattice.basis)
            self.torsion = [D[i][i] for i in range(m)]
        self.V = V
        self.rank = k - m
        self.kind = "finite" if self.rank == 0 else "dense"
        self.points: Optional[list[TorusPoint]] = None
        if self.kind == "finite":
            self.points = self._enumerate_all()

    def _enumerate_all(self) -> list[TorusPoint]:
        N = math.lcm(*self.torsion) if self.torsion else 1
        pts = self.points_of_order_dividing(N)
        want = self.lattice.index()
        assert want is not None and len(pts) == want, \
            "finite torus enumeration does not match the lattice index"
        return pts

    def points_of_order_dividing(self, N: int) -> list[TorusPoint]:
        """All points of T whose coordinates are N-th roots of unity."""
        k = self.lattice.k
        m = len(self.torsion)
        ranges = []
        for j in range(m):
            s = self.torsion[j]
            step = s // math.gcd(N, s)
            ranges.append([Fraction(c, s) for c in range(0, s, step)])
        for _ in range(self.rank):
            ranges.append([Fraction(c, N) for c in range(N)])
        out = []
        import itertools
        for combo in itertools.product(*ranges):
            exps = []
            ok = True
            for i in range(k):
                val = sum(Fraction(self.V[i][j]) * combo[j] for j in range(k))
                e = (val * N)
                if e.denominator != 1:
                    ok = False
                    break
                exps.append(int(e) % N)
            if not ok:
                continue
            pt = TorusPoint(N, tuple(exps))
            if pt.satisfies(self.lattice):
                out.append(pt)
        # dedupe (torsion/free overlap can repeat points)
        seen = {}
        for p in out:
            seen[p.exps] = p
        return list(seen.values())


def relation_lattice(lams: list[AlgebraicNumber],
                     search_bound: Optional[int] = None) -> RelationLattice:
    """Public entry: relation lattice of explicit unit-modulus numbers."""
    one = AlgebraicNumber.from_rational(1)
    polys = []
    for lam in lams:
        if not (lam * lam.conj() == one):
            raise ValueError("phases must have modulus exactly 1")
        if not lam.is_rational():
            lam._materialize()
            polys.append(lam._poly)
    sf = SplittingField(polys) if polys else SplittingField([])
    elems = []
    for lam in lams:
        r = lam.as_rational()
        if r is not None:
            elems.append(sf.field.from_rational(r))
        else:
            elems.append(sf.root(lam._poly, lam._idx))
    return relation_lattice_of_phases(PhaseSystem(elems), search_bound)


def torus_group(lat: RelationLattice) -> TorusGroup:
    return TorusGroup(lat)


def roots_of_unity_points(T: TorusGroup, order_bound: int) -> list[TorusPoint]:
    return T.points_of_order_dividing(order_bound)


# --------------------------------------------------------------------------
# Exact sign of integer combinations of log-moduli
# --------------------------------------------------------------------------

class ModuliSignOracle:
    """sign(sum n_i log rho_i) for positive real rho_i given as squared
    values in a number field.  Zero is decided exactly by the power-product
    test; nonzero signs terminate by refinement."""

    def __init__(self, mod_sqs: list[FieldElement]):
        self.mod_sqs = mod_sqs
        self._pow: list[dict[int, FieldElement]] = [dict() for _ in mod_sqs]
        self._cache: dict[tuple, int] = {}

    def _power(self, i, n):
        cache = self._pow[i]
        if n not in cache:
            if n == 0:
                cache[n] = self.mod_sqs[i].field.one()
            elif n < 0:
                cache[n] = self._power(i, -n).inverse()
            elif n == 1:
                cache[n] = self.mod_sqs[i]
            else:
                h = self._power(i, n // 2)
                v = h * h
                if n % 2:
                    v = v * self.mod_sqs[i]
                cache[n] = v
        return cache[n]

    def sign(self, nvec) -> int:
        key = tuple(nvec)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        e = None
        for i, n in enumerate(nvec):
            if n:
                p = self._power(i, n)
                e = p if e is None else e * p
        if e is None or e.is_one():
            out = 0
        else:
            out = (e - e.field.one()).sign()
        self._cache[key] = out
        return out


def moduli_combination_sign(nvec: list[int],
                            rhos: list[AlgebraicNumber]) -> int:
    """sign(sum n_i log rho_i), exact (public AlgebraicNumber entry)."""
    prod_rat = Fraction(1)
    alg = None
    for n, rho in zip(nvec, rhos):
        if n == 0:
            continue
        if not rho.is_real() or rho.sign() <= 0:
            raise ValueError("moduli must be positive reals")
        r = rho.as_rational()
        if r is not None:
            prod_rat *= Fraction(int(r.numerator), int(r.denominator)) ** n
        else:
            p = rho.pow_int(n)
            alg = p if alg is None else alg * p
    if alg is None:
        return (prod_rat > 1) - (prod_rat < 1)
    total = alg * AlgebraicNumber.from_rational(prod_rat)
    one = AlgebraicNumber.from_rational(1)
    if total == one:
        return 0
    bits = 64
    while True:
        iv = total.refine(bits).re
        if iv.lo.as_fraction() > 1:
            return 1
        if iv.hi.as_fraction() < 1:
            return -1
        bits *= 2
