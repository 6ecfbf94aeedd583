"""Exact Jordan decomposition of rational matrices.

All spectral data lives in one compositum number field per matrix (the
splitting field of the characteristic polynomial), so P, J, P_inv and the
reconstruction identity P*J*P_inv = A are exact coefficient arithmetic.
Conjugate eigenvalues get conjugated Jordan chains, which downstream makes
the image of the trajectory cone provably real.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .algebraic import AlgebraicNumber
from .numfield import (FieldElement, NumberField, SplittingField,
                       adjoin_with_conj, _fraction)
from .zpoly import ZP, factor_z, qp_clear_denominators, zp, zp_degree


class Regime(enum.Enum):
    EXPANDING = "expanding"        # some modulus > 1; dominant = max
    CONTRACTING = "contracting"    # all <= 1, some < 1; dominant = min
    UNIT_MODULUS = "unit_modulus"  # all moduli exactly 1


# --------------------------------------------------------------------------
# Exact linear algebra over a number field
# --------------------------------------------------------------------------

def mat_constant(F: NumberField, rows) -> list[list[FieldElement]]:
    return [[F.from_rational(c) for c in row] for row in rows]


def mat_identity(F: NumberField, d: int) -> list[list[FieldElement]]:
    return [[F.one() if i == j else F.zero() for j in range(d)]
            for i in range(d)]


def mat_mul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    return [[functools.reduce(lambda s, k: s + A[i][k] * B[k][j],
                              range(m), A[i][0].field.zero())
             for j in range(p)] for i in range(n)]


def mat_vec(A, v):
    return [functools.reduce(lambda s, k: s + A[i][k] * v[k],
                             range(len(v)), A[i][0].field.zero())
            for i in range(len(A))]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_inverse(A):
    """Gauss-Jordan over the field; raises ZeroDivisionError if singular."""
    d = len(A)
    F = A[0][0].field
    M = [row[:] + [F.one() if i == j else F.zero() for j in range(d)]
         for i, row in enumerate(A)]
    for col in range(d):
        piv = next((r for r in range(col, d) if not M[r][col].is_zero()), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col].inverse()
        M[col] = [e * inv for e in M[col]]
        for r in range(d):
            if r != col and not M[r][col].is_zero():
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [row[d:] for row in M]


def nullspace(A) -> list[list[FieldElement]]:
    """Reduced-echelon kernel basis (deterministic)."""
    if not A:
        return []
    rows, cols = len(A), len(A[0])
    F = A[0][0].field
    M = [row[:] for row in A]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if not M[i][c].is_zero()), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = M[r][c].inverse()
        M[r] = [e * inv for e in M[r]]
        for i in range(rows):
            if i != r and not M[i][c].is_zero():
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [F.zero()] * cols
        v[fc] = F.one()
        for pr, pc in enumerate(pivots):
            v[pc] = -M[pr][fc]
        basis.append(v)
    return basis


class IndependentSet:
    """Incremental row-echelon filter for vectors over a field."""

    def __init__(self, F: NumberField, dim: int):
        self.F = F
        self.dim = dim
        self.rows = []      # echelonized copies
        self.pivots = []

    def reduce(self, v):
        v = v[:]
        for row, p in zip(self.rows, self.pivots):
            if not v[p].is_zero():
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        return v

    def try_add(self, v) -> bool:
        w = self.reduce(v)
        p = next((i for i, e in enumerate(w) if not e.is_zero()), None)
        if p is None:
            return False
        inv = w[p].inverse()
        self.rows.append([e * inv for e in w])
        self.pivots.append(p)
        return True


# --------------------------------------------------------------------------
# Characteristic polynomial (interpolated determinants, exact)
# --------------------------------------------------------------------------

def det_rational(rows) -> Fraction:
    M = [[Fraction(int(c.numerator), int(c.denominator)) if not isinstance(c, int)
          else Fraction(c) for c in row] for row in rows]
    d = len(M)
    det = Fraction(1)
    for col in range(d):
        piv = next((r for r in range(col, d) if M[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det *= M[col][col]
        inv = 1 / M[col][col]
        for r in range(col + 1, d):
            if M[r][col] != 0:
                f = M[r][col] * inv
                for c in range(col, d):
                    M[r][c] -= f * M[col][c]
    return det


def charpoly_rational(rows) -> list[Fraction]:
    """Monic char poly det(zI - A), ascending coefficients, exact."""
    d = len(rows)
    pts = []
    for k in range(d + 1):
        shifted = [[Fraction(k) * (1 if i == j else 0) - Fraction(
            int(rows[i][j].numerator), int(rows[i][j].denominator))
            for j in range(d)] for i in range(d)]
        pts.append((Fraction(k), det_rational(shifted)))
    # Lagrange interpolation
    coeffs = [Fraction(0)] * (d + 1)
    for i, (xi, yi) in enumerate(pts):
        num = [Fraction(1)]
        den = Fraction(1)
        for j, (xj, _) in enumerate(pts):
            if i == j:
                continue
            num = [a - xj * b for a, b in
                   zip([Fraction(0)] + num, num + [Fraction(0)])]
            den *= (xi - xj)
        w = yi / den
        for k_, c in enumerate(num):
            coeffs[k_] += w * c
    assert coeffs[d] == 1
    return coeffs


# --------------------------------------------------------------------------
# Decomposition data
# --------------------------------------------------------------------------

class JordanBlockInfo:
    """One Jordan block: eigenvalue rho*lambda, block size, exact views."""

    def __init__(self, eig_fe: FieldElement, size: int, mod_sq: FieldElement):
        self.eig_fe = eig_fe
        self.size = size
        self.mod_sq = mod_sq        # |eigenvalue|^2 in the base field

    @functools.cached_property
    def eigenvalue(self) -> AlgebraicNumber:
        return self.eig_fe.to_algebraic()

    @functools.cached_property
    def modulus(self) -> AlgebraicNumber:
        from .algebraic import modulus as _mod
        return _mod(self.eigenvalue)

    @functools.cached_property
    def phase(self) -> AlgebraicNumber:
        return self.eigenvalue / self.modulus

    def __repr__(self):
        return f"Block(size={self.size}, eig={self.eig_fe!r})"


@dataclass
class JordanDecomposition:
    field: NumberField
    blocks: list[JordanBlockInfo]
    P: list                      # d x d FieldElement matrix
    P_inv: list
    regime: Regime
    dominant_index: int          # position of the extremal-modulus block
    _ext: Optional[object] = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return len(self.P)

    @property
    def k(self) -> int:
        return len(self.blocks)

    def block_offsets(self) -> list[int]:
        offs, acc = [], 0
        for b in self.blocks:
            offs.append(acc)
            acc += b.size
        return offs

    def block_row_pairs(self) -> list[tuple[int, int]]:
        """Flat coordinate -> (block index i, row-in-block j), both 0-based."""
        out = []
        for i, b in enumerate(self.blocks):
            for j in range(b.size):
                out.append((i, j))
        return out

    def J_matrix(self) -> list:
        F = self.field
        d = self.d
        M = [[F.zero() for _ in range(d)] for _ in range(d)]
        off = 0
        for b in self.blocks:
            for j in range(b.size):
                M[off + j][off + j] = b.eig_fe
                if j + 1 < b.size:
                    M[off + j][off + j + 1] = F.one()
            off += b.size
        return M

    def phases_fe(self) -> list[FieldElement]:
        """L = diag over blocks of the unit phases, in the extended field."""
        return self.extended().phases

    def moduli_fe(self) -> list[FieldElement]:
        """R = diag over blocks of the moduli, in the extended field."""
        return self.extended().moduli

    def extended(self) -> "ExtendedField":
        if self._ext is None:
            self._ext = ExtendedField(self)
        return self._ext


class ExtendedField:
    """The decomposition field with all block moduli (and hence phases)
    adjoined; built lazily because random-matrix work never needs it."""

    def __init__(self, dec: JordanDecomposition):
        from .algebraic import real_sqrt
        K = dec.field
        embeds = []                     # chain of Extension objects
        moduli = []
        for b in dec.blocks:
            m_sq = b.mod_sq
            for e in embeds:
                m_sq = e.embed(m_sq)
            r = m_sq.as_rational()
            if r is not None and _is_rational_square(r):
                moduli.append(K.from_rational(_rational_sqrt(r)))
                continue
            rho = real_sqrt(m_sq.to_algebraic())
            ext = adjoin_with_conj(K, rho, lambda be: be)  # real: conj fixes
            if ext.field is not K:
                moduli = [ext.embed(m) for m in moduli]
                embeds.append(ext)
                K = ext.field
            moduli.append(ext.beta)
        self.field = K
        self.embeds = embeds
        self.moduli = moduli
        self.eigs = [self.embed_from_base(b.eig_fe) for b in dec.blocks]
        self.phases = [e / m for e, m in zip(self.eigs, self.moduli)]
        # exact invariants: |phase| = 1 and rho * phase = eigenvalue
        for ph, e, m in zip(self.phases, self.eigs, self.moduli):
            assert (ph * ph.conj()).is_one()
            assert ph * m == e

    def embed_from_base(self, e: FieldElement) -> FieldElement:
        for ext in self.embeds:
            e = ext.embed(e)
        return e


def _is_rational_square(r) -> bool:
    import math
    fr = _fraction(r)
    if fr < 0:
        return False
    a, b = math.isqrt(fr.numerator), math.isqrt(fr.denominator)
    return a * a == fr.numerator and b * b == fr.denominator


def _rational_sqrt(r) -> Fraction:
    import math
    fr = _fraction(r)
    return Fraction(math.isqrt(fr.numerator), math.isqrt(fr.denominator))


# --------------------------------------------------------------------------
# Jordan chains
# --------------------------------------------------------------------------

def _jordan_chains(A_fe, eig: FieldElement, alg_mult: int):
    """Chains of generalized eigenvectors for one eigenvalue.

    Returns a list of chains; chain = [v_1, ..., v_s] with A v_1 = eig v_1
    and A v_c = eig v_c + v_{c-1}."""
    F = eig.field
    d = len(A_fe)
    N = [[A_fe[i][j] - (eig if i == j else F.zero()) for j in range(d)]
         for i in range(d)]
    powers = [mat_identity(F, d), N]
    kernels = [[]]
    m = None
    for j in range(1, d + 1):
        if len(powers) <= j:
            powers.append(mat_mul(powers[-1], N))
        K = nullspace(powers[j])
        kernels.append(K)
        if len(K) == alg_mult:
            m = j
            break
    assert m is not None, "generalized eigenspace did not reach multiplicity"
    chains = []
    carried = []            # images of higher-level tops, live at level j
    for j in range(m, 0, -1):
        indep = IndependentSet(F, d)
        for v in kernels[j - 1]:
            indep.try_add(v)
        for v in carried:
            ok = indep.try_add(v)
            assert ok, "carried vector dependent modulo lower kernel"
        new_tops = []
        for v in kernels[j]:
            if indep.try_add(v):
                new_tops.append(v)
        for w in new_tops:
            chain = [mat_vec(powers[j - 1 - c], w) for c in range(j)]
            chains.append(chain)
        carried = [mat_vec(N, v) for v in carried + new_tops]
    chains.sort(key=lambda ch: -len(ch))
    return chains


# --------------------------------------------------------------------------
# Public operations
# --------------------------------------------------------------------------

def jordan_decompose(A_rows) -> JordanDecomposition:
    """Exact Jordan form A = P J P_inv; requires A invertible."""
    d = len(A_rows)
    cp = charpoly_rational(A_rows)
    if cp[0] == 0:
        raise ValueError("singular matrix: strip the nilpotent part first")
    cp_z = qp_clear_denominators(cp)
    factors = factor_z(cp_z)
    sf = SplittingField([p for p, _ in factors])
    F = sf.field
    A_fe = mat_constant(F, A_rows)

    # one chain computation per conjugate class; mirror for the partner
    blocks_raw = []   # (eig_fe, size, chain columns)
    for p, mult in factors:
        deg = zp_degree(p)
        handled = set()
        for idx in range(max(deg, 1)):
            if idx in handled:
                continue
            eig = sf.root(p, idx)
            cidx = sf._conj_index(p, idx) if deg > 1 else idx
            chains = _jordan_chains(A_fe, eig, mult)
            for ch in chains:
                blocks_raw.append((eig, len(ch), ch))
            handled.add(idx)
            if cidx != idx and cidx not in handled:
                ceig = sf.root(p, cidx)
                for ch in chains:
                    cch = [[e.conj() for e in v] for v in ch]
                    blocks_raw.append((ceig, len(ch), cch))
                handled.add(cidx)

    # regime from exact modulus comparisons (squares stay in the field)
    one = F.one()
    infos = []
    for eig, size, ch in blocks_raw:
        infos.append({"eig": eig, "size": size, "chain": ch,
                      "mod_sq": eig * eig.conj()})
    sgn_vs_one = {}
    distinct_sq = []
    for rec in infos:
        ms = rec["mod_sq"]
        key = ms.coeffs
        if key not in sgn_vs_one:
            sgn_vs_one[key] = (ms - one).sign()
            distinct_sq.append(ms)
    if any(s > 0 for s in sgn_vs_one.values()):
        regime = Regime.EXPANDING
    elif any(s < 0 for s in sgn_vs_one.values()):
        regime = Regime.CONTRACTING
    else:
        regime = Regime.UNIT_MODULUS

    # total order on the distinct moduli; dominant class goes last
    def cmp_sq(a: FieldElement, b: FieldElement) -> int:
        return (a - b).sign()

    distinct_sq.sort(key=functools.cmp_to_key(cmp_sq))
    if regime is Regime.CONTRACTING:
        distinct_sq.reverse()          # dominant = minimum, put last
    rank = {ms.coeffs: i for i, ms in enumerate(distinct_sq)}

    def pair_group(rec):
        # conjugate blocks share Re(eig); group key = Re as exact coeffs
        re2 = rec["eig"] + rec["eig"].conj()
        return re2.coeffs

    def im_sign(rec) -> int:
        diff = rec["eig"] - rec["eig"].conj()   # 2i Im
        if diff.is_zero():
            return 0
        bits = 64
        while True:
            s = diff.enclosure(bits).im.sign()
            if s is not None:
                return s
            bits *= 2

    groups = {}
    for rec in infos:
        g = (rank[rec["mod_sq"].coeffs], pair_group(rec))
        groups.setdefault(g, []).append(rec)
    order = []
    for g in sorted(groups, key=lambda t: (t[0], t[1])):
        members = groups[g]
        members.sort(key=lambda rec: (-im_sign(rec), -rec["size"]))
        order.extend(members)

    blocks = [JordanBlockInfo(rec["eig"], rec["size"], rec["mod_sq"])
              for rec in order]
    cols = []
    for rec in order:
        cols.extend(rec["chain"])
    P = [[cols[j][i] for j in range(d)] for i in range(d)]
    P_inv = mat_inverse(P)
    return JordanDecomposition(field=F, blocks=blocks, P=P, P_inv=P_inv,
                               regime=regime, dominant_index=len(blocks) - 1)


def verify_decomposition(dec: JordanDecomposition, A_rows) -> bool:
    """P*J*P_inv == A and P*P_inv == I, entrywise exact."""
    F = dec.field
    d = dec.d
    A_fe = mat_constant(F, A_rows)
    J = dec.J_matrix()
    R = mat_mul(mat_mul(dec.P, J), dec.P_inv)
    for i in range(d):
        for j in range(d):
            if R[i][j] != A_fe[i][j]:
                return False
    Ident = mat_mul(dec.P, dec.P_inv)
    for i in range(d):
        for j in range(d):
            want_one = i == j
            if want_one and not Ident[i][j].is_one():
                return False
            if not want_one and not Ident[i][j].is_zero():
                return False
    return True


def strip_nilpotent(A_rows, x_vec):
    """Split off the nilpotent (eigenvalue-0) part of the dynamics.

    Returns (A_reduced, x_reduced, prefix, embedding) where `prefix` is the
    list of orbit points consumed before the state enters the invertible
    subspace, and `embedding` (d x r rational matrix) maps reduced
    coordinates back to the original space.  A wholly nilpotent matrix
    reduces to dimension 0 and the orbit is prefix + fixed point 0."""
    d = len(A_rows)
    A = [[Fraction(int(c.numerator), int(c.denominator)) for c in
          (Fraction(e) if isinstance(e, int) else e for e in row)]
         for row in A_rows]
    x = [Fraction(int(c.numerator), int(c.denominator)) for c in
         (Fraction(e) if isinstance(e, int) else e for e in x_vec)]

    def rank(M):
        M = [row[:] for row in M]
        r = 0
        for c in range(d):
            piv = next((i for i in range(r, d) if M[i][c] != 0), None)
            if piv is None:
                continue
            M[r], M[piv] = M[piv], M[r]
            for i in range(d):
                if i != r and M[i][c] != 0:
                    f = M[i][c] / M[r][c]
                    for cc in range(d):
                        M[i][cc] -= f * M[r][cc]
            r += 1
        return r

    def matmulQ(X, Y):
        return [[sum(X[i][k] * Y[k][j] for k in range(len(Y)))
                 for j in range(len(Y[0]))] for i in range(len(X))]

    # stable power: first m with rank(A^m) == rank(A^(m+1))
    pw = [[Fraction(1) if i == j else Fraction(0) for j in range(d)]
          for i in range(d)]
    powers = [pw]
    ranks = [d]
    m = 0
    while True:
        powers.append(matmulQ(powers[-1], A))
        ranks.append(rank(powers[-1]))
        if ranks[-1] == ranks[-2]:
            m = len(ranks) - 2
            break
    Am = powers[m]
    r = ranks[m]
    # basis of im(A^m): pivot columns of A^m
    basis = []
    probe = []
    for c in range(d):
        col = [Am[i][c] for i in range(d)]
        cand = probe + [col]
        Mt = [list(v) for v in cand]
        if _rank_rect(Mt) == len(cand):
            probe.append(col)
            basis.append(col)
        if len(basis) == r:
            break
    B = [[basis[j][i] for j in range(r)] for i in range(d)]  # d x r

    # A' with A * B = B * A'
    AB = matmulQ(A, B) if r else [[] for _ in range(d)]
    A_red = _solve_columns(B, AB, r)
    # prefix: orbit points before membership in im(A^m)
    prefix = []
    cur = x[:]
    for _ in range(m + 1):
        cc = _solve_membership(B, cur, r)
        if cc is not None:
            return A_red, cc, prefix, B
        prefix.append(cur)
        cur = [sum(A[i][j] * cur[j] for j in range(d)) for i in range(d)]
    cc = _solve_membership(B, cur, r)
    assert cc is not None, "orbit failed to enter the invertible subspace"
    return A_red, cc, prefix, B


def _rank_rect(rows_cols):
    # rows_cols: list of column vectors; rank of the spanned space
    if not rows_cols:
        return 0
    M = [list(v) for v in rows_cols]
    n, d = len(M), len(M[0])
    r = 0
    for c in range(d):
        piv = next((i for i in range(r, n) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(n):
            if i != r and M[i][c] != 0:
                f = M[i][c] / M[r][c]
                for cc in range(d):
                    M[i][cc] -= f * M[r][cc]
        r += 1
    return r


def _solve_columns(B, Y, r):
    """Solve B * X = Y column by column (B d x r, full column rank)."""
    if r == 0:
        return []
    d = len(B)
    cols = len(Y[0])
    X = [[Fraction(0)] * cols for _ in range(r)]
    for j in range(cols):
        rhs = [Y[i][j] for i in range(d)]
        sol = _solve_membership(B, rhs, r)
        assert sol is not None, "image space is not A-invariant?"
        for i in range(r):
            X[i][j] = sol[i]
    return X


def _solve_membership(B, v, r):
    """Coordinates of v in the column space of B, or None."""
    d = len(B)
    M = [[B[i][j] for j in range(r)] + [v[i]] for i in range(d)]
    piv_rows = []
    rr = 0
    for c in range(r):
        piv = next((i for i in range(rr, d) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[rr], M[piv] = M[piv], M[rr]
        for i in range(d):
            if i != rr and M[i][c] != 0:
                f = M[i][c] / M[rr][c]
                for cc in range(r + 1):
                    M[i][cc] -= f * M[rr][cc]
        piv_rows.append((rr, c))
        rr += 1
    sol = [Fraction(0)] * r
    for row, col in piv_rows:
        sol[col] = M[row][r] / M[row][col]
    # consistency: rows beyond rank must be zero
    for i in range(rr, d):
        if M[i][r] != 0:
            return None
    return sol
