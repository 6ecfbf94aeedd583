"""Relation lattices, torus groups, exponent-sign decisions."""

import math
from fractions import Fraction

import pytest

from ominv.algebraic import AlgebraicNumber, isolate_roots
from ominv.torus import (Completeness, ModuliSignOracle, RelationLattice,
                         hnf, moduli_combination_sign, relation_lattice,
                         roots_of_unity_points, row_kernel,
                         snf_with_transforms, torus_group, zeta_power)
from ominv.zpoly import zp

A = AlgebraicNumber.from_rational


def unit(poly, want_im_positive=True):
    roots = isolate_roots(zp(poly))
    for r, _ in roots:
        box = r.refine(12)
        if (box.im.lo.m > 0) == want_im_positive:
            return r
    raise AssertionError


class TestLatticeUtils:
    def test_hnf_example(self):
        assert hnf([[1, 1], [4, 0]], 2) == [[1, 1], [0, 4]]

    def test_hnf_canonical_of_permuted_generators(self):
        a = hnf([[2, 4], [3, 5]], 2)
        b = hnf([[3, 5], [2, 4], [5, 9]], 2)
        assert a == b

    def test_row_kernel(self):
        for w in ([2, 3], [4, 6, 10], [5, 0, 0], [0, 0]):
            for v in row_kernel(w):
                assert sum(a * b for a, b in zip(w, v)) == 0
        assert len(row_kernel([2, 3])) == 1

    def test_snf_identity(self):
        import random
        random.seed(3)
        for _ in range(20):
            m, k = random.randint(1, 3), random.randint(1, 4)
            B = [[random.randint(-5, 5) for _ in range(k)] for _ in range(m)]
            U, D, V = snf_with_transforms(B)
            # U B V == D
            def mm(X, Y):
                return [[sum(X[i][t] * Y[t][j] for t in range(len(Y)))
                         for j in range(len(Y[0]))] for i in range(len(X))]
            assert mm(mm(U, B), V) == D
            for i in range(len(D)):
                for j in range(len(D[0])):
                    if i != j:
                        assert D[i][j] == 0


class TestRelationLattice:
    def test_i_minus_i(self):
        i = unit((1, 0, 1))
        lat = relation_lattice([i, i.conj()])
        assert lat.basis == [[1, 1], [0, 4]]
        assert lat.completeness.proven
        assert lat.index() == 4

    def test_single_one(self):
        lat = relation_lattice([A(1)])
        assert lat.basis == [[1]]
        T = torus_group(lat)
        assert T.kind == "finite" and len(T.points) == 1
        assert T.points[0].coords() == (A(1),)

    def test_conjugate_pair_not_root_of_unity(self):
        lam = unit((5, -6, 5))           # (3+4i)/5
        lat = relation_lattice([lam, lam.conj()])
        assert lat.basis == [[1, 1]]
        assert lat.completeness.proven   # single non-RU conjugate class
        T = torus_group(lat)
        assert T.kind == "dense" and T.rank == 1

    def test_verified_exactly(self):
        lam = unit((5, -6, 5))
        lat = relation_lattice([lam, lam.conj(), A(-1)])
        # relations: e1+e2 and 2*e3
        assert lat.rank == 2
        assert lat.completeness.proven


class TestTorusGroup:
    def test_finite_enumeration_from_i(self):
        i = unit((1, 0, 1))
        lat = relation_lattice([i, i.conj()])
        T = torus_group(lat)
        assert T.kind == "finite"
        assert len(T.points) == 4
        # points are exactly {(i^j, i^-j)}
        got = sorted(tuple(p.exps) for p in T.points)
        N = T.points[0].N
        for exps in got:
            assert (exps[0] + exps[1]) % N == 0
        # closure under multiplication by (i, -i) = exponent shift
        t_quarter = N // 4
        pts = {p.exps for p in T.points}
        for p in T.points:
            shifted = tuple((e + s * t_quarter) % N
                            for e, s in zip(p.exps, (1, -1)))
            assert shifted in pts

    def test_dense_points_order_2_and_4(self):
        lat = RelationLattice(k=2, basis=[[1, 1]],
                              completeness=Completeness(True))
        T = torus_group(lat)
        pts2 = roots_of_unity_points(T, 2)
        vals2 = sorted(tuple(c.as_rational() for c in p.coords())
                       for p in pts2)
        assert vals2 == [(-1, -1), (1, 1)]
        pts4 = roots_of_unity_points(T, 4)
        assert len(pts4) == 4
        for p in pts4:
            assert (p.exps[0] + p.exps[1]) % p.N == 0

    def test_all_points_satisfy_relations(self):
        lat = RelationLattice(k=3, basis=[[1, 1, 0], [0, 0, 2]],
                              completeness=Completeness(True))
        T = torus_group(lat)
        assert T.kind == "dense" and T.rank == 1
        for p in roots_of_unity_points(T, 6):
            assert p.satisfies(lat)


class TestZetaPower:
    def test_small_orders(self):
        assert zeta_power(4, 0) == A(1)
        assert zeta_power(4, 2) == A(-1)
        z = zeta_power(4, 1)
        assert z.minpoly == zp((1, 0, 1))
        assert z.refine(8).im.lo.m > 0
        assert zeta_power(4, 3) == z.conj()

    def test_power_arithmetic(self):
        z6 = zeta_power(6, 1)
        assert z6.pow_int(6) == A(1)
        assert z6 * zeta_power(6, 5) == A(1)

    def test_order_12(self):
        z = zeta_power(12, 1)
        assert z.pow_int(12) == A(1)
        for m in range(1, 12):
            assert z.pow_int(m) != A(1)


class TestModuliSign:
    def test_exact_zero(self):
        assert moduli_combination_sign([2, -1], [A(2), A(4)]) == 0

    def test_negative(self):
        assert moduli_combination_sign([1, -1], [A(2), A(3)]) == -1

    def test_positive(self):
        assert moduli_combination_sign([1, -1], [A(8), A(4)]) == 1

    def test_irrational_moduli(self):
        s2 = [r for r, _ in isolate_roots(zp((-2, 0, 1))) if r.sign() > 0][0]
        # 2 log(sqrt2) - log 2 = 0
        assert moduli_combination_sign([2, -1], [s2, A(2)]) == 0
        # log(sqrt2) - log 2 < 0
        assert moduli_combination_sign([1, -1], [s2, A(2)]) == -1

    def test_oracle_against_256bit_logs(self):
        import mpmath, random
        random.seed(5)
        s2 = [r for r, _ in isolate_roots(zp((-2, 0, 1))) if r.sign() > 0][0]
        pool = [(A(2), 2), (A(3), 3), (A(Fraction(1, 2)), Fraction(1, 2)),
                (A(Fraction(5, 3)), Fraction(5, 3)), (s2, None)]
        for _ in range(60):
            k = random.randint(1, 3)
            picks = [random.choice(pool) for _ in range(k)]
            ns = [random.randint(-4, 4) for _ in range(k)]
            got = moduli_combination_sign(ns, [p[0] for p in picks])
            with mpmath.workprec(256):
                tot = mpmath.fsum(
                    n * (mpmath.log(mpmath.mpf(v.numerator) / v.denominator)
                         if v is not None else mpmath.log(2) / 2)
                    for n, (_, v) in zip(ns, picks))
                if abs(tot) > mpmath.mpf(2) ** -200:
                    want = 1 if tot > 0 else -1
                    assert got == want
                else:
                    assert got == 0
