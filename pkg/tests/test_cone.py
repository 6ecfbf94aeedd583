"""Trajectory cones: Q polynomials, J-action, alignment, realness."""

from fractions import Fraction

import pytest

from ominv.cone import (PhaseVec, Ray, TrajectoryCone, aligned_orbit_coords,
                        apply_J_to_ray, cone_member_test, fp_eval_rational,
                        j_shift_identity_holds, orbit_alignment,
                        orbit_alignment_check, q_polynomials,
                        ray_point_exact_aligned, ray_point_boxes,
                        realness_certificate)
from ominv.spectral import Regime, jordan_decompose
from ominv.torus import (PhaseSystem, TorusPoint, relation_lattice_of_phases,
                         torus_group)

F = Fraction


def make_cone(A, x, t0=F(1)):
    dec = jordan_decompose(A)
    return TrajectoryCone(dec, x, None, t0)


def orbit(A, x, n):
    cur = list(x)
    for _ in range(n):
        cur = [sum(A[i][j] * cur[j] for j in range(len(x)))
               for i in range(len(x))]
    return cur


ROT = [[F(0), F(-2)], [F(2), F(0)]]
SHEAR = [[F(1), F(1)], [F(0), F(1)]]
SPIRAL = [[F(6, 5), F(-8, 5), F(0)], [F(8, 5), F(6, 5), F(0)],
          [F(0), F(0), F(3)]]


class TestQPolynomials:
    def test_single_block_constant(self):
        cone = make_cone([[F(2), F(0)], [F(0), F(3)]], [F(5), F(7)])
        for q, xp in zip(cone.Q, cone.x_prime):
            assert len(q) == 1 and q[0] == xp

    def test_shear_block(self):
        # 2x2 block eigenvalue 1, x' = (a, b): Q11 = a + u b, Q12 = b
        cone = make_cone(SHEAR, [F(3), F(4)])
        a, b = cone.x_prime
        q11, q12 = cone.Q
        assert q12 == [b]
        assert len(q11) == 2 and q11[0] == a and q11[1] == b

    def test_block_eigenvalue_two(self):
        # [[2,1],[0,2]], x=(0,1): Q11 = u/2, Q12 = 1
        cone = make_cone([[F(2), F(1)], [F(0), F(2)]], [F(0), F(1)])
        q11, q12 = cone.Q
        Fld = cone.field
        assert q12 == [Fld.one()]
        assert len(q11) == 2 and q11[0].is_zero()
        assert q11[1] == Fld.from_rational(F(1, 2))

    def test_regimes(self):
        assert make_cone(ROT, [F(1), F(0)]).regime is Regime.EXPANDING
        assert make_cone(SHEAR, [F(0), F(1)]).regime is Regime.UNIT_MODULUS
        assert make_cone([[F(1, 2), F(0)], [F(0), F(1, 2)]],
                         [F(1), F(1)]).regime is Regime.CONTRACTING


class TestJAction:
    def test_identity_shear(self):
        cone = make_cone(SHEAR, [F(0), F(1)])
        assert j_shift_identity_holds(cone)

    def test_identity_rotation(self):
        cone = make_cone(ROT, [F(1), F(0)])
        assert j_shift_identity_holds(cone)

    def test_identity_spiral(self):
        cone = make_cone(SPIRAL, [F(1), F(0), F(1)])
        assert j_shift_identity_holds(cone)

    def test_exact_pointwise_on_aligned_parameters(self):
        cone = make_cone(ROT, [F(1), F(0)])
        dec = cone.dec
        lat = relation_lattice_of_phases(
            PhaseSystem([b.eig_fe for b in dec.blocks]))
        T = torus_group(lat)
        J = dec.J_matrix()
        for pt in T.points:
            ray = Ray(cone, PhaseVec(point=pt))
            for n in (0, 1, 2, 3):
                zf, coords = ray_point_exact_aligned(ray, n)
                jz = [zf.field.zero() for _ in coords]
                d = len(coords)
                for r in range(d):
                    for c in range(d):
                        jc = zf.from_base(J[r][c])
                        if not jc.is_zero():
                            jz[r] = jz[r] + jc * coords[c]
                shifted = apply_J_to_ray(ray)
                zf2, coords2 = ray_point_exact_aligned(shifted, n + 1)
                assert zf2.field is zf.field
                assert all(a == b for a, b in zip(jz, coords2))

    def test_truncation_grows(self):
        cone = make_cone(ROT, [F(1), F(0)])
        ray = Ray(cone, PhaseVec(point=TorusPoint(4, (1, 3))))
        r2 = apply_J_to_ray(ray)
        assert r2.t0_shift == 1
        tr = r2.truncation_interval(64)
        assert tr.lo.as_fraction() > 1   # beta = 2 > 1

    def test_unit_regime_shifts_additively(self):
        cone = make_cone(SHEAR, [F(0), F(1)])
        ray = Ray(cone, PhaseVec(point=TorusPoint(1, (0,))))
        r2 = apply_J_to_ray(ray)
        assert r2.t0_rat == F(2)


class TestAlignment:
    @pytest.mark.parametrize("A,x", [
        (ROT, [F(1), F(0)]),
        (SHEAR, [F(0), F(1)]),
        ([[F(1, 2), F(0)], [F(0), F(1, 2)]], [F(1), F(1)]),
        (SPIRAL, [F(1), F(0), F(1)]),
    ])
    def test_orbit_containment(self, A, x):
        cone = make_cone(A, x)
        for n in range(0, 25):
            assert orbit_alignment_check(cone, n, orbit(A, x, n))

    def test_alignment_values_rotation(self):
        # A^2 x = (-4, 0) at p = (-1,-1), t = 4
        A, x = ROT, [F(1), F(0)]
        cone = make_cone(A, x)
        phases, (t_rat, shift) = orbit_alignment(cone, 2)
        assert shift == 2 and t_rat == 1
        zf, coords = cone.coords_exact_aligned(phases, 2)
        out = cone.map_to_problem_exact(zf, coords)
        assert out[0] == zf.field.from_rational(F(-4))
        assert out[1] == zf.field.from_rational(F(0))
        for e in phases.elems:
            assert (e * e.conj()).is_one()

    def test_shear_alignment(self):
        A, x = SHEAR, [F(0), F(1)]
        cone = make_cone(A, x)
        assert orbit_alignment_check(cone, 3, [F(3), F(1)])


class TestRayPoint:
    def test_unit_modulus_exact_any_t(self):
        # cone of [[1,1],[0,1]], x=(a,b), p=1, t=5 -> (a+5b, b)
        a, b = F(3), F(4)
        cone = make_cone(SHEAR, [a, b])
        q11, q12 = cone.Q
        v = fp_eval_rational(q11, cone.field, F(5))
        assert v == cone.field.from_rational(a + 5 * b)

    def test_interval_contains_exact(self):
        cone = make_cone(ROT, [F(1), F(0)])
        ray = Ray(cone, PhaseVec(point=TorusPoint(4, (0, 0))))
        boxes = ray_point_boxes(ray, F(2), bits=96)
        # at t = 2 = beta^1 with p = (1,1): coords = rho^1 * Q = 2 * x'
        zf, exact = ray_point_exact_aligned(ray, 1)
        for bx, ex in zip(boxes, exact):
            eb = ex.enclosure(100)
            assert not bx.disjoint(eb)

    def test_below_truncation_rejected(self):
        cone = make_cone(ROT, [F(1), F(0)], t0=F(1))
        ray = Ray(cone, PhaseVec(point=TorusPoint(4, (0, 0))), F(1), 2)
        with pytest.raises(ValueError):
            ray_point_exact_aligned(ray, 1)


class TestRealness:
    @pytest.mark.parametrize("A,x", [
        (ROT, [F(1), F(0)]),
        (SHEAR, [F(0), F(1)]),
        (SPIRAL, [F(1), F(0), F(1)]),
        ([[F(0), F(1)], [F(-1), F(-1)]], [F(1), F(2)]),   # eigenvalues zeta_3
    ])
    def test_verified_symbolically(self, A, x):
        cone = make_cone(A, x)
        res = realness_certificate(cone)
        assert res.verified, res.detail

    def test_interval_corroboration(self):
        cone = make_cone(ROT, [F(1), F(0)])
        res = realness_certificate(cone, samples=20, bits=96)
        assert res.verified
        assert res.max_im_bound is not None
        assert res.max_im_bound <= F(1, 2) ** 64


class TestMemberTest:
    def test_orbit_point_accepted_via_alignment_hint(self):
        A, x = ROT, [F(1), F(0)]
        cone = make_cone(A, x)
        y = orbit(A, x, 3)
        phases, (t_rat, shift) = orbit_alignment(cone, 3)
        assert cone_member_test(cone, y, 40, hint=(phases, 3)) == "yes-certified"

    def test_far_point_rejected(self):
        A, x = ROT, [F(1), F(0)]
        cone = make_cone(A, x)
        lat = relation_lattice_of_phases(
            PhaseSystem([b.eig_fe for b in cone.dec.blocks]))
        T = torus_group(lat)
        # cone points have norm exactly t >= 1; (1/10, 0) has norm 1/10
        verdict = cone_member_test(cone, [F(1, 10), F(0)], 10, torus=T,
                                   t_max=F(64))
        assert verdict == "no-certified"

    def test_coarse_unknown(self):
        A, x = ROT, [F(1), F(0)]
        cone = make_cone(A, x)
        assert cone_member_test(cone, [F(1), F(1)], 10) == "unknown"
