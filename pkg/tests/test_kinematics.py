"""Deformation gradient, strain operators and their sensitivities.

Oracles: hand evaluations of the twist/stretch cases and central finite
differences through the strain chain (perturbing one control point or one
strain measure at a time).
"""

import numpy as np
import pytest

from beamwarp import StrainPrescriptors
from beamwarp.kinematics import (
    axis_direction,
    b_operator,
    b_operator_sensitivity,
    cross_matrix,
    deformation_gradient,
    geometric_operator,
    green_lagrange,
    motion_sensitivity,
    partial_deformation_gradient_sensitivity,
    strain_sensitivity,
    total_deformation_gradient_sensitivity,
)

H = 1e-6


def random_point_state(rng, twist_scale=0.3):
    """Random (F, sp, x, N, gradN) tuple representing one quadrature point."""
    sp = StrainPrescriptors(rng.uniform(-0.1, 0.1, 3), rng.uniform(-twist_scale, twist_scale, 3))
    X = rng.uniform(-0.5, 0.5, 2)
    u = rng.uniform(-0.05, 0.05, 3)
    grad_u = rng.uniform(-0.1, 0.1, (3, 2))
    f = deformation_gradient(X, u, grad_u, sp)
    x = np.array([X[0] + u[0], X[1] + u[1], u[2]])
    n_val = rng.uniform(0.1, 1.0)
    g_val = rng.uniform(-2.0, 2.0, 2)
    return sp, X, u, grad_u, f, x, n_val, g_val


class TestDeformationGradient:
    def test_undeformed(self):
        f = deformation_gradient(np.array([0.3, -0.2]), np.zeros(3), np.zeros((3, 2)),
                                 StrainPrescriptors())
        np.testing.assert_array_equal(f, np.eye(3))

    def test_pure_twist_column(self):
        sp = StrainPrescriptors(kappa=[0.0, 0.0, 0.1])
        f = deformation_gradient(np.array([0.5, 0.5]), np.zeros(3), np.zeros((3, 2)), sp)
        np.testing.assert_allclose(f[:, 2], [-0.05, 0.05, 1.0])

    def test_uniaxial_stretch(self):
        sp = StrainPrescriptors(eps=[0.0, 0.0, 0.3])
        f = deformation_gradient(np.array([0.1, 0.2]), np.zeros(3), np.zeros((3, 2)), sp)
        expected = np.eye(3)
        expected[2, 2] = 1.3
        np.testing.assert_allclose(f, expected)


class TestGreenLagrange:
    def test_identity(self):
        np.testing.assert_array_equal(green_lagrange(np.eye(3)), np.zeros(6))

    def test_pure_twist_hand_value(self):
        sp = StrainPrescriptors(kappa=[0.0, 0.0, 0.1])
        f = deformation_gradient(np.array([0.5, 0.5]), np.zeros(3), np.zeros((3, 2)), sp)
        np.testing.assert_allclose(
            green_lagrange(f), [0, 0, 0.0025, 0, 0.05, -0.05], atol=1e-15
        )

    def test_uniaxial_e33(self):
        f = np.eye(3)
        f[2, 2] = 1.1
        assert green_lagrange(f)[2] == pytest.approx(0.105)


class TestBOperator:
    def test_small_strain_rows(self):
        b = b_operator(np.eye(3), np.zeros(3), 0.7, np.array([0.3, 0.4]))
        expected = np.array([
            [0.3, 0.0, 0.0],
            [0.0, 0.4, 0.0],
            [0.0, 0.0, 0.0],
            [0.4, 0.3, 0.0],
            [0.0, 0.0, 0.4],
            [0.0, 0.0, 0.3],
        ])
        np.testing.assert_allclose(b, expected, atol=1e-15)

    def test_matches_fd_of_strain_chain(self, rng):
        for _ in range(20):
            sp, X, u, grad_u, f, x, n_val, g_val = random_point_state(rng)
            b = b_operator(f, sp.kappa, n_val, g_val)
            fd = np.empty((6, 3))
            for m in range(3):
                du = np.zeros(3)
                du[m] = H
                plus = deformation_gradient(X, u + n_val * du, grad_u + np.outer(du, g_val), sp)
                minus = deformation_gradient(X, u - n_val * du, grad_u - np.outer(du, g_val), sp)
                fd[:, m] = (green_lagrange(plus) - green_lagrange(minus)) / (2 * H)
            assert np.abs(b - fd).max() / max(np.abs(b).max(), 1e-9) < 1e-6

    def test_strain_variation_second_order_remainder(self, rng):
        # green_lagrange(F(u + h du)) - E - h B du must decay like h^2
        sp, X, u, grad_u, f, x, n_val, g_val = random_point_state(rng)
        du = rng.uniform(-1.0, 1.0, 3)
        b = b_operator(f, sp.kappa, n_val, g_val)
        e0 = green_lagrange(f)
        remainders = []
        steps = (1e-2, 1e-3, 1e-4)
        for h in steps:
            f_h = deformation_gradient(
                X, u + h * n_val * du, grad_u + h * np.outer(du, g_val), sp
            )
            remainders.append(np.linalg.norm(green_lagrange(f_h) - e0 - h * (b @ du)))
        rates = np.log(remainders[0] / remainders[1]) / np.log(10), \
            np.log(remainders[1] / remainders[2]) / np.log(10)
        assert min(rates) > 1.9


class TestGeometricOperator:
    def test_zero_stress(self, rng):
        g = geometric_operator(rng.uniform(-1, 1, 3), 0.3, 0.5,
                               rng.normal(size=2), rng.normal(size=2), np.zeros(6))
        np.testing.assert_array_equal(g, np.zeros((3, 3)))

    def test_single_active_term(self):
        g = geometric_operator(np.zeros(3), 0.3, 0.5, np.array([2.0, 0.0]),
                               np.array([1.5, 0.0]), np.array([1.0, 0, 0, 0, 0, 0]))
        np.testing.assert_allclose(g, 3.0 * np.eye(3))

    def test_block_transpose_symmetry(self, rng):
        for _ in range(10):
            kappa = rng.uniform(-0.5, 0.5, 3)
            s = rng.normal(size=6)
            ni, nj = rng.uniform(0.1, 1.0, 2)
            gi, gj = rng.normal(size=2), rng.normal(size=2)
            g_ij = geometric_operator(kappa, ni, nj, gi, gj, s)
            g_ji = geometric_operator(kappa, nj, ni, gj, gi, s)
            np.testing.assert_allclose(g_ij, g_ji.T, atol=1e-14)

    def test_matches_fd_of_internal_force(self, rng):
        # derivative of B_I^T S w.r.t. u_J at frozen stress
        for _ in range(15):
            sp, X, u, grad_u, f, x, n_i, g_i = random_point_state(rng)
            n_j = rng.uniform(0.1, 1.0)
            g_j = rng.uniform(-2.0, 2.0, 2)
            s = rng.normal(size=6)
            g_blk = geometric_operator(sp.kappa, n_i, n_j, g_i, g_j, s)
            fd = np.empty((3, 3))
            for m in range(3):
                du = np.zeros(3)
                du[m] = H
                f_p = deformation_gradient(X, u + n_j * du, grad_u + np.outer(du, g_j), sp)
                f_m = deformation_gradient(X, u - n_j * du, grad_u - np.outer(du, g_j), sp)
                fd[:, m] = (
                    b_operator(f_p, sp.kappa, n_i, g_i).T @ s
                    - b_operator(f_m, sp.kappa, n_i, g_i).T @ s
                ) / (2 * H)
            assert np.abs(g_blk - fd).max() / max(np.abs(fd).max(), 1e-9) < 1e-6


class TestStrainMeasureSensitivities:
    def test_axial_direction_at_identity(self):
        e_q = strain_sensitivity(np.eye(3), np.array([0.2, 0.1, 0.0]), 2)
        np.testing.assert_allclose(e_q, [0, 0, 1, 0, 0, 0], atol=1e-15)

    def test_twist_hand_value(self):
        e_q = strain_sensitivity(np.eye(3), np.array([0.5, 0.5, 0.0]), 5)
        np.testing.assert_allclose(e_q, [0, 0, 0, 0, 0.5, -0.5], atol=1e-15)

    def test_inplane_slots_always_zero(self, rng):
        for q in range(6):
            sp, X, u, grad_u, f, x, _, _ = random_point_state(rng)
            e_q = strain_sensitivity(f, x, q)
            assert e_q[0] == e_q[1] == e_q[3] == 0.0

    def test_matches_prescriptor_fd(self, rng):
        for q in range(6):
            sp, X, u, grad_u, f, x, _, _ = random_point_state(rng)
            base = sp.as_vector()
            plus, minus = base.copy(), base.copy()
            plus[q] += H
            minus[q] -= H
            f_p = deformation_gradient(X, u, grad_u, StrainPrescriptors.from_vector(plus))
            f_m = deformation_gradient(X, u, grad_u, StrainPrescriptors.from_vector(minus))
            fd = (green_lagrange(f_p) - green_lagrange(f_m)) / (2 * H)
            e_q = strain_sensitivity(f, x, q)
            assert np.abs(e_q - fd).max() / max(np.abs(fd).max(), 1e-9) < 1e-6

    def test_b_sensitivity_shear_axis(self):
        # q = eps1 with kappa = 0: w = e1, rows 5/6 pick up the gradients
        b_q = b_operator_sensitivity(np.eye(3), np.zeros(3), np.zeros(3), 0,
                                     0.7, np.array([0.3, 0.4]))
        expected = np.zeros((6, 3))
        expected[4, 0] = 0.4
        expected[5, 0] = 0.3
        np.testing.assert_allclose(b_q, expected, atol=1e-15)

    def test_b_sensitivity_twist_at_center(self):
        b_q = b_operator_sensitivity(np.eye(3), np.zeros(3), np.zeros(3), 5,
                                     0.7, np.array([0.3, 0.4]))
        np.testing.assert_allclose(b_q[2], 0.0, atol=1e-15)

    def test_b_sensitivity_matches_fd(self, rng):
        for q in range(6):
            sp, X, u, grad_u, f, x, n_val, g_val = random_point_state(rng)
            base = sp.as_vector()
            plus, minus = base.copy(), base.copy()
            plus[q] += H
            minus[q] -= H
            sp_p = StrainPrescriptors.from_vector(plus)
            sp_m = StrainPrescriptors.from_vector(minus)
            f_p = deformation_gradient(X, u, grad_u, sp_p)
            f_m = deformation_gradient(X, u, grad_u, sp_m)
            fd = (
                b_operator(f_p, sp_p.kappa, n_val, g_val)
                - b_operator(f_m, sp_m.kappa, n_val, g_val)
            ) / (2 * H)
            b_q = b_operator_sensitivity(f, x, sp.kappa, q, n_val, g_val)
            assert np.abs(b_q - fd).max() / max(np.abs(fd).max(), 1e-9) < 1e-6


class TestDeformationGradientSensitivity:
    def test_partial_is_total_with_frozen_warping(self, rng):
        sp, X, u, grad_u, f, x, _, _ = random_point_state(rng)
        q = 4
        total = total_deformation_gradient_sensitivity(
            x, np.zeros(3), np.zeros((3, 2)), sp.kappa, q
        )
        np.testing.assert_array_equal(
            total, partial_deformation_gradient_sensitivity(x, q)
        )

    def test_total_minus_partial_structure(self, rng):
        sp, X, u, grad_u, f, x, _, _ = random_point_state(rng)
        u_q = rng.normal(size=3)
        grad_u_q = rng.normal(size=(3, 2))
        q = 1
        diff = total_deformation_gradient_sensitivity(x, u_q, grad_u_q, sp.kappa, q) \
            - partial_deformation_gradient_sensitivity(x, q)
        np.testing.assert_allclose(diff[:, :2], grad_u_q)
        np.testing.assert_allclose(diff[:, 2], cross_matrix(sp.kappa) @ u_q)

    def test_axis_direction_unit_vectors(self):
        for q in range(6):
            vec = axis_direction(q).as_vector()
            expected = np.zeros(6)
            expected[q] = 1.0
            np.testing.assert_array_equal(vec, expected)

    def test_motion_sensitivity_twist(self):
        w = motion_sensitivity(np.array([0.5, 0.5, 0.0]), 5)
        np.testing.assert_allclose(w, [-0.5, 0.5, 0.0])
