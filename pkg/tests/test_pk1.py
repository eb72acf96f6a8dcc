"""Reference formulation: stress/tangent kernels and exact agreement with
the production assembly at arbitrary states."""

import numpy as np
import pytest

from beamwarp import StrainPrescriptors
from beamwarp.assembly import (
    assemble_residual,
    assemble_sensitivity_rhs,
    assemble_tangent,
    zero_state,
)
from beamwarp.kinematics import green_lagrange
from beamwarp.material import tensor_to_strain, voigt_to_stress
from beamwarp.pk1 import (
    assemble_pk1,
    contract_tangent,
    pk1_stress,
    pk1_tangent,
)
from beamwarp import pk1


def random_gradient(rng, scale=0.15):
    f = np.eye(3) + rng.uniform(-scale, scale, (3, 3))
    if np.linalg.det(f) < 0.3:
        f = np.eye(3) + 0.3 * (f - np.eye(3))
    return f


def random_state(rng, quad, scale=0.01):
    u_hat = zero_state(quad.num_basis)
    u_hat[: 3 * quad.num_basis] = rng.uniform(-scale, scale, 3 * quad.num_basis)
    u_hat[3 * quad.num_basis:] = rng.uniform(-0.5, 0.5, 6)
    return u_hat


class TestStress:
    def test_reference_state(self, svk):
        np.testing.assert_allclose(pk1_stress(svk, np.eye(3)), 0.0, atol=1e-14)

    def test_uniaxial_hand_values(self, svk):
        f = np.eye(3)
        f[2, 2] = 1.1
        p = pk1_stress(svk, f)
        assert p[2, 2] == pytest.approx(1.1 * 281.0 * 0.105)
        assert p[0, 0] == pytest.approx(121.0 * 0.105)
        assert p[1, 1] == pytest.approx(121.0 * 0.105)

    def test_matches_energy_gradient(self, all_materials, rng):
        h = 1e-6
        for model in all_materials.values():
            for _ in range(15):
                f = random_gradient(rng)
                p = pk1_stress(model, f)
                fd = np.empty((3, 3))
                for i in range(3):
                    for j in range(3):
                        fp, fm = f.copy(), f.copy()
                        fp[i, j] += h
                        fm[i, j] -= h
                        fd[i, j] = (
                            model.energy(green_lagrange(fp))
                            - model.energy(green_lagrange(fm))
                        ) / (2 * h)
                assert np.abs(p - fd).max() / np.abs(p).max() < 1e-6


class TestTangent:
    def test_isotropic_at_reference(self, svk):
        a4 = pk1_tangent(svk, np.eye(3))
        eye = np.eye(3)
        expected = (
            121.0 * np.einsum("ij,kl->ijkl", eye, eye)
            + 80.0 * (np.einsum("ik,jl->ijkl", eye, eye) + np.einsum("il,jk->ijkl", eye, eye))
        )
        np.testing.assert_allclose(a4, expected, atol=1e-12)

    def test_major_symmetry(self, all_materials, rng):
        for model in all_materials.values():
            a4 = pk1_tangent(model, random_gradient(rng))
            sym_err = np.abs(a4 - a4.transpose(2, 3, 0, 1)).max()
            assert sym_err < 1e-10 * np.abs(a4).max()

    def test_matches_fd_of_stress(self, all_materials, rng):
        h = 1e-6
        for model in all_materials.values():
            f = random_gradient(rng)
            a4 = pk1_tangent(model, f)
            fd = np.empty((3, 3, 3, 3))
            for k in range(3):
                for el in range(3):
                    fp, fm = f.copy(), f.copy()
                    fp[k, el] += h
                    fm[k, el] -= h
                    fd[:, :, k, el] = (pk1_stress(model, fp) - pk1_stress(model, fm)) / (2 * h)
            assert np.abs(a4 - fd).max() / np.abs(a4).max() < 1e-5

    def test_contraction_matches_voigt_expansion(self, all_materials, rng):
        # A : dF == dF S + F (D : sym(F^T dF)) expanded on the PK2 side
        for model in all_materials.values():
            for _ in range(10):
                f = random_gradient(rng)
                df = rng.normal(size=(3, 3))
                a4 = pk1_tangent(model, f)
                lhs = contract_tangent(a4, df)
                strain = green_lagrange(f)
                s = voigt_to_stress(model.stress(strain))
                sym = f.T @ df
                de = tensor_to_strain(0.5 * (sym + sym.T))
                ds = voigt_to_stress(model.tangent(strain) @ de)
                rhs = df @ s + f @ ds
                assert np.abs(lhs - rhs).max() / np.abs(rhs).max() < 1e-10


class TestFormulationAgreement:
    SP = StrainPrescriptors(eps=[0.01, -0.02, 0.05], kappa=[0.02, -0.01, 0.03])

    def test_reference_state_zero_residual(self, small_quad, svk):
        resid, _ = assemble_pk1(small_quad, svk, StrainPrescriptors(),
                                zero_state(small_quad.num_basis))
        assert np.abs(resid).max() < 1e-12

    def test_residual_and_tangent_match_production(self, small_quad, all_materials, rng):
        # the two formulations are algebraically identical at every state
        for model in all_materials.values():
            for _ in range(7):
                u_hat = random_state(rng, small_quad)
                r1, k1 = assemble_pk1(small_quad, model, self.SP, u_hat)
                r2 = assemble_residual(small_quad, model, self.SP, u_hat)
                k2 = assemble_tangent(small_quad, model, self.SP, u_hat)
                r_scale = np.abs(r2).max()
                k_scale = np.abs(k2.toarray()).max()
                assert np.abs(r1 - r2).max() / r_scale < 1e-12
                assert np.abs((k1 - k2).toarray()).max() / k_scale < 1e-12

    def test_sensitivity_rhs_matches_production(self, small_quad, mooney_rivlin, rng):
        u_hat = random_state(rng, small_quad)
        for q in range(6):
            rhs1 = pk1.assemble_sensitivity_rhs(small_quad, mooney_rivlin, self.SP, u_hat, q)
            rhs2 = assemble_sensitivity_rhs(small_quad, mooney_rivlin, self.SP, u_hat, q)
            scale = max(np.abs(rhs2).max(), 1e-12)
            assert np.abs(rhs1 - rhs2).max() / scale < 1e-12
