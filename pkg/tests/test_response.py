"""Post-processing: resultants, energy, adjoint beam stiffness, fields.

Oracles: small-strain engineering limits (E A, E I, G J_t), re-solve finite
differences of the energy, the minimization property of the warping field,
and dimensional scaling of the stiffness entries.
"""

import numpy as np
import pytest

from beamwarp import (
    SectionQuadrature,
    SolveOptions,
    StrainPrescriptors,
    beam_energy,
    beam_response,
    beam_stiffness,
    newton_solve,
    rectangle_patch,
    sample_fields,
    stress_resultants,
    unit_square_patch,
)
from beamwarp.assembly import assemble_sensitivity_rhs, point_fields, zero_state

MULTIAXIAL = StrainPrescriptors(eps=[0.02, 0.03, 0.1], kappa=[0.01, 0.02, 0.02])
YOUNG = 208.16


@pytest.fixture(scope="module")
def multiaxial_solution(square_quad, svk):
    return newton_solve(square_quad, svk, MULTIAXIAL)


class TestResultants:
    def test_zero_at_reference(self, square_quad, svk):
        sol = newton_solve(square_quad, svk, StrainPrescriptors())
        n, m = stress_resultants(sol)
        np.testing.assert_allclose(np.concatenate([n, m]), 0.0, atol=1e-12)

    def test_small_axial_strain_engineering_modulus(self, square_quad, svk):
        # warping relaxes the transverse stresses, so n3 -> E A eps3
        sol = newton_solve(square_quad, svk, StrainPrescriptors(eps=[0, 0, 1e-3]))
        n, _ = stress_resultants(sol)
        assert n[2] == pytest.approx(YOUNG * 1e-3, rel=0.01)
        assert abs(n[0]) < 1e-10 and abs(n[1]) < 1e-10

    def test_energy_gradient_single_axis(self, square_quad, svk):
        # d(energy)/d(eps3) equals n3 via re-solved central differences
        h = 1e-5
        opts = SolveOptions(tolerance=1e-20)
        sol = newton_solve(square_quad, svk, MULTIAXIAL, opts)
        n, _ = stress_resultants(sol)
        base = MULTIAXIAL.as_vector()
        plus, minus = base.copy(), base.copy()
        plus[2] += h
        minus[2] -= h
        fd = (
            beam_energy(newton_solve(square_quad, svk, StrainPrescriptors.from_vector(plus), opts))
            - beam_energy(newton_solve(square_quad, svk, StrainPrescriptors.from_vector(minus), opts))
        ) / (2 * h)
        assert n[2] == pytest.approx(fd, rel=1e-6)


class TestEnergy:
    def test_zero_at_reference(self, square_quad, svk):
        assert beam_energy(newton_solve(square_quad, svk, StrainPrescriptors())) == 0.0

    def test_warping_lowers_energy(self, square_quad, svk, multiaxial_solution):
        # the rigid-section state (u = 0) is admissible, so it bounds the
        # minimized energy from above
        rigid = zero_state(square_quad.num_basis)
        pf = point_fields(square_quad, MULTIAXIAL, rigid.reshape(-1)[: 3 * square_quad.num_basis].reshape(-1, 3))
        rigid_energy = float(square_quad.area @ multiaxial_solution.material.energy(pf.strain))
        assert beam_energy(multiaxial_solution) < rigid_energy

    def test_nonnegative(self, multiaxial_solution):
        assert beam_energy(multiaxial_solution) >= 0.0


class TestBeamStiffness:
    def test_symmetric(self, multiaxial_solution):
        c = beam_stiffness(multiaxial_solution)
        assert np.abs(c - c.T).max() / np.abs(c).max() < 1e-8

    def test_adjoint_identity(self, multiaxial_solution, square_quad, svk):
        # K Y + F,q = 0 for each strain measure at the converged state
        for q in range(6):
            rhs = assemble_sensitivity_rhs(
                square_quad, svk, MULTIAXIAL, multiaxial_solution.u_hat, q
            )
            y = multiaxial_solution.factorization.solve(-rhs)
            k = multiaxial_solution.factorization.matrix
            assert np.linalg.norm(k @ y + rhs) / np.linalg.norm(rhs) < 1e-10

    def test_classical_limits_at_reference(self, square_quad, svk):
        sol = newton_solve(square_quad, svk, StrainPrescriptors())
        c = beam_stiffness(sol)
        assert c[2, 2] == pytest.approx(YOUNG, rel=0.01)
        assert c[3, 3] == pytest.approx(YOUNG / 12.0, rel=0.01)
        assert c[4, 4] == pytest.approx(YOUNG / 12.0, rel=0.01)
        assert c[5, 5] == pytest.approx(80.0 * 0.140577, rel=0.02)

    def test_dimensional_scaling(self, svk):
        # halving the section scales EA by 1/4 and EI by 1/16
        full = SectionQuadrature.from_patch(unit_square_patch(3, 3))
        half = SectionQuadrature.from_patch(rectangle_patch(0.25, 0.25, 3, 3))
        c_full = beam_stiffness(newton_solve(full, svk, StrainPrescriptors()))
        c_half = beam_stiffness(newton_solve(half, svk, StrainPrescriptors()))
        assert c_half[2, 2] / c_full[2, 2] == pytest.approx(0.25, rel=1e-6)
        assert c_half[3, 3] / c_full[3, 3] == pytest.approx(1.0 / 16.0, rel=1e-6)

    def test_bundled_response(self, multiaxial_solution):
        resp = beam_response(multiaxial_solution)
        n, m = stress_resultants(multiaxial_solution)
        np.testing.assert_array_equal(resp.n, n)
        np.testing.assert_array_equal(resp.m, m)
        assert resp.energy == beam_energy(multiaxial_solution)
        np.testing.assert_array_equal(resp.stiffness, beam_stiffness(multiaxial_solution))


class TestFieldSampling:
    def test_zero_fields_at_reference(self, square_quad, svk):
        sol = newton_solve(square_quad, svk, StrainPrescriptors())
        fields = sample_fields(sol, 9)
        np.testing.assert_array_equal(fields.displacement, 0.0)
        np.testing.assert_array_equal(fields.von_mises, 0.0)
        np.testing.assert_allclose(fields.det_f, 1.0)

    def test_grid_inside_domain(self, multiaxial_solution):
        fields = sample_fields(multiaxial_solution, 11)
        assert fields.grid_shape == (11, 11)
        assert fields.points_param.min() > 0.0
        assert fields.points_param.max() < 1.0
        assert np.abs(fields.points).max() <= 0.5 + 1e-12

    def test_positive_volume_ratio(self, multiaxial_solution):
        fields = sample_fields(multiaxial_solution, 15)
        assert fields.det_f.min() > 0.0
