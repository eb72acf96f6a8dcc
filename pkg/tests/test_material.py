"""Constitutive model checks.

Oracles: hand-evaluated closed forms for the quadratic model, central finite
differences of the energy (for stress) and of the stress (for the tangent),
and frame indifference under random rotations.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beamwarp import InvertedStateError
from beamwarp.material import (
    strain_to_tensor,
    tangent_to_voigt,
    tensor_to_strain,
    voigt_to_stress,
    voigt_to_tangent,
)

SMALL_STRAIN = st.lists(
    st.floats(-0.05, 0.05, allow_nan=False), min_size=6, max_size=6
).map(np.array)


def fd_stress(model, e, h=1e-6):
    out = np.empty(6)
    for k in range(6):
        ep, em = e.copy(), e.copy()
        ep[k] += h
        em[k] -= h
        out[k] = (model.energy(ep) - model.energy(em)) / (2 * h)
    return out


def fd_tangent(model, e, h=1e-6):
    out = np.empty((6, 6))
    for k in range(6):
        ep, em = e.copy(), e.copy()
        ep[k] += h
        em[k] -= h
        out[:, k] = (model.stress(ep) - model.stress(em)) / (2 * h)
    return out


def random_admissible_strains(rng, count, bound=0.2):
    states = []
    while len(states) < count:
        e = rng.uniform(-1.0, 1.0, 6)
        e *= min(1.0, bound / max(np.linalg.norm(e), 1e-12))
        states.append(e)
    return states


class TestQuadraticModel:
    def test_energy_hand_value(self, svk):
        # lam/2 tr(E)^2 + mu tr(E^2) at E11 = 0.01
        e = np.array([0.01, 0, 0, 0, 0, 0])
        assert svk.energy(e) == pytest.approx(1.405e-2, rel=1e-12)

    def test_stress_hand_value(self, svk):
        e = np.array([0.01, 0, 0, 0, 0, 0])
        np.testing.assert_allclose(
            svk.stress(e), [2.81, 1.21, 1.21, 0, 0, 0], atol=1e-12
        )

    def test_constant_tangent(self, svk, rng):
        d = svk.tangent(rng.uniform(-0.1, 0.1, 6))
        assert d[0, 0] == pytest.approx(281.0)
        assert d[0, 1] == pytest.approx(121.0)
        assert d[3, 3] == pytest.approx(80.0)
        np.testing.assert_array_equal(d, svk.tangent(np.zeros(6)))


class TestReferenceState:
    def test_zero_energy_and_stress(self, all_materials):
        for model in all_materials.values():
            assert model.energy(np.zeros(6)) == 0.0
            np.testing.assert_allclose(model.stress(np.zeros(6)), 0.0, atol=1e-14)

    def test_small_strain_moduli(self, neo_hooke, mooney_rivlin):
        # both isochoric/volumetric models linearize to mu = 80, K = 174.34
        lam_eff = 174.34 - 2 * 80.0 / 3.0
        expected = np.zeros((6, 6))
        expected[:3, :3] = lam_eff
        expected[np.diag_indices(3)] = lam_eff + 2 * 80.0
        expected[3:, 3:] = np.diag([80.0, 80.0, 80.0])
        for model in (neo_hooke, mooney_rivlin):
            np.testing.assert_allclose(model.tangent(np.zeros(6)), expected, atol=1e-12)


class TestGradientConsistency:
    def test_stress_is_energy_gradient(self, all_materials, rng):
        for model in all_materials.values():
            for e in random_admissible_strains(rng, 100):
                s = model.stress(e)
                np.testing.assert_allclose(
                    s, fd_stress(model, e), rtol=1e-6, atol=1e-6 * max(1.0, np.abs(s).max())
                )

    def test_tangent_is_stress_jacobian(self, all_materials, rng):
        for model in all_materials.values():
            for e in random_admissible_strains(rng, 100):
                d = model.tangent(e)
                assert np.abs(d - fd_tangent(model, e)).max() / np.abs(d).max() < 1e-5

    @settings(max_examples=30, deadline=None)
    @given(e=SMALL_STRAIN)
    def test_energy_descends_along_negative_stress(self, svk, e):
        # first-order expansion psi(e + h s) - psi(e) = h s . s + O(h^2)
        s = svk.stress(e)
        h = 1e-7
        lhs = svk.energy(e + h * s) - svk.energy(e)
        assert lhs == pytest.approx(h * float(s @ s), rel=1e-4, abs=1e-18)


class TestStructure:
    def test_tangent_symmetric(self, all_materials, rng):
        for model in all_materials.values():
            for e in random_admissible_strains(rng, 20):
                d = model.tangent(e)
                assert np.abs(d - d.T).max() <= 1e-10 * np.abs(d).max()

    def test_isotropy_under_rotation(self, all_materials, rng):
        for model in all_materials.values():
            for _ in range(20):
                e = strain_to_tensor(random_admissible_strains(rng, 1)[0])
                q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
                if np.linalg.det(q) < 0:
                    q[:, 0] *= -1
                rotated = tensor_to_strain(q @ e @ q.T)
                original = tensor_to_strain(e)
                assert model.energy(rotated) == pytest.approx(
                    model.energy(original), rel=1e-10, abs=1e-14
                )

    def test_batched_matches_scalar(self, neo_hooke, rng):
        batch = np.stack(random_admissible_strains(rng, 8))
        np.testing.assert_array_equal(
            neo_hooke.stress(batch)[3], neo_hooke.stress(batch[3])
        )
        np.testing.assert_array_equal(
            neo_hooke.tangent(batch)[5], neo_hooke.tangent(batch[5])
        )

    def test_voigt_round_trips(self, rng):
        d = rng.normal(size=(6, 6))
        d = d + d.T
        np.testing.assert_allclose(tangent_to_voigt(voigt_to_tangent(d)), d)
        s = rng.normal(size=6)
        t = voigt_to_stress(s)
        np.testing.assert_array_equal(t, t.swapaxes(-1, -2))


class TestAdmissibilityGuard:
    def test_inverted_state_rejected(self, all_materials):
        e = np.array([-0.6, 0.0, 0.0, 0.0, 0.0, 0.0])  # C11 = -0.2
        for model in all_materials.values():
            with pytest.raises(InvertedStateError):
                model.energy(e)
            with pytest.raises(InvertedStateError):
                model.stress(e)
