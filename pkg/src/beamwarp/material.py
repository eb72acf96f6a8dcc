"""Hyperelastic constitutive models: energy, PK2 stress and Voigt tangent.

Three models are provided: Saint Venant-Kirchhoff, Neo-Hooke and
Mooney-Rivlin (the latter two with an isochoric/volumetric split based on
the modified invariants Ibar1 = J^(-2/3) I1, Ibar2 = J^(-4/3) I2).

All public interfaces use Voigt 6-vectors ordered (11, 22, 33, 12, 23, 13)
with engineering (doubled) shear components on the strain side only, and
GPa units. Every function broadcasts over leading axes, so a whole
quadrature batch can be evaluated in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvertedStateError, ParameterError

#: Voigt slot -> tensor index pair, ordering (11, 22, 33, 12, 23, 13)
VOIGT_PAIRS = ((0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2))

_MIN_VOLUME_RATIO = 1e-6

_EYE = np.eye(3)
_EYE4_SYM = 0.5 * (
    np.einsum("ac,bd->abcd", _EYE, _EYE) + np.einsum("ad,bc->abcd", _EYE, _EYE)
)


def strain_to_tensor(strain_v: np.ndarray) -> np.ndarray:
    """Engineering Voigt strain (..., 6) -> symmetric tensor (..., 3, 3)."""
    strain_v = np.asarray(strain_v, dtype=float)
    out = np.zeros(strain_v.shape[:-1] + (3, 3))
    for k, (a, b) in enumerate(VOIGT_PAIRS):
        if a == b:
            out[..., a, b] = strain_v[..., k]
        else:
            out[..., a, b] = out[..., b, a] = 0.5 * strain_v[..., k]
    return out


def tensor_to_strain(strain: np.ndarray) -> np.ndarray:
    """Symmetric strain tensor (..., 3, 3) -> engineering Voigt (..., 6)."""
    strain = np.asarray(strain, dtype=float)
    out = np.empty(strain.shape[:-2] + (6,))
    for k, (a, b) in enumerate(VOIGT_PAIRS):
        out[..., k] = strain[..., a, b] if a == b else 2.0 * strain[..., a, b]
    return out


def stress_to_voigt(stress: np.ndarray) -> np.ndarray:
    """Symmetric stress tensor (..., 3, 3) -> Voigt (..., 6), no shear factors."""
    stress = np.asarray(stress, dtype=float)
    out = np.empty(stress.shape[:-2] + (6,))
    for k, (a, b) in enumerate(VOIGT_PAIRS):
        out[..., k] = stress[..., a, b]
    return out


def voigt_to_stress(stress_v: np.ndarray) -> np.ndarray:
    """Voigt stress (..., 6) -> symmetric tensor (..., 3, 3)."""
    stress_v = np.asarray(stress_v, dtype=float)
    out = np.empty(stress_v.shape[:-1] + (3, 3))
    for k, (a, b) in enumerate(VOIGT_PAIRS):
        out[..., a, b] = stress_v[..., k]
        out[..., b, a] = stress_v[..., k]
    return out


def tangent_to_voigt(c4: np.ndarray) -> np.ndarray:
    """Rank-4 tangent dS/dE (..., 3,3,3,3) -> Voigt 6x6 against engineering strain."""
    out = np.empty(c4.shape[:-4] + (6, 6))
    for i, (a, b) in enumerate(VOIGT_PAIRS):
        for j, (c, d) in enumerate(VOIGT_PAIRS):
            out[..., i, j] = c4[..., a, b, c, d]
    return out


def voigt_to_tangent(d: np.ndarray) -> np.ndarray:
    """Voigt 6x6 tangent -> rank-4 dS/dE with both minor symmetries."""
    d = np.asarray(d, dtype=float)
    out = np.empty(d.shape[:-2] + (3, 3, 3, 3))
    for i, (a, b) in enumerate(VOIGT_PAIRS):
        for j, (c, dd) in enumerate(VOIGT_PAIRS):
            v = d[..., i, j]
            out[..., a, b, c, dd] = v
            out[..., b, a, c, dd] = v
            out[..., a, b, dd, c] = v
            out[..., b, a, dd, c] = v
    return out


def _right_cauchy_green(strain_v):
    """C = 2E + I with an invertibility guard on det C."""
    c = 2.0 * strain_to_tensor(strain_v)
    c[..., 0, 0] += 1.0
    c[..., 1, 1] += 1.0
    c[..., 2, 2] += 1.0
    det = np.linalg.det(c)
    if np.any(det <= _MIN_VOLUME_RATIO**2):
        raise InvertedStateError(
            "non-positive det C: deformation state is inverted or too extreme"
        )
    return c, det


def _otimes(a, b):
    return np.einsum("...ab,...cd->...abcd", a, b)


def _osym(a, b):
    """Symmetrized dyadic (a (x) b)_sym,ABCD = (a_AC b_BD + a_AD b_BC) / 2."""
    return 0.5 * (
        np.einsum("...ac,...bd->...abcd", a, b) + np.einsum("...ad,...bc->...abcd", a, b)
    )


@dataclass(frozen=True)
class SaintVenantKirchhoff:
    """Quadratic strain energy lam/2 tr(E)^2 + mu tr(E^2); Lame moduli in GPa."""

    lam: float
    mu: float

    def __post_init__(self):
        if self.lam <= 0 or self.mu <= 0:
            raise ParameterError("Lame moduli must be positive")

    def energy(self, strain_v):
        _right_cauchy_green(strain_v)  # admissibility guard only
        e = strain_to_tensor(strain_v)
        tr = np.trace(e, axis1=-2, axis2=-1)
        tr_sq = np.einsum("...ab,...ba->...", e, e)
        return 0.5 * self.lam * tr**2 + self.mu * tr_sq

    def stress(self, strain_v):
        _right_cauchy_green(strain_v)
        e = strain_to_tensor(strain_v)
        tr = np.trace(e, axis1=-2, axis2=-1)
        s = 2.0 * self.mu * e
        s[..., 0, 0] += self.lam * tr
        s[..., 1, 1] += self.lam * tr
        s[..., 2, 2] += self.lam * tr
        return stress_to_voigt(s)

    def tangent(self, strain_v):
        strain_v = np.asarray(strain_v, dtype=float)
        d = np.zeros((6, 6))
        d[:3, :3] = self.lam
        d[0, 0] = d[1, 1] = d[2, 2] = self.lam + 2.0 * self.mu
        d[3, 3] = d[4, 4] = d[5, 5] = self.mu
        return np.broadcast_to(d, strain_v.shape[:-1] + (6, 6)).copy()


@dataclass(frozen=True)
class NeoHooke:
    """Isochoric Neo-Hooke a10 (Ibar1 - 3) plus volumetric bulk/2 (J - 1)^2."""

    a10: float
    bulk: float

    def __post_init__(self):
        if self.a10 <= 0 or self.bulk <= 0:
            raise ParameterError("moduli must be positive")

    def energy(self, strain_v):
        c, det = _right_cauchy_green(strain_v)
        jac = np.sqrt(det)
        i1 = np.trace(c, axis1=-2, axis2=-1)
        return self.a10 * (jac ** (-2.0 / 3.0) * i1 - 3.0) + 0.5 * self.bulk * (jac - 1.0) ** 2

    def stress(self, strain_v):
        c, det = _right_cauchy_green(strain_v)
        jac = np.sqrt(det)[..., None, None]
        ci = np.linalg.inv(c)
        i1 = np.trace(c, axis1=-2, axis2=-1)[..., None, None]
        s = 2.0 * self.a10 * jac ** (-2.0 / 3.0) * (_EYE - i1 / 3.0 * ci)
        s += self.bulk * jac * (jac - 1.0) * ci
        return stress_to_voigt(s)

    def tangent(self, strain_v):
        c, det = _right_cauchy_green(strain_v)
        jac = np.sqrt(det)
        ci = np.linalg.inv(c)
        i1 = np.trace(c, axis1=-2, axis2=-1)[..., None, None, None, None]
        jac_ = jac[..., None, None, None, None]
        eye = np.broadcast_to(_EYE, ci.shape)
        cici = _otimes(ci, ci)
        cioci = _osym(ci, ci)
        c4 = (
            4.0
            * self.a10
            * jac_ ** (-2.0 / 3.0)
            * (i1 / 9.0 * cici + i1 / 3.0 * cioci - (_otimes(eye, ci) + _otimes(ci, eye)) / 3.0)
        )
        c4 += 2.0 * self.bulk * ((jac_**2 - jac_ / 2.0) * cici - (jac_**2 - jac_) * cioci)
        return tangent_to_voigt(c4)


@dataclass(frozen=True)
class MooneyRivlin:
    """Two-term isochoric model b10 (Ibar1 - 3) + b01 (Ibar2 - 3) + bulk/2 (J - 1)^2."""

    b10: float
    b01: float
    bulk: float

    def __post_init__(self):
        if self.b10 <= 0 or self.b01 <= 0 or self.bulk <= 0:
            raise ParameterError("moduli must be positive")

    def energy(self, strain_v):
        c, det = _right_cauchy_green(strain_v)
        jac = np.sqrt(det)
        i1 = np.trace(c, axis1=-2, axis2=-1)
        i2 = 0.5 * (i1**2 - np.einsum("...ab,...ba->...", c, c))
        return (
            self.b10 * (jac ** (-2.0 / 3.0) * i1 - 3.0)
            + self.b01 * (jac ** (-4.0 / 3.0) * i2 - 3.0)
            + 0.5 * self.bulk * (jac - 1.0) ** 2
        )

    def stress(self, strain_v):
        c, det = _right_cauchy_green(strain_v)
        jac = np.sqrt(det)[..., None, None]
        ci = np.linalg.inv(c)
        i1 = np.trace(c, axis1=-2, axis2=-1)[..., None, None]
        i2 = 0.5 * (
            np.trace(c, axis1=-2, axis2=-1) ** 2 - np.einsum("...ab,...ba->...", c, c)
        )[..., None, None]
        s = 2.0 * self.b10 * jac ** (-2.0 / 3.0) * (_EYE - i1 / 3.0 * ci)
        s += 2.0 * self.b01 * jac ** (-4.0 / 3.0) * (i1 * _EYE - c - 2.0 * i2 / 3.0 * ci)
        s += self.bulk * jac * (jac - 1.0) * ci
        return stress_to_voigt(s)

    def tangent(self, strain_v):
        c, det = _right_cauchy_green(strain_v)
        jac = np.sqrt(det)
        ci = np.linalg.inv(c)
        tr_c = np.trace(c, axis1=-2, axis2=-1)
        i1 = tr_c[..., None, None, None, None]
        i2 = (0.5 * (tr_c**2 - np.einsum("...ab,...ba->...", c, c)))[
            ..., None, None, None, None
        ]
        jac_ = jac[..., None, None, None, None]
        eye = np.broadcast_to(_EYE, ci.shape)
        cici = _otimes(ci, ci)
        cioci = _osym(ci, ci)
        c4 = (
            4.0
            * self.b10
            * jac_ ** (-2.0 / 3.0)
            * (i1 / 9.0 * cici + i1 / 3.0 * cioci - (_otimes(eye, ci) + _otimes(ci, eye)) / 3.0)
        )
        c4 += (
            4.0
            * self.b01
            * jac_ ** (-4.0 / 3.0)
            * (
                _otimes(eye, eye)
                - np.broadcast_to(_EYE4_SYM, cici.shape)
                - 2.0 * i1 / 3.0 * (_otimes(eye, ci) + _otimes(ci, eye))
                + 2.0 / 3.0 * (_otimes(c, ci) + _otimes(ci, c))
                + 4.0 * i2 / 9.0 * cici
                + 2.0 * i2 / 3.0 * cioci
            )
        )
        c4 += 2.0 * self.bulk * ((jac_**2 - jac_ / 2.0) * cici - (jac_**2 - jac_) * cioci)
        return tangent_to_voigt(c4)


MaterialModel = SaintVenantKirchhoff | NeoHooke | MooneyRivlin


def energy(model: MaterialModel, strain_v: np.ndarray) -> np.ndarray:
    """Strain energy density in GPa for a Voigt strain state."""
    return model.energy(strain_v)


def stress(model: MaterialModel, strain_v: np.ndarray) -> np.ndarray:
    """PK2 stress Voigt 6-vector, the exact gradient of the energy."""
    return model.stress(strain_v)


def tangent(model: MaterialModel, strain_v: np.ndarray) -> np.ndarray:
    """Symmetric 6x6 material tangent dS/dE (engineering Voigt)."""
    return model.tangent(strain_v)
