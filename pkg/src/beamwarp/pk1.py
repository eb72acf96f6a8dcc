"""Reference formulation built on the first Piola-Kirchhoff stress tensor.

This path assembles the residual and tangent from P = F S and the full
rank-4 tangent A = dP/dF instead of the Voigt machinery:

    f^u_I = int_A N_{I,1} P_1 + N_{I,2} P_2 - N_I [kappa]_x P_3
            + (lambda + M mu) N_I dA,

with the constraint blocks shared with the production assembly. Both
formulations are algebraically identical; agreement of F_hat and K_hat to
machine precision at arbitrary states is the central verification check of
the package. The rank-4 route is intentionally unoptimized.
"""

from __future__ import annotations

import numpy as np

from . import assembly, kinematics, material
from .kinematics import StrainPrescriptors
from .splines import SectionQuadrature


def pk1_stress(model: material.MaterialModel, f: np.ndarray) -> np.ndarray:
    """First Piola-Kirchhoff stress P = F S(E(F)), shape (..., 3, 3) in GPa."""
    f = np.asarray(f, dtype=float)
    s = material.voigt_to_stress(model.stress(kinematics.green_lagrange(f)))
    return f @ s


def pk1_tangent(model: material.MaterialModel, f: np.ndarray) -> np.ndarray:
    """Rank-4 tangent A_iJkL = dP_iJ/dF_kL = d_ik S_JL + F_iA C_AJBL F_kB.

    C = 2 dS/dC is the material tangent in tensor form; the result has major
    symmetry A_iJkL = A_kLiJ.
    """
    f = np.asarray(f, dtype=float)
    strain = kinematics.green_lagrange(f)
    s = material.voigt_to_stress(model.stress(strain))
    c4 = material.voigt_to_tangent(model.tangent(strain))
    eye = np.eye(3)
    geo = np.einsum("ik,...JL->...iJkL", eye, s)
    mat = np.einsum("...iA,...AJBL,...kB->...iJkL", f, c4, f, optimize=True)
    return geo + mat


def contract_tangent(a4: np.ndarray, df: np.ndarray) -> np.ndarray:
    """Directional derivative of P: (A : dF)_iJ = A_iJkL dF_kL."""
    return np.einsum("...icjd,...jd->...ic", a4, df)


def _gradient_operator(kappa, values, grads):
    """T with dF_{ic} = T[..., i, c, m] du_m for each active function."""
    nq, nact = values.shape
    t = np.zeros((nq, nact, 3, 3, 3))
    eye = np.eye(3)
    t[..., 0, :] = grads[..., 0][..., None, None] * eye
    t[..., 1, :] = grads[..., 1][..., None, None] * eye
    t[..., 2, :] = values[..., None, None] * kinematics.cross_matrix(kappa)
    return t


def assemble_residual(
    quad: SectionQuadrature,
    model: material.MaterialModel,
    sp_: StrainPrescriptors,
    u_hat: np.ndarray,
    fields: assembly.PointFields | None = None,
) -> np.ndarray:
    n = quad.num_basis
    displacements, lam, mu = assembly.split_state(u_hat, n)
    pf = fields if fields is not None else assembly.point_fields(quad, sp_, displacements)

    p = pk1_stress(model, pf.f)
    t = _gradient_operator(sp_.kappa, quad.values, quad.grads)
    f_u = np.einsum("qaicm,qic->qam", t, p, optimize=True)
    return assembly.gather_residual(quad, pf, lam, mu, f_u)


def assemble_tangent(
    quad: SectionQuadrature,
    model: material.MaterialModel,
    sp_: StrainPrescriptors,
    u_hat: np.ndarray,
    fields: assembly.PointFields | None = None,
):
    n = quad.num_basis
    displacements, _, mu = assembly.split_state(u_hat, n)
    pf = fields if fields is not None else assembly.point_fields(quad, sp_, displacements)

    a4 = pk1_tangent(model, pf.f)
    t = _gradient_operator(sp_.kappa, quad.values, quad.grads)
    blocks = np.einsum("qaicm,qicjd,qbjdn->qabmn", t, a4, t, optimize=True)
    return assembly.gather_tangent(quad, pf, mu, blocks)


def assemble_pk1(
    quad: SectionQuadrature,
    model: material.MaterialModel,
    sp_: StrainPrescriptors,
    u_hat: np.ndarray,
):
    """Residual and tangent of the reference formulation in one call."""
    displacements, _, _ = assembly.split_state(u_hat, quad.num_basis)
    pf = assembly.point_fields(quad, sp_, displacements)
    return (
        assemble_residual(quad, model, sp_, u_hat, fields=pf),
        assemble_tangent(quad, model, sp_, u_hat, fields=pf),
    )


def assemble_sensitivity_rhs(
    quad: SectionQuadrature,
    model: material.MaterialModel,
    sp_: StrainPrescriptors,
    u_hat: np.ndarray,
    q: int,
    fields: assembly.PointFields | None = None,
) -> np.ndarray:
    """Partial residual derivative w.r.t. strain measure q on the PK1 side.

    dP = A : dF/dq with the frozen-warping dF/dq; the explicit kappa
    dependence of the test-function gradient adds -N_I [kappa,q]_x P_3.
    """
    n = quad.num_basis
    displacements, _, _ = assembly.split_state(u_hat, n)
    pf = fields if fields is not None else assembly.point_fields(quad, sp_, displacements)

    p = pk1_stress(model, pf.f)
    a4 = pk1_tangent(model, pf.f)
    df = kinematics.partial_deformation_gradient_sensitivity(pf.x, q)
    dp = contract_tangent(a4, df)

    t = _gradient_operator(sp_.kappa, quad.values, quad.grads)
    f_u = np.einsum("qaicm,qic->qam", t, dp, optimize=True)
    # explicit kappa dependence of the third test-gradient column:
    # + N_I [kappa,q]_x^T P_3 = - N_I [kappa,q]_x P_3
    kqx = kinematics.cross_matrix(kinematics.axis_direction(q).kappa)
    f_u += quad.values[..., None] * np.einsum(
        "im,qi->qm", kqx, p[:, :, 2]
    )[:, None, :]
    f_u *= quad.area[:, None, None]

    rhs = np.zeros(assembly.state_size(n))
    np.add.at(rhs[: 3 * n].reshape(n, 3), quad.indices, f_u)
    return rhs
