"""Global residual, tangent and sensitivity assembly for the Voigt formulation.

The unknown vector U_hat = (U, lambda, mu) stacks 3 displacement components
per control point followed by the six Lagrange multipliers, so the system
dimension is 3(n + 2). The residual blocks are

    f^u_I = int_A B_I^T S + (lambda + M mu) N_I dA,
    f^lam = int_A x dA,
    f^mu  = int_A {x}_x dA,

and the tangent couples K^uu = int B_I^T D B_J + G_IJ + N_I Xi N_J dA with
dense multiplier borders K^ulam = int N_I I dA and K^umu = int N_I M dA
(transposes mirrored exactly, zero multiplier-multiplier block).

All quadrature-point work is vectorized over the precomputed
SectionQuadrature table; assembly order is fixed, so results are
deterministic bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import constraints, kinematics, material
from .errors import InvertedStateError
from .kinematics import StrainPrescriptors
from .splines import SectionQuadrature

_MIN_DET_F = 1e-9


def state_size(num_basis: int) -> int:
    """Dimension 3(n + 2) of the coupled unknown vector."""
    return 3 * num_basis + 6


def zero_state(num_basis: int) -> np.ndarray:
    return np.zeros(state_size(num_basis))


def split_state(u_hat: np.ndarray, num_basis: int):
    """U_hat -> (U (n, 3), lambda (3,), mu (3,))."""
    u_hat = np.asarray(u_hat, dtype=float)
    if u_hat.shape != (state_size(num_basis),):
        raise ValueError(
            f"state vector has length {u_hat.shape}, expected {state_size(num_basis)}"
        )
    n3 = 3 * num_basis
    return u_hat[:n3].reshape(num_basis, 3), u_hat[n3: n3 + 3], u_hat[n3 + 3:]


def join_state(displacements, lam, mu) -> np.ndarray:
    return np.concatenate(
        [np.asarray(displacements, dtype=float).ravel(), lam, mu]
    )


@dataclass(frozen=True)
class PointFields:
    """Deformation state evaluated at every quadrature point of the section."""

    u: np.ndarray        # (nq, 3)
    grad_u: np.ndarray   # (nq, 3, 2)
    x: np.ndarray        # (nq, 3) deformed position
    f: np.ndarray        # (nq, 3, 3) deformation gradient
    det_f: np.ndarray    # (nq,)
    strain: np.ndarray   # (nq, 6) Voigt Green-Lagrange


def point_fields(quad: SectionQuadrature, sp_: StrainPrescriptors, displacements) -> PointFields:
    """Interpolate u, grad u and form F, det F, E at all quadrature points.

    Raises InvertedStateError (with the physical location) if det F is not
    positive everywhere.
    """
    u_active = displacements[quad.indices]            # (nq, nact, 3)
    u = np.einsum("qa,qai->qi", quad.values, u_active)
    grad_u = np.einsum("qai,qab->qib", u_active, quad.grads)
    f = kinematics.deformation_gradient(quad.points, u, grad_u, sp_)
    det_f = np.linalg.det(f)
    if np.any(det_f <= _MIN_DET_F):
        bad = int(np.argmin(det_f))
        raise InvertedStateError(
            f"det F = {det_f[bad]:.3e} at section point "
            f"({quad.points[bad, 0]:.4f}, {quad.points[bad, 1]:.4f}) mm",
            point=quad.points[bad].copy(),
        )
    x = kinematics.embed_point(quad.points) + u
    return PointFields(u=u, grad_u=grad_u, x=x, f=f, det_f=det_f,
                       strain=kinematics.green_lagrange(f))


def gather_residual(quad: SectionQuadrature, pf: PointFields, lam, mu, f_u_material):
    """Assemble the global residual from a formulation's material force density.

    f_u_material (nq, nact, 3) is the per-point contribution B_I^T S (or its
    PK1 counterpart) without the area weight; the Lagrange-multiplier body
    force and the two constraint rows are formulation independent and added
    here.
    """
    n = quad.num_basis
    m_mat = constraints.constraint_jacobian(pf.x)            # (nq, 3, 3)
    body = lam + np.einsum("qmk,k->qm", m_mat, mu)           # (nq, 3)
    f_u = f_u_material + quad.values[:, :, None] * body[:, None, :]
    f_u *= quad.area[:, None, None]

    residual = np.zeros(state_size(n))
    np.add.at(residual[: 3 * n].reshape(n, 3), quad.indices, f_u)
    _, braced = constraints.constraint_values(quad.points, pf.x)
    residual[3 * n: 3 * n + 3] = quad.area @ pf.x
    residual[3 * n + 3:] = quad.area @ braced
    return residual


def _scatter_indices(quad: SectionQuadrature) -> dict:
    """Flat row-major scatter targets of all tangent entries; cached per table."""
    cached = getattr(quad, "_tangent_scatter", None)
    if cached is not None:
        return cached
    n = quad.num_basis
    size = state_size(n)
    nq, nact = quad.values.shape
    comp = np.arange(3)
    rows_uu = 3 * quad.indices[:, :, None, None, None] + comp[None, None, None, :, None]
    cols_uu = 3 * quad.indices[:, None, :, None, None] + comp[None, None, None, None, :]
    shape = (nq, nact, nact, 3, 3)
    flat_uu = (
        np.broadcast_to(rows_uu, shape).astype(np.int64) * size
        + np.broadcast_to(cols_uu, shape)
    ).ravel()

    idx = np.arange(n)
    rows_ul = (3 * idx[:, None] + comp[None, :]).ravel()
    cols_ul = np.tile(3 * n + comp, n)
    rows_um = np.broadcast_to(3 * idx[:, None, None] + comp[None, :, None], (n, 3, 3)).ravel()
    cols_um = np.broadcast_to(3 * n + 3 + comp[None, None, :], (n, 3, 3)).ravel()
    cached = {
        "size": size,
        "uu": flat_uu,
        "ul": rows_ul * size + cols_ul,
        "lu": cols_ul * size + rows_ul,
        "um": rows_um * size + cols_um,
        "mu": cols_um * size + rows_um,
    }
    object.__setattr__(quad, "_tangent_scatter", cached)
    return cached


def gather_tangent(quad: SectionQuadrature, pf: PointFields, mu, k_uu_blocks):
    """Assemble the sparse K_hat from a formulation's displacement blocks.

    k_uu_blocks (nq, nact, nact, 3, 3) must hold the material + geometric
    contributions without area weighting; the multiplier Hessian N_I Xi N_J
    and the dense borders are shared between formulations.
    """
    n = quad.num_basis
    xi = constraints.constraint_hessian(pf.x, mu)
    blocks = k_uu_blocks + np.einsum("qa,qb,qmn->qabmn", quad.values, quad.values, xi)
    blocks *= quad.area[:, None, None, None, None]

    # multiplier borders: int N_I dA and int N_I M dA
    n_int = np.zeros(n)
    np.add.at(n_int, quad.indices, quad.values * quad.area[:, None])
    m_mat = constraints.constraint_jacobian(pf.x)
    m_int = np.zeros((n, 3, 3))
    np.add.at(
        m_int,
        quad.indices,
        quad.values[:, :, None, None] * (m_mat * quad.area[:, None, None])[:, None],
    )

    scatter = _scatter_indices(quad)
    size = scatter["size"]
    dense = np.bincount(scatter["uu"], weights=blocks.ravel(), minlength=size * size)
    vals_ul = np.repeat(n_int, 3)
    np.add.at(dense, scatter["ul"], vals_ul)
    np.add.at(dense, scatter["lu"], vals_ul)
    np.add.at(dense, scatter["um"], m_int.ravel())
    np.add.at(dense, scatter["mu"], m_int.ravel())
    return sp.csc_matrix(dense.reshape(size, size))


def assemble_residual(
    quad: SectionQuadrature,
    model: material.MaterialModel,
    sp_: StrainPrescriptors,
    u_hat: np.ndarray,
    fields: PointFields | None = None,
) -> np.ndarray:
    """Global residual F_hat = (f^u, f^lam, f^mu) as a dense vector."""
    n = quad.num_basis
    displacements, lam, mu = split_state(u_hat, n)
    pf = fields if fields is not None else point_fields(quad, sp_, displacements)

    stress_v = model.stress(pf.strain)                       # (nq, 6)
    b = kinematics.b_operator(
        pf.f[:, None], sp_.kappa, quad.values, quad.grads
    )                                                        # (nq, nact, 6, 3)
    f_u = np.einsum("qaim,qi->qam", b, stress_v)
    return gather_residual(quad, pf, lam, mu, f_u)


def assemble_tangent(
    quad: SectionQuadrature,
    model: material.MaterialModel,
    sp_: StrainPrescriptors,
    u_hat: np.ndarray,
    fields: PointFields | None = None,
) -> sp.csc_matrix:
    """Sparse symmetric tangent K_hat in arrowhead layout (dense multiplier border)."""
    n = quad.num_basis
    displacements, lam, mu = split_state(u_hat, n)
    pf = fields if fields is not None else point_fields(quad, sp_, displacements)

    stress_v = model.stress(pf.strain)
    d_mat = model.tangent(pf.strain)
    b = kinematics.b_operator(pf.f[:, None], sp_.kappa, quad.values, quad.grads)

    blocks = np.einsum("qaim,qij,qbjn->qabmn", b, d_mat, b, optimize=True)
    blocks += kinematics.geometric_operator(
        sp_.kappa,
        quad.values[:, :, None],
        quad.values[:, None, :],
        quad.grads[:, :, None, :],
        quad.grads[:, None, :, :],
        stress_v[:, None, None, :],
    )
    return gather_tangent(quad, pf, mu, blocks)


def assemble_sensitivity_rhs(
    quad: SectionQuadrature,
    model: material.MaterialModel,
    sp_: StrainPrescriptors,
    u_hat: np.ndarray,
    q: int,
    fields: PointFields | None = None,
) -> np.ndarray:
    """Partial derivative of the residual w.r.t. strain measure q (state frozen).

    f^u_{I,q} = int_A B_I^T D E,q + B_{I,q}^T S dA; the multiplier blocks are
    exactly zero. D E,q realizes the 2 dS/dC factor acting on the
    engineering-Voigt strain sensitivity, since C = 2E + I.
    """
    n = quad.num_basis
    displacements, _, _ = split_state(u_hat, n)
    pf = fields if fields is not None else point_fields(quad, sp_, displacements)

    stress_v = model.stress(pf.strain)
    d_mat = model.tangent(pf.strain)
    strain_q = kinematics.strain_sensitivity(pf.f, pf.x, q)   # (nq, 6)
    ds = np.einsum("qij,qj->qi", d_mat, strain_q)

    b = kinematics.b_operator(pf.f[:, None], sp_.kappa, quad.values, quad.grads)
    b_q = kinematics.b_operator_sensitivity(
        pf.f[:, None], pf.x[:, None], sp_.kappa, q, quad.values, quad.grads
    )
    f_u = np.einsum("qaim,qi->qam", b, ds) + np.einsum("qaim,qi->qam", b_q, stress_v)
    f_u *= quad.area[:, None, None]

    rhs = np.zeros(state_size(n))
    np.add.at(rhs[: 3 * n].reshape(n, 3), quad.indices, f_u)
    return rhs
