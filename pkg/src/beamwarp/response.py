"""Post-processing: stress resultants, beam energy, beam stiffness, fields.

The resultants integrate the traction T = P e3 of the converged state,

    n = int_A T dA,    m = int_A x cross T dA,

in kN and kN mm. The 6x6 beam stiffness is the derivative of (n, m) with
respect to the six strain measures; it needs the warping sensitivities u,q,
which come from six adjoint solves against the retained tangent
factorization:

    K_hat Y = -F_hat,q,   then
    C_pq = int_A (A : F,q) e3 . (eps,p + [kappa,p]_x x)
           + (P e3) . ([kappa,p]_x u,q) dA,

where F,q is the TOTAL derivative (it carries the u,q terms, unlike the
partial derivative in the adjoint right-hand side). On the production path
the contraction A : F,q is expanded on the PK2 side as
F,q S + F (D : sym(F^T F,q)) so no rank-4 tensor is ever formed; solutions
of the reference formulation use the materialized rank-4 tangent instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import assembly, kinematics, material, pk1
from .solver import Solution
from .splines import eval_basis


@dataclass(frozen=True)
class BeamResponse:
    """Stress resultants, tangent beam stiffness and energy per unit length.

    n in kN, m in kN mm, stiffness blocks in kN / kN mm / kN mm^2, energy in
    kN (= GPa mm^2).
    """

    n: np.ndarray
    m: np.ndarray
    stiffness: np.ndarray
    energy: float


@dataclass(frozen=True)
class FieldSample:
    """Solution fields on a regular parametric grid (row-major, grid_shape)."""

    grid_shape: tuple[int, int]
    points_param: np.ndarray  # (npts, 2)
    points: np.ndarray        # (npts, 2) physical, mm
    displacement: np.ndarray  # (npts, 3) mm
    von_mises: np.ndarray     # (npts,) GPa
    det_f: np.ndarray         # (npts,)


def _converged_fields(sol: Solution) -> assembly.PointFields:
    return assembly.point_fields(sol.quad, sol.prescriptors, sol.displacements())


def _traction(sol: Solution, pf: assembly.PointFields):
    """P e3 at every quadrature point."""
    s = material.voigt_to_stress(sol.material.stress(pf.strain))
    p = pf.f @ s
    return p, p[:, :, 2]


def stress_resultants(sol: Solution) -> tuple[np.ndarray, np.ndarray]:
    """Section forces n (kN) and moments m (kN mm) about the section origin."""
    pf = _converged_fields(sol)
    _, t = _traction(sol, pf)
    area = sol.quad.area
    n = area @ t
    m = area @ np.cross(pf.x, t)
    return n, m


def beam_energy(sol: Solution) -> float:
    """Strain energy per unit beam length (kN) of the converged state."""
    pf = _converged_fields(sol)
    return float(sol.quad.area @ sol.material.energy(pf.strain))


def _lever_arms(x: np.ndarray) -> np.ndarray:
    """w_p = eps,p + [kappa,p]_x x for all six strain measures, (6, nq, 3)."""
    out = np.empty((6,) + x.shape)
    for p in range(6):
        out[p] = kinematics.motion_sensitivity(x, p)
    return out


def beam_stiffness(sol: Solution) -> np.ndarray:
    """6x6 tangent stiffness of the beam via six adjoint sensitivity solves."""
    quad = sol.quad
    n_basis = quad.num_basis
    pf = _converged_fields(sol)
    p_stress, t3 = _traction(sol, pf)
    kappa = sol.prescriptors.kappa

    if sol.formulation == "pk1":
        a4 = pk1.pk1_tangent(sol.material, pf.f)
        rhs_fn = pk1.assemble_sensitivity_rhs
    else:
        d_mat = sol.material.tangent(pf.strain)
        s_tensor = material.voigt_to_stress(sol.material.stress(pf.strain))
        rhs_fn = assembly.assemble_sensitivity_rhs

    arms = _lever_arms(pf.x)
    area = quad.area
    stiffness = np.empty((6, 6))
    for q in range(6):
        rhs = rhs_fn(quad, sol.material, sol.prescriptors, sol.u_hat, q, fields=pf)
        y = sol.factorization.solve(-rhs)
        u_q_ctrl = y[: 3 * n_basis].reshape(n_basis, 3)
        active = u_q_ctrl[quad.indices]                      # (nq, nact, 3)
        u_q = np.einsum("qa,qai->qi", quad.values, active)
        grad_u_q = np.einsum("qai,qab->qib", active, quad.grads)
        f_q = kinematics.total_deformation_gradient_sensitivity(
            pf.x, u_q, grad_u_q, kappa, q
        )
        if sol.formulation == "pk1":
            dp = pk1.contract_tangent(a4, f_q)
        else:
            sym = np.einsum("qki,qkj->qij", pf.f, f_q)
            strain_rate = material.tensor_to_strain(0.5 * (sym + sym.transpose(0, 2, 1)))
            ds = material.voigt_to_stress(np.einsum("qij,qj->qi", d_mat, strain_rate))
            dp = f_q @ s_tensor + pf.f @ ds
        dt3 = dp[:, :, 2]
        for p in range(6):
            integrand = np.einsum("qi,qi->q", dt3, arms[p])
            if p >= 3:
                axis = np.zeros(3)
                axis[p - 3] = 1.0
                integrand += np.einsum(
                    "qi,qi->q", t3, np.cross(np.broadcast_to(axis, u_q.shape), u_q)
                )
            stiffness[p, q] = area @ integrand
    return stiffness


def beam_response(sol: Solution) -> BeamResponse:
    """Resultants, stiffness and energy of a converged solution in one pass."""
    n, m = stress_resultants(sol)
    return BeamResponse(
        n=n, m=m, stiffness=beam_stiffness(sol), energy=beam_energy(sol)
    )


def sample_fields(sol: Solution, grid_resolution: int = 40) -> FieldSample:
    """Evaluate u, von Mises stress and det F on a midpoint parametric grid.

    Midpoints (i + 1/2)/res keep the grid clear of degenerate patch corners
    and make it mirror-symmetric for symmetric sections.
    """
    res = int(grid_resolution)
    if res < 1:
        raise ValueError("grid resolution must be >= 1")
    ticks = (np.arange(res) + 0.5) / res
    disp_ctrl = sol.displacements()

    pts_param = np.empty((res * res, 2))
    pts = np.empty((res * res, 2))
    disp = np.empty((res * res, 3))
    det_f = np.empty(res * res)
    vm = np.empty(res * res)
    sp_ = sol.prescriptors
    k = 0
    for xi in ticks:
        for eta in ticks:
            b = eval_basis(sol.patch, xi, eta)
            u = b.values @ disp_ctrl[b.indices]
            grad_u = disp_ctrl[b.indices].T @ b.grad_phys
            f = kinematics.deformation_gradient(b.point, u, grad_u, sp_)
            j = np.linalg.det(f)
            s = material.voigt_to_stress(
                sol.material.stress(kinematics.green_lagrange(f))
            )
            sigma = f @ s @ f.T / j
            dev = sigma - np.trace(sigma) / 3.0 * np.eye(3)
            pts_param[k] = (xi, eta)
            pts[k] = b.point
            disp[k] = u
            det_f[k] = j
            vm[k] = np.sqrt(1.5 * np.sum(dev * dev))
            k += 1
    return FieldSample(
        grid_shape=(res, res),
        points_param=pts_param,
        points=pts,
        displacement=disp,
        von_mises=vm,
        det_f=det_f,
    )
