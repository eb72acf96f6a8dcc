"""Section kinematics: deformation gradient, Voigt strain operators, sensitivities.

The deformed position of a section point is x = X + u with X = (X1, X2, 0)
embedded in the section plane, so x3 = u3. The deformation gradient couples
the in-plane displacement gradient with the six beam strain measures:

    F = (eps + [kappa]_x x) (x) e3 + I + grad_alpha u

i.e. columns F1 = e1 + u,1, F2 = e2 + u,2, F3 = e3 + eps + kappa x x.

All operators broadcast over leading axes; assembly calls them with a whole
quadrature batch (and, for the B operators, an extra active-function axis).
Strain-measure sensitivities are indexed q = 0..5 in the order
(eps1, eps2, eps3, kappa1, kappa2, kappa3).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .material import tensor_to_strain

NUM_STRAIN_MEASURES = 6


@dataclass(frozen=True)
class StrainPrescriptors:
    """The six beam strain measures driving a section solve.

    eps = (eps1, eps2, eps3): two shear strains and the axial strain
    (dimensionless); kappa = (kappa1, kappa2, kappa3): two curvatures and the
    twist in mm^-1.
    """

    eps: np.ndarray = field(default_factory=lambda: np.zeros(3))
    kappa: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        eps = np.asarray(self.eps, dtype=float).reshape(3)
        kappa = np.asarray(self.kappa, dtype=float).reshape(3)
        if not (np.all(np.isfinite(eps)) and np.all(np.isfinite(kappa))):
            raise ValueError("strain measures must be finite")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "kappa", kappa)

    def scaled(self, theta: float) -> "StrainPrescriptors":
        return StrainPrescriptors(theta * self.eps, theta * self.kappa)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.eps, self.kappa])

    @classmethod
    def from_vector(cls, v) -> "StrainPrescriptors":
        v = np.asarray(v, dtype=float).reshape(6)
        return cls(v[:3], v[3:])


def axis_direction(q: int) -> StrainPrescriptors:
    """Unit perturbation of strain measure q (0..5, eps block first)."""
    v = np.zeros(6)
    v[q] = 1.0
    return StrainPrescriptors.from_vector(v)


def cross_matrix(v: np.ndarray) -> np.ndarray:
    """Skew matrix [v]_x with [v]_x w = v x w."""
    v = np.asarray(v, dtype=float)
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def embed_point(X: np.ndarray) -> np.ndarray:
    """Planar reference point (..., 2) -> (..., 3) with X3 = 0."""
    X = np.asarray(X, dtype=float)
    out = np.zeros(X.shape[:-1] + (3,))
    out[..., :2] = X
    return out


def deformation_gradient(X, u, grad_u, sp: StrainPrescriptors) -> np.ndarray:
    """F at a section point from the displacement, its in-plane gradient and sp.

    X (..., 2), u (..., 3), grad_u (..., 3, 2); returns (..., 3, 3).
    """
    u = np.asarray(u, dtype=float)
    grad_u = np.asarray(grad_u, dtype=float)
    x = embed_point(X) + u
    f = np.zeros(u.shape[:-1] + (3, 3))
    f[..., 0, 0] = f[..., 1, 1] = f[..., 2, 2] = 1.0
    f[..., :, :2] += grad_u
    f[..., :, 2] += sp.eps + np.cross(np.broadcast_to(sp.kappa, x.shape), x)
    return f


def green_lagrange(f: np.ndarray) -> np.ndarray:
    """Green-Lagrange strain E = (F^T F - I)/2 as engineering Voigt (..., 6)."""
    f = np.asarray(f, dtype=float)
    c = np.einsum("...ki,...kj->...ij", f, f)
    c[..., 0, 0] -= 1.0
    c[..., 1, 1] -= 1.0
    c[..., 2, 2] -= 1.0
    return tensor_to_strain(0.5 * c)


def b_operator(f, kappa, values, grads) -> np.ndarray:
    """Strain-displacement operator B_I mapping du_I to the Voigt strain variation.

    values (...,) and grads (..., 2) hold basis values/physical gradients; f
    must broadcast against them as (..., 3, 3). Returns B (..., 6, 3) with
    delta E_v = B du exactly.
    """
    f = np.asarray(f, dtype=float)
    values = np.asarray(values, dtype=float)
    grads = np.asarray(grads, dtype=float)
    f1, f2, f3 = f[..., :, 0], f[..., :, 1], f[..., :, 2]
    kx = cross_matrix(kappa)
    kf1 = np.einsum("ij,...j->...i", kx, f1)
    kf2 = np.einsum("ij,...j->...i", kx, f2)
    kf3 = np.einsum("ij,...j->...i", kx, f3)
    n = values[..., None]
    d1 = grads[..., 0, None]
    d2 = grads[..., 1, None]
    return np.stack(
        [
            d1 * f1,
            d2 * f2,
            -n * kf3,
            d2 * f1 + d1 * f2,
            d2 * f3 - n * kf2,
            d1 * f3 - n * kf1,
        ],
        axis=-2,
    )


def geometric_operator(kappa, n_i, n_j, grad_i, grad_j, stress_v) -> np.ndarray:
    """Stress-contracted derivative of B: G_IJ = sum_i dB_iI/du_J S_i.

    Scalar inputs give a single 3x3 block; broadcast-shaped inputs (e.g.
    n_i (..., a, 1) against n_j (..., 1, b)) give all pairs at once. The
    result satisfies G_IJ = G_JI^T.
    """
    n_i = np.asarray(n_i, dtype=float)
    n_j = np.asarray(n_j, dtype=float)
    grad_i = np.asarray(grad_i, dtype=float)
    grad_j = np.asarray(grad_j, dtype=float)
    stress_v = np.asarray(stress_v, dtype=float)
    kx = cross_matrix(kappa)
    kx2 = kx @ kx

    gi1, gi2 = grad_i[..., 0], grad_i[..., 1]
    gj1, gj2 = grad_j[..., 0], grad_j[..., 1]
    s1, s2, s3 = stress_v[..., 0], stress_v[..., 1], stress_v[..., 2]
    s4, s5, s6 = stress_v[..., 3], stress_v[..., 4], stress_v[..., 5]

    alpha = s1 * gi1 * gj1 + s2 * gi2 * gj2 + s4 * (gi1 * gj2 + gi2 * gj1)
    beta = -s3 * n_i * n_j
    gamma = s5 * (gi2 * n_j - gj2 * n_i) + s6 * (gi1 * n_j - gj1 * n_i)
    return (
        alpha[..., None, None] * np.eye(3)
        + beta[..., None, None] * kx2
        + gamma[..., None, None] * kx
    )


def motion_sensitivity(x, q: int) -> np.ndarray:
    """w = eps,q + [kappa,q]_x x, the prescriptor-q velocity of the fiber direction.

    x (..., 3) is the deformed position; returns (..., 3).
    """
    x = np.asarray(x, dtype=float)
    d = axis_direction(q)
    return d.eps + np.cross(np.broadcast_to(d.kappa, x.shape), x)


def strain_sensitivity(f, x, q: int) -> np.ndarray:
    """Partial derivative of the Voigt strain w.r.t. strain measure q (u frozen).

    Only the 33, 23 and 13 slots are nonzero: E3,q = F3.w, E5,q = F2.w,
    E6,q = F1.w with w = eps,q + [kappa,q]_x x.
    """
    f = np.asarray(f, dtype=float)
    w = motion_sensitivity(x, q)
    out = np.zeros(f.shape[:-2] + (6,))
    out[..., 2] = np.einsum("...i,...i->...", f[..., :, 2], w)
    out[..., 4] = np.einsum("...i,...i->...", f[..., :, 1], w)
    out[..., 5] = np.einsum("...i,...i->...", f[..., :, 0], w)
    return out


def b_operator_sensitivity(f, x, kappa, q: int, values, grads) -> np.ndarray:
    """Partial derivative of b_operator w.r.t. strain measure q (u frozen).

    Only rows 3, 5, 6 are nonzero. Shapes as in b_operator, with x
    broadcastable to the basis axes as (..., 3).
    """
    f = np.asarray(f, dtype=float)
    values = np.asarray(values, dtype=float)
    grads = np.asarray(grads, dtype=float)
    d = axis_direction(q)
    w = motion_sensitivity(x, q)
    kx = cross_matrix(kappa)
    kqx = cross_matrix(d.kappa)
    f1, f2, f3 = f[..., :, 0], f[..., :, 1], f[..., :, 2]

    n = values[..., None]
    d1 = grads[..., 0, None]
    d2 = grads[..., 1, None]
    zeros = np.zeros(np.broadcast_shapes((d1 * f1).shape, (n * w).shape))
    r3 = -n * (
        np.einsum("ij,...j->...i", kqx, f3) + np.einsum("ij,...j->...i", kx, w)
    )
    r5 = d2 * w - n * np.einsum("ij,...j->...i", kqx, f2)
    r6 = d1 * w - n * np.einsum("ij,...j->...i", kqx, f1)
    return np.stack([zeros, zeros, r3, zeros, r5, r6], axis=-2)


def partial_deformation_gradient_sensitivity(x, q: int) -> np.ndarray:
    """dF/dq at frozen warping field: only column 3 is nonzero (= w)."""
    w = motion_sensitivity(x, q)
    out = np.zeros(w.shape[:-1] + (3, 3))
    out[..., :, 2] = w
    return out


def total_deformation_gradient_sensitivity(x, u_q, grad_u_q, kappa, q: int) -> np.ndarray:
    """Total dF/dq including the warping sensitivity u,q from the adjoint solve.

    Columns: (u,q1, u,q2, eps,q + [kappa,q]_x x + [kappa]_x u,q). The partial
    derivative used for residual sensitivities is recovered with u_q = 0.
    """
    u_q = np.asarray(u_q, dtype=float)
    grad_u_q = np.asarray(grad_u_q, dtype=float)
    out = partial_deformation_gradient_sensitivity(x, q)
    out[..., :, :2] += grad_u_q
    out[..., :, 2] += np.cross(np.broadcast_to(kappa, u_q.shape), u_q)
    return out
