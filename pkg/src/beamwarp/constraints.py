"""Rigid-body constraint kernels for the Lagrange-multiplier terms.

The section is fixed in space by two integral conditions on the deformed
position x: zero mean position and zero mean rotation measure,

    int_A x dA = 0,    int_A {x}_x dA = 0,

with {x}_x = (x2 x3, x1 x3, atan2(x2, x1) - atan2(X2, X1)). The angle
difference is computed in two-argument form and wrapped to (-pi, pi], which
has the same derivatives as the printed quotient form away from the origin.
This module provides {x}_x, its displacement Jacobian M (with d{x}_x =
M^T du) and the Hessian-like matrix Xi = d(M mu)/dx entering the tangent.

Everything broadcasts over leading axes.
"""

from __future__ import annotations

import numpy as np

from .errors import SingularPointError

_RADIUS_SQ_TOL = 1e-12


@np.errstate(invalid="ignore")
def _check_radius(x1, x2):
    r2 = x1 * x1 + x2 * x2
    if np.any(r2 <= _RADIUS_SQ_TOL):
        raise SingularPointError(
            "constraint kernel evaluated on the section axis (x1 = x2 = 0)"
        )
    return r2


def constraint_values(X, x):
    """Pointwise integrands (x, {x}_x) of the two fixing conditions.

    X (..., 2) is the reference position, x (..., 3) the deformed one. The
    third component of {x}_x is the in-plane rotation angle relative to the
    reference, wrapped to (-pi, pi].
    """
    X = np.asarray(X, dtype=float)
    x = np.asarray(x, dtype=float)
    _check_radius(x[..., 0], x[..., 1])
    _check_radius(X[..., 0], X[..., 1])
    angle = np.arctan2(x[..., 1], x[..., 0]) - np.arctan2(X[..., 1], X[..., 0])
    angle = np.where(angle > np.pi, angle - 2.0 * np.pi, angle)
    angle = np.where(angle <= -np.pi, angle + 2.0 * np.pi, angle)
    braced = np.stack(
        [x[..., 1] * x[..., 2], x[..., 0] * x[..., 2], angle], axis=-1
    )
    return x, braced


def constraint_jacobian(x):
    """M with d{x}_x = M^T du; rows of M^T are (0, x3, x2), (x3, 0, x1),
    (-x2/r^2, x1/r^2, 0)."""
    x = np.asarray(x, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    r2 = _check_radius(x1, x2)
    m = np.zeros(x.shape[:-1] + (3, 3))
    m[..., 0, 1] = x3
    m[..., 0, 2] = -x2 / r2
    m[..., 1, 0] = x3
    m[..., 1, 2] = x1 / r2
    m[..., 2, 0] = x2
    m[..., 2, 1] = x1
    return m


def constraint_hessian(x, mu):
    """Xi = d(M mu)/dx, the symmetric multiplier block of the tangent."""
    x = np.asarray(x, dtype=float)
    mu = np.asarray(mu, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    r2 = _check_radius(x1, x2)
    r4 = r2 * r2
    m1, m2, m3 = mu[..., 0], mu[..., 1], mu[..., 2]
    xi = np.zeros(np.broadcast_shapes(x.shape[:-1], mu.shape[:-1]) + (3, 3))
    diag = m3 * 2.0 * x1 * x2 / r4
    off = m3 * (x2 * x2 - x1 * x1) / r4
    xi[..., 0, 0] = diag
    xi[..., 1, 1] = -diag
    xi[..., 0, 1] = xi[..., 1, 0] = off
    xi[..., 0, 2] = xi[..., 2, 0] = m2
    xi[..., 1, 2] = xi[..., 2, 1] = m1
    return xi
