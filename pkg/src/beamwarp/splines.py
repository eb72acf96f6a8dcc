"""Open-knot B-spline/NURBS patches for beam cross-sections.

Provides knot vectors, bivariate (rational) basis evaluation with physical
gradients, the built-in section geometries (square, rectangle, circle), and
per-element Gauss-Legendre quadrature including a precomputed quadrature
table that assembly reuses across Newton iterations.

Conventions: parametric domain [0, 1]^2, geometry in mm, control grid indexed
as (i_xi, i_eta) with flat basis index I = i_xi * n_eta + i_eta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, ParameterError

JACOBIAN_TOL = 1e-12
ORIGIN_CLEARANCE = 1e-6  # constraint kernels divide by x1^2 + x2^2


def open_knot_vector(p: int, n_el: int) -> "KnotVector":
    """Clamped knot vector on [0, 1] with ``n_el`` uniform interior spans.

    The resulting basis has ``p + n_el`` functions.
    """
    if p < 1:
        raise ParameterError(f"degree must be >= 1, got {p}")
    if n_el < 1:
        raise ParameterError(f"element count must be >= 1, got {n_el}")
    interior = np.arange(1, n_el) / n_el
    knots = np.concatenate([np.zeros(p + 1), interior, np.ones(p + 1)])
    return KnotVector(p, knots)


@dataclass(frozen=True)
class KnotVector:
    """Degree and non-decreasing knot sequence of a clamped 1D basis."""

    degree: int
    knots: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "knots", np.asarray(self.knots, dtype=float))
        p, t = self.degree, self.knots
        if p < 1:
            raise ParameterError(f"degree must be >= 1, got {p}")
        if np.any(np.diff(t) < 0):
            raise ParameterError("knots must be non-decreasing")
        if len(t) < 2 * (p + 1):
            raise ParameterError("too few knots for a clamped basis")
        if np.any(t[: p + 1] != t[0]) or np.any(t[-(p + 1):] != t[-1]):
            raise ParameterError("knot vector is not clamped (open)")

    @property
    def num_basis(self) -> int:
        return len(self.knots) - self.degree - 1

    @property
    def breakpoints(self) -> np.ndarray:
        """Distinct knot values (element boundaries)."""
        return np.unique(self.knots)

    @property
    def num_elements(self) -> int:
        return len(self.breakpoints) - 1

    def greville(self) -> np.ndarray:
        """Greville abscissae; control points placed there reproduce affine maps."""
        p, t = self.degree, self.knots
        return np.array([t[i + 1: i + p + 1].mean() for i in range(self.num_basis)])

    def find_span(self, u: float) -> int:
        p, t = self.degree, self.knots
        n = self.num_basis
        if u >= t[n]:
            return n - 1
        if u <= t[p]:
            return p
        lo, hi = p, n
        mid = (lo + hi) // 2
        while u < t[mid] or u >= t[mid + 1]:
            if u < t[mid]:
                hi = mid
            else:
                lo = mid
            mid = (lo + hi) // 2
        return mid

    def basis_and_derivative(self, u: float) -> tuple[int, np.ndarray, np.ndarray]:
        """Values and first derivatives of the p+1 basis functions active at u.

        Returns (span, N, dN) with N, dN of length degree+1; the active global
        indices are span-degree ... span.
        """
        span = self.find_span(u)
        ders = _ders_basis_funs(self.knots, self.degree, span, u, 1)
        return span, ders[0], ders[1]


def _ders_basis_funs(knots, p, span, u, nd):
    """Cox-de Boor triangular scheme with derivative recursion (up to order nd)."""
    ndu = np.empty((p + 1, p + 1))
    left = np.empty(p + 1)
    right = np.empty(p + 1)
    ndu[0, 0] = 1.0
    for j in range(1, p + 1):
        left[j] = u - knots[span + 1 - j]
        right[j] = knots[span + j] - u
        saved = 0.0
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved

    ders = np.zeros((nd + 1, p + 1))
    ders[0] = ndu[:, p]
    a = np.zeros((2, p + 1))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[0, 0] = 1.0
        for k in range(1, nd + 1):
            d = 0.0
            rk = r - k
            pk = p - k
            if r >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                d = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                d += a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, r]
                d += a[s2, k] * ndu[r, pk]
            ders[k, r] = d
            s1, s2 = s2, s1
    factor = float(p)
    for k in range(1, nd + 1):
        ders[k] *= factor
        factor *= p - k
    return ders


@dataclass(frozen=True)
class Patch:
    """Tensor-product (rational) spline patch of a planar cross-section.

    control_points has shape (n_xi, n_eta, 2) in mm; weights (n_xi, n_eta),
    all 1.0 for polynomial B-spline patches.
    """

    kv_xi: KnotVector
    kv_eta: KnotVector
    control_points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        cp = np.asarray(self.control_points, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        n1, n2 = self.kv_xi.num_basis, self.kv_eta.num_basis
        if cp.shape != (n1, n2, 2):
            raise ParameterError(
                f"control point grid {cp.shape} does not match basis ({n1}, {n2}, 2)"
            )
        if w.shape != (n1, n2):
            raise ParameterError(f"weight grid {w.shape} does not match basis ({n1}, {n2})")
        if np.any(w <= 0):
            raise ParameterError("weights must be positive")
        object.__setattr__(self, "control_points", cp)
        object.__setattr__(self, "weights", w)

    @property
    def num_basis(self) -> int:
        return self.kv_xi.num_basis * self.kv_eta.num_basis

    @property
    def is_rational(self) -> bool:
        return bool(np.any(self.weights != 1.0))


@dataclass(frozen=True)
class BasisEval:
    """Active basis data at one parametric point.

    indices are flat global basis indices; grad_phys holds physical gradients
    in mm^-1; area_weight is det(J) times the parametric quadrature weight
    (the area measure dA in mm^2; equals det(J) for a bare evaluation).
    """

    indices: np.ndarray
    values: np.ndarray
    grad_param: np.ndarray
    grad_phys: np.ndarray
    point: np.ndarray
    area_weight: float


def eval_basis(patch: Patch, xi: float, eta: float, quad_weight: float = 1.0) -> BasisEval:
    """Evaluate the rationalized basis, physical gradients and geometry at (xi, eta).

    Raises GeometryError if the geometry Jacobian is singular
    (|det J| < 1e-12).
    """
    kv1, kv2 = patch.kv_xi, patch.kv_eta
    span1, n1, d1 = kv1.basis_and_derivative(xi)
    span2, n2, d2 = kv2.basis_and_derivative(eta)
    i1 = np.arange(span1 - kv1.degree, span1 + 1)
    i2 = np.arange(span2 - kv2.degree, span2 + 1)

    w = patch.weights[np.ix_(i1, i2)]
    num = np.outer(n1, n2) * w
    num_x = np.outer(d1, n2) * w
    num_e = np.outer(n1, d2) * w
    wsum = num.sum()
    values = num / wsum
    grad_x = (num_x - values * num_x.sum()) / wsum
    grad_e = (num_e - values * num_e.sum()) / wsum

    pts = patch.control_points[np.ix_(i1, i2)]
    point = np.einsum("ab,abk->k", values, pts)
    jac = np.empty((2, 2))
    jac[:, 0] = np.einsum("ab,abk->k", grad_x, pts)
    jac[:, 1] = np.einsum("ab,abk->k", grad_e, pts)
    det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    if abs(det) < JACOBIAN_TOL:
        raise GeometryError(f"singular geometry Jacobian at (xi, eta) = ({xi}, {eta})")

    grad_param = np.stack([grad_x.ravel(), grad_e.ravel()], axis=1)
    # chain rule: physical gradient = J^{-T} parametric gradient
    inv_t = np.array([[jac[1, 1], -jac[1, 0]], [-jac[0, 1], jac[0, 0]]]) / det
    grad_phys = grad_param @ inv_t.T

    indices = (i1[:, None] * kv2.num_basis + i2[None, :]).ravel()
    return BasisEval(
        indices=indices,
        values=values.ravel(),
        grad_param=grad_param,
        grad_phys=grad_phys,
        point=point,
        area_weight=det * quad_weight,
    )


@dataclass(frozen=True)
class QuadratureRule:
    """Tensor-product Gauss-Legendre points over all elements of a patch.

    points are parametric (nq, 2); weights carry the span scaling so that
    summing weights gives the parametric area (= 1 for the full patch).
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise ParameterError("quadrature weights must be positive")


def _gauss_on_spans(kv: KnotVector, g: int):
    """Gauss points/weights per direction, mapped to each nonempty knot span."""
    ref_x, ref_w = np.polynomial.legendre.leggauss(g)
    bp = kv.breakpoints
    pts, wts = [], []
    for a, b in zip(bp[:-1], bp[1:]):
        h = 0.5 * (b - a)
        pts.append(a + h * (ref_x + 1.0))
        wts.append(h * ref_w)
    return np.concatenate(pts), np.concatenate(wts)


def quadrature_rule(patch: Patch, points_per_direction: int | None = None) -> QuadratureRule:
    """Per-element Gauss rule; default g = p + 1 points per direction."""
    g1 = points_per_direction or patch.kv_xi.degree + 1
    g2 = points_per_direction or patch.kv_eta.degree + 1
    if g1 < patch.kv_xi.degree + 1 or g2 < patch.kv_eta.degree + 1:
        raise ParameterError("need at least p + 1 quadrature points per direction")
    x1, w1 = _gauss_on_spans(patch.kv_xi, g1)
    x2, w2 = _gauss_on_spans(patch.kv_eta, g2)
    pts = np.stack(
        [np.repeat(x1, len(x2)), np.tile(x2, len(x1))], axis=1
    )
    wts = np.outer(w1, w2).ravel()
    return QuadratureRule(pts, wts)


@dataclass(frozen=True)
class SectionQuadrature:
    """Precomputed basis data at every quadrature point of a patch.

    Built once per patch and shared by all residual/tangent/sensitivity
    assemblies; every array is read-only by convention.
    """

    patch: Patch
    points_param: np.ndarray  # (nq, 2)
    indices: np.ndarray       # (nq, nact) flat basis indices
    values: np.ndarray        # (nq, nact)
    grads: np.ndarray         # (nq, nact, 2) physical gradients
    points: np.ndarray        # (nq, 2) physical coordinates
    area: np.ndarray          # (nq,) dA = det J * quadrature weight

    @classmethod
    def from_patch(cls, patch: Patch, points_per_direction: int | None = None):
        rule = quadrature_rule(patch, points_per_direction)
        evals = [
            eval_basis(patch, x, e, w)
            for (x, e), w in zip(rule.points, rule.weights)
        ]
        return cls(
            patch=patch,
            points_param=rule.points,
            indices=np.stack([b.indices for b in evals]),
            values=np.stack([b.values for b in evals]),
            grads=np.stack([b.grad_phys for b in evals]),
            points=np.stack([b.point for b in evals]),
            area=np.array([b.area_weight for b in evals]),
        )

    @property
    def num_basis(self) -> int:
        return self.patch.num_basis

    @property
    def num_points(self) -> int:
        return len(self.area)


def validate_patch(patch: Patch) -> None:
    """Sweep the default quadrature rule and enforce the patch invariants.

    Checks det J > 0 everywhere and that no quadrature point falls within
    ORIGIN_CLEARANCE of the section origin (the constraint kernels are
    singular there).
    """
    quad = SectionQuadrature.from_patch(patch)
    if np.any(quad.area <= 0):
        raise GeometryError("geometry Jacobian is not positive at all quadrature points")
    r = np.hypot(quad.points[:, 0], quad.points[:, 1])
    if r.min() < ORIGIN_CLEARANCE:
        raise GeometryError(
            "a quadrature point lies within "
            f"{ORIGIN_CLEARANCE} mm of the section origin; "
            "choose a different degree/element combination"
        )


def rectangle_patch(a: float, b: float, p: int, n_el: int) -> Patch:
    """Polynomial patch of the rectangle |X1| < a, |X2| < b (half-widths in mm).

    The geometry map is affine (control points at the Greville abscissae), so
    the Jacobian is constant and the area is exactly 4ab.
    """
    if a <= 0 or b <= 0:
        raise ParameterError("rectangle half-widths must be positive")
    kv1 = open_knot_vector(p, n_el)
    kv2 = open_knot_vector(p, n_el)
    g1 = 2.0 * a * kv1.greville() - a
    g2 = 2.0 * b * kv2.greville() - b
    cp = np.stack(np.meshgrid(g1, g2, indexing="ij"), axis=-1)
    patch = Patch(kv1, kv2, cp, np.ones((kv1.num_basis, kv2.num_basis)))
    validate_patch(patch)
    return patch


def unit_square_patch(p: int, n_el: int) -> Patch:
    """Unit square of side 1.0 mm centered at the origin."""
    return rectangle_patch(0.5, 0.5, p, n_el)


def _bezier_elevate_once(ctrl_h: np.ndarray) -> np.ndarray:
    """Raise the degree of one clamped single-span (Bezier) row by 1."""
    n = ctrl_h.shape[0]
    out = np.empty((n + 1,) + ctrl_h.shape[1:])
    out[0] = ctrl_h[0]
    out[n] = ctrl_h[n - 1]
    for i in range(1, n):
        alpha = i / n
        out[i] = alpha * ctrl_h[i - 1] + (1.0 - alpha) * ctrl_h[i]
    return out


def _insert_knot(ctrl_h: np.ndarray, knots: np.ndarray, p: int, u: float):
    """Boehm single-knot insertion on homogeneous control points."""
    kv = KnotVector(p, knots)
    k = kv.find_span(u)
    n = ctrl_h.shape[0]
    out = np.empty((n + 1,) + ctrl_h.shape[1:])
    out[: k - p + 1] = ctrl_h[: k - p + 1]
    for i in range(k - p + 1, k + 1):
        alpha = (u - knots[i]) / (knots[i + p] - knots[i])
        out[i] = alpha * ctrl_h[i] + (1.0 - alpha) * ctrl_h[i - 1]
    out[k + 1:] = ctrl_h[k:]
    return out, np.insert(knots, k + 1, u)


def _refine_direction(ctrl_h: np.ndarray, p_target: int, n_el: int):
    """Elevate a single-span degree-2 net to p_target, then split into n_el spans.

    Operates on axis 0 of homogeneous control points; returns the refined net
    and the final knot vector.
    """
    for _ in range(p_target - 2):
        ctrl_h = _bezier_elevate_once(ctrl_h)
    knots = np.concatenate([np.zeros(p_target + 1), np.ones(p_target + 1)])
    for u in np.arange(1, n_el) / n_el:
        ctrl_h, knots = _insert_knot(ctrl_h, knots, p_target, u)
    return ctrl_h, knots


def unit_circle_patch(p: int, n_el: int) -> Patch:
    """Single-patch rational disc of radius 1.0 mm with an exact circular boundary.

    Starts from the standard 9-point biquadratic net (corner points on the
    circle, edge midpoints at distance sqrt(2), tensor-product weights), then
    degree-elevates to p and knot-refines to n_el spans per direction. The
    map is degenerate at the four parametric corners, which quadrature never
    touches.
    """
    if p < 2:
        raise ParameterError(f"circle patch needs degree >= 2, got {p}")
    s = np.sqrt(0.5)
    d = np.sqrt(2.0)
    ctrl = np.array(
        [
            [(-s, -s), (-d, 0.0), (-s, s)],
            [(0.0, -d), (0.0, 0.0), (0.0, d)],
            [(s, -s), (d, 0.0), (s, s)],
        ]
    )
    w1d = np.array([1.0, s, 1.0])
    w = np.outer(w1d, w1d)
    ctrl_h = np.concatenate([ctrl * w[..., None], w[..., None]], axis=-1)

    # refine along xi (axis 0), then eta (axis 1)
    ctrl_h, knots1 = _refine_direction(ctrl_h, p, n_el)
    ctrl_h = np.swapaxes(ctrl_h, 0, 1)
    ctrl_h, knots2 = _refine_direction(ctrl_h, p, n_el)
    ctrl_h = np.swapaxes(ctrl_h, 0, 1)

    weights = ctrl_h[..., 2]
    points = ctrl_h[..., :2] / weights[..., None]
    patch = Patch(KnotVector(p, knots1), KnotVector(p, knots2), points, weights)
    validate_patch(patch)
    return patch
