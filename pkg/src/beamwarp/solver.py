"""Newton solver for the saddle-point warping system with load stepping.

The coupled system K_hat dU = -F_hat is symmetric indefinite (zero
multiplier-multiplier block); it is solved with a sparse direct LU
factorization, which is retained at the converged state so the six adjoint
sensitivity solves can reuse it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import assembly, pk1
from .errors import DivergenceError, FactorizationError, InvertedStateError, StepFailureError
from .kinematics import StrainPrescriptors
from .material import MaterialModel
from .splines import Patch, SectionQuadrature

_MAX_LOAD_STEPS = 64
_LINEAR_RTOL = 1e-10

FORMULATIONS = ("pk2", "pk1")


@dataclass(frozen=True)
class SolveOptions:
    """Newton controls.

    The convergence test and the recorded history use the iteration error
    e = F_hat . F_hat (the squared Euclidean residual norm, in mixed GPa-mm
    units); this is the error measure the reference residual tables report.
    """

    tolerance: float = 1e-10
    max_iterations: int = 20
    load_steps: int = 1
    record_history: bool = True

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.load_steps < 1:
            raise ValueError("need at least one load step")


class Factorization:
    """Direct factorization of a tangent matrix with one refinement pass."""

    def __init__(self, matrix: sp.spmatrix):
        self.matrix = matrix.tocsc()
        try:
            self._lu = spla.splu(self.matrix)
        except RuntimeError as exc:  # SuperLU signals singularity this way
            raise FactorizationError(f"tangent factorization failed: {exc}") from exc

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        x = self._lu.solve(rhs)
        if not np.all(np.isfinite(x)):
            raise FactorizationError("factorization produced non-finite solution")
        rhs_norm = np.linalg.norm(rhs)
        if rhs_norm > 0:
            resid = rhs - self.matrix @ x
            rel = np.linalg.norm(resid) / rhs_norm
            if rel > _LINEAR_RTOL:
                x = x + self._lu.solve(resid)
                rel = np.linalg.norm(rhs - self.matrix @ x) / rhs_norm
                if rel > _LINEAR_RTOL:
                    raise FactorizationError(
                        f"linear solve stagnated at relative residual {rel:.2e}; "
                        "tangent is numerically rank deficient"
                    )
        return x


def linear_solve(matrix: sp.spmatrix, rhs: np.ndarray) -> np.ndarray:
    """One-shot solve of K_hat x = rhs (factorize + back-substitute)."""
    return Factorization(matrix).solve(rhs)


@dataclass
class Solution:
    """Converged state of a section solve plus everything post-processing needs."""

    patch: Patch
    quad: SectionQuadrature
    material: MaterialModel
    prescriptors: StrainPrescriptors
    u_hat: np.ndarray
    history: list[list[float]] = field(default_factory=list)
    formulation: str = "pk2"
    load_steps: int = 1
    _factorization: Factorization | None = None

    @property
    def factorization(self) -> Factorization:
        """Factorized tangent at the converged state, built once and reused
        by all six adjoint sensitivity solves."""
        if self._factorization is None:
            _, tangent_fn = _kernel(self.formulation)
            self._factorization = Factorization(
                tangent_fn(self.quad, self.material, self.prescriptors, self.u_hat)
            )
        return self._factorization

    @property
    def residual_error(self) -> float:
        """Final iteration error F_hat . F_hat (squared residual norm)."""
        return self.history[-1][-1]

    @property
    def iterations(self) -> int:
        """Total number of Newton updates across all load steps."""
        return sum(len(h) - 1 for h in self.history)

    def displacements(self) -> np.ndarray:
        u, _, _ = assembly.split_state(self.u_hat, self.quad.num_basis)
        return u

    def multipliers(self) -> tuple[np.ndarray, np.ndarray]:
        _, lam, mu = assembly.split_state(self.u_hat, self.quad.num_basis)
        return lam, mu


def _kernel(formulation: str):
    if formulation == "pk2":
        return assembly.assemble_residual, assembly.assemble_tangent
    if formulation == "pk1":
        return pk1.assemble_residual, pk1.assemble_tangent
    raise ValueError(f"unknown formulation {formulation!r}; use one of {FORMULATIONS}")


def _newton_step_chain(quad, model, sp_target, opts, residual_fn, tangent_fn, steps):
    """Run the warm-started load staircase; returns (u_hat, histories).

    History entries are the squared residual norm F_hat . F_hat, starting
    with the initial state and appending after every Newton update.
    """
    u_hat = assembly.zero_state(quad.num_basis)
    histories = []
    for j in range(1, steps + 1):
        sp_j = sp_target.scaled(j / steps)
        resid = residual_fn(quad, model, sp_j, u_hat)
        hist = [float(resid @ resid)]
        while hist[-1] > opts.tolerance:
            if len(hist) > opts.max_iterations:
                raise DivergenceError(
                    f"no convergence after {opts.max_iterations} Newton iterations "
                    f"(iteration error {hist[-1]:.3e} at load step {j}/{steps})",
                    history=histories + [hist],
                )
            tangent = tangent_fn(quad, model, sp_j, u_hat)
            u_hat = u_hat + Factorization(tangent).solve(-resid)
            resid = residual_fn(quad, model, sp_j, u_hat)
            hist.append(float(resid @ resid))
        histories.append(hist)
    return u_hat, histories


def newton_solve(
    patch_or_quad: Patch | SectionQuadrature,
    model: MaterialModel,
    sp_target: StrainPrescriptors,
    opts: SolveOptions | None = None,
    formulation: str = "pk2",
) -> Solution:
    """Solve the warping problem at the target strain measures.

    Load steps theta_j = j/steps are warm-started from the previous step; on
    an inverted element the step count is doubled (up to 64) and the
    staircase restarted. The converged tangent is factorized and retained
    for the adjoint solves.
    """
    opts = opts or SolveOptions()
    quad = (
        patch_or_quad
        if isinstance(patch_or_quad, SectionQuadrature)
        else SectionQuadrature.from_patch(patch_or_quad)
    )
    residual_fn, tangent_fn = _kernel(formulation)

    steps = opts.load_steps
    while True:
        try:
            u_hat, histories = _newton_step_chain(
                quad, model, sp_target, opts, residual_fn, tangent_fn, steps
            )
            break
        except InvertedStateError as exc:
            if 2 * steps > _MAX_LOAD_STEPS:
                raise StepFailureError(
                    f"element inversion persists at {steps} load steps "
                    f"(cap {_MAX_LOAD_STEPS}): {exc}"
                ) from exc
            steps *= 2

    return Solution(
        patch=quad.patch,
        quad=quad,
        material=model,
        prescriptors=sp_target,
        u_hat=u_hat,
        history=histories if opts.record_history else [[histories[-1][-1]]],
        formulation=formulation,
        load_steps=steps,
    )
