"""Release-gate validation suite.

Each check reproduces one verification result: the Newton iteration-error
table, exact agreement between the production (pk2) and reference (pk1)
formulations, classical small-strain stiffness limits, finite-difference
consistency of every operator and of the adjoint-based beam stiffness,
torsional stiffening of a rectangle, the torsional slope of a square, and
the field symmetry facts. Checks return structured results so the command
line can render a machine-readable report; the pytest acceptance module
asserts the same functions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import assembly, constraints, kinematics, pk1, response
from .kinematics import StrainPrescriptors
from .material import MooneyRivlin, NeoHooke, SaintVenantKirchhoff
from .solver import SolveOptions, newton_solve
from .splines import SectionQuadrature, rectangle_patch, unit_circle_patch, unit_square_patch

#: reference multi-axial loading state
MULTIAXIAL = StrainPrescriptors(eps=[0.02, 0.03, 0.1], kappa=[0.01, 0.02, 0.02])

#: iteration errors of the reference residual table (after updates 1 and 2)
RESIDUAL_TABLE = (2.61e-1, 5.20e-6)

TABLE_MATERIALS = {
    "svk": SaintVenantKirchhoff(121.0, 80.0),
    "neo_hooke": NeoHooke(40.0, 174.34),
    "mooney_rivlin": MooneyRivlin(30.0, 10.0, 174.34),
}

YOUNG = 208.16          # GPa, consistent with lam = 121, mu = 80
SHEAR = 80.0            # GPa
SQUARE_TORSION_BETA = 0.140577  # Saint-Venant J_t / side^4 for a square


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    runtime_s: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.detail} [{self.runtime_s:.2f} s]"


@dataclass
class Registry:
    """Converged states collected by the checks; criterion 7 sweeps them."""

    entries: list = field(default_factory=list)

    def add(self, label, solution, stiffness=None):
        self.entries.append((label, solution, stiffness))


def rectangle_torsion_constant(a: float, b: float, terms: int = 40) -> float:
    """Exact Saint-Venant torsion constant of the rectangle |X1|<a, |X2|<b.

    Series solution of the torsion problem (half-widths; long/short sorted
    internally); for the unit square this evaluates to 0.1405771 mm^4.
    """
    long_, short = max(a, b), min(a, b)
    n = 2 * np.arange(terms) + 1
    series = np.sum(np.tanh(n * np.pi * long_ / (2 * short)) / n**5)
    return 16.0 / 3.0 * long_ * short**3 - 1024.0 * short**4 / np.pi**5 * series


def _rel(x, ref):
    return abs(x / ref - 1.0)


def _relative_diff(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = max(np.abs(a).max(), np.abs(b).max(), 1e-300)
    return np.abs(a - b).max() / scale


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# --------------------------------------------------------------------------
# criterion 1: Newton iteration-error table
# --------------------------------------------------------------------------

def check_residual_table(registry: Registry) -> CheckResult:
    def run():
        patch = unit_square_patch(3, 5)
        quad = SectionQuadrature.from_patch(patch)
        model = TABLE_MATERIALS["svk"]
        sols = {
            form: newton_solve(quad, model, MULTIAXIAL, formulation=form)
            for form in ("pk2", "pk1")
        }
        return sols

    sols, dt = _timed(run)
    problems = []
    for form, sol in sols.items():
        hist = sol.history[0]
        if len(hist) < 4:
            problems.append(f"{form}: only {len(hist) - 1} updates recorded")
            continue
        for k, ref in enumerate(RESIDUAL_TABLE, start=1):
            if _rel(hist[k], ref) > 0.02:
                problems.append(f"{form}: update {k} error {hist[k]:.3e} vs {ref:.2e}")
        if hist[-1] > 1e-12:
            problems.append(f"{form}: final error {hist[-1]:.2e} > 1e-12")
        registry.add(f"residual-table-{form}", sol)
    if dt > 1.0:
        problems.append(f"runtime {dt:.2f} s > 1 s")
    detail = (
        "; ".join(problems)
        if problems
        else "iteration errors {:.3e}, {:.3e}, final {:.2e} in both formulations".format(
            sols["pk2"].history[0][1], sols["pk2"].history[0][2], sols["pk2"].history[0][-1]
        )
    )
    return CheckResult("newton-residual-table", not problems, detail, dt)


# --------------------------------------------------------------------------
# criterion 2: formulation equivalence on random states
# --------------------------------------------------------------------------

def check_formulation_equivalence(registry: Registry, num_states: int = 20) -> CheckResult:
    def run():
        rng = np.random.default_rng(2024)
        sections = [
            ("square", SectionQuadrature.from_patch(unit_square_patch(3, 2))),
            ("circle", SectionQuadrature.from_patch(unit_circle_patch(2, 2))),
        ]
        mats = list(TABLE_MATERIALS.items())
        opts = SolveOptions(tolerance=1e-16)
        worst = {"u": 0.0, "nm": 0.0, "stiff": 0.0}
        for i in range(num_states):
            sec_name, quad = sections[i % 2]
            mat_name, model = mats[i % 3]
            sp_ = StrainPrescriptors(
                rng.uniform(-0.1, 0.1, 3), rng.uniform(-0.1, 0.1, 3)
            )
            sol2 = newton_solve(quad, model, sp_, opts, formulation="pk2")
            sol1 = newton_solve(quad, model, sp_, opts, formulation="pk1")
            worst["u"] = max(worst["u"], _relative_diff(sol2.u_hat, sol1.u_hat))
            r2 = np.concatenate(response.stress_resultants(sol2))
            r1 = np.concatenate(response.stress_resultants(sol1))
            worst["nm"] = max(worst["nm"], _relative_diff(r2, r1))
            c2 = response.beam_stiffness(sol2)
            c1 = response.beam_stiffness(sol1)
            worst["stiff"] = max(worst["stiff"], _relative_diff(c2, c1))
            registry.add(f"equiv-{sec_name}-{mat_name}-{i}", sol2, c2)
            registry.add(f"equiv-{sec_name}-{mat_name}-{i}-pk1", sol1, c1)
        return worst

    worst, dt = _timed(run)
    problems = []
    if worst["u"] > 1e-10:
        problems.append(f"displacement deviation {worst['u']:.2e} > 1e-10")
    if worst["nm"] > 1e-8:
        problems.append(f"resultant deviation {worst['nm']:.2e} > 1e-8")
    if worst["stiff"] > 1e-8:
        problems.append(f"stiffness deviation {worst['stiff']:.2e} > 1e-8")
    if dt > 30.0:
        problems.append(f"runtime {dt:.1f} s > 30 s")
    detail = "; ".join(problems) if problems else (
        f"{num_states} states: max deviations u {worst['u']:.1e}, "
        f"(n,m) {worst['nm']:.1e}, stiffness {worst['stiff']:.1e}"
    )
    return CheckResult("formulation-equivalence", not problems, detail, dt)


# --------------------------------------------------------------------------
# criterion 3: classical stiffness limits at zero strain
# --------------------------------------------------------------------------

def check_classical_limits(registry: Registry) -> CheckResult:
    def run():
        quad = SectionQuadrature.from_patch(unit_square_patch(3, 5))
        out = {}
        for name, model in TABLE_MATERIALS.items():
            sol = newton_solve(quad, model, StrainPrescriptors())
            stiff = response.beam_stiffness(sol)
            registry.add(f"limits-{name}", sol, stiff)
            out[name] = stiff
        return out

    stiffs, dt = _timed(run)
    ea = YOUNG
    ei = YOUNG / 12.0
    gj = SHEAR * SQUARE_TORSION_BETA
    problems = []
    for name, c in stiffs.items():
        tol_axial = 0.01 if name == "svk" else 0.015
        tol_torsion = 0.02 if name == "svk" else 0.015
        for label, value, ref, tol in (
            ("C33", c[2, 2], ea, tol_axial),
            ("C44", c[3, 3], ei, tol_axial),
            ("C55", c[4, 4], ei, tol_axial),
            ("C66", c[5, 5], gj, tol_torsion),
        ):
            if _rel(value, ref) > tol:
                problems.append(f"{name} {label} = {value:.4f} vs {ref:.4f}")
        coupling = np.abs(c[:3, 3:]).max()
        scale = np.abs(np.diag(c)).max()
        if coupling > 1e-6 * scale:
            problems.append(f"{name} coupling block {coupling:.2e}")
    c = stiffs["svk"]
    detail = "; ".join(problems) if problems else (
        f"C33 {c[2, 2]:.2f} (EA {ea:.2f}), C44 {c[3, 3]:.3f} (EI {ei:.3f}), "
        f"C66 {c[5, 5]:.4f} (GJt {gj:.4f}) for all three materials"
    )
    return CheckResult("classical-stiffness-limits", not problems, detail, dt)


# --------------------------------------------------------------------------
# criterion 4: adjoint stiffness and resultants against re-solve differences
# --------------------------------------------------------------------------

def check_sensitivity_consistency(registry: Registry) -> CheckResult:
    h = 1e-5
    opts = SolveOptions(tolerance=1e-20)

    def run():
        quad = SectionQuadrature.from_patch(unit_square_patch(3, 5))
        worst_stiff = worst_nm = 0.0
        for name, model in TABLE_MATERIALS.items():
            sol = newton_solve(quad, model, MULTIAXIAL, opts)
            stiff = response.beam_stiffness(sol)
            registry.add(f"sens-{name}", sol, stiff)
            base = MULTIAXIAL.as_vector()
            fd_stiff = np.empty((6, 6))
            fd_nm = np.empty(6)
            for q in range(6):
                plus, minus = base.copy(), base.copy()
                plus[q] += h
                minus[q] -= h
                sol_p = newton_solve(quad, model, StrainPrescriptors.from_vector(plus), opts)
                sol_m = newton_solve(quad, model, StrainPrescriptors.from_vector(minus), opts)
                nm_p = np.concatenate(response.stress_resultants(sol_p))
                nm_m = np.concatenate(response.stress_resultants(sol_m))
                fd_stiff[:, q] = (nm_p - nm_m) / (2 * h)
                fd_nm[q] = (response.beam_energy(sol_p) - response.beam_energy(sol_m)) / (2 * h)
            nm = np.concatenate(response.stress_resultants(sol))
            worst_stiff = max(
                worst_stiff,
                np.linalg.norm(stiff - fd_stiff) / np.linalg.norm(stiff),
            )
            worst_nm = max(worst_nm, np.linalg.norm(nm - fd_nm) / np.linalg.norm(nm))
        return worst_stiff, worst_nm

    (worst_stiff, worst_nm), dt = _timed(run)
    problems = []
    if worst_stiff > 1e-4:
        problems.append(f"stiffness vs re-solve FD {worst_stiff:.2e} > 1e-4")
    if worst_nm > 1e-4:
        problems.append(f"(n,m) vs energy FD {worst_nm:.2e} > 1e-4")
    if dt > 60.0:
        problems.append(f"runtime {dt:.1f} s > 60 s")
    detail = "; ".join(problems) if problems else (
        f"stiffness FD deviation {worst_stiff:.1e}, resultant FD deviation "
        f"{worst_nm:.1e} for all three materials"
    )
    return CheckResult("sensitivity-consistency", not problems, detail, dt)


# --------------------------------------------------------------------------
# criterion 5: operator finite-difference suite on a reduced mesh
# --------------------------------------------------------------------------

def _random_state(rng, quad, scale=0.01):
    u_hat = assembly.zero_state(quad.num_basis)
    u_hat[: 3 * quad.num_basis] = rng.uniform(-scale, scale, 3 * quad.num_basis)
    u_hat[3 * quad.num_basis:] = rng.uniform(-0.5, 0.5, 6)
    return u_hat


def _fd_material_checks(rng):
    worst_s = worst_d = 0.0
    h = 1e-6
    for model in TABLE_MATERIALS.values():
        for _ in range(100):
            e = rng.uniform(-1.0, 1.0, 6)
            e *= min(1.0, 0.2 / max(np.linalg.norm(e), 1e-12))
            s = model.stress(e)
            d = model.tangent(e)
            fd_s = np.empty(6)
            fd_d = np.empty((6, 6))
            for k in range(6):
                ep, em = e.copy(), e.copy()
                ep[k] += h
                em[k] -= h
                fd_s[k] = (model.energy(ep) - model.energy(em)) / (2 * h)
                fd_d[:, k] = (model.stress(ep) - model.stress(em)) / (2 * h)
            worst_s = max(worst_s, np.abs(s - fd_s).max() / max(np.abs(s).max(), 1e-3))
            worst_d = max(worst_d, np.abs(d - fd_d).max() / np.abs(d).max())
    return worst_s, worst_d


def check_operator_fd(registry: Registry) -> list[CheckResult]:
    """Central-difference checks of every operator on a 2x2-element mesh."""
    rng = np.random.default_rng(7)
    results = []

    def add(name, worst, tol, dt):
        results.append(
            CheckResult(
                f"operator-fd:{name}",
                worst <= tol,
                f"max relative deviation {worst:.2e} (tol {tol:.0e})",
                dt,
            )
        )

    (ws, wd), dt = _timed(lambda: _fd_material_checks(rng))
    add("material-stress", ws, 1e-6, dt)
    add("material-tangent", wd, 1e-5, dt)

    quad = SectionQuadrature.from_patch(unit_square_patch(2, 2))
    model = TABLE_MATERIALS["svk"]
    sp_ = StrainPrescriptors(eps=[0.01, -0.02, 0.05], kappa=[0.02, -0.01, 0.03])
    u_hat = _random_state(rng, quad)
    displacements, lam, mu = assembly.split_state(u_hat, quad.num_basis)

    # strain-displacement operator B against FD through the strain chain
    t0 = time.perf_counter()
    worst = 0.0
    h = 1e-6
    pf = assembly.point_fields(quad, sp_, displacements)
    b_all = kinematics.b_operator(pf.f[:, None], sp_.kappa, quad.values, quad.grads)
    for q_pt in range(0, quad.num_points, 7):
        for a in range(0, quad.values.shape[1], 5):
            bi = b_all[q_pt, a]
            fd = np.empty((6, 3))
            for m in range(3):
                for sgn, store in ((1.0, 0), (-1.0, 1)):
                    du = np.zeros(3)
                    du[m] = sgn * h
                    u_pert = pf.u[q_pt] + quad.values[q_pt, a] * du
                    grad_pert = pf.grad_u[q_pt] + np.outer(du, quad.grads[q_pt, a])
                    f_pert = kinematics.deformation_gradient(
                        quad.points[q_pt], u_pert, grad_pert, sp_
                    )
                    if store == 0:
                        e_plus = kinematics.green_lagrange(f_pert)
                    else:
                        e_minus = kinematics.green_lagrange(f_pert)
                fd[:, m] = (e_plus - e_minus) / (2 * h)
            worst = max(worst, np.abs(bi - fd).max() / max(np.abs(bi).max(), 1e-6))
    add("strain-displacement", worst, 1e-6, time.perf_counter() - t0)

    # geometric operator: dB_I^T S / du_J against FD (stress frozen)
    t0 = time.perf_counter()
    worst = 0.0
    stress_v = model.stress(pf.strain)
    for q_pt in range(0, quad.num_points, 7):
        n_pt = quad.values[q_pt]
        g_pt = quad.grads[q_pt]
        s_pt = stress_v[q_pt]
        for a in range(0, len(n_pt), 5):
            for b_idx in range(0, len(n_pt), 5):
                g_ij = kinematics.geometric_operator(
                    sp_.kappa, n_pt[a], n_pt[b_idx], g_pt[a], g_pt[b_idx], s_pt
                )
                fd = np.empty((3, 3))
                for m in range(3):
                    du = np.zeros(3)
                    du[m] = h
                    vals = []
                    for sgn in (1.0, -1.0):
                        u_pert = pf.u[q_pt] + n_pt[b_idx] * sgn * du
                        grad_pert = pf.grad_u[q_pt] + np.outer(sgn * du, g_pt[b_idx])
                        f_pert = kinematics.deformation_gradient(
                            quad.points[q_pt], u_pert, grad_pert, sp_
                        )
                        b_pert = kinematics.b_operator(f_pert, sp_.kappa, n_pt[a], g_pt[a])
                        vals.append(b_pert.T @ s_pt)
                    fd[:, m] = (vals[0] - vals[1]) / (2 * h)
                worst = max(worst, np.abs(g_ij - fd).max() / max(np.abs(stress_v).max(), 1e-6))
    add("geometric", worst, 1e-6, time.perf_counter() - t0)

    # strain sensitivity E,q and operator sensitivity B,q against prescriptor FD
    t0 = time.perf_counter()
    worst_e = worst_b = 0.0
    hq = 1e-6
    base = sp_.as_vector()
    for q in range(6):
        plus, minus = base.copy(), base.copy()
        plus[q] += hq
        minus[q] -= hq
        sp_p = StrainPrescriptors.from_vector(plus)
        sp_m = StrainPrescriptors.from_vector(minus)
        pf_p = assembly.point_fields(quad, sp_p, displacements)
        pf_m = assembly.point_fields(quad, sp_m, displacements)
        e_q = kinematics.strain_sensitivity(pf.f, pf.x, q)
        fd_e = (pf_p.strain - pf_m.strain) / (2 * hq)
        worst_e = max(worst_e, np.abs(e_q - fd_e).max() / max(np.abs(fd_e).max(), 1e-6))
        b_q = kinematics.b_operator_sensitivity(
            pf.f[:, None], pf.x[:, None], sp_.kappa, q, quad.values, quad.grads
        )
        b_p = kinematics.b_operator(pf_p.f[:, None], sp_p.kappa, quad.values, quad.grads)
        b_m = kinematics.b_operator(pf_m.f[:, None], sp_m.kappa, quad.values, quad.grads)
        fd_b = (b_p - b_m) / (2 * hq)
        worst_b = max(worst_b, np.abs(b_q - fd_b).max() / max(np.abs(fd_b).max(), 1e-6))
    dt = time.perf_counter() - t0
    add("strain-sensitivity", worst_e, 1e-6, dt)
    add("b-operator-sensitivity", worst_b, 1e-6, dt)

    # constraint kernels
    t0 = time.perf_counter()
    worst_m = worst_xi = 0.0
    for _ in range(25):
        x = rng.uniform(-1.0, 1.0, 3)
        if np.hypot(x[0], x[1]) < 0.2:
            continue
        big_x = x[:2] * rng.uniform(0.8, 1.2)
        m_mat = constraints.constraint_jacobian(x)
        mu_vec = rng.uniform(-1.0, 1.0, 3)
        xi = constraints.constraint_hessian(x, mu_vec)
        fd_m = np.empty((3, 3))
        fd_xi = np.empty((3, 3))
        for m in range(3):
            dx = np.zeros(3)
            dx[m] = 1e-7
            _, c_p = constraints.constraint_values(big_x, x + dx)
            _, c_m = constraints.constraint_values(big_x, x - dx)
            fd_m[:, m] = (c_p - c_m) / 2e-7
            fd_xi[:, m] = (
                constraints.constraint_jacobian(x + dx) @ mu_vec
                - constraints.constraint_jacobian(x - dx) @ mu_vec
            ) / 2e-7
        worst_m = max(worst_m, np.abs(m_mat.T - fd_m).max() / np.abs(m_mat).max())
        worst_xi = max(worst_xi, np.abs(xi - fd_xi).max() / max(np.abs(xi).max(), 1.0))
    dt = time.perf_counter() - t0
    add("constraint-jacobian", worst_m, 1e-7, dt)
    add("constraint-hessian", worst_xi, 1e-6, dt)

    # global tangent against FD of the residual over every unknown
    t0 = time.perf_counter()
    k_mat = assembly.assemble_tangent(quad, model, sp_, u_hat).toarray()
    size = k_mat.shape[0]
    fd_k = np.empty_like(k_mat)
    hk = 1e-7
    for j in range(size):
        up, um = u_hat.copy(), u_hat.copy()
        up[j] += hk
        um[j] -= hk
        fd_k[:, j] = (
            assembly.assemble_residual(quad, model, sp_, up)
            - assembly.assemble_residual(quad, model, sp_, um)
        ) / (2 * hk)
    worst = np.abs(k_mat - fd_k).max() / np.abs(k_mat).max()
    add("global-tangent", worst, 1e-5, time.perf_counter() - t0)

    # sensitivity right-hand sides against prescriptor FD of the residual
    t0 = time.perf_counter()
    worst = worst_pk1 = 0.0
    for q in range(6):
        rhs = assembly.assemble_sensitivity_rhs(quad, model, sp_, u_hat, q)
        rhs1 = pk1.assemble_sensitivity_rhs(quad, model, sp_, u_hat, q)
        plus, minus = base.copy(), base.copy()
        plus[q] += hq
        minus[q] -= hq
        fd = (
            assembly.assemble_residual(quad, model, StrainPrescriptors.from_vector(plus), u_hat)
            - assembly.assemble_residual(quad, model, StrainPrescriptors.from_vector(minus), u_hat)
        ) / (2 * hq)
        scale = max(np.abs(fd).max(), 1e-6)
        worst = max(worst, np.abs(rhs - fd).max() / scale)
        worst_pk1 = max(worst_pk1, np.abs(rhs1 - fd).max() / scale)
    dt = time.perf_counter() - t0
    add("sensitivity-rhs", worst, 1e-5, dt)
    add("sensitivity-rhs-pk1", worst_pk1, 1e-5, dt)
    return results


# --------------------------------------------------------------------------
# criterion 6: torsion validations
# --------------------------------------------------------------------------

def check_torsion_rectangle(registry: Registry) -> CheckResult:
    def run():
        quad = SectionQuadrature.from_patch(rectangle_patch(1.0, 0.5, 3, 5))
        model = SaintVenantKirchhoff(1.275, 1.0)
        c66 = []
        for k3 in np.linspace(0.0, 0.5, 11):
            sol = newton_solve(quad, model, StrainPrescriptors(kappa=[0.0, 0.0, k3]))
            stiff = response.beam_stiffness(sol)
            registry.add(f"torsion-rect-{k3:.2f}", sol, stiff)
            c66.append(stiff[5, 5])
        return np.array(c66)

    c66, dt = _timed(run)
    ref = 1.0 * rectangle_torsion_constant(1.0, 0.5)
    problems = []
    if _rel(c66[0], ref) > 1e-3:
        problems.append(f"C66(0) = {c66[0]:.6f} vs mu*Jt = {ref:.6f}")
    if not np.all(np.diff(c66) > 0):
        problems.append("normalized torsional stiffness is not strictly increasing")
    detail = "; ".join(problems) if problems else (
        f"C66(0)/muJt = {c66[0] / ref:.5f}, rising monotonically to "
        f"{c66[-1] / c66[0]:.4f} at twist 0.5"
    )
    return CheckResult("torsion-rectangle", not problems, detail, dt)


def check_torsion_square_slope(registry: Registry) -> CheckResult:
    def run():
        quad = SectionQuadrature.from_patch(unit_square_patch(3, 5))
        model = SaintVenantKirchhoff(109.9958, 80.194)
        sol = newton_solve(quad, model, StrainPrescriptors())
        stiff = response.beam_stiffness(sol)
        registry.add("torsion-square", sol, stiff)
        return stiff[5, 5]

    slope, dt = _timed(run)
    ref = 80.194 * SQUARE_TORSION_BETA
    ok = _rel(slope, ref) <= 0.02
    detail = f"dm3/dk3 at zero twist = {slope:.4f} kN mm^2 vs {ref:.4f} (GJt)"
    return CheckResult("torsion-square-slope", ok, detail, dt)


# --------------------------------------------------------------------------
# criterion 7: symmetry and constraint satisfaction at every converged state
# --------------------------------------------------------------------------

def check_symmetry_and_constraints(registry: Registry) -> CheckResult:
    def run():
        worst = {"ksym": 0.0, "csym": 0.0, "flam": 0.0, "fmu": 0.0, "detf": np.inf}
        residual_fns = {"pk2": assembly.assemble_residual, "pk1": pk1.assemble_residual}
        tangent_fns = {"pk2": assembly.assemble_tangent, "pk1": pk1.assemble_tangent}
        for label, sol, stiff in registry.entries:
            k_mat = tangent_fns[sol.formulation](
                sol.quad, sol.material, sol.prescriptors, sol.u_hat
            ).toarray()
            worst["ksym"] = max(
                worst["ksym"], np.abs(k_mat - k_mat.T).max() / np.abs(k_mat).max()
            )
            if stiff is not None:
                worst["csym"] = max(
                    worst["csym"], np.abs(stiff - stiff.T).max() / np.abs(stiff).max()
                )
            resid = residual_fns[sol.formulation](
                sol.quad, sol.material, sol.prescriptors, sol.u_hat
            )
            n = sol.quad.num_basis
            worst["flam"] = max(worst["flam"], np.linalg.norm(resid[3 * n: 3 * n + 3]))
            worst["fmu"] = max(worst["fmu"], np.linalg.norm(resid[3 * n + 3:]))
            pf = assembly.point_fields(sol.quad, sol.prescriptors, sol.displacements())
            worst["detf"] = min(worst["detf"], pf.det_f.min())
        return worst

    worst, dt = _timed(run)
    problems = []
    if worst["ksym"] > 1e-12:
        problems.append(f"tangent asymmetry {worst['ksym']:.2e}")
    if worst["csym"] > 1e-8:
        problems.append(f"beam stiffness asymmetry {worst['csym']:.2e}")
    if max(worst["flam"], worst["fmu"]) > 1e-10:
        problems.append(
            f"constraint residuals {worst['flam']:.2e}/{worst['fmu']:.2e}"
        )
    if worst["detf"] <= 0:
        problems.append(f"det F = {worst['detf']:.2e}")
    detail = "; ".join(problems) if problems else (
        f"{len(registry.entries)} states: K asym {worst['ksym']:.1e}, C asym "
        f"{worst['csym']:.1e}, constraints {max(worst['flam'], worst['fmu']):.1e}, "
        f"min det F {worst['detf']:.3f}"
    )
    return CheckResult("symmetry-and-constraints", not problems, detail, dt)


# --------------------------------------------------------------------------
# criterion 8: qualitative field facts
# --------------------------------------------------------------------------

def check_field_symmetry(registry: Registry) -> CheckResult:
    def run():
        svk = TABLE_MATERIALS["svk"]
        quad_sq = SectionQuadrature.from_patch(unit_square_patch(3, 5))
        sol_shear = newton_solve(quad_sq, svk, StrainPrescriptors(eps=[0.1, 0.0, 0.0]))
        registry.add("field-shear", sol_shear)
        fields = response.sample_fields(sol_shear, 24)
        u3 = fields.displacement[:, 2].reshape(fields.grid_shape)
        anti = np.abs(u3 + u3[::-1, :]).max()

        quad_c = SectionQuadrature.from_patch(unit_circle_patch(3, 5))
        sol_twist = newton_solve(quad_c, svk, StrainPrescriptors(kappa=[0.0, 0.0, 0.1]))
        registry.add("field-twist", sol_twist)
        twist_u3 = np.abs(
            response.sample_fields(sol_twist, 24).displacement[:, 2]
        ).max()

        sol_zero = newton_solve(quad_sq, svk, StrainPrescriptors())
        registry.add("field-zero", sol_zero)
        zero_fields = response.sample_fields(sol_zero, 12)
        zero_mag = max(
            np.abs(zero_fields.displacement).max(), zero_fields.von_mises.max()
        )
        return anti, twist_u3, zero_mag

    (anti, twist_u3, zero_mag), dt = _timed(run)
    problems = []
    if anti > 1e-8:
        problems.append(f"shear u3 antisymmetry violation {anti:.2e}")
    if twist_u3 > 1e-6:
        problems.append(f"circle twist warping {twist_u3:.2e} mm")
    if zero_mag > 1e-14:
        problems.append(f"zero-load fields {zero_mag:.2e}")
    detail = "; ".join(problems) if problems else (
        f"shear antisymmetry {anti:.1e}, circle twist |u3| {twist_u3:.1e}, "
        f"zero-load fields {zero_mag:.1e}"
    )
    return CheckResult("field-symmetry", not problems, detail, dt)


# --------------------------------------------------------------------------
# report
# --------------------------------------------------------------------------

def assembly_time_ratio(repeats: int = 3) -> float:
    """Median pk1/pk2 tangent assembly time at the reference loading state."""
    quad = SectionQuadrature.from_patch(unit_square_patch(3, 5))
    model = TABLE_MATERIALS["svk"]
    sol = newton_solve(quad, model, MULTIAXIAL)
    times = {}
    for name, fn in (("pk2", assembly.assemble_tangent), ("pk1", pk1.assemble_tangent)):
        samples = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn(quad, model, MULTIAXIAL, sol.u_hat)
            samples.append(time.perf_counter() - t0)
        times[name] = float(np.median(samples))
    return times["pk1"] / times["pk2"]


@dataclass
class ValidationReport:
    checks: list[CheckResult]
    pk1_over_pk2_assembly_time: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "passed": bool(self.passed),
            "pk1_over_pk2_assembly_time": float(self.pk1_over_pk2_assembly_time),
            "checks": [
                {
                    "name": c.name,
                    "passed": bool(c.passed),
                    "detail": c.detail,
                    "runtime_s": float(c.runtime_s),
                }
                for c in self.checks
            ],
        }


def run_all() -> ValidationReport:
    """Run the full release gate and return the structured report."""
    registry = Registry()
    checks = [
        check_residual_table(registry),
        check_formulation_equivalence(registry),
        check_classical_limits(registry),
        check_sensitivity_consistency(registry),
    ]
    checks.extend(check_operator_fd(registry))
    checks.append(check_torsion_rectangle(registry))
    checks.append(check_torsion_square_slope(registry))
    checks.append(check_field_symmetry(registry))
    checks.append(check_symmetry_and_constraints(registry))
    return ValidationReport(checks, assembly_time_ratio())
