"""Command line front end.

Subcommands: ``solve`` (full solve with CSV outputs), ``stiffness`` (solve
plus beam stiffness only), ``sweep`` (single-axis or proportional loading
sweeps) and ``validate`` (the release-gate suite). Options can come from a
YAML configuration file, from flags, or both; flags win.

All numeric output is written with 17 significant digits so values
round-trip bit-faithfully. Units are fixed to GPa / mm / kN and named in
every header. Exit codes: 0 success, 1 usage or configuration error,
2 divergence, 3 validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import response, validate
from .config import MATERIAL_DEFAULTS, RunConfig, load as load_config, serialize
from .errors import BeamWarpError, ConfigError, DivergenceError, StepFailureError
from .kinematics import StrainPrescriptors
from .solver import newton_solve
from .splines import SectionQuadrature

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DIVERGED = 2
EXIT_VALIDATION = 3


def _fmt(x) -> str:
    return f"{float(x):.17g}"


class _UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _triple(text: str) -> tuple:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated values")
    return tuple(parts)


def _add_run_flags(parser):
    parser.add_argument("--config", help="YAML configuration file")
    parser.add_argument("--section", help="square | circle | rectangle[:A,B] (half-widths in mm)")
    parser.add_argument("--degree", type=int, help="spline degree per direction")
    parser.add_argument("--elements", type=int, help="knot spans per direction")
    parser.add_argument("--material", help="svk | neo_hooke | mooney_rivlin")
    parser.add_argument("--eps", type=_triple, metavar="e1,e2,e3",
                        help="shear/axial strain measures")
    parser.add_argument("--kappa", type=_triple, metavar="k1,k2,k3",
                        help="curvature/twist measures in 1/mm")
    parser.add_argument("--steps", type=int, help="load steps")
    parser.add_argument("--formulation", choices=("pk2", "pk1"))
    parser.add_argument("--tol", type=float, help="iteration-error tolerance")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--grid", type=int, help="field sampling resolution")


def _config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    data = cfg.to_dict()
    if args.section:
        section = args.section
        if section.startswith("rectangle:"):
            a, b = (float(v) for v in section.split(":", 1)[1].split(","))
            data.update(section="rectangle", section_a=a, section_b=b)
        else:
            data["section"] = section
    for key, attr in (
        ("degree", "degree"),
        ("elements", "elements"),
        ("material", "material"),
        ("eps", "eps"),
        ("kappa", "kappa"),
        ("steps", "load_steps"),
        ("formulation", "formulation"),
        ("tol", "tolerance"),
        ("out", "output_dir"),
        ("grid", "grid"),
    ):
        value = getattr(args, key, None)
        if value is not None:
            data[attr] = value
    if args.material is not None and (not args.config or args.material != cfg.material):
        data["material_params"] = dict(MATERIAL_DEFAULTS.get(args.material, {}))
    return RunConfig.from_dict(data)


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if not isinstance(v, (str, int)) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_residual_log(path: Path, solution) -> None:
    rows = []
    for step, hist in enumerate(solution.history, start=1):
        for it, err in enumerate(hist):
            rows.append((step, it, err))
    _write_csv(path, ["step", "iteration", "iteration_error"], rows)


def _write_resultants(path: Path, n, m) -> None:
    header = ["n1 [kN]", "n2 [kN]", "n3 [kN]", "m1 [kN mm]", "m2 [kN mm]", "m3 [kN mm]"]
    _write_csv(path, header, [tuple(n) + tuple(m)])


AXES = ("eps1", "eps2", "eps3", "kappa1", "kappa2", "kappa3")


def _write_stiffness(path: Path, stiffness) -> None:
    header = ["p\\q"] + list(AXES)
    rows = [(AXES[p],) + tuple(stiffness[p]) for p in range(6)]
    _write_csv(path, header, rows)


def _write_fields(path: Path, fields) -> None:
    header = [
        "X1 [mm]", "X2 [mm]", "u1 [mm]", "u2 [mm]", "u3 [mm]",
        "von_mises [GPa]", "det_F [-]",
    ]
    rows = np.column_stack(
        [fields.points, fields.displacement, fields.von_mises, fields.det_f]
    )
    _write_csv(path, header, rows)


def _write_summary(path: Path, cfg: RunConfig, solution, extra: dict) -> None:
    lines = [
        "# beamwarp run summary (units: GPa, mm, kN)",
        f"section: {cfg.section}",
        f"degree: {cfg.degree}",
        f"elements: {cfg.elements}",
        f"material: {cfg.material} {cfg.material_params}",
        f"formulation: {solution.formulation}",
        f"eps: {list(cfg.eps)}",
        f"kappa: {list(cfg.kappa)}",
        f"load_steps_used: {solution.load_steps}",
        f"newton_updates: {solution.iterations}",
        f"final_iteration_error: {_fmt(solution.residual_error)}",
    ]
    lines += [f"{k}: {v}" for k, v in extra.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _run_solve(cfg: RunConfig, with_fields: bool, stiffness_only: bool) -> int:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    quad = SectionQuadrature.from_patch(cfg.patch())
    try:
        solution = newton_solve(
            quad, cfg.material_model(), cfg.prescriptors(), cfg.solve_options(),
            formulation=cfg.formulation,
        )
    except (DivergenceError, StepFailureError) as exc:
        _write_csv(
            out / "residuals.csv",
            ["step", "iteration", "iteration_error"],
            [
                (s + 1, i, val)
                for s, hist in enumerate(getattr(exc, "history", []) or [])
                for i, val in enumerate(hist)
            ],
        )
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED

    _write_residual_log(out / "residuals.csv", solution)
    stiffness = response.beam_stiffness(solution)
    _write_stiffness(out / "stiffness.csv", stiffness)
    extra = {}
    if not stiffness_only:
        n, m = response.stress_resultants(solution)
        _write_resultants(out / "resultants.csv", n, m)
        extra["energy_per_length [kN]"] = _fmt(response.beam_energy(solution))
        if with_fields:
            _write_fields(out / "fields.csv", response.sample_fields(solution, cfg.grid))
    _write_summary(out / "summary.txt", cfg, solution, extra)
    print(f"converged in {solution.iterations} Newton updates "
          f"(final iteration error {solution.residual_error:.3e}); outputs in {out}/")
    return EXIT_OK


def _parse_range(text: str) -> tuple[float, float]:
    lo, hi = (float(v) for v in text.split(","))
    return lo, hi


def _run_sweep(cfg: RunConfig, axis: str, bounds, samples: int) -> int:
    if samples < 2:
        raise ConfigError("sweep needs at least 2 samples")
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    quad = SectionQuadrature.from_patch(cfg.patch())
    model = cfg.material_model()
    base = cfg.prescriptors().as_vector()

    choices = AXES + ("theta",)
    if axis not in choices:
        raise ConfigError(f"unknown sweep axis {axis!r}; use one of {choices}")

    rows = []
    for k, value in enumerate(np.linspace(bounds[0], bounds[1], samples)):
        vec = base.copy()
        if axis == "theta":
            vec *= value
        else:
            vec[AXES.index(axis)] = value
        sp_ = StrainPrescriptors.from_vector(vec)
        try:
            sol = newton_solve(quad, model, sp_, cfg.solve_options(),
                               formulation=cfg.formulation)
            n, m = response.stress_resultants(sol)
            stiff = response.beam_stiffness(sol)
            rows.append(
                (k, value) + tuple(vec) + tuple(n) + tuple(m)
                + tuple(np.diag(stiff)) + (sol.iterations, 1)
            )
        except (DivergenceError, StepFailureError):
            rows.append((k, value) + tuple(vec) + (float("nan"),) * 12 + (0, 0))
    header = (
        ["sample", axis] + [f"{a} [-|1/mm]" for a in AXES]
        + ["n1 [kN]", "n2 [kN]", "n3 [kN]", "m1 [kN mm]", "m2 [kN mm]", "m3 [kN mm]"]
        + [f"C{i}{i} [kN mm^j]" for i in range(1, 7)]
        + ["iterations", "converged"]
    )
    _write_csv(out / "sweep.csv", header, rows)
    failures = sum(1 for r in rows if r[-1] == 0)
    print(f"sweep complete: {samples - failures}/{samples} samples converged; "
          f"outputs in {out}/")
    return EXIT_OK if failures == 0 else EXIT_DIVERGED


def _run_validate(out_dir: str | None) -> int:
    report = validate.run_all()
    for check in report.checks:
        print(check.line())
    print(f"pk1/pk2 tangent assembly time ratio: {report.pk1_over_pk2_assembly_time:.2f}")
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "validation.json").write_text(
            json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8"
        )
    return EXIT_OK if report.passed else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="beamwarp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (
        ("solve", "solve and write resultants, stiffness, residual log and fields"),
        ("stiffness", "solve and write the 6x6 beam stiffness only"),
    ):
        p = sub.add_parser(name, help=help_)
        _add_run_flags(p)

    p = sub.add_parser("sweep", help="sweep one strain measure or the loading scale")
    _add_run_flags(p)
    p.add_argument("--axis", default="theta",
                   help="eps1..eps3, kappa1..kappa3, or theta (proportional)")
    p.add_argument("--range", type=_parse_range, default=(0.0, 1.0),
                   metavar="LO,HI", help="sweep bounds")
    p.add_argument("--samples", type=int, default=11)

    p = sub.add_parser("validate", help="run the release-gate validation suite")
    p.add_argument("--out", help="directory for validation.json")

    p = sub.add_parser("show-config", help="print the effective configuration")
    _add_run_flags(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "validate":
            return _run_validate(args.out)
        cfg = _config_from_args(args)
        if args.command == "show-config":
            print(serialize(cfg), end="")
            return EXIT_OK
        if args.command == "solve":
            return _run_solve(cfg, with_fields=True, stiffness_only=False)
        if args.command == "stiffness":
            return _run_solve(cfg, with_fields=False, stiffness_only=True)
        if args.command == "sweep":
            return _run_sweep(cfg, args.axis, args.range, args.samples)
        raise ConfigError(f"unknown command {args.command!r}")
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DivergenceError, StepFailureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except BeamWarpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
