"""
Command-line front end.

    transmute basis --potential builtin:exp --b pi --N 10 --output phi.csv
    transmute kernel-taylor --potential builtin:cosh --b 2 --N 19
    transmute kernel-goursat --potential builtin:sech --b 2 --N 13 --method remez
    transmute darboux --potential builtin:model --b 0.5 --N 4
    transmute eigen --potential builtin:exp --b pi --N 30 --count 1000 --output eig.csv
    transmute validate --suite s-table

Every command prints a short human report followed by a JSON summary.
Exit status: 0 success, 1 failed validation, 2 invalid configuration,
3 numerical failure.
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ValidationError, field_validator, model_validator

from .config import get_settings
from .errors import ConfigError, TransmuteError
from .kernels import (
    KernelApproximation,
    MeshSpec,
    darboux_kernel,
    fit_goursat,
    goursat_targets,
    kernel_from_taylor,
    mesh_error,
    mesh_frame,
    reference,
    trace_errors,
    vekua_residual,
)
from .potentials import Potential, parse_potential
from .spectral import (
    SearchOptions,
    SpectralProblem,
    find_eigenvalues,
    read_reference,
    write_eigenvalue_table,
)
from .utils import dump_json, parse_length
from .validation import SUITES, run_validation, summarize

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

Command = Literal["basis", "kernel-taylor", "kernel-goursat", "darboux", "eigen", "validate"]


class JobConfig(BaseModel):
    """One CLI job, validated before any computation starts."""
    command: Command
    potential: str = "builtin:exp"
    b: float = 1.0
    n_points: int = 5001
    N: int = 10
    method: Literal["least_squares", "remez"] = "remez"
    count: int = 10
    mesh: int = 100
    output: Optional[str] = None
    mesh_output: Optional[str] = None
    summary: Optional[str] = None
    reference: Optional[str] = None
    suites: List[str] = ["all"]

    @field_validator("b")
    @classmethod
    def positive_length(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("b must be positive")
        return value

    @field_validator("n_points")
    @classmethod
    def enough_points(cls, value: int) -> int:
        if value < 5 or value % 2 == 0:
            raise ValueError("n_points must be odd and at least 5 so that x = 0 is a node")
        return value

    @field_validator("N", "count", "mesh")
    @classmethod
    def positive_integer(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be at least 1")
        return value

    @field_validator("suites")
    @classmethod
    def known_suites(cls, value: List[str]) -> List[str]:
        unknown = [name for name in value if name != "all" and name not in SUITES]
        if unknown:
            raise ValueError(f"unknown suites {unknown}")
        return value

    @model_validator(mode="after")
    def reference_only_for_eigen(self) -> "JobConfig":
        if self.reference is not None and self.command != "eigen":
            raise ValueError("--reference applies to the eigen command only")
        return self


def _kernel_summary(kernel: KernelApproximation) -> Dict[str, Any]:
    return {
        "N": kernel.N,
        "method": kernel.method,
        "eps1": kernel.eps1,
        "eps2": kernel.eps2,
        "fallback": kernel.fallback,
        "c": kernel.c,
        "b": kernel.b,
    }


def _goursat_kernel(config: JobConfig, potential: Potential):
    family = potential.basis(config.b, config.N, config.n_points)
    q = potential.grid(config.b, config.n_points)
    g1, g2 = goursat_targets(q, family.h)
    kernel = fit_goursat(family, g1, g2, config.N, method=config.method)
    return family, q, kernel


def _with_reference_error(summary, kernel, name, config) -> None:
    if name is None:
        return
    summary["reference"] = name
    summary["mesh_error"] = mesh_error(kernel, reference(name), config.b, config.mesh)


def run_basis(config: JobConfig) -> Dict[str, Any]:
    potential = parse_potential(config.potential)
    family = potential.basis(config.b, config.N, config.n_points)
    if config.output:
        family.to_frame().to_csv(config.output, index=False, float_format="%.17g")
    return {"h": family.h, "order": family.order, "fingerprint": family.fingerprint()}


def run_kernel_taylor(config: JobConfig) -> Dict[str, Any]:
    potential = parse_potential(config.potential)
    family = potential.basis(config.b, config.N, config.n_points)
    kernel = kernel_from_taylor(family, potential.jet(config.N), config.N)
    g1, g2 = goursat_targets(potential.grid(config.b, config.n_points), family.h)
    kernel.eps1, kernel.eps2 = trace_errors(kernel, g1, g2)
    summary = _kernel_summary(kernel)
    _with_reference_error(summary, kernel, potential.reference, config)
    _write_kernel(kernel, config)
    return summary


def run_kernel_goursat(config: JobConfig) -> Dict[str, Any]:
    potential = parse_potential(config.potential)
    _, _, kernel = _goursat_kernel(config, potential)
    summary = _kernel_summary(kernel)
    _with_reference_error(summary, kernel, potential.reference, config)
    _write_kernel(kernel, config)
    return summary


def run_darboux(config: JobConfig) -> Dict[str, Any]:
    potential = parse_potential(config.potential)
    family, _, kernel = _goursat_kernel(config, potential)
    inverse = darboux_kernel(kernel, family, direction="forward")
    summary = {"kernel": _kernel_summary(kernel)}
    summary["vekua_residual"] = vekua_residual(
        kernel, inverse, family, MeshSpec(config.b, n=10)
    )
    _with_reference_error(summary, inverse, potential.inverse_reference, config)
    if config.mesh_output:
        mesh_frame(inverse, config.b, config.mesh).to_csv(
            config.mesh_output, index=False, float_format="%.17g"
        )
    return summary


def run_eigen(config: JobConfig) -> Dict[str, Any]:
    potential = parse_potential(config.potential)
    _, q, kernel = _goursat_kernel(config, potential)
    problem = SpectralProblem(q=q, b=config.b, kernel=kernel, search=SearchOptions())
    results = find_eigenvalues(problem, config.count)
    reference_values = read_reference(config.reference) if config.reference else None
    if config.output:
        write_eigenvalue_table(results, config.output, reference_values)
    for result in results[:10]:
        print(f"{result.index:>6}  {result.omega_sq:.15g}  residual={result.char_value_residual:.2e}")
    return {
        "kernel": _kernel_summary(kernel),
        "found": len(results),
        "complete": results.complete,
        "omega_sq": [r.omega_sq for r in results[:10]],
    }


def _write_kernel(kernel: KernelApproximation, config: JobConfig) -> None:
    if config.output:
        dump_json(kernel.to_json(), config.output)
    if config.mesh_output:
        mesh_frame(kernel, config.b, config.mesh).to_csv(
            config.mesh_output, index=False, float_format="%.17g"
        )


RUNNERS = {
    "basis": run_basis,
    "kernel-taylor": run_kernel_taylor,
    "kernel-goursat": run_kernel_goursat,
    "darboux": run_darboux,
    "eigen": run_eigen,
}


def run(config: JobConfig) -> int:
    """Execute one job; returns the exit status."""
    if config.command == "validate":
        report = run_validation(config.suites)
        print(summarize(report))
        print(dump_json(report.to_json(), config.summary))
        return EXIT_OK if report.passed else EXIT_FAILED

    summary = {"command": config.command, "potential": config.potential, "b": config.b}
    summary.update(RUNNERS[config.command](config))
    print(dump_json(summary, config.summary))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transmute",
        description="Transmutation kernels and Sturm-Liouville eigenvalues.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level.")
    commands = parser.add_subparsers(dest="command", required=True)

    def common(sub, with_kernel=True):
        sub.add_argument("--potential", default="builtin:exp",
                         help="builtin:<zero|const:c|cosh|sech|exp|model> or a CSV file.")
        sub.add_argument("--b", type=str, default="1", help="Half-length b (accepts 'pi').")
        sub.add_argument("--n-points", type=int, default=get_settings().n_points,
                         help="Grid points on [-b, b].")
        sub.add_argument("--N", type=int, default=10, help="Truncation order.")
        sub.add_argument("--output", default=None, help="Main output file.")
        sub.add_argument("--summary", default=None, help="Write the JSON summary here too.")
        if with_kernel:
            sub.add_argument("--mesh", type=int, default=100, help="Triangle mesh size.")
            sub.add_argument("--mesh-output", default=None, help="CSV of kernel mesh values.")

    common(commands.add_parser("basis", help="Build the recursive-integral basis."), False)
    common(commands.add_parser("kernel-taylor", help="Kernel by the Taylor method."))
    goursat = commands.add_parser("kernel-goursat", help="Kernel by fitting Goursat data.")
    common(goursat)
    goursat.add_argument("--method", choices=["least_squares", "remez"], default="remez")
    darboux = commands.add_parser("darboux", help="Kernel of the Darboux-transformed potential.")
    common(darboux)
    darboux.add_argument("--method", choices=["least_squares", "remez"], default="remez")
    eigen = commands.add_parser("eigen", help="Dirichlet eigenvalues on [0, b].")
    common(eigen, False)
    eigen.add_argument("--method", choices=["least_squares", "remez"], default="remez")
    eigen.add_argument("--count", type=int, default=10, help="Number of eigenvalues.")
    eigen.add_argument("--reference", default=None, help="CSV with columns n, omega_sq.")
    validate = commands.add_parser("validate", help="Recompute the published tables.")
    validate.add_argument("--suite", action="append", dest="suites",
                          help=f"One of {', '.join(sorted(SUITES))} or all; repeatable.")
    validate.add_argument("--summary", default=None, help="Write the JSON report here too.")
    return parser


def _config_from_args(args: argparse.Namespace) -> JobConfig:
    values = {k: v for k, v in vars(args).items() if v is not None and k != "verbose"}
    if "b" in values:
        try:
            values["b"] = parse_length(values["b"])
        except ValueError:
            raise ConfigError(f"cannot parse b={values['b']!r}")
    if "suites" not in values and args.command == "validate":
        values["suites"] = ["all"]
    return JobConfig(**values)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = get_settings()
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.log_level_value,
        format="%(asctime)s %(name)s %(levelname)s: %(message)s",
    )
    try:
        config = _config_from_args(args)
    except (ValidationError, ConfigError) as exc:
        print(f"[cli] invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        return run(config)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    except TransmuteError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
