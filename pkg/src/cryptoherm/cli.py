"""Command-line front end: ``crypto-metric <diag|metric|hermitize|perturb|scan>``.

Reads matrix files in the structured JSON format of :mod:`.matrixio`,
dispatches to the library, and emits machine-readable reports (JSON) or
plot-ready CSV tables for scans.  The builtin ``--kg TAU`` flag stands in
for a Hamiltonian file wherever one is accepted, so the closed-form
two-level fixture runs with zero input files.

Exit codes
----------
==== =======================================================
0    success
2    parse/flag failure (bad files, bad grids, bad options)
3    defective eigenbasis
4    no positive metric solution for the observable set
5    underdetermined observable set
6    solvability violated (failing order in the report)
7    hermitization precondition failed (metric not positive
     definite, or H not quasi-Hermitian for it)
8    any other domain error
==== =======================================================

Success paths print nothing to the error stream.  The environment
variable ``CRYPTO_METRIC_THREADS`` caps scan parallelism (unset = serial,
0 = one thread per CPU).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dyson import dyson_map, hermitize
from .errors import (
    CryptohermError,
    DefectiveError,
    MatrixFileError,
    NoPositiveSolutionError,
    NotPositiveDefiniteError,
    NotQuasiHermitianError,
    SolvabilityViolatedError,
    UnderdeterminedError,
)
from .matrixio import matrix_to_doc, read_matrix
from .metric import (
    MetricFamily,
    assemble_metric,
    fix_ambiguity,
    kg_hamiltonian,
    kg_metric,
    metric_from_matrix,
    quasi_hermiticity_residual,
)
from .perturbation import (
    PerturbationProblem,
    dyson_from_metric,
    hidden_hermiticity_test,
    metric_series,
)
from .spectra import diagonalize, ep_proximity, spectrum_is_real
from .stability import FamilySpec, ScanReport, lambda_max, reality_scan

SCAN_CSV_HEADER = (
    "lambda,tau,spectrum_real,max_imag,min_gap,eigvec_cond,metric_exists,theta_min_eig"
)


@dataclass
class RunConfig:
    """Validated global options shared by all subcommands."""

    tolerance: float = 1e-10
    out: str | None = None
    fmt: str = "report"

    def __post_init__(self):
        if not 0.0 < self.tolerance < 1e-2:
            raise ValueError(
                f"--tol must lie in (0, 1e-2), got {self.tolerance}"
            )


# ---------------------------------------------------------------------------
# flag parsing helpers
# ---------------------------------------------------------------------------


def _parse_grid(text: str) -> list[float]:
    """Parse a grid flag: 'lo:hi:count', a comma list, or a single value."""
    text = text.strip()
    if not text:
        raise ValueError("empty grid specification")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid range must be lo:hi:count, got {text!r}")
        lo, hi = float(parts[0]), float(parts[1])
        count = int(parts[2])
        if count < 1:
            raise ValueError(f"grid count must be >= 1, got {count}")
        return [float(x) for x in np.linspace(lo, hi, count)]
    return [float(x) for x in text.split(",")]


def _parse_bracket(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"bracket must be lo:hi, got {text!r}")
    return float(parts[0]), float(parts[1])


def _scan_workers() -> int:
    raw = os.environ.get("CRYPTO_METRIC_THREADS")
    if raw is None:
        return 1
    n = int(raw)
    if n < 0:
        raise ValueError(f"CRYPTO_METRIC_THREADS must be >= 0, got {n}")
    return os.cpu_count() or 1 if n == 0 else n


def _load_hamiltonian(args) -> np.ndarray:
    if getattr(args, "kg", None) is not None:
        return kg_hamiltonian(args.kg)
    return read_matrix(args.h)


def _load_metric(args, config: RunConfig):
    if getattr(args, "metric", None) is not None:
        return metric_from_matrix(read_matrix(args.metric), config.tolerance)
    if getattr(args, "kg", None) is not None:
        return kg_metric(args.kg, args.beta)
    raise ValueError("a metric file is required unless --kg is used")


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _emit_report(config: RunConfig, report: dict, summary: str) -> None:
    text = json.dumps(report, indent=2)
    if config.out:
        Path(config.out).write_text(text + "\n")
        print(summary)
    else:
        print(text)


def _emit_text(config: RunConfig, text: str, summary: str) -> None:
    if config.out:
        Path(config.out).write_text(text + "\n" if not text.endswith("\n") else text)
        print(summary)
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _pairs(values) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values)]


def _csv_num(x: float) -> str:
    return repr(float(x))


def _csv_bool(x: bool) -> str:
    return "true" if x else "false"


def scan_csv(report: ScanReport) -> str:
    """Render a scan report as the documented CSV table."""
    lines = [SCAN_CSV_HEADER]
    for p in report.points:
        lines.append(
            ",".join(
                [
                    _csv_num(p.lam),
                    "" if p.tau is None else _csv_num(p.tau),
                    _csv_bool(p.spectrum_real),
                    _csv_num(p.max_imag),
                    _csv_num(p.min_gap),
                    _csv_num(p.eigvec_cond),
                    _csv_bool(p.metric_exists),
                    _csv_num(p.theta_min_eig),
                ]
            )
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_diag(args, config: RunConfig) -> int:
    h = _load_hamiltonian(args)
    system = diagonalize(h, config.tolerance)
    real, max_imag = spectrum_is_real(system, config.tolerance)
    min_gap, cond = ep_proximity(system)
    report = {
        "eigenvalues": _pairs(system.eigenvalues),
        "spectrum_real": bool(real),
        "max_imag": max_imag,
        "min_gap": min_gap,
        "eigvec_cond": cond,
    }
    _emit_report(
        config,
        report,
        f"spectrum_real={_csv_bool(real)} max_imag={max_imag:.3e} "
        f"min_gap={min_gap:.6g} eigvec_cond={cond:.6g}",
    )
    return 0


def cmd_metric(args, config: RunConfig) -> int:
    h = _load_hamiltonian(args)
    system = diagonalize(h, config.tolerance)
    family = MetricFamily(system)
    report: dict = {}
    if args.obs:
        observables = [read_matrix(p) for p in args.obs]
        kappa = fix_ambiguity(family, observables, config.tolerance)
    else:
        kappa = np.ones(family.dim)
        report["warning"] = f"family has {family.dim - 1} free ratios"
    theta = assemble_metric(family, kappa)
    report.update(
        {
            "kappa": [float(k) for k in kappa],
            "theta": matrix_to_doc(theta.theta, "theta"),
            "quasi_hermiticity_residual": quasi_hermiticity_residual(h, theta),
        }
    )
    _emit_report(
        config,
        report,
        f"kappa={np.round(np.asarray(kappa, dtype=float), 12).tolist()}"
        + (f" ({report['warning']})" if "warning" in report else ""),
    )
    return 0


def cmd_hermitize(args, config: RunConfig) -> int:
    h = _load_hamiltonian(args)
    theta = _load_metric(args, config)
    omega = dyson_map(theta)
    h_image = hermitize(h, omega, config.tolerance)
    defect = float(np.linalg.norm(h_image - h_image.conj().T))
    rel = defect / max(float(np.linalg.norm(h_image)), 1e-300)
    report = {
        "h_image": matrix_to_doc(h_image, "h_image"),
        "hermiticity_defect": defect,
        "hermiticity_defect_rel": rel,
        "eigenvalues": _pairs(np.sort_complex(np.linalg.eigvals(h_image))),
        "metric_condition_number": omega.condition_number,
        "ill_conditioned": bool(omega.ill_conditioned),
    }
    _emit_report(config, report, f"hermiticity_defect={defect:.3e} (rel {rel:.3e})")
    return 0


def cmd_perturb(args, config: RunConfig) -> int:
    h = _load_hamiltonian(args)
    theta = _load_metric(args, config)
    w_coeffs = [read_matrix(p) for p in args.w or []]
    problem = PerturbationProblem.build(h, theta, w_coeffs, config.tolerance)
    try:
        series = metric_series(problem, args.order)
    except SolvabilityViolatedError as exc:
        report = {
            "error": "SolvabilityViolated",
            "order": exc.order,
            "residual": exc.residual,
        }
        _emit_report(config, report, f"solvability violated at order {exc.order}")
        print(str(exc), file=sys.stderr)
        return 6

    deltas = dyson_from_metric(series, problem.theta)
    n = problem.dim
    delta_at_lam = np.zeros((n, n), dtype=complex)
    for k, d in enumerate(deltas.delta_coeffs):
        delta_at_lam = delta_at_lam + args.lam**k * d
    admissible, hh_residual = hidden_hermiticity_test(
        problem.w_at(args.lam), delta_at_lam, h, problem.theta, args.lam, config.tolerance
    )
    report = {
        "order": series.order,
        "t_coeffs": [
            matrix_to_doc(t, f"T{k}") for k, t in enumerate(series.t_coeffs) if k >= 1
        ],
        "delta0": None,
        "delta1": None,
        "solvability_residuals": [float(r) for r in series.solvability_residuals],
        "lambda": float(args.lam),
        "admissible": bool(admissible),
        "hidden_hermiticity_residual": float(hh_residual),
    }
    if len(deltas.delta_coeffs) >= 1:
        report["delta0"] = matrix_to_doc(deltas.delta_coeffs[0], "delta0")
    if len(deltas.delta_coeffs) >= 2:
        report["delta1"] = matrix_to_doc(deltas.delta_coeffs[1], "delta1")
    _emit_report(
        config,
        report,
        f"order={series.order} admissible={_csv_bool(admissible)} "
        f"hidden_hermiticity_residual={hh_residual:.3e}",
    )
    return 0


def _build_family(args) -> FamilySpec:
    lambdas = _parse_grid(args.lam) if args.lam else [0.0]
    if args.family == "kg":
        if not args.tau:
            raise ValueError("--family kg requires --tau")
        w0 = read_matrix(args.w) if args.w else None
        return FamilySpec.kg(_parse_grid(args.tau), lambdas, w0=w0)
    if not (args.h and args.w):
        raise ValueError("--family linear requires --h and --w")
    return FamilySpec.linear(read_matrix(args.h), read_matrix(args.w), lambdas)


def cmd_scan(args, config: RunConfig) -> int:
    try:
        spec = _build_family(args)
    except (ValueError, MatrixFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = reality_scan(spec, config.tolerance, workers=_scan_workers())
    text = scan_csv(report)
    if args.find_boundary:
        bracket = _parse_bracket(args.find_boundary)
        boundary = lambda_max(spec, bracket, config.tolerance)
        text += f"# lambda_max,{boundary!r}\n"
    _emit_text(config, text, f"wrote {len(report)} rows to {config.out}")
    return 0


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-10, help="working tolerance, in (0, 1e-2)")
    common.add_argument("--out", type=str, default=None, help="write the machine artifact here")
    common.add_argument(
        "--format",
        choices=("report", "csv"),
        default="report",
        dest="fmt",
        help="output format (csv applies to scan only)",
    )

    parser = argparse.ArgumentParser(
        prog="crypto-metric",
        description="Metric construction, hermitization, perturbation series and "
        "stability scans for quasi-Hermitian Hamiltonians.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_h_source(p):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--h", type=str, help="Hamiltonian matrix file")
        src.add_argument("--kg", type=float, metavar="TAU", help="builtin two-level fixture at tau")

    p = sub.add_parser("diag", parents=[common], help="biorthogonal diagonalization report")
    add_h_source(p)
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("metric", parents=[common], help="construct and disambiguate a metric")
    add_h_source(p)
    p.add_argument("--obs", action="append", default=[], help="observable matrix file (repeatable)")
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("hermitize", parents=[common], help="factor the metric and hermitize H")
    add_h_source(p)
    p.add_argument("--metric", type=str, help="metric matrix file")
    p.add_argument("--beta", type=float, default=0.0, help="builtin fixture metric parameter")
    p.set_defaults(func=cmd_hermitize)

    p = sub.add_parser("perturb", parents=[common], help="order-by-order metric corrections")
    add_h_source(p)
    p.add_argument("--metric", type=str, help="metric matrix file")
    p.add_argument("--beta", type=float, default=0.0, help="builtin fixture metric parameter")
    p.add_argument("--w", action="append", default=[], help="perturbation Taylor coefficient file (repeatable)")
    p.add_argument("--order", type=int, default=1, help="highest metric order K")
    p.add_argument("--lam", type=float, default=0.0, help="parameter value for the admissibility test")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("scan", parents=[common], help="stability scan over a parameter grid")
    p.add_argument("--family", choices=("kg", "linear"), required=True)
    p.add_argument("--tau", type=str, default=None, help="tau grid: lo:hi:count, comma list, or value")
    p.add_argument("--lambda", type=str, default=None, dest="lam", help="lambda grid: lo:hi:count, comma list, or value")
    p.add_argument("--h", type=str, default=None, help="base Hamiltonian file (linear family)")
    p.add_argument("--w", type=str, default=None, help="perturbation direction file")
    p.add_argument("--find-boundary", type=str, default=None, metavar="LO:HI",
                   help="append the bisected reality boundary as a trailing comment line")
    p.set_defaults(func=cmd_scan)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = RunConfig(tolerance=args.tol, out=args.out, fmt=args.fmt)
        return args.func(args, config)
    except (MatrixFileError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DefectiveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NoPositiveSolutionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except UnderdeterminedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except SolvabilityViolatedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 6
    except (NotQuasiHermitianError, NotPositiveDefiniteError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 7
    except CryptohermError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 8


if __name__ == "__main__":
    sys.exit(main())
