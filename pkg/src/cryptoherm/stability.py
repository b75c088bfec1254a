"""Stability maps for parametrized Hamiltonian families.

Spectral-reality scans over parameter grids, bisection for the
exceptional-point boundary where reality breaks down (the convergence
radius of the perturbation series), and validation of truncated metric
series against exactly constructed metrics.
"""

from __future__ import annotations

import functools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CryptohermError, InvalidBracketError
from .metric import MetricFamily, assemble_metric, kg_hamiltonian
from .perturbation import PerturbationProblem, metric_series
from .spectra import _check_tol, as_matrix, diagonalize, require_real_nondegenerate

__all__ = [
    "FamilySpec",
    "ScanPoint",
    "ScanReport",
    "exact_matched_metric",
    "lambda_max",
    "reality_scan",
    "series_vs_exact",
]


def _validate_grid(values, name: str) -> np.ndarray:
    g = np.atleast_1d(np.asarray(values, dtype=float))
    if g.ndim != 1 or g.size == 0:
        raise ValueError(f"{name} grid must be a nonempty 1-d sequence")
    if not np.isfinite(g).all():
        raise ValueError(f"{name} grid contains non-finite values")
    if g.size > 1 and not np.all(np.diff(g) > 0.0):
        raise ValueError(f"{name} grid must be strictly increasing")
    g.setflags(write=False)
    return g


@dataclass(frozen=True)
class FamilySpec:
    """A parametrized Hamiltonian family to scan.

    Two kinds are supported: the builtin two-level Klein-Gordon family
    (H(tau) plus an optional linear coupling lam * W0) and a linear family
    H0 + lam * W0 built from user matrices.  Grids must be nonempty,
    finite and strictly increasing.
    """

    kind: str
    lambdas: np.ndarray
    taus: np.ndarray | None = None
    h0: np.ndarray | None = None
    w0: np.ndarray | None = None

    @classmethod
    def kg(cls, taus, lambdas=(0.0,), w0=None) -> "FamilySpec":
        """Klein-Gordon family over a tau grid, optionally perturbed by
        lam * w0."""
        w = None if w0 is None else as_matrix(w0, "W0")
        if w is not None and w.shape != (2, 2):
            raise ValueError("Klein-Gordon coupling W0 must be 2x2")
        return cls(
            kind="kg",
            lambdas=_validate_grid(lambdas, "lambda"),
            taus=_validate_grid(taus, "tau"),
            w0=w,
        )

    @classmethod
    def linear(cls, h0, w0, lambdas) -> "FamilySpec":
        """Linear family H0 + lam * W0."""
        h = as_matrix(h0, "H0")
        w = as_matrix(w0, "W0")
        if w.shape != h.shape:
            raise ValueError(f"W0 has shape {w.shape}, expected {h.shape}")
        return cls(
            kind="linear",
            lambdas=_validate_grid(lambdas, "lambda"),
            h0=h,
            w0=w,
        )

    def hamiltonian_at(self, lam: float, tau: float | None = None) -> np.ndarray:
        if self.kind == "kg":
            h = kg_hamiltonian(float(tau))
            if self.w0 is not None:
                h = h + lam * self.w0
            return h
        return self.h0 + lam * self.w0

    def grid(self) -> list[tuple[float, float | None]]:
        """Grid points in deterministic order: lambda outer, tau inner."""
        if self.kind == "kg":
            return [(float(l), float(t)) for l in self.lambdas for t in self.taus]
        return [(float(l), None) for l in self.lambdas]


@dataclass(frozen=True)
class ScanPoint:
    """Stability record at one grid point.

    ``note`` carries the name of the per-point failure ("Defective",
    "SpectrumNotReal", ...) and is empty on success;
    ``theta_min_eig`` is NaN when no metric witness could be assembled.
    """

    lam: float
    tau: float | None
    spectrum_real: bool
    max_imag: float
    min_gap: float
    eigvec_cond: float
    metric_exists: bool
    theta_min_eig: float
    note: str = ""


@dataclass(frozen=True)
class ScanReport:
    """Ordered per-grid-point stability records."""

    points: tuple

    def __len__(self) -> int:
        return len(self.points)


def _scan_point(spec: FamilySpec, tol: float, point) -> ScanPoint:
    lam, tau = point
    h = spec.hamiltonian_at(lam, tau)

    evals, vr = np.linalg.eig(h)
    max_imag = float(np.abs(evals.imag).max())
    scale = max(1.0, float(np.abs(evals).max()))
    real = bool(max_imag <= tol * scale)
    if evals.size < 2:
        min_gap = float("inf")
    else:
        diff = np.abs(evals[:, None] - evals[None, :])
        min_gap = float(np.min(diff[~np.eye(evals.size, dtype=bool)]))
    sv = np.linalg.svd(vr / np.linalg.norm(vr, axis=0), compute_uv=False)
    eigvec_cond = float(sv[0] / sv[-1]) if sv[-1] > 0.0 else float("inf")

    metric_exists = False
    theta_min = float("nan")
    note = ""
    try:
        system = diagonalize(h, tol)
        family = MetricFamily(system)
        witness = assemble_metric(family, np.ones(system.dim))
        theta_min = float(np.linalg.eigvalsh(witness.theta).min())
        metric_exists = theta_min > 0.0
    except CryptohermError as exc:
        note = type(exc).__name__.removesuffix("Error")

    return ScanPoint(
        lam=float(lam),
        tau=None if tau is None else float(tau),
        spectrum_real=real,
        max_imag=max_imag,
        min_gap=min_gap,
        eigvec_cond=eigvec_cond,
        metric_exists=metric_exists,
        theta_min_eig=theta_min,
        note=note,
    )


def reality_scan(spec: FamilySpec, tol: float, workers: int = 1) -> ScanReport:
    """Spectral reality and metric existence across the family grid.

    At each point the spectrum is tested for reality (relative tolerance
    ``tol``) and an all-ones-weight metric witness is attempted; any
    positive weight vector works when the spectrum is real and
    non-degenerate, so a single witness decides existence.  Per-point
    failures are recorded in the row and never abort the scan.

    Grid points are independent; ``workers > 1`` evaluates them in a
    thread pool.  Rows are always returned in grid order, so reports are
    deterministic.
    """
    tol = _check_tol(tol)
    points = spec.grid()
    eval_one = functools.partial(_scan_point, spec, tol)
    if workers == 1 or len(points) == 1:
        rows = [eval_one(p) for p in points]
    else:
        max_workers = max(1, int(workers))
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(eval_one, points))
    return ScanReport(tuple(rows))


def lambda_max(spec: FamilySpec, bracket, tol: float, direction: int = 1) -> float:
    """Bisection estimate of the spectral-reality breakdown parameter.

    The reality of the spectrum flips at an exceptional point, and the
    distance from lambda = 0 to the nearest such point is the convergence
    radius of the perturbation series; this routine locates it along the
    real axis.  ``direction = -1`` probes H(-x) instead of H(x).  The
    bracket endpoints must straddle the transition: real spectrum at the
    lower end, non-real at the upper.  ``tol`` bounds the final bracket
    width and doubles as the relative reality threshold at probe points.

    Raises
    ------
    InvalidBracketError
        The endpoints do not straddle a reality transition.
    """
    if direction not in (1, -1):
        raise ValueError(f"direction must be +1 or -1, got {direction}")
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValueError(f"bracket must be finite with lo < hi, got {(lo, hi)}")
    tol = float(tol)
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")

    tau = None
    if spec.kind == "kg":
        if spec.taus.size != 1:
            raise ValueError("boundary search on a kg family needs a single tau")
        tau = float(spec.taus[0])

    def is_real(x: float) -> bool:
        evals = np.linalg.eigvals(spec.hamiltonian_at(direction * x, tau))
        scale = max(1.0, float(np.abs(evals).max()))
        return bool(np.abs(evals.imag).max() <= tol * scale)

    if not is_real(lo) or is_real(hi):
        raise InvalidBracketError(
            "bracket endpoints do not straddle a reality transition"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_real(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def exact_matched_metric(problem: PerturbationProblem, lam: float) -> np.ndarray:
    """Exact metric of the perturbed Hamiltonian, gauge-matched to the
    problem's unperturbed metric.

    The perturbed family of metrics is assembled from the perturbed
    eigenbasis; its weights are chosen so the diagonal biorthogonal
    components in the *unperturbed* basis equal Theta's.  That is exactly
    the gauge the Taylor series uses (zero diagonal for every correction),
    so the result is directly comparable to the truncated series.
    """
    h_lam = problem.hamiltonian_at(lam)
    system = diagonalize(h_lam, problem.tol)
    require_real_nondegenerate(system)
    r0 = problem.system.right_vectors
    target = np.diag(r0.conj().T @ problem.theta.theta @ r0).real
    g = system.left_vectors.conj().T @ r0          # g[n, m] = L_n(lam)^dag R0_m
    weights = np.linalg.solve((np.abs(g) ** 2).T, target)
    l = system.left_vectors
    t = (l * weights) @ l.conj().T
    return 0.5 * (t + t.conj().T)


def series_vs_exact(problem: PerturbationProblem, order: int, lambdas) -> list[tuple[float, float]]:
    """Error table (lam, ||T_truncated(lam) - T_exact(lam)||_F).

    Every grid value must lie inside the reality domain of the perturbed
    family; per-point failures (defective or complex-spectrum points) and
    series solvability failures propagate.  As lam -> 0 the log-log slope
    of the error column approaches order + 1.
    """
    series = metric_series(problem, order)
    rows = []
    for lam in np.atleast_1d(np.asarray(lambdas, dtype=float)):
        t_exact = exact_matched_metric(problem, float(lam))
        err = float(np.linalg.norm(series.truncated(float(lam)) - t_exact))
        rows.append((float(lam), err))
    return rows
