"""Order-by-order response of the metric to a perturbation.

Perturbing H -> H + lambda*W forces the metric to move too.  This demo
computes the Taylor corrections T^(1), T^(2), checks them against the
exactly constructed metric of the perturbed Hamiltonian, reconstructs the
Dyson-factor corrections, and shows the difference between a prescribed
perturbation W and its image V.

Usage:
    python3 demos/04_metric_perturbation_series.py
"""

import numpy as np

from cryptoherm import (
    PerturbationProblem,
    SolvabilityViolatedError,
    commutator_gap,
    dyson_from_metric,
    exact_matched_metric,
    kg_hamiltonian,
    kg_metric,
    metric_series,
    series_vs_exact,
    v_from_w,
)

TOL = 1e-10

W0 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
problem = PerturbationProblem.build(kg_hamiltonian(0.2), kg_metric(0.2, 0.25), [W0], TOL)

series = metric_series(problem, 2)
for k in range(1, 3):
    print(f"T^({k}) =")
    print(np.round(series.t_coeffs[k].real, 6))
    print(f"   solvability residual: {series.solvability_residuals[k]:.2e}")

print("\ntruncation error vs the exact metric (log-log slope -> K+1):")
for order in (1, 2):
    table = series_vs_exact(problem, order, [1e-3, 1e-2, 1e-1])
    slope = np.polyfit(np.log10([r[0] for r in table]),
                       np.log10([r[1] for r in table]), 1)[0]
    rows = "  ".join(f"{lam:.0e}:{err:.2e}" for lam, err in table)
    print(f"  K={order}: {rows}  slope = {slope:.3f}")

deltas = dyson_from_metric(series, problem.theta)
print("\nDelta_0 =")
print(np.round(deltas.delta_coeffs[0].real, 6))

# W and its image V differ by the commutator term already at lambda -> 0.
lam = 0.05
t_exact = exact_matched_metric(problem, lam)
v = v_from_w(W0, deltas.delta_coeffs[0], problem.h, lam)
gap = commutator_gap(v, W0, deltas.delta_coeffs[0], problem.h)
print(f"\nat lambda = {lam}: ||V - W|| = {np.linalg.norm(v - W0):.4f}, "
      f"residual after removing the commutator term = {gap:.2e}")

# A perturbation that drives the energies complex is caught at order 1.
bad = PerturbationProblem.build(
    np.diag([1.0, 2.0]).astype(complex), np.eye(2), [np.array([[1j, 0], [0, 0]])], TOL
)
try:
    metric_series(bad, 1)
except SolvabilityViolatedError as exc:
    print("\ncomplex first-order energy shift detected:", exc)
