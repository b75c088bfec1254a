"""The metric ambiguity and its removal by observables.

A quasi-Hermitian H admits a whole family of metrics Theta(kappa), one
positive weight per eigenvalue.  For the two-level Klein-Gordon model the
family is known in closed form, which makes the ambiguity tangible: every
weight choice lands somewhere on the (scale, beta) family, and one extra
observable pins beta down.

Usage:
    python3 demos/02_metric_family_and_observables.py
"""

import numpy as np

from cryptoherm import (
    MetricFamily,
    UnderdeterminedError,
    assemble_metric,
    diagonalize,
    fix_ambiguity,
    kg_beta,
    kg_hamiltonian,
    kg_metric,
    quasi_hermiticity_residual,
)

TOL = 1e-10
TAU = 0.4

H = kg_hamiltonian(TAU)
family = MetricFamily(diagonalize(H, TOL))

print("every positive weight vector gives a valid metric:")
rng = np.random.default_rng(0)
for _ in range(3):
    kappa = rng.uniform(0.2, 3.0, 2)
    theta = assemble_metric(family, kappa)
    scale = theta.theta[0, 0].real * np.exp(TAU)
    beta = theta.theta[0, 1].real / scale
    res = quasi_hermiticity_residual(H, theta)
    print(f"  kappa = {np.round(kappa, 3)} -> beta = {beta:+.4f}, "
          f"scale = {scale:.4f}, residual = {res:.1e}")

# The Hamiltonian alone can never remove the ambiguity.
try:
    fix_ambiguity(family, [H], TOL)
except UnderdeterminedError as exc:
    print("\nH alone:", exc)

# One generic observable makes the metric unique (up to scale).
obs = np.array([[0.0, 0.0], [1.0, 2.0]])
expected_beta = kg_beta(0.0, 0.0, 1.0, 2.0, TAU)
kappa = fix_ambiguity(family, [obs], TOL)
theta = assemble_metric(family, kappa).theta
scale = theta[0, 0].real * np.exp(TAU)
print(f"\nobservable {obs.tolist()} selects kappa = {np.round(kappa, 6)}")
print(f"beta = {theta[0, 1].real / scale:+.6f} (closed form: {expected_beta:+.6f})")
print("matches the closed-form metric:",
      np.linalg.norm(theta / scale - kg_metric(TAU, expected_beta).theta) < 1e-10)

# Positivity bounds the ambiguity: |beta| < 1, and the metric degenerates
# at the edge.
print("\nsmallest metric eigenvalue as beta -> 1 (tau = 0): ")
for beta in (0.9, 0.99, 0.999):
    smallest = np.linalg.eigvalsh(kg_metric(0.0, beta).theta).min()
    print(f"  beta = {beta}: {smallest:.4f}")
