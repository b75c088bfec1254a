"""Factoring the metric and reconstructing the Hermitian image.

Given a metric Theta for H, the Dyson map Omega = Theta^{1/2} conjugates H
into a genuinely Hermitian matrix with the same spectrum; observables move
the other way with the inverse conjugation.

Usage:
    python3 demos/03_dyson_hermitization.py
"""

import numpy as np

from cryptoherm import (
    dyson_map,
    hermitize,
    kg_hamiltonian,
    kg_metric,
    pullback_observable,
)

TOL = 1e-10
TAU = 0.7

H = kg_hamiltonian(TAU)
theta = kg_metric(TAU, 0.2)
omega = dyson_map(theta)

print("factorization check || Omega^dag Omega - Theta || =",
      np.linalg.norm(omega.omega.conj().T @ omega.omega - theta.theta))
print("metric condition number:", round(omega.condition_number, 4))

h_image = hermitize(H, omega, TOL)
print("\nHermitian image:")
print(np.round(h_image.real, 6))
print("hermiticity defect:", np.linalg.norm(h_image - h_image.conj().T))
print("spectrum of H:      ", np.round(np.sort(np.linalg.eigvals(H).real), 8))
print("spectrum of image:  ", np.round(np.sort(np.linalg.eigvalsh(h_image)), 8))

# Round trip: pulling the image back recovers H.
back = pullback_observable(h_image, omega)
print("\nround-trip error:", np.linalg.norm(back - H))

# Pulling back any Hermitian observable yields a quasi-Hermitian one.
rng = np.random.default_rng(1)
a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
v = 0.5 * (a + a.conj().T)
pulled = pullback_observable(v, omega)
defect = np.linalg.norm(pulled.conj().T @ theta.theta - theta.theta @ pulled)
print("pulled-back observable quasi-Hermiticity defect:", defect)
