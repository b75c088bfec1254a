"""Independent brute-force oracles used across the test suite.

Everything here is raw numpy/scipy so that expected values never flow
through the code paths under test.
"""

import numpy as np


def sorted_eig(h):
    """Eigendecomposition sorted by (Re, Im), right vectors unit-norm."""
    evals, vr = np.linalg.eig(h)
    order = np.lexsort((evals.imag, evals.real))
    evals = evals[order]
    vr = vr[:, order]
    return evals, vr / np.linalg.norm(vr, axis=0)


def biorthogonal(h):
    """(eigenvalues, R, L) with L^dag R = I, built by inverting R."""
    evals, vr = sorted_eig(h)
    vl = np.linalg.inv(vr).conj().T
    return evals, vr, vl


def first_order_shifts(h, w):
    """dE_n/dlam of H + lam W by the biorthogonal formula
    L_n^dag W R_n / L_n^dag R_n."""
    _, vr, vl = biorthogonal(h)
    num = np.einsum("in,ij,jn->n", vl.conj(), w, vr)
    den = np.einsum("in,in->n", vl.conj(), vr)
    return num / den


def matched_exact_metric(h_lam, theta0, r0):
    """Exact metric of ``h_lam`` whose diagonal components in the ``r0``
    basis match those of ``theta0`` (the series gauge)."""
    evals, _, vl = biorthogonal(h_lam)
    assert float(np.abs(evals.imag).max()) < 1e-9, "oracle needs a real spectrum"
    target = np.diag(r0.conj().T @ theta0 @ r0).real
    g = vl.conj().T @ r0
    weights = np.linalg.solve((np.abs(g) ** 2).T, target)
    t = (vl * weights) @ vl.conj().T
    return 0.5 * (t + t.conj().T)


def hermitian_root(m):
    """Principal square root of a Hermitian positive-definite matrix."""
    w, u = np.linalg.eigh(0.5 * (m + m.conj().T))
    assert w.min() > 0.0
    return (u * np.sqrt(w)) @ u.conj().T


def exact_dyson_correction(t_exact, theta, lam):
    """Exact Delta_lam with Theta*Delta Hermitian from the factorization
    T = (1 + lam Delta)^dag Theta (1 + lam Delta).

    Writing G = Theta (1 + lam Delta), the gauge makes G Hermitian and
    T = G Theta^{-1} G, so G is recovered through principal roots.
    """
    root = hermitian_root(theta)
    w, u = np.linalg.eigh(0.5 * (theta + theta.conj().T))
    inv_root = (u / np.sqrt(w)) @ u.conj().T
    inner = hermitian_root(inv_root @ t_exact @ inv_root)
    g = root @ inner @ root
    return (np.linalg.solve(theta, g) - np.eye(theta.shape[0])) / lam


def random_real_spectrum_matrix(rng, n, gap=0.3, cond_max=8.0):
    """(H, E, S): H = S diag(E) S^{-1} with real well-separated eigenvalues
    and a modestly conditioned eigenvector matrix."""
    while True:
        e = np.sort(rng.uniform(-2.0, 2.0, n))
        if n == 1 or float(np.min(np.diff(e))) >= gap:
            break
    while True:
        s = np.eye(n) + 0.35 * (
            rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        )
        if np.linalg.cond(s) <= cond_max:
            break
    h = s @ np.diag(e) @ np.linalg.inv(s)
    return h, e, s


def metric_from_seed(rng, s, lo=0.5, hi=2.0):
    """A metric compatible with H = S diag(E) S^{-1}: Theta = S^{-dag} K S^{-1}
    for a random positive diagonal K."""
    n = s.shape[0]
    k = rng.uniform(lo, hi, n)
    s_inv = np.linalg.inv(s)
    th = s_inv.conj().T @ np.diag(k) @ s_inv
    return 0.5 * (th + th.conj().T)


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (a + a.conj().T)
