"""Perturbation families shared by the conjecture tests."""

import math

import numpy as np

from l1coherence.conjecture import PerturbationFamily


def paley_conference(q=13):
    """Symmetric conference matrix of order q + 1 (q prime, q = 1 mod 4): C @ C = q I."""
    squares = {(k * k) % q for k in range(1, q)}
    chi = np.array([0] + [1 if k in squares else -1 for k in range(1, q)])
    Q = np.array([[chi[(i - j) % q] for j in range(q)] for i in range(q)], dtype=float)
    C = np.zeros((q + 1, q + 1))
    C[0, 1:] = C[1:, 0] = 1.0
    C[1:, 1:] = Q
    return C


def paley_family(q=13, x=1.0 / 3.0, phases=None):
    """Uniform diagonal plus c C with C the order-(q+1) conference matrix.

    The spectrum is (1 +- x) / d, so ``x`` sets lambda_max / lambda_min; the
    default puts that ratio at exactly 2. ``phases`` conjugates C by a
    diagonal unitary, which keeps both the spectrum and the entry moduli.
    """
    C = paley_conference(q).astype(complex)
    d = C.shape[0]
    if phases is not None:
        C = phases[:, None] * C * np.conj(phases)[None, :]
    return PerturbationFamily(np.full(d, 1.0 / d), x / (d * math.sqrt(q)) * C)


def random_family(rng, d, scale=1.0):
    r = rng.dirichlet(np.ones(d) * 2)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = g + g.conj().T
    np.fill_diagonal(h, 0)
    # Halve the step until r + s h is safely positive definite.
    s = 1.0
    while np.linalg.eigvalsh(np.diag(r) + s * h)[0] <= 1e-3:
        s *= 0.5
    return PerturbationFamily(r, scale * s * h)
