"""Independent reference computations used to check the package.

Each oracle takes a different route from the code under test: matrix
logarithms instead of spectra, explicit partial transposes instead of the
closed-form spectrum, one-dimensional search instead of cutting planes.
"""

import math

import numpy as np
from scipy.linalg import logm


def h2(x):
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def relative_entropy_of_coherence(rho):
    """S(rho || diag rho) via matrix logarithms; needs a full-rank state."""
    rho = np.asarray(rho, dtype=complex)
    diag = np.diag(np.diag(rho))
    val = np.trace(rho @ (logm(rho) - logm(diag))).real
    return val / math.log(2.0)


def l1_by_loops(rho):
    d = rho.shape[0]
    return sum(abs(rho[i, j]) for i in range(d) for j in range(d) if i != j)


def negativity_bruteforce(rho):
    """Negativity of sum_ij rho_ij |ii><jj| from an explicit partial transpose."""
    d = rho.shape[0]
    sigma = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            sigma[i * d + i, j * d + j] = rho[i, j]
    # Indices (a b, c d) -> (a d, c b): transpose on the second factor.
    pt = sigma.reshape(d, d, d, d).transpose(0, 3, 2, 1).reshape(d * d, d * d)
    w = np.linalg.eigvalsh(pt)
    return float(-w[w < 0].sum())


def _qubit_scale(a, b, t):
    """Smallest S with S diag(t, 1-t) >= [[a, b], [b*, 1-a]]."""
    # Feasible iff S t >= a, S (1-t) >= 1-a and (S t - a)(S (1-t) - (1-a)) >= |b|^2.
    qa = t * (1 - t)
    qb = -(t * (1 - a) + a * (1 - t))
    qc = a * (1 - a) - b * b
    disc = qb * qb - 4 * qa * qc
    return (-qb + math.sqrt(max(disc, 0.0))) / (2 * qa)


def qubit_robustness(rho, grid=2001):
    """min over t of S(t) - 1 by a grid search refined with golden-section."""
    a = float(np.real(rho[0, 0]))
    b = abs(rho[0, 1])
    if b == 0.0:
        return 0.0
    ts = np.linspace(1e-9, 1 - 1e-9, grid)
    vals = [_qubit_scale(a, b, t) for t in ts]
    k = int(np.argmin(vals))
    lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, grid - 1)]
    g = (math.sqrt(5) - 1) / 2
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = _qubit_scale(a, b, x1), _qubit_scale(a, b, x2)
    for _ in range(200):
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = _qubit_scale(a, b, x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = _qubit_scale(a, b, x2)
    return min(f1, f2) - 1.0


def cr_spectral(rho):
    """C_r straight from numpy eigenvalues and the definition."""
    def ent(p):
        p = p[p > 1e-300]
        return float(-(p * np.log2(p)).sum())
    return ent(np.clip(np.diag(rho).real, 0, None)) - ent(np.clip(np.linalg.eigvalsh(rho), 0, None))


def cr_finite_difference(family_at, eps, h=1e-5):
    """Central difference of C_r along eps -> family_at(eps)."""
    return (cr_spectral(family_at(eps + h)) - cr_spectral(family_at(eps - h))) / (2 * h)


def qubit_log_ratio_integral(a, c, eps=1.0):
    """int_0^eps log2((a + c x) / (a - c x)) dx in closed form."""
    def f(x):
        return (a + c * x) * math.log(a + c * x) + (a - c * x) * math.log(a - c * x)
    return (f(eps) - f(0.0)) / (c * math.log(2.0))


def random_unitary(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_ensemble(rng, d, k):
    """k random full-rank states and Dirichlet weights."""
    states = []
    for _ in range(k):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        m = g @ g.conj().T
        states.append(m / np.trace(m).real)
    return rng.dirichlet(np.ones(k)), states
