"""Dense matrix foundation: validation, eigensolving, entropies, majorization, sampling.

Density matrices and pure states are plain numpy arrays. The ``as_*``
helpers validate an input once and hand back a read-only copy, so downstream
code can treat them as immutable values.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "CoherenceError",
    "ValidationError",
    "DomainError",
    "ConvergenceError",
    "max_dim",
    "as_density",
    "as_pure",
    "as_probability",
    "projector",
    "hermitian_eig",
    "shannon_entropy",
    "binary_entropy",
    "renyi_entropy",
    "majorizes",
    "t_transform",
    "dephase",
    "rng_for",
    "random_density",
    "random_pure",
    "maximally_coherent",
]

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
PROB_SUM_TOL = 1e-10
CLAMP_TOL = 1e-12
DEFAULT_MAX_DIM = 64


class CoherenceError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(CoherenceError, ValueError):
    """Input violates a structural invariant (Hermiticity, trace, positivity, ...)."""


class DomainError(CoherenceError, ValueError):
    """Scalar argument outside the domain of a function."""


class ConvergenceError(CoherenceError, RuntimeError):
    """An iterative solver hit its iteration cap.

    ``lower`` and ``upper`` carry the best certified bounds at the time of failure.
    """

    def __init__(self, message, lower=None, upper=None, iterations=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper
        self.iterations = iterations


def max_dim() -> int:
    """Dimension cap, overridable through ``COHERENCE_MAX_DIM``."""
    raw = os.environ.get("COHERENCE_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"COHERENCE_MAX_DIM must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValidationError(f"COHERENCE_MAX_DIM must be positive, got {value}")
    return value


def _check_dim(d: int) -> None:
    cap = max_dim()
    if d > cap:
        raise ValidationError(f"dimension {d} exceeds the configured cap {cap}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _check_square(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValidationError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries")


def _check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    dev = np.abs(m - m.conj().T)
    if dev.max() > tol:
        i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
        raise ValidationError(
            f"matrix is not Hermitian: entries ({i},{j}) and ({j},{i}) differ by {dev[i, j]:.3e}"
        )


def as_density(rho) -> np.ndarray:
    """Validate a density matrix and return a read-only Hermitian copy.

    Checks Hermiticity (1e-10), unit trace (1e-10) and positivity (smallest
    eigenvalue >= -1e-9). The returned array is exactly Hermitian, i.e. the
    Hermitian part of the input.
    """
    m = np.array(rho, dtype=complex)
    _check_square(m)
    _check_dim(m.shape[0])
    _check_hermitian(m)
    m = 0.5 * (m + m.conj().T)
    tr = np.trace(m).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError(f"trace is {tr!r}, expected 1")
    lmin = np.linalg.eigvalsh(m)[0]
    if lmin < -PSD_TOL:
        raise ValidationError(f"matrix is not positive semidefinite: min eigenvalue {lmin:.3e}")
    return _frozen(m)


def as_pure(psi) -> np.ndarray:
    """Validate a normalized amplitude vector and return a read-only copy."""
    v = np.array(psi, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise ValidationError("a pure state is a non-empty 1-d amplitude vector")
    if not np.all(np.isfinite(v)):
        raise ValidationError("amplitudes are not finite")
    _check_dim(v.size)
    norm2 = float(np.vdot(v, v).real)
    if abs(norm2 - 1.0) > 1e-10:
        raise ValidationError(f"squared norm is {norm2!r}, expected 1")
    return _frozen(v)


def as_probability(p) -> np.ndarray:
    """Validate a probability vector; entries within 1e-12 of [0, 1] are clamped."""
    v = np.array(p, dtype=float).reshape(-1)
    if v.size == 0:
        raise ValidationError("empty probability vector")
    if not np.all(np.isfinite(v)):
        raise ValidationError("probability vector has non-finite entries")
    if v.min() < -CLAMP_TOL or v.max() > 1.0 + CLAMP_TOL:
        k = int(np.argmin(v)) if v.min() < -CLAMP_TOL else int(np.argmax(v))
        raise ValidationError(f"entry {k} = {v[k]!r} is outside [0, 1]")
    total = v.sum()
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise ValidationError(f"probabilities sum to {total!r}, expected 1")
    return _frozen(np.clip(v, 0.0, 1.0))


def projector(psi) -> np.ndarray:
    """|psi><psi| for a validated pure state."""
    v = as_pure(psi)
    return _frozen(np.outer(v, v.conj()))


def hermitian_eig(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order.

    Returns ``(w, V)`` with ``h @ V[:, k] == w[k] * V[:, k]`` and orthonormal
    columns in ``V``.
    """
    m = np.array(h, dtype=complex)
    _check_square(m)
    _check_hermitian(m)
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return w[::-1].copy(), v[:, ::-1].copy()


def _entropy_bits(p: np.ndarray) -> float:
    # Trusted input: non-negative, zeros allowed.
    nz = p[p > 0]
    return float(-np.dot(nz, np.log2(nz))) if nz.size else 0.0


def shannon_entropy(p) -> float:
    """Shannon entropy in bits with 0 log 0 = 0."""
    return max(_entropy_bits(as_probability(p)), 0.0)


def binary_entropy(x: float) -> float:
    """H2(x) = -x log2 x - (1-x) log2(1-x)."""
    x = float(x)
    if not (-CLAMP_TOL <= x <= 1.0 + CLAMP_TOL):
        raise DomainError(f"binary entropy argument {x!r} is outside [0, 1]")
    x = min(max(x, 0.0), 1.0)
    return _entropy_bits(np.array([x, 1.0 - x]))


def renyi_entropy(p, alpha: float) -> float:
    """Renyi entropy of order ``alpha`` in bits.

    ``alpha = 1`` is rejected: use :func:`shannon_entropy` for that limit.
    """
    alpha = float(alpha)
    if not alpha > 0.0 or alpha == 1.0:
        raise DomainError(f"Renyi order must be positive and different from 1, got {alpha!r}")
    v = as_probability(p)
    nz = v[v > 0]
    return float(np.log2(np.sum(nz**alpha)) / (1.0 - alpha))


def majorizes(p, q, tol: float = CLAMP_TOL) -> bool:
    """True iff ``p`` majorizes ``q`` (q is more mixed than p).

    Shorter vectors are padded with zeros.
    """
    a = np.array(p, dtype=float).reshape(-1)
    b = np.array(q, dtype=float).reshape(-1)
    n = max(a.size, b.size)
    a = np.sort(np.pad(a, (0, n - a.size)))[::-1]
    b = np.sort(np.pad(b, (0, n - b.size)))[::-1]
    ca, cb = np.cumsum(a), np.cumsum(b)
    if abs(ca[-1] - cb[-1]) > PROB_SUM_TOL:
        return False
    return bool(np.all(ca >= cb - tol))


def t_transform(p, i: int, j: int, t: float) -> np.ndarray:
    """Mix entries ``i`` and ``j`` of ``p``: the result is majorized by ``p``."""
    v = np.array(p, dtype=float)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"T-transform weight {t!r} is outside [0, 1]")
    a, b = v[i], v[j]
    v[i] = t * a + (1.0 - t) * b
    v[j] = (1.0 - t) * a + t * b
    return v


def dephase(rho) -> np.ndarray:
    """Completely dephased state diag(rho)."""
    m = as_density(rho)
    return _frozen(np.diag(np.diag(m).real).astype(complex))


def rng_for(seed: int, index: int | None = None) -> np.random.Generator:
    """PCG64 generator for a seed and an optional task index.

    Stream-splitting rule: task ``index`` of a campaign seeded with ``seed``
    draws from ``SeedSequence(seed, spawn_key=(index,))``. This is
    reproducible across machines and independent of scheduling order.
    """
    seed = int(seed) % (1 << 64)
    key = () if index is None else (int(index),)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def _ginibre(rng: np.random.Generator, d: int, k: int) -> np.ndarray:
    return rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))


def random_density(d: int, rank: int | None = None, seed: int = 0, *, rng=None) -> np.ndarray:
    """Induced-measure random state rho = G G^dag / tr(G G^dag), G of shape (d, rank).

    Pass either ``seed`` or an explicit ``rng``.
    """
    d = int(d)
    rank = d if rank is None else int(rank)
    if d < 1:
        raise DomainError(f"dimension must be positive, got {d}")
    _check_dim(d)
    if not 1 <= rank <= d:
        raise DomainError(f"rank must lie in [1, {d}], got {rank}")
    rng = rng_for(seed) if rng is None else rng
    g = _ginibre(rng, d, rank)
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return _frozen(m / np.trace(m).real)


def random_pure(d: int, seed: int = 0, *, rng=None) -> np.ndarray:
    """Haar-random unit vector in C^d."""
    d = int(d)
    if d < 1:
        raise DomainError(f"dimension must be positive, got {d}")
    _check_dim(d)
    rng = rng_for(seed) if rng is None else rng
    v = _ginibre(rng, d, 1)[:, 0]
    return _frozen(v / np.linalg.norm(v))


def maximally_coherent(d: int) -> np.ndarray:
    """Uniform superposition |Psi> = sum_i |i> / sqrt(d)."""
    d = int(d)
    if d < 1:
        raise DomainError(f"dimension must be positive, got {d}")
    return _frozen(np.full(d, 1.0 / np.sqrt(d), dtype=complex))
