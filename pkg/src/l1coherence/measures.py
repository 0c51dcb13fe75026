"""Coherence monotones: l1-norm, relative entropy, logarithmic, robustness, convex roof."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm, expm_frechet
from scipy.optimize import minimize

from ._simplex import CutPool
from .core import (
    ConvergenceError,
    DomainError,
    ValidationError,
    _entropy_bits,
    as_density,
    as_pure,
    rng_for,
)

__all__ = [
    "RobustnessSolution",
    "ConvexRoofDecomposition",
    "c_l1",
    "c_r",
    "c_log",
    "c_robustness",
    "c_robustness_pure",
    "convex_roof_qubit",
    "convex_roof_upper",
    "negativity_mc",
    "maximally_correlated_state",
    "partial_transpose_spectrum",
]

CR_CLAMP = 1e-9
# A row is dropped from the robustness program only if it is numerically zero.
_ZERO_ROW = 1e-14
_DEGENERATE = 1e-9
_IN_OUT = 0.3


@dataclass(frozen=True)
class RobustnessSolution:
    """Certified solution of the robustness program.

    ``value`` is tr(witness_diag) - 1 for a feasible witness (witness_diag >= rho),
    ``lower_bound`` is tr(rho T) - 1 for the dual-feasible ``dual_witness`` T,
    and ``gap = value - lower_bound``.
    """

    value: float
    witness_diag: np.ndarray
    dual_witness: np.ndarray | None
    gap: float
    lower_bound: float
    iterations: int


@dataclass(frozen=True)
class ConvexRoofDecomposition:
    weights: np.ndarray
    states: list = field(repr=False)
    achieved_value: float

    @property
    def components(self):
        return list(zip(self.weights.tolist(), self.states))

    def reconstruct(self) -> np.ndarray:
        d = self.states[0].size
        out = np.zeros((d, d), dtype=complex)
        for p, psi in zip(self.weights, self.states):
            out += p * np.outer(psi, psi.conj())
        return out


def _c_l1(m: np.ndarray) -> float:
    # Sum off-diagonal moduli directly; subtracting the diagonal would cancel.
    a = np.abs(m)
    np.fill_diagonal(a, 0.0)
    return float(a.sum())


def _c_r(m: np.ndarray) -> float:
    diag = np.clip(np.diag(m).real, 0.0, None)
    eig = np.clip(np.linalg.eigvalsh(m), 0.0, None)
    value = _entropy_bits(diag) - _entropy_bits(eig)
    if -CR_CLAMP <= value < 0.0:
        return 0.0
    return value


def c_l1(rho) -> float:
    """Sum of the moduli of all off-diagonal entries."""
    return _c_l1(as_density(rho))


def c_r(rho) -> float:
    """Relative entropy of coherence H(diag rho) - H(spectrum rho), in bits.

    Values in [-1e-9, 0) are eigensolver noise and are returned as 0.
    """
    return _c_r(as_density(rho))


def c_log(rho) -> float:
    """Logarithmic coherence log2(1 + C_l1)."""
    return float(np.log2(1.0 + c_l1(rho)))


def c_robustness_pure(psi) -> float:
    """Robustness of a pure state, which equals its l1 coherence (sum |psi_i|)^2 - 1."""
    v = as_pure(psi)
    return float(np.abs(v).sum() ** 2 - 1.0)


def c_robustness(rho, tol: float = 1e-7, max_iter: int | None = None) -> RobustnessSolution:
    """Robustness of coherence by cutting planes over the diagonal witness.

    Solves ``min sum_i D_i`` subject to ``D - rho >= 0`` with ``D`` diagonal.
    The constraint ``<v|D|v> >= <v|rho|v>`` is linear in ``D`` for every
    vector ``v``; the cut set starts from the standard basis and the
    eigenvectors of ``rho``, and each round adds the minimum eigenvector(s)
    of ``D - rho``. A feasible witness is ``D + max(0, -lambda_min) I``; the
    master LP multipliers assemble a dual witness ``T >= 0`` with unit
    diagonal, whose value ``tr(rho T) - 1`` certifies the lower bound.

    Raises:
        DomainError: ``tol`` is not positive.
        ConvergenceError: more than ``max_iter`` rounds (default ``500 d``);
            carries the best lower and upper bounds.
    """
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol!r}")
    m = as_density(rho)
    d = m.shape[0]
    max_iter = 500 * d if max_iter is None else int(max_iter)

    support = np.flatnonzero(np.abs(m).max(axis=1) > _ZERO_ROW)
    D_full = np.zeros(d)
    T_full = np.eye(d, dtype=complex)
    iterations = 0
    if support.size > 1 and _c_l1(m[np.ix_(support, support)]) > 0.0:
        sub = m[np.ix_(support, support)]
        D_sub, T_sub, iterations = _cutting_plane(sub, tol, max_iter)
        D_full[support] = D_sub
        T_full[np.ix_(support, support)] = T_sub
    else:
        D_full[support] = np.diag(m).real[support]

    # Certify on the full matrix, absorbing any dust from dropped rows.
    lmin = np.linalg.eigvalsh(np.diag(D_full) - m)[0]
    if lmin < 0.0:
        D_full = D_full + (-lmin)
    value = max(float(D_full.sum() - 1.0), 0.0)
    lower = float(np.real(np.sum(m * T_full.T)) - 1.0)
    return RobustnessSolution(
        value=value,
        witness_diag=D_full,
        dual_witness=T_full,
        gap=max(value - lower, 0.0),
        lower_bound=lower,
        iterations=iterations,
    )


def _cutting_plane(rho: np.ndarray, tol: float, max_iter: int):
    d = rho.shape[0]
    pool = CutPool(np.diag(rho).real, max_nonbasic=20 * d)
    w, V = np.linalg.eigh(rho)
    pool.add(V, w)
    # Incumbent feasible witness, starting from the uniformly shifted diagonal.
    diag = np.diag(rho).real
    best = diag + max(0.0, -np.linalg.eigvalsh(np.diag(diag) - rho)[0])
    lower = -np.inf
    for it in range(max_iter + 1):
        D, y = pool.solve()
        lower = max(lower, float(D.sum()) - 1.0)
        lam, U = np.linalg.eigh(np.diag(D) - rho)
        candidate = D + max(0.0, -lam[0])
        if candidate.sum() < best.sum():
            best = candidate
        if best.sum() - 1.0 - lower <= tol:
            vecs = pool.vecs[:, pool.basis]
            T = (vecs * y) @ vecs.conj().T
            return best, T, it
        if it == max_iter:
            break
        cuts = [U[:, np.flatnonzero(lam <= lam[0] + _DEGENERATE)]] if lam[0] < 0.0 else []
        # In-out separation: also cut at a point between the LP optimum and
        # the incumbent; this roughly halves the number of rounds.
        probe = _IN_OUT * D + (1.0 - _IN_OUT) * best
        lam2, U2 = np.linalg.eigh(np.diag(probe) - rho)
        if lam2[0] < 0.0:
            cuts.append(U2[:, :1])
        candidate = probe + max(0.0, -lam2[0])
        if candidate.sum() < best.sum():
            best = candidate
        if cuts:
            c = np.hstack(cuts)
            pool.add(c, np.real(np.einsum("ik,ij,jk->k", c.conj(), rho, c)))
    raise ConvergenceError(
        f"cutting-plane solver did not reach tolerance {tol:g} in {max_iter} rounds",
        lower=lower,
        upper=float(best.sum()) - 1.0,
        iterations=max_iter,
    )


def negativity_mc(rho) -> float:
    """Negativity of the maximally correlated state sum_ij rho_ij |ii><jj|.

    The partial transpose has spectrum {rho_ii} together with +-|rho_ij| for
    i < j, so the negativity is the upper-triangle l1 mass.
    """
    m = as_density(rho)
    return float(np.abs(np.triu(m, 1)).sum())


def maximally_correlated_state(rho) -> np.ndarray:
    """The d^2 x d^2 matrix sum_ij rho_ij |ii><jj|."""
    m = as_density(rho)
    d = m.shape[0]
    idx = np.arange(d) * (d + 1)
    out = np.zeros((d * d, d * d), dtype=complex)
    out[np.ix_(idx, idx)] = m
    return out


def partial_transpose_spectrum(rho) -> np.ndarray:
    """Closed-form spectrum of the partial transpose of the maximally correlated state.

    Includes the d(d-1) zeros on the remaining basis vectors, sorted descending.
    """
    m = as_density(rho)
    d = m.shape[0]
    iu = np.triu_indices(d, 1)
    mags = np.abs(m[iu])
    zeros = np.zeros(d * d - d - 2 * mags.size)
    return np.sort(np.concatenate([np.diag(m).real, mags, -mags, zeros]))[::-1]


def convex_roof_qubit(rho) -> ConvexRoofDecomposition:
    """Optimal two-term pure-state decomposition of a qubit.

    Both components carry C_l1 = 2|rho_01|, so the average equals C_l1(rho).
    The off-diagonal phase is removed by an incoherent unitary and put back
    on the output states. Diagonal states decompose into basis states.
    """
    m = as_density(rho)
    if m.shape != (2, 2):
        raise ValidationError(f"expected a qubit state, got shape {m.shape}")
    a = float(m[0, 0].real)
    off = complex(m[0, 1])
    b = abs(off)
    phase = np.exp(-1j * np.angle(off))
    if b == 0.0:
        weights, states = [], []
        for k, p in enumerate((a, 1.0 - a)):
            if p > 0.0:
                weights.append(p)
                states.append(np.eye(2, dtype=complex)[k])
        return _decomposition(weights, states)
    det = a * (1.0 - a) - b * b
    if det < -1e-12:
        raise ValidationError(f"off-diagonal modulus {b!r} violates qubit positivity")
    if det <= 1e-12:
        # Rank one: the state is its own decomposition.
        psi = np.array([np.sqrt(a), np.sqrt(1.0 - a) * phase])
        return _decomposition([1.0], [psi])
    s = np.sqrt(1.0 - 4.0 * b * b)
    lam = 0.5 * (1.0 + s)
    p = 0.5 - 0.5 * (1.0 - 2.0 * a) / s
    psi1 = np.array([np.sqrt(lam), np.sqrt(1.0 - lam) * phase])
    psi2 = np.array([np.sqrt(1.0 - lam), np.sqrt(lam) * phase])
    weights, states = [], []
    for w, psi in ((p, psi1), (1.0 - p, psi2)):
        if w > 1e-15:
            weights.append(w)
            states.append(psi)
    return _decomposition(weights, states)


def _decomposition(weights, states) -> ConvexRoofDecomposition:
    w = np.asarray(weights, dtype=float)
    w = w / w.sum()
    value = float(sum(p * (np.abs(s).sum() ** 2 - 1.0) for p, s in zip(w, states)))
    return ConvexRoofDecomposition(weights=w, states=[np.asarray(s) for s in states], achieved_value=value)


def convex_roof_upper(
    rho, ensemble_size: int | None = None, restarts: int = 4, seed: int = 0
) -> ConvexRoofDecomposition:
    """Heuristic upper bound on the convex roof of C_l1.

    Every ensemble of ``m`` pure states realizing ``rho`` is ``U A^T`` for an
    ``m x rank`` isometry ``U``, where ``A = V sqrt(Lambda)`` comes from the
    eigendecomposition. The average coherence of that ensemble is
    ``sum_j (sum_i |(U A^T)_ji|)^2 - 1``; it is minimized over ``U`` with
    L-BFGS on the unitary orbit ``expm(K) U0`` from several starts (the
    spectral ensemble first, then Haar-random isometries), smoothing
    ``|z| -> sqrt(|z|^2 + mu^2)`` with ``mu`` driven to zero.

    The result is only an upper bound: no global optimality is claimed.
    """
    m = as_density(rho)
    d = m.shape[0]
    w, V = np.linalg.eigh(m)
    keep = w > 1e-13
    A = V[:, keep] * np.sqrt(w[keep])
    r = A.shape[1]
    size = d + 1 if ensemble_size is None else int(ensemble_size)
    if size < r:
        raise DomainError(f"ensemble size {size} is below the rank {r} of the state")
    rng = rng_for(seed)

    best_val, best_U = np.inf, None
    for attempt in range(max(1, int(restarts))):
        if attempt == 0:
            U = np.zeros((size, r), dtype=complex)
            U[:r, :r] = np.eye(r)
        else:
            z = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
            q, _ = np.linalg.qr(z)
            U = q[:, :r]
        for mu in (1e-2, 1e-4, 1e-6, 1e-8, 0.0):
            U = _roof_descent(U, A, mu)
        val = float((np.abs(U @ A.T).sum(axis=1) ** 2).sum() - 1.0)
        if val < best_val:
            best_val, best_U = val, U

    vecs = best_U @ A.T
    weights, states = [], []
    for row in vecs:
        p = float(np.vdot(row, row).real)
        if p > 1e-15:
            weights.append(p)
            states.append(row / np.sqrt(p))
    return _decomposition(weights, states)


def _skew_from_params(x: np.ndarray, n: int) -> np.ndarray:
    iu = np.triu_indices(n, 1)
    k = iu[0].size
    K = np.zeros((n, n), dtype=complex)
    K[iu] = x[:k] + 1j * x[k : 2 * k]
    K = K - K.conj().T
    K[np.diag_indices(n)] = 1j * x[2 * k :]
    return K


def _skew_gradient(G: np.ndarray, n: int) -> np.ndarray:
    # df = Re tr(G^dag dK) restricted to anti-Hermitian dK.
    iu = np.triu_indices(n, 1)
    gx = (G[iu] - G.T[iu]).real
    gy = (G[iu] + G.T[iu]).imag
    return np.concatenate([gx, gy, np.diag(G).imag])


def _roof_descent(U0: np.ndarray, A: np.ndarray, mu: float) -> np.ndarray:
    n = U0.shape[0]
    Ac = A.conj()

    def fun(x):
        K = _skew_from_params(x, n)
        U = expm(K) @ U0
        P = U @ A.T
        mag = np.sqrt(np.abs(P) ** 2 + mu * mu)
        s = mag.sum(axis=1)
        safe = np.where(mag > 0.0, mag, 1.0)
        G = (2.0 * s[:, None] * P / safe) @ Ac
        _, L = expm_frechet(K.conj().T, G @ U0.conj().T)
        return float((s**2).sum()), _skew_gradient(L, n)

    res = minimize(
        fun,
        np.zeros(n * n),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": 2000, "gtol": 1e-14, "ftol": 1e-16},
    )
    return expm(_skew_from_params(res.x, n)) @ U0
