"""Evidence for C_r <= C_l1: perturbation families, sufficient conditions, randomized scans.

A family is rho(eps) = r + eps * delta with r diagonal and delta Hermitian
with zero diagonal. Its l1 coherence is linear in eps while C_r is O(eps^2)
near zero. Two sufficient conditions certify C_r <= C_l1 along a whole
family; everything else falls back to direct evaluation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .bounds import (
    LOG2E,
    SATISFIED_TOL,
    diag_rank,
    mixed_cr_upper,
    pure_cr_tight_bounds,
    qubit_cr_bounds,
    robustness_cr_floor,
)
from .core import (
    CoherenceError,
    ConvergenceError,
    DomainError,
    ValidationError,
    as_density,
    random_density,
    random_pure,
    rng_for,
)
from .measures import _c_l1, _c_r, c_robustness

__all__ = [
    "SingularDerivativeError",
    "PerturbationFamily",
    "Derivative",
    "IntegralBound",
    "Verdict",
    "ConjectureCertificate",
    "RegionSample",
    "family_state",
    "cr_derivative_hf",
    "spectral_condition",
    "integral_bound",
    "pseudopure_decomposition",
    "certify",
    "sample_state",
    "region_scan",
    "region_summary",
    "boundary_curves",
    "find_ordering_witness",
    "run_campaign",
]

ZERO_EIG = 1e-12
NEAR_DEGENERATE = 1e-10
VIOLATION = -1e-7


class SingularDerivativeError(CoherenceError, ArithmeticError):
    """The derivative of C_r diverges because rho(eps) has a zero eigenvalue."""


@dataclass(frozen=True)
class PerturbationFamily:
    """rho(eps) = r + eps * delta for eps in [0, 1].

    ``diagonal_part`` (r) may be given as a diagonal matrix or as its
    diagonal; it is stored as a matrix. ``offdiag_part`` (delta) must be
    Hermitian with an exactly zero diagonal.
    """

    diagonal_part: np.ndarray
    offdiag_part: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.diagonal_part)
        if r.ndim == 2:
            if np.any(r - np.diag(np.diag(r))):
                raise ValidationError("diagonal_part must be a diagonal matrix")
            r = np.diag(r)
        if np.any(np.abs(np.imag(r)) > 0):
            raise ValidationError("diagonal_part must be real")
        r = np.real(r).astype(float).reshape(-1)
        delta = np.asarray(self.offdiag_part, dtype=complex)
        if delta.shape != (r.size, r.size):
            raise ValidationError(f"offdiag_part has shape {delta.shape}, expected {(r.size, r.size)}")
        if np.any(np.diag(delta) != 0):
            raise ValidationError("offdiag_part must have an exactly zero diagonal")
        r_mat = np.diag(r).astype(complex)
        # Endpoints valid => whole segment valid by convexity.
        as_density(r_mat)
        as_density(r_mat + delta)
        r_mat.setflags(write=False)
        delta = 0.5 * (delta + delta.conj().T)
        delta.setflags(write=False)
        object.__setattr__(self, "diagonal_part", r_mat)
        object.__setattr__(self, "offdiag_part", delta)

    @classmethod
    def from_state(cls, rho) -> "PerturbationFamily":
        """Split a state into its dephased part and its off-diagonal part."""
        m = as_density(rho)
        return cls(np.diag(m).real.copy(), m - np.diag(np.diag(m)))

    @property
    def r(self) -> np.ndarray:
        return np.diag(self.diagonal_part).real

    @property
    def d(self) -> int:
        return self.diagonal_part.shape[0]

    def at(self, eps: float) -> np.ndarray:
        return self.diagonal_part + eps * self.offdiag_part


def family_state(fam: PerturbationFamily, eps: float) -> np.ndarray:
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise DomainError(f"eps must lie in [0, 1], got {eps!r}")
    return as_density(fam.at(eps))


class Derivative(NamedTuple):
    value: float
    near_degenerate: bool


def cr_derivative_hf(fam: PerturbationFamily, eps: float) -> Derivative:
    """dC_r/d eps from eigenvalue perturbation theory.

    Each eigenvalue moves at rate <v_i|delta|v_i>, and the rates sum to zero,
    so dC_r/d eps = sum_i <v_i|delta|v_i> log2(lambda_i). Inside a degenerate
    block log2(lambda) is constant, so the block sum does not depend on the
    eigenvector choice; ``near_degenerate`` flags spectral gaps below 1e-10.
    """
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise DomainError(f"eps must lie in [0, 1], got {eps!r}")
    if not np.any(fam.offdiag_part):
        return Derivative(0.0, False)
    w, V = np.linalg.eigh(fam.at(eps))
    if w[0] <= ZERO_EIG:
        raise SingularDerivativeError(
            f"rho({eps}) has eigenvalue {w[0]:.3e}; the derivative of C_r diverges"
        )
    rates = np.einsum("ik,ij,jk->k", V.conj(), fam.offdiag_part, V).real
    near = bool(np.any(np.diff(w) < NEAR_DEGENERATE))
    return Derivative(float(np.dot(rates, np.log2(w))), near)


def _spectral_terms(fam: PerturbationFamily) -> tuple[float, float, str]:
    d = fam.d
    l1 = _c_l1(fam.offdiag_part)
    if not np.any(fam.offdiag_part):
        return 0.0, 0.0, "no off-diagonal part"
    if np.max(np.abs(fam.r - 1.0 / d)) > 1e-12:
        return l1, math.inf, "diagonal part is not uniform"
    w = np.linalg.eigvalsh(fam.at(1.0))
    if w[0] <= ZERO_EIG:
        return l1, math.inf, "rho(1) is rank deficient"
    return l1, math.log2(w[-1] / w[0]), "uniform diagonal"


def spectral_condition(fam: PerturbationFamily) -> bool:
    """C_l1(rho(1)) >= log2(lambda_max(1) / lambda_min(1)) for a uniform diagonal.

    When true, C_r(rho(eps)) <= C_l1(rho(eps)) for every eps in [0, 1].
    Non-uniform diagonals and rank-deficient endpoints give False.
    """
    lhs, rhs, _ = _spectral_terms(fam)
    return lhs >= rhs


class IntegralBound(NamedTuple):
    lhs: float
    rhs: float
    error: float
    proved: bool
    conclusive: bool


def _simpson(values: np.ndarray, h: float) -> float:
    return float(h / 3.0 * (values[0] + values[-1] + 4.0 * values[1:-1:2].sum() + 2.0 * values[2:-1:2].sum()))


def integral_bound(fam: PerturbationFamily, eps: float = 1.0, quad_points: int = 129) -> IntegralBound:
    """Check int_0^eps log2(lambda_max/lambda_min) <= eps * C_l1(rho(1)).

    The integral uses composite Simpson on ``quad_points`` nodes and on the
    doubled grid, combined by one Richardson step; ``error`` is the
    Richardson correction and is added to ``lhs`` before comparing. A zero
    eigenvalue at any node makes the check inconclusive.
    """
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise DomainError(f"eps must lie in [0, 1], got {eps!r}")
    quad_points = int(quad_points)
    if quad_points < 3 or quad_points % 2 == 0:
        raise DomainError(f"Simpson's rule needs an odd number of nodes >= 3, got {quad_points}")
    rhs = eps * _c_l1(fam.offdiag_part)
    if eps == 0.0 or not np.any(fam.offdiag_part):
        # C_r is identically zero along a trivial family.
        return IntegralBound(0.0, rhs, 0.0, True, True)
    fine = 2 * quad_points - 1
    grid = np.linspace(0.0, eps, fine)
    stack = fam.diagonal_part[None, :, :] + grid[:, None, None] * fam.offdiag_part[None, :, :]
    w = np.linalg.eigvalsh(stack)
    if np.any(w[:, 0] <= ZERO_EIG):
        return IntegralBound(math.inf, rhs, math.inf, False, False)
    f = np.log2(w[:, -1] / w[:, 0])
    h = eps / (fine - 1)
    s_fine = _simpson(f, h)
    s_coarse = _simpson(f[::2], 2.0 * h)
    correction = (s_fine - s_coarse) / 15.0
    lhs = s_fine + correction
    error = abs(correction)
    return IntegralBound(lhs, rhs, error, lhs + error <= rhs + 1e-9, True)


def pseudopure_decomposition(rho, tol: float = 1e-10):
    """Exact decomposition rho = p |psi><psi| + (1 - p) diag(delta), or None.

    The off-diagonal part must factor as x_i conj(x_j); the rank-one factor
    is recovered algebraically from the largest off-diagonal entry and a
    third coupled index, then checked entrywise. Nothing heuristic: a
    ``None`` just means no certificate.
    """
    m = as_density(rho)
    d = m.shape[0]
    diag = np.diag(m).real
    off = m - np.diag(np.diag(m))
    mags = np.abs(off)
    if mags.max() <= tol:
        e0 = np.zeros(d, dtype=complex)
        e0[0] = 1.0
        return 0.0, e0, diag.copy()
    j, k = np.unravel_index(int(np.argmax(mags)), mags.shape)
    others = [i for i in range(d) if i not in (j, k)]
    coupled = [i for i in others if mags[i, j] > tol and mags[i, k] > tol]
    if coupled:
        i = max(coupled, key=lambda t: mags[t, j] * mags[t, k])
        t2 = m[i, j] * m[j, k] / m[i, k]
        if abs(t2.imag) > tol or t2.real <= 0.0:
            return None
        t2 = t2.real
    else:
        t2 = diag[j]
    t = math.sqrt(t2)
    x = off[:, j] / t
    x[j] = t
    x[k] = np.conj(m[j, k]) / t
    resid = off - (np.outer(x, x.conj()) - np.diag(np.abs(x) ** 2))
    if np.abs(resid).max() > tol:
        return None
    rest = diag - np.abs(x) ** 2
    if rest.min() < -tol:
        return None
    p = float(np.sum(np.abs(x) ** 2))
    psi = x / math.sqrt(p)
    rest = np.clip(rest, 0.0, None)
    delta = rest / rest.sum() if rest.sum() > 0 else np.full(d, 1.0 / d)
    return min(p, 1.0), psi, delta


class Verdict(str, enum.Enum):
    PROVED_BY_SPECTRAL_CONDITION = "ProvedBySpectralCondition"
    PROVED_BY_INTEGRAL_BOUND = "ProvedByIntegralBound"
    PROVED_BY_PSEUDOPURE_FORM = "ProvedByPseudopureForm"
    NUMERICALLY_SATISFIED = "NumericallySatisfied"
    NUMERICALLY_VIOLATED = "NumericallyViolated"


@dataclass(frozen=True)
class ConjectureCertificate:
    verdict: Verdict
    margin: float
    details: str = ""

    @property
    def proved(self) -> bool:
        return self.verdict.name.startswith("PROVED")


def certify(rho) -> ConjectureCertificate:
    """Strongest available evidence that C_r(rho) <= C_l1(rho).

    Tries, in order: pseudopure form, the spectral condition (uniform
    diagonal only), the integral bound along the dephasing family, and
    finally a direct comparison, which reports a violation only below -1e-7.
    """
    m = as_density(rho)
    margin = _c_l1(m) - _c_r(m)
    d = m.shape[0]

    if d == 2:
        return ConjectureCertificate(Verdict.PROVED_BY_PSEUDOPURE_FORM, margin, "every qubit is pseudopure")
    dec = pseudopure_decomposition(m)
    if dec is not None:
        return ConjectureCertificate(Verdict.PROVED_BY_PSEUDOPURE_FORM, margin, f"pseudopure with p = {dec[0]:.12g}")

    fam = PerturbationFamily.from_state(m)
    lhs, rhs, reason = _spectral_terms(fam)
    if reason == "uniform diagonal" and lhs >= rhs:
        return ConjectureCertificate(
            Verdict.PROVED_BY_SPECTRAL_CONDITION, margin, f"C_l1 = {lhs:.12g} >= log2 ratio {rhs:.12g}"
        )
    ib = integral_bound(fam, 1.0)
    if ib.proved:
        return ConjectureCertificate(
            Verdict.PROVED_BY_INTEGRAL_BOUND, margin, f"integral {ib.lhs:.12g} <= C_l1 {ib.rhs:.12g}"
        )
    if margin < VIOLATION:
        return ConjectureCertificate(Verdict.NUMERICALLY_VIOLATED, margin, "C_r exceeds C_l1")
    return ConjectureCertificate(Verdict.NUMERICALLY_SATISFIED, margin, "direct evaluation")


# --- region scans -----------------------------------------------------------

KINDS = ("pure", "mixed", "qubit")


def _parse_kind(kind: str, d: int) -> tuple[str, int]:
    if kind == "pure":
        return "pure", 1
    if kind == "mixed":
        return "mixed", d
    if kind == "qubit":
        if d != 2:
            raise DomainError(f"kind 'qubit' needs d = 2, got {d}")
        return "mixed", 2
    if kind.startswith("rank-"):
        try:
            k = int(kind[5:])
        except ValueError:
            raise DomainError(f"unknown sample kind {kind!r}") from None
        if not 1 <= k <= d:
            raise DomainError(f"rank {k} is outside [1, {d}]")
        return kind, k
    raise DomainError(f"unknown sample kind {kind!r}")


def sample_state(d: int, kind: str, seed: int, index: int) -> np.ndarray:
    """Sample ``index`` of a scan; regenerable from ``(d, kind, seed, index)``."""
    _, rank = _parse_kind(kind, d)
    rng = rng_for(seed, index)
    if kind == "pure":
        psi = random_pure(d, rng=rng)
        return np.outer(psi, psi.conj())
    return random_density(d, rank, rng=rng)


@dataclass(frozen=True)
class RegionSample:
    index: int
    c_l1: float
    c_r: float
    c_robustness: float | None
    d: int
    kind: str
    seed: int
    in_region: bool


def _in_region(m: np.ndarray, l1: float, cr: float, kind: str, robustness: float | None) -> bool:
    d = m.shape[0]
    k = diag_rank(m)
    ok = cr <= mixed_cr_upper(l1) + SATISFIED_TOL
    if kind == "pure" and k >= 2:
        tb = pure_cr_tight_bounds(min(l1, k - 1.0), k)
        ok = ok and tb.lower - SATISFIED_TOL <= cr <= tb.upper + SATISFIED_TOL
    elif d == 2:
        lo, hi = qubit_cr_bounds(min(l1, 1.0))
        ok = ok and lo - SATISFIED_TOL <= cr <= hi + SATISFIED_TOL
    if robustness is not None and k >= 2:
        ok = ok and cr <= mixed_cr_upper(robustness) + SATISFIED_TOL
        ok = ok and cr >= robustness_cr_floor(min(robustness, k - 1.0), k) - SATISFIED_TOL
    return bool(ok)


def region_scan(d: int, n_samples: int, kind: str = "pure", seed: int = 0, with_sdp: bool = False) -> list[RegionSample]:
    """Random (C_l1, C_r[, C_R]) samples, each checked against the known region."""
    d = int(d)
    _parse_kind(kind, d)
    out = []
    for i in range(int(n_samples)):
        m = sample_state(d, kind, seed, i)
        l1, cr = _c_l1(m), _c_r(m)
        rob = None
        if with_sdp:
            try:
                rob = c_robustness(m).value
            except ConvergenceError:
                rob = None
        out.append(RegionSample(i, l1, cr, rob, d, kind, int(seed), _in_region(m, l1, cr, kind, rob)))
    return out


def region_summary(samples) -> dict:
    """Counts and worst-case margins over a scan."""
    l1 = np.array([s.c_l1 for s in samples])
    cr = np.array([s.c_r for s in samples])
    small = l1 < 1.0
    return {
        "n": len(samples),
        "out_of_region": int(sum(not s.in_region for s in samples)),
        "min_cl1_minus_cr": float((l1 - cr).min()) if len(samples) else None,
        "min_log_bound_margin": float((np.log2(1.0 + l1) - cr).min()) if len(samples) else None,
        "min_small_cl1_margin": float((l1[small] * LOG2E - cr[small]).min()) if small.any() else None,
    }


def boundary_curves(kind: str, d: int, points: int) -> list[tuple[float, float, float]]:
    """(b, lower, upper) on ``points`` uniform b values.

    pure: exact pure-state range of C_r given C_l1 = b; qubit: the qubit range;
    mixed: robustness floor and log2(1 + b) as functions of C_R = b.
    """
    d = int(d)
    points = int(points)
    if points <= 0:
        return []
    if kind == "qubit":
        bs = np.linspace(0.0, 1.0, points)
        return [(float(b), *qubit_cr_bounds(b)) for b in bs]
    bs = np.linspace(0.0, d - 1.0, points)
    if kind == "pure":
        return [(float(b), *pure_cr_tight_bounds(b, d)[:2]) for b in bs]
    if kind == "mixed":
        return [(float(b), robustness_cr_floor(b, d), mixed_cr_upper(b)) for b in bs]
    raise DomainError(f"unknown curve kind {kind!r}")


def find_ordering_witness(samples):
    """Indices (i, j) with C_l1(i) > C_l1(j) > C_r(j) > C_r(i), or None.

    Such a pair shows the two measures order states differently.
    """
    order = sorted(range(len(samples)), key=lambda t: -samples[t].c_l1)
    best = None  # sample with the smallest C_r among strictly larger C_l1
    pos = 0
    while pos < len(order):
        end = pos
        while end < len(order) and samples[order[end]].c_l1 == samples[order[pos]].c_l1:
            end += 1
        if best is not None:
            for t in order[pos:end]:
                s = samples[t]
                if s.c_l1 > s.c_r > samples[best].c_r:
                    return best, t
        for t in order[pos:end]:
            if best is None or samples[t].c_r < samples[best].c_r:
                best = t
        pos = end
    return None


@dataclass
class Campaign:
    n_states: int = 0
    min_margin: float | None = None
    verdicts: dict[str, int] = field(default_factory=dict)
    per_dim: dict[int, int] = field(default_factory=dict)
    violations: list[dict] = field(default_factory=list)
    ordering_witness: dict | None = None


def _dump(m: np.ndarray) -> dict:
    return {"dim": m.shape[0], "re": m.real.tolist(), "im": m.imag.tolist()}


def run_campaign(d_max: int, per_dim: int, seed: int = 0, d_min: int = 2) -> Campaign:
    """Certify ``per_dim`` random states for every d in [d_min, d_max], cycling the rank.

    State ``i`` of dimension ``d`` has rank ``1 + i % d`` and is drawn from
    stream index ``d * 2**32 + i`` of ``seed``.
    """
    camp = Campaign()
    for d in range(int(d_min), int(d_max) + 1):
        samples = []
        for i in range(int(per_dim)):
            rank = 1 + i % d
            m = random_density(d, rank, rng=rng_for(seed, d * 2**32 + i))
            cert = certify(m)
            l1, cr = _c_l1(m), _c_r(m)
            camp.n_states += 1
            camp.verdicts[cert.verdict.value] = camp.verdicts.get(cert.verdict.value, 0) + 1
            camp.min_margin = cert.margin if camp.min_margin is None else min(camp.min_margin, cert.margin)
            if cert.verdict is Verdict.NUMERICALLY_VIOLATED:
                camp.violations.append({"d": d, "index": i, "rank": rank, "margin": cert.margin, "state": _dump(m)})
            samples.append(RegionSample(i, l1, cr, None, d, f"rank-{rank}", int(seed), True))
        camp.per_dim[d] = len(samples)
        if camp.ordering_witness is None and samples:
            pair = find_ordering_witness(samples)
            if pair is not None:
                a, b = (samples[t] for t in pair)
                camp.ordering_witness = {
                    "d": d,
                    "rho": {"index": a.index, "rank": int(a.kind[5:]), "c_l1": a.c_l1, "c_r": a.c_r},
                    "sigma": {"index": b.index, "rank": int(b.kind[5:]), "c_l1": b.c_l1, "c_r": b.c_r},
                }
    return camp
