"""Closed-form bounds relating C_r, C_l1 and C_R, and the states that saturate them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import (
    ConvergenceError,
    DomainError,
    ValidationError,
    as_density,
    as_probability,
    as_pure,
    binary_entropy,
    maximally_coherent,
)
from .measures import _c_l1, _c_r, c_robustness

__all__ = [
    "InequalityRecord",
    "BoundReport",
    "CrudeBounds",
    "TightBounds",
    "qubit_cr_bounds",
    "pure_gap_upper",
    "pure_gap",
    "pure_cr_crude_bounds",
    "pure_cr_tight_bounds",
    "extremal_pure_min",
    "extremal_pure_max",
    "mixed_cr_upper",
    "robustness_cr_floor",
    "isotropic_like_state",
    "prop6_state",
    "pseudopure_state",
    "diag_rank",
    "check_pure_equality_condition",
    "evaluate_all_bounds",
]

LOG2E = 1.0 / math.log(2.0)
SATISFIED_TOL = 1e-8
INTEGRAL_TOL = 1e-12
DIAG_ZERO = 1e-12
PROFILE_TOL = 1e-9


def _xlog2(c: float, n: float) -> float:
    # c * log2(n) with the 0 log 0 convention (n = 0 only appears with c = 0).
    return 0.0 if c == 0.0 or n <= 0.0 else c * math.log2(n)


def _check_b(b: float, d: int) -> tuple[float, int]:
    b, d = float(b), int(d)
    if d < 2:
        raise DomainError(f"dimension must be at least 2, got {d}")
    if not (-INTEGRAL_TOL <= b <= d - 1 + INTEGRAL_TOL):
        raise DomainError(f"coherence {b!r} is outside [0, {d - 1}]")
    return min(max(b, 0.0), d - 1.0), d


def qubit_cr_bounds(b2: float) -> tuple[float, float]:
    """Range of C_r over qubit states with C_l1 = b2.

    The lower end is reached at the mixed state with equal diagonal, the upper
    end by the pure state with that coherence.
    """
    b2 = float(b2)
    if not (-INTEGRAL_TOL <= b2 <= 1.0 + INTEGRAL_TOL):
        raise DomainError(f"qubit l1 coherence {b2!r} is outside [0, 1]")
    b2 = min(max(b2, 0.0), 1.0)
    lower = 1.0 - binary_entropy((1.0 - b2) / 2.0)
    upper = binary_entropy((1.0 - math.sqrt(1.0 - b2 * b2)) / 2.0)
    return lower, upper


def pure_gap(lam) -> float:
    """C_l1 - C_r of the pure state with diagonal ``lam`` (real amplitudes sqrt(lam))."""
    p = as_probability(lam)
    nz = p[p > 0]
    return float(np.sqrt(p).sum() ** 2 - 1.0 + np.dot(nz, np.log2(nz)))


def pure_gap_upper(d: int) -> float:
    """d - 1 - log2 d: the largest C_l1 - C_r among pure states of diagonal rank d.

    The maximization is claimed for d > 2; at d = 2 the value is 0 while pure
    qubits have a positive gap, so callers apply it for d >= 3.
    """
    d = int(d)
    if d < 2:
        raise DomainError(f"dimension must be at least 2, got {d}")
    return d - 1.0 - math.log2(d)


class CrudeBounds(NamedTuple):
    lower: float
    lower_alt: float
    upper: float
    alt_informative: bool


def pure_cr_crude_bounds(b: float, d: int) -> CrudeBounds:
    """Dimension-aware bounds on pure-state C_r given C_l1 = b.

    ``lower_alt`` comes from a quadratic entropy bound and is only informative
    when ``b > sqrt((d-1)(d-1-ln d))``; take the larger of the two lower bounds.
    """
    b, d = _check_b(b, d)
    lower = math.sqrt(2.0) * b * b / (d * (d - 1))
    lower_alt = math.log2(d) - ((d - 1) ** 2 - b * b) / ((d - 1) * math.log(2.0))
    upper = math.log2(1.0 + b)
    informative = b > math.sqrt((d - 1) * ((d - 1) - math.log(d)))
    return CrudeBounds(lower, lower_alt, upper, informative)


class TightBounds(NamedTuple):
    lower: float
    upper: float
    alpha: float
    beta: float
    n: int


def _support_size(b: float) -> int:
    r = round(b)
    if abs(b - r) <= INTEGRAL_TOL:
        return int(r) + 1
    return int(math.floor(b)) + 2


def _alpha(b: float, d: int) -> float:
    # Large diagonal entry of the minimal-entropy profile; sqrt form is exact
    # on the constraint sum_i sqrt(lambda_i) = sqrt(1 + b).
    root = (math.sqrt(max((d - 1) * (d - 1 - b), 0.0)) + math.sqrt(b + 1.0)) / d
    return root * root


def _beta(b: float, n: int) -> float:
    root = (math.sqrt(b + 1.0) - math.sqrt(max((n - 1) * (n - 1 - b), 0.0))) / n
    return root * root


def pure_cr_tight_bounds(b: float, d: int) -> TightBounds:
    """Exact range of C_r over pure states of diagonal rank d with C_l1 = b."""
    b, d = _check_b(b, d)
    n = _support_size(b)
    alpha = _alpha(b, d)
    beta = _beta(b, n) if n >= 2 else 1.0
    lower = binary_entropy(alpha) + _xlog2(1.0 - alpha, d - 1)
    upper = binary_entropy(beta) + _xlog2(1.0 - beta, n - 1)
    return TightBounds(lower, upper, alpha, beta, n)


def extremal_pure_min(b: float, d: int) -> np.ndarray:
    """Pure state of diagonal rank d with C_l1 = b and the smallest C_r.

    Diagonal (alpha, (1-alpha)/(d-1), ...) in descending order, real amplitudes.
    """
    b, d = _check_b(b, d)
    alpha = _alpha(b, d)
    amps = np.full(d, math.sqrt(max(1.0 - alpha, 0.0) / (d - 1)))
    amps[0] = math.sqrt(alpha)
    return as_pure(amps / np.linalg.norm(amps))


def extremal_pure_max(b: float, d: int | None = None) -> np.ndarray:
    """Pure state with C_l1 = b and the largest C_r.

    Lives on ``n`` levels (``n = b + 1`` for integral b, else ``floor(b) + 2``);
    pass ``d >= n`` to embed it in a larger space with zero padding.
    """
    b = float(b)
    if b < -INTEGRAL_TOL:
        raise DomainError(f"coherence {b!r} is negative")
    b = max(b, 0.0)
    n = _support_size(b)
    if d is not None and int(d) < n:
        raise DomainError(f"C_l1 = {b} needs at least {n} levels, got d = {d}")
    if n == 1:
        amps = np.array([1.0])
    else:
        beta = _beta(b, n)
        amps = np.full(n, math.sqrt(max(1.0 - beta, 0.0) / (n - 1)))
        amps[-1] = math.sqrt(beta)
    amps = amps / np.linalg.norm(amps)
    if d is not None:
        amps = np.pad(amps, (0, int(d) - n))
    return as_pure(amps)


def mixed_cr_upper(x: float) -> float:
    """log2(1 + x), the upper bound on C_r from either C_R or C_l1."""
    x = float(x)
    if x < 0:
        raise DomainError(f"coherence {x!r} is negative")
    return math.log2(1.0 + x)


def robustness_cr_floor(b: float, d: int) -> float:
    """Smallest C_r among states of diagonal rank d with robustness b."""
    b, d = _check_b(b, d)
    alpha = (1.0 + b) / d
    return max(math.log2(d) - binary_entropy(alpha) - _xlog2(1.0 - alpha, d - 1), 0.0)


def isotropic_like_state(b: float, d: int) -> np.ndarray:
    """p |Psi><Psi| + (1 - p) I/d with p = b/(d-1) and |Psi> maximally coherent."""
    b, d = _check_b(b, d)
    p = b / (d - 1)
    psi = maximally_coherent(d)
    return as_density(p * np.outer(psi, psi.conj()) + (1.0 - p) * np.eye(d) / d)


def prop6_state(b: float, d: int, delta=None) -> np.ndarray:
    """[[b/2, b/2], [b/2, b/2]] (+) (1 - b) delta, which has C_r = C_l1 = b.

    ``delta`` is a probability vector of length d - 2 (uniform by default).
    """
    b, d = float(b), int(d)
    if not 0.0 < b < 1.0:
        raise DomainError(f"b must lie in (0, 1), got {b!r}")
    if d < 3:
        raise DomainError(f"dimension must be at least 3, got {d}")
    delta = np.full(d - 2, 1.0 / (d - 2)) if delta is None else as_probability(delta)
    if delta.size != d - 2:
        raise ValidationError(f"delta has length {delta.size}, expected {d - 2}")
    m = np.zeros((d, d), dtype=complex)
    m[:2, :2] = b / 2.0
    m[2:, 2:] = np.diag((1.0 - b) * delta)
    return as_density(m)


def pseudopure_state(p: float, psi, delta) -> np.ndarray:
    """p |psi><psi| + (1 - p) diag(delta)."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"mixing weight {p!r} is outside [0, 1]")
    v = as_pure(psi)
    delta = as_probability(delta)
    if delta.size != v.size:
        raise ValidationError("psi and delta have different dimensions")
    return as_density(p * np.outer(v, v.conj()) + (1.0 - p) * np.diag(delta))


def diag_rank(rho) -> int:
    """Number of diagonal entries above 1e-12."""
    return int(np.count_nonzero(np.diag(np.asarray(rho)).real > DIAG_ZERO))


def check_pure_equality_condition(psi) -> bool:
    """True iff the diagonal of |psi><psi| is a permutation of (1, 0, ...) or (1/2, 1/2, 0, ...).

    These are exactly the pure states with C_r = C_l1.
    """
    lam = np.sort(np.abs(as_pure(psi)) ** 2)[::-1]
    for head in ((1.0,), (0.5, 0.5)):
        profile = np.zeros_like(lam)
        k = min(len(head), lam.size)
        profile[:k] = head[:k]
        if np.all(np.abs(lam - profile) <= PROFILE_TOL):
            return True
    return False


@dataclass(frozen=True)
class InequalityRecord:
    """One checked inequality ``lower <= value <= upper``.

    ``slack`` is the distance to the nearer violated side; it is non-negative
    exactly when the inequality holds.
    """

    name: str
    value: float
    lower: float | None
    upper: float | None
    slack: float
    satisfied: bool

    @classmethod
    def check(cls, name, value, lower=None, upper=None):
        sides = []
        if lower is not None:
            sides.append(value - lower)
        if upper is not None:
            sides.append(upper - value)
        slack = min(sides)
        return cls(name, float(value), lower, upper, float(slack), slack >= -SATISFIED_TOL)


@dataclass
class BoundReport:
    state_id: str
    d: int
    c_l1: float
    c_r: float
    c_robustness: float | None = None
    robustness_gap: float | None = None
    records: list[InequalityRecord] = field(default_factory=list)
    flags: dict[str, bool] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def all_satisfied(self) -> bool:
        return all(r.satisfied for r in self.records)

    def record(self, name: str) -> InequalityRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)


def evaluate_all_bounds(rho, with_sdp: bool = False, state_id: str = "", pseudopure=None) -> BoundReport:
    """Check every applicable inequality on ``rho``.

    Pure-state bounds are applied only when the largest eigenvalue is within
    1e-9 of one. ``pseudopure = (p, psi, delta)`` adds the convexity chain for
    that decomposition. A robustness solver failure leaves the robustness
    records out and adds a note instead of raising.
    """
    m = as_density(rho)
    d = m.shape[0]
    l1, cr = _c_l1(m), _c_r(m)
    rep = BoundReport(state_id=state_id, d=d, c_l1=l1, c_r=cr)
    add = rep.records.append
    k = diag_rank(m)

    add(InequalityRecord.check("cr_le_log2_1_plus_cl1", cr, upper=mixed_cr_upper(l1)))
    piecewise = l1 if l1 >= 1.0 else l1 * LOG2E
    add(InequalityRecord.check("cr_le_piecewise_cl1", cr, upper=piecewise))
    add(InequalityRecord.check("cr_le_cl1_conjectured", cr, upper=l1))

    if with_sdp:
        try:
            sol = c_robustness(m)
        except ConvergenceError as exc:
            rep.notes.append(f"robustness unavailable: {exc}")
        else:
            rep.c_robustness, rep.robustness_gap = sol.value, sol.gap
            add(InequalityRecord.check("cr_le_log2_1_plus_robustness", cr, upper=mixed_cr_upper(sol.value)))
            add(InequalityRecord.check("robustness_le_cl1", sol.value, upper=l1))
            if k >= 2:
                floor = robustness_cr_floor(min(sol.value, k - 1.0), k)
                add(InequalityRecord.check("cr_ge_robustness_floor", cr, lower=floor))

    if d == 2:
        lo, hi = qubit_cr_bounds(min(l1, 1.0))
        add(InequalityRecord.check("qubit_cr_range", cr, lower=lo, upper=hi))
        add(InequalityRecord.check("qubit_pure_curve_le_cl1", hi, upper=l1))

    w, V = np.linalg.eigh(m)
    is_pure = w[-1] >= 1.0 - 1e-9
    rep.flags["pure"] = bool(is_pure)
    rep.flags["cr_equals_cl1"] = abs(l1 - cr) <= SATISFIED_TOL
    if is_pure and k >= 2:
        psi = V[:, -1] / np.linalg.norm(V[:, -1])
        crude = pure_cr_crude_bounds(min(l1, k - 1.0), k)
        lower = max(crude.lower, crude.lower_alt)
        add(InequalityRecord.check("pure_cr_crude", cr, lower=lower, upper=crude.upper))
        tight = pure_cr_tight_bounds(min(l1, k - 1.0), k)
        add(InequalityRecord.check("pure_cr_tight", cr, lower=tight.lower, upper=tight.upper))
        add(InequalityRecord.check("pure_cr_le_cl1", cr, upper=l1))
        if k >= 3:
            add(InequalityRecord.check("pure_gap_le_d_minus_1_minus_log2_d", l1 - cr, lower=0.0, upper=pure_gap_upper(k)))
        rep.flags["equality_profile"] = check_pure_equality_condition(psi)

    if pseudopure is not None:
        p, psi, _ = pseudopure
        v = as_pure(psi)
        proj = np.outer(v, v.conj())
        add(InequalityRecord.check("pseudopure_cr_le_p_cr_psi", cr, upper=p * _c_r(proj)))
        add(InequalityRecord.check("pseudopure_p_cr_psi_le_cl1", p * _c_r(proj), upper=l1))
    return rep
