import math

import numpy as np
import pytest

import oracles
from l1coherence.bounds import (
    check_pure_equality_condition,
    diag_rank,
    evaluate_all_bounds,
    extremal_pure_max,
    extremal_pure_min,
    isotropic_like_state,
    mixed_cr_upper,
    prop6_state,
    pseudopure_state,
    pure_cr_crude_bounds,
    pure_cr_tight_bounds,
    pure_gap,
    pure_gap_upper,
    qubit_cr_bounds,
    robustness_cr_floor,
)
from l1coherence.core import DomainError, ValidationError, maximally_coherent, random_pure, rng_for, t_transform
from l1coherence.measures import c_l1, c_r, c_robustness

H2 = oracles.h2


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def grid(d):
    return [round(0.1 * k, 10) for k in range(1, int(round(10 * (d - 1))))]


@pytest.mark.parametrize("b2, lo, hi", [(1, 1, 1), (0, 0, 0), (0.6, 1 - H2(0.2), H2(0.1))])
def test_qubit_cr_bounds_examples(b2, lo, hi):
    got = qubit_cr_bounds(b2)
    assert got == pytest.approx((lo, hi), abs=1e-12)


def test_qubit_cr_bounds_values_and_domain():
    lo, hi = qubit_cr_bounds(0.6)
    assert (lo, hi) == pytest.approx((0.278072, 0.468996), abs=1e-6)
    for b2 in np.linspace(0, 1, 101):
        lo, hi = qubit_cr_bounds(b2)
        assert lo <= hi + 1e-12 and hi <= b2 + 1e-12
    for bad in (-0.1, 1.1):
        with pytest.raises(DomainError):
            qubit_cr_bounds(bad)


@pytest.mark.parametrize("d, value", [(2, 0.0), (3, 2 - math.log2(3)), (4, 1.0)])
def test_pure_gap_upper_examples(d, value):
    assert pure_gap_upper(d) == pytest.approx(value, abs=1e-12)


def test_pure_gap_upper_domain():
    with pytest.raises(DomainError):
        pure_gap_upper(1)


def test_crude_bounds_examples():
    for d in (2, 3, 5):
        assert pure_cr_crude_bounds(d - 1, d).upper == pytest.approx(math.log2(d), abs=1e-12)
    cb = pure_cr_crude_bounds(1, 2)
    assert cb.lower == pytest.approx(math.sqrt(2) / 2, abs=1e-12)
    assert cb.upper == pytest.approx(1.0, abs=1e-12)
    cb = pure_cr_crude_bounds(0, 3)
    assert cb.lower == 0.0 and cb.upper == 0.0 and cb.lower_alt < 0 and not cb.alt_informative
    with pytest.raises(DomainError):
        pure_cr_crude_bounds(2.5, 3)


def test_tight_bounds_examples():
    tb = pure_cr_tight_bounds(1, 2)
    assert (tb.alpha, tb.beta, tb.n) == (pytest.approx(0.5), pytest.approx(0.5), 2)
    assert (tb.lower, tb.upper) == pytest.approx((1, 1), abs=1e-12)
    tb = pure_cr_tight_bounds(1, 3)
    assert tb.alpha == pytest.approx(8 / 9, abs=1e-12)
    assert math.sqrt(tb.alpha) == pytest.approx(2 * math.sqrt(2) / 3, abs=1e-12)
    assert tb.lower == pytest.approx(H2(8 / 9) + 1 / 9, abs=1e-12)
    assert tb.lower == pytest.approx(0.614369, abs=1e-6)
    assert (tb.n, tb.beta, tb.upper) == (2, pytest.approx(0.5), pytest.approx(1.0))
    for d in range(2, 9):
        tb = pure_cr_tight_bounds(d - 1, d)
        assert tb.alpha == pytest.approx(1 / d) and tb.beta == pytest.approx(1 / d)
        assert (tb.lower, tb.upper) == pytest.approx((math.log2(d), math.log2(d)), abs=1e-9)
    with pytest.raises(DomainError):
        pure_cr_tight_bounds(-0.1, 3)
    with pytest.raises(DomainError):
        pure_cr_tight_bounds(2.1, 3)


def test_tight_bounds_integrality_threshold():
    assert pure_cr_tight_bounds(1 + 1e-13, 4).n == 2
    assert pure_cr_tight_bounds(1 + 1e-6, 4).n == 3


def test_alpha_matches_sqrt_identity():
    for d in range(2, 9):
        for b in grid(d):
            a = pure_cr_tight_bounds(b, d).alpha
            direct = (2 + (d - 2) * (d - b) + 2 * math.sqrt((b + 1) * (d - 1) * (d - 1 - b))) / d**2
            assert a == pytest.approx(direct, abs=1e-12)


def test_extremal_examples():
    v = extremal_pure_min(1, 3)
    assert np.abs(v) ** 2 == pytest.approx([8 / 9, 1 / 18, 1 / 18], abs=1e-12)
    assert c_l1(proj(v)) == pytest.approx(1.0, abs=1e-9)
    assert c_r(proj(v)) == pytest.approx(0.614369, abs=1e-6)
    assert c_r(proj(extremal_pure_max(1))) == pytest.approx(1.0, abs=1e-12)
    u = proj(maximally_coherent(3))
    assert np.allclose(proj(extremal_pure_min(2, 3)), u, atol=1e-9)
    assert np.allclose(proj(extremal_pure_max(2, 3)), u, atol=1e-9)


def test_extremal_states_saturate_on_grid():
    for d in range(2, 9):
        for b in grid(d):
            tb = pure_cr_tight_bounds(b, d)
            lo, hi = proj(extremal_pure_min(b, d)), proj(extremal_pure_max(b, d))
            assert c_l1(lo) == pytest.approx(b, abs=1e-9) and c_l1(hi) == pytest.approx(b, abs=1e-9)
            assert c_r(lo) == pytest.approx(tb.lower, abs=1e-9)
            assert c_r(hi) == pytest.approx(tb.upper, abs=1e-9)


def test_tight_dominates_crude_on_grid():
    for d in range(2, 9):
        for b in grid(d):
            tb, cb = pure_cr_tight_bounds(b, d), pure_cr_crude_bounds(b, d)
            assert tb.lower >= max(cb.lower, cb.lower_alt) - 1e-12
            assert tb.upper <= math.log2(1 + b) + 1e-12
            assert tb.lower <= tb.upper + 1e-12


def test_mixed_cr_upper():
    assert [mixed_cr_upper(x) for x in (0, 1, 3)] == [0.0, 1.0, 2.0]


def test_floor_examples():
    assert robustness_cr_floor(0.5, 2) == pytest.approx(1 - H2(0.75), abs=1e-12)
    assert robustness_cr_floor(0.5, 2) == pytest.approx(qubit_cr_bounds(0.5)[0], abs=1e-12)
    assert robustness_cr_floor(1, 3) == pytest.approx(math.log2(3) - H2(2 / 3) - 1 / 3, abs=1e-12)
    for d in range(2, 9):
        assert robustness_cr_floor(d - 1, d) == pytest.approx(math.log2(d), abs=1e-12)
        assert robustness_cr_floor(0, d) == pytest.approx(0.0, abs=1e-12)
        vals = [robustness_cr_floor(b, d) for b in grid(d)]
        assert all(x <= y + 1e-12 for x, y in zip(vals, vals[1:]))
    with pytest.raises(DomainError):
        robustness_cr_floor(3, 3)


def test_isotropic_state():
    rho = isotropic_like_state(1, 3)
    assert np.linalg.eigvalsh(rho) == pytest.approx([1 / 6, 1 / 6, 2 / 3], abs=1e-12)
    assert c_r(rho) == pytest.approx(0.333334, abs=1e-6)
    assert np.allclose(isotropic_like_state(0, 4), np.eye(4) / 4)
    assert np.allclose(isotropic_like_state(3, 4), proj(maximally_coherent(4)), atol=1e-12)


def test_isotropic_saturates_floor_on_grid():
    for d in range(2, 9):
        for b in grid(d):
            rho = isotropic_like_state(b, d)
            assert c_l1(rho) == pytest.approx(b, abs=1e-9)
            assert c_r(rho) == pytest.approx(robustness_cr_floor(b, d), abs=1e-9)


def test_isotropic_robustness_sample():
    for b, d in [(0.5, 2), (1.0, 3), (2.2, 4)]:
        assert c_robustness(isotropic_like_state(b, d)).value == pytest.approx(b, abs=1e-6)


@pytest.mark.parametrize("b, d, delta", [(0.5, 3, [1.0]), (0.9, 4, [0.5, 0.5]), (0.999, 3, [1.0]), (0.3, 5, None)])
def test_prop6_equality(b, d, delta):
    rho = prop6_state(b, d, delta)
    assert c_l1(rho) == pytest.approx(b, abs=1e-9)
    assert c_r(rho) == pytest.approx(b, abs=1e-9)


def test_prop6_domain():
    for bad in (0.0, 1.0):
        with pytest.raises(DomainError):
            prop6_state(bad, 3)
    with pytest.raises(ValidationError):
        prop6_state(0.5, 3, [0.5, 0.5])


def test_equality_condition_examples():
    assert check_pure_equality_condition([1 / math.sqrt(2), 1 / math.sqrt(2), 0])
    assert not check_pure_equality_condition(maximally_coherent(3))
    assert check_pure_equality_condition([1, 0])


def test_equality_condition_agrees_with_measures():
    rng = rng_for(31)
    for i in range(1000):
        psi = random_pure(int(rng.integers(2, 6)), rng=rng)
        m = proj(psi)
        assert check_pure_equality_condition(psi) == (abs(c_l1(m) - c_r(m)) <= 1e-8)


def test_gap_bound_and_maximizers():
    for d in range(2, 9):
        assert pure_gap(np.full(d, 1 / d)) == pytest.approx(pure_gap_upper(d), abs=1e-9)
    a, b = pure_gap([1 / 3] * 3), pure_gap([2 / 3, 1 / 6, 1 / 6])
    assert a == pytest.approx(b, abs=1e-9)
    assert a == pytest.approx(0.415037, abs=1e-6)
    rng = rng_for(32)
    for _ in range(500):
        d = int(rng.integers(3, 8))
        assert pure_gap(rng.dirichlet(np.ones(d))) <= pure_gap_upper(d) + 1e-12


def test_gap_can_increase_under_mixing():
    # lam' = T(lam) is majorized by lam, yet the gap drops: the gap is not
    # Schur-concave, even though its maximum is still at the uniform vector.
    lam = np.array([0.7, 0.2999, 0.0001])
    mixed = t_transform(lam, 0, 1, 0.7)
    assert pure_gap(mixed) == pytest.approx(0.032385035315, abs=1e-9)
    assert pure_gap(lam) == pytest.approx(0.061457980158, abs=1e-9)
    assert pure_gap(mixed) < pure_gap(lam) - 0.02


def test_gap_maximum_is_at_uniform():
    from scipy.optimize import minimize

    rng = rng_for(35)
    for d in (3, 4, 5):
        best = -np.inf
        for _ in range(30):
            res = minimize(lambda x: -pure_gap(np.exp(x) / np.exp(x).sum()), rng.standard_normal(d), method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 5000})
            best = max(best, -res.fun)
        assert best <= pure_gap_upper(d) + 1e-9
        assert best == pytest.approx(pure_gap_upper(d), abs=1e-6)


def test_diag_rank_threshold():
    assert diag_rank(np.diag([1 - 1e-13, 1e-13])) == 1
    assert diag_rank(np.diag([0.5, 0.5])) == 2


def test_report_on_maximally_coherent_state():
    rep = evaluate_all_bounds(proj(maximally_coherent(3)), with_sdp=True, state_id="max3")
    assert rep.all_satisfied
    assert rep.record("pure_cr_tight").slack == pytest.approx(0.0, abs=1e-9)
    assert rep.record("pure_gap_le_d_minus_1_minus_log2_d").slack == pytest.approx(0.0, abs=1e-9)
    assert rep.record("cr_ge_robustness_floor").slack == pytest.approx(0.0, abs=1e-6)


def test_report_on_qubits_and_prop6():
    for i in range(20):
        rep = evaluate_all_bounds(oracle_qubit(i))
        assert rep.record("qubit_cr_range").satisfied
    rep = evaluate_all_bounds(prop6_state(0.5, 3, [1]))
    assert rep.flags["cr_equals_cl1"]
    assert rep.record("cr_le_cl1_conjectured").slack == pytest.approx(0.0, abs=1e-9)


def test_report_pseudopure_chain():
    psi = random_pure(3, seed=4)
    rho = pseudopure_state(0.4, psi, [0.2, 0.3, 0.5])
    rep = evaluate_all_bounds(rho, pseudopure=(0.4, psi, [0.2, 0.3, 0.5]))
    assert rep.record("pseudopure_cr_le_p_cr_psi").satisfied
    assert rep.record("pseudopure_p_cr_psi_le_cl1").satisfied


def test_report_near_boundary_pure_state():
    v = extremal_pure_min(1.3, 4)
    rep = evaluate_all_bounds(proj(v))
    rec = rep.record("pure_cr_tight")
    assert rec.satisfied and abs(rec.slack) < 1e-6


def oracle_qubit(i):
    rng = rng_for(34, i)
    a = rng.uniform()
    b = rng.uniform() * math.sqrt(a * (1 - a)) * np.exp(2j * math.pi * rng.uniform())
    return np.array([[a, b], [np.conj(b), 1 - a]])
