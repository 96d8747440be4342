import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from causalcorr import infotheory as it
from causalcorr import povm_search as ps
from causalcorr import quantum_sim as qs


def rho_of(state):
    return qs.density_from_pure(state)


def test_zero_params_give_computational_basis():
    povm = ps.ansatz_to_povm(np.zeros(4), 2)
    comp = qs.computational_basis_povm(2)
    for a, b in zip(povm.elements, comp.elements):
        assert np.allclose(a, b, atol=1e-12)


def test_quarter_turn_gives_hadamard_basis():
    povm = ps.ansatz_to_povm([math.pi / 4, 0, 0, 0], 2)
    plus = np.array([1, 1]) / math.sqrt(2)
    minus = np.array([1, -1]) / math.sqrt(2)
    got = sorted((np.real(np.trace(e @ np.outer(plus, plus))) for e in povm.elements))
    assert got == pytest.approx([0.0, 1.0], abs=1e-12)
    assert {round(float(np.real(minus @ e @ minus)), 9) for e in povm.elements} == {0.0, 1.0}


@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_random_params_give_valid_povm(d, seed):
    params = np.random.default_rng(seed).uniform(-math.pi, math.pi, d * d)
    u = ps.ansatz_unitary(params, d)
    assert np.allclose(u.conj().T @ u, np.eye(d), atol=1e-9)
    povm = ps.ansatz_to_povm(params, d)
    assert np.allclose(sum(povm.elements), np.eye(d), atol=1e-9)


def test_ansatz_parameter_count_checked():
    with pytest.raises(ValueError):
        ps.ansatz_unitary(np.zeros(3), 2)


@pytest.mark.parametrize("seed", range(20))
def test_outcome_distribution_matches_povm_measurement(seed):
    rng = np.random.default_rng(seed)
    dims = (2, 3)
    rho = qs.random_density(dims, rng) if seed % 2 else rho_of(qs.random_pure_state(dims, rng))
    params = [rng.uniform(-3, 3, d * d) for d in dims]
    us = [ps.ansatz_unitary(p, d) for p, d in zip(params, dims)]
    law = ps.outcome_distribution(rho, us)
    ref = qs.measure_product_povm(rho, [qs.POVM.from_basis(u) for u in us])
    assert law.allclose(ref, atol=1e-10)


def test_ghz3_lower_bound():
    report = ps.cq_lower_bound(rho_of(qs.ghz_state(3)), restarts=2, seed=1)
    assert report.best_value >= 2 - 1e-3


def test_product_state_lower_bound_is_zero():
    rng = np.random.default_rng(4)
    psi = qs.product_state(*(qs.random_pure_state((2,), rng) for _ in range(3)))
    report = ps.cq_lower_bound(rho_of(psi), restarts=3, seed=0)
    assert report.best_value <= 1e-6


def test_hadamard_ghz_lower_bound():
    report = ps.cq_lower_bound(rho_of(qs.hadamard_ghz_state()), restarts=4, seed=0)
    assert report.best_value >= 2 - 1e-3


@pytest.mark.parametrize("m", [2, 3, 4])
def test_sandwich_pinches_on_ghz(m):
    b = ps.theorem2_bounds(rho_of(qs.ghz_state(m)), seed=0)
    assert b.upper == pytest.approx(m - 1, abs=1e-9)
    assert b.lower >= m - 1 - 1e-3 and b.pinched


def test_sandwich_on_parity3():
    b = ps.theorem2_bounds(rho_of(qs.parity_state(3)), seed=0)
    assert b.upper == pytest.approx(2.0, abs=1e-9)
    assert b.lower >= 2 - 1e-3


def test_sandwich_on_product_basis_state():
    b = ps.theorem2_bounds(rho_of(qs.basis_state((2, 2), (0, 0))), restarts=1, seed=0)
    assert b.lower == pytest.approx(0.0, abs=1e-9) and b.upper == pytest.approx(0.0, abs=1e-9)


def test_sandwich_rejects_mixed_state():
    with pytest.raises(ValueError):
        ps.theorem2_bounds(qs.maximally_mixed((2, 2)))


@pytest.mark.parametrize("seed", range(6))
def test_lower_bound_below_upper_on_random_pure_states(seed):
    rng = np.random.default_rng(seed)
    rho = rho_of(qs.random_pure_state((2, 2, 2), rng))
    report = ps.cq_lower_bound(rho, restarts=2, max_iters=30, seed=seed, early_stop=False)
    assert report.best_value <= report.upper_bound + 1e-6
    assert report.upper_bound == pytest.approx(ps.theorem2_upper_bound(rho))


def test_lower_bound_is_attained_by_reported_ansatz():
    rho = rho_of(qs.random_pure_state((2, 2), np.random.default_rng(9)))
    report = ps.cq_lower_bound(rho, restarts=2, max_iters=30, seed=3)
    law = ps.outcome_distribution(rho, report.best_ansatz.unitaries())
    assert it.total_correlation(law) == pytest.approx(report.best_value, abs=1e-9)


def test_reproducible_for_fixed_seed():
    rho = qs.random_density((2, 2), np.random.default_rng(2))
    a = ps.cq_lower_bound(rho, restarts=3, max_iters=40, seed=17)
    b = ps.cq_lower_bound(rho, restarts=3, max_iters=40, seed=17)
    assert abs(a.best_value - b.best_value) <= 1e-9
    assert a.start_values == b.start_values


def test_more_restarts_never_worse():
    rho = qs.random_density((2, 2), np.random.default_rng(8))
    values = [ps.cq_lower_bound(rho, restarts=r, max_iters=20, seed=5).best_value for r in (1, 2, 4)]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


def test_restart_starts_independent_of_total_count():
    rho = qs.random_density((2, 2), np.random.default_rng(11))
    short = ps.cq_lower_bound(rho, restarts=2, max_iters=30, seed=4, early_stop=False)
    long = ps.cq_lower_bound(rho, restarts=5, max_iters=30, seed=4, early_stop=False)
    assert long.start_values[:3] == short.start_values


def test_early_stop_accounting():
    rho = rho_of(qs.ghz_state(3))
    stopped = ps.cq_lower_bound(rho, restarts=16, seed=0)
    full = ps.cq_lower_bound(rho, restarts=16, seed=0, early_stop=False)
    assert stopped.restarts_used == 0 and len(stopped.start_values) == 1
    assert full.restarts_used == 16 and len(full.start_values) == 17
    assert stopped.best_value == pytest.approx(full.best_value, abs=1e-9)


def test_coordinate_ascent_history_nondecreasing():
    rho = qs.random_density((2, 2), np.random.default_rng(6))
    objective = ps._Objective(rho)
    start = [np.random.default_rng(0).uniform(-3, 3, 4) for _ in range(2)]
    res = ps.coordinate_ascent(objective, start, max_iters=20)
    assert all(b >= a for a, b in zip(res.history, res.history[1:]))


def test_every_evaluated_ansatz_gives_valid_distribution(monkeypatch):
    seen = []
    original = ps._tc_of

    def spy(probs, dims):
        seen.append(probs.copy())
        return original(probs, dims)

    monkeypatch.setattr(ps, "_tc_of", spy)
    rho = qs.random_density((2, 2), np.random.default_rng(1))
    ps.cq_lower_bound(rho, restarts=1, max_iters=5, seed=0)
    assert seen
    for p in seen:
        assert p.min() >= 0 and abs(p.sum() - 1) <= 1e-12


def test_invalid_restart_count():
    with pytest.raises(ValueError):
        ps.cq_lower_bound(rho_of(qs.ghz_state(2)), restarts=0)
