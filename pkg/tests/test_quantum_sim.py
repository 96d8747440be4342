import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from causalcorr import infotheory as it
from causalcorr import quantum_sim as qs
from causalcorr.quantum_sim import POVM, DensityOperator, PureState, QuantumStateError

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


def vn_oracle(matrix):
    # entropy from the eigenvalues of the matrix, through numpy only
    lam = np.linalg.eigvalsh(matrix)
    lam = lam[lam > 1e-14]
    return float(-(lam * np.log2(lam)).sum())


def ptrace_oracle(matrix, dims, keep):
    m = len(dims)
    t = matrix.reshape(tuple(dims) * 2)
    letters = "abcdefghijkl"
    rows = list(letters[:m])
    cols = [letters[i] if i not in keep else letters[i].upper() for i in range(m)]
    out = "".join(letters[i] for i in keep) + "".join(letters[i].upper() for i in keep)
    res = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    d = math.prod(dims[i] for i in keep)
    return res.reshape(d, d)


def random_povm(d, outcomes, rng):
    # random POVM built as A_k = S^{-1/2} B_k S^{-1/2}, independent of the library
    mats = []
    for _ in range(outcomes):
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        mats.append(g @ g.conj().T)
    s = sum(mats)
    w, v = np.linalg.eigh(s)
    inv_sqrt = v @ np.diag(w ** -0.5) @ v.conj().T
    return POVM(d, [inv_sqrt @ b @ inv_sqrt for b in mats])


# constructors


def test_ghz_two_qubits_amplitudes():
    assert np.allclose(qs.ghz_state(2).amplitudes, np.array([1, 0, 0, 1]) / math.sqrt(2), atol=1e-15)


@pytest.mark.parametrize("m", range(2, 7))
def test_ghz_norm_and_computational_law(m):
    psi = qs.ghz_state(m)
    assert np.linalg.norm(psi.amplitudes) == pytest.approx(1.0, abs=1e-12)
    law = qs.computational_distribution(qs.density_from_pure(psi))
    assert law.allclose(it.ghz_distribution(m))


def test_ghz_range():
    for m in (1, 13):
        with pytest.raises(QuantumStateError):
            qs.ghz_state(m)


def test_hadamard_ghz_amplitudes():
    psi = qs.hadamard_ghz_state()
    assert psi.amplitude((0, 0, 0)) == pytest.approx(0.5)
    assert psi.amplitude((0, 0, 1)) == pytest.approx(0.0)
    h3 = np.kron(np.kron(qs.HADAMARD, qs.HADAMARD), qs.HADAMARD)
    assert np.allclose(h3 @ qs.ghz_state(3).amplitudes, psi.amplitudes, atol=1e-12)


@pytest.mark.parametrize("m", range(3, 7))
def test_parity_state(m):
    psi = qs.parity_state(m)
    assert np.count_nonzero(np.abs(psi.amplitudes) > 1e-12) == 2 ** (m - 1)
    law = qs.computational_distribution(qs.density_from_pure(psi))
    assert law.allclose(it.parity_distribution(m))


def test_parity_state_three_is_hadamard_ghz():
    assert np.allclose(qs.parity_state(3).amplitudes, qs.hadamard_ghz_state().amplitudes, atol=1e-12)


def test_density_examples():
    rho0 = qs.density_from_pure(qs.basis_state((2,), (0,)))
    assert np.allclose(rho0.matrix, np.diag([1, 0]))
    rho = qs.density_from_pure(qs.ghz_state(2))
    corners = np.zeros((4, 4))
    corners[np.ix_([0, 3], [0, 3])] = 0.5
    assert np.allclose(rho.matrix, corners)
    assert rho.purity() == pytest.approx(1.0, abs=1e-12)


def test_type_invariants_enforced():
    with pytest.raises(QuantumStateError):
        PureState((2,), [1.0, 1.0])
    with pytest.raises(QuantumStateError):
        DensityOperator((2,), np.array([[1, 1], [0, 0]]))
    with pytest.raises(QuantumStateError):
        DensityOperator((2,), np.diag([1.5, -0.5]))
    with pytest.raises(QuantumStateError):
        POVM(2, [np.diag([1, 0]), np.diag([0, 0.5])])


# partial trace and entropies


def test_partial_trace_examples():
    rho = qs.density_from_pure(qs.ghz_state(2))
    assert np.allclose(qs.partial_trace(rho, [0]).matrix, np.eye(2) / 2)
    assert np.allclose(qs.partial_trace(rho, [0, 1]).matrix, rho.matrix)
    with pytest.raises(QuantumStateError):
        qs.partial_trace(rho, [])


def test_reduced_hadamard_ghz_is_bell_mixture():
    rho = qs.density_from_pure(qs.hadamard_ghz_state())
    phi = np.array([1, 0, 0, 1])
    psi = np.array([0, 1, 1, 0])
    expected = 0.25 * (np.outer(phi, phi) + np.outer(psi, psi))
    assert np.allclose(qs.partial_trace(rho, [1, 2]).matrix, expected, atol=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_partial_trace_matches_einsum_and_preserves_trace(seed):
    rng = np.random.default_rng(seed)
    dims = tuple(int(d) for d in rng.integers(2, 4, size=3))
    rho = qs.random_density(dims, rng)
    keep = sorted(rng.choice(3, size=int(rng.integers(1, 3)), replace=False).tolist())
    red = qs.partial_trace(rho, keep)
    assert np.allclose(red.matrix, ptrace_oracle(rho.matrix, dims, keep), atol=1e-12)
    assert np.trace(red.matrix).real == pytest.approx(1.0, abs=1e-10)
    assert np.linalg.eigvalsh(red.matrix).min() >= -1e-10


def test_von_neumann_examples():
    assert qs.von_neumann_entropy(qs.density_from_pure(qs.ghz_state(3))) == pytest.approx(0.0, abs=1e-10)
    assert qs.von_neumann_entropy(qs.maximally_mixed((2,))) == pytest.approx(1.0, abs=1e-12)
    for m in range(2, 7):
        rho = qs.density_from_pure(qs.ghz_state(m))
        assert qs.von_neumann_entropy(qs.partial_trace(rho, [0])) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("seed", range(10))
def test_von_neumann_matches_oracle(seed):
    rho = qs.random_density((2, 3), np.random.default_rng(seed))
    assert qs.von_neumann_entropy(rho) == pytest.approx(vn_oracle(rho.matrix), abs=1e-10)


def test_cerf_examples():
    assert qs.cerf_monotone(qs.density_from_pure(qs.ghz_state(3))) == pytest.approx(3.0, abs=1e-10)
    assert qs.cerf_monotone(qs.density_from_pure(qs.parity_state(4))) == pytest.approx(4.0, abs=1e-10)
    prod = qs.product_state(qs.basis_state((2,), (0,)), qs.basis_state((2,), (0,)))
    assert qs.cerf_monotone(qs.density_from_pure(prod)) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_cerf_of_random_product_pure_state_is_zero(seed):
    rng = np.random.default_rng(seed)
    psi = qs.product_state(*(qs.random_pure_state((d,), rng) for d in (2, 3, 2)))
    assert qs.cerf_monotone(qs.density_from_pure(psi)) == pytest.approx(0.0, abs=1e-9)


def test_trace_distance_examples():
    r0 = qs.density_from_pure(qs.basis_state((2,), (0,)))
    r1 = qs.density_from_pure(qs.basis_state((2,), (1,)))
    assert qs.trace_distance(r0, r0) == pytest.approx(0.0, abs=1e-12)
    assert qs.trace_distance(r0, r1) == pytest.approx(1.0, abs=1e-12)
    assert qs.trace_distance(r0, qs.maximally_mixed((2,))) == pytest.approx(0.5, abs=1e-12)


# measurements


def test_basis_povms():
    comp = qs.computational_basis_povm(2)
    assert np.allclose(comp.elements[0], np.diag([1, 0])) and np.allclose(comp.elements[1], np.diag([0, 1]))
    h = qs.hadamard_basis_povm()
    assert np.allclose(sum(h.elements), np.eye(2))
    for e in h.elements:
        assert np.allclose(e @ e, e)


def test_povm_from_non_unitary_rejected():
    with pytest.raises(QuantumStateError):
        POVM.from_basis(np.array([[1, 1], [0, 1]]))


def test_measure_examples():
    rho = qs.density_from_pure(qs.ghz_state(3))
    law = qs.measure_product_povm(rho, [qs.computational_basis_povm(2)] * 3)
    assert law.allclose(it.ghz_distribution(3))
    psi2 = qs.density_from_pure(qs.hadamard_ghz_state())
    assert qs.measure_product_povm(psi2, [qs.computational_basis_povm(2)] * 3).allclose(it.parity_distribution(3))
    had = qs.measure_product_povm(psi2, [qs.hadamard_basis_povm()] * 3)
    assert had.allclose(it.ghz_distribution(3), atol=1e-12)
    assert it.total_correlation(had) == pytest.approx(2.0, abs=1e-10)


def test_measure_dimension_mismatch():
    rho = qs.density_from_pure(qs.ghz_state(2))
    with pytest.raises(QuantumStateError):
        qs.measure_product_povm(rho, [qs.computational_basis_povm(3), qs.computational_basis_povm(2)])


def born_oracle(rho, povms):
    out = np.zeros(tuple(p.outcomes for p in povms))
    for idx in np.ndindex(*out.shape):
        op = povms[0].elements[idx[0]]
        for p, k in zip(povms[1:], idx[1:]):
            op = np.kron(op, p.elements[k])
        out[idx] = np.trace(rho.matrix @ op).real
    return out


def test_random_povm_outcomes_are_valid_distributions():
    rng = np.random.default_rng(2024)
    for _ in range(120):
        m = int(rng.integers(1, 4))
        dims = tuple(int(d) for d in rng.integers(2, 4, size=m))
        rho = qs.random_density(dims, rng) if rng.random() < 0.5 else qs.density_from_pure(qs.random_pure_state(dims, rng))
        povms = [random_povm(d, int(rng.integers(1, 5)), rng) for d in dims]
        law = qs.measure_product_povm(rho, povms)
        assert law.probs.min() >= 0 and abs(law.probs.sum() - 1) <= 1e-12
        assert np.allclose(law.table, born_oracle(rho, povms), atol=1e-10)


@pytest.mark.parametrize("state", [("ghz", m) for m in range(2, 6)] + [("parity", m) for m in range(3, 6)])
def test_cerf_dominates_measured_total_correlation(state):
    kind, m = state
    psi = qs.ghz_state(m) if kind == "ghz" else qs.parity_state(m)
    rho = qs.density_from_pure(psi)
    bound = qs.cerf_monotone(rho)
    rng = np.random.default_rng(m)
    for _ in range(15):
        povms = [random_povm(2, int(rng.integers(2, 4)), rng) for _ in range(m)]
        assert it.total_correlation(qs.measure_product_povm(rho, povms)) <= bound + 1e-9
    basis = [POVM.from_basis(qs.random_unitary(2, rng)) for _ in range(m)]
    assert it.total_correlation(qs.measure_product_povm(rho, basis)) <= bound + 1e-9


# decorrelation


def test_randomizing_step_identity_pair_is_noop():
    rho = qs.density_from_pure(qs.hadamard_ghz_state())
    out = qs.randomizing_step(rho, 1, (qs.IDENTITY2, qs.IDENTITY2))
    assert np.allclose(out.matrix, rho.matrix, atol=1e-12)


def test_randomizing_step_rejects_non_unitary():
    rho = qs.density_from_pure(qs.ghz_state(2))
    with pytest.raises(QuantumStateError):
        qs.randomizing_step(rho, 0, (qs.IDENTITY2, np.diag([1.0, 0.0])))


def test_decorrelation_intermediate_states():
    _, bits, history = qs.decorrelate_parity(3)
    phi = np.array([1, 0, 0, 1], dtype=complex)
    psi = np.array([0, 1, 1, 0], dtype=complex)
    after_z = 0.25 * (np.kron(np.outer(KET0, KET0), np.outer(phi, phi)) + np.kron(np.outer(KET1, KET1), np.outer(psi, psi)))
    assert np.allclose(history[0].matrix, after_z, atol=1e-12)
    bell = 0.25 * (np.outer(phi, phi) + np.outer(psi, psi))
    assert np.allclose(history[1].matrix, np.kron(np.eye(2) / 2, bell), atol=1e-12)
    assert qs.trace_distance(qs.partial_trace(history[1], [1, 2]), qs.bell_mixture_23()) <= 1e-9
    assert np.allclose(qs.partial_trace(history[1], [0]).matrix, np.eye(2) / 2)


def test_decorrelate_psi2_end_state_and_bits():
    rho, bits = qs.decorrelate_psi2()
    assert bits == 3
    assert qs.trace_distance(rho, qs.maximally_mixed((2, 2, 2))) <= 1e-9
    assert bits == pytest.approx(qs.cerf_monotone(qs.density_from_pure(qs.hadamard_ghz_state())), abs=1e-9)


@pytest.mark.parametrize("m", range(3, 7))
def test_parity_decorrelation_uses_cerf_bits(m):
    rho, bits, _ = qs.decorrelate_parity(m)
    assert bits == m
    assert qs.trace_distance(rho, qs.maximally_mixed((2,) * m)) <= 1e-9


@given(st.integers(0, 2**32 - 1))
def test_random_unitary_is_unitary(seed):
    u = qs.random_unitary(3, np.random.default_rng(seed))
    assert np.allclose(u.conj().T @ u, np.eye(3), atol=1e-10)
