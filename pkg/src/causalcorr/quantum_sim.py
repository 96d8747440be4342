"""Small-scale exact quantum state calculus.

Basis states are indexed lexicographically with subsystem 0 the most
significant digit, so ``|x_0 x_1 ... x_{m-1}>`` sits at row-major index
``ravel_multi_index(x, dims)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .infotheory import JointDistribution

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
MAX_QUBITS = 12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
IDENTITY2 = np.eye(2, dtype=complex)


class QuantumStateError(ValueError):
    """Raised when a state, operator or POVM violates its invariants."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise QuantumStateError(f"invalid subsystem dimensions {dims}")
    return dims


@dataclass(frozen=True, eq=False)
class PureState:
    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __init__(self, dims: Sequence[int], amplitudes) -> None:
        dims = _dims(dims)
        vec = np.array(amplitudes, dtype=complex).reshape(-1)
        if vec.size != math.prod(dims):
            raise QuantumStateError(f"{vec.size} amplitudes for dims {dims}")
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > 1e-12:
            raise QuantumStateError(f"state norm is {norm!r}, expected 1")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", _frozen(vec))

    @property
    def parties(self) -> int:
        return len(self.dims)

    def amplitude(self, basis: Sequence[int]) -> complex:
        return complex(self.amplitudes[np.ravel_multi_index(tuple(basis), self.dims)])


@dataclass(frozen=True, eq=False)
class DensityOperator:
    dims: tuple[int, ...]
    matrix: np.ndarray

    def __init__(self, dims: Sequence[int], matrix) -> None:
        dims = _dims(dims)
        mat = np.array(matrix, dtype=complex)
        size = math.prod(dims)
        if mat.shape != (size, size):
            raise QuantumStateError(f"matrix shape {mat.shape} does not match dims {dims}")
        if np.abs(mat - mat.conj().T).max() > HERMITIAN_TOL:
            raise QuantumStateError("density operator is not Hermitian")
        if abs(np.trace(mat) - 1.0) > HERMITIAN_TOL:
            raise QuantumStateError(f"trace is {np.trace(mat)!r}, expected 1")
        if np.linalg.eigvalsh(mat).min() < -PSD_TOL:
            raise QuantumStateError("density operator has a negative eigenvalue")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", _frozen(mat))

    @property
    def parties(self) -> int:
        return len(self.dims)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def is_pure(self, tol: float = 1e-8) -> bool:
        return self.purity() >= 1.0 - tol


@dataclass(frozen=True, eq=False)
class POVM:
    dim: int
    elements: tuple[np.ndarray, ...]

    def __init__(self, dim: int, elements: Sequence) -> None:
        mats = tuple(_frozen(np.array(e, dtype=complex)) for e in elements)
        if not mats:
            raise QuantumStateError("POVM needs at least one element")
        total = np.zeros((dim, dim), dtype=complex)
        for e in mats:
            if e.shape != (dim, dim):
                raise QuantumStateError(f"POVM element of shape {e.shape}, expected {(dim, dim)}")
            if np.abs(e - e.conj().T).max() > HERMITIAN_TOL:
                raise QuantumStateError("POVM element is not Hermitian")
            if np.linalg.eigvalsh(e).min() < -PSD_TOL:
                raise QuantumStateError("POVM element is not positive semidefinite")
            total += e
        if np.abs(total - np.eye(dim)).max() > HERMITIAN_TOL:
            raise QuantumStateError("POVM elements do not sum to the identity")
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "elements", mats)

    @property
    def outcomes(self) -> int:
        return len(self.elements)

    @classmethod
    def from_basis(cls, unitary: np.ndarray) -> "POVM":
        """Rank-1 projectors onto the columns of ``unitary``."""
        u = np.asarray(unitary, dtype=complex)
        return cls(u.shape[0], [np.outer(u[:, k], u[:, k].conj()) for k in range(u.shape[1])])


# State constructors


def basis_state(dims: Sequence[int], index: Sequence[int]) -> PureState:
    dims = _dims(dims)
    vec = np.zeros(math.prod(dims), dtype=complex)
    vec[np.ravel_multi_index(tuple(index), dims)] = 1.0
    return PureState(dims, vec)


def _check_qubits(m: int, lo: int) -> None:
    if not lo <= m <= MAX_QUBITS:
        raise QuantumStateError(f"m must be in [{lo}, {MAX_QUBITS}], got {m}")


def ghz_state(m: int) -> PureState:
    """``(|0...0> + |1...1>) / sqrt(2)`` on ``m`` qubits."""
    _check_qubits(m, 2)
    vec = np.zeros(2**m, dtype=complex)
    vec[0] = vec[-1] = 1 / math.sqrt(2)
    return PureState((2,) * m, vec)


def parity_state(m: int) -> PureState:
    """Uniform superposition of the even-parity strings; the GHZ state in the Hadamard basis."""
    _check_qubits(m, 3)
    weights = np.array([bin(k).count("1") % 2 == 0 for k in range(2**m)], dtype=complex)
    return PureState((2,) * m, weights * 2 ** (-(m - 1) / 2))


def hadamard_ghz_state() -> PureState:
    return parity_state(3)


def product_state(*factors: PureState) -> PureState:
    vec = np.array([1.0], dtype=complex)
    dims: tuple[int, ...] = ()
    for f in factors:
        vec = np.kron(vec, f.amplitudes)
        dims += f.dims
    return PureState(dims, vec)


def apply_local(state: PureState, unitary: np.ndarray, subsystem: int) -> PureState:
    """Apply a single-subsystem operator to a pure state."""
    psi = state.amplitudes.reshape(state.dims)
    psi = np.moveaxis(np.tensordot(unitary, psi, axes=([1], [subsystem])), 0, subsystem)
    return PureState(state.dims, psi.reshape(-1))


def density_from_pure(state: PureState) -> DensityOperator:
    v = state.amplitudes
    return DensityOperator(state.dims, np.outer(v, v.conj()))


def maximally_mixed(dims: Sequence[int]) -> DensityOperator:
    size = math.prod(dims)
    return DensityOperator(dims, np.eye(size) / size)


def tensor(*ops: DensityOperator) -> DensityOperator:
    mat = np.array([[1.0]], dtype=complex)
    dims: tuple[int, ...] = ()
    for op in ops:
        mat = np.kron(mat, op.matrix)
        dims += op.dims
    return DensityOperator(dims, mat)


def partial_trace(rho: DensityOperator, keep: Sequence[int]) -> DensityOperator:
    """Reduced operator on the subsystems in ``keep`` (kept in increasing order)."""
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise QuantumStateError("must keep at least one subsystem")
    if any(not 0 <= k < rho.parties for k in keep):
        raise QuantumStateError(f"subsystem index out of range in {keep}")
    m = rho.parties
    t = rho.matrix.reshape(rho.dims + rho.dims)
    # contract traced-out subsystems from the highest axis down
    for k in sorted((k for k in range(m) if k not in keep), reverse=True):
        cur = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + cur)
    dims = tuple(rho.dims[k] for k in keep)
    size = math.prod(dims)
    mat = t.reshape(size, size)
    return DensityOperator(dims, 0.5 * (mat + mat.conj().T))


def von_neumann_entropy(rho: DensityOperator) -> float:
    """``-tr(rho log2 rho)`` from the eigenvalues."""
    lam = np.linalg.eigvalsh(rho.matrix)
    if lam.min() < -PSD_TOL:
        raise QuantumStateError(f"eigenvalue {lam.min()!r} below tolerance")
    lam = lam[lam > PSD_TOL]
    return max(float(-(lam * np.log2(lam)).sum()), 0.0)


def marginal_entropies(rho: DensityOperator) -> list[float]:
    return [von_neumann_entropy(partial_trace(rho, [i])) for i in range(rho.parties)]


def cerf_monotone(rho: DensityOperator) -> float:
    """``sum_i S(A_i) - S(A_0 ... A_{m-1})``."""
    return max(sum(marginal_entropies(rho)) - von_neumann_entropy(rho), 0.0)


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    if rho.dims != sigma.dims:
        raise QuantumStateError(f"dimension mismatch: {rho.dims} vs {sigma.dims}")
    sv = np.linalg.svd(rho.matrix - sigma.matrix, compute_uv=False)
    return min(0.5 * float(sv.sum()), 1.0)


# Measurement


def computational_basis_povm(d: int) -> POVM:
    if d < 2:
        raise QuantumStateError("dimension must be >= 2")
    return POVM.from_basis(np.eye(d))


def hadamard_basis_povm() -> POVM:
    return POVM.from_basis(HADAMARD)


def measure_product_povm(rho: DensityOperator, povms: Sequence[POVM]) -> JointDistribution:
    """Outcome law ``P(x) = tr(rho E_{x_0} (x) ... (x) E_{x_{m-1}})``."""
    if len(povms) != rho.parties:
        raise QuantumStateError(f"need {rho.parties} POVMs, got {len(povms)}")
    for k, (p, d) in enumerate(zip(povms, rho.dims)):
        if p.dim != d:
            raise QuantumStateError(f"POVM {k} acts on dimension {p.dim}, subsystem has {d}")
    m = rho.parties
    t = rho.matrix.reshape(rho.dims + rho.dims)
    # contract subsystem k's (row, col) pair with stack of elements E[x, col, row]
    # axes at step k: (x_0..x_{k-1}, r_k..r_{m-1}, c_k..c_{m-1})
    for k in range(m):
        stack = np.stack(povms[k].elements)  # E[x, c, r]
        t = np.tensordot(t, stack, axes=([k, m], [2, 1]))
        t = np.moveaxis(t, -1, k)
    probs = np.real(t).reshape(-1)
    if probs.min() < -PSD_TOL:
        raise QuantumStateError(f"negative outcome probability {probs.min()!r}")
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    return JointDistribution(tuple(p.outcomes for p in povms), probs)


def computational_distribution(rho: DensityOperator) -> JointDistribution:
    return measure_product_povm(rho, [computational_basis_povm(d) for d in rho.dims])


# Decorrelation by local random unitaries


def _is_unitary(u: np.ndarray) -> bool:
    return u.shape[0] == u.shape[1] and np.abs(u @ u.conj().T - np.eye(u.shape[0])).max() <= 1e-10


def embed_local(op: np.ndarray, subsystem: int, dims: Sequence[int]) -> np.ndarray:
    mats = [np.eye(d, dtype=complex) for d in dims]
    mats[subsystem] = np.asarray(op, dtype=complex)
    out = mats[0]
    for mat in mats[1:]:
        out = np.kron(out, mat)
    return out


def randomizing_step(
    rho: DensityOperator, subsystem: int, unitary_pair: tuple[np.ndarray, np.ndarray]
) -> DensityOperator:
    """``(U1 rho U1^+ + U2 rho U2^+) / 2`` with both unitaries on one subsystem.

    Consumes one bit of randomness; callers keep their own count.
    """
    u1, u2 = (np.asarray(u, dtype=complex) for u in unitary_pair)
    if not 0 <= subsystem < rho.parties:
        raise QuantumStateError(f"subsystem {subsystem} out of range")
    for u in (u1, u2):
        if u.shape != (rho.dims[subsystem],) * 2 or not _is_unitary(u):
            raise QuantumStateError("randomizing step needs two unitaries on the subsystem")
    big1, big2 = (embed_local(u, subsystem, rho.dims) for u in (u1, u2))
    mat = 0.5 * (big1 @ rho.matrix @ big1.conj().T + big2 @ rho.matrix @ big2.conj().T)
    return DensityOperator(rho.dims, 0.5 * (mat + mat.conj().T))


def parity_decorrelation_sequence(m: int) -> list[tuple[int, np.ndarray]]:
    """Random-unitary schedule that fully decorrelates the ``m``-qubit parity state.

    sigma_z then sigma_x on qubit 0, then sigma_z on qubits 1 .. m-2; each step
    mixes the identity with the listed Pauli.  Uses ``m`` bits in total.
    """
    steps = [(0, SIGMA_Z), (0, SIGMA_X)]
    steps += [(k, SIGMA_Z) for k in range(1, m - 1)]
    return steps


def decorrelate_parity(m: int) -> tuple[DensityOperator, int, list[DensityOperator]]:
    """Run the decorrelation schedule on the parity state.

    Returns the final state, the number of random bits used, and the state
    after every step.
    """
    rho = density_from_pure(parity_state(m))
    history = []
    bits = 0
    for qubit, pauli in parity_decorrelation_sequence(m):
        rho = randomizing_step(rho, qubit, (IDENTITY2, pauli))
        bits += 1
        history.append(rho)
    return rho, bits, history


def decorrelate_psi2() -> tuple[DensityOperator, int]:
    """Decorrelate the 3-qubit Hadamard-basis GHZ state; returns ``(state, bits_used)``."""
    rho, bits, _ = decorrelate_parity(3)
    return rho, bits


def bell_mixture_23() -> DensityOperator:
    """``[(|00>+|11>)(<00|+<11|) + (|01>+|10>)(<01|+<10|)] / 4``."""
    phi = np.array([1, 0, 0, 1], dtype=complex)
    psi = np.array([0, 1, 1, 0], dtype=complex)
    return DensityOperator((2, 2), 0.25 * (np.outer(phi, phi) + np.outer(psi, psi)))


def random_pure_state(dims: Sequence[int], rng: np.random.Generator) -> PureState:
    size = math.prod(dims)
    v = rng.normal(size=size) + 1j * rng.normal(size=size)
    return PureState(dims, v / np.linalg.norm(v))


def random_density(dims: Sequence[int], rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    size = math.prod(dims)
    rank = rank or size
    g = rng.normal(size=(size, rank)) + 1j * rng.normal(size=(size, rank))
    mat = g @ g.conj().T
    return DensityOperator(dims, mat / np.trace(mat))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random ``d x d`` unitary via QR with phase correction."""
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
