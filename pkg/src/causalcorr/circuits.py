"""Gate-level circuits built from single-qubit unitaries and CNOTs."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quantum_sim import HADAMARD, MAX_QUBITS, PureState, random_unitary


class CircuitError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Gate:
    """Either ``kind="u1"`` (matrix on ``target``) or ``kind="cnot"``."""

    kind: str
    target: int
    control: int | None = None
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.kind == "cnot":
            if self.control is None or self.control == self.target:
                raise CircuitError("CNOT needs a control distinct from its target")
        elif self.kind == "u1":
            if self.matrix is None:
                raise CircuitError("single-qubit gate needs a matrix")
            u = np.array(self.matrix, dtype=complex)
            if u.shape != (2, 2) or np.abs(u @ u.conj().T - np.eye(2)).max() > 1e-10:
                raise CircuitError("single-qubit gate matrix is not a 2x2 unitary")
            u.setflags(write=False)
            object.__setattr__(self, "matrix", u)
        else:
            raise CircuitError(f"unknown gate kind {self.kind!r}")

    @classmethod
    def cnot(cls, control: int, target: int) -> "Gate":
        return cls("cnot", target=target, control=control)

    @classmethod
    def u1(cls, target: int, matrix) -> "Gate":
        return cls("u1", target=target, matrix=matrix)

    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target) if self.kind == "cnot" else (self.target,)

    def to_dict(self) -> dict:
        if self.kind == "cnot":
            return {"kind": "cnot", "control": self.control, "target": self.target}
        return {
            "kind": "u1",
            "target": self.target,
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Gate":
        if data["kind"] == "cnot":
            return cls.cnot(int(data["control"]), int(data["target"]))
        # entries are [re, im] pairs or plain reals
        mat = [[complex(*z) if isinstance(z, (list, tuple)) else complex(z) for z in row]
               for row in data["matrix"]]
        return cls.u1(int(data["target"]), mat)


@dataclass(frozen=True)
class Circuit:
    qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        if not 1 <= self.qubits <= MAX_QUBITS:
            raise CircuitError(f"qubit count must be in [1, {MAX_QUBITS}]")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(not 0 <= q < self.qubits for q in g.qubits()):
                raise CircuitError(f"gate {g} addresses a qubit outside 0..{self.qubits - 1}")

    def then(self, *gates: Gate) -> "Circuit":
        return Circuit(self.qubits, self.gates + gates)

    def to_dict(self) -> dict:
        return {"qubits": self.qubits, "gates": [g.to_dict() for g in self.gates]}

    @classmethod
    def from_dict(cls, data: dict) -> "Circuit":
        return cls(int(data["qubits"]), tuple(Gate.from_dict(g) for g in data["gates"]))


def _apply(psi: np.ndarray, gate: Gate) -> np.ndarray:
    if gate.kind == "u1":
        out = np.tensordot(gate.matrix, psi, axes=([1], [gate.target]))
        return np.moveaxis(out, 0, gate.target)
    out = psi.copy()
    sel1 = [slice(None)] * psi.ndim
    sel1[gate.control] = 1
    sub = out[tuple(sel1)]
    # target axis index shifts down by one once the control axis is removed
    t = gate.target - (gate.target > gate.control)
    out[tuple(sel1)] = np.flip(sub, axis=t)
    return out


def simulate(circuit: Circuit) -> PureState:
    """Apply the gates in order to ``|0...0>``."""
    m = circuit.qubits
    psi = np.zeros((2,) * m, dtype=complex)
    psi[(0,) * m] = 1.0
    for g in circuit.gates:
        psi = _apply(psi, g)
    vec = psi.reshape(-1)
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > 1e-10:
        raise CircuitError(f"simulation lost normalization ({norm!r})")
    return PureState((2,) * m, vec / norm)


def ghz_circuit(m: int) -> Circuit:
    """Hadamard on qubit 0 followed by a CNOT fan-out from qubit 0."""
    if m < 2:
        raise CircuitError("GHZ circuit needs at least 2 qubits")
    gates = [Gate.u1(0, HADAMARD)] + [Gate.cnot(0, j) for j in range(1, m)]
    return Circuit(m, tuple(gates))


def cnot_count(circuit: Circuit) -> int:
    return sum(g.kind == "cnot" for g in circuit.gates)


@dataclass(frozen=True)
class AuditReport:
    cnot_count: int
    bound: float
    required: int
    slack: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "cnot_count": self.cnot_count,
            "bound": self.bound,
            "required": self.required,
            "slack": self.slack,
            "pass": self.passed,
        }


def theorem3_audit(circuit: Circuit, rq_lower_bound: float) -> AuditReport:
    """Check that the CNOT count is at least a lower bound on the quantum resource rate.

    A failure means the supplied bound is wrong, since the count always
    dominates the resource rate of the prepared state.
    """
    if rq_lower_bound < 0:
        raise CircuitError("resource-rate bound must be nonnegative")
    count = cnot_count(circuit)
    required = max(math.ceil(rq_lower_bound - 1e-6), 0)
    return AuditReport(
        cnot_count=count,
        bound=float(rq_lower_bound),
        required=required,
        slack=float(count - rq_lower_bound),
        passed=count >= required,
    )


def random_circuit(m: int, n_gates: int, rng: np.random.Generator, cnot_fraction: float = 0.5) -> Circuit:
    gates: list[Gate] = []
    for _ in range(n_gates):
        if m >= 2 and rng.random() < cnot_fraction:
            c, t = rng.choice(m, size=2, replace=False)
            gates.append(Gate.cnot(int(c), int(t)))
        else:
            gates.append(Gate.u1(int(rng.integers(m)), random_unitary(2, rng)))
    return Circuit(m, tuple(gates))

