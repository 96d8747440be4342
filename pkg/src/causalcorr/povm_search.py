"""Lower-bounding the quantum total correlation over local projective measurements.

Each party measures in the basis given by the columns of a unitary
``U(theta)`` with ``d**2`` real parameters:

    U = diag(exp(i * phases)) @ G_{0,1} @ G_{0,2} @ ... @ G_{d-2,d-1}

where ``G_{p,q}(t, phi)`` is a plane rotation by angle ``t`` with relative
phase ``phi`` acting on basis vectors ``p, q``.  The ``d(d-1)/2`` rotations
take ``2 * d(d-1)/2`` parameters and the diagonal takes ``d``.  The
optimizer is coordinate ascent with a golden-section line search per
angle, restarted from the computational basis and from random points.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import infotheory as it
from .quantum_sim import POVM, DensityOperator, cerf_monotone, marginal_entropies

DEFAULT_RESTARTS = 16
DEFAULT_MAX_ITERS = 200
CONVERGENCE_BITS = 1e-6
_GOLDEN = (math.sqrt(5) - 1) / 2


def n_params(d: int) -> int:
    return d * d


def ansatz_unitary(params: Sequence[float], d: int) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    if params.size != n_params(d):
        raise ValueError(f"need {n_params(d)} parameters for d={d}, got {params.size}")
    u = np.eye(d, dtype=complex)
    k = 0
    for p, q in itertools.combinations(range(d), 2):
        t, phi = params[k], params[k + 1]
        k += 2
        g = np.eye(d, dtype=complex)
        c, s = math.cos(t), math.sin(t)
        g[p, p] = c
        g[q, q] = c
        g[p, q] = -np.exp(1j * phi) * s
        g[q, p] = np.exp(-1j * phi) * s
        u = u @ g
    phases = np.exp(1j * params[k:])
    return phases[:, None] * u


def ansatz_to_povm(params: Sequence[float], d: int) -> POVM:
    """Rank-1 projective POVM onto the columns of the ansatz unitary."""
    return POVM.from_basis(ansatz_unitary(params, d))


@dataclass(frozen=True)
class MeasurementAnsatz:
    dims: tuple[int, ...]
    params: tuple[tuple[float, ...], ...]

    def unitaries(self) -> list[np.ndarray]:
        return [ansatz_unitary(p, d) for p, d in zip(self.params, self.dims)]

    def povms(self) -> list[POVM]:
        return [ansatz_to_povm(p, d) for p, d in zip(self.params, self.dims)]

    def to_dict(self) -> dict:
        return {"dims": list(self.dims), "params": [list(p) for p in self.params]}


def outcome_distribution(rho: DensityOperator, unitaries: Sequence[np.ndarray]) -> it.JointDistribution:
    """Outcome law of measuring subsystem ``k`` in the columns of ``unitaries[k]``."""
    return it.JointDistribution(rho.dims, _outcome_probs(_Target.of(rho), unitaries))


class _Target:
    """A state prepared for repeated outcome-probability evaluation."""

    def __init__(self, dims, vector=None, matrix=None):
        self.dims = tuple(dims)
        self.vector = vector
        self.matrix = matrix

    @classmethod
    def of(cls, rho: DensityOperator) -> "_Target":
        lam, vecs = np.linalg.eigh(rho.matrix)
        if lam[-1] >= 1.0 - 1e-12:
            return cls(rho.dims, vector=vecs[:, -1].reshape(rho.dims))
        return cls(rho.dims, matrix=rho.matrix.reshape(rho.dims + rho.dims))


def _outcome_probs(target: _Target, unitaries: Sequence[np.ndarray | None]) -> np.ndarray:
    """Outcome probabilities; a ``None`` unitary leaves that subsystem unrotated."""
    vector, matrix = _rotated(target, unitaries)
    if vector is not None:
        p = np.abs(vector.reshape(-1)) ** 2
    else:
        size = math.prod(target.dims)
        p = np.real(np.diagonal(matrix.reshape(size, size)))
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def _tc_of(probs: np.ndarray, dims: tuple[int, ...]) -> float:
    table = probs.reshape(dims)
    m = len(dims)
    h = it._entropy_of
    singles = sum(h(table.sum(axis=tuple(j for j in range(m) if j != i))) for i in range(m))
    return max(singles - h(probs), 0.0)


class _Objective:
    def __init__(self, rho: DensityOperator):
        self.target = _Target.of(rho)
        self.dims = rho.dims
        self.evaluations = 0

    def __call__(self, params: list[np.ndarray]) -> float:
        self.evaluations += 1
        us = [ansatz_unitary(p, d) for p, d in zip(params, self.dims)]
        return _tc_of(_outcome_probs(self.target, us), self.dims)

    def along(self, params: list[np.ndarray], k: int):
        """Objective as a function of party ``k``'s parameters, others held fixed."""
        dims = self.dims
        us = [ansatz_unitary(p, d) if i != k else None for i, (p, d) in enumerate(zip(params, dims))]
        fixed = _Target(dims, *_rotated(self.target, us))

        def f(pk: np.ndarray) -> float:
            self.evaluations += 1
            u = ansatz_unitary(pk, dims[k])
            return _tc_of(_outcome_probs(fixed, [u if i == k else None for i in range(len(dims))]), dims)

        return f


def _rotated(target: _Target, unitaries) -> tuple:
    m = len(target.dims)
    if target.vector is not None:
        psi = target.vector
        for k, u in enumerate(unitaries):
            if u is not None:
                psi = np.moveaxis(np.tensordot(u.conj().T, psi, axes=([1], [k])), 0, k)
        return psi, None
    t = target.matrix
    for k, u in enumerate(unitaries):
        if u is not None:
            t = np.moveaxis(np.tensordot(u.conj().T, t, axes=([1], [k])), 0, k)
            t = np.moveaxis(np.tensordot(t, u, axes=([m + k], [0])), -1, m + k)
    return None, t


def _golden_max(f, lo: float, hi: float, tol: float = 1e-7) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


@dataclass(frozen=True)
class AscentResult:
    value: float
    params: tuple[tuple[float, ...], ...]
    sweeps: int
    converged: bool
    history: tuple[float, ...]


def coordinate_ascent(
    objective: _Objective,
    start: list[np.ndarray],
    max_iters: int = DEFAULT_MAX_ITERS,
    window: float = math.pi / 2,
) -> AscentResult:
    """Maximize by sweeping every angle with a bracketed golden-section search.

    A coordinate only moves when the line search strictly improves the
    objective, so the value sequence is nondecreasing.
    """
    params = [np.array(p, dtype=float) for p in start]
    best = objective(params)
    history = [best]
    converged = False
    sweeps = 0
    for sweeps in range(1, max_iters + 1):
        before = best
        for k in range(len(params)):
            party = objective.along(params, k)
            for j in range(params[k].size):
                x0 = params[k][j]

                def line(x, k=k, j=j):
                    trial = params[k].copy()
                    trial[j] = x
                    return party(trial)

                x, fx = _golden_max(line, x0 - window, x0 + window)
                if fx > best:
                    params[k][j] = x
                    best = fx
        history.append(best)
        if best - before < CONVERGENCE_BITS:
            converged = True
            break
    return AscentResult(best, tuple(tuple(float(v) for v in p) for p in params), sweeps, converged, tuple(history))


@dataclass(frozen=True)
class CqReport:
    best_value: float
    best_ansatz: MeasurementAnsatz
    upper_bound: float
    restarts_used: int
    converged: bool
    start_values: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "best_value": self.best_value,
            "upper_bound": self.upper_bound,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
            "start_values": list(self.start_values),
            "best_ansatz": self.best_ansatz.to_dict(),
        }


def theorem2_upper_bound(rho: DensityOperator) -> float:
    """``C_er(rho) - max_i S(A_i)``, valid for pure states."""
    return max(cerf_monotone(rho) - max(marginal_entropies(rho)), 0.0)


def trivial_upper_bound(rho: DensityOperator) -> float:
    """``sum_i log d_i - max_i log d_i`` bounds C of any local measurement with d_i outcomes."""
    logs = [math.log2(d) for d in rho.dims]
    return sum(logs) - max(logs)


def _start_rng(seed: int, restart: int) -> np.random.Generator:
    # restart r's start point is independent of the total restart count
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(restart,)))


def cq_lower_bound(
    rho: DensityOperator,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    seed: int = 0,
    early_stop: bool = True,
) -> CqReport:
    """Best total correlation found over local rank-1 projective measurements.

    Start 0 is the computational basis; starts ``1..restarts`` are uniform
    random angles.  Every evaluated measurement is feasible, so the result is
    a valid lower bound on the quantum total correlation.  Ties within 1e-12
    keep the lowest start index.

    With ``early_stop``, remaining starts are skipped once the value meets
    the upper bound within 1e-9, since no start can exceed it.
    ``restarts_used`` counts the random starts actually run.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    objective = _Objective(rho)
    dims = rho.dims
    upper = theorem2_upper_bound(rho) if rho.is_pure() else trivial_upper_bound(rho)
    best: AscentResult | None = None
    values = []
    converged = True
    used = 0
    for r in range(restarts + 1):
        if r == 0:
            start = [np.zeros(n_params(d)) for d in dims]
        else:
            rng = _start_rng(seed, r)
            start = [rng.uniform(-math.pi, math.pi, n_params(d)) for d in dims]
            used = r
        res = coordinate_ascent(objective, start, max_iters)
        values.append(res.value)
        converged &= res.converged
        if best is None or res.value > best.value + 1e-12:
            best = res
        if early_stop and best.value >= upper - 1e-9:
            break
    return CqReport(
        best_value=best.value,
        best_ansatz=MeasurementAnsatz(dims, best.params),
        upper_bound=upper,
        restarts_used=used,
        converged=converged,
        start_values=tuple(values),
    )


@dataclass(frozen=True)
class SandwichBounds:
    lower: float
    upper: float
    report: CqReport

    @property
    def pinched(self) -> bool:
        return self.upper - self.lower <= 1e-3

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "pinched": self.pinched, "cq": self.report.to_dict()}


def theorem2_bounds(
    rho: DensityOperator,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    seed: int = 0,
    early_stop: bool = True,
) -> SandwichBounds:
    """Lower and upper bounds on the quantum resource rate of a pure state."""
    if not rho.is_pure(1e-8):
        raise ValueError(f"state is not pure (purity {rho.purity():.12g})")
    report = cq_lower_bound(rho, restarts, max_iters, seed, early_stop)
    return SandwichBounds(report.best_value, theorem2_upper_bound(rho), report)
