"""Bundled reproduction script: every headline number with its tolerance."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import causal_model as cm
from . import circuits as cc
from . import infotheory as it
from . import povm_search as ps
from . import protocols as pr
from . import quantum_sim as qs
from .formats import fmt_float

SEED = 20240601
PROTOCOL_SEED = 7
CIRCUIT_SEED = 11


@dataclass(frozen=True)
class Check:
    group: str
    name: str
    compute: Callable[[], float]
    expected: float
    tol: float
    op: str = "abs"  # abs: |actual - expected| <= tol; ge / le: one-sided with slack tol


@dataclass(frozen=True)
class CheckResult:
    check: Check
    actual: float

    @property
    def passed(self) -> bool:
        a, e, t = self.actual, self.check.expected, self.check.tol
        if math.isnan(a):
            return False
        if self.check.op == "ge":
            return a >= e - t
        if self.check.op == "le":
            return a <= e + t
        return abs(a - e) <= t

    def line(self) -> str:
        c = self.check
        rel = {"abs": "==", "ge": ">=", "le": "<="}[c.op]
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {c.group}/{c.name}: actual={fmt_float(self.actual)} "
                f"{rel} expected={fmt_float(c.expected)} tol={fmt_float(c.tol)}")


def _rho(state: qs.PureState) -> qs.DensityOperator:
    return qs.density_from_pure(state)


@functools.lru_cache(maxsize=None)
def _sandwich(kind: str, m: int) -> ps.SandwichBounds:
    state = qs.ghz_state(m) if kind == "ghz" else qs.parity_state(m)
    return ps.theorem2_bounds(_rho(state), restarts=ps.DEFAULT_RESTARTS, seed=SEED, early_stop=False)


@functools.lru_cache(maxsize=None)
def _protocol(rate: float) -> tuple[float, float]:
    cfg = pr.HybridConfig(it.ghz_distribution(3), 100, (rate, rate), 0.1, 200, PROTOCOL_SEED)
    return pr.success_probability(cfg)


def _random_audits() -> float:
    rng = np.random.default_rng(CIRCUIT_SEED)
    passed = 0
    for _ in range(100):
        m = int(rng.integers(1, 6))
        circ = cc.random_circuit(m, int(rng.integers(0, 11)), rng)
        state = cc.simulate(circ)
        bound = it.total_correlation(qs.computational_distribution(_rho(state)))
        passed += cc.theorem3_audit(circ, bound).passed
    return float(passed)


def _decorrelation_checks() -> list[Check]:
    def final_distance():
        rho, _ = qs.decorrelate_psi2()
        return qs.trace_distance(rho, qs.maximally_mixed((2, 2, 2)))

    def step2_distance():
        _, _, history = qs.decorrelate_parity(3)
        return qs.trace_distance(qs.partial_trace(history[1], [1, 2]), qs.bell_mixture_23())

    return [
        Check("decorrelation", "final state vs maximally mixed (trace distance)", final_distance, 0.0, 1e-9),
        Check("decorrelation", "bits used", lambda: float(qs.decorrelate_psi2()[1]), 3.0, 0.0),
        Check("decorrelation", "bits used == C_er(psi2)", lambda: qs.cerf_monotone(_rho(qs.hadamard_ghz_state())), 3.0, 1e-9),
        Check("decorrelation", "after step 2 on {2,3} vs Bell mixture", step2_distance, 0.0, 1e-9),
    ]


def _model_checks() -> list[Check]:
    out = []
    for m in (3, 4):
        target = it.ghz_distribution(m)
        models = cm.spanning_tree_models("ghz", m)
        out += [
            Check("models", f"ghz m={m} max Condition 1 TV", lambda ms=models, t=target: max(cm.check_condition1(x, t).tv for x in ms), 0.0, 0.0),
            Check("models", f"ghz m={m} max Condition 2 violation", lambda ms=models: max(cm.check_condition2(x).max_violation for x in ms), 0.0, 0.0),
            Check("models", f"ghz m={m} rate", lambda ms=models: max(cm.model_rate(x) for x in ms), m - 1, 1e-12),
            Check("models", f"ghz m={m} C", lambda t=target: it.total_correlation(t), m - 1, 1e-9),
            Check("models", f"ghz m={m} max vanishing randomness", lambda ms=models: max(cm.vanishing_randomness(x, i) for x in ms for i in range(x.m)), 0.0, 0.0),
        ]
    star = cm.spanning_tree_models("parity", 3)[0]
    p2 = it.parity_distribution(3)
    diag = functools.lru_cache(maxsize=None)(lambda: cm.theorem1_diagnose(star, p2))
    out += [
        Check("models", "parity star rate", lambda: cm.model_rate(star), 2.0, 1e-12),
        Check("models", "P2 total correlation", lambda: it.total_correlation(p2), 1.0, 1e-9),
        Check("models", "parity node vanishing randomness", lambda: cm.vanishing_randomness(star, 2), 1.0, 1e-9),
        Check("models", "witness gap", lambda: diag().gap, 1.0, 1e-9),
        Check("models", "witness regime is vanishing-randomness", lambda: float(diag().classification == cm.VANISHING), 1.0, 0.0),
        Check("models", "ghz m=4 tree count", lambda: float(len(cm.spanning_tree_models("ghz", 4))), 6.0, 0.0),
        Check("models", "redundant demo rate", lambda: cm.redundant_model_demo(4)[1].rate, 4.0, 1e-12),
        Check("models", "redundant demo C", lambda: cm.redundant_model_demo(4)[1].total_correlation, 3.0, 1e-9),
        Check("models", "redundant demo cycle detected", lambda: float(cm.redundant_model_demo(4)[1].graph.has_cycle), 1.0, 0.0),
    ]
    return out


def build_script() -> list[Check]:
    checks: list[Check] = []
    for m in range(2, 7):
        checks.append(Check("measures", f"C(P1) m={m}", lambda m=m: it.total_correlation(it.ghz_distribution(m)), m - 1, 1e-9))
        checks.append(Check("measures", f"C_er(GHZ) m={m}", lambda m=m: qs.cerf_monotone(_rho(qs.ghz_state(m))), m, 1e-9))
    for m in range(3, 7):
        checks.append(Check("measures", f"C(P3) m={m}", lambda m=m: it.total_correlation(it.parity_distribution(m)), 1.0, 1e-9))
        checks.append(Check("measures", f"C_er(psi3) m={m}", lambda m=m: qs.cerf_monotone(_rho(qs.parity_state(m))), m, 1e-9))
    checks.append(Check("measures", "C(P2 on parties 2,3)", lambda: it.total_correlation(it.marginal(it.parity_distribution(3), [1, 2])), 0.0, 0.0))
    checks += _decorrelation_checks()
    checks += _model_checks()
    for kind, m in [("ghz", 2), ("ghz", 3), ("ghz", 4), ("parity", 3)]:
        checks.append(Check("sandwich", f"{kind} m={m} lower", lambda k=kind, m=m: _sandwich(k, m).lower, m - 1, 1e-3, "ge"))
        checks.append(Check("sandwich", f"{kind} m={m} upper", lambda k=kind, m=m: _sandwich(k, m).upper, m - 1, 1e-9))
    for m in range(2, 6):
        checks.append(Check("circuits", f"cnot_count(ghz_circuit({m}))", lambda m=m: float(cc.cnot_count(cc.ghz_circuit(m))), m - 1, 0.0))
        checks.append(Check(
            "circuits", f"audit ghz_circuit({m}) against sandwich lower bound",
            lambda m=m: float(cc.theorem3_audit(cc.ghz_circuit(m), _sandwich("ghz", m).lower).passed), 1.0, 0.0,
        ))
    checks.append(Check("circuits", "random circuits passing audit (of 100)", _random_audits, 100.0, 0.0))
    checks += [
        Check("protocol", "binary CKA n=100 eps=0.1 R=0.7 success", lambda: _protocol(0.7)[0], 0.9, 0.0, "ge"),
        Check("protocol", "binary CKA n=100 eps=0.1 R=0.1 success", lambda: _protocol(0.1)[0], 0.1, 0.0, "le"),
        Check("protocol", "sweep C", lambda: it.total_correlation(it.ghz_distribution(3)), 2.0, 1e-9),
        Check("protocol", "sweep eps-corrected threshold", lambda: pr.covering_threshold(it.ghz_distribution(3), 0.1), 2 * (1 - pr.binary_entropy(0.1)), 1e-12),
    ]
    for m in (3, 4):
        checks.append(Check("xor", f"m={m} all recoveries correct", lambda m=m: float(pr.xor_exhaustive(m).all_correct), 1.0, 0.0))
        checks.append(Check("xor", f"m={m} max I(Y_i;M_i)", lambda m=m: max(pr.xor_exhaustive(m).leakage), 0.0, 0.0))
    return checks


GROUPS = ("measures", "decorrelation", "models", "sandwich", "circuits", "protocol", "xor")


def run_script(checks: Sequence[Check], only: Sequence[str] | None = None) -> list[CheckResult]:
    selected = [c for c in checks if not only or c.group in only]
    return [CheckResult(c, float(c.compute())) for c in selected]


def render(results: Sequence[CheckResult]) -> str:
    lines = [r.line() for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"


def tampered(checks: Sequence[Check], name: str, **changes) -> list[Check]:
    """Copy of ``checks`` with the named check's fields replaced."""
    return [replace(c, **changes) if c.name == name else c for c in checks]
