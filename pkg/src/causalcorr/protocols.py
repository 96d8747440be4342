"""Monte-Carlo simulation of server-assisted key distribution and the XOR demo.

Key distribution: the server samples ``X_0^n`` from the first marginal of
the target.  For each later user ``j`` it holds a pre-shared codebook of
``2**ceil(n R_j)`` i.i.d. blocks drawn from marginal ``j`` and announces the
index of the first block that, together with the keys fixed so far, passes
a typicality test.  The user's key is that block.

Two equivalent execution methods are provided.  ``scan`` materializes the
codebook lazily and tests blocks in order.  ``sampled`` draws the same
outcome in distribution without touching unused blocks: the first accepted
index is geometric in the per-block acceptance probability (computed
exactly from multinomial count laws) and the accepted block is drawn from
the i.i.d. law conditioned on acceptance.  ``sampled`` makes codebooks far
beyond memory (e.g. ``2**70`` blocks) tractable.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln, logsumexp

from . import infotheory as it
from .infotheory import JointDistribution, SymbolSequence

SCAN_BUDGET_BITS = 24
AUTO_SCAN_BITS = 12
MAX_SWEEP_RUNS = 10**6
_CHUNK = 4096

CRITERIA = ("auto", "hamming", "joint", "conditional")
METHODS = ("auto", "scan", "sampled")


class ProtocolError(ValueError):
    pass


def binary_entropy(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def is_binary_cka(target: JointDistribution) -> bool:
    """True for the perfectly correlated uniform-bit law on ``m >= 2`` binary parties."""
    m = target.parties
    return m >= 2 and target.alphabet_sizes == (2,) * m and target.allclose(it.ghz_distribution(m))


def covering_threshold(target: JointDistribution, epsilon: float) -> float:
    """Epsilon-corrected total-rate threshold ``(m-1)(1 - h(epsilon))`` for binary CKA, else NaN."""
    if not is_binary_cka(target):
        return float("nan")
    return (target.parties - 1) * (1.0 - binary_entropy(epsilon))


def codebook_bits(n: int, rate: float) -> int:
    # guards against n * rate landing a hair above an integer
    return max(math.ceil(n * rate - 1e-9), 0)


@dataclass(frozen=True)
class HybridConfig:
    target: JointDistribution
    n: int
    rates: tuple[float, ...]
    epsilon: float
    trials: int = 1
    seed: int = 0
    criterion: str = "auto"
    method: str = "auto"

    def __post_init__(self) -> None:
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        if self.target.parties < 2:
            raise ProtocolError("key distribution needs at least two parties")
        if len(self.rates) != self.target.parties - 1:
            raise ProtocolError(f"need {self.target.parties - 1} user rates, got {len(self.rates)}")
        if any(r < 0 for r in self.rates):
            raise ProtocolError("rates must be nonnegative")
        if not 0 < self.epsilon < 0.5:
            raise ProtocolError("epsilon must lie in (0, 1/2)")
        if self.n < 1 or self.trials < 1:
            raise ProtocolError("n and trials must be >= 1")
        if self.criterion not in CRITERIA:
            raise ProtocolError(f"criterion must be one of {CRITERIA}")
        if self.method not in METHODS:
            raise ProtocolError(f"method must be one of {METHODS}")
        if self.criterion == "hamming" and not is_binary_cka(self.target):
            raise ProtocolError("the Hamming criterion applies to binary CKA targets only")

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(codebook_bits(self.n, r) for r in self.rates)

    @property
    def total_rate(self) -> float:
        return sum(self.rates)

    def resolved_criterion(self) -> str:
        if self.criterion != "auto":
            return self.criterion
        return "hamming" if is_binary_cka(self.target) else "conditional"

    def to_dict(self) -> dict:
        return {
            "target": self.target.to_dict(),
            "n": self.n,
            "rates": list(self.rates),
            "epsilon": self.epsilon,
            "trials": self.trials,
            "seed": self.seed,
            "criterion": self.criterion,
            "method": self.method,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HybridConfig":
        return cls(
            target=JointDistribution.from_dict(data["target"]),
            n=int(data["n"]),
            rates=tuple(data["rates"]),
            epsilon=float(data["epsilon"]),
            trials=int(data.get("trials", 1)),
            seed=int(data["seed"]),
            criterion=data.get("criterion", "auto"),
            method=data.get("method", "auto"),
        )


@dataclass(frozen=True)
class HybridResult:
    """Outcome of one protocol run.

    ``indices[j - 1]`` is the announced codeword index for user ``j`` (None
    if not reached or failed); ``checks`` counts candidate tests per user;
    ``unused`` counts the codewords left private per user.
    """

    success: bool
    indices: tuple[int | None, ...]
    keys: SymbolSequence | None
    failure_step: int | None
    codebook_bits: tuple[int, ...]
    checks: tuple[int, ...]
    unused: tuple[int, ...]
    prefix: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "indices": list(self.indices),
            "failure_step": self.failure_step,
            "codebook_bits": list(self.codebook_bits),
            "checks": list(self.checks),
            "unused": list(self.unused),
            "keys": None if self.keys is None else self.keys.symbols.T.tolist(),
        }


# Typicality


def _as_rows(prefix) -> np.ndarray:
    arr = prefix.symbols if isinstance(prefix, SymbolSequence) else np.asarray(prefix)
    return arr.reshape(arr.shape[0], -1)


def _count_boxes(prefix_rows: np.ndarray, target: JointDistribution, epsilon: float, criterion: str):
    """Per prefix-atom group: (positions, lo[b], hi[b]) count limits on the candidate symbols.

    Returns ``None`` when no candidate can pass.
    """
    n, j = prefix_rows.shape
    law = it.marginal(target, list(range(j + 1))) if j + 1 < target.parties else target
    table = law.table.reshape(-1, law.alphabet_sizes[-1])  # (prefix atoms, b)
    k = law.alphabet_sizes[-1]
    a_idx = np.ravel_multi_index(prefix_rows.T, law.alphabet_sizes[:-1])
    present = np.bincount(a_idx, minlength=table.shape[0])
    groups = []
    for a in range(table.shape[0]):
        p_ab = table[a]
        n_a = int(present[a])
        if criterion == "joint":
            center = n * p_ab
        else:
            p_a = p_ab.sum()
            if n_a and p_a == 0:
                return None
            center = n_a * (p_ab / p_a) if p_a > 0 else np.zeros(k)
        slack = epsilon * n * p_ab
        lo = np.maximum(np.ceil(center - slack - 1e-9), 0).astype(np.int64)
        hi = np.floor(center + slack + 1e-9).astype(np.int64)
        if n_a == 0:
            if np.any(lo > 0):
                return None
            continue
        if np.any(lo > hi) or lo.sum() > n_a or np.minimum(hi, n_a).sum() < n_a:
            return None
        groups.append((np.flatnonzero(a_idx == a), lo, np.minimum(hi, n_a)))
    return groups


def hamming_radius(n: int, epsilon: float) -> int:
    return math.floor(n * epsilon + 1e-9)


def typicality_criterion(
    prefix,
    candidate: Sequence[int],
    target: JointDistribution,
    epsilon: float,
    criterion: str = "auto",
) -> bool:
    """Whether ``candidate`` is an acceptable next key block given the keys so far.

    ``prefix`` holds the blocks of parties ``0..j-1`` (an ``n x j`` grid);
    ``candidate`` is party ``j``'s block.

    * ``hamming``: at most ``floor(n epsilon)`` positions differ from party 0;
      used for binary CKA targets under ``auto``.
    * ``joint``: every empirical joint frequency is within
      ``epsilon * p(x_0..x_j)`` of the target marginal.
    * ``conditional``: every joint count is within ``epsilon * n * p(x_0..x_j)``
      of what the prefix's own counts predict through the target's
      conditional law of ``x_j`` given ``x_0..x_{j-1}``.  The default for
      non-CKA targets.
    """
    rows = _as_rows(prefix)
    cand = np.asarray(candidate, dtype=np.int64).reshape(-1)
    n, j = rows.shape
    if cand.size != n or j >= target.parties:
        raise ProtocolError("prefix and candidate shapes do not fit the target")
    if criterion == "auto":
        criterion = "hamming" if is_binary_cka(target) else "conditional"
    if criterion == "hamming":
        return int(np.count_nonzero(cand != rows[:, 0])) <= hamming_radius(n, epsilon)
    groups = _count_boxes(rows, target, epsilon, criterion)
    if groups is None:
        return False
    k = target.alphabet_sizes[j]
    for positions, lo, hi in groups:
        counts = np.bincount(cand[positions], minlength=k)
        if np.any(counts < lo) or np.any(counts > hi):
            return False
    return True


def _batch_accept(rows, cands, target, epsilon, criterion, boxes) -> np.ndarray:
    if criterion == "hamming":
        return np.count_nonzero(cands != rows[:, 0], axis=1) <= hamming_radius(rows.shape[0], epsilon)
    if boxes is None:
        return np.zeros(cands.shape[0], dtype=bool)
    k = target.alphabet_sizes[rows.shape[1]]
    ok = np.ones(cands.shape[0], dtype=bool)
    for positions, lo, hi in boxes:
        sub = cands[:, positions]
        for b in range(k):
            c = np.count_nonzero(sub == b, axis=1)
            ok &= (c >= lo[b]) & (c <= hi[b])
    return ok


# Exact acceptance laws for the sampled method


def _log_multinomial(counts: np.ndarray, log_q: np.ndarray) -> float:
    n = counts.sum()
    terms = counts * log_q
    terms[counts == 0] = 0.0
    return float(gammaln(n + 1) - gammaln(counts + 1).sum() + terms.sum())


def _box_configs(n_a: int, lo: np.ndarray, hi: np.ndarray, log_q: np.ndarray):
    """All count vectors in the box summing to ``n_a`` with their log-probabilities."""
    k = lo.size
    configs, logs = [], []
    for head in itertools.product(*(range(lo[b], hi[b] + 1) for b in range(k - 1))):
        last = n_a - sum(head)
        if lo[-1] <= last <= hi[-1]:
            c = np.array(head + (last,), dtype=np.int64)
            lp = _log_multinomial(c, log_q)
            if lp > -np.inf:
                configs.append(c)
                logs.append(lp)
    return configs, np.array(logs)


class _AcceptanceLaw:
    """Law of one i.i.d. codeword restricted to the acceptance region."""

    def __init__(self, rows, target, epsilon, criterion):
        j = rows.shape[1]
        q = it.marginal(target, [j]).probs
        with np.errstate(divide="ignore"):
            log_q = np.log(q)
        self.rows = rows
        self.k = q.size
        self.criterion = criterion
        if criterion == "hamming":
            x0 = rows[:, 0]
            self.positions = [np.flatnonzero(x0 == 0), np.flatnonzero(x0 == 1)]
            radius = hamming_radius(rows.shape[0], epsilon)
            n0, n1 = (p.size for p in self.positions)
            # (flips among zeros of x0, flips among ones of x0)
            pairs, logs = [], []
            for d0 in range(min(n0, radius) + 1):
                l0 = _log_multinomial(np.array([n0 - d0, d0]), log_q)
                for d1 in range(min(n1, radius - d0) + 1):
                    l1 = _log_multinomial(np.array([d1, n1 - d1]), log_q)
                    if l0 + l1 > -np.inf:
                        pairs.append((d0, d1))
                        logs.append(l0 + l1)
            self.hamming_configs = pairs
            self.hamming_logs = np.array(logs)
            self.log_p = float(logsumexp(self.hamming_logs)) if logs else -np.inf
            return
        boxes = _count_boxes(rows, target, epsilon, criterion)
        self.groups = []
        if boxes is None:
            self.log_p = -np.inf
            return
        total = 0.0
        for positions, lo, hi in boxes:
            configs, logs = _box_configs(positions.size, lo, hi, log_q)
            if not configs:
                self.log_p = -np.inf
                return
            group_log = float(logsumexp(logs))
            self.groups.append((positions, configs, logs - group_log))
            total += group_log
        self.log_p = total

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        n = self.rows.shape[0]
        out = np.empty(n, dtype=np.int64)
        if self.criterion == "hamming":
            w = np.exp(self.hamming_logs - logsumexp(self.hamming_logs))
            d0, d1 = self.hamming_configs[rng.choice(len(w), p=w / w.sum())]
            zeros, ones = self.positions
            out[zeros] = 0
            out[ones] = 1
            out[rng.choice(zeros, size=d0, replace=False)] = 1
            out[rng.choice(ones, size=d1, replace=False)] = 0
            return out
        for positions, configs, logs in self.groups:
            w = np.exp(logs)
            counts = configs[rng.choice(len(configs), p=w / w.sum())]
            symbols = np.repeat(np.arange(self.k), counts)
            out[positions] = rng.permutation(symbols)
        return out


def _first_accept_index(log_p: float, bits: int, rng: np.random.Generator) -> int | None:
    """Index of the first accepted codeword among ``2**bits`` i.i.d. draws, or None."""
    size = 2**bits
    if log_p == -np.inf:
        return None
    if log_p >= 0.0:
        return 0
    p = math.exp(log_p)
    miss = -math.expm1(log_p)
    if miss == 0.0:
        return 0
    # log of -log(1 - p), in the log domain so tiny or underflowing p stay exact
    log_rate = math.log(-math.log(miss)) if p > 1e-12 else log_p
    log_lam = bits * math.log(2) + log_rate
    q = 1.0 if log_lam > 700 else -math.expm1(-math.exp(log_lam))
    u = rng.random()
    if u >= q:
        return None
    # inverse CDF of the geometric law truncated to [0, size)
    arg = -math.log1p(-u) if u < 1.0 else math.inf
    if arg == 0.0:
        return 0
    log_k = math.log(arg) - log_rate
    if log_k >= bits * math.log(2):
        return size - 1
    if log_k < 700:
        k = math.ceil(math.exp(log_k)) - 1
    else:
        # beyond float range: scale an integer mantissa by a power of two
        e = int(log_k / math.log(2)) - 52
        k = int(math.exp(log_k - e * math.log(2))) << e
    return int(min(max(k, 0), size - 1))


# Protocol runs


def _choose_method(config: HybridConfig, bits: int) -> str:
    if config.method == "auto":
        return "scan" if bits <= AUTO_SCAN_BITS else "sampled"
    if config.method == "scan" and bits > SCAN_BUDGET_BITS:
        raise ProtocolError(f"codebook of 2**{bits} blocks exceeds the scan budget 2**{SCAN_BUDGET_BITS}")
    return config.method


def run_hybrid(config: HybridConfig, rng: np.random.Generator | None = None) -> HybridResult:
    """One run of server-assisted key distribution."""
    rng = np.random.default_rng(config.seed) if rng is None else rng
    target, n = config.target, config.n
    m = target.parties
    criterion = config.resolved_criterion()
    bits = config.bits
    methods = [_choose_method(config, b) for b in bits]

    keys = np.zeros((n, m), dtype=np.int64)
    keys[:, 0] = it.sample(it.marginal(target, [0]), n, rng).symbols[:, 0]
    indices: list[int | None] = [None] * (m - 1)
    checks = [0] * (m - 1)
    unused = [0] * (m - 1)
    for j in range(1, m):
        rows = keys[:, :j]
        size = 2 ** bits[j - 1]
        if methods[j - 1] == "scan":
            k, block = _scan(rows, target, config.epsilon, criterion, size, rng)
        else:
            law = _AcceptanceLaw(rows, target, config.epsilon, criterion)
            k = _first_accept_index(law.log_p, bits[j - 1], rng)
            block = law.sample(rng) if k is not None else None
        if k is None:
            checks[j - 1] = size
            return HybridResult(False, tuple(indices), None, j, bits, tuple(checks), tuple(unused), keys[:, :j].copy())
        indices[j - 1] = k
        checks[j - 1] = k + 1
        unused[j - 1] = size - 1
        keys[:, j] = block
    return HybridResult(True, tuple(indices), SymbolSequence(target.alphabet_sizes, keys), None,
                        bits, tuple(checks), tuple(unused), keys.copy())


def _scan(rows, target, epsilon, criterion, size, rng):
    j = rows.shape[1]
    q = it.marginal(target, [j]).probs
    boxes = None if criterion == "hamming" else _count_boxes(rows, target, epsilon, criterion)
    start = 0
    while start < size:
        count = min(_CHUNK, size - start)
        cands = rng.choice(q.size, size=(count, rows.shape[0]), p=q)
        hits = np.flatnonzero(_batch_accept(rows, cands, target, epsilon, criterion, boxes))
        if hits.size:
            return start + int(hits[0]), cands[hits[0]]
        start += count
    return None, None


def trial_rngs(seed: int, trials: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def success_probability(config: HybridConfig) -> tuple[float, float]:
    """Fraction of successful runs and its 95% normal-approximation half-width."""
    wins = sum(run_hybrid(config, rng).success for rng in trial_rngs(config.seed, config.trials))
    p = wins / config.trials
    return p, 1.96 * math.sqrt(p * (1 - p) / config.trials)


@dataclass(frozen=True)
class SweepRow:
    n: int
    total_rate: float
    success: float
    half_width: float
    C: float
    threshold: float


SWEEP_COLUMNS = ("n", "total_rate", "success", "half_width", "C", "threshold")


def theorem4_sweep(
    target: JointDistribution,
    n_list: Sequence[int],
    rate_grid: Sequence[float],
    epsilon: float,
    trials: int,
    seed: int,
    criterion: str = "auto",
) -> list[SweepRow]:
    """Success probability over block lengths and total rates split evenly among users."""
    runs = len(n_list) * len(rate_grid) * trials
    if runs > MAX_SWEEP_RUNS:
        raise ProtocolError(f"sweep needs {runs} runs, over budget {MAX_SWEEP_RUNS}")
    users = target.parties - 1
    c = it.total_correlation(target)
    threshold = covering_threshold(target, epsilon)
    rows = []
    for a, n in enumerate(n_list):
        for b, total in enumerate(rate_grid):
            cell_seed = int(np.random.SeedSequence((seed, a, b)).generate_state(1)[0])
            cfg = HybridConfig(target, int(n), (total / users,) * users, epsilon, trials, cell_seed, criterion)
            p, hw = success_probability(cfg)
            rows.append(SweepRow(int(n), float(total), p, hw, c, threshold))
    return rows


# Distributed XOR


@dataclass(frozen=True)
class XorReport:
    inputs: tuple[int, ...]
    key: tuple[int, ...]
    messages: tuple[int, ...]
    recovered: int

    def to_dict(self) -> dict:
        return {"y": list(self.inputs), "key": list(self.key), "M": list(self.messages), "recovered": self.recovered}


def xor_round(y: Sequence[int], key: Sequence[int]) -> XorReport:
    """Senders mask ``y_i`` with ``key_i``; the receiver adds the last key bit."""
    y = tuple(int(v) & 1 for v in y)
    key = tuple(int(v) for v in key)
    if len(key) != len(y) + 1:
        raise ProtocolError("need one key bit per sender plus the receiver's")
    messages = tuple(a ^ b for a, b in zip(y, key))
    recovered = 0
    for v in messages + (key[-1],):
        recovered ^= v
    return XorReport(y, key, messages, recovered)


def xor_demo_m(y: Sequence[int], seed: int) -> XorReport:
    """Parity of ``m - 1`` private bits through keys from the even-parity law."""
    m = len(y) + 1
    if not 3 <= m <= 10:
        raise ProtocolError("xor demo supports 3 <= m <= 10")
    rng = np.random.default_rng(seed)
    key = tuple(int(v) for v in it.sample(it.parity_distribution(m), 1, rng).symbols[0])
    return xor_round(y, key)


def xor_demo(y1: int, y2: int, seed: int) -> XorReport:
    return xor_demo_m((y1, y2), seed)


@dataclass(frozen=True)
class XorAudit:
    m: int
    cases: int
    all_correct: bool
    leakage: tuple[float, ...]
    joint_leakage: float

    def to_dict(self) -> dict:
        return {"m": self.m, "cases": self.cases, "all_correct": self.all_correct,
                "I(Y_i;M_i)": list(self.leakage), "I(Y;M)": self.joint_leakage}


def xor_exhaustive(m: int) -> XorAudit:
    """Every input vector against every key atom, with exact leakage under uniform inputs."""
    keys = it.parity_distribution(m)
    atoms = keys.support()
    senders = m - 1
    correct = True
    # joint law of (Y_0..Y_{s-1}, M_0..M_{s-1}); Y uniform, key uniform on atoms
    table = np.zeros((2,) * (2 * senders))
    weight = 1.0 / (2**senders * len(atoms))
    cases = 0
    for y in itertools.product((0, 1), repeat=senders):
        for key in atoms:
            r = xor_round(y, key)
            cases += 1
            correct &= r.recovered == sum(y) % 2
            table[y + r.messages] += weight
    law = JointDistribution.from_table(table)
    leak = tuple(it.mutual_information(law, [i], [senders + i]) for i in range(senders))
    joint = it.mutual_information(law, list(range(senders)), list(range(senders, 2 * senders)))
    return XorAudit(m, cases, bool(correct), leak, joint)
