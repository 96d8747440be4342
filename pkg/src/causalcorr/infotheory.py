"""Finite-alphabet probability calculus.

Joint distributions are dense tables stored flat in row-major order, party 0
slowest.  Every measure is reported in bits and uses the convention
``0 * log 0 = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
DEFAULT_BUDGET = 2**24


class DistributionError(ValueError):
    """Raised when a probability table violates its invariants."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Probability mass function over ``X_0 x ... x X_{m-1}``.

    Parameters
    ----------
    alphabet_sizes : sequence of int
        Per-party alphabet cardinalities.
    probs : array_like
        Flat table of ``prod(alphabet_sizes)`` masses, row-major.
    """

    alphabet_sizes: tuple[int, ...]
    probs: np.ndarray

    def __init__(self, alphabet_sizes: Sequence[int], probs) -> None:
        sizes = tuple(int(s) for s in alphabet_sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise DistributionError(f"alphabet sizes must be positive, got {sizes}")
        p = np.array(probs, dtype=float).reshape(-1)
        if p.size != math.prod(sizes):
            raise DistributionError(
                f"table has {p.size} entries, expected {math.prod(sizes)}"
            )
        if np.any(p < 0):
            raise DistributionError("negative probability mass")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise DistributionError(f"probabilities sum to {p.sum()!r}")
        object.__setattr__(self, "alphabet_sizes", sizes)
        object.__setattr__(self, "probs", _frozen(p))

    @property
    def parties(self) -> int:
        return len(self.alphabet_sizes)

    @property
    def table(self) -> np.ndarray:
        """The masses as an array of shape ``alphabet_sizes``."""
        return self.probs.reshape(self.alphabet_sizes)

    def prob(self, point: Sequence[int]) -> float:
        return float(self.table[tuple(point)])

    def support(self) -> list[tuple[int, ...]]:
        idx = np.flatnonzero(self.probs > 0)
        return [tuple(int(v) for v in np.unravel_index(i, self.alphabet_sizes)) for i in idx]

    def __eq__(self, other) -> bool:
        if not isinstance(other, JointDistribution):
            return NotImplemented
        return self.alphabet_sizes == other.alphabet_sizes and bool(
            np.array_equal(self.probs, other.probs)
        )

    def __hash__(self) -> int:
        return hash((self.alphabet_sizes, self.probs.tobytes()))

    def allclose(self, other: "JointDistribution", atol: float = 1e-12) -> bool:
        return self.alphabet_sizes == other.alphabet_sizes and bool(
            np.allclose(self.probs, other.probs, rtol=0.0, atol=atol)
        )

    def to_dict(self) -> dict:
        return {
            "parties": self.parties,
            "alphabet_sizes": list(self.alphabet_sizes),
            "probs": [float(v) for v in self.probs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "JointDistribution":
        sizes = data["alphabet_sizes"]
        if "parties" in data and int(data["parties"]) != len(sizes):
            raise DistributionError("'parties' disagrees with 'alphabet_sizes'")
        return cls(sizes, data["probs"])

    @classmethod
    def from_table(cls, table) -> "JointDistribution":
        arr = np.asarray(table, dtype=float)
        return cls(arr.shape, arr.reshape(-1))


@dataclass(frozen=True, eq=False)
class SymbolSequence:
    """An ``n x m`` block of alphabet indices, one row per time step."""

    alphabet_sizes: tuple[int, ...]
    symbols: np.ndarray

    def __init__(self, alphabet_sizes: Sequence[int], symbols) -> None:
        sizes = tuple(int(s) for s in alphabet_sizes)
        arr = np.array(symbols, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[1] != len(sizes):
            raise DistributionError(
                f"symbol grid shape {arr.shape} does not match {len(sizes)} parties"
            )
        if np.any(arr < 0) or np.any(arr >= np.array(sizes)):
            raise DistributionError("symbol index out of range")
        object.__setattr__(self, "alphabet_sizes", sizes)
        object.__setattr__(self, "symbols", _frozen(arr))

    @property
    def n(self) -> int:
        return self.symbols.shape[0]

    @property
    def parties(self) -> int:
        return self.symbols.shape[1]


def dirac(alphabet_sizes: Sequence[int], point: Sequence[int]) -> JointDistribution:
    sizes = tuple(int(s) for s in alphabet_sizes)
    point = tuple(int(v) for v in point)
    if len(point) != len(sizes) or any(not 0 <= v < s for v, s in zip(point, sizes)):
        raise DistributionError(f"point {point} is not in alphabet {sizes}")
    table = np.zeros(sizes)
    table[point] = 1.0
    return JointDistribution(sizes, table.reshape(-1))


def uniform(alphabet_sizes: Sequence[int]) -> JointDistribution:
    size = math.prod(alphabet_sizes)
    return JointDistribution(alphabet_sizes, np.full(size, 1.0 / size))


def mix(weights: Sequence[float], distributions: Sequence[JointDistribution]) -> JointDistribution:
    """Convex combination ``sum_k w_k P_k``."""
    w = np.asarray(weights, dtype=float)
    if len(w) != len(distributions) or len(w) == 0:
        raise DistributionError("need one weight per distribution")
    if np.any(w < 0) or abs(w.sum() - 1.0) > NORM_TOL:
        raise DistributionError(f"weights must be a probability vector, got {list(w)}")
    sizes = distributions[0].alphabet_sizes
    if any(d.alphabet_sizes != sizes for d in distributions):
        raise DistributionError("distributions have different shapes")
    p = sum(wk * d.probs for wk, d in zip(w, distributions))
    return JointDistribution(sizes, _renormalize(p))


def _renormalize(p: np.ndarray) -> np.ndarray:
    # absorbs float drift from sums; callers guarantee the mass is ~1
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def _check_subset(dist: JointDistribution, subset: Iterable[int], allow_empty=False) -> tuple[int, ...]:
    sub = tuple(int(i) for i in subset)
    if not sub and not allow_empty:
        raise DistributionError("subset must be nonempty")
    if len(set(sub)) != len(sub):
        raise DistributionError(f"duplicate party indices in {sub}")
    if any(not 0 <= i < dist.parties for i in sub):
        raise DistributionError(f"party index out of range in {sub}")
    return sub


def marginal(dist: JointDistribution, subset: Sequence[int]) -> JointDistribution:
    """Marginal on ``subset``, with parties in the given order."""
    sub = _check_subset(dist, subset)
    drop = tuple(i for i in range(dist.parties) if i not in sub)
    table = dist.table.sum(axis=drop) if drop else dist.table
    # remaining axes are in increasing party order; permute to requested order
    kept = sorted(sub)
    table = np.transpose(table, [kept.index(i) for i in sub])
    return JointDistribution(table.shape, _renormalize(table.reshape(-1)))


def _entropy_of(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum()) if p.size else 0.0


def entropy(dist: JointDistribution, subset: Sequence[int] | None = None) -> float:
    """Shannon entropy in bits, optionally of a marginal."""
    if subset is None:
        return max(_entropy_of(dist.probs), 0.0)
    sub = _check_subset(dist, subset, allow_empty=True)
    if not sub:
        return 0.0
    return max(_entropy_of(marginal(dist, sub).probs), 0.0)


def total_correlation(dist: JointDistribution) -> float:
    """``sum_i H(X_i) - H(X_0 ... X_{m-1})``, clamped at zero."""
    if dist.parties == 1:
        return 0.0
    singles = sum(entropy(dist, [i]) for i in range(dist.parties))
    return max(singles - entropy(dist), 0.0)


def mutual_information(dist: JointDistribution, group_a: Sequence[int], group_b: Sequence[int]) -> float:
    return conditional_mutual_information(dist, group_a, group_b, ())


def conditional_mutual_information(
    dist: JointDistribution,
    group_a: Sequence[int],
    group_b: Sequence[int],
    group_c: Sequence[int] = (),
) -> float:
    """``I(A; B | C) = H(AC) + H(BC) - H(ABC) - H(C)``.

    Groups must be pairwise disjoint; an empty ``A`` or ``B`` gives 0.
    """
    a, b, c = (tuple(int(i) for i in g) for g in (group_a, group_b, group_c))
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise DistributionError("groups must be disjoint")
    _check_subset(dist, a + b + c, allow_empty=True)
    if not a or not b:
        return 0.0
    value = entropy(dist, a + c) + entropy(dist, b + c) - entropy(dist, a + b + c) - entropy(dist, c)
    return max(value, 0.0)


def conditional_entropy(dist: JointDistribution, group_a: Sequence[int], group_b: Sequence[int]) -> float:
    """``H(A | B)``."""
    a, b = tuple(group_a), tuple(group_b)
    if set(a) & set(b):
        raise DistributionError("groups must be disjoint")
    return max(entropy(dist, a + b) - entropy(dist, b), 0.0)


def total_variation(p: JointDistribution, q: JointDistribution) -> float:
    if p.alphabet_sizes != q.alphabet_sizes:
        raise DistributionError(
            f"shape mismatch: {p.alphabet_sizes} vs {q.alphabet_sizes}"
        )
    return min(0.5 * float(np.abs(p.probs - q.probs).sum()), 1.0)


def empirical_distribution(sample: SymbolSequence) -> JointDistribution:
    """Relative frequencies of the rows of ``sample``."""
    if sample.n == 0:
        raise DistributionError("empty sample")
    flat = np.ravel_multi_index(sample.symbols.T, sample.alphabet_sizes)
    counts = np.bincount(flat, minlength=math.prod(sample.alphabet_sizes))
    return JointDistribution(sample.alphabet_sizes, counts / sample.n)


def sample(dist: JointDistribution, n: int, rng: np.random.Generator) -> SymbolSequence:
    """Draw ``n`` i.i.d. rows from ``dist``."""
    flat = rng.choice(dist.probs.size, size=n, p=dist.probs)
    rows = np.stack(np.unravel_index(flat, dist.alphabet_sizes), axis=1)
    return SymbolSequence(dist.alphabet_sizes, rows)


def product(p: JointDistribution, q: JointDistribution) -> JointDistribution:
    """Independent juxtaposition: parties of ``p`` followed by parties of ``q``."""
    return JointDistribution(
        p.alphabet_sizes + q.alphabet_sizes, np.outer(p.probs, q.probs).reshape(-1)
    )


def product_power(dist: JointDistribution, n: int, budget: int = DEFAULT_BUDGET) -> JointDistribution:
    """The i.i.d. law of ``n`` letters, regrouped so party ``i`` owns its block.

    Party ``i`` of the result ranges over ``X_i^n`` with block index
    ``x_i^(0) * |X_i|^(n-1) + ... + x_i^(n-1)`` (time step 0 slowest).
    """
    if n < 1:
        raise DistributionError("block length must be >= 1")
    size = math.prod(dist.alphabet_sizes) ** n
    if size > budget:
        raise DistributionError(f"P^(x{n}) has {size} entries, over budget {budget}")
    m = dist.parties
    table = dist.table
    out = table
    for _ in range(n - 1):
        out = np.multiply.outer(out, table)
    # axes are (t0 p0, t0 p1, ..., t1 p0, ...); reorder to (p0 t0, p0 t1, ...)
    order = [t * m + i for i in range(m) for t in range(n)]
    out = np.transpose(out, order)
    sizes = tuple(s**n for s in dist.alphabet_sizes)
    return JointDistribution(sizes, _renormalize(out.reshape(-1)))


def block_index(block: Sequence[int], alphabet_size: int) -> int:
    """Row-major index of an ``n``-letter block over one party's alphabet."""
    idx = 0
    for x in block:
        idx = idx * alphabet_size + int(x)
    return idx


def block_symbols(index: int, alphabet_size: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        index, r = divmod(index, alphabet_size)
        out.append(r)
    return tuple(reversed(out))


# Distributions from GHZ-type measurements.


def ghz_distribution(m: int) -> JointDistribution:
    """Perfectly correlated uniform bits: ``(delta_0...0 + delta_1...1) / 2``."""
    sizes = (2,) * m
    return mix([0.5, 0.5], [dirac(sizes, (0,) * m), dirac(sizes, (1,) * m)])


def parity_distribution(m: int) -> JointDistribution:
    """Uniform law over even-parity bit strings of length ``m``."""
    sizes = (2,) * m
    table = np.zeros(sizes)
    for x in np.ndindex(*sizes):
        if sum(x) % 2 == 0:
            table[x] = 1.0
    table /= table.sum()
    return JointDistribution(sizes, table.reshape(-1))
