"""Causal models with pairwise latent common causes.

A model over ``m`` observed parties has one latent variable ``omega[i, j]``
per unordered pair ``i < j`` and one local variable ``u[i]`` per party.  The
joint law of all latents is a :class:`JointDistribution` whose parties are
the pairs in lexicographic order followed by ``u[0], ..., u[m-1]``.  Party
``i`` emits an ``n``-letter block through a total table indexed by its
incident pair latents (lexicographic order) and ``u[i]``.

Parties are 0-based throughout.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from networkx.utils import UnionFind

from . import infotheory as it
from .infotheory import JointDistribution

Pair = tuple[int, int]

EXACT_BUDGET = 2**20
DEFAULT_TOL = 1e-9


class ModelError(ValueError):
    pass


class CompatibilityError(ModelError):
    """The model does not reproduce the target or violates the causal-order condition."""


def pairs(m: int) -> list[Pair]:
    return list(itertools.combinations(range(m), 2))


def incident_pairs(m: int, i: int) -> list[Pair]:
    return [p for p in pairs(m) if i in p]


def _pair(i: int, j: int) -> Pair:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True, eq=False)
class LatentSpec:
    m: int
    pair_supports: dict[Pair, int]
    local_supports: tuple[int, ...]
    joint_law: JointDistribution

    def __init__(self, m: int, pair_supports: dict, local_supports: Sequence[int], joint_law: JointDistribution):
        supports = {p: 1 for p in pairs(m)}
        for key, size in pair_supports.items():
            p = _pair(*key)
            if p not in supports:
                raise ModelError(f"pair {key} is not an unordered pair of distinct parties < {m}")
            if int(size) < 1:
                raise ModelError(f"support of pair {p} must be >= 1")
            supports[p] = int(size)
        local = tuple(int(s) for s in local_supports)
        if len(local) != m or any(s < 1 for s in local):
            raise ModelError("need one positive local support per party")
        expected = tuple(supports[p] for p in pairs(m)) + local
        if joint_law.alphabet_sizes != expected:
            raise ModelError(f"joint law has shape {joint_law.alphabet_sizes}, expected {expected}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "pair_supports", supports)
        object.__setattr__(self, "local_supports", local)
        object.__setattr__(self, "joint_law", joint_law)

    def pair_position(self, p: Pair) -> int:
        return pairs(self.m).index(_pair(*p))

    def local_position(self, i: int) -> int:
        return len(pairs(self.m)) + i


@dataclass(frozen=True, eq=False)
class CausalModel:
    """Block length, output alphabets, latent law and structural equations.

    ``equations[i]`` is an integer array of shape
    ``(*incident supports, local_supports[i], n)`` giving party ``i``'s block.
    """

    n: int
    alphabet_sizes: tuple[int, ...]
    latent: LatentSpec
    equations: tuple[np.ndarray, ...]
    _block_index: tuple[np.ndarray, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        m = self.latent.m
        object.__setattr__(self, "alphabet_sizes", tuple(int(s) for s in self.alphabet_sizes))
        if self.n < 1:
            raise ModelError("block length must be >= 1")
        if len(self.alphabet_sizes) != m or len(self.equations) != m:
            raise ModelError("need one alphabet and one structural equation per party")
        eqs, blocks = [], []
        for i, table in enumerate(self.equations):
            arr = np.array(table, dtype=np.int64)
            shape = tuple(self.latent.pair_supports[p] for p in incident_pairs(m, i))
            shape += (self.latent.local_supports[i], self.n)
            if arr.shape != shape:
                raise ModelError(f"equation {i} has shape {arr.shape}, expected {shape}")
            if np.any(arr < 0) or np.any(arr >= self.alphabet_sizes[i]):
                raise ModelError(f"equation {i} emits a symbol outside its alphabet")
            arr.setflags(write=False)
            eqs.append(arr)
            weights = self.alphabet_sizes[i] ** np.arange(self.n - 1, -1, -1)
            blocks.append(arr @ weights)
        object.__setattr__(self, "equations", tuple(eqs))
        object.__setattr__(self, "_block_index", tuple(blocks))

    @property
    def m(self) -> int:
        return self.latent.m

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(s**self.n for s in self.alphabet_sizes)

    def edge_rate(self, i: int, j: int) -> float:
        return math.log2(self.latent.pair_supports[_pair(i, j)]) / self.n

    def to_dict(self) -> dict:
        m = self.m
        equations = {}
        for i, table in enumerate(self.equations):
            rows = []
            for idx in np.ndindex(*table.shape[:-1]):
                rows.append([list(idx), table[idx].tolist()])
            equations[str(i)] = rows
        return {
            "n": self.n,
            "alphabet_sizes": list(self.alphabet_sizes),
            "pair_supports": {f"{i}-{j}": self.latent.pair_supports[(i, j)] for i, j in pairs(m)},
            "local_supports": list(self.latent.local_supports),
            "joint_law": [float(v) for v in self.latent.joint_law.probs],
            "equations": equations,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CausalModel":
        n = int(data["n"])
        sizes = tuple(int(s) for s in data["alphabet_sizes"])
        m = len(sizes)
        supports = {tuple(int(v) for v in k.split("-")): int(s) for k, s in data["pair_supports"].items()}
        local = tuple(int(s) for s in data["local_supports"])
        full = {p: 1 for p in pairs(m)}
        full.update({_pair(*p): s for p, s in supports.items()})
        law = JointDistribution(tuple(full[p] for p in pairs(m)) + local, data["joint_law"])
        latent = LatentSpec(m, full, local, law)
        tables = []
        for i in range(m):
            shape = tuple(full[p] for p in incident_pairs(m, i)) + (local[i],)
            table = np.full(shape + (n,), -1, dtype=np.int64)
            for inputs, block in data["equations"][str(i)]:
                table[tuple(inputs)] = block
            if np.any(table < 0):
                raise ModelError(f"equation {i} is not total")
            tables.append(table)
        return cls(n, sizes, latent, tuple(tables))


def tabulate(
    n: int,
    alphabet_sizes: Sequence[int],
    latent: LatentSpec,
    fns: Sequence[Callable[[tuple[int, ...], int], Sequence[int]]],
) -> CausalModel:
    """Build a model from per-party functions ``f(incident_omegas, u) -> block``."""
    m = latent.m
    tables = []
    for i in range(m):
        shape = tuple(latent.pair_supports[p] for p in incident_pairs(m, i))
        table = np.zeros(shape + (latent.local_supports[i], n), dtype=np.int64)
        for omega in np.ndindex(*shape):
            for u in range(latent.local_supports[i]):
                table[omega + (u,)] = fns[i](tuple(int(w) for w in omega), u)
        tables.append(table)
    return CausalModel(n, tuple(alphabet_sizes), latent, tuple(tables))


def model_rate(model: CausalModel) -> float:
    """Sum over unordered pairs of ``log2 |Omega_ij| / n``."""
    return sum(model.edge_rate(i, j) for i, j in pairs(model.m))


# Enumeration of the latent law


def _latent_atoms(model: CausalModel) -> tuple[np.ndarray, np.ndarray]:
    """Support atoms of the latent law as ``(coords[K, P + m], probs[K])``."""
    law = model.latent.joint_law
    if law.probs.size > EXACT_BUDGET:
        raise ModelError(f"latent law has {law.probs.size} atoms, over budget {EXACT_BUDGET}")
    flat = np.flatnonzero(law.probs > 0)
    coords = np.stack(np.unravel_index(flat, law.alphabet_sizes), axis=1)
    return coords, law.probs[flat]


def _outputs(model: CausalModel, coords: np.ndarray) -> np.ndarray:
    """Block index of every party for each latent atom, shape ``(K, m)``."""
    m = model.m
    out = np.empty((coords.shape[0], m), dtype=np.int64)
    for i in range(m):
        cols = [model.latent.pair_position(p) for p in incident_pairs(m, i)]
        cols.append(model.latent.local_position(i))
        out[:, i] = model._block_index[i][tuple(coords[:, c] for c in cols)]
    return out


def induced_output_distribution(
    model: CausalModel,
    mode: str = "exact",
    trials: int = 10_000,
    seed: int | None = None,
) -> JointDistribution:
    """Law of ``(X_0^n, ..., X_{m-1}^n)`` over block alphabets.

    ``mode="exact"`` pushes the latent law forward; ``mode="monte_carlo"``
    returns the empirical law of ``trials`` sampled latent atoms.
    """
    sizes = model.block_sizes
    if mode == "exact":
        coords, probs = _latent_atoms(model)
        flat = np.ravel_multi_index(_outputs(model, coords).T, sizes)
        table = np.bincount(flat, weights=probs, minlength=math.prod(sizes))
        return JointDistribution(sizes, table / table.sum())
    if mode == "monte_carlo":
        if seed is None:
            raise ModelError("monte_carlo mode needs a seed")
        rng = np.random.default_rng(seed)
        law = model.latent.joint_law
        draws = rng.choice(law.probs.size, size=trials, p=law.probs)
        coords = np.stack(np.unravel_index(draws, law.alphabet_sizes), axis=1)
        return it.empirical_distribution(it.SymbolSequence(sizes, _outputs(model, coords)))
    raise ModelError(f"unknown mode {mode!r}")


# Compatibility conditions


@dataclass(frozen=True)
class Condition1Report:
    tv: float
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {"tv": self.tv, "tol": self.tol, "pass": self.passed}


def check_condition1(model: CausalModel, target: JointDistribution, tol: float = DEFAULT_TOL, **kwargs) -> Condition1Report:
    """Total variation between the model's output law and ``target`` to the power ``n``."""
    if target.alphabet_sizes != model.alphabet_sizes:
        raise ModelError(f"target alphabets {target.alphabet_sizes} differ from model {model.alphabet_sizes}")
    induced = induced_output_distribution(model, **kwargs)
    tv = it.total_variation(induced, it.product_power(target, model.n))
    return Condition1Report(tv=tv, tol=tol, passed=tv <= tol)


@dataclass(frozen=True)
class Constraint:
    label: str
    value: float


@dataclass(frozen=True)
class Condition2Report:
    order: tuple[int, ...]
    constraints: tuple[Constraint, ...]
    tol: float

    @property
    def max_violation(self) -> float:
        return max((c.value for c in self.constraints), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol

    def to_dict(self) -> dict:
        return {
            "order": list(self.order),
            "constraints": {c.label: c.value for c in self.constraints},
            "max_violation": self.max_violation,
            "pass": self.passed,
        }


def _fmt(ps: Iterable[Pair]) -> str:
    return "{" + ",".join(f"w{i}{j}" if max(i, j) < 10 else f"w{i}_{j}" for i, j in ps) + "}"


def order_constraints(m: int, order: Sequence[int]) -> list[tuple[list[Pair], list[Pair], list[Pair]]]:
    """The ``(A, B, C)`` pair groups of ``I(A; B | C) = 0`` for each step of ``order``.

    At step ``k`` (``1 <= k < m``) with prefix ``order[:k]`` and next party
    ``v = order[k]``: ``A`` holds the latents among the prefix, ``B`` the
    latents from ``v`` to parties after it, ``C`` the latents from the prefix
    to ``v``.
    """
    out = []
    for k in range(1, m):
        prefix, v, future = order[:k], order[k], order[k + 1:]
        a = [_pair(p, q) for p, q in itertools.combinations(prefix, 2)]
        b = [_pair(v, f) for f in future]
        c = [_pair(p, v) for p in prefix]
        out.append((sorted(a), sorted(b), sorted(c)))
    return out


def check_condition2(model: CausalModel, order: Sequence[int] | None = None, tol: float = DEFAULT_TOL) -> Condition2Report:
    """Causal-order and independence constraints, computed exactly from the latent law."""
    m = model.m
    order = tuple(range(m)) if order is None else tuple(int(v) for v in order)
    if sorted(order) != list(range(m)):
        raise ModelError(f"{order} is not a permutation of 0..{m - 1}")
    law = model.latent.joint_law
    pos = model.latent.pair_position
    constraints = []
    for k, (a, b, c) in enumerate(order_constraints(m, order), start=1):
        value = it.conditional_mutual_information(law, [pos(p) for p in a], [pos(p) for p in b], [pos(p) for p in c])
        constraints.append(Constraint(f"step{k}: I({_fmt(a)};{_fmt(b)}|{_fmt(c)})", value))
    omegas = list(range(len(pairs(m))))
    locals_ = [model.latent.local_position(i) for i in range(m)]
    constraints.append(Constraint("I(omega;u)", it.mutual_information(law, omegas, locals_)))
    for i, j in pairs(m):
        value = it.mutual_information(law, [locals_[i]], [locals_[j]])
        constraints.append(Constraint(f"I(u{i};u{j})", value))
    return Condition2Report(order=order, constraints=tuple(constraints), tol=tol)


def find_causal_order(model: CausalModel, tol: float = DEFAULT_TOL) -> tuple[int, ...] | None:
    """Lexicographically first permutation satisfying Condition 2, or ``None``."""
    if model.m > 8:
        raise ModelError("exhaustive order search is limited to m <= 8")
    for order in itertools.permutations(range(model.m)):
        if check_condition2(model, order, tol).passed:
            return order
    return None


# Vanishing randomness


def _omega_and_output(model: CausalModel, i: int) -> JointDistribution:
    """Joint law of (omega_i as one variable, X_i^n)."""
    m = model.m
    coords, probs = _latent_atoms(model)
    inc = incident_pairs(m, i)
    omega_sizes = tuple(model.latent.pair_supports[p] for p in inc)
    if inc:
        omega = np.ravel_multi_index(tuple(coords[:, model.latent.pair_position(p)] for p in inc), omega_sizes)
    else:
        omega = np.zeros(len(probs), dtype=np.int64)
    n_omega = math.prod(omega_sizes)
    x = _outputs(model, coords)[:, i]
    flat = omega * model.block_sizes[i] + x
    table = np.bincount(flat, weights=probs, minlength=n_omega * model.block_sizes[i])
    return JointDistribution((n_omega, model.block_sizes[i]), table / table.sum())


def vanishing_randomness(model: CausalModel, i: int) -> float:
    """``H(omega_i | X_i^n) / n``: latent randomness party ``i`` cannot recover."""
    return it.conditional_entropy(_omega_and_output(model, i), [0], [1]) / model.n


@dataclass(frozen=True)
class Theorem1Report:
    model_rate: float
    total_correlation: float
    vanishing: tuple[float, ...]
    classification: str
    order: tuple[int, ...]
    tv: float

    @property
    def max_vanishing(self) -> float:
        return max(self.vanishing, default=0.0)

    @property
    def gap(self) -> float:
        return self.model_rate - self.total_correlation

    def to_dict(self) -> dict:
        return {
            "model_rate": self.model_rate,
            "total_correlation": self.total_correlation,
            "vanishing_randomness": list(self.vanishing),
            "max_vanishing_randomness": self.max_vanishing,
            "gap": self.gap,
            "classification": self.classification,
            "order": list(self.order),
            "condition1_tv": self.tv,
        }


C_ACHIEVING = "C-achieving witness"
VANISHING = "vanishing-randomness regime"
REDUNDANT = "redundant witness"


def theorem1_diagnose(model: CausalModel, target: JointDistribution, tol: float = DEFAULT_TOL) -> Theorem1Report:
    """Compare a compatible witness model against the total-correlation lower bound.

    The witness's rate upper-bounds the resource rate and the total
    correlation of ``target`` lower-bounds it.  Positive vanishing randomness
    at some party places the target in the regime where the resource rate
    strictly exceeds the total correlation.  A model without vanishing
    randomness whose rate still exceeds C carries redundant latents.
    """
    cond1 = check_condition1(model, target, tol)
    if not cond1.passed:
        raise CompatibilityError(f"output law is {cond1.tv:.3g} from the target in total variation")
    order = find_causal_order(model, tol)
    if order is None:
        raise CompatibilityError("no party order satisfies the causal-order condition")
    rate = model_rate(model)
    c = it.total_correlation(target)
    vr = tuple(vanishing_randomness(model, i) for i in range(model.m))
    if max(vr, default=0.0) > tol:
        label = VANISHING
    elif rate <= c + tol:
        label = C_ACHIEVING
    else:
        label = REDUNDANT
    return Theorem1Report(rate, c, vr, label, order, cond1.tv)


# Identical-randomness graph


@dataclass(frozen=True)
class IdenticalRandomness:
    """Nondegenerate latents grouped by almost-sure equality (up to relabeling)."""

    classes: tuple[tuple[Pair, ...], ...]
    redundant_edges: tuple[Pair, ...]

    @property
    def has_cycle(self) -> bool:
        return bool(self.redundant_edges)

    def to_dict(self) -> dict:
        return {
            "classes": [[list(p) for p in cls] for cls in self.classes],
            "redundant_edges": [list(p) for p in self.redundant_edges],
            "has_cycle": self.has_cycle,
        }


def identical_randomness(model: CausalModel, tol: float = 1e-12) -> IdenticalRandomness:
    """Edges ``i - j`` for latents that carry one shared variable.

    Within each class, an edge that closes a cycle is redundant: the
    randomness it carries already reaches both endpoints through the tree.
    """
    law = model.latent.joint_law
    active = [p for p in pairs(model.m) if it.entropy(law, [model.latent.pair_position(p)]) > tol]
    classes: list[list[Pair]] = []
    for p in active:
        pp = model.latent.pair_position(p)
        for cls in classes:
            qp = model.latent.pair_position(cls[0])
            if it.conditional_entropy(law, [pp], [qp]) <= tol and it.conditional_entropy(law, [qp], [pp]) <= tol:
                cls.append(p)
                break
        else:
            classes.append([p])
    redundant = []
    for cls in classes:
        uf = UnionFind()
        for i, j in cls:
            if uf[i] == uf[j]:
                redundant.append((i, j))
            else:
                uf.union(i, j)
    return IdenticalRandomness(tuple(tuple(c) for c in classes), tuple(redundant))


# Model constructions


def identical_bit_model(m: int, edges: Sequence[Pair]) -> CausalModel:
    """Every listed edge carries the same uniform bit; each party outputs it.

    Parties not touched by any edge output 0.
    """
    edges = [_pair(*e) for e in edges]
    supports = {p: 2 for p in edges}
    all_pairs = pairs(m)
    sizes = tuple(supports.get(p, 1) for p in all_pairs) + (1,) * m
    table = np.zeros(sizes)
    ones = tuple(1 if p in supports else 0 for p in all_pairs) + (0,) * m
    table[(0,) * len(sizes)] += 0.5
    table[ones] += 0.5
    latent = LatentSpec(m, supports, (1,) * m, JointDistribution(sizes, table.reshape(-1)))

    def emitter(i):
        inc = incident_pairs(m, i)
        slot = next((k for k, p in enumerate(inc) if p in supports), None)
        return lambda omega, u: (omega[slot] if slot is not None else 0,)

    return tabulate(1, (2,) * m, latent, [emitter(i) for i in range(m)])


def star_parity_model(m: int, hub: int) -> CausalModel:
    """Independent uniform bits on every edge to ``hub``; the hub outputs their parity."""
    spokes = [_pair(k, hub) for k in range(m) if k != hub]
    supports = {p: 2 for p in spokes}
    all_pairs = pairs(m)
    sizes = tuple(supports.get(p, 1) for p in all_pairs) + (1,) * m
    law = JointDistribution(sizes, np.full(math.prod(sizes), 1.0 / math.prod(sizes)))
    latent = LatentSpec(m, supports, (1,) * m, law)

    def emitter(i):
        inc = incident_pairs(m, i)
        if i == hub:
            return lambda omega, u: (sum(omega) % 2,)
        slot = inc.index(_pair(i, hub))
        return lambda omega, u: (omega[slot],)

    return tabulate(1, (2,) * m, latent, [emitter(i) for i in range(m)])


def degenerate_model(alphabet_sizes: Sequence[int], point: Sequence[int] | None = None, n: int = 1) -> CausalModel:
    """No latent randomness at all; party ``i`` always emits ``point[i]`` repeated."""
    m = len(alphabet_sizes)
    point = tuple(point) if point is not None else (0,) * m
    sizes = (1,) * (len(pairs(m)) + m)
    latent = LatentSpec(m, {}, (1,) * m, JointDistribution(sizes, [1.0]))
    return tabulate(n, alphabet_sizes, latent, [(lambda omega, u, x=x: (x,) * n) for x in point])


def spanning_tree_models(kind: str, m: int, order: Sequence[int] | None = None) -> list[CausalModel]:
    """Optimal tree-shaped witnesses along a party order.

    ``kind="ghz"``: each party after the first attaches by one identical-bit
    edge to exactly one earlier party, giving ``(m-1)!`` models.
    ``kind="parity"``: a single star model at the last party of the order.
    """
    order = tuple(range(m)) if order is None else tuple(int(v) for v in order)
    if sorted(order) != list(range(m)):
        raise ModelError(f"{order} is not a permutation of 0..{m - 1}")
    if kind == "ghz":
        if not 2 <= m <= 6:
            raise ModelError("ghz trees need 2 <= m <= 6")
        out = []
        for parents in itertools.product(*(range(j) for j in range(1, m))):
            edges = [(order[parent], order[j]) for j, parent in enumerate(parents, start=1)]
            out.append(identical_bit_model(m, edges))
        return out
    if kind == "parity":
        if not 3 <= m <= 6:
            raise ModelError("parity stars need 3 <= m <= 6")
        return [star_parity_model(m, order[-1])]
    raise ModelError(f"unknown kind {kind!r}")


@dataclass(frozen=True)
class RedundancyReport:
    rate: float
    total_correlation: float
    condition1: Condition1Report
    graph: IdenticalRandomness

    def to_dict(self) -> dict:
        return {
            "rate": self.rate,
            "total_correlation": self.total_correlation,
            "excess": self.rate - self.total_correlation,
            "condition1": self.condition1.to_dict(),
            **self.graph.to_dict(),
        }


def redundant_model_demo(m: int = 4) -> tuple[CausalModel, RedundancyReport]:
    """A GHZ witness where the last party receives the shared bit twice in one step.

    A path over parties ``0 .. m-2`` plus edges from parties ``m-3`` and
    ``m-2`` to party ``m-1``.
    """
    if m < 4:
        raise ModelError("the redundant demo needs m >= 4")
    edges = [(k, k + 1) for k in range(m - 2)] + [(m - 3, m - 1), (m - 2, m - 1)]
    model = identical_bit_model(m, edges)
    target = it.ghz_distribution(m)
    report = RedundancyReport(
        rate=model_rate(model),
        total_correlation=it.total_correlation(target),
        condition1=check_condition1(model, target),
        graph=identical_randomness(model),
    )
    return model, report


@dataclass(frozen=True)
class RateBounds:
    lower: float
    upper: float
    witness: int
    rejected: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "witness": self.witness, "rejected": list(self.rejected)}


def is_compatible(model: CausalModel, target: JointDistribution, tol: float = DEFAULT_TOL) -> bool:
    if model.alphabet_sizes != target.alphabet_sizes:
        return False
    return check_condition1(model, target, tol).passed and find_causal_order(model, tol) is not None


def resource_rate_bounds(target: JointDistribution, candidates: Sequence[CausalModel], tol: float = DEFAULT_TOL) -> RateBounds:
    """Sandwich the resource rate between C(target) and the best candidate's rate.

    Candidates failing compatibility are skipped and listed in ``rejected``.
    """
    valid, rejected = [], []
    for k, model in enumerate(candidates):
        (valid if is_compatible(model, target, tol) else rejected).append(k)
    if not valid:
        raise CompatibilityError("no candidate model is compatible with the target")
    rates = {k: model_rate(candidates[k]) for k in valid}
    best = min(valid, key=lambda k: (rates[k], k))
    lower = it.total_correlation(target)
    if lower > rates[best] + tol:
        raise CompatibilityError("total correlation exceeds a compatible model's rate; the model check is wrong")
    return RateBounds(lower, rates[best], best, tuple(rejected))


def relabel_latent(model: CausalModel, pair: Pair, perm: Sequence[int]) -> CausalModel:
    """Recode ``omega[pair]`` through the bijection ``old -> perm[old]``.

    The latent law and both incident structural equations are updated so the
    model describes the same physics under new symbol names.
    """
    m = model.m
    pair = _pair(*pair)
    perm = np.asarray(perm, dtype=np.int64)
    size = model.latent.pair_supports[pair]
    if sorted(perm.tolist()) != list(range(size)):
        raise ModelError("relabeling must be a permutation of the support")
    inv = np.argsort(perm)
    law = model.latent.joint_law
    pos = model.latent.pair_position(pair)
    # new_table[..., a, ...] = old_table[..., inv[a], ...]
    new_law = np.take(law.table, inv, axis=pos)
    latent = LatentSpec(m, model.latent.pair_supports, model.latent.local_supports,
                        JointDistribution(law.alphabet_sizes, new_law.reshape(-1)))
    tables = list(model.equations)
    for i in pair:
        axis = incident_pairs(m, i).index(pair)
        tables[i] = np.take(tables[i], inv, axis=axis)
    return CausalModel(model.n, model.alphabet_sizes, latent, tuple(tables))
