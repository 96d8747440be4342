import itertools
import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given
from hypothesis import strategies as st

from causalcorr import infotheory as it
from causalcorr.infotheory import DistributionError, JointDistribution


def shannon_bits(p):
    # independent oracle
    return float(scipy.stats.entropy(np.asarray(p).reshape(-1), base=2))


@st.composite
def distributions(draw, max_parties=3, max_alphabet=3):
    m = draw(st.integers(1, max_parties))
    sizes = tuple(draw(st.integers(1, max_alphabet)) for _ in range(m))
    size = math.prod(sizes)
    weights = draw(st.lists(st.floats(0, 1), min_size=size, max_size=size))
    w = np.array(weights) + 1e-3 * draw(st.booleans())
    if w.sum() == 0:
        w[0] = 1.0
    return JointDistribution(sizes, w / w.sum())


# construction


def test_dirac_single_party():
    assert np.array_equal(it.dirac((2,), (0,)).probs, [1.0, 0.0])


def test_dirac_three_bits_index_zero():
    d = it.dirac((2, 2, 2), (0, 0, 0))
    assert d.probs[0] == 1.0 and d.probs.sum() == 1.0


def test_dirac_out_of_range():
    with pytest.raises(DistributionError):
        it.dirac((2, 2), (0, 2))


def test_mix_of_two_diracs_is_ghz_distribution():
    p = it.mix([0.5, 0.5], [it.dirac((2,) * 3, (0, 0, 0)), it.dirac((2,) * 3, (1, 1, 1))])
    assert p.allclose(it.ghz_distribution(3))


def test_mix_of_even_strings_is_parity_distribution():
    atoms = [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]
    p = it.mix([0.25] * 4, [it.dirac((2,) * 3, a) for a in atoms])
    assert p.allclose(it.parity_distribution(3))


def test_mix_identity_and_uniform_bit():
    p = it.ghz_distribution(3)
    assert it.mix([1.0], [p]).allclose(p)
    assert it.mix([0.5, 0.5], [it.dirac((2,), (0,)), it.dirac((2,), (1,))]).allclose(it.uniform((2,)))


def test_mix_rejects_bad_weights_and_shapes():
    with pytest.raises(DistributionError):
        it.mix([0.5, 0.6], [it.uniform((2,)), it.uniform((2,))])
    with pytest.raises(DistributionError):
        it.mix([0.5, 0.5], [it.uniform((2,)), it.uniform((3,))])


def test_invalid_tables_rejected():
    with pytest.raises(DistributionError):
        JointDistribution((2,), [0.5, 0.6])
    with pytest.raises(DistributionError):
        JointDistribution((2,), [1.5, -0.5])
    with pytest.raises(DistributionError):
        JointDistribution((2, 2), [0.5, 0.5])


def test_symbol_sequence_range_checked():
    with pytest.raises(DistributionError):
        it.SymbolSequence((2, 2), np.array([[0, 2]]))


# marginals and entropies


def test_marginal_parity_last_two_is_uniform():
    assert it.marginal(it.parity_distribution(3), [1, 2]).allclose(it.uniform((2, 2)))


def test_marginal_ghz_single_party_is_uniform_bit():
    assert it.marginal(it.ghz_distribution(3), [0]).allclose(it.uniform((2,)))


def test_marginal_all_parties_identity():
    p = it.parity_distribution(3)
    assert it.marginal(p, [0, 1, 2]).allclose(p)


def test_marginal_keeps_requested_order():
    p = JointDistribution((2, 3), np.arange(6) / 15)
    assert np.allclose(it.marginal(p, [1, 0]).table, p.table.T)


def test_marginal_errors():
    p = it.ghz_distribution(3)
    with pytest.raises(DistributionError):
        it.marginal(p, [])
    with pytest.raises(DistributionError):
        it.marginal(p, [0, 0])


def test_entropy_examples():
    assert it.entropy(it.uniform((2,))) == pytest.approx(1.0, abs=1e-12)
    assert it.entropy(it.dirac((3, 2), (2, 1))) == 0.0
    assert it.entropy(it.parity_distribution(3)) == pytest.approx(2.0, abs=1e-12)


def test_zero_log_zero_convention():
    p = JointDistribution((4,), [0.5, 0.5, 0.0, 0.0])
    assert it.entropy(p) == pytest.approx(1.0, abs=1e-15)
    assert math.isfinite(it.entropy(p))


@given(distributions())
def test_entropy_matches_scipy_and_range(p):
    h = it.entropy(p)
    assert h == pytest.approx(shannon_bits(p.probs), abs=1e-10)
    assert -1e-12 <= h <= sum(math.log2(s) for s in p.alphabet_sizes) + 1e-10


# total correlation


def test_total_correlation_examples():
    assert it.total_correlation(it.ghz_distribution(3)) == pytest.approx(2.0, abs=1e-12)
    assert it.total_correlation(it.parity_distribution(3)) == pytest.approx(1.0, abs=1e-12)
    assert it.total_correlation(it.product(it.uniform((2,)), it.dirac((3,), (1,)))) == pytest.approx(0.0, abs=1e-12)
    assert it.total_correlation(it.uniform((3,))) == 0.0


@pytest.mark.parametrize("m", range(2, 7))
def test_total_correlation_ghz_and_parity(m):
    assert it.total_correlation(it.ghz_distribution(m)) == pytest.approx(m - 1, abs=1e-12)
    if m >= 3:
        assert it.total_correlation(it.parity_distribution(m)) == pytest.approx(1.0, abs=1e-12)
        assert len(it.parity_distribution(m).support()) == 2 ** (m - 1)


def oracle_total_correlation(p):
    t = p.table
    m = t.ndim
    singles = sum(shannon_bits(t.sum(axis=tuple(j for j in range(m) if j != i))) for i in range(m))
    return singles - shannon_bits(t)


@given(distributions())
def test_total_correlation_nonnegative_and_matches_oracle(p):
    c = it.total_correlation(p)
    assert c >= 0.0
    assert c == pytest.approx(max(oracle_total_correlation(p), 0.0), abs=1e-10)


@given(distributions(max_parties=2))
def test_two_party_total_correlation_is_mutual_information(p):
    if p.parties != 2:
        return
    assert it.total_correlation(p) == pytest.approx(it.mutual_information(p, [0], [1]), abs=1e-10)


@given(distributions(max_parties=2, max_alphabet=3), distributions(max_parties=2, max_alphabet=3))
def test_total_correlation_additive_over_independent_blocks(p, q):
    pq = it.product(p, q)
    assert it.total_correlation(pq) == pytest.approx(it.total_correlation(p) + it.total_correlation(q), abs=1e-10)


@given(distributions(max_parties=3, max_alphabet=3), st.data())
def test_total_correlation_monotone_under_local_merging(p, data):
    # relabel one party's alphabet through an arbitrary function
    party = data.draw(st.integers(0, p.parties - 1))
    size = p.alphabet_sizes[party]
    f = data.draw(st.lists(st.integers(0, size - 1), min_size=size, max_size=size))
    new = np.zeros(p.table.shape)
    for idx in np.ndindex(*p.table.shape):
        out = list(idx)
        out[party] = f[idx[party]]
        new[tuple(out)] += p.table[idx]
    q = JointDistribution(p.alphabet_sizes, new.reshape(-1))
    assert it.total_correlation(q) <= it.total_correlation(p) + 1e-10


# conditional mutual information


def test_cmi_examples():
    indep = it.uniform((2, 2))
    assert it.conditional_mutual_information(indep, [0], [1]) == pytest.approx(0.0, abs=1e-12)
    assert it.conditional_mutual_information(it.ghz_distribution(3), [0], [1], [2]) == pytest.approx(0.0, abs=1e-12)
    assert it.conditional_mutual_information(it.parity_distribution(3), [0], [1], [2]) == pytest.approx(1.0, abs=1e-12)


def test_cmi_overlapping_groups_rejected():
    with pytest.raises(DistributionError):
        it.conditional_mutual_information(it.ghz_distribution(3), [0, 1], [1])


@given(distributions(max_parties=3, max_alphabet=3))
def test_cmi_nonnegative_and_chain_rule(p):
    if p.parties < 3:
        return
    a, b, c = [0], [1], [2]
    value = it.conditional_mutual_information(p, a, b, c)
    h = lambda s: shannon_bits(it.marginal(p, s).probs)  # noqa: E731
    assert value >= -1e-10
    assert value == pytest.approx(h([0, 2]) + h([1, 2]) - h([0, 1, 2]) - h([2]), abs=1e-10)


# total variation


def test_total_variation_examples():
    p = it.parity_distribution(3)
    assert it.total_variation(p, p) == 0.0
    assert it.total_variation(it.dirac((2,), (0,)), it.dirac((2,), (1,))) == pytest.approx(1.0)
    assert it.total_variation(it.uniform((2,)), it.dirac((2,), (0,))) == pytest.approx(0.5)


def test_total_variation_shape_mismatch():
    with pytest.raises(DistributionError):
        it.total_variation(it.uniform((2,)), it.uniform((3,)))


@given(st.integers(1, 6), st.data())
def test_total_variation_is_a_metric(size, data):
    def draw():
        w = np.array(data.draw(st.lists(st.floats(0.01, 1), min_size=size, max_size=size)))
        return JointDistribution((size,), w / w.sum())

    p, q, r = draw(), draw(), draw()
    tv = it.total_variation
    assert tv(p, q) == pytest.approx(tv(q, p), abs=1e-15)
    assert tv(p, r) <= tv(p, q) + tv(q, r) + 1e-12
    assert 0.0 <= tv(p, q) <= 1.0 + 1e-12


# empirical laws and powers


def test_empirical_distribution_examples():
    one = it.empirical_distribution(it.SymbolSequence((2, 2), np.array([[0, 1]])))
    assert one.allclose(it.dirac((2, 2), (0, 1)))
    two = it.empirical_distribution(it.SymbolSequence((2, 2), np.array([[0, 0], [1, 1]])))
    assert two.allclose(it.ghz_distribution(2))


def test_empirical_distribution_rejects_empty():
    with pytest.raises(DistributionError):
        it.empirical_distribution(it.SymbolSequence((2,), np.zeros((0, 1), dtype=int)))


def test_empirical_law_converges():
    x = it.sample(it.ghz_distribution(3), 10_000, np.random.default_rng(0))
    assert it.total_variation(it.empirical_distribution(x), it.ghz_distribution(3)) <= 0.05


def test_product_power_examples():
    assert it.product_power(it.uniform((2,)), 2).allclose(it.uniform((4,)))
    assert it.product_power(it.dirac((2, 3), (0, 0)), 3).allclose(it.dirac((8, 27), (0, 0)))
    p = it.parity_distribution(3)
    assert it.entropy(it.product_power(p, 3)) == pytest.approx(3 * it.entropy(p), abs=1e-10)


def test_product_power_block_layout():
    # party i owns its block; time step 0 is the most significant symbol
    p = JointDistribution((2, 2), [0.1, 0.2, 0.3, 0.4])
    pw = it.product_power(p, 2)
    for x0, y0, x1, y1 in itertools.product(range(2), repeat=4):
        a = it.block_index((x0, x1), 2)
        b = it.block_index((y0, y1), 2)
        assert pw.prob((a, b)) == pytest.approx(p.prob((x0, y0)) * p.prob((x1, y1)), abs=1e-15)


def test_product_power_budget():
    with pytest.raises(DistributionError):
        it.product_power(it.uniform((2, 2)), 13)
    with pytest.raises(DistributionError):
        it.product_power(it.uniform((2,)), 5, budget=16)


def test_block_round_trip():
    for idx in range(27):
        assert it.block_index(it.block_symbols(idx, 3, 3), 3) == idx


@given(distributions())
def test_dict_round_trip(p):
    assert JointDistribution.from_dict(p.to_dict()).allclose(p, atol=0)
