import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lpdecode.errors import EmptySubset, ZeroWeightVector
from lpdecode.lattice import LQ_DIAGONAL, LpParams, lattice_sum, roughness
from lpdecode.weights import (ReceivedWord, WeightVector, build_weights, corr_lower_bound, correlation,
                              indicator, inner, restricted_bound)

# coset sum at distance 1 for q=5, p=1, s=0.1, from a 30-digit mpmath series
W3_Q5_S01 = 2.0611536224385578279659403982e-9


def test_received_word_reduces_and_lifts():
    y = ReceivedWord([5.5, -1.0, 2.0], 5)
    assert list(y.residues) == pytest.approx([0.5, 4.0, 2.0])
    assert list(y.lift()) == pytest.approx([0.5, -1.0, 2.0])
    assert ReceivedWord.from_text(y.to_text(), 5).residues == pytest.approx(y.residues)


def test_build_weights_small_s():
    W = build_weights(ReceivedWord([2.0], 5), LpParams(1, 0.1))
    assert W.blocks[0, 2] == pytest.approx(1.0, abs=1e-15)
    assert W.blocks[0, 3] == pytest.approx(W3_Q5_S01, rel=1e-12)
    assert W.blocks[0, 3] == pytest.approx(math.exp(-20), rel=1e-8)


@pytest.mark.parametrize("s", [0.3, 1.0, 4.0])
def test_argmax_at_received_symbol(s):
    for p in (1, 2):
        W = build_weights(ReceivedWord([2.0], 5), LpParams(p, s))
        assert int(np.argmax(W.blocks[0])) == 2


def test_equidistant_lifts():
    W = build_weights(ReceivedWord([0.5], 3), LpParams(2, 1))
    assert W.blocks[0, 0] == pytest.approx(W.blocks[0, 1], abs=1e-15)


def test_indicator_examples():
    W = indicator([0, 1], 3)
    assert W.blocks.tolist() == [[1, 0, 0], [0, 1, 0]]
    c = np.array([3, 1, 4, 1, 5]) % 7
    assert indicator(c, 7).norm() == pytest.approx(math.sqrt(5))
    assert correlation(indicator(c, 7), c) == pytest.approx(1.0)


def test_correlation_disjoint_is_zero():
    c = np.array([0, 1, 2])
    assert correlation(indicator((c + 1) % 5, 5), c) == 0.0


def test_zero_weight_vector():
    with pytest.raises(ZeroWeightVector):
        correlation(WeightVector(np.zeros((2, 3))), [0, 0])


def test_corr_bound_example_q5():
    params = LpParams(1, 1)
    c = np.array([1, 3])
    y = ReceivedWord(c + np.array([0.3, -0.2]), 5)
    corr = correlation(build_weights(y, params), c)
    arith, geom = corr_lower_bound(y, c, params)
    want_geom = math.exp(-2 * 0.5 / 2) / math.sqrt(lattice_sum(params, 5).value)
    assert geom == pytest.approx(want_geom, rel=1e-10)
    assert corr >= arith >= geom


def test_corr_bound_exact_received():
    params = LpParams(2, 1.5)
    c = np.array([0, 4, 2, 6])
    arith, geom = corr_lower_bound(ReceivedWord(c, 7), c, params)
    want = 1 / math.sqrt(lattice_sum(params, 7).value)
    assert arith == pytest.approx(want, rel=1e-11) and geom == pytest.approx(want, rel=1e-11)


def test_restricted_bound_examples():
    params = LpParams(1, 1)
    rng = np.random.default_rng(3)
    c = rng.integers(0, 11, 6)
    y = ReceivedWord(c + rng.uniform(-0.4, 0.4, 6), 11)
    assert restricted_bound(y, c, range(6), params) == pytest.approx(corr_lower_bound(y, c, params)[1])
    with pytest.raises(EmptySubset):
        restricted_bound(y, c, [], params)
    # one clean coordinate: (1/n) / sqrt(f_s(L_q))
    y2 = ReceivedWord(np.r_[c[:1], (c[1:] + 5.5) % 11], 11)
    want = 1 / 6 / math.sqrt(lattice_sum(params, 11).value)
    assert restricted_bound(y2, c, [0], params) == pytest.approx(want, rel=1e-11)


def test_restricted_beats_global_with_bad_coordinates():
    params = LpParams(2, 1.0)
    c = np.arange(8) % 17
    e = np.full(8, 0.1)
    e[[2, 5]] = 8.0
    y = ReceivedWord(c + e, 17)
    good = [i for i in range(8) if i not in (2, 5)]
    assert restricted_bound(y, c, good, params) > corr_lower_bound(y, c, params)[1]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([5, 7, 17]), st.integers(1, 6), st.sampled_from([1, 2]),
       st.sampled_from([0.5, 1.0, 2.0]), st.integers(0, 2 ** 32 - 1))
def test_corr_lower_bound_property(q, n, p, s, seed):
    rng = np.random.default_rng(seed)
    params = LpParams(p, s)
    c = rng.integers(0, q, n)
    y = ReceivedWord(rng.uniform(0, q, n), q)
    corr = correlation(build_weights(y, params), c)
    arith, geom = corr_lower_bound(y, c, params)
    assert corr >= arith - 1e-9
    assert arith >= geom - 1e-12


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([5, 7, 13]), st.sampled_from([1, 2]), st.floats(0.4, 3.0),
       st.integers(0, 12), st.integers(0, 2 ** 32 - 1))
def test_shift_equivariance(q, p, s, a, seed):
    rng = np.random.default_rng(seed)
    params = LpParams(p, s)
    y = rng.uniform(0, q, 4)
    W = build_weights(ReceivedWord(y, q), params)
    Wa = build_weights(ReceivedWord(y + a, q), params)
    assert np.allclose(Wa.blocks, W.shifted(a).blocks, atol=1e-12)


@pytest.mark.parametrize("q", [5, 17])
@pytest.mark.parametrize("s", [1.0, 2.0])
def test_norm_sandwich(q, s):
    params = LpParams(2, s)
    L = lattice_sum(params, q).value
    eps = roughness(params, q, LQ_DIAGONAL)
    rng = np.random.default_rng(q * 10 + int(s))
    for _ in range(30):
        W = build_weights(ReceivedWord(rng.uniform(0, q, 6), q), params)
        v = W.norm() ** 2 / 6
        assert L * (1 - eps) / (1 + eps) - 1e-12 <= v <= L + 1e-12


@pytest.mark.parametrize("p", [0.5, 1, 1.5, 2])
def test_norm_lower_bound(p):
    s = 1.3
    params = LpParams(p, s)
    rng = np.random.default_rng(11)
    for _ in range(5):
        W = build_weights(ReceivedWord(rng.uniform(0, 7, 5), 7), params)
        assert W.norm() >= math.sqrt(5) / math.exp(params.c ** p / (2 * s) ** p) - 1e-12


def test_weight_csv_roundtrip():
    W = build_weights(ReceivedWord([0.2, 3.7], 5), LpParams(1, 1))
    text = W.to_csv()
    assert text.splitlines()[0] == "i,x,weight"
    assert len(text.splitlines()) == 11
    assert np.allclose(WeightVector.from_csv(text).blocks, W.blocks, rtol=1e-11)


def test_inner_matches_manual():
    W = build_weights(ReceivedWord([1.2, 0.1, 4.4], 5), LpParams(2, 1))
    c = [1, 0, 4]
    assert inner(W, c) == pytest.approx(W.blocks[0, 1] + W.blocks[1, 0] + W.blocks[2, 4])
