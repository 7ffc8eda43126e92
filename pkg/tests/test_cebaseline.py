import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypercut.cebaseline import clique_weight, expand, sandwich_holds, sweep_cut
from hypercut.errors import ZeroPenalty
from hypercut.hypercore import Hypergraph, NodeWeights, SplittingFunction, pi_expansion
from hypercut.oracle import brute_min_expansion

from conftest import random_instance


def test_worked_examples():
    assert clique_weight((1.0,), 3) == (0.5, 1.0)
    p, C = clique_weight((1.0, 1.0), 4)
    assert p == pytest.approx(1 / 3) and C == pytest.approx(4 / 3)
    assert clique_weight((1.0, 2.0), 4) == (0.5, 1.5)


def test_expand_graph():
    H = Hypergraph.build(4, [(0, 1, 2), (2, 3)], weights=[2.0, 1.0])
    ce = expand(H)
    A = ce.graph.toarray()
    assert A[0, 1] == 1.0 and A[2, 3] == 1.0 and A[0, 3] == 0
    assert np.allclose(A, A.T)
    assert list(ce.p) == [1.0, 1.0] and ce.max_distortion == 1.0


def test_zero_penalty():
    with pytest.raises(ZeroPenalty):
        clique_weight((0.0, 0.0), 4)
    H = Hypergraph.build(4, [(0, 1, 2, 3)], [SplittingFunction(4, (0.0, 0.0))])
    with pytest.raises(ZeroPenalty):
        expand(H)


@given(st.integers(0, 10_000))
def test_sandwich(seed):
    rng = np.random.default_rng(seed)
    H, _ = random_instance(rng, max_size=8)
    ce = expand(H)
    assert sandwich_holds(ce, H)
    assert np.all(ce.C >= 1 - 1e-12)


def test_sweep_t1(t1, unit4):
    S, phi = sweep_cut(expand(t1), t1, unit4)
    assert phi == 1.0
    assert sorted(np.flatnonzero(S)) in ([0, 3], [1, 2])


def test_sweep_single_edge():
    H = Hypergraph.build(2, [(0, 1)])
    S, phi = sweep_cut(expand(H), H, NodeWeights.unit(2))
    assert S.sum() == 1 and phi == 1.0


@pytest.mark.parametrize("norm", ["graph", "hypergraph"])
def test_sweep_feasible(norm):
    rng = np.random.default_rng(8)
    for _ in range(15):
        H, pi = random_instance(rng, weights="degree")
        S, phi = sweep_cut(expand(H), H, pi, norm)
        assert phi == pi_expansion(H, pi, S)
        assert phi >= brute_min_expansion(H, pi)[0] * (1 - 1e-12)


def test_bad_normalization(t1, unit4):
    with pytest.raises(ValueError):
        sweep_cut(expand(t1), t1, unit4, "volume")
