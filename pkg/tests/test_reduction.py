import dataclasses
import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypercut.errors import SubmodularityViolation
from hypercut.hypercore import Hypergraph, SplittingFunction, cut_value, make_splitting
from hypercut.oracle import brute_preserver_check
from hypercut.reduction import Gadget, build_preserver, decompose_gadgets, gadget_mincut

from conftest import random_concave, random_instance


def test_decompose_examples():
    assert decompose_gadgets(SplittingFunction(4, (1, 2))) == [Gadget(1.0, 2)]
    assert decompose_gadgets(SplittingFunction(5, (1, 1))) == [Gadget(1.0, 1)]
    got = decompose_gadgets(SplittingFunction(8, (0.75, 1, 1, 1)))
    assert [g.b for g in got] == [1, 2]
    assert [g.a for g in got] == pytest.approx([0.5, 0.25], abs=1e-15)


def test_decompose_scales_with_edge_weight():
    assert decompose_gadgets(SplittingFunction(4, (1, 2)), 3.0) == [Gadget(3.0, 2)]


def test_decompose_rejects_nonsubmodular():
    sf = object.__new__(SplittingFunction)
    object.__setattr__(sf, "k", 4)
    object.__setattr__(sf, "w", (0.0, 1.0))
    with pytest.raises(SubmodularityViolation):
        decompose_gadgets(sf)


def test_gadget_mincut_examples():
    assert gadget_mincut((1, 1), 3, 1) == 1
    assert gadget_mincut((2, 3), 10, 5) == 6
    for a, b, k in [(1.0, 1, 2), (0.3, 2, 7), (5.0, 4, 9)]:
        assert gadget_mincut((a, b), k, 0) == 0
        assert gadget_mincut((a, b), k, k) == 0


@given(st.integers(0, 10_000))
def test_reconstruction_identity(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 13))
    sf = random_concave(k, rng)
    wt = float(rng.uniform(0.1, 10))
    gadgets = decompose_gadgets(sf, wt)
    assert len(gadgets) <= k // 2
    assert all(g.a > 0 for g in gadgets)
    assert [g.b for g in gadgets] == sorted(set(g.b for g in gadgets))
    full = sf.full()
    for i in range(k + 1):
        got = sum(g.a * min(i, k - i, g.b) for g in gadgets)
        assert got == pytest.approx(wt * full[i], rel=1e-12, abs=1e-12)


def test_single_aon_edge_structure():
    G = build_preserver(Hypergraph.build(3, [(0, 1, 2)]))
    assert G.N == 5 and G.n_arcs == 7
    arcs = sorted(zip(G.tails.tolist(), G.heads.tolist(), G.weights.tolist()))
    assert arcs == [(0, 3, 1.0), (1, 3, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 0, 1.0), (4, 1, 1.0), (4, 2, 1.0)]


def test_t1_preserver(t1):
    G = build_preserver(t1)
    assert G.N == 10 and G.n_arcs == 19
    assert brute_preserver_check(t1, G)


def test_empty_preserver():
    H = Hypergraph.build(3, [])
    G = build_preserver(H)
    assert G.N == 3 and G.n_arcs == 0
    assert brute_preserver_check(H, G)


def test_structure_invariants():
    rng = np.random.default_rng(5)
    for _ in range(20):
        H, _ = random_instance(rng, max_size=6)
        G = build_preserver(H)
        assert G.N == H.n + 2 * len(G.gadgets)
        assert not np.any((G.tails < H.n) & (G.heads < H.n))
        owner = {}
        for gid, g in enumerate(G.gadgets):
            owner[g.first] = owner[g.second] = gid
        for u, v in zip(G.tails, G.heads):
            if u >= H.n and v >= H.n:
                assert owner[u] == owner[v]
        per_edge = {}
        for g in G.gadgets:
            per_edge[g.edge] = per_edge.get(g.edge, 0) + 1
        assert sum(2 * len(H.edges[g.edge]) + 1 for g in G.gadgets) == G.n_arcs
        assert all(c <= len(H.edges[e]) // 2 for e, c in per_edge.items())


def test_directed_cut_matches_hypergraph_cut(t1):
    # minimum over all 2^6 auxiliary placements, done jointly rather than per gadget
    G = build_preserver(t1)
    for S in itertools.product([False, True], repeat=4):
        best = np.inf
        for U in itertools.product([False, True], repeat=G.N - 4):
            best = min(best, G.directed_cut(np.array(S + U)))
        assert best == cut_value(t1, np.array(S))


def test_mutations_are_detected(t1):
    G = build_preserver(t1)
    for a in range(G.n_arcs):
        w = G.weights.copy()
        w[a] *= 0.5
        assert not brute_preserver_check(t1, dataclasses.replace(G, weights=w))
    H = Hypergraph.build(4, [(0, 1, 2, 3)], "delta-linear:2")
    G = build_preserver(H)
    w = G.weights.copy()
    w[0] *= 2
    assert brute_preserver_check(H, G)
    assert not brute_preserver_check(H, dataclasses.replace(G, weights=w))


def test_provider_hook(t1):
    calls = []

    def provider(sf, wt):
        calls.append(sf.k)
        return decompose_gadgets(sf, wt)

    G = build_preserver(t1, provider)
    assert calls == [3, 3, 2] and G.n_arcs == 19


def test_edge_list_dump(t1):
    lines = build_preserver(t1).edge_list().splitlines()
    assert len(lines) == 19 and lines[0] == "0 4 1"
