import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypercut.errors import ConservationViolation
from hypercut.maxflow import FlowNetwork, check_conservation, decompose, max_flow, remove_cycles
from hypercut.oracle import brute_min_st_cut


def four_node():
    # s=0, a=1, b=2, t=3
    return FlowNetwork.from_arcs(4, [(0, 1, 3), (0, 2, 2), (1, 2, 1), (1, 3, 2), (2, 3, 3)], 0, 3)


def random_network(rng, n_max=10, p=0.35):
    n = int(rng.integers(2, n_max + 1))
    arcs = [
        (u, v, float(rng.choice([rng.uniform(0, 10), rng.integers(0, 5)])))
        for u in range(n) for v in range(n) if u != v and rng.random() < p
    ]
    return FlowNetwork.from_arcs(n, arcs, 0, n - 1)


def test_four_node_example():
    net = four_node()
    res = max_flow(net)
    assert res.value == 5
    assert brute_min_st_cut(net) == 5
    assert res.cut_nodes in ([0], [0, 1], [0, 1, 2])
    assert net.cut_capacity(res.source_side) == 5
    dec = decompose(net, res)
    assert dec.total == pytest.approx(5, rel=1e-12)
    assert len(dec) <= net.n_arcs + net.n
    assert np.all(dec.arc_flows(net.n_arcs) <= res.flow + 1e-12)


def test_single_arc():
    net = FlowNetwork.from_arcs(2, [(0, 1, 7)], 0, 1)
    res = max_flow(net)
    assert res.value == 7 and brute_min_st_cut(net) == 7
    dec = decompose(net, res)
    assert len(dec) == 1 and dec.paths[0].nodes == (0, 1) and dec.paths[0].amount == 7


def test_disconnected():
    net = FlowNetwork.from_arcs(4, [(0, 1, 3), (2, 3, 4)], 0, 3)
    res = max_flow(net)
    assert res.value == 0 and res.cut_nodes == [0, 1]
    assert brute_min_st_cut(net) == 0
    assert len(decompose(net, res)) == 0


def test_network_validation():
    with pytest.raises(ValueError):
        FlowNetwork.from_arcs(2, [(0, 1, -1)], 0, 1)
    with pytest.raises(ValueError):
        FlowNetwork.from_arcs(2, [(0, 1, 1)], 0, 0)
    with pytest.raises(ValueError):
        FlowNetwork.from_arcs(2, [(0, 2, 1)], 0, 1)


@given(st.integers(0, 100_000))
def test_duality_and_decomposition(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng)
    res = max_flow(net)
    opt = brute_min_st_cut(net)
    assert res.value == pytest.approx(opt, rel=1e-9, abs=1e-12)
    assert net.cut_capacity(res.source_side) == pytest.approx(res.value, rel=1e-9, abs=1e-12)
    assert np.all(res.flow >= 0) and np.all(res.flow <= net.caps * (1 + 1e-9))
    check_conservation(net, res.flow, res.value)
    dec = decompose(net, res)
    assert len(dec) <= net.n_arcs + net.n
    assert dec.total == pytest.approx(res.value, rel=1e-9, abs=1e-12)
    assert np.all(dec.arc_flows(net.n_arcs) <= res.flow * (1 + 1e-9) + 1e-12)
    for p in dec.paths:
        assert len(set(p.nodes)) == len(p.nodes)
        assert p.nodes[0] == net.s and p.nodes[-1] == net.t


def test_deterministic():
    rng = np.random.default_rng(3)
    net = random_network(rng, n_max=10, p=0.5)
    a, b = max_flow(net), max_flow(net)
    assert a.value == b.value and np.array_equal(a.flow, b.flow)


def test_cycle_removal():
    # s -> a -> b -> t plus a cycle a -> b -> c -> a
    net = FlowNetwork.from_arcs(5, [(0, 1, 5), (1, 2, 9), (2, 4, 5), (2, 3, 4), (3, 1, 4)], 0, 4)
    flow = np.array([2.0, 5.0, 2.0, 3.0, 3.0])
    f = remove_cycles(net, flow)
    assert list(f) == [2.0, 2.0, 2.0, 0.0, 0.0]
    dec = decompose(net, flow)
    assert len(dec) == 1 and dec.paths[0].amount == 2.0


def test_conservation_violation():
    net = four_node()
    with pytest.raises(ConservationViolation):
        decompose(net, np.array([3.0, 0.0, 0.0, 0.0, 0.0]))
