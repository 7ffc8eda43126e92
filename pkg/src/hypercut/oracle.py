"""Exhaustive oracles for small instances, used as ground truth in tests."""
from __future__ import annotations

import numpy as np

from .errors import TooLarge
from .hypercore import Hypergraph, NodeWeights, cut_value
from .maxflow import FlowNetwork
from .reduction import ReducedGraph, gadget_mincut

EXPANSION_CAP = 22
PRESERVER_CAP = 8
ST_CUT_CAP = 12
REL_TOL = 1e-9

_CHUNK = 1 << 14


def _subset_masks(start: int, stop: int, bits: int) -> np.ndarray:
    codes = np.arange(start, stop, dtype=np.int64)
    return ((codes[:, None] >> np.arange(bits)) & 1).astype(bool)


def brute_min_expansion(
    H: Hypergraph, pi: NodeWeights, cap: int = EXPANSION_CAP
) -> tuple[float, list[int]]:
    """Exact minimum pi-expansion by enumerating every bipartition.

    Sets are normalized to exclude node 0. Among values within a relative
    ``1e-12`` of the minimum the lexicographically smallest sorted node list
    is returned.
    """
    n = H.n
    if n > cap:
        raise TooLarge(f"{n} nodes exceeds the enumeration cap of {cap}")
    if n < 2:
        raise TooLarge("need at least two nodes")
    inc = H.incidence().toarray() if H.m else np.zeros((n, 0))
    total = pi.total
    best = np.inf
    candidates: list[tuple[float, tuple[int, ...]]] = []
    stop = 1 << (n - 1)
    for lo in range(1, stop, _CHUNK):
        hi = min(lo + _CHUNK, stop)
        masks = np.zeros((hi - lo, n), dtype=bool)
        masks[:, 1:] = _subset_masks(lo, hi, n - 1)
        if H.m:
            counts = (masks.astype(np.int64) @ inc.astype(np.int64))
            cut = H.penalties(counts).sum(axis=1)
        else:
            cut = np.zeros(hi - lo)
        inside = masks @ pi.pi
        phi = cut / np.minimum(inside, total - inside)
        low = phi.min()
        if low <= best * (1 + 1e-12):
            best = min(best, low)
            for j in np.flatnonzero(phi <= best * (1 + 1e-12)):
                candidates.append((float(phi[j]), tuple(int(v) for v in np.flatnonzero(masks[j]))))
    best = min(v for v, _ in candidates)
    ties = [S for v, S in candidates if v <= best * (1 + 1e-12)]
    return float(best), list(min(ties))


def _gadget_arcs(G: ReducedGraph) -> tuple[list[np.ndarray], np.ndarray]:
    owner = np.full(G.N, -1, dtype=np.int64)
    for g_id, g in enumerate(G.gadgets):
        owner[g.first] = g_id
        owner[g.second] = g_id
    arc_owner = np.maximum(owner[G.tails], owner[G.heads])
    per = [np.flatnonzero(arc_owner == g_id) for g_id in range(len(G.gadgets))]
    return per, np.flatnonzero(arc_owner < 0)


def brute_preserver_check(H: Hypergraph, G: ReducedGraph, cap: int = PRESERVER_CAP) -> bool:
    """Check that ``G`` reproduces every cut of ``H`` by exhaustive search.

    For each ``S`` three numbers must agree within relative ``1e-9``: the
    hypergraph cut, the sum of closed-form gadget minima, and the directed
    cut of ``G`` minimized over the four placements of every auxiliary pair
    (using the arc weights actually stored in ``G``).
    """
    n = H.n
    if n > cap:
        raise TooLarge(f"{n} nodes exceeds the preserver-check cap of {cap}")
    if G.n != n:
        return False
    per_gadget, loose = _gadget_arcs(G)
    sizes = [len(H.edges[g.edge]) for g in G.gadgets]
    placements = ((True, True), (False, False), (True, False), (False, True))
    for code in range(1 << n):
        S = np.array([(code >> v) & 1 for v in range(n)], dtype=bool)
        target = cut_value(H, S)
        side = np.zeros(G.N, dtype=bool)
        side[:n] = S
        formula = 0.0
        directed = float(G.weights[loose][side[G.tails[loose]] & ~side[G.heads[loose]]].sum())
        for g, arcs, k in zip(G.gadgets, per_gadget, sizes):
            i = int(S[list(H.edges[g.edge])].sum())
            formula += gadget_mincut((g.a, g.b), k, i)
            tails, heads, w = G.tails[arcs], G.heads[arcs], G.weights[arcs]
            best = np.inf
            for first_in, second_in in placements:
                side[g.first] = first_in
                side[g.second] = second_in
                best = min(best, float(w[side[tails] & ~side[heads]].sum()))
            directed += best
        scale = max(abs(target), 1.0)
        if abs(formula - target) > REL_TOL * scale or abs(directed - target) > REL_TOL * scale:
            return False
    return True


def brute_min_st_cut(net: FlowNetwork, cap: int = ST_CUT_CAP) -> float:
    """Minimum capacity over all node sets containing ``s`` but not ``t``."""
    if net.n > cap:
        raise TooLarge(f"{net.n} nodes exceeds the s-t cut cap of {cap}")
    others = [v for v in range(net.n) if v not in (net.s, net.t)]
    masks = np.zeros((1 << len(others), net.n), dtype=bool)
    masks[:, others] = _subset_masks(0, 1 << len(others), len(others))
    masks[:, net.s] = True
    leaving = masks[:, net.tails] & ~masks[:, net.heads]
    return float((leaving * net.caps).sum(axis=1).min())
