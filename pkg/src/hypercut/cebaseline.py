"""Clique-expansion baseline: uniform clique weights plus a spectral sweep.

Each hyperedge becomes a clique whose edges all get the smallest weight
``p`` with ``p * i * (k - i) >= w_i`` for every split size ``i``; the
distortion ``C`` is the worst factor by which the clique overestimates.
The sweep evaluates threshold sets of the second eigenvector under the
original hypergraph objective.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ZeroPenalty
from .hypercore import Hypergraph, NodeWeights, generalized_degrees, pi_expansion
from .spectral import fiedler

NORMALIZATIONS = ("graph", "hypergraph")


@dataclass(frozen=True, eq=False)
class CliqueExpansion:
    graph: sp.csr_matrix
    p: np.ndarray
    C: np.ndarray

    @property
    def max_distortion(self) -> float:
        return float(self.C.max(initial=1.0))


def clique_weight(w: np.ndarray, k: int) -> tuple[float, float]:
    """``(p, C)`` for one penalty vector ``w_1..w_r`` on a hyperedge of size ``k``."""
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0):
        raise ZeroPenalty(f"penalty vector {list(w)} has a zero entry; distortion is unbounded")
    i = np.arange(1, len(w) + 1)
    pairs = i * (k - i)
    p = float(np.max(w / pairs))
    return p, float(np.max(p * pairs / w))


def expand(H: Hypergraph) -> CliqueExpansion:
    rows, cols, vals = [], [], []
    p_all = np.zeros(H.m)
    C_all = np.zeros(H.m)
    for idx, (e, wt, sf) in enumerate(zip(H.edges, H.weights, H.splitting)):
        p, C = clique_weight(sf.w, len(e))
        p_all[idx] = p * wt
        C_all[idx] = C
        for a in range(len(e)):
            for b in range(a + 1, len(e)):
                rows += [e[a], e[b]]
                cols += [e[b], e[a]]
                vals += [p * wt, p * wt]
    A = sp.csr_matrix((vals, (rows, cols)), shape=(H.n, H.n))
    A.sum_duplicates()
    return CliqueExpansion(A, p_all, C_all)


def sandwich_holds(ce: CliqueExpansion, H: Hypergraph, rel: float = 1e-9) -> bool:
    """``w_i <= p * i * (k - i) <= C * w_i`` for every hyperedge and split size."""
    for idx, (e, wt, sf) in enumerate(zip(H.edges, H.weights, H.splitting)):
        k = len(e)
        i = np.arange(1, len(sf.w) + 1)
        w = wt * np.asarray(sf.w)
        clique = ce.p[idx] * i * (k - i)
        if np.any(w > clique * (1 + rel)) or np.any(clique > ce.C[idx] * w * (1 + rel)):
            return False
    return True


def sweep_cut(
    ce: CliqueExpansion, H: Hypergraph, pi: NodeWeights, normalization: str = "graph"
) -> tuple[np.ndarray, float]:
    """Best sweep set ``{u : v2(u) > r}`` under the hypergraph pi-expansion.

    ``normalization`` picks the degrees of the Laplacian: clique-graph
    degrees (default) or generalized hypergraph degrees. Ties between
    prefixes go to the shorter one; if the eigenvector is constant the top
    singleton is returned.
    """
    if normalization == "graph":
        d = np.asarray(ce.graph.sum(axis=1)).ravel()
    elif normalization == "hypergraph":
        d = generalized_degrees(H).pi.copy()
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    n = H.n
    _, y = fiedler(ce.graph, d)
    order = np.lexsort((np.arange(n), -y))

    incident: list[list[int]] = [[] for _ in range(n)]
    for idx, e in enumerate(H.edges):
        for v in e:
            incident[v].append(idx)
    counts = np.zeros(H.m, dtype=np.int64)
    pen = H.penalties(counts) if H.m else np.zeros(0)
    cut = 0.0
    inside = 0.0
    total = pi.total
    best_phi, best_k = np.inf, 1
    for k in range(1, n):
        v = order[k - 1]
        inside += pi.pi[v]
        for idx in incident[v]:
            counts[idx] += 1
        if incident[v]:
            ids = np.array(incident[v])
            new = H.penalties(counts)[ids]
            cut += float((new - pen[ids]).sum())
            pen[ids] = new
        # only thresholds between distinct values define sweep sets
        if y[order[k]] == y[v]:
            continue
        phi = cut / min(inside, total - inside)
        if phi < best_phi:
            best_phi, best_k = phi, k
    mask = np.zeros(n, dtype=bool)
    mask[order[:best_k]] = True
    # report the exact value rather than the running sum
    return mask, pi_expansion(H, pi, mask)
