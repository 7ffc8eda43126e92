"""Directed reduction of a hypergraph into CB-gadgets.

A gadget with parameters ``(a, b)`` on hyperedge ``e`` adds two auxiliary
nodes ``e'`` and ``e''``, arcs ``(v, e')`` and ``(e'', v)`` of weight ``a`` for
every ``v`` in ``e``, and the arc ``(e', e'')`` of weight ``a * b``. Its
cheapest directed cut when ``i`` nodes of ``e`` are on the source side is
``a * min(i, k - i, b)``, so a sum of gadgets reproduces any submodular
cardinality-based penalty.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import SubmodularityViolation
from .hypercore import Hypergraph, SplittingFunction, gadget_coefficients


class Gadget(NamedTuple):
    a: float
    b: int


GadgetSpec = list[Gadget]
GadgetProvider = Callable[[SplittingFunction, float], GadgetSpec]


def decompose_gadgets(sf: SplittingFunction, edge_weight: float = 1.0) -> GadgetSpec:
    """Exact gadget decomposition, at most ``k // 2`` gadgets with increasing ``b``."""
    c = edge_weight * gadget_coefficients(sf.w)
    top = float(c.max(initial=0.0))
    if np.any(c < -1e-12 * max(top, 1e-300)):
        raise SubmodularityViolation(f"negative gadget weight for penalties {list(sf.w)}")
    return [Gadget(float(a), j + 1) for j, a in enumerate(c) if a > 1e-12 * top]


def gadget_mincut(gadget: Gadget | tuple[float, int], k: int, i: int) -> float:
    """Cheapest directed cut of one gadget over the 4 placements of its auxiliary pair.

    ``i`` nodes of the hyperedge are on the source side.
    """
    a, b = gadget
    inside, outside = i, k - i
    # (e' side, e'' side) -> cut arcs leaving the source side
    placements = (
        a * outside,  # both in: (e'', v) for v outside
        a * inside,  # both out: (v, e') for v inside
        a * b,  # e' in, e'' out: (e', e'')
        a * inside + a * outside,  # e' out, e'' in
    )
    return min(placements)


@dataclass(frozen=True, eq=False)
class GadgetInstance:
    edge: int
    a: float
    b: int
    first: int  # e'
    second: int  # e''


@dataclass(frozen=True, eq=False)
class ReducedGraph:
    """Augmented cut preserver: original nodes ``0..n-1`` then auxiliary pairs."""

    n: int
    N: int
    tails: np.ndarray
    heads: np.ndarray
    weights: np.ndarray
    gadgets: tuple[GadgetInstance, ...]

    @property
    def n_arcs(self) -> int:
        return len(self.tails)

    def arc_index(self) -> dict[tuple[int, int], int]:
        """Map ``(u, v)`` to arc id; the reduction never creates parallel arcs."""
        return {(int(u), int(v)): i for i, (u, v) in enumerate(zip(self.tails, self.heads))}

    def directed_cut(self, mask: np.ndarray) -> float:
        """Weight of arcs leaving the node set ``mask`` (over all ``N`` nodes)."""
        leaving = mask[self.tails] & ~mask[self.heads]
        return float(self.weights[leaving].sum())

    def edge_list(self) -> str:
        return "".join(
            f"{u} {v} {w:.17g}\n" for u, v, w in zip(self.tails, self.heads, self.weights)
        )


def build_preserver(H: Hypergraph, provider: GadgetProvider = decompose_gadgets) -> ReducedGraph:
    """Replace every hyperedge of ``H`` by its gadgets.

    Auxiliary ids are assigned contiguously after the original nodes in
    hyperedge order, so layouts are reproducible.
    """
    tails: list[int] = []
    heads: list[int] = []
    weights: list[float] = []
    gadgets = []
    nxt = H.n
    for idx, (e, wt, sf) in enumerate(zip(H.edges, H.weights, H.splitting)):
        for a, b in provider(sf, float(wt)):
            first, second = nxt, nxt + 1
            nxt += 2
            gadgets.append(GadgetInstance(idx, a, b, first, second))
            for v in e:
                tails.append(v)
                heads.append(first)
                weights.append(a)
            tails.append(first)
            heads.append(second)
            weights.append(a * b)
            for v in e:
                tails.append(second)
                heads.append(v)
                weights.append(a)
    return ReducedGraph(
        n=H.n,
        N=nxt,
        tails=np.array(tails, dtype=np.int64),
        heads=np.array(heads, dtype=np.int64),
        weights=np.array(weights, dtype=float),
        gadgets=tuple(gadgets),
    )
