"""Hypergraphs with cardinality-based submodular splitting functions.

Nodes are the integers ``0..n-1``. Every hyperedge carries a nonnegative
weight and a :class:`SplittingFunction`; the penalty for splitting ``e`` so
that ``j`` of its nodes lie in ``S`` is ``weight(e) * w_e(j)``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import (
    EmptySide,
    InvalidHypergraph,
    InvalidNodeWeights,
    IsolatedNode,
    NegativePenalty,
    SubmodularityViolation,
)

log = logging.getLogger(__name__)

REL_TOL = 1e-9
SPLITTING_KINDS = ("aon", "delta-linear", "limi", "custom")


def gadget_coefficients(w: Sequence[float]) -> np.ndarray:
    """Coefficients ``c_j`` with ``sum_j c_j * min(i, k-i, j) == w_i`` for all i.

    With ``d_i = w_i - w_{i-1}`` (and ``w_0 = 0``) the solution is
    ``c_j = d_j - d_{j+1}`` for ``j < r`` and ``c_r = d_r``. A penalty vector
    is submodular exactly when all of these are nonnegative.
    """
    w = np.asarray(w, dtype=float)
    d = np.diff(np.concatenate(([0.0], w)))
    c = d.copy()
    c[:-1] -= d[1:]
    return c


@dataclass(frozen=True)
class SplittingFunction:
    """Symmetric penalty vector ``w_1..w_{k//2}`` for hyperedges of size ``k``."""

    k: int
    w: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.k < 2:
            raise InvalidHypergraph(f"splitting function needs k >= 2, got {self.k}")
        w = tuple(float(x) for x in self.w)
        object.__setattr__(self, "w", w)
        if len(w) != self.k // 2:
            raise InvalidHypergraph(
                f"penalty vector for k={self.k} must have length {self.k // 2}, got {len(w)}"
            )
        if any(not math.isfinite(x) for x in w):
            raise InvalidHypergraph("penalties must be finite")
        if any(x < 0 for x in w):
            raise NegativePenalty(f"negative penalty in {list(w)}")
        c = gadget_coefficients(w)
        scale = max(max(w), 1e-300)
        if np.any(c < -1e-12 * scale):
            raise SubmodularityViolation(
                f"penalty vector {list(w)} (k={self.k}) does not have nonincreasing, "
                "nonnegative first differences"
            )

    def __call__(self, j: int) -> float:
        j = min(j, self.k - j)
        return 0.0 if j <= 0 else self.w[j - 1]

    def full(self) -> np.ndarray:
        """Penalties for ``|A| = 0..k``."""
        return np.array([self(j) for j in range(self.k + 1)])

    @property
    def max_penalty(self) -> float:
        return max(self.w)


def make_splitting(kind: str, k: int, param=None) -> SplittingFunction:
    """Instantiate one of the supported splitting families for size ``k``.

    ``param`` is ``delta`` for ``delta-linear``, the fraction for ``limi`` and
    the penalty vector for ``custom``.
    """
    if k < 2:
        raise InvalidHypergraph(f"hyperedge size must be >= 2, got {k}")
    r = k // 2
    if kind in ("aon", "all-or-nothing"):
        return SplittingFunction(k, (1.0,) * r)
    if kind == "delta-linear":
        delta = float(param)
        if delta < 1:
            raise InvalidHypergraph(f"delta must be >= 1, got {delta}")
        return SplittingFunction(k, tuple(min(i, k - i, delta) for i in range(1, r + 1)))
    if kind == "limi":
        frac = float(param)
        if not 0 < frac < 1:
            raise InvalidHypergraph(f"limi fraction must lie in (0, 1), got {frac}")
        # round first: 0.1 * 30 is 3.0000000000000004 in binary
        c = math.ceil(round(frac * k, 9))
        return SplittingFunction(
            k, tuple(0.5 + 0.5 * min(1.0, i / c, (k - i) / c) for i in range(1, r + 1))
        )
    if kind == "custom":
        return SplittingFunction(k, tuple(param))
    raise ValueError(f"unknown splitting kind {kind!r}")


@dataclass(frozen=True)
class SplittingFamily:
    """One parametric splitting rule applied to every hyperedge size.

    For ``custom`` the parameter is a profile ``g(1), g(2), ...``; a hyperedge
    of size ``k`` uses ``w_i = g(i)`` for ``i <= k // 2``.
    """

    kind: str
    param: object = None

    def __call__(self, k: int) -> SplittingFunction:
        if self.kind == "custom":
            g = tuple(self.param)
            if len(g) < k // 2:
                raise InvalidHypergraph(
                    f"custom profile has {len(g)} values, hyperedge of size {k} needs {k // 2}"
                )
            return make_splitting("custom", k, g[: k // 2])
        return make_splitting(self.kind, k, self.param)

    @classmethod
    def parse(cls, text: str) -> "SplittingFamily":
        """Parse ``aon``, ``delta-linear:D``, ``limi:A`` or ``custom:v1,v2,...``."""
        kind, _, arg = text.partition(":")
        kind = kind.strip().lower()
        if kind in ("aon", "all-or-nothing"):
            return cls("aon")
        if kind == "delta-linear":
            return cls(kind, float(arg))
        if kind == "limi":
            return cls(kind, float(arg))
        if kind == "custom":
            return cls(kind, tuple(float(x) for x in arg.replace(",", " ").split()))
        raise ValueError(f"unknown splitting spec {text!r}")

    def __str__(self) -> str:
        if self.kind == "aon":
            return "aon"
        if self.kind == "custom":
            return "custom:" + ",".join(repr(float(x)) for x in self.param)
        return f"{self.kind}:{self.param:g}"


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """Immutable weighted hypergraph.

    ``edges`` are sorted, duplicate-free node tuples; ``weights[i]`` multiplies
    ``splitting[i]``. Use :meth:`build` for a convenient constructor.
    """

    n: int
    edges: tuple[tuple[int, ...], ...]
    weights: np.ndarray
    splitting: tuple[SplittingFunction, ...]
    _ptr: np.ndarray = field(init=False, repr=False)
    _nodes: np.ndarray = field(init=False, repr=False)
    _pen: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        edges = tuple(tuple(int(v) for v in e) for e in self.edges)
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if len(weights) != len(edges) or len(self.splitting) != len(edges):
            raise InvalidHypergraph("edges, weights and splitting functions differ in length")
        for e, sf in zip(edges, self.splitting):
            if len(e) < 2:
                raise InvalidHypergraph(f"hyperedge {e} has fewer than 2 nodes")
            if len(set(e)) != len(e):
                raise InvalidHypergraph(f"hyperedge {e} repeats a node")
            if e[0] < 0 or e[-1] >= self.n or list(e) != sorted(e):
                raise InvalidHypergraph(f"hyperedge {e} is unsorted or out of range")
            if sf.k != len(e):
                raise InvalidHypergraph(f"splitting function for size {sf.k} on hyperedge {e}")
        if np.any(~np.isfinite(weights)) or np.any(weights < 0):
            raise InvalidHypergraph("hyperedge weights must be finite and nonnegative")
        weights.setflags(write=False)
        sizes = np.array([len(e) for e in edges], dtype=np.int64)
        ptr = np.concatenate(([0], np.cumsum(sizes))).astype(np.int64)
        nodes = np.array([v for e in edges for v in e], dtype=np.int64)
        # penalties for |S & e| = 0..k, laid out per edge at ptr[i] + i
        pen = np.concatenate(
            [wt * sf.full() for wt, sf in zip(weights, self.splitting)] or [np.zeros(0)]
        )
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "splitting", tuple(self.splitting))
        object.__setattr__(self, "_ptr", ptr)
        object.__setattr__(self, "_nodes", nodes)
        object.__setattr__(self, "_pen", pen)

    @classmethod
    def build(cls, n: int, edges: Iterable[Iterable[int]], splitting="aon", weights=None):
        """Build from raw edges; ``splitting`` is a family, its string form or a list."""
        edges = [tuple(sorted(int(v) for v in e)) for e in edges]
        if isinstance(splitting, str):
            splitting = SplittingFamily.parse(splitting)
        if isinstance(splitting, SplittingFamily):
            sfs = [splitting(len(e)) for e in edges]
        else:
            sfs = list(splitting)
        if weights is None:
            weights = np.ones(len(edges))
        return cls(n, tuple(edges), np.asarray(weights, dtype=float), tuple(sfs))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def mu(self) -> int:
        """Total incidence count ``sum |e|``."""
        return int(self._ptr[-1])

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self._ptr)

    @property
    def max_penalty(self) -> float:
        """Largest weighted cut penalty of a single hyperedge (``U``)."""
        return max((wt * sf.max_penalty for wt, sf in zip(self.weights, self.splitting)), default=0.0)

    @property
    def min_penalty(self) -> float:
        """Smallest nonzero weighted penalty; for concave symmetric ``w`` this is ``w_1``."""
        return min((wt * sf.w[0] for wt, sf in zip(self.weights, self.splitting)), default=0.0)

    def incidence(self) -> sp.csr_matrix:
        """Node-by-hyperedge 0/1 incidence matrix."""
        cols = np.repeat(np.arange(self.m), self.sizes)
        data = np.ones(self.mu)
        return sp.csr_matrix((data, (self._nodes, cols)), shape=(self.n, self.m))

    def edge_counts(self, mask: np.ndarray) -> np.ndarray:
        """``|S & e|`` for every hyperedge, ``S`` given as a boolean node mask."""
        if self.m == 0:
            return np.zeros(0, dtype=np.int64)
        return np.add.reduceat(mask[self._nodes].astype(np.int64), self._ptr[:-1])

    def penalties(self, counts: np.ndarray) -> np.ndarray:
        """Weighted penalty of each hyperedge given ``|S & e|`` (any leading batch shape)."""
        return self._pen[self._ptr[:-1] + np.arange(self.m) + counts]

    def scaled(self, c: float) -> "Hypergraph":
        return Hypergraph(self.n, self.edges, self.weights * c, self.splitting)


@dataclass(frozen=True, eq=False)
class NodeWeights:
    """Positive node weights ``pi``."""

    pi: np.ndarray

    def __post_init__(self) -> None:
        pi = np.array(self.pi, dtype=float).reshape(-1)
        if np.any(~np.isfinite(pi)) or np.any(pi <= 0):
            raise InvalidNodeWeights("positive node weight required for every node")
        pi.setflags(write=False)
        object.__setattr__(self, "pi", pi)

    @classmethod
    def unit(cls, n: int) -> "NodeWeights":
        return cls(np.ones(n))

    @property
    def n(self) -> int:
        return len(self.pi)

    @property
    def total(self) -> float:
        return float(self.pi.sum())

    def of(self, S) -> float:
        return float(self.pi[as_mask(S, self.n)].sum())

    def __len__(self) -> int:
        return len(self.pi)


def as_mask(S, n: int) -> np.ndarray:
    """Boolean membership mask for a node collection (or an existing mask)."""
    if isinstance(S, np.ndarray) and S.dtype == bool:
        if S.shape != (n,):
            raise ValueError(f"mask has shape {S.shape}, expected ({n},)")
        return S
    mask = np.zeros(n, dtype=bool)
    idx = np.fromiter((int(v) for v in S), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise ValueError("node id out of range")
    mask[idx] = True
    return mask


def cut_value(H: Hypergraph, S) -> float:
    """Generalized cut of ``S``: sum of weighted splitting penalties."""
    mask = as_mask(S, H.n)
    if H.m == 0:
        return 0.0
    return float(H.penalties(H.edge_counts(mask)).sum())


def pi_expansion(H: Hypergraph, pi: NodeWeights, S) -> float:
    """Ratio ``cut(S) / min(pi(S), pi(V - S))``."""
    mask = as_mask(S, H.n)
    inside = float(pi.pi[mask].sum())
    outside = float(pi.pi[~mask].sum())
    if not mask.any() or mask.all():
        raise EmptySide("pi-expansion needs both sides of the cut to be nonempty")
    return cut_value(H, mask) / min(inside, outside)


def generalized_degrees(H: Hypergraph) -> NodeWeights:
    """Degree ``d_v = sum over e containing v of weight(e) * w_e({v})``."""
    d = np.zeros(H.n)
    for e, wt, sf in zip(H.edges, H.weights, H.splitting):
        d[list(e)] += wt * sf.w[0]
    isolated = np.flatnonzero(d <= 0)
    if isolated.size:
        raise IsolatedNode(f"node {int(isolated[0])} has zero generalized degree")
    return NodeWeights(d)


def hyperedge_components(n: int, edges: Sequence[Sequence[int]]) -> np.ndarray:
    """Component label per node, where hyperedges connect all their members."""
    rows, cols = [], []
    for i, e in enumerate(edges):
        rows.extend(e)
        cols.extend([n + i] * len(e))
    size = n + len(edges)
    A = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(size, size))
    _, labels = connected_components(A, directed=False)
    return labels[:n]


@dataclass(frozen=True, eq=False)
class Problem:
    """A normalized, connected instance plus the bookkeeping to undo normalization.

    ``node_ids[v]`` is the input id of internal node ``v``. Internally the
    minimum hyperedge penalty is 1 and the minimum node weight is 1; values of
    the pi-expansion convert back by ``phi_in = phi * pi_scale / edge_scale``.
    """

    hypergraph: Hypergraph
    pi: NodeWeights
    node_ids: np.ndarray
    edge_scale: float
    pi_scale: float
    n_input: int
    family: SplittingFamily | None = None

    def to_input_scale(self, phi: float) -> float:
        return phi * self.pi_scale / self.edge_scale

    def input_set(self, S) -> list[int]:
        mask = as_mask(S, self.hypergraph.n)
        return sorted(int(v) for v in self.node_ids[mask])


def prepare(
    n: int,
    edges: Sequence[Sequence[int]],
    family: SplittingFamily | str = "aon",
    weights: Sequence[float] | None = None,
    node_weights="unit",
) -> Problem:
    """Clean, restrict to the largest component and normalize raw input.

    ``node_weights`` is ``"unit"``, ``"degree"`` or an array over all ``n``
    input nodes. Singleton hyperedges are dropped, repeated hyperedges merged
    and zero-penalty hyperedges discarded, each with a warning.
    """
    if isinstance(family, str):
        family = SplittingFamily.parse(family)
    if weights is None:
        weights = [1.0] * len(edges)
    if len(weights) != len(edges):
        raise InvalidHypergraph("one weight per hyperedge required")

    merged: dict[tuple[int, ...], float] = {}
    dropped = 0
    for e, wt in zip(edges, weights):
        key = tuple(sorted(set(int(v) for v in e)))
        if any(v < 0 or v >= n for v in key):
            raise InvalidHypergraph(f"hyperedge {list(e)} has a node outside 0..{n - 1}")
        if wt < 0 or not math.isfinite(wt):
            raise InvalidHypergraph(f"hyperedge weight {wt} is not a nonnegative number")
        if len(key) < 2:
            dropped += 1
            continue
        merged[key] = merged.get(key, 0.0) + float(wt)
    if dropped:
        log.warning("dropped %d hyperedge(s) with fewer than two distinct nodes", dropped)
    if len(merged) < sum(1 for e in edges if len(set(e)) >= 2):
        log.warning("merged repeated hyperedges by summing their weights")

    kept = []
    for key, wt in merged.items():
        sf = family(len(key))
        if wt * sf.max_penalty <= 0:
            continue
        kept.append((key, wt, sf))
    if len(kept) < len(merged):
        log.warning("dropped %d hyperedge(s) with zero cut penalty", len(merged) - len(kept))
    if not kept:
        raise InvalidHypergraph("no hyperedge with a positive cut penalty")

    labels = hyperedge_components(n, [k for k, _, _ in kept])
    touched = np.zeros(n, dtype=bool)
    for key, _, _ in kept:
        touched[list(key)] = True
    sizes = np.bincount(labels[touched], minlength=labels.max() + 1)
    big = int(np.argmax(sizes))
    node_ids = np.flatnonzero(labels == big)
    if len(node_ids) < n:
        log.warning(
            "restricting to the largest connected component: %d of %d nodes", len(node_ids), n
        )
    relabel = -np.ones(n, dtype=np.int64)
    relabel[node_ids] = np.arange(len(node_ids))
    sub = [(tuple(int(relabel[v]) for v in key), wt, sf) for key, wt, sf in kept if labels[key[0]] == big]

    H = Hypergraph(
        len(node_ids),
        tuple(e for e, _, _ in sub),
        np.array([wt for _, wt, _ in sub]),
        tuple(sf for _, _, sf in sub),
    )
    if isinstance(node_weights, str):
        if node_weights == "unit":
            pi = NodeWeights.unit(H.n)
        elif node_weights == "degree":
            pi = generalized_degrees(H)
        else:
            raise ValueError(f"unknown node weight choice {node_weights!r}")
    else:
        raw = np.asarray(node_weights, dtype=float).reshape(-1)
        if len(raw) != n:
            raise InvalidNodeWeights(f"expected {n} node weights, got {len(raw)}")
        pi = NodeWeights(raw)
        pi = NodeWeights(pi.pi[node_ids])

    edge_scale = 1.0 / H.min_penalty
    pi_scale = 1.0 / float(pi.pi.min())
    return Problem(
        hypergraph=H.scaled(edge_scale),
        pi=NodeWeights(pi.pi * pi_scale),
        node_ids=node_ids,
        edge_scale=edge_scale,
        pi_scale=pi_scale,
        n_input=n,
        family=family,
    )
