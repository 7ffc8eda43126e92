"""Cut-or-embed: one max-flow either finds a sparser set or certifies a bipartite embedding.

For a split ``{R, R̄}`` with ``pi(R) <= pi(R̄)`` and a parameter ``alpha``
the auxiliary network is the cut preserver scaled by ``1/alpha`` plus arcs
``(s, r)`` of capacity ``pi(r)`` and ``(v, t)`` of capacity ``eta * pi(v)``,
where ``eta = pi(R) / pi(R̄)``. A saturating flow decomposes into a
pi-regular bipartite demand graph routable in the preserver with congestion
``1/alpha``; otherwise the min cut yields a set with expansion below ``alpha``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import (
    EmptySide,
    InternalBoundExceeded,
    InvalidHypergraph,
    MissingDecomposition,
    NotSaturating,
    UnbalancedSides,
)
from .hypercore import Hypergraph, NodeWeights, as_mask, cut_value, pi_expansion
from .maxflow import SATURATION_TOL, FlowNetwork, FlowPath, FlowResult, decompose, max_flow
from .reduction import ReducedGraph


@dataclass(frozen=True, eq=False)
class AuxiliaryGraph:
    network: FlowNetwork
    reduced: ReducedGraph
    R: np.ndarray
    pi: NodeWeights
    alpha: float
    eta: float

    @property
    def demand(self) -> float:
        """``pi(R)``: the flow value that certifies an embedding."""
        return float(self.pi.pi[self.R].sum())


@dataclass(frozen=True, eq=False)
class BipartiteCertificate:
    """Demand matrix ``M[r, v]`` between ``R`` and its complement, embeddable with congestion ``1/alpha``.

    ``paths`` are the flow paths inside the reduced graph (source and sink arcs
    stripped), kept only when verification was requested.
    """

    matrix: sp.csr_matrix
    R: np.ndarray
    alpha: float
    eta: float
    paths: tuple[FlowPath, ...] | None = None

    @property
    def congestion(self) -> float:
        return 1.0 / self.alpha

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    def regularity_error(self, pi: NodeWeights) -> float:
        """Largest relative deviation of the degrees from ``pi(r)`` / ``eta * pi(u)``."""
        rows = np.asarray(self.matrix.sum(axis=1)).ravel()
        cols = np.asarray(self.matrix.sum(axis=0)).ravel()
        target = np.where(self.R, pi.pi, self.eta * pi.pi)
        got = np.where(self.R, rows, cols)
        return float(np.max(np.abs(got - target) / target))


def oriented(pi: NodeWeights, R) -> np.ndarray:
    """Return the lighter side of ``{R, V - R}`` as a mask."""
    mask = as_mask(R, pi.n).copy()
    if not mask.any() or mask.all():
        raise EmptySide("bisection needs two nonempty sides")
    if pi.pi[mask].sum() > pi.pi[~mask].sum():
        mask = ~mask
    return mask


def build_auxiliary(G: ReducedGraph, pi: NodeWeights, R, alpha: float) -> AuxiliaryGraph:
    R = as_mask(R, G.n)
    if not R.any():
        raise EmptySide("R must be nonempty")
    piR = float(pi.pi[R].sum())
    piRbar = float(pi.pi[~R].sum())
    if piR > piRbar:
        raise UnbalancedSides(f"pi(R) = {piR:g} exceeds pi(V - R) = {piRbar:g}")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    eta = piR / piRbar
    s, t = G.N, G.N + 1
    r_nodes = np.flatnonzero(R)
    o_nodes = np.flatnonzero(~R)
    net = FlowNetwork(
        n=G.N + 2,
        tails=np.concatenate((G.tails, np.full(len(r_nodes), s), o_nodes)),
        heads=np.concatenate((G.heads, r_nodes, np.full(len(o_nodes), t))),
        caps=np.concatenate((G.weights / alpha, pi.pi[r_nodes], eta * pi.pi[o_nodes])),
        s=s,
        t=t,
    )
    return AuxiliaryGraph(net, G, R, pi, float(alpha), eta)


def st_objective(H: Hypergraph, pi: NodeWeights, R, alpha: float, S) -> float:
    """``cut(S)/alpha + pi(R - S) + eta * pi(S - R)``, the value of the s-t cut induced by ``S``."""
    R = as_mask(R, H.n)
    S = as_mask(S, H.n)
    eta = pi.pi[R].sum() / pi.pi[~R].sum()
    return float(cut_value(H, S) / alpha + pi.pi[R & ~S].sum() + eta * pi.pi[~R & S].sum())


def cut_to_set(aux: AuxiliaryGraph, cutside) -> np.ndarray:
    """Original nodes on the source side of an s-t cut."""
    side = np.asarray(cutside)
    if side.dtype != bool:
        side = as_mask(side, aux.network.n)
    return side[: aux.reduced.n].copy()


def is_saturating(aux: AuxiliaryGraph, flow: FlowResult) -> bool:
    return flow.value >= aux.demand * (1 - SATURATION_TOL)


def flow_embed(aux: AuxiliaryGraph, flow: FlowResult, keep_paths: bool = False) -> BipartiteCertificate:
    """Turn a saturating flow into its bipartite demand graph."""
    if not is_saturating(aux, flow):
        raise NotSaturating(f"flow value {flow.value:g} is below pi(R) = {aux.demand:g}")
    dec = decompose(aux.network, flow)
    n = aux.reduced.n
    rows, cols, vals = [], [], []
    kept = []
    for p in dec.paths:
        r, v = p.nodes[1], p.nodes[-2]
        rows.append(r)
        cols.append(v)
        vals.append(p.amount)
        if keep_paths:
            kept.append(FlowPath(p.nodes[1:-1], p.arcs[1:-1], p.amount))
    M = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    M.sum_duplicates()
    return BipartiteCertificate(
        matrix=M,
        R=aux.R.copy(),
        alpha=aux.alpha,
        eta=aux.eta,
        paths=tuple(kept) if keep_paths else None,
    )


def _safety_cap(H: Hypergraph, pi: NodeWeights) -> int:
    return math.ceil(math.log2(max(H.max_penalty * max(H.m, 1) * pi.total, 2.0))) + 4


@dataclass(eq=False)
class CutOrEmbed:
    """Outcome of one matching-player call.

    ``alpha`` is the congestion parameter of ``certificate``; ``S`` is the
    best set found, with expansion ``phi``. ``alphas`` lists every ``alpha``
    at which a flow was solved.
    """

    certificate: BipartiteCertificate
    S: np.ndarray
    alpha: float
    phi: float
    R: np.ndarray
    alphas: list[float] = field(default_factory=list)
    network: FlowNetwork | None = None
    flow: FlowResult | None = None

    @property
    def flow_solves(self) -> int:
        return len(self.alphas)


def hyper_cut_or_embed(
    H: Hypergraph, G: ReducedGraph, pi: NodeWeights, R, keep_paths: bool = False
) -> CutOrEmbed:
    """Doubling search: start at ``alpha = 2/pi(V)`` and double until a cut appears.

    Expects normalized input (minimum hyperedge penalty 1, ``pi >= 1``).
    Returns the last certificate, the cut set (expansion below ``2 * alpha``)
    and the certificate's ``alpha``.
    """
    R = oriented(pi, R)
    alpha = 2.0 / pi.total
    cap = _safety_cap(H, pi)
    cert = None
    alphas: list[float] = []
    while True:
        if len(alphas) >= cap:
            raise InternalBoundExceeded(f"no cut found after {cap} doublings")
        aux = build_auxiliary(G, pi, R, alpha)
        flow = max_flow(aux.network)
        alphas.append(alpha)
        if is_saturating(aux, flow):
            cert = flow_embed(aux, flow, keep_paths)
            alpha *= 2
            continue
        if cert is None:
            raise InvalidHypergraph(
                "flow did not saturate at alpha = 2/pi(V); normalize the instance first"
            )
        S = cut_to_set(aux, flow.source_side)
        return CutOrEmbed(cert, S, cert.alpha, pi_expansion(H, pi, S), R, alphas)


def refine_cut_or_embed(
    H: Hypergraph, G: ReducedGraph, pi: NodeWeights, R, keep_paths: bool = False
) -> CutOrEmbed:
    """Iterative refinement: ``alpha`` tracks the expansion of the best set so far.

    Starts at ``alpha = phi(R)``; every non-saturating flow yields a strictly
    better set and ``alpha`` drops to its expansion. The first saturating
    flow certifies an embedding with congestion ``1/alpha`` where ``alpha``
    equals the expansion of the returned set.
    """
    R = oriented(pi, R)
    best = R.copy()
    alpha = pi_expansion(H, pi, R)
    cap = _safety_cap(H, pi)
    alphas: list[float] = []
    while True:
        if len(alphas) >= cap:
            raise InternalBoundExceeded(f"refinement did not settle after {cap} flow solves")
        aux = build_auxiliary(G, pi, R, alpha)
        flow = max_flow(aux.network)
        alphas.append(alpha)
        if is_saturating(aux, flow):
            cert = flow_embed(aux, flow, keep_paths)
            return CutOrEmbed(cert, best, alpha, alpha, R, alphas, aux.network, flow)
        S = cut_to_set(aux, flow.source_side)
        if not S.any() or S.all():
            raise InternalBoundExceeded("non-saturating flow produced a trivial cut")
        phi = pi_expansion(H, pi, S)
        if not phi < alpha:
            raise InternalBoundExceeded(
                f"cut at alpha={alpha!r} has expansion {phi!r}; expected a strict improvement"
            )
        best, alpha = S, phi


def mirror_arcs(G: ReducedGraph) -> np.ndarray:
    """Arc id of the reverse-direction twin: ``(v, e')`` <-> ``(e'', v)``; ``(e', e'')`` maps to itself."""
    idx = G.arc_index()
    mirror = np.empty(G.n_arcs, dtype=np.int64)
    first_of = {g.first: g.second for g in G.gadgets}
    second_of = {g.second: g.first for g in G.gadgets}
    for (u, v), a in idx.items():
        if v in first_of and u < G.n:
            mirror[a] = idx[(first_of[v], u)]
        elif u in second_of and v < G.n:
            mirror[a] = idx[(v, second_of[u])]
        else:
            mirror[a] = a
    return mirror


def verify_embedding(G: ReducedGraph, cert: BipartiteCertificate, S, mirror: np.ndarray | None = None) -> float:
    """Congestion of routing the demand pairs of ``cert`` that cross ``{S, V - S}`` from ``S`` outward.

    Paths already running from ``S`` to its complement are kept; paths running
    the other way are replaced by their mirror image through the same gadgets.
    Pairs on one side of ``S`` are not routed.
    """
    if cert.paths is None:
        raise MissingDecomposition("certificate was built without keep_paths=True")
    S = as_mask(S, G.n)
    if mirror is None:
        mirror = mirror_arcs(G)
    load = np.zeros(G.n_arcs)
    for p in cert.paths:
        r, v = p.nodes[0], p.nodes[-1]
        if S[r] and not S[v]:
            np.add.at(load, list(p.arcs), p.amount)
        elif S[v] and not S[r]:
            np.add.at(load, mirror[list(p.arcs)], p.amount)
    if not G.n_arcs:
        return 0.0
    return float(np.max(load / G.weights))
