"""Cut-matching driver: alternate bisections and flow embeddings, certify a lower bound.

After ``t`` rounds the union ``H_t`` of the embedded bipartite graphs routes
in the cut preserver with congestion ``gamma_t = sum 1/alpha_i``, so
``lambda_2(D^-1/2 L_t D^-1/2) / (2 gamma_t)`` is a lower bound on the optimal
pi-expansion of the hypergraph.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .embed import BipartiteCertificate, refine_cut_or_embed, verify_embedding, mirror_arcs
from .hypercore import Hypergraph, NodeWeights
from .reduction import ReducedGraph, build_preserver
from .spectral import components, fiedler, normalized_laplacian

CUT_PLAYERS = ("spectral", "heatkernel", "random")


def default_iterations(n: int) -> int:
    return max(1, math.ceil(5 * math.log2(max(n, 2))))


@dataclass
class IterationRecord:
    iteration: int
    R: list[int]
    alpha: float
    phi: float
    lambda2: float
    gamma: float
    bound: float
    lower_bound: float
    best_phi: float
    rho: float
    approx_ratio: float
    flow_solves: int
    seconds: float
    max_congestion_ratio: float | None = None

    def as_dict(self) -> dict:
        out = dict(self.__dict__)
        out.pop("R")
        if out["max_congestion_ratio"] is None:
            out.pop("max_congestion_ratio")
        return out


@dataclass
class CutMatchState:
    """Mutable state of one driver run."""

    n: int
    adjacency: sp.csr_matrix
    t: int = 0
    gamma: float = 0.0
    alphas: list[float] = field(default_factory=list)
    best_set: np.ndarray | None = None
    best_phi: float = math.inf
    lambda2: float = 0.0
    eigvec: np.ndarray | None = None
    lower: float = 0.0
    records: list[IterationRecord] = field(default_factory=list)
    certificates: list[BipartiteCertificate] = field(default_factory=list)
    last_flow: tuple | None = None

    @classmethod
    def empty(cls, n: int) -> "CutMatchState":
        return cls(n=n, adjacency=sp.csr_matrix((n, n)))

    def add_matching(self, cert: BipartiteCertificate) -> None:
        self.adjacency = (self.adjacency + cert.matrix + cert.matrix.T).tocsr()
        self.gamma += 1.0 / cert.alpha
        self.alphas.append(cert.alpha)
        self.t += 1


def lower_bound(state: CutMatchState) -> float:
    """Best certified lower bound on the optimal pi-expansion so far."""
    return state.lower


def approx_ratio(state: CutMatchState) -> float:
    """A posteriori ratio ``phi(S*) / lower bound``; infinite while no bound is certified."""
    return state.best_phi / state.lower if state.lower > 0 else math.inf


def weighted_split(order: np.ndarray, pi: NodeWeights) -> np.ndarray:
    """Split ``order`` at the pi-weighted median and return the lighter side as a mask.

    The prefix is the longest one with weight at most ``pi(V)/2``, clamped so
    both sides are nonempty.
    """
    w = pi.pi[order]
    cum = np.cumsum(w)
    k = int(np.searchsorted(cum, pi.total / 2, side="right"))
    k = min(max(k, 1), len(order) - 1)
    mask = np.zeros(pi.n, dtype=bool)
    mask[order[:k]] = True
    if pi.pi[mask].sum() > pi.pi[~mask].sum():
        mask = ~mask
    return mask


def initial_bisection(pi: NodeWeights, seed) -> np.ndarray:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return weighted_split(rng.permutation(pi.n), pi)


def _sorted_split(values: np.ndarray, pi: NodeWeights) -> np.ndarray:
    order = np.lexsort((np.arange(pi.n), values))
    return weighted_split(order, pi)


def _component_split(labels: np.ndarray, pi: NodeWeights) -> np.ndarray:
    """Greedy balance of whole components into two bins; the lighter bin."""
    ncomp = int(labels.max()) + 1
    weight = np.bincount(labels, weights=pi.pi, minlength=ncomp)
    bins = [0.0, 0.0]
    side = np.zeros(ncomp, dtype=bool)
    for c in sorted(range(ncomp), key=lambda c: (-weight[c], c)):
        b = 0 if bins[0] <= bins[1] else 1
        side[c] = b == 0
        bins[b] += weight[c]
    mask = side[labels]
    if pi.pi[mask].sum() > pi.pi[~mask].sum():
        mask = ~mask
    return mask


def spectral_partition(state: CutMatchState, pi: NodeWeights, method: str = "auto") -> np.ndarray:
    """Threshold the second eigenvector of ``H_t`` at the weighted median."""
    ncomp, labels = components(state.adjacency)
    if ncomp > 1:
        return _component_split(labels, pi)
    if state.eigvec is None:
        state.lambda2, state.eigvec = fiedler(state.adjacency, pi.pi, method=method)
    return _sorted_split(state.eigvec, pi)


def heat_kernel_partition(
    state: CutMatchState, pi: NodeWeights, seed, tau: float | None = None
) -> np.ndarray:
    """Best-effort heat-kernel cut player (no round-count guarantee).

    Applies ``exp(-tau * L_t / t)`` to a random vector orthogonal to
    ``sqrt(pi)`` and splits at the weighted median. ``tau`` defaults to
    ``log2(n)``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    ncomp, labels = components(state.adjacency)
    if ncomp > 1:
        return _component_split(labels, pi)
    u = np.sqrt(pi.pi)
    u /= np.linalg.norm(u)
    x = rng.standard_normal(pi.n)
    x -= u * (u @ x)
    if tau is None:
        tau = math.log2(max(pi.n, 2))
    if tau > 0:
        L = normalized_laplacian(state.adjacency, pi.pi)
        x = expm_multiply(-(tau / max(state.t, 1)) * L, x)
    return _sorted_split(x, pi)


def run(
    H: Hypergraph,
    pi: NodeWeights,
    t_max: int | None = None,
    seed: int = 0,
    cut_player: str = "spectral",
    G: ReducedGraph | None = None,
    keep_certificates: bool = False,
    verify_bisections: int = 0,
    eig_method: str = "auto",
    tau: float | None = None,
    on_iteration=None,
) -> CutMatchState:
    """Run ``t_max`` rounds of the cut-matching game.

    ``verify_bisections > 0`` replays every certificate on that many random
    bisections and stores the worst ``congestion * alpha`` in the record.
    ``on_iteration`` is called with each :class:`IterationRecord`.
    """
    if cut_player not in CUT_PLAYERS:
        raise ValueError(f"unknown cut player {cut_player!r}")
    if t_max is None:
        t_max = default_iterations(H.n)
    if G is None:
        G = build_preserver(H)
    keep_paths = keep_certificates or verify_bisections > 0
    mirror = mirror_arcs(G) if verify_bisections > 0 else None
    rng = np.random.default_rng(seed)
    state = CutMatchState.empty(H.n)

    for i in range(1, t_max + 1):
        tic = time.perf_counter()
        if i == 1 or cut_player == "random":
            R = initial_bisection(pi, rng)
        elif cut_player == "spectral":
            R = spectral_partition(state, pi, eig_method)
        else:
            R = heat_kernel_partition(state, pi, rng, tau)

        res = refine_cut_or_embed(H, G, pi, R, keep_paths=keep_paths)
        cert = res.certificate
        state.last_flow = (res.network, res.flow)
        worst = None
        if verify_bisections > 0:
            worst = 0.0
            for _ in range(verify_bisections):
                S = rng.random(H.n) < 0.5
                worst = max(worst, verify_embedding(G, cert, S, mirror) * cert.alpha)
        if keep_certificates:
            state.certificates.append(cert)
        elif cert.paths is not None:
            cert = BipartiteCertificate(cert.matrix, cert.R, cert.alpha, cert.eta)
        state.add_matching(cert)
        if res.phi < state.best_phi:
            state.best_phi = res.phi
            state.best_set = res.S.copy()

        ncomp, _ = components(state.adjacency)
        if ncomp > 1:
            state.lambda2, state.eigvec = 0.0, None
        else:
            state.lambda2, state.eigvec = fiedler(state.adjacency, pi.pi, state.eigvec, eig_method)
        bound = state.lambda2 / (2 * state.gamma)
        state.lower = max(state.lower, bound)
        rho = 2 * state.gamma * state.best_phi / state.lambda2 if state.lambda2 > 0 else math.inf
        rec = IterationRecord(
            iteration=i,
            R=[int(v) for v in np.flatnonzero(res.R)],
            alpha=res.alpha,
            phi=res.phi,
            lambda2=state.lambda2,
            gamma=state.gamma,
            bound=bound,
            lower_bound=state.lower,
            best_phi=state.best_phi,
            rho=rho,
            approx_ratio=approx_ratio(state),
            flow_solves=res.flow_solves,
            seconds=time.perf_counter() - tic,
            max_congestion_ratio=worst,
        )
        state.records.append(rec)
        if on_iteration is not None:
            on_iteration(rec)
    return state
