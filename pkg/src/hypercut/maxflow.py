"""Maximum s-t flow by highest-label push-relabel, and flow path decomposition.

Capacities are floats. Excess and residual capacity at or below
``eps = 1e-13 * max capacity`` count as zero, which bounds the leftover
imbalance per node by ``eps``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConservationViolation

SATURATION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FlowNetwork:
    n: int
    tails: np.ndarray
    heads: np.ndarray
    caps: np.ndarray
    s: int
    t: int

    def __post_init__(self) -> None:
        tails = np.asarray(self.tails, dtype=np.int64)
        heads = np.asarray(self.heads, dtype=np.int64)
        caps = np.asarray(self.caps, dtype=float)
        if not (len(tails) == len(heads) == len(caps)):
            raise ValueError("tails, heads and caps must have equal length")
        if self.s == self.t:
            raise ValueError("source and sink must differ")
        if len(caps) and (np.any(caps < 0) or np.any(~np.isfinite(caps))):
            raise ValueError("capacities must be finite and nonnegative")
        if len(tails) and (min(tails.min(), heads.min()) < 0 or max(tails.max(), heads.max()) >= self.n):
            raise ValueError("arc endpoint out of range")
        object.__setattr__(self, "tails", tails)
        object.__setattr__(self, "heads", heads)
        object.__setattr__(self, "caps", caps)

    @classmethod
    def from_arcs(cls, n: int, arcs, s: int, t: int) -> "FlowNetwork":
        """``arcs`` is an iterable of ``(u, v, capacity)``."""
        arcs = list(arcs)
        if not arcs:
            return cls(n, np.zeros(0), np.zeros(0), np.zeros(0), s, t)
        u, v, c = zip(*arcs)
        return cls(n, np.array(u), np.array(v), np.array(c, dtype=float), s, t)

    @property
    def n_arcs(self) -> int:
        return len(self.tails)

    def cut_capacity(self, source_side: np.ndarray) -> float:
        leaving = source_side[self.tails] & ~source_side[self.heads]
        return float(self.caps[leaving].sum())


@dataclass(frozen=True, eq=False)
class FlowResult:
    value: float
    flow: np.ndarray
    source_side: np.ndarray

    @property
    def cut_nodes(self) -> list[int]:
        return [int(v) for v in np.flatnonzero(self.source_side)]


@dataclass(frozen=True)
class FlowPath:
    nodes: tuple[int, ...]
    arcs: tuple[int, ...]
    amount: float


@dataclass(frozen=True, eq=False)
class PathDecomposition:
    paths: list[FlowPath]

    def __len__(self) -> int:
        return len(self.paths)

    def arc_flows(self, n_arcs: int) -> np.ndarray:
        out = np.zeros(n_arcs)
        for p in self.paths:
            for a in p.arcs:
                out[a] += p.amount
        return out

    @property
    def total(self) -> float:
        return float(sum(p.amount for p in self.paths))


def _tolerance(net: FlowNetwork) -> float:
    top = float(net.caps.max()) if net.n_arcs else 0.0
    return max(1e-13 * top, 1e-300)


def max_flow(net: FlowNetwork) -> FlowResult:
    """Maximum flow and the residual-reachable minimum cut.

    Single-phase highest-label push-relabel: nodes that cannot reach the sink
    climb above ``n`` and drain their excess back to the source, so the result
    is a flow rather than a preflow. Gap relabeling lifts every node above an
    emptied height to ``n + 1``; a global relabel (BFS from ``t`` and then from
    ``s`` on the residual graph) runs at start and after every ``n`` relabels.
    """
    N, s, t = net.n, net.s, net.t
    M = net.n_arcs
    eps = _tolerance(net)

    # residual arc 2i is arc i, 2i+1 its reverse
    to = [0] * (2 * M)
    res = [0.0] * (2 * M)
    tails = net.tails.tolist()
    heads = net.heads.tolist()
    caps = net.caps.tolist()
    adj: list[list[int]] = [[] for _ in range(N)]
    for i in range(M):
        u, v = tails[i], heads[i]
        to[2 * i] = v
        to[2 * i + 1] = u
        res[2 * i] = caps[i]
        adj[u].append(2 * i)
        adj[v].append(2 * i + 1)

    excess = [0.0] * N
    height = [0] * N
    top_height = 2 * N + 1
    buckets: list[list[int]] = [[] for _ in range(top_height + 1)]
    count = [0] * (top_height + 1)
    current = [0] * N

    def global_relabel() -> int:
        INF = top_height
        for v in range(N):
            height[v] = INF
        height[t] = 0
        frontier = [t]
        while frontier:
            nxt = []
            for v in frontier:
                hv = height[v] + 1
                for a in adj[v]:
                    u = to[a]
                    # residual arc u -> v is the partner of a
                    if height[u] == INF and u != s and res[a ^ 1] > eps:
                        height[u] = hv
                        nxt.append(u)
            frontier = nxt
        height[s] = N
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                hv = height[v] + 1
                for a in adj[v]:
                    u = to[a]
                    if height[u] == INF and res[a ^ 1] > eps:
                        height[u] = hv
                        nxt.append(u)
            frontier = nxt
        for h in range(top_height + 1):
            buckets[h].clear()
            count[h] = 0
        best = 0
        for v in range(N):
            current[v] = 0
            if height[v] < N:
                count[height[v]] += 1
            if v != s and v != t and excess[v] > eps and height[v] < INF:
                buckets[height[v]].append(v)
                best = max(best, height[v])
        return best

    for a in adj[s]:
        if a & 1 == 0 and res[a] > 0:
            c = res[a]
            v = to[a]
            res[a] = 0.0
            res[a ^ 1] += c
            excess[v] += c
            excess[s] -= c

    hmax = global_relabel()
    relabels = 0
    while hmax >= 0:
        if not buckets[hmax]:
            hmax -= 1
            continue
        u = buckets[hmax].pop()
        if height[u] != hmax or excess[u] <= eps:
            continue
        hu = hmax
        arcs = adj[u]
        deg = len(arcs)
        i = current[u]
        ex = excess[u]
        while ex > eps and i < deg:
            a = arcs[i]
            r = res[a]
            if r > eps:
                v = to[a]
                if height[v] == hu - 1:
                    d = ex if ex < r else r
                    res[a] = r - d
                    res[a ^ 1] += d
                    ex -= d
                    was = excess[v]
                    excess[v] = was + d
                    if was <= eps and v != s and v != t and excess[v] > eps:
                        buckets[hu - 1].append(v)
                    if ex <= eps:
                        break
            i += 1
        excess[u] = ex
        current[u] = i
        if ex <= eps:
            continue

        # relabel u
        new_h = top_height
        for a in arcs:
            if res[a] > eps:
                hv = height[to[a]] + 1
                if hv < new_h:
                    new_h = hv
        if new_h > top_height:
            new_h = top_height
        if hu < N:
            count[hu] -= 1
            if count[hu] == 0 and new_h > hu:
                # gap: nothing at height hu, everything above it is cut off from t
                for w in range(N):
                    hw = height[w]
                    if hu < hw < N:
                        count[hw] -= 1
                        height[w] = N + 1
                        current[w] = 0
                        if w != s and w != t and excess[w] > eps:
                            buckets[N + 1].append(w)
                            hmax = max(hmax, N + 1)
                if new_h < N + 1:
                    new_h = N + 1
        height[u] = new_h
        current[u] = 0
        if new_h < N:
            count[new_h] += 1
        relabels += 1
        if new_h < top_height:
            buckets[new_h].append(u)
            hmax = max(hmax, new_h)
        if relabels % max(N, 1) == 0:
            hmax = global_relabel()

    flow = np.array(res[1::2]) if M else np.zeros(0)
    out_s = flow[net.tails == s].sum() - flow[net.heads == s].sum()

    seen = [False] * N
    seen[s] = True
    stack = [s]
    while stack:
        u = stack.pop()
        for a in adj[u]:
            if res[a] > eps and not seen[to[a]]:
                seen[to[a]] = True
                stack.append(to[a])
    return FlowResult(value=float(out_s), flow=flow, source_side=np.array(seen, dtype=bool))


def check_conservation(net: FlowNetwork, flow: np.ndarray, value: float) -> float:
    """Largest imbalance over non-terminal nodes; raises if above tolerance."""
    bal = np.zeros(net.n)
    np.add.at(bal, net.heads, flow)
    np.subtract.at(bal, net.tails, flow)
    bal[[net.s, net.t]] = 0.0
    worst = float(np.abs(bal).max(initial=0.0))
    if worst > SATURATION_TOL * abs(value) + 1e-12 + net.n * _tolerance(net):
        raise ConservationViolation(f"flow imbalance {worst:.3g} at a non-terminal node")
    return worst


def remove_cycles(net: FlowNetwork, flow: np.ndarray) -> np.ndarray:
    """Cancel every directed cycle carrying positive flow; returns a new flow array."""
    eps = _tolerance(net)
    f = flow.astype(float).tolist()
    heads = net.heads.tolist()
    out: list[list[int]] = [[] for _ in range(net.n)]
    order = np.lexsort((net.heads, net.tails))
    for a in order.tolist():
        out[net.tails[a]].append(a)
    state = [0] * net.n  # 0 fresh, 1 on stack, 2 finished
    ptr = [0] * net.n
    pos = [-1] * net.n
    for root in range(net.n):
        if state[root]:
            continue
        nodes = [root]
        arcs: list[int] = []
        state[root] = 1
        pos[root] = 0
        while nodes:
            u = nodes[-1]
            lst = out[u]
            while ptr[u] < len(lst) and (f[lst[ptr[u]]] <= eps or state[heads[lst[ptr[u]]]] == 2):
                ptr[u] += 1
            if ptr[u] == len(lst):
                state[u] = 2
                nodes.pop()
                if arcs:
                    arcs.pop()
                continue
            a = lst[ptr[u]]
            v = heads[a]
            if state[v] == 0:
                state[v] = 1
                pos[v] = len(nodes)
                nodes.append(v)
                arcs.append(a)
                continue
            # v is on the stack: cancel the cycle v -> ... -> u -> v
            p = pos[v]
            cyc = arcs[p:] + [a]
            d = min(f[c] for c in cyc)
            for c in cyc:
                f[c] -= d
            f[a] = f[a] if f[a] > eps else 0.0
            cut = None
            for j in range(p, len(arcs)):
                if f[arcs[j]] <= eps:
                    f[arcs[j]] = 0.0
                    cut = j
                    break
            if cut is not None:
                for w in nodes[cut + 1:]:
                    state[w] = 0
                del nodes[cut + 1:]
                del arcs[cut:]
    return np.array(f) if f else np.zeros(0)


def decompose(net: FlowNetwork, flow: FlowResult | np.ndarray) -> PathDecomposition:
    """Split a flow into simple s-t paths after cancelling its cycles.

    Paths are peeled from ``s`` by always taking the positive-flow arc with
    the smallest head id. Leftover flow that cannot reach ``t`` (at most the
    conservation slack) is discarded.
    """
    f_arr = flow.flow if isinstance(flow, FlowResult) else np.asarray(flow, dtype=float)
    value = float(f_arr[net.tails == net.s].sum() - f_arr[net.heads == net.s].sum())
    check_conservation(net, f_arr, value)
    eps = _tolerance(net)
    f = remove_cycles(net, f_arr).tolist()
    heads = net.heads.tolist()
    out: list[list[int]] = [[] for _ in range(net.n)]
    for a in np.lexsort((net.heads, net.tails)).tolist():
        out[net.tails[a]].append(a)
    ptr = [0] * net.n

    def next_arc(u: int) -> int | None:
        lst = out[u]
        while ptr[u] < len(lst) and f[lst[ptr[u]]] <= eps:
            ptr[u] += 1
        return lst[ptr[u]] if ptr[u] < len(lst) else None

    paths: list[FlowPath] = []
    s, t = net.s, net.t
    while True:
        first = next_arc(s)
        if first is None:
            break
        nodes = [s]
        arcs = []
        u = s
        while u != t:
            a = next_arc(u)
            if a is None:
                break
            arcs.append(a)
            u = heads[a]
            nodes.append(u)
        d = min(f[a] for a in arcs) if arcs else 0.0
        for a in arcs:
            f[a] -= d
            if f[a] <= eps:
                f[a] = 0.0
        if u == t and d > 0:
            paths.append(FlowPath(tuple(nodes), tuple(arcs), d))
    return PathDecomposition(paths)
