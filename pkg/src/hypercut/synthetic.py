"""Random hypergraph generators for tests and benchmarks."""
from __future__ import annotations

import numpy as np


def random_hypergraph(
    n: int, m: int, max_size: int, rng: np.random.Generator, connected: bool = True
) -> list[tuple[int, ...]]:
    """``m`` random hyperedges with sizes in ``2..max_size``.

    With ``connected=True`` the first hyperedges chain a random permutation of
    the nodes so the result is connected whenever ``m`` allows it.
    """
    edges: list[tuple[int, ...]] = []
    if connected:
        perm = rng.permutation(n)
        i = 0
        while i < n - 1 and len(edges) < m:
            k = int(rng.integers(2, max_size + 1))
            chunk = perm[i : i + k]
            edges.append(tuple(sorted(int(v) for v in chunk)))
            i += len(chunk) - 1
    while len(edges) < m:
        k = int(rng.integers(2, min(max_size, n) + 1))
        edges.append(tuple(sorted(int(v) for v in rng.choice(n, size=k, replace=False))))
    return edges


def planted_partition(
    n: int, m: int, sizes=(2, 3, 4), ratio: float = 10.0, seed: int = 0
) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Two equal blocks; a candidate hyperedge spanning both blocks is kept
    with probability ``1/ratio`` of one inside a block.

    Returns ``(edges, block)`` where ``block[v]`` is 0 or 1.
    """
    rng = np.random.default_rng(seed)
    block = np.zeros(n, dtype=np.int64)
    block[n // 2 :] = 1
    edges: list[tuple[int, ...]] = []
    seen = set()
    while len(edges) < m:
        k = int(rng.choice(sizes))
        e = tuple(sorted(int(v) for v in rng.choice(n, size=k, replace=False)))
        if e in seen:
            continue
        crossing = len(set(block[list(e)].tolist())) > 1
        if crossing and rng.random() >= 1.0 / ratio:
            continue
        seen.add(e)
        edges.append(e)
    return edges, block
