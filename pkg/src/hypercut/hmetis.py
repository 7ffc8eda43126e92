"""Reading and writing hMETIS-style hypergraph files.

Header ``m n [fmt]``; then ``m`` lines of 1-based node ids, each prefixed by
a hyperedge weight when ``fmt`` is 1. Lines starting with ``%`` are comments.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import InvalidHypergraph, InvalidNodeWeights


def _content_lines(text: str):
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if line and not line.startswith("%"):
            yield lineno, line


def parse_hmetis(text: str) -> tuple[int, list[list[int]], list[float]]:
    """Return ``(n, edges, weights)`` with 0-based node ids."""
    lines = list(_content_lines(text))
    if not lines:
        raise InvalidHypergraph("empty hypergraph file")
    header = lines[0][1].split()
    if len(header) not in (2, 3):
        raise InvalidHypergraph(f"bad header {lines[0][1]!r}, expected 'm n [fmt]'")
    try:
        m, n = int(header[0]), int(header[1])
        fmt = int(header[2]) if len(header) == 3 else 0
    except ValueError as exc:
        raise InvalidHypergraph(f"bad header {lines[0][1]!r}") from exc
    if fmt not in (0, 1):
        raise InvalidHypergraph(f"unsupported fmt {fmt}; only 0 and 1 are understood")
    body = lines[1:]
    if len(body) != m:
        raise InvalidHypergraph(f"header announces {m} hyperedges, found {len(body)}")

    edges, weights = [], []
    for lineno, line in body:
        tok = line.split()
        try:
            if fmt == 1:
                weights.append(float(tok[0]))
                tok = tok[1:]
            else:
                weights.append(1.0)
            ids = [int(t) - 1 for t in tok]
        except (ValueError, IndexError) as exc:
            raise InvalidHypergraph(f"line {lineno}: cannot parse {line!r}") from exc
        if not ids:
            raise InvalidHypergraph(f"line {lineno}: hyperedge without nodes")
        if min(ids) < 0 or max(ids) >= n:
            raise InvalidHypergraph(f"line {lineno}: node id outside 1..{n}")
        edges.append(ids)
    return n, edges, weights


def read_hmetis(path) -> tuple[int, list[list[int]], list[float]]:
    return parse_hmetis(Path(path).read_text())


def format_hmetis(n: int, edges, weights=None) -> str:
    weighted = weights is not None and any(w != 1 for w in weights)
    out = [f"{len(edges)} {n}" + (" 1" if weighted else "")]
    for i, e in enumerate(edges):
        ids = " ".join(str(v + 1) for v in e)
        out.append(f"{weights[i]:.17g} {ids}" if weighted else ids)
    return "\n".join(out) + "\n"


def write_hmetis(path, n: int, edges, weights=None) -> None:
    Path(path).write_text(format_hmetis(n, edges, weights))


def read_node_weights(path, n: int) -> np.ndarray:
    """One positive float per line."""
    vals = []
    for lineno, line in _content_lines(Path(path).read_text()):
        try:
            vals.append(float(line))
        except ValueError as exc:
            raise InvalidNodeWeights(f"line {lineno}: {line!r} is not a number") from exc
    if len(vals) != n:
        raise InvalidNodeWeights(f"expected {n} node weights, found {len(vals)}")
    arr = np.array(vals)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0):
        raise InvalidNodeWeights("positive node weight required for every node")
    return arr


def read_profile(path) -> tuple[float, ...]:
    """Custom splitting profile: whitespace or comma separated ``g(1), g(2), ...``."""
    text = Path(path).read_text()
    toks = " ".join(line for _, line in _content_lines(text)).replace(",", " ").split()
    try:
        return tuple(float(t) for t in toks)
    except ValueError as exc:
        raise InvalidHypergraph(f"custom splitting file {path}: {exc}") from exc
