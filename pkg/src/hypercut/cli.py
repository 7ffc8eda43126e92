"""Command-line front end.

Every subcommand prints one JSON document on stdout and a short human
summary on stderr. Node ids in reports are 1-based like the hMETIS input.
Exit codes: 0 success, 2 input or validation error, 3 internal bound
exceeded (including a failed certificate replay), 4 eigensolver failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from . import cebaseline, cutmatch, oracle
from .embed import BipartiteCertificate, mirror_arcs, verify_embedding
from .errors import EigenNoConvergence, HypercutError, InternalBoundExceeded
from .hmetis import read_hmetis, read_node_weights, read_profile
from .hypercore import Problem, SplittingFamily, prepare
from .maxflow import FlowPath
from .reduction import ReducedGraph, build_preserver

log = logging.getLogger("hypercut")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BOUND = 3
EXIT_EIGEN = 4

# quantities that carry the units of the pi-expansion
_PHI_FIELDS = ("alpha", "phi", "bound", "lower_bound", "best_phi")


class Loaded:
    def __init__(self, args):
        self.path = args.input
        n, edges, weights = read_hmetis(args.input)
        self.n, self.edges = n, edges
        sizes = [len(e) for e in edges]
        self.stats = {
            "path": str(args.input),
            "n": n,
            "m": len(edges),
            "avg_edge_size": float(np.mean(sizes)) if sizes else 0.0,
            "mu": int(sum(sizes)),
        }
        self.family = parse_splitting(args.splitting)
        self.objective = args.weights
        node_weights = parse_weights(args.weights, n)
        self.problem: Problem = prepare(n, edges, self.family, weights, node_weights)
        H = self.problem.hypergraph
        self.stats["n_used"] = H.n
        self.stats["m_used"] = H.m

    def header(self) -> dict:
        return {
            "input": self.stats,
            "objective": self.objective,
            "splitting": str(self.family),
        }

    def ids(self, S) -> list[int]:
        return [v + 1 for v in self.problem.input_set(S)]


def parse_splitting(text: str) -> SplittingFamily:
    kind, _, arg = text.partition(":")
    if kind.strip().lower() == "custom":
        profile = read_profile(arg)
        family = SplittingFamily("custom", profile)
        # reject a bad profile even if no hyperedge is large enough to hit it
        for k in range(2, 2 * len(profile) + 2):
            family(k)
        return family
    try:
        return SplittingFamily.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def parse_weights(text: str, n: int):
    if text in ("unit", "degree"):
        return text
    if text.startswith("file:"):
        return read_node_weights(text[5:], n)
    raise argparse.ArgumentTypeError(f"--weights must be unit, degree or file:PATH, got {text!r}")


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _record(rec: cutmatch.IterationRecord, scale: float, loaded: Loaded) -> dict:
    out = rec.as_dict()
    for k in _PHI_FIELDS:
        out[k] = out[k] * scale
    out["gamma"] = out["gamma"] / scale
    out["R"] = loaded.ids(rec.R)
    return {k: _num(v) if isinstance(v, float) else v for k, v in out.items()}


def _certificate_json(cert: BipartiteCertificate) -> dict:
    return {
        "alpha": cert.alpha,
        "eta": cert.eta,
        "R": [int(v) for v in np.flatnonzero(cert.R)],
        "paths": [[p.amount, [int(v) for v in p.nodes]] for p in cert.paths],
    }


def _certificate_from_json(d: dict, G: ReducedGraph) -> BipartiteCertificate:
    idx = G.arc_index()
    R = np.zeros(G.n, dtype=bool)
    R[d["R"]] = True
    paths = []
    for amount, nodes in d["paths"]:
        arcs = tuple(idx[(u, v)] for u, v in zip(nodes[:-1], nodes[1:]))
        paths.append(FlowPath(tuple(nodes), arcs, float(amount)))
    rows = [p.nodes[0] for p in paths]
    cols = [p.nodes[-1] for p in paths]
    M = sp.csr_matrix(([p.amount for p in paths], (rows, cols)), shape=(G.n, G.n))
    return BipartiteCertificate(M, R, float(d["alpha"]), float(d["eta"]), tuple(paths))


def _emit(report: dict, summary: list[str]) -> None:
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    for line in summary:
        print(line, file=sys.stderr)


def cmd_solve(args) -> int:
    tic = time.perf_counter()
    loaded = Loaded(args)
    P = loaded.problem
    H, pi = P.hypergraph, P.pi
    scale = P.to_input_scale(1.0)
    t_max = cutmatch.default_iterations(H.n) if args.iters == "auto" else int(args.iters)
    G = build_preserver(H)
    if args.dump_reduced:
        Path(args.dump_reduced).write_text(G.edge_list())
    verify_n = args.verify_embeddings or 0

    def progress(rec):
        log.info("iteration %d: phi %.6g, lower bound %.6g", rec.iteration, rec.phi * scale, rec.lower_bound * scale)

    state = cutmatch.run(
        H, pi, t_max=t_max, seed=args.seed, cut_player=args.cut_player, G=G,
        keep_certificates=verify_n > 0, verify_bisections=verify_n, on_iteration=progress,
    )
    trace = [_record(r, scale, loaded) for r in state.records]
    if args.trace:
        with open(args.trace, "w") as fh:
            for i, row in enumerate(trace):
                row = dict(row)
                if verify_n > 0:
                    row["certificate"] = _certificate_json(state.certificates[i])
                fh.write(json.dumps(row) + "\n")
    if args.dump_flow and state.last_flow is not None:
        net, flow = state.last_flow
        with open(args.dump_flow, "w") as fh:
            for u, v, c, f in zip(net.tails, net.heads, net.caps, flow.flow):
                fh.write(f"{u} {v} {c:.17g} {f:.17g}\n")
    if args.figures:
        from .plotting import plot_trace

        plot_trace(trace, args.figures, title=Path(args.input).name)

    phi = P.to_input_scale(state.best_phi)
    lower = P.to_input_scale(state.lower)
    report = loaded.header() | {
        "seed": args.seed,
        "cut_player": args.cut_player,
        "iterations": t_max,
        "best_set": loaded.ids(state.best_set),
        "phi": _num(phi),
        "lower_bound": _num(lower),
        "rho": _num(cutmatch.approx_ratio(state)),
        "rho_t": trace[-1]["rho"] if trace else None,
    }
    if verify_n > 0:
        report["max_congestion_ratio"] = max(r.max_congestion_ratio for r in state.records)
    if args.report_trace:
        report["trace"] = trace
    report["wall_time"] = time.perf_counter() - tic
    _emit(report, [
        f"n={H.n} m={H.m} splitting={loaded.family} objective={args.weights}",
        f"best set: {len(report['best_set'])} nodes, phi = {phi:.6g}",
        f"lower bound {lower:.6g}, ratio {report['rho']}",
        f"{t_max} iterations in {report['wall_time']:.2f}s",
    ])
    return EXIT_OK


def cmd_oracle(args) -> int:
    tic = time.perf_counter()
    loaded = Loaded(args)
    P = loaded.problem
    opt, S = oracle.brute_min_expansion(P.hypergraph, P.pi)
    report = {"opt": P.to_input_scale(opt), "set": loaded.ids(S)}
    report["wall_time"] = time.perf_counter() - tic
    _emit(report, [f"exact optimum {report['opt']:.6g} on {len(S)} nodes"])
    return EXIT_OK


def cmd_ce(args) -> int:
    tic = time.perf_counter()
    loaded = Loaded(args)
    P = loaded.problem
    ce = cebaseline.expand(P.hypergraph)
    S, phi = cebaseline.sweep_cut(ce, P.hypergraph, P.pi, args.normalization)
    report = loaded.header() | {
        "normalization": args.normalization,
        "best_set": loaded.ids(S),
        "set": loaded.ids(S),
        "phi": P.to_input_scale(phi),
        "max_distortion": ce.max_distortion,
    }
    report["wall_time"] = time.perf_counter() - tic
    _emit(report, [f"clique-expansion sweep: phi = {report['phi']:.6g}, distortion <= {ce.max_distortion:.4g}"])
    return EXIT_OK


def cmd_reduce(args) -> int:
    loaded = Loaded(args)
    G = build_preserver(loaded.problem.hypergraph)
    if args.dump_reduced:
        Path(args.dump_reduced).write_text(G.edge_list())
    report = loaded.header() | {
        "nodes": G.N,
        "arcs": G.n_arcs,
        "gadgets": len(G.gadgets),
        "node_ids": [int(v) + 1 for v in loaded.problem.node_ids],
    }
    _emit(report, [f"cut preserver: {G.N} nodes, {G.n_arcs} arcs, {len(G.gadgets)} gadgets"])
    return EXIT_OK


def cmd_verify(args) -> int:
    loaded = Loaded(args)
    G = build_preserver(loaded.problem.hypergraph)
    pi = loaded.problem.pi
    mirror = mirror_arcs(G)
    rng = np.random.default_rng(args.seed)
    rows = []
    with open(args.trace) as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            if "certificate" not in rec:
                continue
            cert = _certificate_from_json(rec["certificate"], G)
            worst = 0.0
            for _ in range(args.bisections):
                S = rng.random(G.n) < 0.5
                worst = max(worst, verify_embedding(G, cert, S, mirror) * cert.alpha)
            reg = cert.regularity_error(pi)
            rows.append({
                "iteration": rec["iteration"],
                "max_congestion_ratio": worst,
                "regularity_error": reg,
                "ok": bool(worst <= 1 + 1e-9 and reg <= 1e-9),
            })
    if not rows:
        raise HypercutError(f"{args.trace} holds no certificates; rerun solve with --verify-embeddings")
    ok = all(r["ok"] for r in rows)
    report = {"bisections": args.bisections, "seed": args.seed, "ok": ok, "iterations": rows}
    _emit(report, [f"replayed {len(rows)} certificates: {'all within bound' if ok else 'BOUND EXCEEDED'}"])
    return EXIT_OK if ok else EXIT_BOUND


def _iters(text: str) -> str:
    if text == "auto":
        return text
    if not text.isdigit() or int(text) < 1:
        raise argparse.ArgumentTypeError("--iters takes a positive integer or 'auto'")
    return text


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hypercut", description="Hypergraph pi-expansion via cut-matching.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, weights=True):
        p.add_argument("--input", required=True, help="hypergraph in hMETIS format")
        p.add_argument("--splitting", default="aon", help="aon | delta-linear:D | limi:A | custom:PATH")
        if weights:
            p.add_argument("--weights", default="unit", help="unit | degree | file:PATH")
        else:
            p.set_defaults(weights="unit")

    p = sub.add_parser("solve", help="run the cut-matching solver")
    common(p)
    p.add_argument("--iters", type=_iters, default="auto", help="N or auto (ceil(5 log2 n))")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cut-player", choices=cutmatch.CUT_PLAYERS, default="spectral")
    p.add_argument("--verify-embeddings", type=int, nargs="?", const=20, default=0, metavar="N",
                   help="replay each certificate on N random bisections (default 20)")
    p.add_argument("--trace", help="write per-iteration records as JSON lines")
    p.add_argument("--report-trace", action="store_true", help="embed the trace in the report")
    p.add_argument("--dump-reduced", help="write the cut preserver as 'u v w' lines")
    p.add_argument("--dump-flow", help="write the last flow as 'u v cap flow' lines")
    p.add_argument("--figures", help="directory for PNG figures and trace.csv")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="exact optimum by enumeration (small n)")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="replay saved certificates against random bisections")
    common(p)
    p.add_argument("--trace", required=True, help="trace written by solve --verify-embeddings")
    p.add_argument("--bisections", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ce", help="clique-expansion spectral baseline")
    common(p)
    p.add_argument("--normalization", choices=cebaseline.NORMALIZATIONS, default="graph")
    p.set_defaults(func=cmd_ce)

    p = sub.add_parser("reduce", help="build the cut preserver")
    common(p, weights=False)
    p.add_argument("--dump-reduced", help="write the cut preserver as 'u v w' lines")
    p.set_defaults(func=cmd_reduce)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except InternalBoundExceeded as exc:
        print(f"error: InternalBoundExceeded: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except EigenNoConvergence as exc:
        print(f"error: EigenNoConvergence: {exc}", file=sys.stderr)
        return EXIT_EIGEN
    except (HypercutError, ValueError, OSError, argparse.ArgumentTypeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
