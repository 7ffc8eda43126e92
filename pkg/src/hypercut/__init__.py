"""Hypergraph pi-expansion: generalized cuts, a cut-matching solver with certified lower bounds, and baselines."""
from .cebaseline import CliqueExpansion, expand, sweep_cut
from .cutmatch import CutMatchState, IterationRecord, approx_ratio, lower_bound, run
from .embed import (
    AuxiliaryGraph,
    BipartiteCertificate,
    CutOrEmbed,
    build_auxiliary,
    flow_embed,
    hyper_cut_or_embed,
    refine_cut_or_embed,
    verify_embedding,
)
from .errors import *  # noqa: F401,F403
from .hmetis import parse_hmetis, read_hmetis, write_hmetis
from .hypercore import (
    Hypergraph,
    NodeWeights,
    Problem,
    SplittingFamily,
    SplittingFunction,
    cut_value,
    generalized_degrees,
    make_splitting,
    pi_expansion,
    prepare,
)
from .maxflow import FlowNetwork, FlowResult, PathDecomposition, decompose, max_flow
from .oracle import brute_min_expansion, brute_min_st_cut, brute_preserver_check
from .reduction import Gadget, ReducedGraph, build_preserver, decompose_gadgets, gadget_mincut

__version__ = "0.1.0"
