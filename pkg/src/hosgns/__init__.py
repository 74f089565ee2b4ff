"""Disentangled node and time embeddings for time-varying graphs.

Learns factor matrices for nodes and time slices by higher-order skip-gram
with negative sampling (implicit CP factorization of a shifted-PMI tensor),
and evaluates them on epidemic-state classification and temporal event
reconstruction.
"""

__version__ = "0.1.0"

from hosgns.temporal_graph import Event, TimeVaryingGraph, parse_contact_lines
from hosgns.supra import SupraGraph, WalkConfig, build_supra
from hosgns.cooccurrence import (
    CooccurrenceTensor,
    stat_tensor,
    dyn_tensor,
    statdyn_tensor,
)
from hosgns.training import EmbeddingSet, TrainConfig, train

__all__ = [
    "Event",
    "TimeVaryingGraph",
    "parse_contact_lines",
    "SupraGraph",
    "WalkConfig",
    "build_supra",
    "CooccurrenceTensor",
    "stat_tensor",
    "dyn_tensor",
    "statdyn_tensor",
    "EmbeddingSet",
    "TrainConfig",
    "train",
]
