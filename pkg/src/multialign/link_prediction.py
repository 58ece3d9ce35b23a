"""Adamic-Adar link prediction on a sentence graph.

Only positive edges define neighbourhoods; bottom-rated negative cells are
ignored.  Logs are natural logs.  Scores are computed for the rows of one
edition against the columns of another by walking two hops from each row
node, never for the full node x node matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .align_graph import SentenceGraph, _span

__all__ = ["ScoreMatrix", "adamic_adar", "weighted_adamic_adar"]


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    pair: tuple
    values: np.ndarray
    method: str  # "adad" | "wadad" | "nmf"

    def __post_init__(self):
        if self.values.ndim != 2:
            raise ValueError("score matrix must be 2-d")
        if self.values.size and not (self.values.min() >= 0):
            raise ValueError(f"{self.method} scores must be non-negative")

    @property
    def shape(self):
        return self.values.shape


def _block(graph: SentenceGraph, pair, weighted: bool) -> np.ndarray:
    (a0, a1), (b0, b1) = _span(graph, pair[0]), _span(graph, pair[1])
    return kernels.adamic_adar_block(
        graph.indptr, graph.indices, graph.weights, a0, a1, b0, b1, weighted
    )


def adamic_adar(graph: SentenceGraph, pair) -> ScoreMatrix:
    """Sum of ``1 / ln |N(z)|`` over common neighbours z of each (row, column) token pair."""
    if graph.mode == "weighted":
        raise ValueError("adamic_adar expects a binary or rated graph")
    return ScoreMatrix(tuple(pair), _block(graph, pair, False), "adad")


def weighted_adamic_adar(graph: SentenceGraph, pair) -> ScoreMatrix:
    """Sum of ``(w(x,z) + w(z,y)) / ln(1 + S(z))`` over common neighbours z.

    ``S(z)`` is the total weight of z's edges.  On a binary graph all
    weights are 1, which is how unscored alignments are handled.
    """
    if graph.mode == "rated":
        raise ValueError("weighted_adamic_adar expects a weighted or binary graph")
    return ScoreMatrix(tuple(pair), _block(graph, pair, True), "wadad")
