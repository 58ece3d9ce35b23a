"""Masked non-negative matrix factorization of a sentence rating matrix.

The rating matrix ``W`` is factored as ``T @ V`` with both factors
non-negative, fitting only the observed cells (diagonal, aligned pairs and
sampled negatives).  Updates are multiplicative with Tikhonov terms in the
denominators::

    t[u,k] <- t[u,k] * (W V^T)[u,k] / ((T V V^T)[u,k] + lam * m_u * t[u,k])
    v[k,i] <- v[k,i] * (T^T W)[k,i] / ((T^T T V)[k,i] + lam * n_i * v[k,i])

where every product runs over observed cells only and ``m_u`` / ``n_i`` are
the numbers of observed cells in row u / column i.  With ``lam = 0`` these
are the plain multiplicative updates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .align_graph import SentenceGraph, _span
from .link_prediction import ScoreMatrix
from .seeding import derive_rng

__all__ = [
    "FactorPair",
    "NmfConfig",
    "NumericError",
    "factorize",
    "factorize_cells",
    "masked_loss",
    "predict",
]

FLOOR = 1e-12


class NumericError(ArithmeticError):
    def __init__(self, epoch, message="non-finite factor values"):
        self.epoch = epoch
        super().__init__(f"{message} after epoch {epoch}")


@dataclass(frozen=True)
class NmfConfig:
    rank: int = 15
    epochs: int = 50
    reg: float = 0.06
    init_low: float = 0.0
    init_high: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not self.reg >= 0:
            raise ValueError("reg must be >= 0")
        if not 0 <= self.init_low < self.init_high:
            raise ValueError("need 0 <= init_low < init_high")


@dataclass(frozen=True, eq=False)
class FactorPair:
    T: np.ndarray  # (m, r)
    V: np.ndarray  # (r, n)
    epochs: int
    losses: tuple = ()

    def reconstruct(self) -> np.ndarray:
        return self.T @ self.V


def masked_loss(rows, cols, vals, T, V, reg) -> float:
    """Squared error on observed cells plus ``reg * (|T|^2 + |V|^2)``."""
    pred = np.einsum("ck,kc->c", T[rows], V[:, cols])
    return float(((vals - pred) ** 2).sum() + reg * ((T ** 2).sum() + (V ** 2).sum()))


def _init(shape, config: NmfConfig, rng):
    # draws in (low, high] so no factor starts at an absorbing zero
    return config.init_low + (config.init_high - config.init_low) * (1.0 - rng.random(shape))


def factorize_cells(
    rows,
    cols,
    vals,
    shape,
    config: NmfConfig = NmfConfig(),
    rng: Optional[np.random.Generator] = None,
    track_loss: bool = False,
    on_epoch: Optional[Callable[[int, np.ndarray, np.ndarray], None]] = None,
) -> FactorPair:
    """Factor a sparse matrix given by its observed cells.

    ``on_epoch(epoch, T, V)`` is called after every epoch with read-only
    views, which the tests use to watch non-negativity.
    """
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    cols = np.ascontiguousarray(cols, dtype=np.int64)
    vals = np.ascontiguousarray(vals, dtype=np.float64)
    if len(vals) == 0:
        raise ValueError("nothing observed to factor")
    m, n = shape
    if rng is None:
        rng = derive_rng(config.seed, "nmf-init")
    T = np.ascontiguousarray(_init((m, config.rank), config, rng))
    Vt = np.ascontiguousarray(_init((config.rank, n), config, rng).T)
    row_counts = np.bincount(rows, minlength=m).astype(np.float64)
    col_counts = np.bincount(cols, minlength=n).astype(np.float64)

    losses = [masked_loss(rows, cols, vals, T, Vt.T, config.reg)] if track_loss else []
    for epoch in range(1, config.epochs + 1):
        kernels.nmf_epoch(rows, cols, vals, T, Vt, row_counts, col_counts, config.reg, FLOOR)
        if not (np.isfinite(T).all() and np.isfinite(Vt).all()):
            raise NumericError(epoch)
        if track_loss:
            losses.append(masked_loss(rows, cols, vals, T, Vt.T, config.reg))
        if on_epoch is not None:
            T.flags.writeable = Vt.flags.writeable = False
            try:
                on_epoch(epoch, T, Vt.T)
            finally:
                T.flags.writeable = Vt.flags.writeable = True
    return FactorPair(T, np.ascontiguousarray(Vt.T), config.epochs, tuple(losses))


def factorize(graph: SentenceGraph, config: NmfConfig = NmfConfig(), **kwargs) -> FactorPair:
    """Factor the rating matrix of a graph built in ``rated`` mode."""
    if graph.mode != "rated":
        raise ValueError(f"NMF needs a rated graph, got mode {graph.mode!r}")
    if config.rank >= graph.n_nodes:
        raise ValueError(
            f"verse {graph.verse_id}: rank {config.rank} must be below the node count {graph.n_nodes}"
        )
    rows, cols, vals = graph.observed()
    rng = derive_rng(config.seed, "nmf-init", graph.verse_id)
    return factorize_cells(rows, cols, vals, (graph.n_nodes, graph.n_nodes), config, rng=rng, **kwargs)


def predict(factors: FactorPair, graph: SentenceGraph, pair) -> ScoreMatrix:
    """Predicted ratings between two editions: the mean of ``TV`` and its transpose, clipped to [0, r_max]."""
    (a0, a1), (b0, b1) = _span(graph, pair[0]), _span(graph, pair[1])
    T, V = factors.T, factors.V
    if T.shape[0] != graph.n_nodes or V.shape[1] != graph.n_nodes:
        raise ValueError("factors do not match the graph")
    ab = T[a0:a1] @ V[:, b0:b1]
    ba = T[b0:b1] @ V[:, a0:a1]
    return ScoreMatrix(tuple(pair), np.clip((ab + ba.T) / 2, 0.0, graph.scale.r_max), "nmf")
