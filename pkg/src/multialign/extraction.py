"""Turning score matrices into alignment edges, and the end-to-end pipeline.

For each verse: build the multilingual graph from the initial alignments,
score the target edition pair (Adamic-Adar, weighted Adamic-Adar or NMF),
keep mutual-argmax cells, and add them to the baseline alignment.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

import numpy as np

from .align_graph import RatingScale, build_graph, target_submatrix
from .corpus_io import AlignmentSet
from .link_prediction import ScoreMatrix, adamic_adar, weighted_adamic_adar
from .nmf import NmfConfig, NumericError, factorize, predict

__all__ = [
    "METHODS",
    "ExtractionConfig",
    "PipelineError",
    "PipelineSpec",
    "argmax_extract",
    "merge",
    "oriented_set",
    "run_pipeline",
]

log = logging.getLogger(__name__)

METHODS = ("adad", "wadad", "nmf")
TIE_BREAKS = ("lowest-index", "drop-ties")
_GRAPH_MODE = {"adad": "binary", "wadad": "weighted", "nmf": "rated"}


class PipelineError(ValueError):
    pass


@dataclass(frozen=True)
class ExtractionConfig:
    """``min_score=None`` means the method default: 0 for Adamic-Adar, the rating midpoint for NMF."""

    min_score: Optional[float] = None
    tie_break: str = "lowest-index"

    def __post_init__(self):
        if self.min_score is not None and not self.min_score >= 0:
            raise ValueError("min_score must be >= 0")
        if self.tie_break not in TIE_BREAKS:
            raise ValueError(f"tie_break must be one of {TIE_BREAKS}")

    def threshold(self, method: str, scale: RatingScale = RatingScale()) -> float:
        if self.min_score is not None:
            return self.min_score
        return scale.midpoint if method == "nmf" else 0.0


def argmax_extract(
    scores: ScoreMatrix,
    config: ExtractionConfig = ExtractionConfig(),
    verse_id: str = "",
    scale: RatingScale = RatingScale(),
) -> AlignmentSet:
    """Cells that are the maximum of both their row and their column, above the threshold."""
    S = scores.values
    tau = config.threshold(scores.method, scale)
    if S.size == 0:
        return AlignmentSet(verse_id, scores.pair, {})
    row_arg = S.argmax(axis=1)
    col_arg = S.argmax(axis=0)
    row_max = S[np.arange(S.shape[0]), row_arg]
    col_max = S[col_arg, np.arange(S.shape[1])]
    if config.tie_break == "drop-ties":
        row_ok = (S == row_max[:, None]).sum(axis=1) == 1
        col_ok = (S == col_max[None, :]).sum(axis=0) == 1
    else:
        row_ok = np.ones(S.shape[0], bool)
        col_ok = np.ones(S.shape[1], bool)
    edges = {}
    for i, j in enumerate(row_arg):
        if row_ok[i] and col_ok[j] and col_arg[j] == i and S[i, j] > tau:
            edges[(i, int(j))] = float(S[i, j])
    return AlignmentSet(verse_id, scores.pair, edges)


def merge(baseline: AlignmentSet, predicted: AlignmentSet) -> AlignmentSet:
    """Union of both sets; baseline scores win and predicted-only edges are flagged as added."""
    if tuple(baseline.pair) != tuple(predicted.pair):
        raise PipelineError(f"cannot merge pair {predicted.pair} into {baseline.pair}")
    if baseline.verse_id != predicted.verse_id:
        raise PipelineError(f"cannot merge verse {predicted.verse_id} into {baseline.verse_id}")
    edges = dict(baseline.edges)
    added = set(baseline.added)
    for e, s in predicted.edges.items():
        if e not in edges:
            edges[e] = s
            added.add(e)
    return AlignmentSet(baseline.verse_id, baseline.pair, edges, frozenset(added))


def oriented_set(sets: Mapping, a, b, verse_id):
    """The alignment set of ``verse_id`` for pair (a, b), transposing a (b, a) entry."""
    if (a, b) in sets:
        return sets[(a, b)].get(verse_id)
    if (b, a) in sets:
        s = sets[(b, a)].get(verse_id)
        return None if s is None else s.transposed()
    return None


@dataclass
class PipelineSpec:
    """Everything a pipeline run needs besides the target pair and edition subset.

    ``initial`` maps edition pairs to ``{verse_id: AlignmentSet}`` and feeds
    the graph.  ``baseline`` is the target pair's alignment that predictions
    are added to; when omitted the target pair's initial alignment is used.
    """

    corpus: Mapping
    initial: Mapping
    method: str = "adad"
    baseline: Optional[Mapping] = None
    scale: RatingScale = field(default_factory=RatingScale)
    nmf: NmfConfig = field(default_factory=NmfConfig)
    extraction: ExtractionConfig = field(default_factory=ExtractionConfig)
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")

    def run(self, target, editions=None) -> dict:
        return run_pipeline(
            self.corpus, self.initial, target, self.method, baseline=self.baseline,
            editions=editions, scale=self.scale, nmf_config=self.nmf,
            extraction=self.extraction, seed=self.seed, jobs=self.jobs,
        )


def _score(method, graph, target, nmf_config: NmfConfig):
    if method == "adad":
        return adamic_adar(graph, target)
    if method == "wadad":
        return weighted_adamic_adar(graph, target)
    rank = min(nmf_config.rank, graph.n_nodes - 1)
    if rank < 1:
        return ScoreMatrix(tuple(target), np.zeros(target_submatrix(graph, target).shape), "nmf")
    if rank != nmf_config.rank:
        log.debug("verse %s: rank lowered to %d for %d nodes", graph.verse_id, rank, graph.n_nodes)
        nmf_config = replace(nmf_config, rank=rank)
    return predict(factorize(graph, nmf_config), graph, target)


def _predict_verse(task):
    sentence, sets, target, method, scale, nmf_config, extraction, seed, baseline = task
    graph = build_graph(
        sentence, sets, scale, mode=_GRAPH_MODE[method],
        negative_sampling=(method == "nmf"), seed=seed,
    )
    scores = _score(method, graph, target, nmf_config)
    predicted = argmax_extract(scores, extraction, sentence.verse_id, scale)
    return merge(baseline, predicted)


def run_pipeline(
    corpus: Mapping,
    initial: Mapping,
    target,
    method: str,
    baseline: Optional[Mapping] = None,
    *,
    editions=None,
    scale: RatingScale = RatingScale(),
    nmf_config: NmfConfig = NmfConfig(),
    extraction: ExtractionConfig = ExtractionConfig(),
    seed: int = 0,
    jobs: int = 1,
) -> dict:
    """Predict and merge new target-pair edges for every verse that has both target editions.

    Returns ``{verse_id: AlignmentSet}`` in sorted verse order.  Verses that
    lack a target edition keep their baseline unchanged.  A verse whose
    prediction fails numerically is logged and falls back to its baseline.
    """
    if method not in METHODS:
        raise PipelineError(f"method must be one of {METHODS}, got {method!r}")
    a, b = target = tuple(target)
    if baseline is None:
        baseline = {}
        for v in corpus:
            s = oriented_set(initial, a, b, v)
            if s is not None:
                baseline[v] = s
    keep = None if editions is None else set(editions) | {a, b}
    nmf_config = replace(nmf_config, seed=seed)

    tasks, out = [], {}
    for v in sorted(set(corpus) | set(baseline)):
        base = baseline.get(v)
        if base is not None and tuple(base.pair) != target:
            base = base.transposed() if tuple(base.pair) == (b, a) else None
            if base is None:
                raise PipelineError(f"verse {v}: baseline pair does not match target {a}/{b}")
        sent = corpus.get(v)
        if sent is None or a not in sent.tokens or b not in sent.tokens:
            if base is not None:
                out[v] = base
            continue
        if keep is not None:
            sent = sent.restrict(keep)
        eds = sent.editions
        sets = []
        for i, e1 in enumerate(eds):
            for e2 in eds[i + 1:]:
                s = oriented_set(initial, e1, e2, v)
                if s is not None:
                    sets.append(s)
        base = base if base is not None else AlignmentSet(v, target, {})
        tasks.append((sent, sets, target, method, scale, nmf_config, extraction, seed, base))
    if not tasks:
        raise PipelineError(f"no verse contains both target editions {a} and {b}")

    def results():
        if jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                yield from pool.map(_safe_predict, tasks, chunksize=max(1, len(tasks) // (4 * jobs)))
        else:
            yield from map(_safe_predict, tasks)

    for task, merged in zip(tasks, results()):
        out[task[0].verse_id] = merged
    return dict(sorted(out.items()))


def _safe_predict(task):
    try:
        return _predict_verse(task)
    except (NumericError, FloatingPointError) as exc:
        log.warning("verse %s: prediction failed (%s); keeping baseline", task[0].verse_id, exc)
        return task[-1]
