"""Per-verse multilingual alignment graph.

Every token of every edition in a verse becomes one node; nodes of one
edition occupy a contiguous index range.  Pairwise alignment edges become
symmetric cells of a node x node rating matrix:

* the diagonal holds the top rating,
* an aligned pair holds the top rating (``rated``), 1 (``binary``) or the
  aligner's score (``weighted``),
* with negative sampling, for each aligned ``x -> y`` one random non-partner
  ``z`` of ``y``'s edition gets the bottom rating,
* every other cell is absent, i.e. unobserved.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .corpus_io import AlignmentSet, EditionId, MultiSentence, TokenRef
from .seeding import derive_rng

__all__ = [
    "GraphError",
    "MODES",
    "RatingScale",
    "SentenceGraph",
    "Submatrix",
    "build_graph",
    "degree",
    "dump_graph",
    "target_submatrix",
]

MODES = ("binary", "rated", "weighted")


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class RatingScale:
    r_max: float = 5.0
    r_min: float = 1.0

    def __post_init__(self):
        if not self.r_max > self.r_min > 0:
            raise ValueError(f"need r_max > r_min > 0, got {self.r_max}, {self.r_min}")

    @property
    def midpoint(self) -> float:
        return (self.r_max + self.r_min) / 2


@dataclass(frozen=True, eq=False)
class SentenceGraph:
    verse_id: str
    nodes: tuple          # node id -> TokenRef
    tokens: tuple         # node id -> surface token
    spans: Mapping        # EditionId -> (start, stop)
    cells: Mapping        # (u, v) -> rating, both orientations, diagonal included
    positive: frozenset   # (u, v) with u < v
    negative: frozenset   # (u, v) with u < v
    mode: str
    scale: RatingScale
    indptr: np.ndarray    # CSR of positive off-diagonal edges
    indices: np.ndarray
    weights: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def node(self, ref: TokenRef) -> int:
        start, stop = self.spans[ref.edition]
        if not 0 <= ref.position < stop - start:
            raise GraphError(f"{ref} out of range in verse {self.verse_id}")
        return start + ref.position

    def neighbours(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def observed(self):
        """Observed cells as ``(rows, cols, values)`` arrays, sorted by (row, col)."""
        keys = sorted(self.cells)
        rows = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
        cols = np.fromiter((k[1] for k in keys), dtype=np.int64, count=len(keys))
        vals = np.fromiter((self.cells[k] for k in keys), dtype=np.float64, count=len(keys))
        return rows, cols, vals

    def dense(self) -> np.ndarray:
        out = np.zeros((self.n_nodes, self.n_nodes))
        for (u, v), val in self.cells.items():
            out[u, v] = val
        return out


def _node_table(sentence: MultiSentence):
    nodes, tokens, spans = [], [], {}
    for ed in sentence.editions:
        start = len(nodes)
        for pos, tok in enumerate(sentence.tokens[ed]):
            nodes.append(TokenRef(ed, pos))
            tokens.append(tok)
        spans[ed] = (start, len(nodes))
    return tuple(nodes), tuple(tokens), spans


def build_graph(
    sentence: MultiSentence,
    alignments: Iterable[AlignmentSet],
    scale: RatingScale = RatingScale(),
    mode: str = "rated",
    negative_sampling: bool = False,
    seed: int = 0,
    same_language_negatives: bool = False,
) -> SentenceGraph:
    """Build the rating graph of one verse from its pairwise alignment sets.

    ``same_language_negatives`` additionally draws, for every positive edge,
    one bottom-rated token from the source token's own edition.
    """
    if mode not in MODES:
        raise ValueError(f"unknown graph mode {mode!r}; expected one of {MODES}")
    nodes, tokens, spans = _node_table(sentence)
    verse = sentence.verse_id

    pos_weight = {}
    directed = []  # (x, y, target edition) in input order, for negative sampling
    for aset in sorted(alignments, key=lambda a: (a.pair[0], a.pair[1])):
        ea, eb = aset.pair
        if ea not in spans or eb not in spans:
            missing = ea if ea not in spans else eb
            raise GraphError(f"verse {verse}: pair {ea}/{eb} names edition {missing} absent from the verse")
        if ea == eb:
            raise GraphError(f"verse {verse}: alignment of edition {ea} with itself")
        (a0, a1), (b0, b1) = spans[ea], spans[eb]
        for (i, j), score in aset.edges.items():
            if i >= a1 - a0 or j >= b1 - b0:
                raise GraphError(
                    f"verse {verse}, pair {ea}/{eb}: edge {i}-{j} out of range "
                    f"({a1 - a0}x{b1 - b0} tokens)"
                )
            if mode == "binary":
                w = 1.0
            elif mode == "rated":
                w = scale.r_max
            else:
                w = 1.0 if score is None else float(score)
                if w == 0.0:
                    # zero similarity carries no link
                    continue
            x, y = a0 + i, b0 + j
            key = (x, y) if x < y else (y, x)
            pos_weight[key] = max(pos_weight.get(key, w), w)
            directed.append((x, y, eb))

    negatives = set()
    if negative_sampling and directed:
        partners = {}
        for u, v in pos_weight:
            partners.setdefault(u, set()).add(v)
            partners.setdefault(v, set()).add(u)
        rng = derive_rng(seed, "graph-negatives", verse)

        def draw(x, edition, exclude):
            start, stop = spans[edition]
            cands = [z for z in range(start, stop) if z not in exclude]
            if not cands:
                return
            z = cands[int(rng.integers(len(cands)))]
            key = (x, z) if x < z else (z, x)
            if key not in pos_weight:
                negatives.add(key)

        for x, y, eb in directed:
            draw(x, eb, partners.get(x, ()))
            if same_language_negatives:
                draw(x, nodes[x].edition, partners.get(x, set()) | {x})

    cells = {(u, u): scale.r_max for u in range(len(nodes))}
    for u, v in negatives:
        cells[(u, v)] = cells[(v, u)] = scale.r_min
    for (u, v), w in pos_weight.items():
        cells[(u, v)] = cells[(v, u)] = w

    adj = [[] for _ in nodes]
    for (u, v), w in sorted(pos_weight.items()):
        adj[u].append((v, w))
        adj[v].append((u, w))
    indptr = np.zeros(len(nodes) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(a) for a in adj])
    flat = [e for a in adj for e in sorted(a)]
    indices = np.array([e[0] for e in flat], dtype=np.int64)
    weights = np.array([e[1] for e in flat], dtype=np.float64)

    return SentenceGraph(
        verse_id=verse,
        nodes=nodes,
        tokens=tokens,
        spans=MappingProxyType(spans),
        cells=MappingProxyType(cells),
        positive=frozenset(pos_weight),
        negative=frozenset(negatives),
        mode=mode,
        scale=scale,
        indptr=indptr,
        indices=indices,
        weights=weights,
    )


def degree(graph: SentenceGraph, node: int) -> tuple[int, float]:
    """Number of positive neighbours of ``node`` and the sum of their edge weights."""
    if not 0 <= node < graph.n_nodes:
        raise GraphError(f"verse {graph.verse_id}: no node {node}")
    lo, hi = graph.indptr[node], graph.indptr[node + 1]
    return int(hi - lo), float(graph.weights[lo:hi].sum())


@dataclass(frozen=True, eq=False)
class Submatrix:
    pair: tuple
    values: np.ndarray  # |A| x |B| stored ratings, 0 where absent
    row_nodes: range
    col_nodes: range
    row_refs: tuple
    col_refs: tuple

    @property
    def shape(self):
        return self.values.shape


def _span(graph: SentenceGraph, edition: EditionId):
    try:
        return graph.spans[edition]
    except KeyError:
        raise GraphError(f"verse {graph.verse_id}: edition {edition} is absent") from None


def target_submatrix(graph: SentenceGraph, pair) -> Submatrix:
    (a0, a1), (b0, b1) = _span(graph, pair[0]), _span(graph, pair[1])
    values = np.zeros((a1 - a0, b1 - b0))
    for (u, v), val in graph.cells.items():
        if a0 <= u < a1 and b0 <= v < b1:
            values[u - a0, v - b0] = val
    return Submatrix(
        tuple(pair), values, range(a0, a1), range(b0, b1),
        graph.nodes[a0:a1], graph.nodes[b0:b1],
    )


def _label(graph, u):
    ref = graph.nodes[u]
    return f"{ref.edition.language}:{ref.edition.edition}:{ref.position}:{graph.tokens[u]}"


def dump_graph(graphs: Iterable[SentenceGraph], path) -> None:
    """Debug dump: ``# verse_id`` then ``node_u<TAB>node_v<TAB>rating`` for each stored u <= v cell."""
    with open(path, "w", encoding="utf-8") as f:
        f.write("node_u\tnode_v\trating\n")
        for g in graphs:
            f.write(f"# {g.verse_id}\n")
            for (u, v), val in sorted(g.cells.items()):
                if u <= v:
                    f.write(f"{_label(g, u)}\t{_label(g, v)}\t{val:g}\n")
