"""Alignment quality against sure/possible gold links, and the analysis runs.

Counts are pooled over verses before ratios are taken (micro average).
Precision is measured against the possible links, recall against the sure
links, and AER is ``1 - (|A&S| + |A&P|) / (|A| + |S|)``.
"""

from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .corpus_io import EditionId
from .extraction import oriented_set
from .seeding import derive_rng

__all__ = [
    "BIN_EDGES",
    "EvalResult",
    "Stratum",
    "StratumReport",
    "evaluate",
    "language_ablation",
    "score_verse",
    "stratify",
]

BIN_EDGES = (0.2, 0.4, 0.6, 0.8)


@dataclass(frozen=True)
class EvalResult:
    n_hyp: int = 0
    n_sure: int = 0
    n_possible: int = 0
    hits_sure: int = 0
    hits_possible: int = 0

    def __add__(self, other: "EvalResult") -> "EvalResult":
        return EvalResult(
            self.n_hyp + other.n_hyp,
            self.n_sure + other.n_sure,
            self.n_possible + other.n_possible,
            self.hits_sure + other.hits_sure,
            self.hits_possible + other.hits_possible,
        )

    @property
    def precision(self) -> float:
        return self.hits_possible / self.n_hyp if self.n_hyp else 1.0

    @property
    def recall(self) -> float:
        return self.hits_sure / self.n_sure if self.n_sure else 1.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    @property
    def aer(self) -> float:
        denom = self.n_hyp + self.n_sure
        return 1.0 - (self.hits_sure + self.hits_possible) / denom if denom else 0.0

    def as_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "aer": self.aer,
            "n_hyp": self.n_hyp,
            "n_sure": self.n_sure,
            "n_possible": self.n_possible,
            "hits_sure": self.hits_sure,
            "hits_possible": self.hits_possible,
        }


def score_verse(hyp: Iterable, sure: Iterable, possible: Iterable = None) -> EvalResult:
    A = {tuple(e[:2]) for e in hyp}
    S = {tuple(e) for e in sure}
    P = S if possible is None else {tuple(e) for e in possible} | S
    return EvalResult(len(A), len(S), len(P), len(A & S), len(A & P))


def evaluate(hypothesis: Mapping, gold: Mapping) -> tuple[EvalResult, dict]:
    """Score ``{verse: AlignmentSet}`` against ``{verse: GoldStandard}``.

    Every gold verse is evaluated (a missing hypothesis counts as empty);
    hypothesis verses without gold are skipped with a warning.
    """
    if not gold:
        raise ValueError("nothing to evaluate: gold standard is empty")
    extra = set(hypothesis) - set(gold)
    if extra:
        warnings.warn(f"{len(extra)} hypothesis verse(s) have no gold and are skipped", stacklevel=2)
    per_verse = {}
    total = EvalResult()
    for v in sorted(gold):
        g = gold[v]
        h = hypothesis.get(v)
        res = score_verse(h.edges if h is not None else (), g.sure, g.possible)
        per_verse[v] = res
        total = total + res
    return total, per_verse


@dataclass(frozen=True)
class Stratum:
    lo: float
    hi: float
    n: int
    baseline_f1: float
    merged_f1: float

    @property
    def label(self) -> str:
        return f"{'[' if self.lo == 0 else '('}{self.lo:g},{self.hi:g}]"

    @property
    def improvement(self) -> float:
        return self.merged_f1 - self.baseline_f1


@dataclass(frozen=True)
class StratumReport:
    strata: tuple

    @property
    def total(self) -> int:
        return sum(s.n for s in self.strata)


def f1_bin(f1: float) -> int:
    """Index of the baseline-F1 bin: [0,.2], (.2,.4], (.4,.6], (.6,.8], (.8,1]."""
    return bisect.bisect_left(BIN_EDGES, f1)


def stratify(baseline: Mapping, merged: Mapping) -> StratumReport:
    """Bin verses by baseline F1 and compare mean F1 before and after in each bin."""
    if set(baseline) != set(merged):
        diff = sorted(set(baseline) ^ set(merged))
        raise ValueError(f"verse sets differ: {diff[:20]}{' ...' if len(diff) > 20 else ''}")
    bins = [[] for _ in range(len(BIN_EDGES) + 1)]
    for v in sorted(baseline):
        bins[f1_bin(baseline[v].f1)].append(v)
    edges = (0.0,) + BIN_EDGES + (1.0,)
    strata = []
    for k, verses in enumerate(bins):
        if verses:
            b = math.fsum(baseline[v].f1 for v in verses) / len(verses)
            m = math.fsum(merged[v].f1 for v in verses) / len(verses)
        else:
            b = m = math.nan
        strata.append(Stratum(edges[k], edges[k + 1], len(verses), b, m))
    return StratumReport(tuple(strata))


def _f1_of(spec, target, gold, editions) -> float:
    merged = spec.run(target, editions=editions)
    return evaluate(merged, gold)[0].f1


def _baseline_map(spec, target):
    if spec.baseline is not None:
        return spec.baseline
    out = {}
    for v in spec.corpus:
        s = oriented_set(spec.initial, target[0], target[1], v)
        if s is not None:
            out[v] = s
    return out


def language_ablation(
    spec,
    target,
    pool: Sequence[EditionId],
    gold: Mapping,
    sizes: Optional[Sequence[int]] = None,
    leave_one_in: bool = False,
    seed: int = 0,
    allow_target_languages: bool = False,
) -> list:
    """F1 as a function of the auxiliary editions available to the graph.

    With ``sizes``, returns ``[(n, f1), ...]``; subsets are prefixes of one
    seeded permutation of the pool, so larger subsets contain smaller ones.
    With ``leave_one_in``, returns ``[(edition, delta_f1), ...]`` sorted by
    decreasing gain of the trilingual run over the baseline alignment.
    """
    target = tuple(target)
    pool = list(dict.fromkeys(pool))
    target_langs = {e.language for e in target}
    for ed in pool:
        if ed in target:
            raise ValueError(f"auxiliary pool contains target edition {ed}")
        if not allow_target_languages and ed.language in target_langs:
            raise ValueError(
                f"auxiliary edition {ed} shares a language with the target pair "
                "(pass allow_target_languages to permit this)"
            )
    if sizes is None and not leave_one_in:
        raise ValueError("give sizes or leave_one_in")

    if leave_one_in:
        base_f1 = evaluate(_baseline_map(spec, target), gold)[0].f1
        rows = [(ed, _f1_of(spec, target, gold, [ed]) - base_f1) for ed in pool]
        return sorted(rows, key=lambda r: (-r[1], r[0]))

    for n in sizes:
        if not 0 <= n <= len(pool):
            raise ValueError(f"subset size {n} outside 0..{len(pool)}")
    order = derive_rng(seed, "ablation-subsets").permutation(len(pool))
    shuffled = [pool[i] for i in order]
    return [(n, _f1_of(spec, target, gold, shuffled[:n])) for n in sizes]
