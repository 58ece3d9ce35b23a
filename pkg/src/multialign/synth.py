"""Synthetic multiparallel corpora with known gold alignments.

Each verse expresses K concepts.  A concept surfaces in each language with
probability ``coverage`` as one or more fresh tokens named
``c{concept}_l{language}``; tokens of a language are shuffled.  Gold links
join every pair of tokens that express the same concept in two languages,
so each concept forms a clique across languages.  Observed alignments are
the gold links with random drops (``p_drop`` on the target pair, ``p_aux``
elsewhere) plus Poisson-many spurious cross-concept links.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from .corpus_io import (
    AlignmentSet,
    EditionId,
    GoldStandard,
    MultiSentence,
    write_alignments,
    write_corpus,
    write_gold,
)
from .seeding import derive_rng

__all__ = ["RecoveryReport", "SynthConfig", "SynthInstance", "generate", "score_recovery"]


@dataclass(frozen=True)
class SynthConfig:
    n_languages: int = 4
    n_verses: int = 10
    concepts: int = 8
    coverage: float = 1.0
    p_drop: float = 0.0
    p_aux: float = 0.0
    p_noise: float = 0.0
    fertility: int = 1
    p_drop_max: Optional[float] = None  # per-verse target drop rate ~ U(p_drop, p_drop_max)
    seed: int = 0

    def __post_init__(self):
        if self.n_languages < 2:
            raise ValueError("need at least 2 languages")
        if self.n_verses < 0 or self.concepts < 1 or self.fertility < 1:
            raise ValueError("n_verses >= 0, concepts >= 1 and fertility >= 1 required")
        if not 0 < self.coverage <= 1:
            raise ValueError("coverage must be in (0, 1]")
        for name in ("p_drop", "p_aux"):
            if not 0 <= getattr(self, name) < 1:
                raise ValueError(f"{name} must be in [0, 1)")
        if self.p_drop_max is not None and not self.p_drop <= self.p_drop_max < 1:
            raise ValueError("p_drop_max must be in [p_drop, 1)")
        if not self.p_noise >= 0:
            raise ValueError("p_noise must be >= 0")

    @property
    def editions(self) -> tuple:
        return tuple(EditionId(f"s{k:02d}", "syn") for k in range(self.n_languages))

    @property
    def target(self) -> tuple:
        return self.editions[0], self.editions[1]


@dataclass(eq=False)
class SynthInstance:
    config: SynthConfig
    corpus: dict                                 # verse -> MultiSentence
    gold: dict = field(default_factory=dict)     # pair -> verse -> frozenset of links
    observed: dict = field(default_factory=dict)  # pair -> verse -> AlignmentSet
    dropped: dict = field(default_factory=dict)   # pair -> verse -> frozenset
    spurious: dict = field(default_factory=dict)  # pair -> verse -> frozenset

    @property
    def target(self) -> tuple:
        return self.config.target

    @property
    def pairs(self) -> list:
        return sorted(self.observed)

    def gold_standard(self, pair=None) -> dict:
        pair = tuple(pair or self.target)
        return {v: GoldStandard(v, pair, s, s) for v, s in self.gold[pair].items()}

    def baseline(self) -> dict:
        return self.observed[self.target]

    def write(self, directory) -> dict:
        """Write corpus, alignment and target-pair gold files; returns the paths written."""
        directory = Path(directory)
        (directory / "alignments").mkdir(parents=True, exist_ok=True)
        (directory / "gold").mkdir(parents=True, exist_ok=True)
        write_corpus(self.corpus, directory / "corpus")
        paths = {"corpus": directory / "corpus", "alignments": directory / "alignments"}
        for a, b in self.pairs:
            write_alignments(self.observed[(a, b)], directory / "alignments" / f"{a}__{b}.txt")
        a, b = self.target
        paths["gold"] = directory / "gold" / f"{a}__{b}.txt"
        write_gold(self.gold_standard(), paths["gold"])
        return paths


def _verse(config: SynthConfig, index: int, verse_id: str):
    rng = derive_rng(config.seed, "synth", index)
    eds = config.editions
    K = config.concepts

    concept_of = {}
    tokens = {}
    for lang, ed in enumerate(eds):
        realized = [c for c in range(K) if rng.random() < config.coverage]
        if not realized:
            realized = [int(rng.integers(K))]
        toks = []
        for c in realized:
            n = int(rng.integers(1, config.fertility + 1))
            for m in range(n):
                toks.append((c, f"c{c}_l{lang}" + (f"_{m}" if config.fertility > 1 else "")))
        order = rng.permutation(len(toks))
        toks = [toks[i] for i in order]
        concept_of[ed] = [c for c, _ in toks]
        tokens[ed] = tuple(t for _, t in toks)

    p_target = config.p_drop
    if config.p_drop_max is not None:
        p_target = float(rng.uniform(config.p_drop, config.p_drop_max))

    out = {}
    for x, ea in enumerate(eds):
        for eb in eds[x + 1:]:
            ca, cb = concept_of[ea], concept_of[eb]
            gold = frozenset(
                (i, j) for i in range(len(ca)) for j in range(len(cb)) if ca[i] == cb[j]
            )
            p = p_target if (ea, eb) == config.target else config.p_aux
            kept, dropped = [], []
            for e in sorted(gold):
                (dropped if rng.random() < p else kept).append(e)
            spurious = set()
            n_noise = int(rng.poisson(config.p_noise * K)) if config.p_noise > 0 else 0
            if n_noise:
                cands = [
                    (i, j) for i in range(len(ca)) for j in range(len(cb)) if ca[i] != cb[j]
                ]
                if cands:
                    picks = rng.choice(len(cands), size=min(n_noise, len(cands)), replace=False)
                    spurious = {cands[k] for k in sorted(picks)}
            out[(ea, eb)] = (
                gold,
                AlignmentSet(verse_id, (ea, eb), {e: None for e in kept + sorted(spurious)}),
                frozenset(dropped),
                frozenset(spurious),
            )
    return MultiSentence(verse_id, tokens), out


def generate(config: SynthConfig) -> SynthInstance:
    inst = SynthInstance(config, {})
    width = max(5, len(str(config.n_verses)))
    for index in range(config.n_verses):
        verse_id = f"{index + 1:0{width}d}"
        sent, pairs = _verse(config, index, verse_id)
        inst.corpus[verse_id] = sent
        for pair, (gold, observed, dropped, spurious) in pairs.items():
            inst.gold.setdefault(pair, {})[verse_id] = gold
            inst.observed.setdefault(pair, {})[verse_id] = observed
            inst.dropped.setdefault(pair, {})[verse_id] = dropped
            inst.spurious.setdefault(pair, {})[verse_id] = spurious
    return inst


@dataclass(frozen=True)
class RecoveryReport:
    dropped: int
    recovered: int
    added: int
    added_correct: int

    @property
    def recovery(self) -> Optional[float]:
        """Fraction of dropped gold links put back; None when nothing was dropped."""
        return self.recovered / self.dropped if self.dropped else None

    @property
    def added_precision(self) -> Optional[float]:
        return self.added_correct / self.added if self.added else None

    def rows(self):
        def fmt(x):
            return "n/a" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.6g}"

        return [
            ("dropped", str(self.dropped)),
            ("recovered", str(self.recovered)),
            ("recovery", fmt(self.recovery)),
            ("added", str(self.added)),
            ("added_correct", str(self.added_correct)),
            ("added_precision", fmt(self.added_precision)),
        ]


def score_recovery(instance: SynthInstance, merged: Mapping) -> RecoveryReport:
    """How many dropped target-pair gold links came back, and how clean the additions are."""
    target = instance.target
    dropped = recovered = added = correct = 0
    for v, gold in instance.gold[target].items():
        base = instance.observed[target][v].links()
        hyp = merged[v].links() if v in merged else base
        lost = instance.dropped[target][v]
        new = hyp - base
        dropped += len(lost)
        recovered += len(lost & hyp)
        added += len(new)
        correct += len(new & gold)
    return RecoveryReport(dropped, recovered, added, correct)
