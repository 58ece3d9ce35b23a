"""Readers and writers for the corpus, alignment and gold-standard files.

All three formats are line oriented, UTF-8, one verse per line::

    corpus      verse_id<TAB>tok tok tok ...
    alignment   verse_id<TAB>i-j i-j:0.75 ...
    gold        verse_id<TAB>i-j i?j ...        (i-j sure, i?j possible-only)

Token indices are 0-based unless a loader is told otherwise.
"""

from __future__ import annotations

import os
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

__all__ = [
    "AlignmentSet",
    "EditionId",
    "FormatError",
    "GoldStandard",
    "MultiSentence",
    "TokenRef",
    "load_alignments",
    "load_corpus",
    "load_gold",
    "parse_pair",
    "write_alignments",
    "write_corpus",
    "write_gold",
]


class FormatError(ValueError):
    """A file does not follow the expected line format."""

    def __init__(self, path, lineno, message):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}" if lineno else f"{path}: {message}")


@dataclass(frozen=True, order=True)
class EditionId:
    language: str
    edition: str = ""

    def __post_init__(self):
        if not self.language:
            raise ValueError("edition needs a non-empty language code")
        if "-" in self.language or "_" in self.language or ":" in self.language:
            raise ValueError(f"bad language code {self.language!r}")

    def __str__(self):
        return f"{self.language}-{self.edition}" if self.edition else self.language

    @classmethod
    def parse(cls, text: str) -> "EditionId":
        """``"eng-kjv"`` -> EditionId("eng", "kjv"); a bare ``"eng"`` has an empty edition."""
        text = text.strip()
        lang, _, edition = text.partition("-")
        return cls(lang, edition)


def parse_pair(text: str) -> tuple[EditionId, EditionId]:
    """Parse ``"eng-kjv,fra-lsg"`` (or ``eng-kjv__fra-lsg``) into an edition pair."""
    sep = "," if "," in text else "__"
    parts = text.split(sep)
    if len(parts) != 2:
        raise ValueError(f"cannot parse edition pair {text!r}")
    a, b = (EditionId.parse(p) for p in parts)
    if a == b:
        raise ValueError(f"pair {text!r} names the same edition twice")
    return a, b


@dataclass(frozen=True, order=True)
class TokenRef:
    edition: EditionId
    position: int


@dataclass(frozen=True)
class MultiSentence:
    verse_id: str
    tokens: Mapping[EditionId, tuple]

    def __post_init__(self):
        for ed, toks in self.tokens.items():
            if not toks:
                raise ValueError(f"verse {self.verse_id}: edition {ed} has no tokens")
        frozen = {ed: tuple(self.tokens[ed]) for ed in sorted(self.tokens)}
        object.__setattr__(self, "tokens", MappingProxyType(frozen))

    @property
    def editions(self) -> tuple:
        return tuple(self.tokens)

    def __len__(self):
        return sum(len(t) for t in self.tokens.values())

    def __reduce__(self):
        # mapping proxies do not pickle; rebuild through the constructor
        return (MultiSentence, (self.verse_id, dict(self.tokens)))

    def restrict(self, editions: Iterable[EditionId]) -> "MultiSentence":
        keep = set(editions)
        return MultiSentence(self.verse_id, {e: t for e, t in self.tokens.items() if e in keep})


def _max_score(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


@dataclass(frozen=True)
class AlignmentSet:
    """Edges ``(i, j) -> score`` for one verse of one edition pair.

    A score of ``None`` means the aligner gave no score.  ``added`` lists the
    edges that came from prediction rather than from the baseline.
    """

    verse_id: str
    pair: tuple
    edges: Mapping[tuple, Optional[float]] = field(default_factory=dict)
    added: frozenset = frozenset()

    def __post_init__(self):
        clean = {}
        for (i, j), s in self.edges.items():
            if i < 0 or j < 0:
                raise ValueError(f"verse {self.verse_id}: negative index in edge {i}-{j}")
            if s is not None:
                s = float(s)
                if not s >= 0:
                    raise ValueError(f"verse {self.verse_id}: negative score {s} on edge {i}-{j}")
            clean[(int(i), int(j))] = s
        object.__setattr__(self, "edges", MappingProxyType(dict(sorted(clean.items()))))
        object.__setattr__(self, "added", frozenset(self.added))

    @classmethod
    def from_edges(cls, verse_id, pair, edges, added=()):
        """Build from ``(i, j)`` or ``(i, j, score)`` tuples, keeping the max score on duplicates."""
        out = {}
        for e in edges:
            key = (e[0], e[1])
            score = e[2] if len(e) > 2 else None
            out[key] = _max_score(out.get(key), score) if key in out else score
        return cls(verse_id, tuple(pair), out, frozenset(added))

    def links(self) -> frozenset:
        return frozenset(self.edges)

    def transposed(self) -> "AlignmentSet":
        return AlignmentSet(
            self.verse_id,
            (self.pair[1], self.pair[0]),
            {(j, i): s for (i, j), s in self.edges.items()},
            frozenset((j, i) for i, j in self.added),
        )

    def __reduce__(self):
        return (AlignmentSet, (self.verse_id, self.pair, dict(self.edges), self.added))

    def __len__(self):
        return len(self.edges)

    def __contains__(self, edge):
        return tuple(edge) in self.edges


@dataclass(frozen=True)
class GoldStandard:
    verse_id: str
    pair: tuple
    sure: frozenset
    possible: frozenset

    def __post_init__(self):
        object.__setattr__(self, "sure", frozenset(self.sure))
        # possible is stored inclusive of sure
        object.__setattr__(self, "possible", frozenset(self.possible) | self.sure)


def _lines(path):
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise FormatError(path, lineno, "missing TAB between verse id and content")
            verse_id, _, rest = line.partition("\t")
            if not verse_id:
                raise FormatError(path, lineno, "empty verse id")
            yield lineno, verse_id, rest


def corpus_path(directory, edition: EditionId) -> Path:
    return Path(directory) / f"{edition}.txt"


def read_edition(path) -> dict:
    verses = {}
    for lineno, verse_id, rest in _lines(path):
        if verse_id in verses:
            raise FormatError(path, lineno, f"duplicate verse id {verse_id}")
        verses[verse_id] = tuple(rest.split())
    return verses


def load_corpus(directory, editions: Iterable[EditionId]) -> dict:
    """Load ``<directory>/<edition>.txt`` for each edition and group lines by verse id.

    Verses found in fewer than two of the editions are dropped, as are empty
    lines of an edition (that edition then skips the verse).
    """
    editions = list(editions)
    per_edition = {}
    for ed in editions:
        path = corpus_path(directory, ed)
        if not path.exists():
            raise FileNotFoundError(f"corpus file not found: {path}")
        per_edition[ed] = read_edition(path)

    by_verse = {}
    for ed, verses in per_edition.items():
        for verse_id, toks in verses.items():
            if toks:
                by_verse.setdefault(verse_id, {})[ed] = toks
    return {
        v: MultiSentence(v, toks)
        for v, toks in sorted(by_verse.items())
        if len(toks) >= 2
    }


_EDGE = re.compile(r"^(\d+)([-?])(\d+)(?::(.+))?$")


def _check_range(path, lineno, verse_id, pair, i, j, corpus):
    if corpus is None:
        return
    sent = corpus.get(verse_id)
    if sent is None:
        return
    for ed, idx in ((pair[0], i), (pair[1], j)):
        toks = sent.tokens.get(ed)
        if toks is not None and idx >= len(toks):
            raise FormatError(
                path, lineno,
                f"verse {verse_id}: index {idx} out of range for {ed} ({len(toks)} tokens)",
            )


def load_alignments(path, pair, corpus=None, index_base: int = 0) -> dict:
    """Read an alignment file into ``{verse_id: AlignmentSet}``.

    If ``corpus`` (as returned by :func:`load_corpus`) is given, indices are
    checked against the verse's token counts.
    """
    pair = tuple(pair)
    out = {}
    for lineno, verse_id, rest in _lines(path):
        if verse_id in out:
            raise FormatError(path, lineno, f"duplicate verse id {verse_id}")
        edges = {}
        for item in rest.split():
            m = _EDGE.match(item)
            if m is None or m.group(2) != "-":
                raise FormatError(path, lineno, f"bad alignment item {item!r}")
            i, j = int(m.group(1)) - index_base, int(m.group(3)) - index_base
            if i < 0 or j < 0:
                raise FormatError(path, lineno, f"index below base {index_base} in {item!r}")
            score = None
            if m.group(4) is not None:
                try:
                    score = float(m.group(4))
                except ValueError:
                    raise FormatError(path, lineno, f"bad score in {item!r}") from None
                if not score >= 0:
                    raise FormatError(path, lineno, f"negative score in {item!r}")
            _check_range(path, lineno, verse_id, pair, i, j, corpus)
            key = (i, j)
            edges[key] = _max_score(edges[key], score) if key in edges else score
        out[verse_id] = AlignmentSet(verse_id, pair, edges)
    return out


def load_gold(path, pair, corpus=None, index_base: int = 0) -> dict:
    """Read a gold file into ``{verse_id: GoldStandard}``; ``i-j`` is sure, ``i?j`` possible."""
    pair = tuple(pair)
    out = {}
    for lineno, verse_id, rest in _lines(path):
        if verse_id in out:
            raise FormatError(path, lineno, f"duplicate verse id {verse_id}")
        sure, possible = set(), set()
        for item in rest.split():
            m = _EDGE.match(item)
            if m is None or m.group(4) is not None:
                raise FormatError(path, lineno, f"bad gold item {item!r}")
            i, j = int(m.group(1)) - index_base, int(m.group(3)) - index_base
            if i < 0 or j < 0:
                raise FormatError(path, lineno, f"index below base {index_base} in {item!r}")
            _check_range(path, lineno, verse_id, pair, i, j, corpus)
            (sure if m.group(2) == "-" else possible).add((i, j))
        both = sure & possible
        if both:
            warnings.warn(
                f"{path}:{lineno}: verse {verse_id}: {len(both)} edge(s) marked both sure and "
                "possible; keeping them as sure",
                stacklevel=2,
            )
        out[verse_id] = GoldStandard(verse_id, pair, sure, possible)
    return out


def format_score(score: float) -> str:
    return format(score, ".6g")


def _atomic_write(path, lines):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line)
            f.write("\n")
    os.replace(tmp, path)


def write_alignments(alignments: Mapping, path) -> None:
    """Write ``{verse_id: AlignmentSet}``; verses and edges are sorted for byte-stable output."""
    def lines():
        for verse_id in sorted(alignments):
            items = []
            for (i, j), s in sorted(alignments[verse_id].edges.items()):
                items.append(f"{i}-{j}" if s is None else f"{i}-{j}:{format_score(s)}")
            yield f"{verse_id}\t{' '.join(items)}"

    _atomic_write(path, lines())


def write_gold(gold: Mapping, path) -> None:
    def lines():
        for verse_id in sorted(gold):
            g = gold[verse_id]
            items = [(i, j, "-") for i, j in g.sure]
            items += [(i, j, "?") for i, j in g.possible - g.sure]
            yield f"{verse_id}\t{' '.join(f'{i}{m}{j}' for i, j, m in sorted(items))}"

    _atomic_write(path, lines())


def write_corpus(corpus: Mapping, directory) -> None:
    """Write one ``<edition>.txt`` file per edition found in ``corpus``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    editions = sorted({ed for sent in corpus.values() for ed in sent.tokens})
    for ed in editions:
        _atomic_write(
            corpus_path(directory, ed),
            (f"{v}\t{' '.join(corpus[v].tokens[ed])}" for v in sorted(corpus) if ed in corpus[v].tokens),
        )
