import sys
from pathlib import Path

import pytest

from multialign.corpus_io import AlignmentSet, EditionId, MultiSentence

sys.path.insert(0, str(Path(__file__).parent))

ENG = EditionId("eng", "web")
DEU = EditionId("deu", "lu")
SPA = EditionId("spa", "rv")
FRA = EditionId("fra", "lsg")


@pytest.fixture
def clique_verse():
    """Four editions of one verse; every pair aligned token by token except
    DEU-FRA, where the Schritt-pas link is missing."""
    sent = MultiSentence("40007014", {
        ENG: ("the", "first", "step"),
        DEU: ("der", "erste", "Schritt"),
        SPA: ("el", "primer", "paso"),
        FRA: ("le", "premier", "pas"),
    })
    eds = [DEU, ENG, FRA, SPA]
    sets = {}
    for i, a in enumerate(eds):
        for b in eds[i + 1:]:
            edges = {(0, 0): None, (1, 1): None, (2, 2): None}
            if (a, b) == (DEU, FRA):
                del edges[(2, 2)]
            sets[(a, b)] = {sent.verse_id: AlignmentSet(sent.verse_id, (a, b), edges)}
    return {sent.verse_id: sent}, sets


@pytest.fixture
def fig2_verse():
    """Three-edition toy verse with the pairwise alignments of the rating-matrix example."""
    eng, deu, fra = EditionId("eng"), EditionId("deu"), EditionId("fra")
    sent = MultiSentence("v1", {
        eng: ("I", "can", "see"),
        deu: ("ich", "kann", "es", "sehen"),
        fra: ("je", "vois"),
    })
    sets = [
        AlignmentSet("v1", (eng, deu), {(0, 0): None, (1, 1): None, (2, 3): None}),
        AlignmentSet("v1", (eng, fra), {(0, 0): None, (2, 1): None}),
        AlignmentSet("v1", (deu, fra), {(0, 0): None, (3, 1): None}),
    ]
    return sent, sets, (eng, deu, fra)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
