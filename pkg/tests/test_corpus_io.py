import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multialign.corpus_io import (
    AlignmentSet,
    EditionId,
    FormatError,
    MultiSentence,
    load_alignments,
    load_corpus,
    load_gold,
    parse_pair,
    write_alignments,
    write_gold,
)

A, B = EditionId("eng", "kjv"), EditionId("fra", "lsg")
PAIR = (A, B)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestEditionId:
    def test_parse_and_str(self):
        ed = EditionId.parse("eng-new-world")
        assert ed == EditionId("eng", "new-world")
        assert str(ed) == "eng-new-world"
        assert str(EditionId.parse("deu")) == "deu"

    def test_empty_language(self):
        with pytest.raises(ValueError):
            EditionId("")

    def test_parse_pair(self):
        assert parse_pair("eng-kjv,fra-lsg") == PAIR
        assert parse_pair("eng-kjv__fra-lsg") == PAIR
        with pytest.raises(ValueError):
            parse_pair("eng-kjv,eng-kjv")


class TestLoadCorpus:
    def test_single_line(self, tmp_path):
        write(tmp_path / "eng-kjv.txt", "42001001\tIn the beginning\n")
        write(tmp_path / "fra-lsg.txt", "42001001\tAu commencement\n")
        corpus = load_corpus(tmp_path, PAIR)
        assert corpus["42001001"].tokens[A] == ("In", "the", "beginning")

    def test_disjoint_editions(self, tmp_path):
        write(tmp_path / "eng-kjv.txt", "1\ta\n")
        write(tmp_path / "fra-lsg.txt", "2\tb\n")
        assert load_corpus(tmp_path, PAIR) == {}

    def test_two_edition_filter(self, tmp_path):
        eds = [EditionId("aaa"), EditionId("bbb"), EditionId("ccc")]
        write(tmp_path / "aaa.txt", "a\tx\nb\tx\n")
        write(tmp_path / "bbb.txt", "b\ty\nc\ty\n")
        write(tmp_path / "ccc.txt", "b\tz\n")
        corpus = load_corpus(tmp_path, eds)
        assert set(corpus) == {"b"}
        assert len(corpus["b"].editions) == 3

    def test_tokens_verbatim(self, tmp_path):
        write(tmp_path / "eng-kjv.txt", "1\tHe said, \"Go!\"\n")
        write(tmp_path / "fra-lsg.txt", "1\tx\n")
        assert load_corpus(tmp_path, PAIR)["1"].tokens[A] == ("He", "said,", '"Go!"')

    def test_missing_tab(self, tmp_path):
        write(tmp_path / "eng-kjv.txt", "1\ta\n2 b\n")
        write(tmp_path / "fra-lsg.txt", "1\tb\n")
        with pytest.raises(FormatError, match=r"eng-kjv.txt:2"):
            load_corpus(tmp_path, PAIR)

    def test_duplicate_verse(self, tmp_path):
        write(tmp_path / "eng-kjv.txt", "1\ta\n1\tb\n")
        write(tmp_path / "fra-lsg.txt", "1\tb\n")
        with pytest.raises(FormatError, match="duplicate"):
            load_corpus(tmp_path, PAIR)


class TestLoadAlignments:
    def test_parse(self, tmp_path):
        al = load_alignments(write(tmp_path / "a.txt", "v1\t0-0 1-2:0.75\n"), PAIR)
        assert dict(al["v1"].edges) == {(0, 0): None, (1, 2): 0.75}

    def test_duplicates_keep_max(self, tmp_path):
        al = load_alignments(write(tmp_path / "a.txt", "v1\t0-0 0-0:0.3\n"), PAIR)
        assert dict(al["v1"].edges) == {(0, 0): 0.3}
        al = load_alignments(write(tmp_path / "b.txt", "v1\t0-0:0.9 0-0:0.3\n"), PAIR)
        assert dict(al["v1"].edges) == {(0, 0): 0.9}

    def test_empty_edge_list(self, tmp_path):
        al = load_alignments(write(tmp_path / "a.txt", "v1\t\n"), PAIR)
        assert len(al["v1"]) == 0

    @pytest.mark.parametrize("item", ["0_0", "a-1", "0-1:x", "0?1", "-1-2"])
    def test_bad_item(self, tmp_path, item):
        with pytest.raises(FormatError):
            load_alignments(write(tmp_path / "a.txt", f"v1\t{item}\n"), PAIR)

    def test_negative_score(self, tmp_path):
        with pytest.raises(FormatError, match="negative score"):
            load_alignments(write(tmp_path / "a.txt", "v1\t0-1:-0.5\n"), PAIR)

    def test_index_base(self, tmp_path):
        al = load_alignments(write(tmp_path / "a.txt", "v1\t1-1 2-3\n"), PAIR, index_base=1)
        assert al["v1"].links() == {(0, 0), (1, 2)}

    def test_range_check_against_corpus(self, tmp_path):
        write(tmp_path / "eng-kjv.txt", "v1\ta b\n")
        write(tmp_path / "fra-lsg.txt", "v1\tc d\n")
        corpus = load_corpus(tmp_path, PAIR)
        with pytest.raises(FormatError, match="v1"):
            load_alignments(write(tmp_path / "a.txt", "v1\t0-2\n"), PAIR, corpus)


class TestLoadGold:
    def test_sure_and_possible(self, tmp_path):
        g = load_gold(write(tmp_path / "g.txt", "v1\t0-0 1?2\n"), PAIR)["v1"]
        assert g.sure == {(0, 0)}
        assert g.possible == {(0, 0), (1, 2)}

    def test_set_semantics(self, tmp_path):
        g = load_gold(write(tmp_path / "g.txt", "v1\t0-0 0-0\n"), PAIR)["v1"]
        assert g.sure == {(0, 0)}

    def test_sure_wins_with_warning(self, tmp_path):
        with pytest.warns(UserWarning, match="both sure and possible"):
            g = load_gold(write(tmp_path / "g.txt", "v1\t0?0 0-0\n"), PAIR)["v1"]
        assert g.sure == {(0, 0)} and g.possible == {(0, 0)}

    def test_range_error_names_verse(self, tmp_path):
        write(tmp_path / "eng-kjv.txt", "v1\ta b\n")
        write(tmp_path / "fra-lsg.txt", "v1\tc d\n")
        corpus = load_corpus(tmp_path, PAIR)
        with pytest.raises(FormatError, match="verse v1"):
            load_gold(write(tmp_path / "g.txt", "v1\t3-1\n"), PAIR, corpus)

    @given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.booleans()), max_size=20))
    @settings(max_examples=50)
    def test_sure_subset_of_possible(self, tmp_path_factory, items):
        path = tmp_path_factory.mktemp("gold") / "g.txt"
        text = " ".join(f"{i}{'-' if s else '?'}{j}" for i, j, s in items)
        path.write_text(f"v\t{text}\n", encoding="utf-8")
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            g = load_gold(path, PAIR)["v"]
        assert g.sure <= g.possible
        assert g.sure == {(i, j) for i, j, s in items if s}


class TestWriteAlignments:
    def test_sorted_output(self, tmp_path):
        path = tmp_path / "out.txt"
        write_alignments({"v1": AlignmentSet("v1", PAIR, {(1, 2): None, (0, 0): None})}, path)
        assert path.read_text() == "v1\t0-0 1-2\n"

    def test_score_format(self, tmp_path):
        path = tmp_path / "out.txt"
        write_alignments({"v1": AlignmentSet("v1", PAIR, {(0, 1): 0.5, (2, 2): 1 / 3})}, path)
        assert path.read_text() == "v1\t0-1:0.5 2-2:0.333333\n"

    def test_round_trip_examples(self, tmp_path):
        src = write(tmp_path / "in.txt", "v1\t0-0 1-2:0.75\nv2\t\n")
        loaded = load_alignments(src, PAIR)
        out = tmp_path / "out.txt"
        write_alignments(loaded, out)
        again = load_alignments(out, PAIR)
        assert {v: dict(a.edges) for v, a in again.items()} == {v: dict(a.edges) for v, a in loaded.items()}

    def test_unwritable(self, tmp_path):
        with pytest.raises(OSError):
            write_alignments({}, tmp_path / "missing" / "out.txt")

    @given(st.dictionaries(
        st.tuples(st.integers(0, 30), st.integers(0, 30)),
        st.one_of(st.none(), st.floats(0, 1e6, allow_nan=False)),
        max_size=25,
    ))
    @settings(max_examples=60)
    def test_round_trip_property(self, tmp_path_factory, edges):
        path = tmp_path_factory.mktemp("rt") / "a.txt"
        write_alignments({"v": AlignmentSet("v", PAIR, edges)}, path)
        back = load_alignments(path, PAIR)["v"].edges
        assert set(back) == set(edges)
        for e, s in edges.items():
            if s is None:
                assert back[e] is None
            else:
                assert back[e] == pytest.approx(s, rel=5e-6, abs=1e-300)

    def test_gold_round_trip(self, tmp_path):
        src = write(tmp_path / "g.txt", "v1\t0-0 1?2\n")
        gold = load_gold(src, PAIR)
        write_gold(gold, tmp_path / "g2.txt")
        assert (tmp_path / "g2.txt").read_text() == "v1\t0-0 1?2\n"


def test_pickle_round_trip():
    import pickle

    a, b = EditionId("aaa"), EditionId("bbb")
    sent = MultiSentence("v", {b: ("u",), a: ("x", "y")})
    s = AlignmentSet("v", (a, b), {(1, 0): 0.5, (0, 0): None}, frozenset({(1, 0)}))
    sent2, s2 = pickle.loads(pickle.dumps((sent, s)))
    assert sent2 == sent and sent2.editions == (a, b)
    assert dict(s2.edges) == dict(s.edges) and s2.added == s.added
