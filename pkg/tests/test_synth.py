import itertools

import pytest

from multialign.corpus_io import AlignmentSet, load_alignments, load_corpus, load_gold
from multialign.extraction import run_pipeline
from multialign.synth import RecoveryReport, SynthConfig, generate, score_recovery


def test_clean_instance_observed_equals_gold():
    inst = generate(SynthConfig(n_languages=4, n_verses=10, concepts=4, seed=1))
    for pair in inst.pairs:
        for v, obs in inst.observed[pair].items():
            assert obs.links() == inst.gold[pair][v]


def test_single_concept_is_a_clique():
    inst = generate(SynthConfig(n_languages=4, n_verses=3, concepts=1))
    for v, sent in inst.corpus.items():
        assert all(len(t) == 1 for t in sent.tokens.values())
        assert all(inst.gold[p][v] == {(0, 0)} for p in inst.pairs)
        assert len(inst.pairs) == 6


def test_tokens_name_concept_and_language():
    inst = generate(SynthConfig(n_languages=3, n_verses=1, concepts=2, seed=3))
    sent = next(iter(inst.corpus.values()))
    for k, ed in enumerate(inst.config.editions):
        assert sorted(sent.tokens[ed]) == [f"c0_l{k}", f"c1_l{k}"]


@pytest.mark.parametrize("seed", range(5))
def test_drop_accounting(seed):
    inst = generate(SynthConfig(n_languages=4, n_verses=20, concepts=5, coverage=0.8,
                                p_drop=0.3, p_aux=0.1, p_noise=0.5, fertility=2, seed=seed))
    for pair in inst.pairs:
        for v, obs in inst.observed[pair].items():
            gold, dropped, spurious = inst.gold[pair][v], inst.dropped[pair][v], inst.spurious[pair][v]
            assert len(obs) == len(gold) - len(dropped) + len(spurious)
            assert obs.links() <= gold | spurious
            assert not spurious & gold


def test_gold_cliques_across_languages():
    inst = generate(SynthConfig(n_languages=4, n_verses=5, concepts=3, coverage=0.7, fertility=2, seed=2))
    for v, sent in inst.corpus.items():
        eds = sent.editions
        concept = {ed: [t.split("_")[0] for t in sent.tokens[ed]] for ed in eds}
        for a, b in itertools.combinations(eds, 2):
            expect = {(i, j) for i, ci in enumerate(concept[a]) for j, cj in enumerate(concept[b]) if ci == cj}
            assert inst.gold[(a, b)][v] == expect


def test_write_is_byte_identical(tmp_path):
    cfg = SynthConfig(n_languages=3, n_verses=15, p_drop=0.2, p_noise=0.2, seed=11)
    generate(cfg).write(tmp_path / "a")
    generate(cfg).write(tmp_path / "b")
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*.txt"))
    assert files
    for rel in files:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()


def test_written_files_reload(tmp_path):
    inst = generate(SynthConfig(n_languages=3, n_verses=8, p_drop=0.2, seed=4))
    paths = inst.write(tmp_path)
    corpus = load_corpus(paths["corpus"], inst.config.editions)
    assert set(corpus) == set(inst.corpus)
    a, b = inst.target
    al = load_alignments(paths["alignments"] / f"{a}__{b}.txt", inst.target, corpus)
    assert {v: s.links() for v, s in al.items()} == {v: s.links() for v, s in inst.baseline().items()}
    gold = load_gold(paths["gold"], inst.target, corpus)
    assert {v: g.sure for v, g in gold.items()} == inst.gold[inst.target]


class TestRecovery:
    def test_nothing_dropped(self):
        inst = generate(SynthConfig(n_languages=3, n_verses=5))
        rep = score_recovery(inst, inst.baseline())
        assert rep.dropped == 0 and rep.recovery is None
        assert ("recovery", "n/a") in rep.rows()

    def test_perfect(self):
        inst = generate(SynthConfig(n_languages=3, n_verses=20, p_drop=0.4, seed=2))
        perfect = {v: AlignmentSet(v, inst.target, {e: None for e in g})
                   for v, g in inst.gold[inst.target].items()}
        rep = score_recovery(inst, perfect)
        assert rep.dropped > 0
        assert rep.recovery == 1.0 and rep.added_precision == 1.0

    def test_clean_instance_adds_nothing(self):
        inst = generate(SynthConfig(n_languages=4, n_verses=30, concepts=5, seed=9))
        merged = run_pipeline(inst.corpus, inst.observed, inst.target, "adad")
        rep = score_recovery(inst, merged)
        assert rep.added == 0

    @pytest.mark.parametrize("L", [3, 4, 5])
    def test_single_drop_always_recovered(self, L):
        # every target-pair link but one per verse intact, auxiliary cliques intact
        for K in (1, 2, 3):
            inst = generate(SynthConfig(n_languages=L, n_verses=20, concepts=K, seed=L * 10 + K))
            observed = dict(inst.observed)
            target = {}
            for v, s in inst.observed[inst.target].items():
                keep = sorted(s.edges)[1:]
                target[v] = AlignmentSet(v, inst.target, {e: None for e in keep})
            observed[inst.target] = target
            merged = run_pipeline(inst.corpus, observed, inst.target, "adad")
            for v in target:
                assert merged[v].links() == inst.gold[inst.target][v]

    def test_report_properties(self):
        rep = RecoveryReport(dropped=4, recovered=3, added=5, added_correct=3)
        assert rep.recovery == 0.75 and rep.added_precision == 0.6


def test_config_validation():
    with pytest.raises(ValueError):
        SynthConfig(n_languages=1)
    with pytest.raises(ValueError):
        SynthConfig(coverage=0.0)
    with pytest.raises(ValueError):
        SynthConfig(p_drop=1.0)
    with pytest.raises(ValueError):
        SynthConfig(p_drop=0.5, p_drop_max=0.2)
