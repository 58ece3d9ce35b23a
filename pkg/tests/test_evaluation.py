import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multialign.corpus_io import AlignmentSet, EditionId, GoldStandard
from multialign.evaluation import (
    EvalResult,
    evaluate,
    f1_bin,
    language_ablation,
    score_verse,
    stratify,
)
from multialign.extraction import PipelineSpec
from multialign.synth import SynthConfig, generate

PAIR = (EditionId("aaa"), EditionId("bbb"))
edges = st.sets(st.tuples(st.integers(0, 4), st.integers(0, 4)), max_size=12)


def hyp(v, links):
    return AlignmentSet(v, PAIR, {e: None for e in links})


class TestMetrics:
    def test_perfect(self):
        r = score_verse({(0, 0), (1, 1)}, {(0, 0), (1, 1)})
        assert (r.precision, r.recall, r.f1, r.aer) == (1.0, 1.0, 1.0, 0.0)

    def test_possible_link(self):
        r = score_verse({(0, 0), (1, 2)}, {(0, 0)}, {(0, 0), (1, 2)})
        assert r.precision == 1.0 and r.recall == 1.0
        assert r.aer == 1 - (1 + 2) / (2 + 1) == 0.0

    def test_extra_link(self):
        r = score_verse({(0, 0), (0, 1)}, {(0, 0)})
        assert r.precision == 0.5 and r.recall == 1.0
        assert r.f1 == pytest.approx(2 / 3, abs=1e-15)
        assert r.aer == pytest.approx(1 / 3, abs=1e-15)

    def test_degenerate(self):
        empty = EvalResult()
        assert (empty.precision, empty.recall, empty.f1, empty.aer) == (1.0, 1.0, 1.0, 0.0)
        r = score_verse(set(), {(0, 0)})
        assert (r.precision, r.recall, r.f1) == (1.0, 0.0, 0.0)

    @given(edges, edges)
    @settings(max_examples=300)
    def test_aer_is_one_minus_f1_when_p_equals_s(self, A, S):
        r = score_verse(A, S)
        assert abs(r.aer - (1 - r.f1)) < 1e-12

    @given(edges, edges, edges)
    @settings(max_examples=300)
    def test_ranges(self, A, S, P):
        r = score_verse(A, S, P)
        for x in (r.precision, r.recall, r.f1, r.aer):
            assert 0.0 <= x <= 1.0


class TestEvaluate:
    def test_micro_average(self):
        gold = {"1": GoldStandard("1", PAIR, {(0, 0)}, set()),
                "2": GoldStandard("2", PAIR, {(0, 0), (1, 1)}, {(2, 2)})}
        h = {"1": hyp("1", {(0, 0), (0, 1)}), "2": hyp("2", {(1, 1), (2, 2)})}
        total, per = evaluate(h, gold)
        assert total == per["1"] + per["2"]
        assert total.n_hyp == 4 and total.hits_sure == 2 and total.hits_possible == 3

    def test_missing_hypothesis_is_empty(self):
        gold = {"1": GoldStandard("1", PAIR, {(0, 0)}, set())}
        total, _ = evaluate({}, gold)
        assert total.recall == 0.0

    def test_extra_hypothesis_warns(self):
        gold = {"1": GoldStandard("1", PAIR, {(0, 0)}, set())}
        with pytest.warns(UserWarning, match="no gold"):
            evaluate({"1": hyp("1", {(0, 0)}), "9": hyp("9", {(0, 0)})}, gold)

    def test_empty_gold(self):
        with pytest.raises(ValueError):
            evaluate({}, {})


class TestStratify:
    def res(self, f1_target):
        # precision 1, recall r gives F1 = 2r / (1 + r); pick counts giving exact values
        table = {0.1: (1, 19), 0.2: (1, 9), 0.5: (1, 3), 0.9: (9, 11), 1.0: (1, 1)}
        hits, n_sure = table[f1_target]
        r = EvalResult(hits, n_sure, n_sure, hits, hits)
        assert r.f1 == pytest.approx(f1_target)
        return r

    def test_bin_edges(self):
        assert f1_bin(0.0) == 0 and f1_bin(0.2) == 0 and f1_bin(0.2000001) == 1
        assert f1_bin(0.8) == 3 and f1_bin(0.9) == 4 and f1_bin(1.0) == 4
        assert f1_bin(0.6) == 2 and f1_bin(3 / 5) == 2

    def test_two_verses(self):
        base = {"a": self.res(0.1), "b": self.res(0.9)}
        merged = {"a": self.res(0.5), "b": self.res(0.9)}
        rep = stratify(base, merged)
        assert rep.strata[0].n == 1 and rep.strata[0].improvement == pytest.approx(0.4)
        assert rep.strata[4].n == 1 and rep.strata[4].improvement == pytest.approx(0.0)
        assert rep.total == 2
        assert rep.strata[0].label == "[0,0.2]" and rep.strata[4].label == "(0.8,1]"

    def test_all_perfect(self):
        base = {str(k): self.res(1.0) for k in range(4)}
        rep = stratify(base, dict(base))
        assert [s.n for s in rep.strata] == [0, 0, 0, 0, 4]
        assert rep.strata[4].improvement == 0.0
        assert all(math.isnan(s.baseline_f1) for s in rep.strata[:4])

    def test_mismatch(self):
        with pytest.raises(ValueError, match="'b'"):
            stratify({"a": self.res(1.0)}, {"a": self.res(1.0), "b": self.res(1.0)})

    @given(st.lists(st.integers(0, 20), min_size=1, max_size=40))
    def test_counts_partition(self, hits):
        base = {str(k): EvalResult(20, 20, 20, h, h) for k, h in enumerate(hits)}
        rep = stratify(base, base)
        assert rep.total == len(hits)


@pytest.fixture(scope="module")
def inst():
    return generate(SynthConfig(n_languages=8, n_verses=60, concepts=6, p_drop=0.3, p_aux=0.2, seed=5))


class TestLanguageAblation:
    def test_size_zero_equals_baseline(self, inst):
        spec = PipelineSpec(inst.corpus, inst.observed, "adad")
        gold = inst.gold_standard()
        [(n, f1)] = language_ablation(spec, inst.target, inst.config.editions[2:], gold, sizes=[0])
        assert n == 0
        assert f1 == evaluate(inst.baseline(), gold)[0].f1

    def test_curve_nondecreasing(self, inst):
        spec = PipelineSpec(inst.corpus, inst.observed, "adad")
        curve = language_ablation(spec, inst.target, inst.config.editions[2:], inst.gold_standard(),
                                  sizes=range(7), seed=1)
        f1 = [f for _, f in curve]
        assert all(b >= a - 0.01 for a, b in zip(f1, f1[1:]))
        assert f1[-1] > f1[0]

    def test_leave_one_in_orders_by_quality(self):
        inst = generate(SynthConfig(n_languages=4, n_verses=80, concepts=6, p_drop=0.4, seed=6))
        clean, noisy = inst.config.editions[2], inst.config.editions[3]
        observed = dict(inst.observed)
        # corrupt every pair touching the noisy edition by dropping half of its links
        for pair in inst.pairs:
            if noisy in pair:
                observed[pair] = {
                    v: AlignmentSet(v, s.pair, {e: None for k, e in enumerate(sorted(s.edges)) if k % 2})
                    for v, s in inst.observed[pair].items()
                }
        spec = PipelineSpec(inst.corpus, observed, "adad")
        ranking = language_ablation(spec, inst.target, [noisy, clean], inst.gold_standard(),
                                    leave_one_in=True)
        assert [ed for ed, _ in ranking] == [clean, noisy]
        assert ranking[0][1] > ranking[1][1] > 0

    def test_pool_checks(self, inst):
        spec = PipelineSpec(inst.corpus, inst.observed, "adad")
        gold = inst.gold_standard()
        with pytest.raises(ValueError, match="outside"):
            language_ablation(spec, inst.target, inst.config.editions[2:4], gold, sizes=[3])
        with pytest.raises(ValueError, match="target edition"):
            language_ablation(spec, inst.target, [inst.target[0]], gold, sizes=[1])
        same_lang = EditionId(inst.target[0].language, "other")
        with pytest.raises(ValueError, match="shares a language"):
            language_ablation(spec, inst.target, [same_lang], gold, sizes=[0])
