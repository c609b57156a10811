import json

import pytest
from hypothesis import given, strategies as st

from approxgram.chart import Extraction
from approxgram.evaluation import EvalReport, format_jsonl, format_table, rho_sweep, score_extractions, split_corpus
from approxgram.learner import LearnerConfig
from approxgram.synthetic import CLEAN, CorpusOptions, generate_corpus
from approxgram.textmodel import GoldSpan, parse_annotated_document


def ex(span, doc_id="d"):
    return Extraction(doc_id, span, "", "U#1", 1.0, None)


def gold(span, doc_id="d"):
    return GoldSpan(span, (), doc_id)


def synthetic_docs(n=60, seed=0, opts=CLEAN):
    return [parse_annotated_document(t, i) for i, t in generate_corpus(n, seed, opts)]


class TestSplit:
    def test_sizes(self):
        train, test = split_corpus(list(range(10)), 0.8, 7)
        assert (len(train), len(test)) == (8, 2)
        assert sorted(train + test) == list(range(10))

    def test_deterministic(self):
        assert split_corpus(list(range(10)), 0.8, 7) == split_corpus(list(range(10)), 0.8, 7)

    def test_seed_matters(self):
        assert split_corpus(list(range(50)), 0.8, 1) != split_corpus(list(range(50)), 0.8, 2)

    def test_too_small(self):
        with pytest.raises(ValueError):
            split_corpus([1], 0.8, 0)

    @pytest.mark.parametrize("fraction", [0.0, 1.0, -0.5])
    def test_fraction_range(self, fraction):
        with pytest.raises(ValueError):
            split_corpus([1, 2, 3], fraction, 0)

    def test_both_parts_non_empty(self):
        train, test = split_corpus([1, 2], 0.99, 0)
        assert train and test


class TestScore:
    def test_four_of_five(self):
        golds = [gold((i * 10, i * 10 + 5)) for i in range(4)]
        preds = [ex(g.char_range) for g in golds] + [ex((100, 105))]
        r = score_extractions(preds, golds)
        assert (r.precision, r.recall) == (0.8, 1.0)

    def test_vacuous(self):
        r = score_extractions([], [])
        assert (r.precision, r.recall) == (1.0, 1.0)

    def test_nothing_extracted(self):
        r = score_extractions([], [gold((0, 1)), gold((2, 3)), gold((4, 5))])
        assert (r.precision, r.recall) == (1.0, 0.0)

    def test_injective(self):
        r = score_extractions([ex((0, 5)), ex((0, 5))], [gold((0, 5))])
        assert r.correct == 1

    def test_doc_ids_respected(self):
        r = score_extractions([ex((0, 5), "a")], [gold((0, 5), "b")])
        assert r.correct == 0

    def test_overlap_mode(self):
        # Jaccard 6/10 passes, 4/10 fails
        assert score_extractions([ex((0, 6))], [gold((0, 10))], "overlap").correct == 1
        assert score_extractions([ex((0, 4))], [gold((0, 10))], "overlap").correct == 0
        assert score_extractions([ex((0, 6))], [gold((0, 10))], "exact").correct == 0

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            score_extractions([], [], "fuzzy")


spans = st.tuples(st.integers(0, 30), st.integers(1, 10)).map(lambda t: (t[0], t[0] + t[1]))


@given(st.lists(spans, max_size=8), st.lists(spans, max_size=8), st.sampled_from(["exact", "overlap"]))
def test_metric_bounds(pred, golds, mode):
    r = score_extractions([ex(s) for s in pred], [gold(s) for s in golds], mode)
    assert 0.0 <= r.precision <= 1.0 and 0.0 <= r.recall <= 1.0
    assert r.correct <= min(r.extracted, r.gold_total)


class TestSweep:
    def test_table_rows_descending(self):
        reports = rho_sweep(synthetic_docs(), [0.15, 0.30, 0.20, 0.25])
        assert [r.rho for r in reports] == [0.30, 0.25, 0.20, 0.15]

    def test_self_extraction_row(self):
        [r] = rho_sweep(synthetic_docs(), [0.0], LearnerConfig(), train_equals_test=True)
        assert r.recall == 1.0

    def test_empty(self):
        assert rho_sweep(synthetic_docs(), []) == []

    def test_deterministic(self):
        docs = synthetic_docs(80, 5, opts=CorpusOptions())
        assert rho_sweep(docs, [0.2, 0.1], seed=3) == rho_sweep(docs, [0.2, 0.1], seed=3)


class TestFormat:
    def test_table(self):
        text = format_table([EvalReport(0.3, 4, 5, 4), EvalReport(None, 0, 0, 0)])
        assert text.splitlines() == ["RHO\tPrecision\tRecall", "0.30\t0.8000\t1.0000", "-\t1.0000\t1.0000"]

    def test_jsonl(self):
        [line] = format_jsonl([EvalReport(0.3, 4, 5, 4)]).splitlines()
        assert json.loads(line) == {
            "rho": 0.3, "correct": 4, "extracted": 5, "gold_total": 4, "precision": 0.8, "recall": 1.0,
        }
