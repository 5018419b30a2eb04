import random

import numpy as np
import pytest

from qnakit.corpus import Document, _paragraph_from_text
from qnakit.qa.encoder import CLS, SEP, WordVocab, desk_spec
from qnakit.qa.model import QAModel, predict_answer, select_best_span
from qnakit.retrieval import RetrievalConfig

from conftest import load_qa_fixture


def oracle_best_span(start_probs, end_probs, para_ranges, max_answer_len):
    """Exhaustive enumeration of the candidate set, first-best wins ties."""
    cands = []
    for g, (lo, hi) in enumerate(para_ranges):
        cands.append((g, 0, 0))
        for s in range(lo, hi + 1):
            for e in range(s, hi + 1):
                if e - s + 1 <= max_answer_len:
                    cands.append((g, s, e))
    best = None
    for g, s, e in cands:
        score = start_probs[g][s] * end_probs[g][e]
        if best is None or score > best[0]:
            best = (score, g, s, e)
    return best[1], best[2], best[3]


class TestSelectBestSpan:
    def test_oracle_agreement_random(self):
        rng = np.random.default_rng(21)
        for _ in range(500):
            n_groups = rng.integers(1, 4)
            starts, ends, ranges = [], [], []
            for _ in range(n_groups):
                lo = int(rng.integers(2, 5))
                hi = lo + int(rng.integers(0, 8))
                size = hi + 2
                starts.append(rng.random(size))
                ends.append(rng.random(size))
                ranges.append((lo, hi))
            max_len = int(rng.integers(1, 6))
            got = select_best_span(starts, ends, ranges, max_len)[:3]
            want = oracle_best_span(starts, ends, ranges, max_len)
            assert got == want

    def test_sentinel_wins_when_dominant(self):
        starts = [np.array([0.9, 0.01, 0.01])]
        ends = [np.array([0.9, 0.01, 0.01])]
        g, s, e, score = select_best_span(starts, ends, [(1, 2)], 30)
        assert (s, e) == (0, 0)
        assert score == pytest.approx(0.81)

    def test_max_answer_len_enforced(self):
        starts = [np.array([0.0, 0.9, 0.0, 0.0])]
        ends = [np.array([0.0, 0.0, 0.0, 0.9])]
        g, s, e, _ = select_best_span(starts, ends, [(1, 3)], 2)
        assert e - s + 1 <= 2


class TestPacking:
    def setup_method(self):
        self.vocab = WordVocab.build([["the", "cat", "sat", "on", "mats"]])
        self.model = QAModel.build_desk(self.vocab)

    def test_layout(self):
        para = _paragraph_from_text("the cat sat", "p")
        packed = self.model.pack(["on", "mats"], para)
        assert packed.ids[0] == self.vocab.token_to_id[CLS]
        sep = self.vocab.token_to_id[SEP]
        assert packed.ids[3] == sep and packed.ids[-1] == sep
        assert packed.para_lo == 4
        assert packed.para_hi == 6
        assert packed.n_para_tokens == 3

    def test_truncation_to_budget(self):
        long_para = _paragraph_from_text(" ".join(["cat"] * 500), "p")
        packed = self.model.pack(["the"], long_para)
        assert len(packed.ids) <= self.model.spec.max_sequence_len
        assert packed.n_para_tokens == self.model.spec.max_sequence_len - 4

    def test_overlong_question_rejected(self):
        para = _paragraph_from_text("the cat", "p")
        with pytest.raises(ValueError):
            self.model.pack(["cat"] * 300, para)


class TestPredictOverfit:
    def test_answerable_em(self, qa_overfit_model, qa_fixture_data):
        docs, examples = qa_fixture_data
        by_id = {d.doc_id: d for d in docs}
        hits = 0
        answerable = [e for e in examples if e.is_answerable]
        for ex in answerable:
            pred = predict_answer(qa_overfit_model, ex.question, by_id[ex.doc_ref],
                                  RetrievalConfig(k=2))
            if pred.answerable and pred.answer_text == ex.gold_answers[0].text:
                hits += 1
        assert hits / len(answerable) >= 0.9

    def test_sentinel_behaviour(self, qa_overfit_model, qa_fixture_data):
        docs, examples = qa_fixture_data
        by_id = {d.doc_id: d for d in docs}
        unanswerable = [e for e in examples if not e.is_answerable]
        assert len(unanswerable) == 5
        correct = sum(
            1 for ex in unanswerable
            if not predict_answer(qa_overfit_model, ex.question, by_id[ex.doc_ref],
                                  RetrievalConfig(k=2)).answerable
        )
        assert correct >= 4

    def test_no_answer_fields_exclusive(self, qa_overfit_model, qa_fixture_data):
        docs, examples = qa_fixture_data
        by_id = {d.doc_id: d for d in docs}
        for ex in examples:
            pred = predict_answer(qa_overfit_model, ex.question, by_id[ex.doc_ref],
                                  RetrievalConfig(k=2))
            if pred.answerable:
                assert pred.span is not None and pred.answer_text
            else:
                assert pred.span is None and pred.answer_text == ""
                assert pred.paragraph_ref is None

    def test_answer_is_document_substring(self, qa_overfit_model, qa_fixture_data):
        docs, examples = qa_fixture_data
        by_id = {d.doc_id: d for d in docs}
        for ex in examples[:20]:
            pred = predict_answer(qa_overfit_model, ex.question, by_id[ex.doc_ref],
                                  RetrievalConfig(k=2))
            if pred.answerable:
                doc = by_id[ex.doc_ref]
                assert any(pred.answer_text in p.raw_text for p in doc.paragraphs)

    def test_empty_document_rejected(self, qa_overfit_model):
        with pytest.raises(ValueError):
            predict_answer(qa_overfit_model, "anything?", Document("d", []))
