import collections
import json
import re
import string

import pytest

from qnakit.metrics import (QA_ON_QG_REFERENCE, compute_em, compute_f1,
                            evaluate_predictions, fuzzy_match,
                            normalize_answer)

from conftest import FIXTURES


# Oracle: transcription of the official SQuAD 2.0 evaluation functions,
# kept verbatim-equivalent so any divergence in qnakit.metrics shows up.
def oracle_normalize(s):
    def remove_articles(text):
        return re.sub(r"\b(a|an|the)\b", " ", text)

    def white_space_fix(text):
        return " ".join(text.split())

    def remove_punc(text):
        exclude = set(string.punctuation)
        return "".join(ch for ch in text if ch not in exclude)

    return white_space_fix(remove_articles(remove_punc(s.lower())))


def oracle_em(pred, golds):
    if not golds:
        return int(oracle_normalize(pred) == "")
    return max(int(oracle_normalize(pred) == oracle_normalize(g)) for g in golds)


def oracle_f1(pred, golds):
    def f1(a_pred, a_gold):
        pred_toks = oracle_normalize(a_pred).split()
        gold_toks = oracle_normalize(a_gold).split()
        common = collections.Counter(gold_toks) & collections.Counter(pred_toks)
        num_same = sum(common.values())
        if len(gold_toks) == 0 or len(pred_toks) == 0:
            return int(gold_toks == pred_toks)
        if num_same == 0:
            return 0
        precision = 1.0 * num_same / len(pred_toks)
        recall = 1.0 * num_same / len(gold_toks)
        return (2 * precision * recall) / (precision + recall)

    if not golds:
        return int(oracle_normalize(pred) == "")
    return max(f1(pred, g) for g in golds)


@pytest.fixture(scope="module")
def pairs():
    raw = json.loads((FIXTURES / "metrics_pairs.json").read_text())
    return [{"pred": p, "golds": g} for p, g in raw]


class TestOracleEquivalence:
    def test_fixture_pairs_em(self, pairs):
        for rec in pairs:
            assert compute_em(rec["pred"], rec["golds"]) == oracle_em(rec["pred"], rec["golds"]), rec

    def test_fixture_pairs_f1(self, pairs):
        for rec in pairs:
            got = compute_f1(rec["pred"], rec["golds"])
            want = oracle_f1(rec["pred"], rec["golds"])
            assert got == pytest.approx(want, abs=1e-12), rec

    def test_fixture_pairs_normalization(self, pairs):
        for rec in pairs:
            assert normalize_answer(rec["pred"]) == oracle_normalize(rec["pred"])
            for g in rec["golds"]:
                assert normalize_answer(g) == oracle_normalize(g)


class TestHandCases:
    def test_partial_overlap_third(self):
        # 1 shared token, pred 2 tokens, gold 4 tokens: F1 = 2*(1/2)*(1/4)/(3/4) = 1/3
        pred = "UK Parliament"
        golds = ["Parliament of the United Kingdom"]
        assert compute_em(pred, golds) == 0
        assert compute_f1(pred, golds) == pytest.approx(1 / 3, abs=1e-9)

    def test_article_and_punct_insensitive(self):
        assert compute_em("The  Nile.", ["nile"]) == 1

    def test_unanswerable_credit(self):
        assert compute_em("", []) == 1
        assert compute_f1("", []) == 1.0
        assert compute_em("the", []) == 1  # normalizes to empty
        assert compute_em("something", []) == 0

    def test_multiple_golds_max(self):
        assert compute_f1("blue", ["red", "blue whale"]) > compute_f1("blue", ["red"])

    def test_normalization_idempotent(self, pairs):
        for rec in pairs:
            n = normalize_answer(rec["pred"])
            assert normalize_answer(n) == n


class TestFuzzyMatch:
    def test_shared_token(self):
        assert fuzzy_match("300 years", "500 years")

    def test_disjoint(self):
        assert not fuzzy_match("red", "blue")

    def test_articles_ignored(self):
        assert not fuzzy_match("the", "the cat")


class TestEvaluatePredictions:
    def test_aggregation(self):
        preds = {"a": "nile", "b": "wrong", "c": ""}
        golds = {"a": ["The Nile"], "b": ["right"], "c": []}
        rep = evaluate_predictions(preds, golds)
        assert rep.n_examples == 3
        assert rep.em == pytest.approx(100 * 2 / 3)

    def test_missing_prediction_counts_as_empty(self):
        rep = evaluate_predictions({}, {"a": ["x"], "b": []})
        assert rep.em == pytest.approx(50.0)

    def test_empty(self):
        rep = evaluate_predictions({}, {})
        assert rep.n_examples == 0 and rep.em == 0.0


class TestQaOnQg:
    def test_reference_ordering(self):
        r = QA_ON_QG_REFERENCE
        assert r["standard"] < r["rulemimic"] < r["augmented"] < r["human"]

    def test_stub_pipeline_scores(self, stub_checkpoints):
        from qnakit.candidates import annotate
        from qnakit.checkpoint import load_model
        from qnakit.metrics import qa_on_qg_score

        qa_path, qg_path = stub_checkpoints
        qa = load_model(qa_path)
        qg = load_model(qg_path)
        sent = "Nikola Tesla moved to Tomingaj in 1874."
        s = sent.index("Tomingaj")
        qg_input = annotate(sent, (s, s + len("Tomingaj")))
        score = qa_on_qg_score(qg, qa, [(qg_input, sent, "Tomingaj")])
        assert 0.0 <= score <= 1.0

    def test_requires_inputs(self, stub_checkpoints):
        from qnakit.checkpoint import load_model
        from qnakit.metrics import qa_on_qg_score

        qa_path, qg_path = stub_checkpoints
        with pytest.raises(ValueError):
            qa_on_qg_score(load_model(qg_path), load_model(qa_path), [])
