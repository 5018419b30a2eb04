import json
import random

import pytest

from qnakit.corpus import (ANSWER_CLOSE, ANSWER_OPEN, CorpusError, chunk_document,
                           chunk_text, chunk_tokens, derive_qg_examples, insert_markers,
                           load_augmentation, load_newsqa, load_qg_examples,
                           load_squad_format, save_qg_examples, strip_markers)
from qnakit.tokenization import tokenize

from conftest import FIXTURES

SQUAD = str(FIXTURES / "squad_mini.json")


class TestChunking:
    def test_seven_tokens_chunk_three(self):
        chunks = chunk_tokens(list("abcdefg"), 3)
        assert [len(c) for c in chunks] == [3, 3, 1]

    def test_exact_fit(self):
        toks = [f"t{i}" for i in range(300)]
        chunks = chunk_tokens(toks, 300)
        assert len(chunks) == 1 and len(chunks[0]) == 300

    def test_empty_input(self):
        assert chunk_tokens([], 5) == []

    def test_partition_property(self):
        rng = random.Random(0)
        for _ in range(200):
            n = rng.randint(0, 40)
            toks = [f"w{rng.randint(0, 9)}" for _ in range(n)]
            size = rng.randint(1, 12)
            chunks = chunk_tokens(toks, size)
            assert sum(chunks, []) == toks
            assert all(len(c) == size for c in chunks[:-1])

    def test_chunk_text_raw_substrings(self):
        text = "alpha beta gamma delta epsilon zeta eta"
        for para in chunk_text(text, 3):
            assert para.raw_text in text
            for tok, (s, e) in zip(para.tokens, para.char_offsets):
                assert para.raw_text[s:e] == tok

    def test_chunk_document_offsets_roundtrip(self):
        paras = chunk_document(["a", "bb", "ccc"], 2)
        for p in paras:
            for tok, (s, e) in zip(p.tokens, p.char_offsets):
                assert p.raw_text[s:e] == tok


class TestMarkers:
    def test_roundtrip_random(self):
        rng = random.Random(1)
        for _ in range(300):
            n = rng.randint(1, 15)
            toks = [f"w{rng.randint(0, 30)}" for _ in range(n)]
            s = rng.randrange(n)
            e = rng.randrange(s, n)
            marked = insert_markers(toks, s, e)
            back, span = strip_markers(marked)
            assert back == toks
            assert span == (s, e)

    def test_whole_sentence_span(self):
        toks = ["a", "b", "c"]
        marked = insert_markers(toks, 0, 2)
        assert marked == [ANSWER_OPEN, "a", "b", "c", ANSWER_CLOSE]

    def test_out_of_bounds(self):
        with pytest.raises(ValueError):
            insert_markers(["a"], 0, 1)


class TestSquadLoading:
    def test_basic_load(self, caplog):
        docs, examples = load_squad_format(SQUAD)
        assert len(docs) == 2
        by_id = {e.qid: e for e in examples}
        # "1874" aligns to exactly one token
        t1 = by_id["t1"]
        g = t1.gold_answers[0]
        para = docs[0].paragraphs[g.para_index]
        assert para.tokens[g.start : g.end + 1] == ["1874"]
        # full-paragraph answer covers the whole span
        s1 = by_id["s1"]
        g = s1.gold_answers[0]
        assert (g.start, g.end) == (0, len(docs[1].paragraphs[0].tokens) - 1)
        # misaligned record skipped
        assert "s2" not in by_id
        # unanswerable kept under v2
        assert not by_id["t3"].is_answerable

    def test_v1_filter_drops_unanswerable(self):
        _, examples = load_squad_format(SQUAD, "v1-answerable-only")
        assert all(e.is_answerable for e in examples)

    def test_span_text_consistency(self):
        docs, examples = load_squad_format(SQUAD)
        by_id = {d.doc_id: d for d in docs}
        for ex in examples:
            for g in ex.gold_answers:
                para = by_id[ex.doc_ref].paragraphs[g.para_index]
                assert para.tokens[g.start : g.end + 1] == tokenize(g.text)

    def test_deterministic(self):
        a = load_squad_format(SQUAD)
        b = load_squad_format(SQUAD)
        assert [e.qid for e in a[1]] == [e.qid for e in b[1]]

    def test_malformed_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(CorpusError):
            load_squad_format(str(bad))


class TestNewsQA:
    def test_chunking_and_span_reassignment(self):
        docs, examples = load_newsqa(str(FIXTURES / "newsqa_mini.json"), chunk_size=300)
        assert len(docs[0].paragraphs) == 3  # 650 tokens -> 300/300/50
        answerable = [e for e in examples if e.is_answerable]
        g = answerable[0].gold_answers[0]
        assert g.para_index == 1  # tokens 310..312 live in the second chunk
        assert g.text == "word310 word311 word312"
        assert any(not e.is_answerable for e in examples)


class TestQGDerivation:
    def test_marker_insertion(self):
        docs, examples = load_squad_format(SQUAD, "v1-answerable-only")
        qg = derive_qg_examples(docs, examples)
        assert qg, "expected QG examples"
        for ex in qg:
            stripped, span = strip_markers(ex.input.sentence_tokens)
            assert span is not None
            assert ex.target_question

    def test_sentence_isolation(self):
        docs, examples = load_squad_format(SQUAD, "v1-answerable-only")
        qg = derive_qg_examples(docs, examples)
        marked_tomingaj = [
            e for e in qg
            if e.input.sentence_tokens[e.input.sentence_tokens.index(ANSWER_OPEN) + 1]
            == "Tomingaj"
        ]
        assert len(marked_tomingaj) == 1


class TestAugmentation:
    def test_three_record_fixture(self, caplog):
        examples = load_augmentation(str(FIXTURES / "augmentation.jsonl"))
        assert len(examples) == 2
        assert any("skipped" in r.message for r in caplog.records)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.jsonl"
        p.write_text("")
        assert load_augmentation(str(p)) == []

    def test_shape_matches_derivation(self):
        examples = load_augmentation(str(FIXTURES / "augmentation.jsonl"))
        toks = examples[0].input.sentence_tokens
        assert ANSWER_OPEN in toks and ANSWER_CLOSE in toks
        assert toks[toks.index(ANSWER_OPEN) + 1] == "Paris"


class TestCacheRoundtrip:
    def test_jsonl_roundtrip(self, tmp_path):
        examples = load_augmentation(str(FIXTURES / "augmentation.jsonl"))
        p = tmp_path / "cache.jsonl"
        save_qg_examples(str(p), examples)
        back = load_qg_examples(str(p))
        assert [e.input.sentence_tokens for e in back] == \
            [e.input.sentence_tokens for e in examples]
        assert [e.target_question for e in back] == [e.target_question for e in examples]
