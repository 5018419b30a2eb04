import random

import pytest

from qnakit.qg.bpe import (BOS, DEFAULT_SPECIALS, EOS, ByteBPE,
                           bytes_to_unicode)

CORPUS = [
    "Nikola Tesla moved to Tomingaj in 1874.",
    "The steam engine was improved by Watt.",
    "What is the capital of France?",
    "Where does the river flow?",
]


@pytest.fixture(scope="module")
def bpe():
    return ByteBPE.train(CORPUS, num_merges=100)


class TestByteMap:
    def test_bijective_over_all_bytes(self):
        m = bytes_to_unicode()
        assert len(m) == 256
        assert len(set(m.values())) == 256

    def test_printable_ascii_maps_to_itself(self):
        m = bytes_to_unicode()
        for b in range(ord("!"), ord("~") + 1):
            assert m[b] == chr(b)


class TestRoundtrip:
    def test_training_corpus(self, bpe):
        for text in CORPUS:
            assert bpe.decode(bpe.encode(text)) == text

    def test_unseen_text(self, bpe):
        assert bpe.decode(bpe.encode("zzz qwxyj 42!")) == "zzz qwxyj 42!"

    def test_unicode(self, bpe):
        for text in ["café au lait", "naïve résumé", "日本語のテスト", "emoji 🙂 ok"]:
            assert bpe.decode(bpe.encode(text)) == text

    def test_random_ascii_strings(self, bpe):
        rng = random.Random(9)
        chars = "abcdefghij ,.?!0123456789"
        for _ in range(200):
            text = "".join(rng.choice(chars) for _ in range(rng.randint(0, 40)))
            assert bpe.decode(bpe.encode(text)) == text


class TestSpecials:
    def test_atomic_markers(self, bpe):
        ids = bpe.encode("He lived in <ANSWER> Tomingaj </ANSWER> .")
        assert bpe.vocab["<ANSWER>"] in ids
        assert bpe.vocab["</ANSWER>"] in ids
        assert ids.count(bpe.vocab["<ANSWER>"]) == 1

    def test_specials_present_in_vocab(self, bpe):
        for s in DEFAULT_SPECIALS:
            assert s in bpe.vocab

    def test_specials_decode_intact(self, bpe):
        text = "x <ANSWER> y </ANSWER> z"
        assert bpe.decode(bpe.encode(text)) == text

    def test_bos_eos_distinct(self, bpe):
        assert bpe.vocab[BOS] != bpe.vocab[EOS]


class TestPersistence:
    def test_save_load_identical_encoding(self, bpe, tmp_path):
        vpath, mpath = str(tmp_path / "vocab.json"), str(tmp_path / "merges.txt")
        bpe.save(vpath, mpath)
        back = ByteBPE.load(vpath, mpath)
        for text in CORPUS + ["held out text 99"]:
            assert back.encode(text) == bpe.encode(text)

    def test_merges_file_format(self, bpe, tmp_path):
        vpath, mpath = str(tmp_path / "vocab.json"), str(tmp_path / "merges.txt")
        bpe.save(vpath, mpath)
        lines = open(mpath).read().splitlines()
        assert lines[0].startswith("#version:")
        for line in lines[1:]:
            assert len(line.split(" ")) == 2

    def test_vocab_size_accounting(self, bpe):
        assert len(bpe) == 256 + len(bpe.merges) + len(DEFAULT_SPECIALS)
