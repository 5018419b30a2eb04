"""Byte-level BPE tokenizer.

Uses the byte-to-unicode trick of the published GPT-2 tokenizer, so any
input round-trips exactly (all 256 byte symbols are in the base vocabulary
and unknown bytes can never fail). Reserved marker tokens are registered as
atomic symbols and never produced or split by merges. Merge and vocabulary
files use the published text formats (merges.txt / vocab.json).
"""
import json
import re
from collections import Counter
from typing import Dict, Iterable, List, Sequence, Tuple

_PRETOKEN_RE = re.compile(
    r"'s|'t|'re|'ve|'m|'ll|'d| ?[A-Za-z]+| ?[0-9]+| ?[^\sA-Za-z0-9]+|\s+(?!\S)|\s+"
)

BOS, EOS, PAD_TOK = "<s>", "</s>", "<pad>"
DEFAULT_SPECIALS = [PAD_TOK, BOS, EOS, "<ANSWER>", "</ANSWER>"]


def bytes_to_unicode() -> Dict[int, str]:
    """Reversible mapping from byte values to printable unicode characters."""
    bs = list(range(ord("!"), ord("~") + 1)) + list(range(ord("\xa1"), ord("\xac") + 1)) \
        + list(range(ord("\xae"), ord("\xff") + 1))
    cs = bs[:]
    n = 0
    for b in range(256):
        if b not in bs:
            bs.append(b)
            cs.append(256 + n)
            n += 1
    return dict(zip(bs, [chr(c) for c in cs]))


_BYTE_ENCODER = bytes_to_unicode()
_BYTE_DECODER = {v: k for k, v in _BYTE_ENCODER.items()}


def _get_pairs(word: Tuple[str, ...]):
    return {(word[i], word[i + 1]) for i in range(len(word) - 1)}


class ByteBPE:
    def __init__(self, vocab: Dict[str, int], merges: Sequence[Tuple[str, str]],
                 specials: Sequence[str] = None):
        self.vocab = dict(vocab)
        self.merges = list(merges)
        self.specials = list(specials if specials is not None else DEFAULT_SPECIALS)
        for s in self.specials:
            if s not in self.vocab:
                raise ValueError(f"special token {s!r} missing from vocab")
        self.ranks = {pair: i for i, pair in enumerate(self.merges)}
        self.id_to_token = {i: t for t, i in self.vocab.items()}
        self._special_re = re.compile(
            "(" + "|".join(re.escape(s) for s in sorted(self.specials, key=len, reverse=True)) + ")"
        )
        self._cache: Dict[str, List[str]] = {}

    @classmethod
    def train(cls, texts: Iterable[str], num_merges: int = 200,
              specials: Sequence[str] = None) -> "ByteBPE":
        specials = list(specials if specials is not None else DEFAULT_SPECIALS)
        word_freqs: Counter = Counter()
        for text in texts:
            for pretok in _PRETOKEN_RE.findall(text):
                sym = tuple(_BYTE_ENCODER[b] for b in pretok.encode("utf-8"))
                word_freqs[sym] += 1
        merges: List[Tuple[str, str]] = []
        for _ in range(num_merges):
            pair_freqs: Counter = Counter()
            for word, freq in word_freqs.items():
                for pair in zip(word, word[1:]):
                    pair_freqs[pair] += freq
            if not pair_freqs:
                break
            best = max(pair_freqs.items(), key=lambda kv: (kv[1], kv[0]))[0]
            merges.append(best)
            merged = best[0] + best[1]
            new_freqs: Counter = Counter()
            for word, freq in word_freqs.items():
                out, i = [], 0
                while i < len(word):
                    if i < len(word) - 1 and (word[i], word[i + 1]) == best:
                        out.append(merged)
                        i += 2
                    else:
                        out.append(word[i])
                        i += 1
                new_freqs[tuple(out)] += freq
            word_freqs = new_freqs
        vocab: Dict[str, int] = {}
        for b in range(256):
            vocab[_BYTE_ENCODER[b]] = len(vocab)
        for a, b in merges:
            sym = a + b
            if sym not in vocab:
                vocab[sym] = len(vocab)
        for s in specials:
            vocab[s] = len(vocab)
        return cls(vocab, merges, specials)

    def _bpe_word(self, pretok: str) -> List[str]:
        if pretok in self._cache:
            return self._cache[pretok]
        word = tuple(_BYTE_ENCODER[b] for b in pretok.encode("utf-8"))
        while len(word) > 1:
            pairs = _get_pairs(word)
            best = min(pairs, key=lambda p: self.ranks.get(p, float("inf")))
            if best not in self.ranks:
                break
            out, i = [], 0
            while i < len(word):
                if i < len(word) - 1 and (word[i], word[i + 1]) == best:
                    out.append(word[i] + word[i + 1])
                    i += 2
                else:
                    out.append(word[i])
                    i += 1
            word = tuple(out)
        result = list(word)
        self._cache[pretok] = result
        return result

    def encode(self, text: str) -> List[int]:
        ids: List[int] = []
        for chunk in self._special_re.split(text):
            if not chunk:
                continue
            if chunk in self.vocab and chunk in self.specials:
                ids.append(self.vocab[chunk])
                continue
            for pretok in _PRETOKEN_RE.findall(chunk):
                ids.extend(self.vocab[sym] for sym in self._bpe_word(pretok))
        return ids

    def decode(self, ids: Sequence[int]) -> str:
        parts: List[str] = []
        byte_buf: List[int] = []
        for i in ids:
            tok = self.id_to_token[i]
            if tok in self.specials:
                if byte_buf:
                    parts.append(bytes(byte_buf).decode("utf-8", errors="replace"))
                    byte_buf = []
                parts.append(tok)
            else:
                byte_buf.extend(_BYTE_DECODER[c] for c in tok)
        if byte_buf:
            parts.append(bytes(byte_buf).decode("utf-8", errors="replace"))
        return "".join(parts)

    def __len__(self):
        return len(self.vocab)

    def save(self, vocab_path: str, merges_path: str) -> None:
        with open(vocab_path, "w", encoding="utf-8") as f:
            json.dump(self.vocab, f, ensure_ascii=False)
        with open(merges_path, "w", encoding="utf-8") as f:
            f.write("#version: 0.2\n")
            for a, b in self.merges:
                f.write(f"{a} {b}\n")

    @classmethod
    def load(cls, vocab_path: str, merges_path: str,
             specials: Sequence[str] = None) -> "ByteBPE":
        with open(vocab_path, encoding="utf-8") as f:
            vocab = json.load(f)
        merges = []
        with open(merges_path, encoding="utf-8") as f:
            for line in f:
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                a, b = line.split(" ")
                merges.append((a, b))
        specials = list(specials if specials is not None else DEFAULT_SPECIALS)
        # tolerate vocabularies that predate some specials
        for s in specials:
            vocab.setdefault(s, len(vocab))
        return cls(vocab, merges, specials)
