"""Contextual encoders behind a common interface: token ids in, vectors out.

Two presets: a small randomly initialized transformer ("desk") that runs
anywhere, and the 12-layer pretrained base encoder ("base") for production.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import torch
from torch import nn

PAD, CLS, SEP, UNK = "[PAD]", "[CLS]", "[SEP]", "[UNK]"
SPECIALS = [PAD, CLS, SEP, UNK]


@dataclass
class EncoderSpec:
    layers: int
    hidden_dim: int
    heads: int
    max_sequence_len: int
    pretrained: bool = False
    vocab_size: int = 0


def desk_spec(vocab_size: int = 0) -> EncoderSpec:
    return EncoderSpec(layers=2, hidden_dim=64, heads=4, max_sequence_len=128,
                       pretrained=False, vocab_size=vocab_size)


def base_spec() -> EncoderSpec:
    return EncoderSpec(layers=12, hidden_dim=768, heads=12, max_sequence_len=384,
                       pretrained=True, vocab_size=30522)


@dataclass
class WordVocab:
    """Word-level vocabulary for the desk encoder (lowercased)."""

    token_to_id: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for s in SPECIALS:
            if s not in self.token_to_id:
                self.token_to_id[s] = len(self.token_to_id)

    @classmethod
    def build(cls, token_seqs: Sequence[Sequence[str]]) -> "WordVocab":
        vocab = cls()
        for seq in token_seqs:
            for tok in seq:
                vocab.token_to_id.setdefault(tok.lower(), len(vocab.token_to_id))
        return vocab

    def __len__(self):
        return len(self.token_to_id)

    def encode(self, tokens: Sequence[str]) -> List[int]:
        unk = self.token_to_id[UNK]
        return [self.token_to_id.get(t.lower(), unk) for t in tokens]


class PositionalEncoding(nn.Module):
    def __init__(self, dim: int, max_len: int):
        super().__init__()
        pe = torch.zeros(max_len, dim)
        pos = torch.arange(max_len).unsqueeze(1).float()
        div = torch.exp(torch.arange(0, dim, 2).float() * (-math.log(10000.0) / dim))
        pe[:, 0::2] = torch.sin(pos * div)
        pe[:, 1::2] = torch.cos(pos * div)
        self.register_buffer("pe", pe)

    def forward(self, x):
        return x + self.pe[: x.size(1)].unsqueeze(0)


class DeskEncoder(nn.Module):
    """Small transformer encoder with the same call shape as the base model."""

    def __init__(self, spec: EncoderSpec):
        super().__init__()
        if spec.vocab_size <= 0:
            raise ValueError("DeskEncoder needs a concrete vocab_size")
        self.spec = spec
        self.embed = nn.Embedding(spec.vocab_size, spec.hidden_dim)
        self.pos = PositionalEncoding(spec.hidden_dim, spec.max_sequence_len)
        layer = nn.TransformerEncoderLayer(
            d_model=spec.hidden_dim, nhead=spec.heads,
            dim_feedforward=spec.hidden_dim * 4, dropout=0.0, batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, spec.layers)

    def forward(self, ids: torch.Tensor, pad_mask: torch.Tensor = None) -> torch.Tensor:
        x = self.pos(self.embed(ids))
        return self.encoder(x, src_key_padding_mask=pad_mask)


class PretrainedEncoder(nn.Module):
    """Adapter around the published 12-layer pretrained encoder.

    Imported lazily: the desk preset and the whole test suite never load it.
    """

    def __init__(self, model_name: str = "bert-base-uncased"):
        super().__init__()
        from transformers import AutoModel, AutoTokenizer  # heavyweight, optional

        self.spec = base_spec()
        self.tokenizer = AutoTokenizer.from_pretrained(model_name)
        self.model = AutoModel.from_pretrained(model_name)

    def forward(self, ids: torch.Tensor, pad_mask: torch.Tensor = None) -> torch.Tensor:
        attn = None if pad_mask is None else (~pad_mask).long()
        return self.model(input_ids=ids, attention_mask=attn).last_hidden_state
