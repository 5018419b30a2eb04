"""Transformer encoder-decoder for answer-conditioned question generation,
with an optional copy-attention pathway in the decoder."""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import torch
from torch import nn
import torch.nn.functional as F

_EPS = 1e-12


@dataclass
class QGModelConfig:
    vocab_size: int = 0
    d_model: int = 512  # width unreported upstream; standard transformer default
    enc_layers: int = 4
    dec_layers: int = 4
    ff_dim: int = 2048
    heads: int = 8
    copy_attention: bool = True
    positional_encoding: bool = True
    dropout: float = 0.1
    label_smoothing: float = 0.0
    max_src_len: int = 256
    max_tgt_len: int = 64


def desk_config(vocab_size: int) -> QGModelConfig:
    return QGModelConfig(vocab_size=vocab_size, d_model=64, enc_layers=2, dec_layers=2,
                         ff_dim=128, heads=4, dropout=0.0, max_src_len=128, max_tgt_len=48)


class _Positional(nn.Module):
    def __init__(self, dim: int, max_len: int = 1024):
        super().__init__()
        pe = torch.zeros(max_len, dim)
        pos = torch.arange(max_len).unsqueeze(1).float()
        div = torch.exp(torch.arange(0, dim, 2).float() * (-math.log(10000.0) / dim))
        pe[:, 0::2] = torch.sin(pos * div)
        pe[:, 1::2] = torch.cos(pos * div)
        self.register_buffer("pe", pe)

    def forward(self, x):
        return x + self.pe[: x.size(1)].unsqueeze(0)


class QGModel(nn.Module):
    def __init__(self, config: QGModelConfig, pad_id: int):
        super().__init__()
        if config.vocab_size <= 0:
            raise ValueError("vocab_size must be set")
        self.config = config
        self.pad_id = pad_id
        self.embed = nn.Embedding(config.vocab_size, config.d_model, padding_idx=pad_id)
        self.pos = _Positional(config.d_model) if config.positional_encoding else nn.Identity()
        enc_layer = nn.TransformerEncoderLayer(
            config.d_model, config.heads, config.ff_dim, config.dropout, batch_first=True)
        dec_layer = nn.TransformerDecoderLayer(
            config.d_model, config.heads, config.ff_dim, config.dropout, batch_first=True)
        self.encoder = nn.TransformerEncoder(enc_layer, config.enc_layers)
        self.decoder = nn.TransformerDecoder(dec_layer, config.dec_layers)
        self.generator = nn.Linear(config.d_model, config.vocab_size)
        if config.copy_attention:
            self.copy_attn = nn.MultiheadAttention(config.d_model, 1, batch_first=True)
            self.p_gen = nn.Linear(2 * config.d_model, 1)

    def encode(self, src_ids: torch.Tensor):
        pad_mask = src_ids.eq(self.pad_id)
        memory = self.encoder(self.pos(self.embed(src_ids)), src_key_padding_mask=pad_mask)
        return memory, pad_mask

    def decode_log_probs(self, src_ids: torch.Tensor, tgt_in: torch.Tensor,
                         memory=None, mem_pad_mask=None) -> torch.Tensor:
        """Log-probabilities over the vocabulary for every target position.

        tgt_in is the shifted target (starts with BOS). With copy attention
        enabled, the output mixes the generation softmax with a pointer
        distribution over the source tokens."""
        if memory is None:
            memory, mem_pad_mask = self.encode(src_ids)
        t = tgt_in.size(1)
        causal = torch.triu(torch.ones(t, t, dtype=torch.bool), diagonal=1)
        dec = self.decoder(
            self.pos(self.embed(tgt_in)), memory,
            tgt_mask=causal,
            tgt_key_padding_mask=tgt_in.eq(self.pad_id),
            memory_key_padding_mask=mem_pad_mask,
        )
        vocab_probs = F.softmax(self.generator(dec), dim=-1)
        if not self.config.copy_attention:
            return torch.log(vocab_probs + _EPS)
        ctx, attn = self.copy_attn(dec, memory, memory, key_padding_mask=mem_pad_mask)
        p_gen = torch.sigmoid(self.p_gen(torch.cat([dec, ctx], dim=-1)))  # (B, T, 1)
        copy_probs = torch.zeros_like(vocab_probs)
        src_expanded = src_ids.unsqueeze(1).expand(-1, t, -1)
        copy_probs = copy_probs.scatter_add(2, src_expanded, attn * (1.0 - p_gen))
        return torch.log(p_gen * vocab_probs + copy_probs + _EPS)

    def loss(self, src_ids: torch.Tensor, tgt_ids: torch.Tensor) -> torch.Tensor:
        """Cross-entropy of the target question tokens (teacher forcing).

        tgt_ids includes BOS and EOS; padding positions are ignored."""
        tgt_in, tgt_out = tgt_ids[:, :-1], tgt_ids[:, 1:]
        log_probs = self.decode_log_probs(src_ids, tgt_in)
        mask = tgt_out.ne(self.pad_id)
        nll = -log_probs.gather(2, tgt_out.unsqueeze(-1)).squeeze(-1)
        eps = self.config.label_smoothing
        if eps > 0:
            smooth = -log_probs.mean(dim=-1)
            nll = (1 - eps) * nll + eps * smooth
        return (nll * mask).sum() / mask.sum().clamp(min=1)

    def next_log_probs(self, src_ids: torch.Tensor, prefixes: torch.Tensor,
                       memory=None, mem_pad_mask=None) -> torch.Tensor:
        """Distribution over the next token for each prefix (B, V)."""
        log_probs = self.decode_log_probs(src_ids, prefixes, memory, mem_pad_mask)
        return log_probs[:, -1, :]


def pad_batch(seqs: Sequence[Sequence[int]], pad_id: int) -> torch.Tensor:
    max_len = max(len(s) for s in seqs)
    out = torch.full((len(seqs), max_len), pad_id, dtype=torch.long)
    for i, s in enumerate(seqs):
        out[i, : len(s)] = torch.tensor(s, dtype=torch.long)
    return out
