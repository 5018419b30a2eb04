"""Beam search over the question-generation decoder.

Scores are unnormalized sequence log-probabilities unless a length penalty
is configured, so beam-1 reduces exactly to greedy decoding.
"""
from dataclasses import dataclass
from typing import List, Tuple

import torch

from .model import QGModel


@dataclass
class BeamConfig:
    beam_size: int = 5
    max_decode_len: int = 48
    length_penalty: float = 0.0  # 0 = no normalization

    def __post_init__(self):
        if self.beam_size < 1:
            raise ValueError("beam_size must be >= 1")


def _final_score(score: float, length: int, penalty: float) -> float:
    if penalty <= 0:
        return score
    return score / (length ** penalty)


def beam_search(model: QGModel, src_ids: List[int], bos_id: int, eos_id: int,
                config: BeamConfig) -> Tuple[List[int], float]:
    """Decode one source sequence; returns (token ids without BOS/EOS,
    unnormalized log-probability of the full hypothesis)."""
    model.eval()
    with torch.no_grad():
        src = torch.tensor([src_ids], dtype=torch.long)
        memory, mem_pad = model.encode(src)
        # (ids, cumulative log prob)
        alive: List[Tuple[List[int], float]] = [([bos_id], 0.0)]
        finished: List[Tuple[List[int], float]] = []
        for _ in range(config.max_decode_len):
            prefixes = torch.tensor([h[0] for h in alive], dtype=torch.long)
            n = len(alive)
            log_probs = model.next_log_probs(
                src.expand(n, -1), prefixes,
                memory.expand(n, -1, -1), mem_pad.expand(n, -1),
            )
            top = torch.topk(log_probs, k=min(config.beam_size, log_probs.size(1)), dim=-1)
            candidates = []
            for i, (ids, score) in enumerate(alive):
                for lp, tok in zip(top.values[i].tolist(), top.indices[i].tolist()):
                    candidates.append((ids + [tok], score + lp))
            candidates.sort(key=lambda h: -h[1])
            alive = []
            for ids, score in candidates:
                if ids[-1] == eos_id:
                    finished.append((ids, score))
                elif len(alive) < config.beam_size:
                    alive.append((ids, score))
                if len(alive) >= config.beam_size and len(finished) >= config.beam_size:
                    break
            if not alive:
                break
        pool = finished if finished else alive
        best_ids, best_score = max(
            pool, key=lambda h: _final_score(h[1], len(h[0]), config.length_penalty))
    out = [t for t in best_ids if t not in (bos_id, eos_id)]
    return out, best_score
