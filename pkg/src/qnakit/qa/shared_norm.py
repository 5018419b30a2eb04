"""Shared normalization across the retrieved paragraphs of one question.

Start/end logits from each paragraph are normalized jointly, so span scores
are comparable across paragraphs. The loss marginalizes over multiple gold
occurrences by summing their probability mass.
"""
import logging
from dataclasses import dataclass
from typing import List, Sequence, Set, Tuple

import numpy as np

logger = logging.getLogger(__name__)

# Gold position within a group set: (group index, position index).
Position = Tuple[int, int]


@dataclass
class SpanScores:
    start_logits: List[np.ndarray]  # one vector per paragraph
    end_logits: List[np.ndarray]
    paragraph_refs: List[str]


def shared_norm_probs(groups: Sequence[np.ndarray]) -> List[np.ndarray]:
    """Softmax over the concatenation of all groups, returned per group."""
    if not groups or all(len(g) == 0 for g in groups):
        raise ValueError("no candidates")
    flat = np.concatenate([np.asarray(g, dtype=np.float64) for g in groups])
    if not np.all(np.isfinite(flat)):
        raise ValueError("logits must be finite")
    flat = flat - flat.max()
    exps = np.exp(flat)
    probs = exps / exps.sum()
    out, pos = [], 0
    for g in groups:
        out.append(probs[pos : pos + len(g)])
        pos += len(g)
    return out


def _gold_mass_and_grad(groups: Sequence[np.ndarray], gold: Set[Position]):
    probs = shared_norm_probs(groups)
    mass = sum(probs[g][p] for g, p in gold)
    # d(-ln mass)/dx_i = p_i - [i in gold] * p_i / mass
    grads = [p.copy() for p in probs]
    for g, p in gold:
        grads[g][p] -= probs[g][p] / mass
    return mass, grads


def _validate_gold(groups: Sequence[np.ndarray], gold: Set[Position]) -> Set[Position]:
    """Drop gold positions outside the encoded range; fall back to the
    sentinel (position 0 of every group) if all are dropped."""
    valid = {(g, p) for g, p in gold if 0 <= g < len(groups) and 0 <= p < len(groups[g])}
    dropped = len(gold) - len(valid)
    if dropped:
        logger.warning("shared_norm_loss: dropped %d out-of-range gold positions", dropped)
    if not valid:
        valid = {(g, 0) for g in range(len(groups)) if len(groups[g]) > 0}
    return valid


def sentinel_positions(groups: Sequence[np.ndarray]) -> Set[Position]:
    """Gold positions encoding "no answer": position 0 of every paragraph."""
    return {(g, 0) for g in range(len(groups)) if len(groups[g]) > 0}


def shared_norm_loss(scores: SpanScores, gold_starts: Set[Position],
                     gold_ends: Set[Position]) -> float:
    """Negative log of the shared-norm mass on gold starts, plus the same for
    gold ends. Empty gold sets mean "no answer" and map to the sentinel."""
    loss, _, _ = shared_norm_loss_grad(scores, gold_starts, gold_ends)
    return loss


def shared_norm_loss_grad(scores: SpanScores, gold_starts: Set[Position],
                          gold_ends: Set[Position]):
    """Loss plus analytic gradients w.r.t. the start and end logit groups."""
    gold_starts = _validate_gold(scores.start_logits, gold_starts or set())
    gold_ends = _validate_gold(scores.end_logits, gold_ends or set())
    start_mass, start_grads = _gold_mass_and_grad(scores.start_logits, gold_starts)
    end_mass, end_grads = _gold_mass_and_grad(scores.end_logits, gold_ends)
    loss = -float(np.log(start_mass)) - float(np.log(end_mass))
    return max(loss, 0.0), start_grads, end_grads
