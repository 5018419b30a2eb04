"""Span-prediction QA model: encoder plus a start/end scoring head, with
shared normalization across the retrieved paragraphs of a question."""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Set, Tuple

import numpy as np
import torch
from torch import nn

from ..corpus import Document, Paragraph
from ..retrieval import RetrievalConfig, rank_paragraphs
from ..tokenization import tokenize
from .encoder import CLS, PAD, SEP, DeskEncoder, EncoderSpec, WordVocab
from .shared_norm import SpanScores, shared_norm_probs

DEFAULT_MAX_ANSWER_LEN = 30


@dataclass
class AnswerPrediction:
    answerable: bool
    paragraph_ref: Optional[str]
    span: Optional[Tuple[int, int]]  # paragraph-local token indices, inclusive
    answer_text: str
    score: float  # joint log-probability under shared normalization


class PackedInput:
    """One (question, paragraph) pair packed as [CLS] q [SEP] p [SEP]."""

    def __init__(self, ids: List[int], para_lo: int, para_hi: int, n_para_tokens: int):
        self.ids = ids
        self.para_lo = para_lo  # packed position of the first paragraph token
        self.para_hi = para_hi  # packed position of the last paragraph token
        self.n_para_tokens = n_para_tokens  # after truncation


class QAModel(nn.Module):
    def __init__(self, encoder: nn.Module, vocab: WordVocab, spec: EncoderSpec):
        super().__init__()
        self.encoder = encoder
        self.vocab = vocab
        self.spec = spec
        self.span_head = nn.Linear(spec.hidden_dim, 2)

    @classmethod
    def build_desk(cls, vocab: WordVocab, spec: EncoderSpec = None) -> "QAModel":
        from .encoder import desk_spec

        spec = spec or desk_spec()
        spec.vocab_size = len(vocab)
        return cls(DeskEncoder(spec), vocab, spec)

    def pack(self, question_tokens: Sequence[str], paragraph: Paragraph) -> PackedInput:
        q_ids = self.vocab.encode(question_tokens)
        budget = self.spec.max_sequence_len - len(q_ids) - 3
        if budget < 1:
            raise ValueError("question exceeds the sequence length budget")
        para_tokens = paragraph.tokens[:budget]
        p_ids = self.vocab.encode(para_tokens)
        cls_id = self.vocab.token_to_id[CLS]
        sep_id = self.vocab.token_to_id[SEP]
        ids = [cls_id] + q_ids + [sep_id] + p_ids + [sep_id]
        lo = 2 + len(q_ids)
        return PackedInput(ids, lo, lo + len(p_ids) - 1, len(p_ids))

    def logits(self, packed: Sequence[PackedInput]) -> Tuple[List[torch.Tensor], List[torch.Tensor]]:
        """Start/end logit vectors, one pair per paragraph, padding sliced off."""
        pad_id = self.vocab.token_to_id[PAD]
        max_len = max(len(p.ids) for p in packed)
        ids = torch.full((len(packed), max_len), pad_id, dtype=torch.long)
        pad_mask = torch.ones(len(packed), max_len, dtype=torch.bool)
        for i, p in enumerate(packed):
            ids[i, : len(p.ids)] = torch.tensor(p.ids)
            pad_mask[i, : len(p.ids)] = False
        hidden = self.encoder(ids, pad_mask)
        scores = self.span_head(hidden)  # (batch, len, 2)
        starts = [scores[i, : len(p.ids), 0] for i, p in enumerate(packed)]
        ends = [scores[i, : len(p.ids), 1] for i, p in enumerate(packed)]
        return starts, ends

    def span_scores(self, question_tokens: Sequence[str],
                    paragraphs: Sequence[Paragraph]) -> Tuple[SpanScores, List[PackedInput]]:
        packed = [self.pack(question_tokens, p) for p in paragraphs]
        with torch.no_grad():
            starts, ends = self.logits(packed)
        scores = SpanScores(
            start_logits=[s.numpy().astype(np.float64) for s in starts],
            end_logits=[e.numpy().astype(np.float64) for e in ends],
            paragraph_refs=[p.para_id for p in paragraphs],
        )
        return scores, packed

    def predict(self, question: str, document: Document,
                retrieval_cfg: "RetrievalConfig" = None,
                max_answer_len: int = DEFAULT_MAX_ANSWER_LEN) -> "AnswerPrediction":
        return predict_answer(self, question, document, retrieval_cfg, max_answer_len)

    def training_loss(self, question_tokens: Sequence[str], paragraphs: Sequence[Paragraph],
                      gold_spans: Sequence[Tuple[int, int, int]]) -> torch.Tensor:
        """Shared-norm loss for one question with its retrieved paragraphs.

        gold_spans: (paragraph index within `paragraphs`, start, end) in
        paragraph-local token indices; empty means unanswerable (sentinel).
        """
        packed = [self.pack(question_tokens, p) for p in paragraphs]
        starts, ends = self.logits(packed)
        gold_starts, gold_ends = [], []
        for g, s, e in gold_spans:
            pk = packed[g]
            if s < pk.n_para_tokens:
                gold_starts.append((g, pk.para_lo + s))
            if e < pk.n_para_tokens:
                gold_ends.append((g, pk.para_lo + e))
        if not gold_starts:
            gold_starts = [(g, 0) for g in range(len(packed))]
        if not gold_ends:
            gold_ends = [(g, 0) for g in range(len(packed))]
        loss = _torch_group_nll(starts, gold_starts) + _torch_group_nll(ends, gold_ends)
        return loss


def _torch_group_nll(groups: List[torch.Tensor], gold: List[Tuple[int, int]]) -> torch.Tensor:
    flat = torch.cat(groups)
    log_z = torch.logsumexp(flat, dim=0)
    offsets = np.cumsum([0] + [len(g) for g in groups])
    gold_idx = torch.tensor([offsets[g] + p for g, p in gold], dtype=torch.long)
    gold_logits = flat[gold_idx]
    return log_z - torch.logsumexp(gold_logits, dim=0)


def select_best_span(start_probs: Sequence[np.ndarray], end_probs: Sequence[np.ndarray],
                     para_ranges: Sequence[Tuple[int, int]],
                     max_answer_len: int) -> Tuple[int, int, int, float]:
    """Argmax of start_prob * end_prob over the valid candidate set.

    Candidates are the per-paragraph sentinel (0, 0) plus every in-paragraph
    span with start <= end and length <= max_answer_len. Returns
    (group, start, end, probability); ties go to the earliest candidate.
    """
    best = None
    for g, (lo, hi) in enumerate(para_ranges):
        cand = (start_probs[g][0] * end_probs[g][0], g, 0, 0)
        if best is None or cand[0] > best[0]:
            best = cand
        for s in range(lo, hi + 1):
            ps = start_probs[g][s]
            for e in range(s, min(s + max_answer_len - 1, hi) + 1):
                score = ps * end_probs[g][e]
                if score > best[0]:
                    best = (score, g, s, e)
    score, g, s, e = best
    return g, s, e, float(score)


def predict_answer(model: QAModel, question: str, document: Document,
                   retrieval_cfg: RetrievalConfig = None,
                   max_answer_len: int = DEFAULT_MAX_ANSWER_LEN) -> AnswerPrediction:
    """Retrieve top-k paragraphs, shared-normalize span scores, and return the
    best span or a no-answer prediction (sentinel end index 0)."""
    if not document.paragraphs:
        raise ValueError("document has no paragraphs")
    retrieval_cfg = retrieval_cfg or RetrievalConfig()
    question_tokens = tokenize(question)
    ranked = rank_paragraphs(question_tokens, document.paragraphs, retrieval_cfg)
    paragraphs = [r.paragraph for r in ranked]
    scores, packed = model.span_scores(question_tokens, paragraphs)
    start_probs = shared_norm_probs(scores.start_logits)
    end_probs = shared_norm_probs(scores.end_logits)
    ranges = [(p.para_lo, p.para_hi) for p in packed]
    g, s, e, prob = select_best_span(start_probs, end_probs, ranges, max_answer_len)
    log_score = float(np.log(max(prob, 1e-300)))
    if e == 0:  # no-answer sentinel
        return AnswerPrediction(False, None, None, "", log_score)
    paragraph = paragraphs[g]
    local_s = s - packed[g].para_lo
    local_e = e - packed[g].para_lo
    text = paragraph.raw_text[
        paragraph.char_offsets[local_s][0] : paragraph.char_offsets[local_e][1]
    ]
    return AnswerPrediction(True, paragraph.para_id, (local_s, local_e), text, log_score)
