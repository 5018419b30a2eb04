"""Deterministic stand-in QA model for golden-file and service tests."""
from typing import Optional

from ..checkpoint import Checkpoint
from ..corpus import Document
from ..retrieval import RetrievalConfig, rank_paragraphs
from ..tokenization import tokenize
from .model import DEFAULT_MAX_ANSWER_LEN, AnswerPrediction


class StubQAModel:
    """Answers with the first entity-like span of the top-ranked paragraph
    that does not already occur in the question. No learned weights; output
    depends only on the inputs."""

    kind = "qa-stub"

    def __init__(self, version: str = "stub-1"):
        self.version = version

    @classmethod
    def from_checkpoint(cls, ckpt: Checkpoint) -> "StubQAModel":
        return cls(ckpt.config.get("version", "stub-1"))

    def to_checkpoint(self) -> Checkpoint:
        return Checkpoint(kind=self.kind, config={"version": self.version},
                          meta={"model_version": self.version})

    def predict(self, question: str, document: Document,
                retrieval_cfg: Optional[RetrievalConfig] = None,
                max_answer_len: int = DEFAULT_MAX_ANSWER_LEN) -> AnswerPrediction:
        from ..candidates import get_provider

        retrieval_cfg = retrieval_cfg or RetrievalConfig()
        ranked = rank_paragraphs(tokenize(question), document.paragraphs, retrieval_cfg)
        paragraph = ranked[0].paragraph
        provider = get_provider("desk")
        q_tokens = {t.lower() for t in tokenize(question)}
        spans = list(provider.entities(paragraph.raw_text))
        spans += [(s, e, None) for s, e in provider.noun_chunks(paragraph.raw_text)]
        for s, e, _ in spans:
            text = paragraph.raw_text[s:e]
            span_tokens = {t.lower() for t in tokenize(text)}
            if not span_tokens or span_tokens <= q_tokens:
                continue
            tok_span = _token_span(paragraph, s, e)
            if tok_span is None or tok_span[1] - tok_span[0] + 1 > max_answer_len:
                continue
            return AnswerPrediction(True, paragraph.para_id, tok_span, text, -0.5)
        return AnswerPrediction(False, None, None, "", -3.0)


def _token_span(paragraph, char_start, char_end):
    lo = hi = None
    for i, (s, e) in enumerate(paragraph.char_offsets):
        if e > char_start and s < char_end:
            if lo is None:
                lo = i
            hi = i
    return None if lo is None else (lo, hi)
