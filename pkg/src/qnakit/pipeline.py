"""Document-to-catalog orchestration.

For each sentence: propose candidate answers, generate one question per
marked input (plus one unmarked input), verify each question against its
3-sentence context window with the QA model (deferring to the QA-predicted
answer), drop unanswerable items, and filter near-duplicates.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Set

from .candidates import SyntaxProvider, annotate, extract_candidates, get_provider
from .corpus import Document, QGInput, _paragraph_from_text
from .metrics import normalize_answer
from .qg.beam import BeamConfig
from .retrieval import RetrievalConfig

logger = logging.getLogger(__name__)


@dataclass
class QAPairItem:
    question: str
    answer: str
    source_sentence_index: int
    qg_log_prob: float
    qa_score: float

    def to_dict(self):
        return {
            "question": self.question,
            "answer": self.answer,
            "sentence_index": self.source_sentence_index,
            "qg_log_prob": self.qg_log_prob,
            "qa_score": self.qa_score,
        }


@dataclass
class FilterConfig:
    overlap_threshold: float = 0.6  # inclusive: exactly 60% counts as redundant
    overlap_mode: str = "coefficient"  # or "jaccard"
    self_redundancy: bool = True


@dataclass
class CatalogResult:
    items: List[QAPairItem]
    warnings: List[str] = field(default_factory=list)


def build_context_window(sentences: Sequence[str], index: int) -> str:
    """Concatenate sentences [index-1, index, index+1], clamped at the ends."""
    if not (0 <= index < len(sentences)):
        raise IndexError(f"sentence index {index} out of range")
    lo = max(0, index - 1)
    hi = min(len(sentences), index + 2)
    return " ".join(sentences[lo:hi])


def _token_set(s: str) -> Set[str]:
    return set(normalize_answer(s).split())


def token_overlap(a: str, b: str, mode: str = "coefficient") -> float:
    """Share of common normalized tokens: overlap coefficient (min
    denominator) by default, Jaccard behind the flag."""
    ta, tb = _token_set(a), _token_set(b)
    if not ta or not tb:
        return 0.0
    inter = len(ta & tb)
    if mode == "jaccard":
        return inter / len(ta | tb)
    return inter / min(len(ta), len(tb))


def _conflict(a: QAPairItem, b: QAPairItem, config: FilterConfig) -> bool:
    if normalize_answer(a.question) == normalize_answer(b.question):
        return True
    if normalize_answer(a.answer) == normalize_answer(b.answer):
        return True
    concat_a = a.question + " " + a.answer
    concat_b = b.question + " " + b.answer
    return token_overlap(concat_a, concat_b, config.overlap_mode) >= config.overlap_threshold


def filter_items(items: Sequence[QAPairItem], config: FilterConfig = None) -> List[QAPairItem]:
    """Greedy elimination in descending QG probability: an item survives iff
    it conflicts with no higher-probability survivor. Survivors keep their
    source order. Ties break by earlier sentence index, then question text."""
    config = config or FilterConfig()
    pool = list(items)
    if config.self_redundancy:
        pool = [
            it for it in pool
            if token_overlap(it.question, it.answer, config.overlap_mode) < config.overlap_threshold
        ]
    order = sorted(range(len(pool)),
                   key=lambda i: (-pool[i].qg_log_prob,
                                  pool[i].source_sentence_index, pool[i].question))
    kept: List[int] = []
    for i in order:
        if not any(_conflict(pool[i], pool[j], config) for j in kept):
            kept.append(i)
    kept_set = set(kept)
    return [it for i, it in enumerate(pool) if i in kept_set]


def generate_catalog(text: str, qg_model, qa_model,
                     provider: SyntaxProvider = None,
                     beam_config: BeamConfig = None,
                     filter_config: FilterConfig = None,
                     max_answer_len: int = 30,
                     candidate_cap: int = 12,
                     include_unmarked: bool = True) -> CatalogResult:
    """Produce the Q&A catalog for a raw text."""
    provider = provider or get_provider("desk")
    beam_config = beam_config or BeamConfig()
    filter_config = filter_config or FilterConfig()
    if not text.strip():
        return CatalogResult([])

    sentence_spans = provider.sentences(text)
    sentences = [s for s, _ in sentence_spans]
    items: List[QAPairItem] = []
    warnings: List[str] = []
    for i, sentence in enumerate(sentences):
        try:
            inputs: List[QGInput] = []
            for cand in extract_candidates(sentence, provider, cap=candidate_cap,
                                           sentence_index=i):
                inputs.append(annotate(sentence, cand))
            if include_unmarked:
                from .tokenization import tokenize

                inputs.append(QGInput(tokenize(sentence), i, None))
            if not inputs:
                continue
            questions = qg_model.generate(inputs, beam_config)
            passage = build_context_window(sentences, i)
            passage_doc = Document(
                f"window-{i}", [_paragraph_from_text(passage, f"window-{i}-p0")])
            for q in questions:
                if not q.text.strip():
                    continue
                pred = qa_model.predict(q.text, passage_doc, RetrievalConfig(k=1),
                                        max_answer_len)
                if not pred.answerable or not pred.answer_text.strip():
                    continue
                items.append(QAPairItem(q.text, pred.answer_text, i, q.log_prob, pred.score))
        except Exception:
            logger.warning("catalog: sentence %d failed, skipping", i, exc_info=True)
            warnings.append(f"sentence {i} skipped after component failure")
    return CatalogResult(filter_items(items, filter_config), warnings)
