"""Answer-level evaluation: normalization, exact match, token F1, the
QA-answerability score for generated questions, and fuzzy matching.

Normalization and EM/F1 follow the behavior of the official SQuAD
evaluation script: lowercase, strip punctuation, drop English articles,
collapse whitespace; F1 over token multisets, max over gold answers.
"""
import collections
import logging
import re
import string
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

logger = logging.getLogger(__name__)

_ARTICLES_RE = re.compile(r"\b(a|an|the)\b")


def normalize_answer(s: str) -> str:
    s = s.lower()
    s = "".join(ch for ch in s if ch not in string.punctuation)
    s = _ARTICLES_RE.sub(" ", s)
    return " ".join(s.split())


def get_tokens(s: str) -> List[str]:
    return normalize_answer(s).split()


def compute_em(pred: str, golds: Sequence[str]) -> int:
    """1 iff the normalized prediction equals any normalized gold. An empty
    gold list means unanswerable: credit iff the prediction normalizes empty."""
    if not golds:
        return int(normalize_answer(pred) == "")
    return int(any(normalize_answer(pred) == normalize_answer(g) for g in golds))


def _f1_single(pred: str, gold: str) -> float:
    pred_toks = get_tokens(pred)
    gold_toks = get_tokens(gold)
    if not pred_toks or not gold_toks:
        return float(pred_toks == gold_toks)
    common = collections.Counter(pred_toks) & collections.Counter(gold_toks)
    n_common = sum(common.values())
    if n_common == 0:
        return 0.0
    precision = n_common / len(pred_toks)
    recall = n_common / len(gold_toks)
    return 2 * precision * recall / (precision + recall)


def compute_f1(pred: str, golds: Sequence[str]) -> float:
    if not golds:
        return float(normalize_answer(pred) == "")
    return max(_f1_single(pred, g) for g in golds)


def fuzzy_match(pred: str, gold: str) -> bool:
    """True iff the normalized token sets share at least one token.

    Deliberately permissive ("300 years" vs "500 years" matches)."""
    return bool(set(get_tokens(pred)) & set(get_tokens(gold)))


@dataclass
class EvalReport:
    em: float  # percentage in [0, 100]
    f1: float
    n_examples: int
    per_example: List[Dict] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {"em": self.em, "f1": self.f1, "n_examples": self.n_examples}


def evaluate_predictions(predictions: Dict[str, str],
                         golds: Dict[str, Sequence[str]]) -> EvalReport:
    """Aggregate EM/F1 over {qid: prediction} vs {qid: gold answers}."""
    records = []
    for qid, gold in golds.items():
        pred = predictions.get(qid, "")
        records.append({"qid": qid, "em": compute_em(pred, gold), "f1": compute_f1(pred, gold)})
    n = len(records)
    if n == 0:
        return EvalReport(0.0, 0.0, 0)
    em = 100.0 * sum(r["em"] for r in records) / n
    f1 = 100.0 * sum(r["f1"] for r in records) / n
    return EvalReport(em, f1, n, records)


def qa_on_qg_score(qg_model, qa_model, test_inputs, beam_config=None) -> float:
    """Answerability of generated questions, scored by the QA model.

    test_inputs: list of (QGInput, paragraph_text, conditioning_answer_text).
    For each input, generate one question, answer it against the paragraph,
    and score the predicted answer against the conditioning span with F1.
    Returns the mean; failed generations score 0 (counted).
    """
    from .corpus import Document, _paragraph_from_text
    from .retrieval import RetrievalConfig

    if not test_inputs:
        raise ValueError("no test inputs")
    scores = []
    failures = 0
    for qg_input, paragraph_text, answer_text in test_inputs:
        try:
            question = qg_model.generate([qg_input], beam_config)[0]
            doc = Document("qg-eval", [_paragraph_from_text(paragraph_text, "qg-eval-p0")])
            pred = qa_model.predict(question.text, doc, RetrievalConfig(k=1))
        except Exception:
            logger.warning("qa_on_qg_score: generation/answering failed", exc_info=True)
            failures += 1
            scores.append(0.0)
            continue
        pred_text = pred.answer_text if pred.answerable else ""
        scores.append(compute_f1(pred_text, [answer_text]))
    if failures:
        logger.warning("qa_on_qg_score: %d inputs failed and scored 0", failures)
    return sum(scores) / len(scores)


# Reference values from the full-scale automated evaluation; kept for
# comparison presets, not reproducible at desk scale.
QA_ON_QG_REFERENCE = {
    "standard": 0.354,
    "rulemimic": 0.503,
    "augmented": 0.551,
    "human": 0.718,
}
