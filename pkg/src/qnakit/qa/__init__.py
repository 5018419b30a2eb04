from .model import AnswerPrediction, QAModel, predict_answer, select_best_span
from .shared_norm import SpanScores, shared_norm_loss, shared_norm_probs

__all__ = [
    "AnswerPrediction", "QAModel", "predict_answer", "select_best_span",
    "SpanScores", "shared_norm_loss", "shared_norm_probs",
]
