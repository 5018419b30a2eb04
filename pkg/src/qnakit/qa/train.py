"""Training loop for the shared-norm QA model."""
import logging
import random
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence

import torch

from ..checkpoint import Checkpoint
from ..corpus import Document, QAExample
from ..retrieval import RetrievalConfig, rank_paragraphs
from ..tokenization import tokenize
from .encoder import EncoderSpec, WordVocab, base_spec, desk_spec
from .model import DEFAULT_MAX_ANSWER_LEN, QAModel, predict_answer

logger = logging.getLogger(__name__)


@dataclass
class QATrainConfig:
    k_train: int = 4
    batch_size: int = 16
    epochs: int = 3
    learning_rate: float = 3e-5
    max_answer_len: int = DEFAULT_MAX_ANSWER_LEN
    seed: int = 13
    preset: str = "desk"


def reference_preset() -> Dict:
    """Config of the full-scale production run: not runnable at desk scale,
    kept as the reference preset."""
    return {
        "encoder": asdict(base_spec()),
        "train": asdict(QATrainConfig(k_train=4, epochs=3, learning_rate=3e-5,
                                      batch_size=48, preset="base")),
    }


class TrainingError(Exception):
    pass


def _prepare_instances(examples: Sequence[QAExample], documents: Sequence[Document],
                       k_train: int):
    """Pair each question with its top-k retrieved paragraphs and map gold
    spans onto the retrieved set."""
    docs = {d.doc_id: d for d in documents}
    cfg = RetrievalConfig(k=k_train)
    instances = []
    for ex in examples:
        doc = docs[ex.doc_ref]
        ranked = rank_paragraphs(tokenize(ex.question), doc.paragraphs, cfg)
        paragraphs = [r.paragraph for r in ranked]
        index_of = {r.index: pos for pos, r in enumerate(ranked)}
        gold = []
        for ga in ex.gold_answers:
            if ga.para_index in index_of:
                gold.append((index_of[ga.para_index], ga.start, ga.end))
        instances.append((tokenize(ex.question), paragraphs, gold))
    return instances


def train_qa(train: Sequence[QAExample], val: Optional[Sequence[QAExample]],
             documents: Sequence[Document], config: QATrainConfig = None,
             spec: EncoderSpec = None, model: QAModel = None) -> Checkpoint:
    """Train (or continue training) a desk QA model; returns a checkpoint with
    the best-so-far validation losses recorded per validation pass."""
    config = config or QATrainConfig()
    answerable = [e for e in train if e.is_answerable]
    sentinel = [e for e in train if not e.is_answerable]
    if not answerable and not sentinel:
        raise TrainingError("no training examples")
    torch.manual_seed(config.seed)
    random.seed(config.seed)

    if model is None:
        vocab = WordVocab.build(
            [tokenize(e.question) for e in train]
            + [p.tokens for d in documents for p in d.paragraphs]
        )
        model = QAModel.build_desk(vocab, spec or desk_spec())
    instances = _prepare_instances(train, documents, config.k_train)
    val_instances = (_prepare_instances(val, documents, config.k_train) if val else None)

    opt = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    best_val_history: List[float] = []
    best_val = float("inf")
    order = list(range(len(instances)))
    for epoch in range(config.epochs):
        random.shuffle(order)
        model.train()
        total = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            opt.zero_grad()
            loss = sum(model.training_loss(*instances[i]) for i in batch) / len(batch)
            loss.backward()
            opt.step()
            total += float(loss.detach()) * len(batch)
        if val_instances:
            model.eval()
            with torch.no_grad():
                vloss = sum(
                    float(model.training_loss(*inst)) for inst in val_instances
                ) / len(val_instances)
            best_val = min(best_val, vloss)
            best_val_history.append(best_val)
            logger.info("epoch %d: train loss %.4f, val loss %.4f", epoch, total / len(order), vloss)

    return checkpoint_from_model(model, config, best_val_history)


def checkpoint_from_model(model: QAModel, config: QATrainConfig,
                          val_history: List[float] = None) -> Checkpoint:
    return Checkpoint(
        kind="qa-desk",
        config={
            "encoder": asdict(model.spec),
            "train": asdict(config),
            "vocab": model.vocab.token_to_id,
        },
        state=model.state_dict(),
        meta={"best_val_history": val_history or []},
    )


def qa_model_from_checkpoint(ckpt: Checkpoint) -> QAModel:
    spec = EncoderSpec(**ckpt.config["encoder"])
    vocab = WordVocab(dict(ckpt.config["vocab"]))
    model = QAModel.build_desk(vocab, spec)
    model.load_state_dict(ckpt.state)
    model.eval()
    return model


def training_em(model: QAModel, examples: Sequence[QAExample],
                documents: Sequence[Document], k: int = 4) -> float:
    """Exact-match rate of the model's predictions against its own examples
    (overfit sanity metric, not a held-out evaluation)."""
    from ..metrics import compute_em

    docs = {d.doc_id: d for d in documents}
    cfg = RetrievalConfig(k=k)
    hits = 0
    for ex in examples:
        pred = predict_answer(model, ex.question, docs[ex.doc_ref], cfg)
        golds = [g.text for g in ex.gold_answers]
        hits += compute_em(pred.answer_text if pred.answerable else "", golds)
    return hits / len(examples)
