"""Training regimes for question generation.

Standard trains on human-authored pairs, RuleMimic on rule-generated
augmentation pairs only, and Augmented fine-tunes a RuleMimic checkpoint on
the human-authored pairs (two-stage procedure, lineage recorded in the
checkpoint metadata).
"""
import enum
import logging
import random
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import torch

from ..checkpoint import Checkpoint
from ..corpus import QGExample
from .bpe import BOS, EOS, PAD_TOK, ByteBPE
from .model import QGModel, QGModelConfig, desk_config, pad_batch

logger = logging.getLogger(__name__)


class TrainingRegime(str, enum.Enum):
    STANDARD = "standard"
    RULEMIMIC = "rulemimic"
    AUGMENTED = "augmented"


class ConfigurationError(Exception):
    pass


@dataclass
class QGTrainConfig:
    batch_size: int = 8  # sentences per step at desk scale
    max_steps: int = 2000
    validate_every: int = 200
    patience: int = 1  # early stop after this many non-improving validations
    learning_rate: float = 1e-3
    warmup_steps: int = 0
    adam_betas: Tuple[float, float] = (0.9, 0.998)
    grad_clip: float = 1.0
    seed: int = 7
    num_merges: int = 200  # BPE merges learned from the training data


def reference_preset() -> Dict:
    """Full-scale training configuration, kept as the reference preset."""
    return {
        "model": asdict(QGModelConfig(d_model=512, enc_layers=4, dec_layers=4,
                                      ff_dim=2048, heads=8, copy_attention=True,
                                      positional_encoding=True, dropout=0.1,
                                      label_smoothing=0.0)),
        "train": {
            "batch_tokens": 4096,
            "max_steps": 100_000,
            "validate_every": 200,
            "patience": 1,
            "learning_rate": 2.0,
            "lr_decay": "noam",
            "warmup_steps": 8000,
            "adam_beta2": 0.998,
        },
    }


class QGSession:
    """A trained QG model together with its tokenizer."""

    def __init__(self, model: QGModel, bpe: ByteBPE):
        self.model = model
        self.bpe = bpe
        self.bos_id = bpe.vocab[BOS]
        self.eos_id = bpe.vocab[EOS]
        self.pad_id = bpe.vocab[PAD_TOK]

    def generate(self, inputs, beam_config=None):
        from .generate import generate_questions

        return generate_questions(inputs, self, beam_config)


def _encode_examples(examples: Sequence[QGExample], bpe: ByteBPE):
    pairs = []
    for ex in examples:
        src = bpe.encode(" ".join(ex.input.sentence_tokens))
        tgt = [bpe.vocab[BOS]] + bpe.encode(" ".join(ex.target_question)) + [bpe.vocab[EOS]]
        pairs.append((src, tgt))
    return pairs


def train_qg(examples: Sequence[QGExample], regime: TrainingRegime,
             init: Optional[Checkpoint] = None, config: QGTrainConfig = None,
             model_config: QGModelConfig = None,
             val: Optional[Sequence[QGExample]] = None) -> Checkpoint:
    """Train a QG model under the given regime and return its checkpoint."""
    regime = TrainingRegime(regime)
    config = config or QGTrainConfig()
    if regime is TrainingRegime.AUGMENTED:
        if init is None:
            raise ConfigurationError("augmented regime requires a rulemimic init checkpoint")
        if init.meta.get("regime") != TrainingRegime.RULEMIMIC.value:
            raise ConfigurationError(
                f"augmented init must be a rulemimic checkpoint, got {init.meta.get('regime')!r}")
    if not examples:
        raise ConfigurationError("no training examples")
    torch.manual_seed(config.seed)
    random.seed(config.seed)

    parent_meta = None
    if init is not None:
        session = qg_model_from_checkpoint(init)
        parent_meta = {"regime": init.meta.get("regime"), "kind": init.kind}
    else:
        bpe = ByteBPE.train(
            [" ".join(ex.input.sentence_tokens) for ex in examples]
            + [" ".join(ex.target_question) for ex in examples],
            num_merges=config.num_merges,
        )
        mcfg = model_config or desk_config(len(bpe))
        mcfg.vocab_size = len(bpe)
        session = QGSession(QGModel(mcfg, bpe.vocab[PAD_TOK]), bpe)

    pairs = _encode_examples(examples, session.bpe)
    val_pairs = _encode_examples(val, session.bpe) if val else None
    model = session.model
    opt = torch.optim.Adam(model.parameters(), lr=config.learning_rate, betas=config.adam_betas)

    best_val = float("inf")
    bad_validations = 0
    step = 0
    order = list(range(len(pairs)))
    while step < config.max_steps:
        random.shuffle(order)
        for start in range(0, len(order), config.batch_size):
            if step >= config.max_steps:
                break
            batch = [pairs[i] for i in order[start : start + config.batch_size]]
            src = pad_batch([p[0] for p in batch], session.pad_id)
            tgt = pad_batch([p[1] for p in batch], session.pad_id)
            model.train()
            opt.zero_grad()
            loss = model.loss(src, tgt)
            loss.backward()
            if config.grad_clip > 0:
                torch.nn.utils.clip_grad_norm_(model.parameters(), config.grad_clip)
            opt.step()
            step += 1
            if val_pairs and step % config.validate_every == 0:
                vloss = validation_loss(session, val_pairs)
                logger.info("step %d: train %.4f, val %.4f", step, float(loss), vloss)
                if vloss < best_val:
                    best_val = vloss
                    bad_validations = 0
                else:
                    bad_validations += 1
                    if bad_validations >= config.patience:
                        logger.info("early stop at step %d", step)
                        return _checkpoint(session, config, regime, parent_meta, step, best_val)
        if not order:
            break
    return _checkpoint(session, config, regime, parent_meta, step, best_val)


def validation_loss(session: QGSession, pairs) -> float:
    model = session.model
    model.eval()
    total, n = 0.0, 0
    with torch.no_grad():
        for src, tgt in pairs:
            s = pad_batch([src], session.pad_id)
            t = pad_batch([tgt], session.pad_id)
            total += float(model.loss(s, t))
            n += 1
    return total / max(n, 1)


def _checkpoint(session: QGSession, config: QGTrainConfig, regime: TrainingRegime,
                parent_meta, steps: int, best_val: float) -> Checkpoint:
    cfg = asdict(session.model.config)
    return Checkpoint(
        kind="qg-desk",
        config={
            "model": cfg,
            "train": asdict(config),
            "bpe": {
                "vocab": session.bpe.vocab,
                "merges": session.bpe.merges,
                "specials": session.bpe.specials,
            },
        },
        state=session.model.state_dict(),
        meta={
            "regime": regime.value,
            "parent": parent_meta,
            "steps": steps,
            "best_val_loss": None if best_val == float("inf") else best_val,
        },
    )


def qg_model_from_checkpoint(ckpt: Checkpoint) -> QGSession:
    bpe_cfg = ckpt.config["bpe"]
    bpe = ByteBPE(bpe_cfg["vocab"], [tuple(m) for m in bpe_cfg["merges"]], bpe_cfg["specials"])
    mcfg = QGModelConfig(**ckpt.config["model"])
    model = QGModel(mcfg, bpe.vocab[PAD_TOK])
    model.load_state_dict(ckpt.state)
    model.eval()
    return QGSession(model, bpe)
