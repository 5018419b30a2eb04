from .beam import BeamConfig, beam_search
from .bpe import ByteBPE
from .generate import GeneratedQuestion, generate_questions
from .rules import toy_rule_generate
from .train import QGTrainConfig, TrainingRegime, train_qg

__all__ = [
    "BeamConfig", "beam_search", "ByteBPE", "GeneratedQuestion",
    "generate_questions", "toy_rule_generate", "QGTrainConfig",
    "TrainingRegime", "train_qg",
]
