"""Deterministic stand-in QG model for golden-file and service tests."""
import hashlib
from typing import List, Optional, Sequence

from ..checkpoint import Checkpoint
from ..corpus import QGInput, strip_markers
from .beam import BeamConfig
from .generate import GeneratedQuestion
from .rules import detokenize, toy_rule_generate


class StubQGModel:
    """Emits rule-based questions where the pattern applies, a fixed template
    otherwise. Log-probabilities are a stable hash of the question text so
    filtering has deterministic variety."""

    kind = "qg-stub"

    def __init__(self, version: str = "stub-1"):
        self.version = version

    @classmethod
    def from_checkpoint(cls, ckpt: Checkpoint) -> "StubQGModel":
        return cls(ckpt.config.get("version", "stub-1"))

    def to_checkpoint(self) -> Checkpoint:
        return Checkpoint(kind=self.kind, config={"version": self.version},
                          meta={"model_version": self.version})

    def generate(self, inputs: Sequence[QGInput],
                 beam_config: Optional[BeamConfig] = None) -> List[GeneratedQuestion]:
        out = []
        for qg_input in inputs:
            tokens, span = strip_markers(qg_input.sentence_tokens)
            question = None
            if span is not None:
                question = toy_rule_generate(qg_input)
            if question is None:
                head = tokens[: min(6, len(tokens))]
                question = "What does the sentence about " + detokenize(head).rstrip(".") + " say?"
            digest = hashlib.sha256(question.encode("utf-8")).hexdigest()
            log_prob = -1.0 - (int(digest[:8], 16) % 1000) / 1000.0
            out.append(GeneratedQuestion(question, log_prob, qg_input))
        return out
