"""Question decoding over QG inputs."""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

from ..corpus import QGInput
from .beam import BeamConfig, beam_search
from .train import QGSession

logger = logging.getLogger(__name__)


@dataclass
class GeneratedQuestion:
    text: str
    log_prob: float  # unnormalized sequence log-probability
    source: Optional[QGInput] = None


def generate_questions(inputs: Sequence[QGInput], session: QGSession,
                       beam_config: BeamConfig = None) -> List[GeneratedQuestion]:
    """Decode the single best question per input. Deterministic for fixed
    weights and config; over-long inputs are truncated from the right."""
    beam_config = beam_config or BeamConfig()
    out = []
    truncated = 0
    max_src = session.model.config.max_src_len
    for qg_input in inputs:
        src = session.bpe.encode(" ".join(qg_input.sentence_tokens))
        if len(src) > max_src:
            src = src[:max_src]
            truncated += 1
        ids, log_prob = beam_search(session.model, src, session.bos_id, session.eos_id,
                                    beam_config)
        out.append(GeneratedQuestion(session.bpe.decode(ids).strip(), log_prob, qg_input))
    if truncated:
        logger.warning("generate_questions: truncated %d over-long inputs", truncated)
    return out
