"""Deliberately small rule-based question generator.

Covers copula/auxiliary declaratives via wh-substitution and
subject-auxiliary inversion; anything else yields no question. Its job is
to exercise the rule-mimicking training data path at desk scale, not to be
a competitive generator.
"""
import re
from typing import Optional

from ..corpus import QGInput, strip_markers

_AUX = {"is", "are", "was", "were", "has", "have", "had", "can", "could",
        "will", "would", "do", "does", "did", "shall", "should", "may",
        "might", "must"}
_COPULA = {"is", "are", "was", "were"}
_DETS = {"the", "a", "an", "this", "that", "these", "those"}

_WH_BY_CLASS = {
    "person": "Who",
    "date": "When",
    "number": "How many",
    "place": "Where",
    "other": "What",
}


def detokenize(tokens) -> str:
    text = " ".join(tokens)
    text = re.sub(r"\s+([.,!?;:%\)\]])", r"\1", text)
    text = re.sub(r"([\(\[])\s+", r"\1", text)
    return text


def toy_rule_generate(qg_input: QGInput, provider=None) -> Optional[str]:
    """Turn a marked declarative into a wh-question, or None if the sentence
    does not match a supported pattern."""
    if provider is None:
        from ..candidates import get_provider

        provider = get_provider("desk")
    tokens, span = strip_markers(qg_input.sentence_tokens)
    if span is None:
        raise ValueError("input has no marked answer span")
    s, e = span
    span_text = " ".join(tokens[s : e + 1])
    wh = _WH_BY_CLASS[provider.classify_span(span_text)]

    aux_i = next((i for i, t in enumerate(tokens) if t.lower() in _AUX), None)
    if aux_i is None:
        return None

    if e < aux_i and s == 0:
        # subject span: substitute wh-word, keep the rest of the clause
        rest = _strip_final_punct(tokens[e + 1 :])
        return detokenize([wh] + rest + ["?"])

    if s > aux_i:
        # complement/object span: wh-word + auxiliary + fronted subject.
        # A place name as copular complement names an identity, not a
        # location ("What is the capital?"), so "where" stays out here.
        if wh == "Where":
            wh = "What"
        subject = list(tokens[:aux_i])
        if subject and subject[0].lower() in _DETS:
            subject[0] = subject[0].lower()
        middle = [t for t in tokens[aux_i + 1 : s]]
        while middle and middle[-1].lower() in _DETS:
            middle.pop()
        return detokenize([wh, tokens[aux_i].lower()] + subject + middle + ["?"])

    return None


def _strip_final_punct(tokens):
    out = list(tokens)
    while out and re.fullmatch(r"[.,!?;:]+", out[-1]):
        out.pop()
    return out
