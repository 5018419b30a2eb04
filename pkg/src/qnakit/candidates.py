"""Sentence segmentation and candidate answer-span proposal.

Candidates are the union of named entities, noun chunks, and dependency
subtrees headed by a sanctioned relation. Syntactic analysis is behind a
provider interface: a statistical-parser adapter for production and a
deterministic rule/lexicon provider ("desk") so everything is testable
without model downloads.
"""
import abc
import logging
import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .corpus import QGInput, insert_markers
from .tokenization import tokenize_with_offsets

logger = logging.getLogger(__name__)

# Incoming relations whose head token roots a candidate subtree.
SANCTIONED_DEP_LABELS = frozenset({
    "xcomp", "attr", "prep", "obj", "iobj", "flat", "fixed",
    "csubj", "ccomp", "acl", "conj",
})

_SOURCE_PRIORITY = {"entity": 0, "noun_chunk": 1, "dep_subtree": 2}


@dataclass
class CandidateSpan:
    sentence_index: int
    char_start: int
    char_end: int  # exclusive
    source: str  # entity | noun_chunk | dep_subtree
    dep_label: Optional[str] = None
    label: Optional[str] = None  # entity type when source == entity

    def __post_init__(self):
        if self.char_end <= self.char_start:
            raise ValueError("candidate span must be non-empty")
        if (self.source == "dep_subtree") != (self.dep_label is not None):
            raise ValueError("dep_label is set iff source is dep_subtree")
        if self.dep_label is not None and self.dep_label not in SANCTIONED_DEP_LABELS:
            raise ValueError(f"unsanctioned dependency label {self.dep_label!r}")


class SyntaxProvider(abc.ABC):
    """Deterministic syntactic analysis over raw text."""

    @abc.abstractmethod
    def sentences(self, text: str) -> List[Tuple[str, int]]:
        """(sentence, char offset) pairs; sentences are substrings of text."""

    @abc.abstractmethod
    def entities(self, sentence: str) -> List[Tuple[int, int, str]]:
        """(char_start, char_end, type) named entities."""

    @abc.abstractmethod
    def noun_chunks(self, sentence: str) -> List[Tuple[int, int]]:
        """(char_start, char_end) base noun phrases."""

    @abc.abstractmethod
    def dep_subtrees(self, sentence: str) -> List[Tuple[int, int, str]]:
        """(char_start, char_end, label) contiguous subtrees whose head bears
        a sanctioned incoming relation."""

    def classify_span(self, span_text: str) -> str:
        """Coarse class of a span for wh-word selection:
        person | date | number | place | other."""
        return "other"


_SENT_END = re.compile(r"[.!?]+(?=\s|$)")

_CAP_STOP = {
    "The", "A", "An", "In", "On", "At", "It", "He", "She", "They", "We", "You",
    "This", "That", "These", "Those", "By", "For", "To", "Of", "With", "From",
    "After", "Before", "During", "When", "Where", "What", "Who", "How", "Why",
    "Most", "Later", "There", "Its", "His", "Her", "Their", "Our", "But", "And",
}

_PERSON_LEX = {
    "tesla", "newton", "newcomen", "einstein", "trevithick", "papin", "turing",
    "astor", "heilman", "smith", "edison", "curie", "darwin", "watt", "faraday",
}
_PLACE_LEX = {
    "tomingaj", "paris", "france", "london", "wales", "smiljan", "england",
    "normandy", "europe", "america", "vienna", "budapest", "croatia",
}
_MONTHS = {
    "january", "february", "march", "april", "may", "june", "july",
    "august", "september", "october", "november", "december",
}
_PREPS = {"in", "to", "of", "at", "on", "from", "by", "for", "with", "near",
          "into", "over", "under", "through", "during", "after", "before"}
_DETS = {"the", "a", "an", "this", "that", "these", "those", "its", "his",
         "her", "their", "our", "my", "your"}
_AUX = {"is", "are", "was", "were", "be", "been", "being", "has", "have",
        "had", "do", "does", "did", "can", "could", "will", "would", "shall",
        "should", "may", "might", "must"}
_CONJ = {"and", "or", "but", "nor", "so", "yet"}
_FUNCTION = _PREPS | _DETS | _AUX | _CONJ | {
    "not", "no", "as", "than", "if", "because", "while", "which", "who",
    "whom", "whose", "where", "when", "it", "he", "she", "they", "we", "you",
}


def _is_year(tok: str) -> bool:
    return tok.isdigit() and len(tok) == 4 and 1000 <= int(tok) <= 2999


class DeskSyntaxProvider(SyntaxProvider):
    """Rule/lexicon-based provider: no models, fully deterministic.

    Approximations are intentional; the point is exercising the candidate
    pipeline end to end, not linguistic accuracy.
    """

    def sentences(self, text: str) -> List[Tuple[str, int]]:
        out = []
        start = 0
        for m in _SENT_END.finditer(text):
            seg = text[start : m.end()]
            out.append(self._trim(seg, start))
            start = m.end()
        tail = text[start:]
        if tail.strip():
            out.append(self._trim(tail, start))
        return out

    @staticmethod
    def _trim(seg: str, offset: int) -> Tuple[str, int]:
        stripped = seg.lstrip()
        lead = len(seg) - len(stripped)
        return stripped.rstrip(), offset + lead

    def entities(self, sentence: str) -> List[Tuple[int, int, str]]:
        tokens, offsets = tokenize_with_offsets(sentence)
        out = []
        i = 0
        while i < len(tokens):
            tok = tokens[i]
            if tok[0].isupper() and tok not in _CAP_STOP and tok.isalpha():
                j = i
                while (j + 1 < len(tokens) and tokens[j + 1].isalpha()
                       and tokens[j + 1][0].isupper() and tokens[j + 1] not in _CAP_STOP):
                    j += 1
                text = " ".join(tokens[i : j + 1]).lower()
                if any(w in _PERSON_LEX for w in text.split()):
                    label = "PERSON"
                elif any(w in _PLACE_LEX for w in text.split()):
                    label = "PLACE"
                else:
                    label = "MISC"
                out.append((offsets[i][0], offsets[j][1], label))
                i = j + 1
                continue
            if _is_year(tok):
                out.append((offsets[i][0], offsets[i][1], "DATE"))
            elif tok.isdigit():
                out.append((offsets[i][0], offsets[i][1], "CARDINAL"))
            elif tok.lower() in _MONTHS:
                out.append((offsets[i][0], offsets[i][1], "DATE"))
            i += 1
        return out

    def noun_chunks(self, sentence: str) -> List[Tuple[int, int]]:
        tokens, offsets = tokenize_with_offsets(sentence)
        out = []
        i = 0
        while i < len(tokens):
            lower = tokens[i].lower()
            if lower in _DETS or (tokens[i].isalpha() and lower not in _FUNCTION):
                j = i
                if lower in _DETS:
                    j += 1
                k = j
                while (k < len(tokens) and tokens[k].isalpha()
                       and tokens[k].lower() not in _FUNCTION):
                    k += 1
                if k > j:  # at least one content word
                    out.append((offsets[i][0], offsets[k - 1][1]))
                    i = k
                    continue
            i += 1
        return out

    def dep_subtrees(self, sentence: str) -> List[Tuple[int, int, str]]:
        tokens, offsets = tokenize_with_offsets(sentence)
        out = []
        for i, tok in enumerate(tokens):
            lower = tok.lower()
            if lower in _PREPS and i + 1 < len(tokens):
                j = i + 1
                while (j < len(tokens) and tokens[j].isalnum()
                       and tokens[j].lower() not in (_PREPS | _AUX | _CONJ)):
                    j += 1
                if j > i + 1:
                    out.append((offsets[i][0], offsets[j - 1][1], "prep"))
            elif lower in {"is", "are", "was", "were"} and i + 1 < len(tokens):
                j = i + 1
                while (j < len(tokens) and tokens[j].isalnum()
                       and tokens[j].lower() not in (_PREPS | _AUX | _CONJ)):
                    j += 1
                if j > i + 1:
                    out.append((offsets[i + 1][0], offsets[j - 1][1], "attr"))
        return out

    def classify_span(self, span_text: str) -> str:
        words = [w.lower() for w in span_text.split()]
        if any(w in _PERSON_LEX for w in words):
            return "person"
        if any(_is_year(w) or w in _MONTHS for w in words):
            return "date"
        if any(w.isdigit() for w in words):
            return "number"
        if any(w in _PLACE_LEX for w in words):
            return "place"
        return "other"


class SpacySyntaxProvider(SyntaxProvider):
    """Adapter over a spaCy pipeline (imported lazily)."""

    # spaCy's English scheme names some relations differently from the
    # sanctioned list; map them onto the canonical labels.
    _LABEL_MAP = {"dobj": "obj", "dative": "iobj", "pobj": "obj"}

    def __init__(self, model: str = "en_core_web_sm"):
        import spacy  # optional production dependency

        self.nlp = spacy.load(model)

    def sentences(self, text: str) -> List[Tuple[str, int]]:
        doc = self.nlp(text)
        return [(s.text, s.start_char) for s in doc.sents if s.text.strip()]

    def entities(self, sentence: str):
        doc = self.nlp(sentence)
        return [(e.start_char, e.end_char, e.label_) for e in doc.ents]

    def noun_chunks(self, sentence: str):
        doc = self.nlp(sentence)
        return [(c.start_char, c.end_char) for c in doc.noun_chunks]

    def dep_subtrees(self, sentence: str):
        doc = self.nlp(sentence)
        out = []
        for tok in doc:
            label = self._LABEL_MAP.get(tok.dep_, tok.dep_)
            if label not in SANCTIONED_DEP_LABELS:
                continue
            subtree = sorted(t.i for t in tok.subtree)
            # clip to the maximal contiguous block containing the head
            lo = hi = tok.i
            idx = set(subtree)
            while lo - 1 in idx:
                lo -= 1
            while hi + 1 in idx:
                hi += 1
            span = doc[lo : hi + 1]
            out.append((span.start_char, span.end_char, label))
        return out

    def classify_span(self, span_text: str) -> str:
        doc = self.nlp(span_text)
        for ent in doc.ents:
            if ent.label_ == "PERSON":
                return "person"
            if ent.label_ in ("DATE", "TIME"):
                return "date"
            if ent.label_ in ("CARDINAL", "QUANTITY", "MONEY", "PERCENT"):
                return "number"
            if ent.label_ in ("GPE", "LOC", "FAC"):
                return "place"
        return "other"


_PROVIDERS = {}


def get_provider(name: str) -> SyntaxProvider:
    if name not in _PROVIDERS:
        if name == "desk":
            _PROVIDERS[name] = DeskSyntaxProvider()
        elif name == "production":
            _PROVIDERS[name] = SpacySyntaxProvider()
        else:
            raise KeyError(f"unknown syntax provider {name!r}")
    return _PROVIDERS[name]


def segment_sentences(text: str, provider: SyntaxProvider = None) -> List[Tuple[str, int]]:
    provider = provider or get_provider("desk")
    return provider.sentences(text)


def extract_candidates(sentence: str, provider: SyntaxProvider = None,
                       cap: int = 12, sentence_index: int = 0) -> List[CandidateSpan]:
    """Union of entities, noun chunks, and sanctioned dependency subtrees.

    Exact duplicates (same char span) keep the highest-priority source
    (entity > noun_chunk > dep_subtree). Provider failure degrades to an
    empty list with a warning.
    """
    provider = provider or get_provider("desk")
    try:
        raw = [
            ("entity", provider.entities(sentence)),
            ("noun_chunk", [(s, e, None) for s, e in provider.noun_chunks(sentence)]),
            ("dep_subtree", provider.dep_subtrees(sentence)),
        ]
    except Exception:
        logger.warning("syntax provider failed on %r", sentence[:60], exc_info=True)
        return []
    seen = {}
    for source, spans in raw:
        for span in spans:
            s, e, extra = span
            if e <= s or not sentence[s:e].strip():
                continue
            if (s, e) in seen:
                continue
            if source == "dep_subtree":
                if extra not in SANCTIONED_DEP_LABELS:
                    continue
                cand = CandidateSpan(sentence_index, s, e, source, dep_label=extra)
            elif source == "entity":
                cand = CandidateSpan(sentence_index, s, e, source, label=extra)
            else:
                cand = CandidateSpan(sentence_index, s, e, source)
            seen[(s, e)] = cand
    ordered = sorted(seen.values(),
                     key=lambda c: (_SOURCE_PRIORITY[c.source], c.char_start, c.char_end))
    return ordered[:cap]


def annotate(sentence: str, span, sentence_index: int = 0) -> QGInput:
    """Mark the span inside the sentence, producing a QG input.

    Spans that split a token are expanded to token boundaries (counted)."""
    if isinstance(span, CandidateSpan):
        s, e = span.char_start, span.char_end
        sentence_index = span.sentence_index
    else:
        s, e = span
    if e <= s:
        raise ValueError("zero-length span")
    tokens, offsets = tokenize_with_offsets(sentence)
    tok_s = tok_e = None
    for i, (ts, te) in enumerate(offsets):
        if te > s and ts < e:
            if tok_s is None:
                tok_s = i
            tok_e = i
    if tok_s is None:
        raise ValueError("span covers no tokens")
    if offsets[tok_s][0] != s or offsets[tok_e][1] != e:
        logger.warning("annotate: span (%d, %d) expanded to token boundaries", s, e)
    marked = insert_markers(tokens, tok_s, tok_e)
    return QGInput(marked, sentence_index, (offsets[tok_s][0], offsets[tok_e][1]))
