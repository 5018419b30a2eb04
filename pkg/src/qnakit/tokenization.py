"""Word tokenization with character offsets.

Offsets are mandatory so that character-level answer annotations can be
converted to token spans and back without losing alignment.
"""
import re
from typing import List, Tuple

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


def tokenize_with_offsets(text: str) -> Tuple[List[str], List[Tuple[int, int]]]:
    """Split text into word/punctuation tokens, returning (start, end) char
    offsets into the original string for each token (end exclusive)."""
    tokens, offsets = [], []
    for m in _TOKEN_RE.finditer(text):
        tokens.append(m.group())
        offsets.append((m.start(), m.end()))
    return tokens, offsets


def tokenize(text: str) -> List[str]:
    return _TOKEN_RE.findall(text)


def char_span_to_token_span(
    offsets: List[Tuple[int, int]], char_start: int, char_end: int
) -> Tuple[int, int]:
    """Map a character range [char_start, char_end) to the inclusive token
    span of all tokens it overlaps.

    Raises ValueError when no token overlaps the range.
    """
    start_tok = end_tok = None
    for i, (s, e) in enumerate(offsets):
        if e > char_start and s < char_end:
            if start_tok is None:
                start_tok = i
            end_tok = i
    if start_tok is None:
        raise ValueError(f"char span ({char_start}, {char_end}) covers no tokens")
    return start_tok, end_tok
