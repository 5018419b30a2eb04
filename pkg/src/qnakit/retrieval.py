"""Okapi BM25 ranking of a document's paragraphs against a question.

Tokens are lowercased before scoring; no stemming or stopword removal, so
the scores stay transparent and easy to check by hand.
"""
import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence

from .corpus import Paragraph


@dataclass
class RetrievalConfig:
    k: int = 4
    k1: float = 1.5
    b: float = 0.75


@dataclass
class RankedParagraph:
    index: int  # position in the input paragraph list
    paragraph: Paragraph
    bm25_score: float
    rank: int  # 1-based


def okapi_idf(n_docs: int, doc_freq: int) -> float:
    """Okapi IDF with +1 smoothing inside the log, which keeps it >= 0."""
    return math.log((n_docs - doc_freq + 0.5) / (doc_freq + 0.5) + 1.0)


def score_bm25(term_frequencies: Mapping[str, int], doc_len: int, avg_doc_len: float,
               idf_table: Mapping[str, float], config: RetrievalConfig) -> float:
    """Sum the standard Okapi BM25 term contributions for one document.

    term_frequencies maps each query term to its count in the document.
    """
    if doc_len <= 0 or avg_doc_len <= 0:
        raise ValueError("doc_len and avg_doc_len must be positive")
    score = 0.0
    norm = config.k1 * (1.0 - config.b + config.b * doc_len / avg_doc_len)
    for term, tf in term_frequencies.items():
        if tf <= 0:
            continue
        idf = idf_table.get(term, 0.0)
        score += idf * tf * (config.k1 + 1.0) / (tf + norm)
    return score


def rank_paragraphs(question_tokens: Sequence[str], paragraphs: Sequence[Paragraph],
                    config: RetrievalConfig) -> List[RankedParagraph]:
    """Return the top-k paragraphs by BM25 score, ties broken by input order."""
    if not paragraphs:
        raise ValueError("paragraphs must be non-empty")
    query = [t.lower() for t in question_tokens]
    para_tokens = [[t.lower() for t in p.tokens] for p in paragraphs]
    n = len(paragraphs)
    doc_freq: Dict[str, int] = {}
    for term in set(query):
        doc_freq[term] = sum(1 for toks in para_tokens if term in toks)
    idf_table = {term: okapi_idf(n, df) for term, df in doc_freq.items()}
    avg_len = sum(len(t) for t in para_tokens) / n

    scored = []
    for i, toks in enumerate(para_tokens):
        if not toks or not query:
            scored.append((0.0, i))
            continue
        counts = Counter(toks)
        tfs = {term: counts[term] for term in set(query)}
        scored.append((score_bm25(tfs, len(toks), avg_len, idf_table, config), i))

    # stable sort: equal scores keep input order
    order = sorted(range(n), key=lambda i: (-scored[i][0], i))
    top = order[: config.k]
    return [
        RankedParagraph(i, paragraphs[i], scored[i][0], rank + 1)
        for rank, i in enumerate(top)
    ]
