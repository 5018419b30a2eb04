"""qnakit: Q&A catalogs for multi-paragraph documents.

Extractive question answering with shared normalization across retrieved
paragraphs, answer-conditioned question generation with copy attention and
beam decoding, and a pipeline combining both into a catalog of Q&A items.
"""
__version__ = "0.1.0"
