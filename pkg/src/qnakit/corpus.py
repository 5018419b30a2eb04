"""Dataset ingestion and preprocessing.

Handles SQuAD-format and NewsQA-format files, 300-token chunking, answer
marker insertion for question-generation inputs, and the JSON Lines
augmentation/cache formats.
"""
import json
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .tokenization import char_span_to_token_span, tokenize, tokenize_with_offsets

logger = logging.getLogger(__name__)

ANSWER_OPEN = "<ANSWER>"
ANSWER_CLOSE = "</ANSWER>"

DEFAULT_CHUNK_SIZE = 300


@dataclass
class Paragraph:
    para_id: str
    tokens: List[str]
    raw_text: str
    char_offsets: List[Tuple[int, int]]


@dataclass
class Document:
    doc_id: str
    paragraphs: List[Paragraph]
    title: str = ""


@dataclass
class GoldAnswer:
    para_index: int
    start: int  # token index, inclusive
    end: int  # token index, inclusive
    text: str


@dataclass
class QAExample:
    question: str
    doc_ref: str
    gold_answers: List[GoldAnswer]
    is_answerable: bool
    qid: str = ""

    def __post_init__(self):
        if self.is_answerable != bool(self.gold_answers):
            raise ValueError("is_answerable must mirror presence of gold answers")


@dataclass
class QGInput:
    sentence_tokens: List[str]
    source_sentence_index: int = 0
    answer_char_span: Optional[Tuple[int, int]] = None


@dataclass
class QGExample:
    input: QGInput
    target_question: List[str] = field(default_factory=list)


class CorpusError(Exception):
    pass


def insert_markers(tokens: Sequence[str], start: int, end: int) -> List[str]:
    """Wrap the inclusive token span [start, end] in answer marker tokens."""
    if not (0 <= start <= end < len(tokens)):
        raise ValueError(f"span ({start}, {end}) out of bounds for {len(tokens)} tokens")
    out = list(tokens[:start])
    out.append(ANSWER_OPEN)
    out.extend(tokens[start : end + 1])
    out.append(ANSWER_CLOSE)
    out.extend(tokens[end + 1 :])
    return out


def strip_markers(tokens: Sequence[str]) -> Tuple[List[str], Optional[Tuple[int, int]]]:
    """Remove marker tokens, returning the original tokens and the inclusive
    span they surrounded (None if no markers)."""
    if ANSWER_OPEN not in tokens:
        return list(tokens), None
    open_i = list(tokens).index(ANSWER_OPEN)
    close_i = list(tokens).index(ANSWER_CLOSE)
    if close_i < open_i:
        raise ValueError("close marker precedes open marker")
    out = [t for i, t in enumerate(tokens) if i not in (open_i, close_i)]
    return out, (open_i, close_i - 2)


def chunk_tokens(tokens: Sequence[str], chunk_size: int) -> List[List[str]]:
    """Partition tokens into contiguous chunks of chunk_size (last may be short)."""
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    return [list(tokens[i : i + chunk_size]) for i in range(0, len(tokens), chunk_size)]


def chunk_document(tokens: Sequence[str], chunk_size: int, doc_id: str = "doc") -> List[Paragraph]:
    """Chunk a token list into Paragraphs; raw text is the space-joined tokens."""
    paragraphs = []
    for i, chunk in enumerate(chunk_tokens(tokens, chunk_size)):
        raw = " ".join(chunk)
        offsets = []
        pos = 0
        for tok in chunk:
            offsets.append((pos, pos + len(tok)))
            pos += len(tok) + 1
        paragraphs.append(Paragraph(f"{doc_id}-p{i}", chunk, raw, offsets))
    return paragraphs


def chunk_text(text: str, chunk_size: int, doc_id: str = "doc") -> List[Paragraph]:
    """Chunk raw text into Paragraphs of chunk_size tokens, keeping each
    paragraph's raw text as a substring of the original."""
    tokens, offsets = tokenize_with_offsets(text)
    paragraphs = []
    for i in range(0, len(tokens), chunk_size):
        toks = tokens[i : i + chunk_size]
        offs = offsets[i : i + chunk_size]
        lo, hi = offs[0][0], offs[-1][1]
        rel = [(s - lo, e - lo) for s, e in offs]
        paragraphs.append(Paragraph(f"{doc_id}-p{len(paragraphs)}", toks, text[lo:hi], rel))
    return paragraphs


def _paragraph_from_text(text: str, para_id: str) -> Paragraph:
    tokens, offsets = tokenize_with_offsets(text)
    return Paragraph(para_id, tokens, text, offsets)


def load_squad_format(path: str, version_filter: str = "v2-with-unanswerable"):
    """Load a SQuAD-layout JSON file.

    version_filter: "v1-answerable-only" drops unanswerable questions,
    "v2-with-unanswerable" keeps them as sentinel examples.

    Returns (documents, qa_examples). Records whose character answer spans
    cannot be aligned to token boundaries are skipped with a counted warning.
    """
    if version_filter not in ("v1-answerable-only", "v2-with-unanswerable"):
        raise ValueError(f"unknown version_filter: {version_filter}")
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise CorpusError(f"malformed JSON in {path}: {e}") from e
    if "data" not in data:
        raise CorpusError(f"{path} is not SQuAD-layout (missing 'data')")

    documents: List[Document] = []
    examples: List[QAExample] = []
    skipped = 0
    for ai, article in enumerate(data["data"]):
        title = article.get("title", "")
        doc_id = f"{title or 'doc'}-{ai}"
        paragraphs = []
        for pi, para in enumerate(article["paragraphs"]):
            paragraphs.append(_paragraph_from_text(para["context"], f"{doc_id}-p{pi}"))
        documents.append(Document(doc_id, paragraphs, title))
        for pi, para in enumerate(article["paragraphs"]):
            paragraph = paragraphs[pi]
            for qa in para["qas"]:
                try:
                    question = qa["question"]
                    qid = qa.get("id", "")
                except (TypeError, KeyError) as e:
                    raise CorpusError(f"malformed qas record in article {ai}: {e}") from e
                is_impossible = qa.get("is_impossible", False)
                golds: List[GoldAnswer] = []
                if not is_impossible:
                    for ans in qa["answers"]:
                        gold = _align_answer(paragraph, pi, ans["text"], ans["answer_start"])
                        if gold is None:
                            skipped += 1
                            logger.warning(
                                "unalignable answer %r at %d in question %s; skipped",
                                ans["text"], ans["answer_start"], qid,
                            )
                        else:
                            golds.append(gold)
                    if not golds:
                        continue  # every occurrence unalignable: drop the record
                if is_impossible and version_filter == "v1-answerable-only":
                    continue
                examples.append(QAExample(question, doc_id, golds, bool(golds), qid))
    if skipped:
        logger.warning("load_squad_format: skipped %d unalignable answers", skipped)
    return documents, examples


def _align_answer(paragraph: Paragraph, para_index: int, text: str, char_start: int):
    char_end = char_start + len(text)
    try:
        start, end = char_span_to_token_span(paragraph.char_offsets, char_start, char_end)
    except ValueError:
        return None
    if paragraph.tokens[start : end + 1] != tokenize(text):
        return None
    return GoldAnswer(para_index, start, end, text)


def load_newsqa(path: str, chunk_size: int = DEFAULT_CHUNK_SIZE):
    """Load the combined NewsQA JSON (consensus character spans per question).

    Each story is chunked into chunk_size-token paragraphs; spans crossing a
    chunk boundary are clipped to the chunk containing the span start.
    """
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    documents: List[Document] = []
    examples: List[QAExample] = []
    clipped = 0
    for story in data["data"]:
        doc_id = story.get("storyId", f"story-{len(documents)}")
        text = story["text"]
        paragraphs = chunk_text(text, chunk_size, doc_id)
        tokens, offsets = tokenize_with_offsets(text)
        documents.append(Document(doc_id, paragraphs))
        for qi, q in enumerate(story.get("questions", [])):
            consensus = q.get("consensus", {})
            qid = f"{doc_id}-q{qi}"
            if consensus.get("noAnswer") or consensus.get("badQuestion") or "s" not in consensus:
                examples.append(QAExample(q["q"], doc_id, [], False, qid))
                continue
            try:
                tok_s, tok_e = char_span_to_token_span(offsets, consensus["s"], consensus["e"])
            except ValueError:
                examples.append(QAExample(q["q"], doc_id, [], False, qid))
                continue
            para_index = tok_s // chunk_size
            local_s = tok_s - para_index * chunk_size
            local_e = tok_e - para_index * chunk_size
            last = len(paragraphs[para_index].tokens) - 1
            if local_e > last:
                local_e = last
                clipped += 1
            answer_text = " ".join(paragraphs[para_index].tokens[local_s : local_e + 1])
            gold = GoldAnswer(para_index, local_s, local_e, answer_text)
            examples.append(QAExample(q["q"], doc_id, [gold], True, qid))
    if clipped:
        logger.warning("load_newsqa: clipped %d spans at chunk boundaries", clipped)
    return documents, examples


def derive_qg_examples(documents: Sequence[Document], qa_examples: Sequence[QAExample],
                       provider=None) -> List[QGExample]:
    """Build question-generation training pairs from answerable QA examples.

    Isolates the sentence containing each gold span and inserts answer
    markers at the span boundary. Spans crossing a sentence boundary are
    clipped to the sentence containing the span start (counted).
    """
    if provider is None:
        from .candidates import DeskSyntaxProvider

        provider = DeskSyntaxProvider()
    docs_by_id = {d.doc_id: d for d in documents}
    out: List[QGExample] = []
    clipped = 0
    for ex in qa_examples:
        if not ex.is_answerable:
            continue
        gold = ex.gold_answers[0]
        paragraph = docs_by_id[ex.doc_ref].paragraphs[gold.para_index]
        span_char_start = paragraph.char_offsets[gold.start][0]
        span_char_end = paragraph.char_offsets[gold.end][1]
        sent_text, sent_offset = _sentence_containing(paragraph.raw_text, span_char_start, provider)
        local_start = span_char_start - sent_offset
        local_end = span_char_end - sent_offset
        if local_end > len(sent_text):
            local_end = len(sent_text)
            clipped += 1
        sent_tokens, sent_tok_offsets = tokenize_with_offsets(sent_text)
        try:
            tok_s, tok_e = char_span_to_token_span(sent_tok_offsets, local_start, local_end)
        except ValueError:
            clipped += 1
            continue
        marked = insert_markers(sent_tokens, tok_s, tok_e)
        sent_index = _sentence_index(paragraph.raw_text, sent_offset, provider)
        qg_input = QGInput(marked, sent_index, (local_start, local_end))
        out.append(QGExample(qg_input, tokenize(ex.question)))
    if clipped:
        logger.warning("derive_qg_examples: clipped %d spans to the start sentence", clipped)
    return out


def _sentence_containing(text: str, char_pos: int, provider) -> Tuple[str, int]:
    sentences = provider.sentences(text)
    for sent, offset in sentences:
        if offset <= char_pos < offset + len(sent):
            return sent, offset
    # span start past the last sentence end: fall back to the last sentence
    return sentences[-1]


def _sentence_index(text: str, sent_offset: int, provider) -> int:
    for i, (_, offset) in enumerate(provider.sentences(text)):
        if offset == sent_offset:
            return i
    return 0


def load_augmentation(path: str) -> List[QGExample]:
    """Load externally generated question-sentence pairs from JSON Lines.

    Record shape: {"sentence", "question", "answer_text", "answer_char_start"}.
    Records whose answer does not occur at the stated offset are skipped with
    a counted warning.
    """
    out: List[QGExample] = []
    skipped = 0
    with open(path, encoding="utf-8") as f:
        for ln, line in enumerate(f):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusError(f"{path}:{ln + 1}: malformed JSON: {e}") from e
            sentence = rec["sentence"]
            answer = rec["answer_text"]
            start = rec["answer_char_start"]
            if sentence[start : start + len(answer)] != answer:
                skipped += 1
                logger.warning("%s:%d: answer %r not at offset %d; skipped", path, ln + 1, answer, start)
                continue
            tokens, offsets = tokenize_with_offsets(sentence)
            try:
                tok_s, tok_e = char_span_to_token_span(offsets, start, start + len(answer))
            except ValueError:
                skipped += 1
                logger.warning("%s:%d: answer %r spans no tokens; skipped", path, ln + 1, answer)
                continue
            marked = insert_markers(tokens, tok_s, tok_e)
            qg_input = QGInput(marked, 0, (start, start + len(answer)))
            out.append(QGExample(qg_input, tokenize(rec["question"])))
    if skipped:
        logger.warning("load_augmentation: skipped %d records", skipped)
    return out


def save_qg_examples(path: str, examples: Sequence[QGExample]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for ex in examples:
            f.write(json.dumps({
                "sentence_tokens": ex.input.sentence_tokens,
                "source_sentence_index": ex.input.source_sentence_index,
                "answer_char_span": ex.input.answer_char_span,
                "target_question": ex.target_question,
            }) + "\n")


def load_qg_examples(path: str) -> List[QGExample]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            span = rec.get("answer_char_span")
            qg_input = QGInput(rec["sentence_tokens"], rec.get("source_sentence_index", 0),
                               tuple(span) if span else None)
            out.append(QGExample(qg_input, rec["target_question"]))
    return out
