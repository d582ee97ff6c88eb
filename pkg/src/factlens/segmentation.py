"""Paragraph and sentence segmentation.

Sentence splitting is rule-based: a run of terminal punctuation (. ! ?)
followed by whitespace ends a sentence unless the token it closes is a known
abbreviation or a decimal number.  Splitting is span-preserving, so every
non-whitespace character of the input lands in exactly one sentence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import DomainError, EmptyInput
from .model import SentenceUnit

DEFAULT_MAX_SENTENCES = 10

_TERMINATORS = ".!?"
_CLOSERS = "\"')]’”"

# Lowercased tokens whose trailing period does not end a sentence.
_ABBREVIATIONS = {
    "mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.", "rev.",
    "gen.", "col.", "sgt.", "capt.", "lt.", "gov.", "sen.", "rep.", "hon.",
    "e.g.", "i.e.", "etc.", "cf.", "al.", "vs.", "viz.", "ca.", "approx.",
    "fig.", "figs.", "no.", "nos.", "vol.", "dept.", "univ.", "inc.",
    "ltd.", "corp.", "co.", "est.", "ave.", "blvd.", "mt.",
    "jan.", "feb.", "mar.", "apr.", "jun.", "jul.", "aug.", "sep.",
    "sept.", "oct.", "nov.", "dec.",
    "u.s.", "u.k.", "u.n.", "e.u.", "d.c.", "ph.d.", "m.d.", "b.c.",
    "a.d.", "a.m.", "p.m.",
}
# Single initials ("John F. Kennedy") are treated like abbreviations.
_ABBREVIATIONS.update(f"{c}." for c in "abcdefghijklmnopqrstuvwxyz")

_PARAGRAPH_BREAK = re.compile(r"\n[ \t\r]*\n+")


@dataclass(frozen=True)
class SegmentedText:
    """Indexed sentences plus the paragraph ranges that group them."""

    paragraphs: tuple[tuple[int, range], ...]
    sentences: tuple[SentenceUnit, ...]
    #: (start, end) character offsets of each sentence in the original input.
    sentence_spans: tuple[tuple[int, int], ...] = field(default=(), compare=False)

    def paragraph_range(self, sentence_index: int) -> range:
        for _, sentence_range in self.paragraphs:
            if sentence_index in sentence_range:
                return sentence_range
        raise DomainError(f"sentence index {sentence_index} out of range")

    def paragraph_text(self, sentence_index: int) -> str:
        return " ".join(
            self.sentences[i].text for i in self.paragraph_range(sentence_index)
        )


def _token_before(text: str, boundary: int) -> str:
    """The whitespace-delimited token ending at boundary (exclusive)."""
    start = boundary
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start:boundary]


def _sentence_spans(paragraph: str) -> list[tuple[int, int]]:
    spans: list[tuple[int, int]] = []
    n = len(paragraph)
    start = 0
    while start < n and paragraph[start].isspace():
        start += 1
    i = start
    while i < n:
        if paragraph[i] in _TERMINATORS:
            j = i
            while j + 1 < n and paragraph[j + 1] in _TERMINATORS + _CLOSERS:
                j += 1
            at_end = j + 1 >= n
            followed_by_space = not at_end and paragraph[j + 1].isspace()
            if followed_by_space or at_end:
                token = _token_before(paragraph, j + 1).lstrip("\"'([‘“")
                if token.lower() not in _ABBREVIATIONS or at_end:
                    spans.append((start, j + 1))
                    start = j + 1
                    while start < n and paragraph[start].isspace():
                        start += 1
                    i = start
                    continue
            i = j + 1
            continue
        i += 1
    if start < n:
        end = n
        while end > start and paragraph[end - 1].isspace():
            end -= 1
        if end > start:
            spans.append((start, end))
    return spans


def split_sentences(paragraph: str) -> list[str]:
    """Split one paragraph into sentences; text without a terminator is one sentence."""
    if not paragraph.strip():
        raise DomainError("paragraph must be non-empty")
    return [paragraph[a:b] for a, b in _sentence_spans(paragraph)]


def _paragraph_spans(text: str) -> list[tuple[int, int]]:
    spans = []
    cursor = 0
    for match in _PARAGRAPH_BREAK.finditer(text):
        spans.append((cursor, match.start()))
        cursor = match.end()
    spans.append((cursor, len(text)))
    return [(a, b) for a, b in spans if text[a:b].strip()]


def split_paragraphs(text: str, max_sentences: int = DEFAULT_MAX_SENTENCES) -> list[str]:
    """Split on blank lines, then chunk any paragraph longer than max_sentences.

    Chunking happens at sentence boundaries, greedily, so a 12-sentence
    paragraph with max 10 yields chunks of 10 and 2 sentences.
    """
    if max_sentences < 1:
        raise DomainError("max_sentences must be >= 1")
    if not text.strip():
        raise EmptyInput("input text is empty")
    chunks: list[str] = []
    for p_start, p_end in _paragraph_spans(text):
        paragraph = text[p_start:p_end]
        spans = _sentence_spans(paragraph)
        for offset in range(0, len(spans), max_sentences):
            group = spans[offset : offset + max_sentences]
            chunks.append(paragraph[group[0][0] : group[-1][1]])
    return chunks


def segment_text(text: str, max_sentences: int = DEFAULT_MAX_SENTENCES) -> SegmentedText:
    """Segment input into indexed sentences grouped by (chunked) paragraph."""
    if max_sentences < 1:
        raise DomainError("max_sentences must be >= 1")
    if not text.strip():
        raise EmptyInput("input text is empty")
    paragraphs: list[tuple[int, range]] = []
    sentences: list[SentenceUnit] = []
    spans: list[tuple[int, int]] = []
    for p_start, p_end in _paragraph_spans(text):
        paragraph = text[p_start:p_end]
        sentence_spans = [(p_start + a, p_start + b) for a, b in _sentence_spans(paragraph)]
        for offset in range(0, len(sentence_spans), max_sentences):
            group = sentence_spans[offset : offset + max_sentences]
            first = len(sentences)
            for a, b in group:
                sentences.append(SentenceUnit(index=len(sentences), text=text[a:b]))
                spans.append((a, b))
            paragraphs.append((len(paragraphs), range(first, len(sentences))))
    return SegmentedText(
        paragraphs=tuple(paragraphs),
        sentences=tuple(sentences),
        sentence_spans=tuple(spans),
    )
