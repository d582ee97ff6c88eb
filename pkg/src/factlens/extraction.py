"""Main-content extraction from fetched HTML.

A lightweight parser collects text blocks while skipping script/style and
structural boilerplate (nav, header, footer, aside, forms); a text-density
pass then drops link-heavy and near-empty blocks.  The survivors are
sentence-split per block so no sentence straddles a block boundary.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from html.parser import HTMLParser

from .errors import EmptyDocument
from .segmentation import split_sentences

_SKIP_SUBTREES = {
    "script", "style", "noscript", "template", "svg", "head",
    "nav", "header", "footer", "aside", "form", "button", "select",
    "option", "iframe", "object", "canvas",
}
_BLOCK_BOUNDARIES = {
    "p", "div", "section", "article", "main", "li", "ul", "ol",
    "h1", "h2", "h3", "h4", "h5", "h6", "blockquote", "pre",
    "table", "tr", "td", "th", "br", "figure", "figcaption",
}

# Primary density pass: real prose blocks.
_MIN_WORDS = 5
_MAX_LINK_RATIO = 0.4

_WHITESPACE = re.compile(r"\s+")


@dataclass(frozen=True)
class CleanDocument:
    """Sentence-segmented main text of one fetched page."""

    url: str
    sentences: tuple[str, ...]
    title: str = ""
    snippet_fallback: bool = False


class _Block:
    __slots__ = ("chars", "link_chars")

    def __init__(self) -> None:
        self.chars: list[str] = []
        self.link_chars = 0


class _ContentParser(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.blocks: list[_Block] = [_Block()]
        self.title = ""
        self._skip_depth = 0
        self._link_depth = 0
        self._in_title = False

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_SUBTREES:
            self._skip_depth += 1
        if tag == "title":
            self._in_title = True
        if tag == "a":
            self._link_depth += 1
        if tag in _BLOCK_BOUNDARIES:
            self._new_block()

    def handle_endtag(self, tag):
        if tag in _SKIP_SUBTREES and self._skip_depth:
            self._skip_depth -= 1
        if tag == "title":
            self._in_title = False
        if tag == "a" and self._link_depth:
            self._link_depth -= 1
        if tag in _BLOCK_BOUNDARIES:
            self._new_block()

    def handle_data(self, data):
        if self._in_title:
            self.title += data
            return
        if self._skip_depth:
            return
        block = self.blocks[-1]
        block.chars.append(data)
        if self._link_depth:
            block.link_chars += len(data.strip())

    def _new_block(self) -> None:
        if self.blocks[-1].chars:
            self.blocks.append(_Block())


def _block_texts(blocks: list[_Block]) -> list[tuple[str, float]]:
    """(text, link_ratio) for each non-empty block, whitespace-collapsed."""
    out = []
    for block in blocks:
        text = _WHITESPACE.sub(" ", "".join(block.chars)).strip()
        if not text:
            continue
        ratio = block.link_chars / max(len(text), 1)
        out.append((text, ratio))
    return out


def extract_content(raw_html: str, url: str) -> CleanDocument:
    """Strip boilerplate from a raw page and return its sentence list.

    Raises EmptyDocument when nothing extractable remains.
    """
    if not raw_html.strip():
        raise EmptyDocument(f"empty body from {url}")
    parser = _ContentParser()
    parser.feed(raw_html)
    parser.close()
    candidates = _block_texts(parser.blocks)
    kept = [
        text
        for text, ratio in candidates
        if len(text.split()) >= _MIN_WORDS and ratio <= _MAX_LINK_RATIO
    ]
    if not kept:
        # Density pass ate everything; keep any low-link block at all.
        kept = [text for text, ratio in candidates if ratio <= 0.5]
    sentences: list[str] = []
    for text in kept:
        sentences.extend(split_sentences(text))
    if not sentences:
        raise EmptyDocument(f"no extractable text in {url}")
    return CleanDocument(url=url, sentences=tuple(sentences), title=parser.title.strip())
