"""Character-class tokenization and text reconstruction.

Text is cut into maximal runs of letters (``alpha``), of ASCII digits
(``num``) and of whitespace (``sep``); every other character is a
single-character ``symb`` token.  Tokens partition the text, so joining
their contents gives the input back.
"""

from __future__ import annotations

import unicodedata
from itertools import groupby
from typing import Iterable

from alvis.errors import ReconstructionError
from alvis.model import Token, TokenType, make_id

TokenClass = TokenType

_DIGITS = frozenset("0123456789")


def classify_char(c: str) -> TokenType:
    if c.isalpha():
        return TokenType.ALPHA
    if c in _DIGITS:
        return TokenType.NUM
    if c.isspace():
        return TokenType.SEP
    # combining accents belong to the letter they decorate
    if unicodedata.category(c).startswith("M"):
        return TokenType.ALPHA
    return TokenType.SYMB


def _runs(text: str):
    pos = 0
    for cls, group in groupby(text, classify_char):
        chunk = "".join(group)
        if cls is TokenType.SYMB:
            for c in chunk:
                yield cls, c, pos
                pos += 1
        else:
            yield cls, chunk, pos
            pos += len(chunk)


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens numbered from 1 with inclusive offsets."""
    return [
        Token(make_id("token", n), chunk, start, start + len(chunk) - 1, cls)
        for n, (cls, chunk, start) in enumerate(_runs(text), start=1)
    ]


def reconstruct_text(tokens: Iterable[Token]) -> str:
    """Join token contents back into the text they were cut from.

    Raises ReconstructionError naming the first token whose offsets leave a
    gap, overlap the previous token or disagree with its content length.
    """
    parts = []
    expected = 0
    for n, tok in enumerate(tokens, start=1):
        ordinal = tok.ordinal if tok.ordinal is not None else n
        if tok.start != expected:
            what = "gap" if tok.start > expected else "overlap"
            raise ReconstructionError(
                f"{what} before {tok.id}: starts at {tok.start}, expected {expected}", ordinal
            )
        if tok.end - tok.start + 1 != len(tok.content):
            raise ReconstructionError(
                f"{tok.id}: offsets {tok.start}..{tok.end} do not match content length "
                f"{len(tok.content)}",
                ordinal,
            )
        parts.append(tok.content)
        expected = tok.end + 1
    return "".join(parts)
