"""Reading of the tab-separated, line-oriented resource files."""

from __future__ import annotations

import os
from typing import BinaryIO, Iterator, Union

from alvis.errors import ResourceFormatError

Source = Union[bytes, bytearray, BinaryIO, "os.PathLike[str]"]


def read_bytes(source: Source) -> bytes:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source)
    if isinstance(source, os.PathLike):
        with open(source, "rb") as fh:
            return fh.read()
    return source.read()


def iter_fields(source: Source) -> Iterator[tuple[int, list[str]]]:
    """Yield ``(line_number, fields)`` for every meaningful line.

    The input must be UTF-8.  Blank lines and lines starting with ``#`` are
    skipped.
    """
    data = read_bytes(source)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        lineno = data.count(b"\n", 0, exc.start) + 1
        raise ResourceFormatError(f"not valid UTF-8 ({exc.reason})", lineno) from None
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line.strip() or line.startswith("#"):
            continue
        yield lineno, line.split("\t")


def split_list(value: str, sep: str = ";") -> list[str]:
    return [] if not value.strip() else [item.strip() for item in value.split(sep)]
