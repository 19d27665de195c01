"""Shipped resource files: the English contraction table and a small
B. subtilis sample (dictionaries, lexicon, relations, a bare record)."""

from importlib import resources
from pathlib import Path


def resource_path(*parts: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(*parts)))


def sample_path(name: str) -> Path:
    return resource_path("bsubtilis", name)
