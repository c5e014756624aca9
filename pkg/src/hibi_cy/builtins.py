"""Named posets shipped with the package and input resolution."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import PosetParseError
from .poset import Poset, antichain, chain, ordinal_sum, parse_poset

TABLE1 = ("P1", "P2", "P3", "P4", "P5", "P6")

# degree tuples of the six reference columns, stored descending
TABLE1_DEGREES = {
    "P1": (1, 1, 1),
    "P2": (1, 1, 1, 1, 1),
    "P3": (1, 1, 1, 1),
    "P4": (1, 1, 1),
    "P5": (2, 1),
    "P6": (1, 1, 1, 1, 1),
}

FIGURE_TRANSCRIBED = frozenset({"P2", "P3", "UNSM"})

_DATA_FILES = ("P1", "P2", "P3", "P4", "P5", "N", "V", "UNSM")


@lru_cache(maxsize=None)
def _load(name: str) -> Poset:
    text = resources.files("hibi_cy").joinpath("data", f"{name}.poset").read_text("utf-8")
    return parse_poset(text)


def builtin_names() -> tuple[str, ...]:
    return _DATA_FILES + ("P6", "chain:<n>", "antichain:<n>")


def builtin(name: str) -> Poset:
    if name in _DATA_FILES:
        return _load(name)
    if name == "P6":
        n = _load("N")
        return ordinal_sum(n, n)
    kind, _, arg = name.partition(":")
    if kind in ("chain", "antichain") and arg.isdigit():
        return chain(int(arg)) if kind == "chain" else antichain(int(arg))
    raise KeyError(name)


def resolve(source: str) -> Poset:
    """Resolve a builtin name, ``@path`` to a DSL file, or inline DSL text."""
    if source.startswith("@"):
        return parse_poset(Path(source[1:]).read_text("utf-8"))
    try:
        return builtin(source)
    except KeyError:
        pass
    if ";" in source:
        return parse_poset(source)
    raise PosetParseError(f"unknown builtin poset {source!r}")
