"""Registry of string transformation functions callable from mappings."""
from __future__ import annotations

import inspect
import re
from dataclasses import dataclass
from typing import Callable

FN = "http://uplift.example/fn/"

_XML_WS = re.compile(r"[ \t\r\n]+")


class UnknownFunction(LookupError):
    def __init__(self, iri: str):
        super().__init__(f"no function registered for <{iri}>")
        self.iri = iri


class ArityMismatch(TypeError):
    def __init__(self, iri: str, expected: str, got: int):
        super().__init__(f"<{iri}> takes {expected} argument(s), got {got}")
        self.iri = iri


def trim(s: str) -> str:
    return s.strip(" \t\r\n")


def normalize_space(s: str) -> str:
    return _XML_WS.sub(" ", s).strip(" ")


def lowercase(s: str) -> str:
    return s.lower()


def uppercase(s: str) -> str:
    return s.upper()


def concat(*parts: str) -> str:
    return "".join(parts)


def substring_after(s: str, sep: str) -> str:
    # XPath semantics: empty result when sep does not occur
    head, found, tail = s.partition(sep)
    return tail if found else ""


BUILTINS: dict[str, Callable[..., str]] = {
    FN + "trim": trim,
    FN + "normalizeSpace": normalize_space,
    FN + "lowercase": lowercase,
    FN + "uppercase": uppercase,
    FN + "concat": concat,
    FN + "substringAfter": substring_after,
}


@dataclass(frozen=True, slots=True)
class _Entry:
    fn: Callable[..., str]
    min_args: int
    max_args: int | None


def _arity(fn: Callable) -> tuple[int, int | None]:
    try:
        sig = inspect.signature(fn)
    except (TypeError, ValueError):
        return 0, None
    lo, hi = 0, 0
    for p in sig.parameters.values():
        if p.kind is p.VAR_POSITIONAL:
            hi = None
        elif p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD):
            if p.default is p.empty:
                lo += 1
            if hi is not None:
                hi += 1
    return lo, hi


class FunctionRegistry:
    """Maps function IRIs to pure ``str -> str`` callables.

    The built-in functions are always present; registering an IRI that is
    already known replaces the earlier entry.
    """

    def __init__(self) -> None:
        self._entries: dict[str, _Entry] = {}
        for iri, fn in BUILTINS.items():
            self.register(iri, fn)

    def register(self, iri: str, fn: Callable[..., str]) -> FunctionRegistry:
        self._entries[iri] = _Entry(fn, *_arity(fn))
        return self

    def __contains__(self, iri: str) -> bool:
        return iri in self._entries

    def __iter__(self):
        return iter(self._entries)

    def apply(self, iri: str, args: list[str]) -> str:
        entry = self._entries.get(iri)
        if entry is None:
            raise UnknownFunction(iri)
        n = len(args)
        if n < entry.min_args or (entry.max_args is not None and n > entry.max_args):
            if entry.max_args is None:
                expected = f"at least {entry.min_args}"
            elif entry.min_args == entry.max_args:
                expected = str(entry.min_args)
            else:
                expected = f"{entry.min_args}-{entry.max_args}"
            raise ArityMismatch(iri, expected, n)
        return entry.fn(*args)


def register_function(registry: FunctionRegistry, iri: str,
                      fn: Callable[..., str]) -> FunctionRegistry:
    return registry.register(iri, fn)


def apply_function(registry: FunctionRegistry, iri: str, args: list[str]) -> str:
    return registry.apply(iri, args)
