"""Term frames: canonical term text plus one trailing newline, UTF-8 encoded."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import TermSyntaxError
from ..terms import Term, format_term, parse_term


def encode(t: Term) -> bytes:
    return (format_term(t) + "\n").encode("utf-8")


def decode(raw: bytes) -> Term:
    """Parse one frame; the trailing newline (and a CR before it) is optional."""
    text = raw.decode("utf-8")
    if text.endswith("\n"):
        text = text[:-1]
    if text.endswith("\r"):
        text = text[:-1]
    if "\n" in text:
        raise TermSyntaxError("frame contains an interior newline", text.index("\n"), text)
    return parse_term(text)


@dataclass(frozen=True)
class WireMessage:
    payload: Term

    @property
    def raw(self) -> bytes:
        return encode(self.payload)

    @classmethod
    def from_raw(cls, raw: bytes) -> "WireMessage":
        return cls(decode(raw))
