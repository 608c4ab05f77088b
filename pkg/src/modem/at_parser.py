"""Byte-level parsing and canonical printing of the supported AT command subset.

A command line starts with `AT` (any case) and ends with CR. Arguments are
decimal integers or double-quoted strings in which `\\"` and `\\\\` are the
only escapes. Anything else parses to a ParseFailure value.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import StrEnum


class Verb(StrEnum):
    AT = "AT"
    CMGF = "CMGF"
    CMGS = "CMGS"
    CMGR = "CMGR"
    CREG_QUERY = "CREG?"
    CGNSPWR = "CGNSPWR"
    CGNSINF = "CGNSINF"
    SAPBR = "SAPBR"
    HTTPINIT = "HTTPINIT"
    HTTPPARA = "HTTPPARA"
    HTTPACTION = "HTTPACTION"
    HTTPREAD = "HTTPREAD"
    HTTPTERM = "HTTPTERM"


# accepted argument shapes per verb: "i" integer, "s" quoted string
SIGNATURES: dict[Verb, tuple[tuple[str, ...], ...]] = {
    Verb.AT: ((),),
    Verb.CMGF: (("i",),),
    Verb.CMGS: (("s",),),
    Verb.CMGR: (("i",),),
    Verb.CREG_QUERY: ((),),
    Verb.CGNSPWR: (("i",),),
    Verb.CGNSINF: ((),),
    Verb.SAPBR: (("i", "i"), ("i", "i", "s", "s")),
    Verb.HTTPINIT: ((),),
    Verb.HTTPPARA: (("s", "s"), ("s", "i")),
    Verb.HTTPACTION: (("i",),),
    Verb.HTTPREAD: ((),),
    Verb.HTTPTERM: ((),),
}

_INT = re.compile(r"-?\d+")
_NAME = re.compile(r"[A-Za-z]+\??")


@dataclass(frozen=True)
class AtCommand:
    verb: Verb
    args: tuple[int | str, ...] = ()

    def format(self) -> str:
        """Canonical form without the CR terminator"""
        return format_at_command(self)

    def to_bytes(self) -> bytes:
        return (self.format() + "\r").encode("ascii")


@dataclass(frozen=True)
class ParseFailure:
    line: bytes
    reason: str


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_at_command(cmd: AtCommand) -> str:
    if cmd.verb is Verb.AT:
        return "AT"
    text = f"AT+{cmd.verb}"
    if cmd.args:
        text += "=" + ",".join(_quote(a) if isinstance(a, str) else str(a) for a in cmd.args)
    return text


def _split_args(text: str) -> list[int | str] | str:
    """Typed arguments, or an error reason"""
    args: list[int | str] = []
    i = 0
    n = len(text)
    while True:
        if i >= n:
            return "empty argument"
        if text[i] == '"':
            i += 1
            chars = []
            while i < n and text[i] != '"':
                if text[i] == "\\":
                    if i + 1 >= n or text[i + 1] not in ('"', "\\"):
                        return "bad escape in quoted string"
                    i += 1
                chars.append(text[i])
                i += 1
            if i >= n:
                return "unterminated quoted string"
            args.append("".join(chars))
            i += 1
        else:
            m = _INT.match(text, i)
            if not m:
                return f"unexpected character {text[i]!r}"
            args.append(int(m.group()))
            i = m.end()
        if i == n:
            return args
        if text[i] != ",":
            return f"expected ',' at position {i}"
        i += 1


def _shape(args: list[int | str]) -> tuple[str, ...]:
    return tuple("s" if isinstance(a, str) else "i" for a in args)


def parse_at_line(line: bytes) -> AtCommand | ParseFailure:
    """Parse one CR-terminated command line"""
    if not line.endswith(b"\r"):
        return ParseFailure(line, "missing CR terminator")
    try:
        body = line[:-1].decode("ascii").strip(" \n")
    except UnicodeDecodeError:
        return ParseFailure(line, "non-ASCII bytes")
    if body[:2].upper() != "AT":
        return ParseFailure(line, "line does not start with AT")
    rest = body[2:]
    if rest == "":
        return AtCommand(Verb.AT)
    if not rest.startswith("+"):
        return ParseFailure(line, "unsupported basic command")

    m = _NAME.match(rest, 1)
    if not m:
        return ParseFailure(line, "missing command name")
    name = m.group().upper()
    try:
        verb = Verb(name)
    except ValueError:
        return ParseFailure(line, f"unknown command {name}")
    if verb is Verb.AT:
        return ParseFailure(line, "unknown command AT+AT")

    tail = rest[m.end():]
    if tail == "":
        args: list[int | str] = []
    elif tail.startswith("=") and not name.endswith("?"):
        parsed = _split_args(tail[1:])
        if isinstance(parsed, str):
            return ParseFailure(line, parsed)
        args = parsed
    else:
        return ParseFailure(line, f"unexpected text after {name}")

    if _shape(args) not in SIGNATURES[verb]:
        return ParseFailure(line, f"bad arguments for {name}")
    return AtCommand(verb, tuple(args))
