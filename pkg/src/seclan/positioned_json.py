"""JSON reader that tracks source positions.

Stdlib json reports line/column only for syntax errors; description-file
diagnostics also need positions for semantic errors (unknown fields,
unknown vocabulary), so this module parses JSON into position-carrying
values. Duplicate object keys are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


class JsonSyntaxError(Exception):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Positioned:
    """A decoded JSON value plus the 1-based position of its first token."""

    value: Union[dict, list, str, int, float, bool, None]
    line: int
    column: int


_ESCAPES = {
    '"': '"',
    "\\": "\\",
    "/": "/",
    "b": "\b",
    "f": "\f",
    "n": "\n",
    "r": "\r",
    "t": "\t",
}

_NUMBER_CHARS = set("0123456789+-.eE")


class _Reader:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0
        self.line = 1
        self.column = 1

    def error(self, message: str) -> JsonSyntaxError:
        return JsonSyntaxError(message, self.line, self.column)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def advance(self) -> str:
        char = self.text[self.pos]
        self.pos += 1
        if char == "\n":
            self.line += 1
            self.column = 1
        else:
            self.column += 1
        return char

    def skip_whitespace(self) -> None:
        while self.peek() in (" ", "\t", "\n", "\r") and self.peek():
            self.advance()

    def expect(self, char: str) -> None:
        if self.peek() != char:
            found = repr(self.peek()) if self.peek() else "end of input"
            raise self.error(f"expected {char!r}, found {found}")
        self.advance()

    def parse_value(self) -> Positioned:
        self.skip_whitespace()
        line, column = self.line, self.column
        char = self.peek()
        if not char:
            raise self.error("unexpected end of input")
        if char == "{":
            return Positioned(self.parse_object(), line, column)
        if char == "[":
            return Positioned(self.parse_array(), line, column)
        if char == '"':
            return Positioned(self.parse_string(), line, column)
        if char in "-0123456789":
            return Positioned(self.parse_number(), line, column)
        for literal, value in (("true", True), ("false", False), ("null", None)):
            if self.text.startswith(literal, self.pos):
                for _ in literal:
                    self.advance()
                return Positioned(value, line, column)
        raise self.error(f"unexpected character {char!r}")

    def parse_object(self) -> dict[str, Positioned]:
        self.expect("{")
        result: dict[str, Positioned] = {}
        key_positions: dict[str, tuple[int, int]] = {}
        self.skip_whitespace()
        if self.peek() == "}":
            self.advance()
            return result
        while True:
            self.skip_whitespace()
            key_line, key_column = self.line, self.column
            if self.peek() != '"':
                raise self.error("expected a string object key")
            key = self.parse_string()
            if key in result:
                raise JsonSyntaxError(
                    f"duplicate object key {key!r}", key_line, key_column
                )
            key_positions[key] = (key_line, key_column)
            self.skip_whitespace()
            self.expect(":")
            value = self.parse_value()
            # key position is the more useful anchor for field diagnostics
            result[key] = Positioned(value.value, key_line, key_column)
            self.skip_whitespace()
            if self.peek() == ",":
                self.advance()
                continue
            self.expect("}")
            return result

    def parse_array(self) -> list[Positioned]:
        self.expect("[")
        result: list[Positioned] = []
        self.skip_whitespace()
        if self.peek() == "]":
            self.advance()
            return result
        while True:
            result.append(self.parse_value())
            self.skip_whitespace()
            if self.peek() == ",":
                self.advance()
                continue
            self.expect("]")
            return result

    def parse_string(self) -> str:
        self.expect('"')
        parts: list[str] = []
        while True:
            char = self.peek()
            if not char:
                raise self.error("unterminated string")
            if char == '"':
                self.advance()
                return "".join(parts)
            if char == "\\":
                self.advance()
                escape = self.peek()
                if not escape:
                    raise self.error("unterminated escape sequence")
                if escape == "u":
                    self.advance()
                    parts.append(self._parse_unicode_escape())
                elif escape in _ESCAPES:
                    self.advance()
                    parts.append(_ESCAPES[escape])
                else:
                    raise self.error(f"invalid escape sequence \\{escape}")
            elif char in ("\n", "\r"):
                raise self.error("unescaped newline in string")
            else:
                self.advance()
                parts.append(char)

    def _parse_unicode_escape(self) -> str:
        code = self._read_hex4()
        if 0xD800 <= code <= 0xDBFF and self.text.startswith("\\u", self.pos):
            self.advance()
            self.advance()
            low = self._read_hex4()
            if 0xDC00 <= low <= 0xDFFF:
                code = 0x10000 + ((code - 0xD800) << 10) + (low - 0xDC00)
            else:  # lone surrogate followed by an unrelated escape
                return chr(code) + chr(low)
        return chr(code)

    def _read_hex4(self) -> int:
        digits = ""
        for _ in range(4):
            char = self.peek()
            if char not in "0123456789abcdefABCDEF":
                raise self.error("invalid \\u escape (expected four hex digits)")
            digits += self.advance()
        return int(digits, 16)

    def parse_number(self) -> Union[int, float]:
        start = self.pos
        while self.peek() in _NUMBER_CHARS and self.peek():
            self.advance()
        literal = self.text[start : self.pos]
        try:
            if any(c in literal for c in ".eE"):
                return float(literal)
            return int(literal)
        except ValueError:
            raise self.error(f"invalid number literal {literal!r}") from None


def loads_positioned(text: str) -> Positioned:
    """Parse `text` as a single JSON document with position tracking."""
    reader = _Reader(text)
    value = reader.parse_value()
    reader.skip_whitespace()
    if reader.pos != len(text):
        raise reader.error("trailing content after JSON document")
    return value
