"""A small reader for Rusty Object Notation (RON).

Maps RON onto plain Python data:

* named or anonymous structs ``Name(field: value)`` -> ``dict``
* tuples and tuple structs ``(a, b)`` / ``Name(a, b)`` -> ``list``
* lists ``[...]`` -> ``list``; maps ``{k: v}`` -> ``dict`` with text keys
* ``Some(x)`` -> ``x``; ``None`` and ``()`` -> ``None``
* unit enum variants ``Variant`` -> ``"Variant"``
* chars and strings (including raw strings) -> ``str``

Extension attributes (``#![enable(...)]``) are accepted and ignored.
"""

from __future__ import annotations

import re
from typing import Any


class RonError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{message} at line {line}, column {column}")


_NUMBER = re.compile(
    r"[+-]?(?:0x[0-9a-fA-F_]+|0o[0-7_]+|0b[01_]+"
    r"|(?:\d[\d_]*)?\.?\d[\d_]*(?:[eE][+-]?\d+)?|inf|NaN)"
    r"(?:[iu](?:8|16|32|64|128|size)|f32|f64)?"
)
_IDENT = re.compile(r"r#[A-Za-z_][A-Za-z0-9_]*|[A-Za-z_][A-Za-z0-9_]*")
_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "0": "\0", "\\": "\\", '"': '"', "'": "'"}


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, pos: int | None = None) -> RonError:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return RonError(message, line, col)

    def skip_ws(self) -> None:
        text = self.text
        while self.pos < len(text):
            c = text[self.pos]
            if c.isspace():
                self.pos += 1
            elif text.startswith("//", self.pos):
                nl = text.find("\n", self.pos)
                self.pos = len(text) if nl < 0 else nl + 1
            elif text.startswith("/*", self.pos):
                depth, i = 1, self.pos + 2
                while depth and i < len(text):
                    if text.startswith("/*", i):
                        depth, i = depth + 1, i + 2
                    elif text.startswith("*/", i):
                        depth, i = depth - 1, i + 2
                    else:
                        i += 1
                if depth:
                    raise self.error("unterminated block comment")
                self.pos = i
            else:
                break

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            found = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            raise self.error(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def document(self) -> Any:
        while self.peek() == "#":
            self.attribute()
        value = self.value()
        if self.peek():
            raise self.error("trailing characters after value")
        return value

    def attribute(self) -> None:
        self.expect("#")
        if self.peek() == "!":
            self.pos += 1
        self.expect("[")
        depth = 1
        while depth:
            if self.pos >= len(self.text):
                raise self.error("unterminated attribute")
            c = self.text[self.pos]
            depth += {"[": 1, "]": -1}.get(c, 0)
            self.pos += 1

    def value(self) -> Any:
        c = self.peek()
        if not c:
            raise self.error("unexpected end of input")
        if c == "[":
            return self.seq("[", "]")
        if c == "{":
            return self.map()
        if c == "(":
            return self.paren(None)
        if c == '"':
            return self.string()
        if c == "'":
            return self.char()
        if c == "r" and re.match(r'r#*"', self.text[self.pos:]):
            return self.raw_string()
        if c == "b" and self.text.startswith('b"', self.pos):
            self.pos += 1
            return self.string()
        m = _IDENT.match(self.text, self.pos)
        if m and not (c in "+-" or c.isdigit()):
            return self.ident_value(m)
        return self.number()

    def ident_value(self, m: re.Match) -> Any:
        name = m.group()
        self.pos = m.end()
        if name == "true":
            return True
        if name == "false":
            return False
        if name == "None":
            return None
        if name in ("inf", "NaN"):
            return float(name)
        if self.peek() == "(":
            if name == "Some":
                self.expect("(")
                v = self.value()
                if self.peek() == ",":
                    self.pos += 1
                self.expect(")")
                return v
            return self.paren(name)
        if self.peek() == "{":
            return self.map()
        return name[2:] if name.startswith("r#") else name

    def seq(self, open_: str, close: str) -> list:
        self.expect(open_)
        return self.items(close)

    def items(self, close: str) -> list:
        items = []
        while self.peek() != close:
            items.append(self.value())
            if self.peek() == ",":
                self.pos += 1
            elif self.peek() != close:
                raise self.error(f"expected ',' or {close!r}")
        self.pos += 1
        return items

    def map(self) -> dict:
        self.expect("{")
        out: dict[str, Any] = {}
        while self.peek() != "}":
            key_pos = self.pos
            key = self.value()
            if isinstance(key, (dict, list)) or key is None:
                raise self.error("map keys must be scalars", key_pos)
            key = str(key).lower() if isinstance(key, bool) else str(key)
            self.expect(":")
            if key in out:
                raise self.error(f"duplicate map key {key!r}", key_pos)
            out[key] = self.value()
            if self.peek() == ",":
                self.pos += 1
            elif self.peek() != "}":
                raise self.error("expected ',' or '}'")
        self.pos += 1
        return out

    def paren(self, name: str | None) -> Any:
        # struct if the first element is "ident:", tuple otherwise
        self.expect("(")
        if self.peek() == ")":
            self.pos += 1
            return None if name is None else name
        save = self.pos
        m = _IDENT.match(self.text, self.pos)
        is_struct = False
        if m:
            self.pos = m.end()
            is_struct = self.peek() == ":" and not self.text.startswith("::", self.pos)
        self.pos = save
        if not is_struct:
            return self.items(")")
        out: dict[str, Any] = {}
        while self.peek() != ")":
            m = _IDENT.match(self.text, self.pos)
            if not m:
                raise self.error("expected field name")
            field = m.group()
            field = field[2:] if field.startswith("r#") else field
            self.pos = m.end()
            self.expect(":")
            if field in out:
                raise self.error(f"duplicate field {field!r}")
            out[field] = self.value()
            if self.peek() == ",":
                self.pos += 1
            elif self.peek() != ")":
                raise self.error("expected ',' or ')'")
        self.pos += 1
        return out

    def string(self) -> str:
        start = self.pos
        self.expect('"')
        out = []
        text = self.text
        while True:
            if self.pos >= len(text):
                raise self.error("unterminated string", start)
            c = text[self.pos]
            if c == '"':
                self.pos += 1
                return "".join(out)
            if c == "\\":
                self.pos += 1
                out.append(self.escape())
            else:
                out.append(c)
                self.pos += 1

    def escape(self) -> str:
        c = self.text[self.pos:self.pos + 1]
        if c in _ESCAPES:
            self.pos += 1
            return _ESCAPES[c]
        if c == "x":
            code = self.text[self.pos + 1:self.pos + 3]
            self.pos += 3
            return chr(int(code, 16))
        if c == "u":
            m = re.match(r"u\{([0-9a-fA-F]{1,6})\}", self.text[self.pos:])
            if not m:
                raise self.error("bad unicode escape")
            self.pos += m.end()
            return chr(int(m.group(1), 16))
        if c == "\n":
            self.pos += 1
            while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
                self.pos += 1
            return ""
        raise self.error(f"unknown escape \\{c}")

    def raw_string(self) -> str:
        m = re.match(r'r(#*)"', self.text[self.pos:])
        hashes = m.group(1)
        start = self.pos + m.end()
        end = self.text.find('"' + hashes, start)
        if end < 0:
            raise self.error("unterminated raw string")
        self.pos = end + 1 + len(hashes)
        return self.text[start:end]

    def char(self) -> str:
        self.expect("'")
        if self.text[self.pos:self.pos + 1] == "\\":
            self.pos += 1
            ch = self.escape()
        else:
            ch = self.text[self.pos:self.pos + 1]
            self.pos += 1
        if self.text[self.pos:self.pos + 1] != "'":
            raise self.error("unterminated char literal")
        self.pos += 1
        return ch

    def number(self) -> int | float:
        m = _NUMBER.match(self.text, self.pos)
        if not m or not m.group():
            raise self.error("expected a value")
        raw = m.group()
        self.pos = m.end()
        body = re.sub(r"(?:[iu](?:8|16|32|64|128|size)|f32|f64)$", "", raw).replace("_", "")
        sign = -1 if body.startswith("-") else 1
        digits = body.lstrip("+-")
        if digits in ("inf", "NaN"):
            return sign * float(digits)
        if digits[:2] in ("0x", "0o", "0b"):
            return sign * int(digits, 0)
        if any(ch in digits for ch in ".eE") or raw.endswith(("f32", "f64")):
            return float(body)
        return int(body)


def loads(text: str) -> Any:
    """Parse a RON document into plain Python data."""
    return _Reader(text).document()
