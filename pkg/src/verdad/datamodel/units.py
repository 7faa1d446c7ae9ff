"""Physical units with exact scale factors and dimensional analysis.

Units are parsed from compact expressions such as ``kg*m/s^2`` or
``km/s`` into a :class:`UnitExpr` that carries an exponent vector over eight
base dimensions and an exact scale factor relative to coherent SI. Scale
factors are kept as ``rational * pi**k`` so that degree/radian conversions
stay exact up to the final float multiplication.

The symbol table lives in ``data/units.txt``; see the header of that file
for the format.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from verdad.errors import DimensionMismatch, MalformedExpression, UnknownUnitSymbol

DIMENSIONS = ("length", "mass", "time", "current", "temperature", "amount", "luminous", "angle")

Dims = tuple[Fraction, ...]
DIMENSIONLESS: Dims = (Fraction(0),) * len(DIMENSIONS)

PREFIXES: dict[str, Fraction] = {
    "Y": Fraction(10) ** 24, "Z": Fraction(10) ** 21, "E": Fraction(10) ** 18,
    "P": Fraction(10) ** 15, "T": Fraction(10) ** 12, "G": Fraction(10) ** 9,
    "M": Fraction(10) ** 6, "k": Fraction(10) ** 3, "h": Fraction(10) ** 2,
    "da": Fraction(10), "d": Fraction(1, 10), "c": Fraction(1, 100),
    "m": Fraction(1, 10 ** 3), "u": Fraction(1, 10 ** 6), "µ": Fraction(1, 10 ** 6),
    "n": Fraction(1, 10 ** 9), "p": Fraction(1, 10 ** 12), "f": Fraction(1, 10 ** 15),
    "a": Fraction(1, 10 ** 18), "z": Fraction(1, 10 ** 21), "y": Fraction(1, 10 ** 24),
}


@dataclass(frozen=True)
class UnitDef:
    symbol: str
    dims: Dims
    factor: Fraction
    pi_power: int
    prefixable: bool


@dataclass(frozen=True)
class UnitExpr:
    """A parsed unit expression.

    ``factor * pi**pi_power`` converts one of this unit to coherent SI.
    ``terms`` is the canonical factor list (symbol, exponent) that the label
    is rendered from. Equality is structural (``N`` != ``kg*m/s^2``);
    use :meth:`convertible_to` for physical compatibility.
    """

    dims: Dims
    factor: Fraction
    pi_power: int = 0
    terms: tuple[tuple[str, Fraction], ...] = ()

    def __post_init__(self):
        if self.factor <= 0:
            raise ValueError("unit scale must be positive")
        if len(self.dims) != len(DIMENSIONS):
            raise ValueError("dimension vector has the wrong length")

    @property
    def scale(self) -> float:
        return float(self.factor) * math.pi ** self.pi_power

    @property
    def label(self) -> str:
        return _render_label(self.terms)

    @property
    def dimensions(self) -> dict[str, Fraction]:
        return {name: e for name, e in zip(DIMENSIONS, self.dims) if e}

    def convertible_to(self, other: UnitExpr) -> bool:
        return self.dims == other.dims

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"UnitExpr({self.label!r})"


def _parse_rational(text: str) -> Fraction:
    return Fraction(text)


def _parse_scale(text: str) -> tuple[Fraction, int]:
    pi_power = 0
    m = re.fullmatch(r"(.+?)\*pi(?:\^(-?\d+))?", text)
    if m:
        text = m.group(1)
        pi_power = int(m.group(2) or 1)
    return Fraction(text), pi_power


def parse_symbol_table(text: str) -> dict[str, UnitDef]:
    table: dict[str, UnitDef] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 + len(DIMENSIONS) + 1:
            raise ValueError(f"unit table line {lineno}: expected {3 + len(DIMENSIONS)} columns")
        symbol = parts[0]
        dims = tuple(_parse_rational(p) for p in parts[1:1 + len(DIMENSIONS)])
        factor, pi_power = _parse_scale(parts[-2])
        if parts[-1] not in ("p", "-"):
            raise ValueError(f"unit table line {lineno}: prefix flag must be 'p' or '-'")
        if symbol in table:
            raise ValueError(f"unit table line {lineno}: duplicate symbol {symbol!r}")
        table[symbol] = UnitDef(symbol, dims, factor, pi_power, parts[-1] == "p")
    return table


@lru_cache(maxsize=None)
def symbol_table() -> dict[str, UnitDef]:
    text = resources.files("verdad.datamodel").joinpath("data/units.txt").read_text("utf-8")
    return parse_symbol_table(text)


def _lookup(symbol: str) -> tuple[Dims, Fraction, int] | None:
    table = symbol_table()
    if symbol in table:
        u = table[symbol]
        return u.dims, u.factor, u.pi_power
    for plen in (2, 1):
        prefix, base = symbol[:plen], symbol[plen:]
        if prefix in PREFIXES and base in table and table[base].prefixable:
            u = table[base]
            return u.dims, u.factor * PREFIXES[prefix], u.pi_power
    return None


# -- expression parser -------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<sym>[A-Za-zµ_][A-Za-zµ_0-9]*)|(?P<num>\d+(?:\.\d+)?)|(?P<op>[*/^()\-]))")


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    pos = 0
    stripped_end = len(text.rstrip())
    while pos < stripped_end:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise MalformedExpression(text, f"unexpected character {text[pos]!r} at {pos}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind), m.end(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise MalformedExpression(self.text, "unexpected end of expression")
        self.i += 1
        return tok

    def expect_op(self, op: str):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            raise MalformedExpression(self.text, f"expected {op!r} at {tok[2]}")

    def parse(self) -> list[tuple[str, Fraction, Dims, Fraction, int]]:
        if not self.tokens:
            raise MalformedExpression(self.text, "empty expression")
        terms = self.expr()
        if self.peek() is not None:
            tok = self.peek()
            raise MalformedExpression(self.text, f"unexpected {tok[1]!r} at {tok[2]}")
        return terms

    def expr(self):
        terms = self.power()
        while (tok := self.peek()) is not None and tok[0] == "op" and tok[1] in "*/":
            self.take()
            rhs = self.power()
            if tok[1] == "/":
                rhs = [(s, -e, d, f, p) for s, e, d, f, p in rhs]
            terms = terms + rhs
        return terms

    def power(self):
        terms = self.atom()
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == "^":
            self.take()
            exp = self.exponent()
            terms = [(s, e * exp, d, f, p) for s, e, d, f, p in terms]
        return terms

    def exponent(self) -> Fraction:
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == "(":
            self.take()
            sign = self._sign()
            num = self._number()
            if (t := self.peek()) is not None and t[0] == "op" and t[1] == "/":
                self.take()
                den = self._number()
                if den == 0:
                    raise MalformedExpression(self.text, "zero exponent denominator")
                num = num / den
            self.expect_op(")")
            return sign * num
        return self._sign() * self._number()

    def _sign(self) -> int:
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == "-":
            self.take()
            return -1
        return 1

    def _number(self) -> Fraction:
        tok = self.take()
        if tok[0] != "num":
            raise MalformedExpression(self.text, f"expected a number at {tok[2]}")
        return Fraction(tok[1])

    def atom(self):
        tok = self.take()
        kind, val, start, end = tok
        if kind == "op" and val == "(":
            terms = self.expr()
            self.expect_op(")")
            return terms
        if kind == "num":
            if Fraction(val) != 1:
                raise MalformedExpression(self.text, f"numeric factor {val!r} is not allowed")
            return []
        if kind == "sym":
            found = _lookup(val)
            if found is None:
                raise UnknownUnitSymbol(self.text, start, end)
            dims, factor, pi_power = found
            return [(val, Fraction(1), dims, factor, pi_power)]
        raise MalformedExpression(self.text, f"unexpected {val!r} at {start}")


def _render_exp(e: Fraction) -> str:
    if e == 1:
        return ""
    if e.denominator == 1:
        return f"^{e.numerator}"
    return f"^({e.numerator}/{e.denominator})"


def _render_label(terms) -> str:
    pos = [(s, e) for s, e in terms if e > 0]
    neg = [(s, -e) for s, e in terms if e < 0]
    head = "*".join(s + _render_exp(e) for s, e in pos) or "1"
    return head + "".join("/" + s + _render_exp(e) for s, e in neg)


@lru_cache(maxsize=4096)
def parse_unit(text: str) -> UnitExpr:
    """Parse a unit expression like ``kg*m/s^2``, ``km/s`` or ``m^(1/2)``.

    Symbols are case-sensitive. Exact matches in the symbol table win over a
    prefix reading, so ``min`` is minutes and ``cd`` is the candela.
    """
    if not isinstance(text, str):
        raise MalformedExpression(repr(text), "unit must be text")
    raw_terms = _Parser(text).parse()
    dims = list(DIMENSIONLESS)
    factor = Fraction(1)
    pi_power = Fraction(0)
    combined: dict[str, Fraction] = {}
    for sym, exp, d, f, p in raw_terms:
        for k in range(len(dims)):
            dims[k] += d[k] * exp
        if exp.denominator == 1:
            factor *= f ** exp.numerator
        else:
            # rational powers of rational scales need not be rational
            approx = Fraction(float(f) ** float(exp))
            factor *= approx
        pi_power += p * exp
        combined[sym] = combined.get(sym, Fraction(0)) + exp
    if pi_power.denominator != 1:
        factor *= Fraction(math.pi ** float(pi_power - int(pi_power)))
        pi_power = Fraction(int(pi_power))
    terms = tuple((s, e) for s, e in combined.items() if e != 0)
    return UnitExpr(tuple(dims), factor, int(pi_power), terms)


def conversion_factor(source: UnitExpr, target: UnitExpr) -> tuple[Fraction, int]:
    if source.dims != target.dims:
        raise DimensionMismatch(source, target)
    return source.factor / target.factor, source.pi_power - target.pi_power


def convert_magnitude(magnitude: float, source: UnitExpr, target: UnitExpr) -> float:
    ratio, pi_power = conversion_factor(source, target)
    if ratio == 1 and pi_power == 0:
        return float(magnitude)
    # exact rational product, one rounding; pi enters as a float power
    value = float(Fraction(magnitude) * ratio)
    if pi_power:
        value *= math.pi ** pi_power
    return value
