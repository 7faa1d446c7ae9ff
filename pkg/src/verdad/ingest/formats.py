"""Format detection and per-format parsers.

Every parser turns file bytes into plain Python data or a Table, which is
then normalized with :func:`to_value` and passed through
:func:`coerce_domain_types`.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import math
import re
from pathlib import PurePath
from typing import Any

import yaml

from verdad.datamodel.timescales import TimeScale, epoch_from_calendar
from verdad.datamodel.units import parse_unit
from verdad.datamodel.values import (
    INT64_MAX, INT64_MIN, CellType, Column, Map, Markdown, Quantity, SourceFormat, Table,
    Value, to_value,
)
from verdad.errors import (
    CoercionError, EncodingError, InvalidValue, ParseError, UnitError, VerdadError,
)
from verdad.ingest import ron
from verdad.ingest.coerce import coerce_domain_types

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXTENSIONS = {
    ".json": SourceFormat.JSON,
    ".yaml": SourceFormat.YAML,
    ".yml": SourceFormat.YAML,
    ".toml": SourceFormat.TOML,
    ".ron": SourceFormat.RON,
    ".csv": SourceFormat.CSV,
    ".xlsx": SourceFormat.XLSX,
    ".md": SourceFormat.MARKDOWN,
}


def detect_format(path: str | PurePath) -> SourceFormat | None:
    """Format for a file path by extension, or ``None`` for opaque files."""
    return EXTENSIONS.get(PurePath(path).suffix.lower())


class PlainLoader(yaml.SafeLoader):
    """Safe YAML loader that keeps timestamps as text."""


PlainLoader.yaml_implicit_resolvers = {
    ch: [(tag, rx) for tag, rx in resolvers if tag != "tag:yaml.org,2002:timestamp"]
    for ch, resolvers in yaml.SafeLoader.yaml_implicit_resolvers.items()
}


def _decode(data: bytes, fmt: SourceFormat, path: str | None) -> str:
    try:
        return data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise EncodingError(fmt.value, f"not valid UTF-8 ({exc.reason} at byte {exc.start})",
                            path=path) from None


def _reject_constant(name: str):
    raise ValueError(f"non-finite number {name} is not allowed")


def _load_json(text: str, path: str | None) -> Any:
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError("json", exc.msg, exc.lineno, exc.colno, path) from None
    except ValueError as exc:
        raise ParseError("json", str(exc), path=path) from None


def _stringify_keys(obj: Any) -> Any:
    if isinstance(obj, dict):
        out = {}
        for k, v in obj.items():
            if isinstance(k, (bool, int, float)):
                k = str(k).lower() if isinstance(k, bool) else str(k)
            out[k] = _stringify_keys(v)
        return out
    if isinstance(obj, list):
        return [_stringify_keys(v) for v in obj]
    return obj


def load_yaml_text(text: str, fmt: str = "yaml", path: str | None = None) -> Any:
    try:
        return _stringify_keys(yaml.load(text, Loader=PlainLoader))
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark else None
        col = mark.column + 1 if mark else None
        raise ParseError(fmt, str(exc.problem or exc), line, col, path) from None
    except yaml.YAMLError as exc:
        raise ParseError(fmt, str(exc), path=path) from None


def _toml_plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _toml_plain(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_toml_plain(v) for v in obj]
    if isinstance(obj, (dt.datetime, dt.date, dt.time)):
        return obj.isoformat()
    return obj


_TOML_LOC = re.compile(r"\s*\(at line (\d+), column (\d+)\)")


def _load_toml(text: str, path: str | None) -> Any:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        msg = str(exc)
        m = _TOML_LOC.search(msg)
        line, col = (int(m.group(1)), int(m.group(2))) if m else (None, None)
        raise ParseError("toml", _TOML_LOC.sub("", msg), line, col, path) from None
    return _toml_plain(data)


def _load_ron(text: str, path: str | None) -> Any:
    try:
        return ron.loads(text)
    except ron.RonError as exc:
        raise ParseError("ron", exc.message, exc.line, exc.column, path) from None


# -- tables --------------------------------------------------------------------

_UNIT_HEADER = re.compile(r"^(?P<name>.*\S)\s*\[(?P<unit>[^\[\]]+)\]$")


def _split_header(name: str, fmt: str, path: str | None):
    """``"thrust [kN]"`` -> ("thrust", UnitExpr); plain names have no unit."""
    m = _UNIT_HEADER.match(name)
    if not m:
        return name, None
    try:
        return m["name"], parse_unit(m["unit"].strip())
    except UnitError as exc:
        raise ParseError(fmt, f"column {name!r}: {exc}", path=path) from None


def _parse_int(text: str) -> int | None:
    if not re.fullmatch(r"[+-]?\d+", text):
        return None
    v = int(text)
    return v if INT64_MIN <= v <= INT64_MAX else None


def _parse_float(text: str) -> float | None:
    try:
        return float(text)
    except ValueError:
        return None


def _csv_column(cells: list[str], name: str, path: str | None, first_line: int):
    """Infer one CSV column: Int within Float within Text, empty -> null."""
    stripped = [c.strip() for c in cells]
    present = [(i, c) for i, c in enumerate(stripped) if c != ""]
    nullable = len(present) < len(cells)
    if not present:
        return CellType.TEXT, nullable, [None] * len(cells)
    ints = [_parse_int(c) for _, c in present]
    if all(v is not None for v in ints):
        out: list[Any] = [None] * len(cells)
        for (i, _), v in zip(present, ints):
            out[i] = v
        return CellType.INT, nullable, out
    floats = [_parse_float(c) for _, c in present]
    if all(v is not None for v in floats):
        for (i, c), v in zip(present, floats):
            if not math.isfinite(v):
                raise ParseError("csv", f"non-finite number {c!r} in column {name!r}",
                                 first_line + i, path=path)
        out = [None] * len(cells)
        for (i, _), v in zip(present, floats):
            out[i] = v
        return CellType.FLOAT, nullable, out
    return CellType.TEXT, nullable, [c if c.strip() != "" else None for c in cells]


def _attach_unit(ctype, cells, unit, name, fmt, path):
    if unit is None:
        return ctype, cells
    if ctype not in (CellType.INT, CellType.FLOAT):
        if all(c is None for c in cells):
            return CellType.QUANTITY, cells
        raise ParseError(fmt, f"column {name!r} declares a unit but is not numeric", path=path)
    return CellType.QUANTITY, [None if c is None else Quantity(c, unit) for c in cells]


def _parse_csv(text: str, path: str | None) -> Table:
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        rows = [r for r in reader]
    except csv.Error as exc:
        raise ParseError("csv", str(exc), reader.line_num, path=path) from None
    while rows and all(c.strip() == "" for c in rows[-1]):
        rows.pop()
    if not rows:
        raise ParseError("csv", "missing header row", 1, path=path)
    header, body = rows[0], rows[1:]
    for lineno, row in enumerate(body, 2):
        if len(row) != len(header):
            raise ParseError("csv", f"row has {len(row)} cells, header has {len(header)}",
                             lineno, path=path)
    columns, cols_cells = [], []
    for j, raw_name in enumerate(header):
        name, unit = _split_header(raw_name.strip(), "csv", path)
        if not name:
            raise ParseError("csv", f"empty column name in column {j + 1}", 1, j + 1, path)
        ctype, nullable, cells = _csv_column([r[j] for r in body], name, path, 2)
        ctype, cells = _attach_unit(ctype, cells, unit, name, "csv", path)
        columns.append(Column(name, ctype, nullable))
        cols_cells.append(cells)
    try:
        return Table(tuple(columns), tuple(zip(*cols_cells)) if cols_cells else ())
    except InvalidValue as exc:
        raise ParseError("csv", str(exc), path=path) from None


def _xlsx_cell(v: Any) -> Any:
    if isinstance(v, dt.datetime):
        return epoch_from_calendar(v.year, v.month, v.day, v.hour, v.minute,
                                   v.second + v.microsecond / 1e6, TimeScale.UTC)
    if isinstance(v, dt.date):
        return epoch_from_calendar(v.year, v.month, v.day, scale=TimeScale.UTC)
    if isinstance(v, dt.time):
        return v.isoformat()
    if isinstance(v, str) and v.strip() == "":
        return None
    if isinstance(v, float) and not math.isfinite(v):
        raise InvalidValue("non-finite number in spreadsheet cell")
    return v


def _parse_xlsx(data: bytes, path: str | None) -> Map:
    import openpyxl

    try:
        wb = openpyxl.load_workbook(io.BytesIO(data), read_only=True, data_only=True)
    except Exception as exc:  # openpyxl raises a variety of zip/xml errors
        raise ParseError("xlsx", f"cannot read workbook: {exc}", path=path) from None
    sheets = {}
    try:
        for ws in wb.worksheets:
            rows = [list(r) for r in ws.iter_rows(values_only=True)]
            while rows and all(c is None or (isinstance(c, str) and not c.strip()) for c in rows[-1]):
                rows.pop()
            if "." in ws.title or not ws.title:
                raise ParseError("xlsx", f"sheet name {ws.title!r} cannot be a key", path=path)
            if not rows:
                sheets[ws.title] = Table((), ())
                continue
            header = rows[0]
            while header and header[-1] is None:
                header.pop()
            width = len(header)
            body = []
            for i, r in enumerate(rows[1:], 2):
                if any(c is not None for c in r[width:]):
                    raise ParseError("xlsx", f"sheet {ws.title!r} row {i} has cells beyond the header",
                                     i, path=path)
                body.append([_xlsx_cell(c) for c in (r + [None] * width)[:width]])
            columns, cols_cells = [], []
            for j, raw in enumerate(header):
                if raw is None or str(raw).strip() == "":
                    raise ParseError("xlsx", f"sheet {ws.title!r}: empty header in column {j + 1}",
                                     1, j + 1, path)
                name, unit = _split_header(str(raw).strip(), "xlsx", path)
                cells = [r[j] for r in body]
                try:
                    t = Table.infer([name], [[c] for c in cells])
                except InvalidValue as exc:
                    raise ParseError("xlsx", f"sheet {ws.title!r}: {exc}", path=path) from None
                col = t.columns[0]
                ctype, cells = _attach_unit(col.ctype, [r[0] for r in t.rows], unit, name, "xlsx", path)
                columns.append(Column(name, ctype, col.nullable))
                cols_cells.append(cells)
            sheets[ws.title] = Table(tuple(columns), tuple(zip(*cols_cells)))
    finally:
        wb.close()
    return Map(sheets)


# -- markdown --------------------------------------------------------------------

_FRONT_MATTER = re.compile(r"\A---[ \t]*\r?\n(?P<fm>.*?)(?:^|\n)(?:---|\.\.\.)[ \t]*(?:\r?\n|\Z)", re.S | re.M)


def _parse_markdown(text: str, path: str | None) -> Markdown:
    m = _FRONT_MATTER.match(text)
    if not m:
        return Markdown(text)
    fm = load_yaml_text(m["fm"], "markdown", path)
    if fm is None:
        fm = {}
    if not isinstance(fm, dict):
        raise ParseError("markdown", "front matter must be a mapping", 2, path=path)
    return Markdown(text[m.end():], to_value(fm))


def parse_file(data: bytes, fmt: SourceFormat, path: str | None = None) -> Value:
    """Parse file bytes of a known format into a coerced Value."""
    fmt = SourceFormat(fmt)
    try:
        if fmt is SourceFormat.XLSX:
            value = _parse_xlsx(data, path)
        else:
            text = _decode(data, fmt, path)
            if fmt is SourceFormat.JSON:
                value = _load_json(text, path)
            elif fmt is SourceFormat.YAML:
                value = load_yaml_text(text, "yaml", path)
            elif fmt is SourceFormat.TOML:
                value = _load_toml(text, path)
            elif fmt is SourceFormat.RON:
                value = _load_ron(text, path)
            elif fmt is SourceFormat.CSV:
                value = _parse_csv(text, path)
            else:
                value = _parse_markdown(text, path)
        return coerce_domain_types(to_value(value))
    except (InvalidValue, CoercionError) as exc:
        raise ParseError(fmt.value, str(exc), path=path) from exc
    except ParseError:
        raise
    except VerdadError as exc:
        raise ParseError(fmt.value, str(exc), path=path) from exc
