"""The generic value type that every input format normalizes to.

A ``Value`` is one of fourteen variants. Scalars and compound types use the
corresponding immutable Python types so that templates and user code can
work with them directly:

=============  ==========================================
variant        Python representation
=============  ==========================================
Null           ``None``
Bool           ``bool``
Int            ``int`` (signed 64-bit range)
Float          ``float`` (finite)
Text           ``str``
Bytes          ``bytes``
Quantity       :class:`Quantity`
Epoch          :class:`~verdad.datamodel.timescales.Epoch`
Table          :class:`Table`
Markdown       :class:`Markdown`
Provenance     :class:`ProvenanceRecord`
Annotation     :class:`AnnotationRecord`
Sequence       ``tuple`` of Value
Map            :class:`Map`
=============  ==========================================
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import Any, Union

from verdad.datamodel.timescales import Epoch, TimeScale
from verdad.datamodel.units import UnitExpr, convert_magnitude, parse_unit
from verdad.errors import InvalidValue

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

VARIANTS = (
    "null", "bool", "int", "float", "text", "bytes", "quantity", "epoch",
    "table", "markdown", "provenance", "annotation", "sequence", "map",
)


# -- key paths ---------------------------------------------------------------


def check_segment(segment: Any) -> str:
    if not isinstance(segment, str) or not segment or "." in segment:
        raise InvalidValue(f"invalid key segment {segment!r}: must be non-empty text without '.'")
    return segment


@dataclass(frozen=True, order=True)
class KeyPath:
    """Dot-separated namespace address, e.g. ``propulsion.engine.thrust``."""

    segments: tuple[str, ...]

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise InvalidValue("a key path needs at least one segment")
        for s in segs:
            check_segment(s)
        object.__setattr__(self, "segments", segs)

    @classmethod
    def parse(cls, text: str | KeyPath) -> KeyPath:
        if isinstance(text, KeyPath):
            return text
        return cls(tuple(text.split(".")))

    def __str__(self) -> str:
        return ".".join(self.segments)

    def __repr__(self) -> str:
        return f"KeyPath({str(self)!r})"

    def __len__(self) -> int:
        return len(self.segments)

    def child(self, *segments: str) -> KeyPath:
        return KeyPath(self.segments + tuple(segments))

    def startswith(self, prefix: KeyPath) -> bool:
        return self.segments[:len(prefix.segments)] == prefix.segments

    def relative_to(self, prefix: KeyPath) -> tuple[str, ...]:
        if not self.startswith(prefix):
            raise ValueError(f"{self} is not under {prefix}")
        return self.segments[len(prefix.segments):]


# -- compound and domain types -----------------------------------------------


class Map(Mapping):
    """Immutable, insertion-ordered, string-keyed map of Values.

    Equality ignores key order, as for ``dict``.
    """

    __slots__ = ("_data", "_hash")

    def __init__(self, items: Mapping[str, Any] | Iterable[tuple[str, Any]] = ()):
        data = {}
        pairs = items.items() if isinstance(items, Mapping) else items
        for k, v in pairs:
            check_segment(k)
            if k in data:
                raise InvalidValue(f"duplicate map key {k!r}")
            data[k] = v
        self._data = data
        self._hash = None

    def __getitem__(self, key: str) -> Any:
        return self._data[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Map):
            return self._data == other._data
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._data.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Map({self._data!r})"

    def replace(self, key: str, value: Any) -> Map:
        data = dict(self._data)
        data[key] = value
        return Map(data)

    def without(self, key: str) -> Map:
        return Map((k, v) for k, v in self._data.items() if k != key)


@dataclass(frozen=True)
class Quantity:
    magnitude: float
    unit: UnitExpr

    def __post_init__(self):
        if isinstance(self.magnitude, bool) or not isinstance(self.magnitude, (int, float)):
            raise InvalidValue(f"quantity magnitude must be a number, got {self.magnitude!r}")
        mag = float(self.magnitude)
        if not math.isfinite(mag):
            raise InvalidValue("quantity magnitude must be finite")
        object.__setattr__(self, "magnitude", mag)
        if isinstance(self.unit, str):
            object.__setattr__(self, "unit", parse_unit(self.unit))

    def to(self, target: UnitExpr | str) -> Quantity:
        return convert_quantity(self, target)

    def __str__(self) -> str:
        return f"{format_number(self.magnitude)} {self.unit.label}"


def convert_quantity(q: Quantity, target: UnitExpr | str) -> Quantity:
    if isinstance(target, str):
        target = parse_unit(target)
    return Quantity(convert_magnitude(q.magnitude, q.unit, target), target)


def format_number(x: float) -> str:
    """Shortest round-trip decimal, without a trailing ``.0`` on integral values."""
    text = repr(float(x))
    if text.endswith(".0"):
        text = text[:-2]
    return text


class CellType(str, enum.Enum):
    INT = "int"
    FLOAT = "float"
    TEXT = "text"
    BOOL = "bool"
    QUANTITY = "quantity"
    EPOCH = "epoch"


_CELL_CHECK = {
    CellType.INT: lambda v: isinstance(v, int) and not isinstance(v, bool),
    CellType.FLOAT: lambda v: isinstance(v, float),
    CellType.TEXT: lambda v: isinstance(v, str),
    CellType.BOOL: lambda v: isinstance(v, bool),
    CellType.QUANTITY: lambda v: isinstance(v, Quantity),
    CellType.EPOCH: lambda v: isinstance(v, Epoch),
}


@dataclass(frozen=True)
class Column:
    name: str
    ctype: CellType
    nullable: bool = False


@dataclass(frozen=True)
class Table:
    columns: tuple[Column, ...]
    rows: tuple[tuple[Any, ...], ...]

    def __post_init__(self):
        cols = tuple(self.columns)
        rows = tuple(tuple(r) for r in self.rows)
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "rows", rows)
        names = [c.name for c in cols]
        if any(not isinstance(n, str) or not n for n in names):
            raise InvalidValue("table column names must be non-empty text")
        if len(set(names)) != len(names):
            raise InvalidValue(f"duplicate table column names in {names}")
        for i, row in enumerate(rows):
            if len(row) != len(cols):
                raise InvalidValue(f"table row {i} has {len(row)} cells, expected {len(cols)}")
            for col, cell in zip(cols, row):
                if cell is None:
                    if not col.nullable:
                        raise InvalidValue(f"null cell in non-nullable column {col.name!r} (row {i})")
                elif not _CELL_CHECK[col.ctype](cell):
                    raise InvalidValue(f"cell {cell!r} in row {i} does not match column "
                                       f"{col.name!r} of type {col.ctype.value}")

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def column(self, name: str) -> tuple[Any, ...]:
        idx = self.column_names.index(name)
        return tuple(row[idx] for row in self.rows)

    def row(self, index: int) -> Map:
        return Map(zip(self.column_names, self.rows[index]))

    @classmethod
    def infer(cls, names: Iterable[str], rows: Iterable[Iterable[Any]]) -> Table:
        """Build a table from Values, inferring one type per column.

        Ints widen to Float when mixed with floats. Any other mix of types
        raises :class:`InvalidValue`.
        """
        names = tuple(names)
        rows = [list(r) for r in rows]
        columns = []
        for j, name in enumerate(names):
            cells = [r[j] for r in rows if j < len(r)]
            ctype, nullable = infer_cell_type(cells, name)
            if ctype is CellType.FLOAT:
                for r in rows:
                    if j < len(r) and r[j] is not None:
                        r[j] = float(r[j])
            columns.append(Column(name, ctype, nullable))
        return cls(tuple(columns), tuple(tuple(r) for r in rows))


def infer_cell_type(cells: list[Any], name: str = "?") -> tuple[CellType, bool]:
    nullable = any(c is None for c in cells)
    present = [c for c in cells if c is not None]
    if not present:
        return CellType.TEXT, True
    kinds = set()
    for c in present:
        for ctype, check in _CELL_CHECK.items():
            if check(c):
                kinds.add(ctype)
                break
        else:
            raise InvalidValue(f"column {name!r}: {type(c).__name__} cannot be a table cell")
    if kinds == {CellType.INT, CellType.FLOAT}:
        return CellType.FLOAT, nullable
    if len(kinds) != 1:
        raise InvalidValue(f"column {name!r} mixes {sorted(k.value for k in kinds)}")
    return kinds.pop(), nullable


@dataclass(frozen=True)
class Markdown:
    body: str
    front_matter: Map | None = None

    def __post_init__(self):
        if self.front_matter is not None and not isinstance(self.front_matter, Map):
            raise InvalidValue("markdown front matter must be a Map")

    def __str__(self) -> str:
        return self.body


class SourceFormat(str, enum.Enum):
    JSON = "json"
    YAML = "yaml"
    TOML = "toml"
    RON = "ron"
    CSV = "csv"
    XLSX = "xlsx"
    MARKDOWN = "markdown"


@dataclass(frozen=True)
class Origin:
    """Where an entry came from: user input, or a named analysis bundle."""

    bundle: str | None = None

    @property
    def is_user_input(self) -> bool:
        return self.bundle is None

    def __str__(self) -> str:
        return "UserInput" if self.bundle is None else f"AnalysisOutput({self.bundle})"


USER_INPUT = Origin()


@dataclass(frozen=True)
class ProvenanceRecord:
    source_path: str
    format: SourceFormat | None
    content_hash: str
    origin: Origin = USER_INPUT
    load_sequence: int = 0


class AnnotationKind(str, enum.Enum):
    COMMENT = "comment"
    QUESTION = "question"
    ISSUE = "issue"
    SUGGESTION = "suggestion"


@dataclass(frozen=True)
class AnnotationRecord:
    target: KeyPath
    kind: AnnotationKind
    author: str
    body: str
    timestamp: Epoch

    def __post_init__(self):
        object.__setattr__(self, "target", KeyPath.parse(self.target))
        object.__setattr__(self, "kind", AnnotationKind(self.kind))
        if not isinstance(self.body, str) or not self.body.strip():
            raise InvalidValue("annotation body must be non-empty")
        if self.timestamp.scale is not TimeScale.UTC:
            raise InvalidValue("annotation timestamps are UTC epochs")


Value = Union[None, bool, int, float, str, bytes, Quantity, Epoch, Table, Markdown,
              ProvenanceRecord, AnnotationRecord, tuple, Map]


_VARIANT_TYPES = (
    (type(None), "null"), (bool, "bool"), (int, "int"), (float, "float"), (str, "text"),
    (bytes, "bytes"), (Quantity, "quantity"), (Epoch, "epoch"), (Table, "table"),
    (Markdown, "markdown"), (ProvenanceRecord, "provenance"), (AnnotationRecord, "annotation"),
    (tuple, "sequence"), (Map, "map"),
)


def variant_of(value: Any) -> str:
    for typ, name in _VARIANT_TYPES:
        if isinstance(value, typ):
            return name
    raise InvalidValue(f"{type(value).__name__} is not a Value variant")


def to_value(obj: Any) -> Value:
    """Convert plain Python data (dict/list/scalars) into a Value tree.

    Rejects non-finite floats, integers outside int64, non-text or dotted
    map keys, and types with no variant.
    """
    if obj is None or isinstance(obj, (bool, str, bytes, Quantity, Epoch, Table, Markdown,
                                       ProvenanceRecord, AnnotationRecord)):
        return obj
    if isinstance(obj, int):
        if not INT64_MIN <= obj <= INT64_MAX:
            raise InvalidValue(f"integer {obj} is outside the signed 64-bit range")
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise InvalidValue(f"non-finite number {obj!r}")
        return obj
    if isinstance(obj, Map):
        return Map((k, to_value(v)) for k, v in obj.items())
    if isinstance(obj, Mapping):
        return Map((k, to_value(v)) for k, v in obj.items())
    if isinstance(obj, (list, tuple)):
        return tuple(to_value(v) for v in obj)
    if isinstance(obj, (bytearray, memoryview)):
        return bytes(obj)
    raise InvalidValue(f"{type(obj).__name__} cannot be represented as a Value")


def descend(value: Value, segment: str) -> Value:
    """Step one key segment into a Value.

    Maps resolve by key; Tables resolve a column name to the column's cells
    and ``rows`` to the row sequence; Sequences resolve integer segments.
    Raises ``KeyError`` when the segment does not resolve.
    """
    if isinstance(value, Map):
        return value[segment]
    if isinstance(value, Table):
        if segment in value.column_names:
            return value.column(segment)
        if segment == "rows":
            return tuple(value.row(i) for i in range(len(value.rows)))
        raise KeyError(segment)
    if isinstance(value, tuple) and segment.isdigit():
        idx = int(segment)
        if idx < len(value):
            return value[idx]
        raise KeyError(segment)
    if isinstance(value, Markdown) and segment == "front_matter" and value.front_matter is not None:
        return value.front_matter
    if isinstance(value, Markdown) and segment == "body":
        return value.body
    raise KeyError(segment)
