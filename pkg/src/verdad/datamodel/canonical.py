"""Deterministic, structural byte encoding of Values.

The encoding is compact JSON over a tagged tree: every node is an object
with a ``t`` tag naming its variant. Object keys are sorted, floats use the
shortest round-trip decimal, text is UTF-8. The encoding is structural, so
``1000 m`` and ``1 km`` encode differently, as do ``1`` and ``1.0``.
Negative zero encodes as zero.
"""

from __future__ import annotations

import base64
import json
from typing import Any

from verdad.datamodel.timescales import Epoch
from verdad.datamodel.units import parse_unit
from verdad.datamodel.values import (
    AnnotationRecord, CellType, Column, KeyPath, Map, Markdown, Origin, ProvenanceRecord,
    Quantity, SourceFormat, Table, Value,
)
from verdad.errors import InvalidValue


def to_tagged(value: Value) -> Any:
    if value is None:
        return {"t": "null"}
    if isinstance(value, bool):
        return {"t": "bool", "v": value}
    if isinstance(value, int):
        return {"t": "int", "v": value}
    if isinstance(value, float):
        return {"t": "float", "v": value + 0.0}
    if isinstance(value, str):
        return {"t": "text", "v": value}
    if isinstance(value, bytes):
        return {"t": "bytes", "v": base64.b64encode(value).decode("ascii")}
    if isinstance(value, Quantity):
        return {"t": "quantity", "m": value.magnitude + 0.0, "u": value.unit.label}
    if isinstance(value, Epoch):
        return {"t": "epoch", "s": value.scale.value, "d": value.days + 0.0}
    if isinstance(value, Table):
        return {
            "t": "table",
            "columns": [{"name": c.name, "type": c.ctype.value, "nullable": c.nullable}
                        for c in value.columns],
            "rows": [[to_tagged(cell) for cell in row] for row in value.rows],
        }
    if isinstance(value, Markdown):
        fm = None if value.front_matter is None else to_tagged(value.front_matter)
        return {"t": "markdown", "body": value.body, "front_matter": fm}
    if isinstance(value, ProvenanceRecord):
        return {
            "t": "provenance",
            "source_path": value.source_path,
            "format": None if value.format is None else value.format.value,
            "content_hash": value.content_hash,
            "origin": str(value.origin),
            "load_sequence": value.load_sequence,
        }
    if isinstance(value, AnnotationRecord):
        return {
            "t": "annotation",
            "target": str(value.target),
            "kind": value.kind.value,
            "author": value.author,
            "body": value.body,
            "timestamp": to_tagged(value.timestamp),
        }
    if isinstance(value, tuple):
        return {"t": "sequence", "v": [to_tagged(v) for v in value]}
    if isinstance(value, Map):
        return {"t": "map", "v": {k: to_tagged(v) for k, v in value.items()}}
    raise InvalidValue(f"{type(value).__name__} is not a Value variant")


def _parse_origin(text: str) -> Origin:
    if text == "UserInput":
        return Origin()
    if text.startswith("AnalysisOutput(") and text.endswith(")"):
        return Origin(text[len("AnalysisOutput("):-1])
    raise InvalidValue(f"bad origin {text!r}")


def from_tagged(node: Any) -> Value:
    t = node["t"]
    if t == "null":
        return None
    if t in ("bool", "int", "float", "text"):
        return node["v"]
    if t == "bytes":
        return base64.b64decode(node["v"])
    if t == "quantity":
        return Quantity(node["m"], parse_unit(node["u"]))
    if t == "epoch":
        return Epoch(node["s"], node["d"])
    if t == "table":
        cols = tuple(Column(c["name"], CellType(c["type"]), c["nullable"]) for c in node["columns"])
        return Table(cols, tuple(tuple(from_tagged(c) for c in row) for row in node["rows"]))
    if t == "markdown":
        fm = node["front_matter"]
        return Markdown(node["body"], None if fm is None else from_tagged(fm))
    if t == "provenance":
        fmt = node["format"]
        return ProvenanceRecord(node["source_path"], None if fmt is None else SourceFormat(fmt),
                                node["content_hash"], _parse_origin(node["origin"]),
                                node["load_sequence"])
    if t == "annotation":
        return AnnotationRecord(KeyPath.parse(node["target"]), node["kind"], node["author"],
                                node["body"], from_tagged(node["timestamp"]))
    if t == "sequence":
        return tuple(from_tagged(v) for v in node["v"])
    if t == "map":
        return Map((k, from_tagged(v)) for k, v in node["v"].items())
    raise InvalidValue(f"unknown tag {t!r}")


def dumps_canonical(obj: Any) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False,
                      allow_nan=False).encode("utf-8")


def canonical_serialize(value: Value) -> bytes:
    return dumps_canonical(to_tagged(value))


def canonical_deserialize(data: bytes) -> Value:
    return from_tagged(json.loads(data.decode("utf-8")))


__all__ = ["canonical_serialize", "canonical_deserialize", "to_tagged", "from_tagged",
           "dumps_canonical"]
