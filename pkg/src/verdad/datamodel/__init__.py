"""Generic value type, physical quantities, time epochs and their conversions."""

from verdad.datamodel.canonical import canonical_deserialize, canonical_serialize
from verdad.datamodel.timescales import (
    Epoch, TimeScale, convert_epoch, epoch_from_calendar, format_epoch, parse_iso_epoch,
)
from verdad.datamodel.units import UnitExpr, parse_unit
from verdad.datamodel.values import (
    VARIANTS, AnnotationKind, AnnotationRecord, CellType, Column, KeyPath, Map, Markdown,
    Origin, ProvenanceRecord, Quantity, SourceFormat, Table, USER_INPUT, Value,
    convert_quantity, descend, to_value, variant_of,
)

__all__ = [
    "VARIANTS", "AnnotationKind", "AnnotationRecord", "CellType", "Column", "Epoch", "KeyPath",
    "Map", "Markdown", "Origin", "ProvenanceRecord", "Quantity", "SourceFormat", "Table",
    "TimeScale", "USER_INPUT", "UnitExpr", "Value", "canonical_deserialize",
    "canonical_serialize", "convert_epoch", "convert_quantity", "descend", "epoch_from_calendar",
    "format_epoch", "parse_iso_epoch", "parse_unit", "to_value", "variant_of",
]
