"""Eager recognition of domain types inside generic value trees.

Only exact structural shapes are recognized; free text such as
``"3.5 km/s"`` is left alone.

* ``{value: <number>, unit: <text>}`` -> :class:`Quantity`
* ``{epoch: <ISO text or days>, scale: "UTC" | "TDB"}`` -> :class:`Epoch`
* ``{columns: [<text>, ...], rows: [[...], ...]}`` -> :class:`Table`
"""

from __future__ import annotations

from verdad.datamodel.timescales import Epoch, TimeScale, parse_iso_epoch
from verdad.datamodel.units import parse_unit
from verdad.datamodel.values import Map, Markdown, Quantity, Table, Value
from verdad.errors import CoercionError, InvalidValue, TimeError, UnitError

_QUANTITY_KEYS = frozenset({"value", "unit"})
_EPOCH_KEYS = frozenset({"epoch", "scale"})
_TABLE_KEYS = frozenset({"columns", "rows"})


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _as_quantity(m: Map) -> Quantity | None:
    value, unit = m["value"], m["unit"]
    if not (_is_number(value) and isinstance(unit, str)):
        return None
    try:
        return Quantity(value, parse_unit(unit))
    except UnitError as exc:
        raise CoercionError(f"unit {unit!r} in quantity: {exc}", exc) from exc


def _as_epoch(m: Map) -> Epoch | None:
    epoch, scale = m["epoch"], m["scale"]
    if not isinstance(scale, str) or not (isinstance(epoch, str) or _is_number(epoch)):
        return None
    if scale not in ("UTC", "TDB"):
        raise CoercionError(f"epoch scale must be 'UTC' or 'TDB', got {scale!r}")
    if isinstance(epoch, str):
        try:
            return parse_iso_epoch(epoch, TimeScale(scale))
        except TimeError as exc:
            raise CoercionError(f"epoch {epoch!r}: {exc}", exc) from exc
    return Epoch(TimeScale(scale), float(epoch))


def _as_table(m: Map) -> Table | None:
    columns, rows = m["columns"], m["rows"]
    if not (isinstance(columns, tuple) and isinstance(rows, tuple)):
        return None
    if not all(isinstance(c, str) for c in columns) or not all(isinstance(r, tuple) for r in rows):
        return None
    try:
        for i, row in enumerate(rows):
            if len(row) != len(columns):
                raise InvalidValue(f"row {i} has {len(row)} cells, expected {len(columns)}")
        return Table.infer(columns, rows)
    except InvalidValue as exc:
        raise CoercionError(f"table: {exc}", exc) from exc


def coerce_domain_types(value: Value) -> Value:
    """Return a new Value with quantity, epoch and table shapes recognized.

    Children are coerced first, so table cells may themselves be quantities.
    The input is not modified; applying the function twice is the same as
    applying it once.
    """
    if isinstance(value, Map):
        m = Map((k, coerce_domain_types(v)) for k, v in value.items())
        keys = frozenset(m)
        found = None
        if keys == _QUANTITY_KEYS:
            found = _as_quantity(m)
        elif keys == _EPOCH_KEYS:
            found = _as_epoch(m)
        elif keys == _TABLE_KEYS:
            found = _as_table(m)
        return m if found is None else found
    if isinstance(value, tuple):
        return tuple(coerce_domain_types(v) for v in value)
    if isinstance(value, Markdown) and value.front_matter is not None:
        return Markdown(value.body, coerce_domain_types(value.front_matter))
    return value
