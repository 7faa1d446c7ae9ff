import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import values
from verdad.datamodel import canonical
from verdad.datamodel.timescales import (
    Epoch, TimeScale, convert_epoch, epoch_from_calendar, epoch_to_calendar, format_epoch,
    leap_table, parse_iso_epoch, parse_leap_table, tai_minus_utc,
)
from verdad.datamodel.units import PREFIXES, conversion_factor, parse_unit, symbol_table
from verdad.datamodel.values import (
    VARIANTS, AnnotationRecord, CellType, Column, KeyPath, Map, Markdown, ProvenanceRecord,
    Quantity, SourceFormat, Table, USER_INPUT, Origin, convert_quantity, descend, format_number,
    to_value, variant_of,
)
from verdad.errors import (
    DimensionMismatch, EpochOutOfLeapTable, InvalidCalendarDate, InvalidLeapSecond, InvalidValue,
    MalformedExpression, UnknownUnitSymbol,
)


# -- units -----------------------------------------------------------------------


def test_compound_label_and_dimensions():
    u = parse_unit("kg*m/s^2")
    assert u.label == "kg*m/s^2"
    assert u.dimensions["mass"] == 1 and u.dimensions["time"] == -2
    assert u.convertible_to(parse_unit("N"))
    assert u != parse_unit("N")


def test_prefixed_units_are_exact():
    assert conversion_factor(parse_unit("N"), parse_unit("kN")) == (Fraction(1, 1000), 0)
    assert Quantity(440, "N").to("kN").magnitude == 0.44
    assert parse_unit("µs").scale == 1e-6 == parse_unit("us").scale


def test_da_prefix_and_symbol_precedence():
    assert parse_unit("dam").scale == 10
    # "min" is a unit in its own right, not milli-inch
    assert parse_unit("min").scale == 60
    # "Pa" is pascal, not peta-year
    assert parse_unit("Pa").dimensions["mass"] == 1


def test_angle_is_a_dimension():
    deg = parse_unit("deg")
    assert deg.convertible_to(parse_unit("rad"))
    assert not deg.convertible_to(parse_unit("1"))
    assert Quantity(180, "deg").to("rad").magnitude == pytest.approx(math.pi, rel=1e-15)


def test_lbf_matches_definition():
    assert Quantity(1, "lbf").to("N").magnitude == 4.4482216152605


def test_fractional_exponents():
    u = parse_unit("m^(1/2)")
    assert u.dimensions["length"] == Fraction(1, 2)
    assert (parse_unit("Hz^0.5") == parse_unit("Hz^(1/2)"))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        Quantity(1, "m").to("s")


def test_unknown_symbol_span():
    with pytest.raises(UnknownUnitSymbol) as exc:
        parse_unit("kg*flurb/s")
    assert exc.value.span == (3, 8)


@pytest.mark.parametrize("text", ["", "m*", "(m", "m^", "m//s", "m^x"])
def test_malformed(text):
    with pytest.raises((MalformedExpression, UnknownUnitSymbol)):
        parse_unit(text)


def test_symbol_table_loaded():
    table = symbol_table()
    for sym in ("m", "g", "s", "A", "K", "mol", "cd", "rad", "N", "AU", "psi"):
        assert sym in table
    assert set(PREFIXES) >= {"k", "M", "m", "u", "µ", "da"}


@settings(max_examples=200)
@given(st.floats(-1e12, 1e12, allow_nan=False),
       st.sampled_from([("m", "ft"), ("km/s", "m/s"), ("deg", "arcsec"), ("psi", "Pa"), ("J", "eV")]))
def test_conversion_roundtrip(mag, pair):
    a, b = pair
    q = Quantity(mag, a)
    back = q.to(b).to(a).magnitude
    assert back == pytest.approx(mag, rel=1e-12, abs=1e-300)


def test_quantity_str():
    assert str(Quantity(440, "N")) == "440 N"
    assert str(Quantity(3.25, "km/s")) == "3.25 km/s"


# -- time scales --------------------------------------------------------------------


def test_leap_table_bounds():
    table = leap_table()
    assert table[0].offset == 10 and table[-1].offset == 37
    assert len(table) == 28


def test_tai_minus_utc_steps():
    assert tai_minus_utc(0.0) == 32
    assert tai_minus_utc(epoch_from_calendar(2017, 1, 1).days) == 37
    assert tai_minus_utc(epoch_from_calendar(2016, 12, 31, 23, 59, 59).days) == 36


def test_before_table_is_error():
    with pytest.raises(EpochOutOfLeapTable):
        convert_epoch(epoch_from_calendar(1971, 6, 1), "TDB")


def test_utc_zero_to_tdb():
    tdb = convert_epoch(Epoch(TimeScale.UTC, 0.0), "TDB")
    assert tdb.scale is TimeScale.TDB
    assert (tdb.days - 0.0007428695438040339) * 86400 == pytest.approx(0, abs=1e-9)


def test_same_scale_identity():
    e = Epoch(TimeScale.TDB, 12.5)
    assert convert_epoch(e, "TDB") is e


def test_calendar_roundtrip_and_format():
    e = parse_iso_epoch("2024-03-01T10:00:00Z")
    assert epoch_to_calendar(e)[:6] == (2024, 3, 1, 10, 0, 0)
    assert format_epoch(e) == "2024-03-01T10:00:00 UTC"
    assert format_epoch(Epoch(TimeScale.UTC, 0.0)) == "2000-01-01T12:00:00 UTC"
    assert str(Epoch(TimeScale.TDB, 0.0)) == "2000-01-01T12:00:00 TDB"


def test_iso_offsets():
    assert parse_iso_epoch("2000-01-01T13:00:00+01:00").days == 0.0


def test_leap_second_only_on_table_days():
    epoch_from_calendar(2016, 12, 31, 23, 59, 60)
    with pytest.raises(InvalidLeapSecond):
        epoch_from_calendar(2016, 12, 30, 23, 59, 60)
    with pytest.raises(InvalidLeapSecond):
        epoch_from_calendar(2016, 12, 31, 23, 59, 60, scale="TDB")


def test_invalid_dates():
    with pytest.raises(InvalidCalendarDate):
        epoch_from_calendar(2023, 2, 29)
    with pytest.raises(InvalidCalendarDate):
        parse_iso_epoch("yesterday")


def test_epoch_rejects_non_finite():
    with pytest.raises(InvalidValue):
        Epoch(TimeScale.UTC, math.inf)


def test_parse_leap_table_text():
    table = parse_leap_table("# c\n1972-01-01 10\n1972-07-01 11\n")
    assert [e.offset for e in table] == [10, 11]


# -- values ---------------------------------------------------------------------------


def test_fourteen_variants():
    assert len(VARIANTS) == 14
    samples = [None, True, 1, 1.5, "x", b"x", Quantity(1, "m"), Epoch("UTC", 0.0),
               Table.infer(["a"], [[1]]), Markdown("b"),
               ProvenanceRecord("a.json", SourceFormat.JSON, "00", USER_INPUT, 1),
               AnnotationRecord("a.b", "comment", "me", "hi", Epoch("UTC", 0.0)), (1,), Map({"a": 1})]
    assert sorted({variant_of(s) for s in samples}) == sorted(VARIANTS)


def test_map_is_immutable_and_order_insensitive():
    m = Map({"b": 1, "a": 2})
    assert m == Map({"a": 2, "b": 1})
    assert hash(m) == hash(Map({"a": 2, "b": 1}))
    with pytest.raises(TypeError):
        m["c"] = 3  # type: ignore[index]
    assert m.replace("a", 5)["a"] == 5 and m["a"] == 2


def test_map_rejects_dotted_keys():
    with pytest.raises(InvalidValue):
        to_value({"a.b": 1})


def test_to_value_rejects_bad_numbers():
    with pytest.raises(InvalidValue):
        to_value({"x": float("nan")})
    with pytest.raises(InvalidValue):
        to_value([2**63])


def test_table_validation():
    with pytest.raises(InvalidValue):
        Table((Column("a", CellType.INT),), ((1,), ("x",)))
    with pytest.raises(InvalidValue):
        Table((Column("a", CellType.INT),), ((1, 2),))
    with pytest.raises(InvalidValue):
        Table((Column("a", CellType.INT), Column("a", CellType.INT)), ())
    t = Table.infer(["a", "b"], [[1, "x"], [2.5, None]])
    assert t.columns[0].ctype is CellType.FLOAT and t.columns[1].nullable


def test_descend_table_axes():
    t = Table.infer(["mass", "name"], [[1.0, "a"], [2.0, "b"]])
    assert descend(t, "mass") == (1.0, 2.0)
    assert descend(descend(descend(t, "rows"), "1"), "name") == "b"
    with pytest.raises(KeyError):
        descend(t, "nope")


def test_keypath():
    k = KeyPath.parse("a.b.c")
    assert k.child("d") == KeyPath(("a", "b", "c", "d"))
    assert k.startswith(KeyPath.parse("a.b"))
    assert str(k) == "a.b.c"
    with pytest.raises(InvalidValue):
        KeyPath.parse("a..b")


def test_format_number():
    assert format_number(2.0) == "2"
    assert format_number(0.1) == "0.1"
    assert format_number(1e21) == "1e+21"


def test_origin_labels():
    assert str(USER_INPUT) == "UserInput"
    assert str(Origin("traj")) == "AnalysisOutput(traj)"


# -- canonical encoding -----------------------------------------------------------


@settings(max_examples=300)
@given(values)
def test_canonical_roundtrip(v):
    data = canonical.canonical_serialize(v)
    assert canonical.canonical_deserialize(data) == v
    assert canonical.canonical_serialize(canonical.canonical_deserialize(data)) == data


@given(values, values)
def test_equal_values_equal_bytes(a, b):
    if a == b:
        assert canonical.canonical_serialize(a) == canonical.canonical_serialize(b)


def test_negative_zero_normalized():
    assert canonical.canonical_serialize(-0.0) == canonical.canonical_serialize(0.0)


def test_structural_not_physical():
    assert canonical.canonical_serialize(Quantity(1000, "m")) != canonical.canonical_serialize(Quantity(1, "km"))
    assert canonical.canonical_serialize(1) != canonical.canonical_serialize(1.0)


def test_convert_quantity_accepts_text():
    assert convert_quantity(Quantity(1, "km"), "m").magnitude == 1000
