"""Time epochs on the UTC and TDB scales.

An :class:`Epoch` stores days elapsed since 2000-01-01T12:00:00 *as read on
its own scale*: ``Epoch(UTC, 0.0)`` and ``Epoch(TDB, 0.0)`` are different
instants, roughly 64 s apart. All cross-scale offsets are applied in
:func:`convert_epoch`, which goes through

    UTC --(leap-second table)--> TAI --(+32.184 s)--> TT --(periodic term)--> TDB

TDB - TT uses the single-term approximation
``0.001657 s * sin(6.240060 + 0.017202 * d)`` with ``d`` the TT days since
J2000.0, good to about 50 microseconds against the full series.

A single float64 day count resolves about 1 microsecond within a century of
J2000.0. Because the day count has no room for a 61st second, an inserted
leap second ``23:59:60.x`` maps onto the same day count as ``00:00:00.x`` of
the following day; converting it to TDB is therefore off by one second.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from datetime import date
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from verdad.errors import EpochOutOfLeapTable, InvalidCalendarDate, InvalidLeapSecond, InvalidValue

SECONDS_PER_DAY = 86400
TT_MINUS_TAI = 32.184
J2000_ORDINAL = date(2000, 1, 1).toordinal()

# TDB - TT single-term model
TDB_AMPLITUDE = 0.001657
TDB_PHASE = 6.240060
TDB_RATE = 0.017202


class TimeScale(str, enum.Enum):
    UTC = "UTC"
    TDB = "TDB"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Epoch:
    scale: TimeScale
    days: float

    def __post_init__(self):
        object.__setattr__(self, "scale", TimeScale(self.scale))
        if isinstance(self.days, bool) or not isinstance(self.days, (int, float)):
            raise InvalidValue("epoch days must be a number")
        days = float(self.days)
        if not math.isfinite(days):
            raise InvalidValue("epoch days must be finite")
        object.__setattr__(self, "days", days)

    def __str__(self) -> str:
        return format_epoch(self)


# -- leap seconds ------------------------------------------------------------


@dataclass(frozen=True)
class LeapEntry:
    start: date
    start_days: float  # UTC days since J2000.0 of the entry's 00:00:00
    offset: int  # TAI - UTC, seconds


def parse_leap_table(text: str) -> tuple[LeapEntry, ...]:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            day_text, offset_text = line.split()
            start = date.fromisoformat(day_text)
            offset = int(offset_text)
        except ValueError as exc:
            raise ValueError(f"leap table line {lineno}: {exc}") from None
        entries.append(LeapEntry(start, start.toordinal() - J2000_ORDINAL - 0.5, offset))
    if not entries:
        raise ValueError("leap table is empty")
    for a, b in zip(entries, entries[1:]):
        if b.start <= a.start:
            raise ValueError("leap table dates must increase")
    return tuple(entries)


@lru_cache(maxsize=None)
def leap_table() -> tuple[LeapEntry, ...]:
    text = resources.files("verdad.datamodel").joinpath("data/leap_seconds.txt").read_text("utf-8")
    return parse_leap_table(text)


def tai_minus_utc(utc_days: float) -> int:
    """TAI - UTC in seconds at a UTC day count."""
    table = leap_table()
    if utc_days < table[0].start_days:
        raise EpochOutOfLeapTable(
            f"UTC epoch {utc_days} precedes the leap-second table ({table[0].start.isoformat()})")
    offset = table[0].offset
    for entry in table:
        if utc_days >= entry.start_days:
            offset = entry.offset
        else:
            break
    return offset


def _tai_to_utc_offset(tai_days: float) -> tuple[int, float | None]:
    """Offset for a TAI day count and the UTC start of the following entry.

    The second value lets the caller clamp instants that fall inside an
    inserted leap second onto the next entry's start.
    """
    table = leap_table()
    first = table[0]
    if tai_days < first.start_days + first.offset / SECONDS_PER_DAY:
        raise EpochOutOfLeapTable(f"TAI epoch {tai_days} precedes the leap-second table")
    idx = 0
    for i, entry in enumerate(table):
        if tai_days >= entry.start_days + entry.offset / SECONDS_PER_DAY:
            idx = i
        else:
            break
    nxt = table[idx + 1].start_days if idx + 1 < len(table) else None
    return table[idx].offset, nxt


def tdb_minus_tt(tt_days: float) -> float:
    """TDB - TT in seconds for a TT day count since J2000.0."""
    return TDB_AMPLITUDE * math.sin(TDB_PHASE + TDB_RATE * tt_days)


def _utc_to_tdb(days: float) -> float:
    fixed = tai_minus_utc(days) + TT_MINUS_TAI
    tt = days + fixed / SECONDS_PER_DAY
    return days + (fixed + tdb_minus_tt(tt)) / SECONDS_PER_DAY


def _tdb_to_utc(days: float) -> float:
    tt = days
    for _ in range(3):
        tt = days - tdb_minus_tt(tt) / SECONDS_PER_DAY
    periodic = tdb_minus_tt(tt)
    tai = tt - TT_MINUS_TAI / SECONDS_PER_DAY
    offset, next_start = _tai_to_utc_offset(tai)
    utc = days - (offset + TT_MINUS_TAI + periodic) / SECONDS_PER_DAY
    if next_start is not None and utc >= next_start:
        utc = next_start
    return utc


def convert_epoch(epoch: Epoch, target: TimeScale | str) -> Epoch:
    target = TimeScale(target)
    if target is epoch.scale:
        return epoch
    if target is TimeScale.TDB:
        return Epoch(TimeScale.TDB, _utc_to_tdb(epoch.days))
    return Epoch(TimeScale.UTC, _tdb_to_utc(epoch.days))


# -- calendar ----------------------------------------------------------------


def _is_leap_second_slot(d: date) -> bool:
    nxt = date.fromordinal(d.toordinal() + 1)
    return any(e.start == nxt for e in leap_table()[1:])


def epoch_from_calendar(year: int, month: int, day: int, hour: int = 0, minute: int = 0,
                        second: float | Fraction | str = 0, scale: TimeScale | str = TimeScale.UTC) -> Epoch:
    """Build an Epoch from proleptic Gregorian calendar fields read on ``scale``."""
    scale = TimeScale(scale)
    try:
        d = date(year, month, day)
    except (ValueError, TypeError) as exc:
        raise InvalidCalendarDate(f"{year}-{month}-{day}: {exc}") from None
    if not (0 <= hour < 24 and 0 <= minute < 60):
        raise InvalidCalendarDate(f"invalid time of day {hour:02d}:{minute:02d}")
    sec = Fraction(second)
    if sec < 0 or sec >= 61:
        raise InvalidCalendarDate(f"invalid seconds {float(sec)}")
    if sec >= 60:
        if scale is not TimeScale.UTC or (hour, minute) != (23, 59) or not _is_leap_second_slot(d):
            raise InvalidLeapSecond(f"{d.isoformat()}T{hour:02d}:{minute:02d}:{float(sec)} is not a leap second")
    seconds = hour * 3600 + minute * 60 + sec - SECONDS_PER_DAY // 2
    days = (d.toordinal() - J2000_ORDINAL) + seconds / SECONDS_PER_DAY
    return Epoch(scale, float(days))


_ISO = re.compile(
    r"(?P<y>[+-]?\d{4,})-(?P<mo>\d{2})-(?P<d>\d{2})"
    r"(?:[T ](?P<h>\d{2}):(?P<mi>\d{2})(?::(?P<s>\d{2}(?:\.\d+)?))?)?"
    r"\s*(?P<tz>Z|[+-]\d{2}:?\d{2})?"
)


def parse_iso_epoch(text: str, scale: TimeScale | str = TimeScale.UTC) -> Epoch:
    """Parse an ISO-8601 calendar string into an Epoch on ``scale``.

    A UTC offset suffix is folded into the day count; ``Z`` and ``+00:00``
    are accepted for any scale.
    """
    m = _ISO.fullmatch(text.strip())
    if not m:
        raise InvalidCalendarDate(f"not an ISO-8601 date/time: {text!r}")
    epoch = epoch_from_calendar(
        int(m["y"]), int(m["mo"]), int(m["d"]), int(m["h"] or 0), int(m["mi"] or 0),
        Fraction(m["s"] or "0"), scale)
    tz = m["tz"]
    if tz and tz != "Z":
        sign = -1 if tz[0] == "-" else 1
        digits = tz[1:].replace(":", "")
        offset_min = sign * (int(digits[:2]) * 60 + int(digits[2:]))
        if offset_min:
            epoch = Epoch(epoch.scale, epoch.days - offset_min / (24 * 60))
    return epoch


def epoch_to_calendar(epoch: Epoch) -> tuple[int, int, int, int, int, int, int]:
    """(year, month, day, hour, minute, second, microsecond) read on the epoch's own scale."""
    micros = round(Fraction(epoch.days) * SECONDS_PER_DAY * 10**6) + (SECONDS_PER_DAY // 2) * 10**6
    day_index, rem = divmod(micros, SECONDS_PER_DAY * 10**6)
    d = date.fromordinal(J2000_ORDINAL + day_index)
    secs, micro = divmod(rem, 10**6)
    hour, rest = divmod(secs, 3600)
    minute, second = divmod(rest, 60)
    return d.year, d.month, d.day, hour, minute, second, micro


def format_epoch(epoch: Epoch) -> str:
    y, mo, d, h, mi, s, us = epoch_to_calendar(epoch)
    frac = f".{us:06d}" if us else ""
    return f"{y:04d}-{mo:02d}-{d:02d}T{h:02d}:{mi:02d}:{s:02d}{frac} {epoch.scale.value}"
