"""Hourly load series: ingestion, validation, gap repair, splits, windows, synthesis.

All timestamps are naive local clock time at hourly resolution. The CSV
exchange format is::

    timestamp,building_id,consumption_kwh
    2018-01-01 00:00,A,132.4

with UTF-8 text, ``\\n`` line endings (``\\r\\n`` accepted on input).
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import zlib
from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from .errors import DataError

HOUR = timedelta(hours=1)
TIMESTAMP_FMT = "%Y-%m-%d %H:%M"
CSV_HEADER = ["timestamp", "building_id", "consumption_kwh"]

# Epoch for synthetic series; two whole calendar years ahead keep month
# splits simple.
SYNTH_START = datetime(2018, 1, 1, 0, 0)


class MalformedRow(DataError):
    """A CSV row cannot be parsed into a load record."""


class DuplicateTimestamp(DataError):
    """The same (building, timestamp) appears twice in an input."""


class NegativeConsumption(DataError):
    """A consumption value below zero was read."""


class GapTooLarge(DataError):
    """A gap exceeds the interpolation limit."""

    def __init__(self, message: str, gap_start: datetime, gap_end: datetime):
        super().__init__(message)
        self.gap_start = gap_start
        self.gap_end = gap_end


class InsufficientSpan(DataError):
    """A series does not cover enough calendar months to split."""


def parse_timestamp(text: str) -> datetime:
    return datetime.strptime(text, TIMESTAMP_FMT)


def format_timestamp(ts: datetime) -> str:
    return ts.strftime(TIMESTAMP_FMT)


@dataclass(frozen=True)
class LoadRecord:
    """One building's consumption for one clock hour."""

    building_id: str
    timestamp: datetime
    consumption: float

    def __post_init__(self):
        if not self.building_id:
            raise ValueError("building_id must be non-empty")
        ts = self.timestamp
        if ts.minute != 0 or ts.second != 0 or ts.microsecond != 0:
            raise ValueError(f"timestamp {ts!r} is not on an hour boundary")
        if not math.isfinite(self.consumption):
            raise ValueError(f"consumption must be finite, got {self.consumption!r}")
        if self.consumption < 0:
            raise ValueError(f"consumption must be non-negative, got {self.consumption!r}")


@dataclass(frozen=True)
class LoadSeries:
    """Chronological records of a single building.

    Timestamps are strictly increasing. Hourly continuity (no missing hours)
    is only guaranteed after ``repair_gaps``.
    """

    building_id: str
    records: tuple[LoadRecord, ...]

    def __post_init__(self):
        prev = None
        for rec in self.records:
            if rec.building_id != self.building_id:
                raise ValueError(
                    f"record for {rec.building_id!r} in series {self.building_id!r}"
                )
            if prev is not None and rec.timestamp <= prev:
                raise ValueError(f"timestamps not strictly increasing at {rec.timestamp}")
            prev = rec.timestamp

    def __len__(self) -> int:
        return len(self.records)

    def values(self) -> np.ndarray:
        return np.array([rec.consumption for rec in self.records], dtype=float)

    def is_hourly(self) -> bool:
        return all(
            b.timestamp - a.timestamp == HOUR
            for a, b in zip(self.records, self.records[1:])
        )


@dataclass(frozen=True)
class DatasetSplit:
    """Contiguous train < val < test partition of one series."""

    train: LoadSeries
    val: LoadSeries
    test: LoadSeries

    def __post_init__(self):
        parts = [self.train, self.val, self.test]
        ids = {p.building_id for p in parts}
        if len(ids) != 1:
            raise ValueError(f"split mixes buildings: {sorted(ids)}")
        for earlier, later in zip(parts, parts[1:]):
            if not earlier.records or not later.records:
                raise ValueError("split parts must be non-empty")
            if earlier.records[-1].timestamp >= later.records[0].timestamp:
                raise ValueError("split parts out of chronological order")


@dataclass(frozen=True)
class WindowPair:
    """An (observation, target) evaluation window.

    The target starts exactly one hour after the observation ends.
    """

    observation: tuple[LoadRecord, ...]
    target: tuple[LoadRecord, ...]

    def __post_init__(self):
        if not self.observation or not self.target:
            raise ValueError("observation and target must be non-empty")
        seam = self.target[0].timestamp - self.observation[-1].timestamp
        if seam != HOUR:
            raise ValueError(
                f"target must start one hour after observation, gap is {seam}"
            )


@dataclass(frozen=True)
class SynthConfig:
    """Parameters of the synthetic load generator."""

    seed: int
    days: int
    base_load: float = 120.0
    daily_amplitude: float = 40.0
    weekly_amplitude: float = 15.0
    noise_sd: float = 5.0

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.days < 1:
            raise ValueError("days must be positive")
        if self.daily_amplitude < 0 or self.weekly_amplitude < 0:
            raise ValueError("amplitudes must be non-negative")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be non-negative")
        floor = (
            self.base_load
            - self.daily_amplitude
            - self.weekly_amplitude
            - 4.0 * self.noise_sd
        )
        if floor < 0:
            raise ValueError(
                "base_load - daily_amplitude - weekly_amplitude - 4*noise_sd "
                f"must be >= 0, got {floor}"
            )


def ingest_csv(source) -> dict[str, LoadSeries]:
    """Read the CSV exchange format into one series per building.

    ``source`` is a readable byte stream (a text stream also works). Rows are
    grouped by building and sorted by timestamp; hourly continuity is not
    required here, only uniqueness.
    """
    raw = source.read()
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedRow(f"input is not UTF-8: {exc}") from None
    else:
        text = raw

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedRow("empty input, expected header row") from None
    if header != CSV_HEADER:
        raise MalformedRow(f"bad header {header!r}, expected {CSV_HEADER!r}")

    by_building: dict[str, dict[datetime, float]] = {}
    for row in reader:
        if not row:
            continue
        line = reader.line_num
        if len(row) != 3:
            raise MalformedRow(f"line {line}: expected 3 columns, got {len(row)}")
        ts_text, building_id, value_text = row
        if not building_id:
            raise MalformedRow(f"line {line}: empty building_id")
        try:
            ts = parse_timestamp(ts_text)
        except ValueError:
            raise MalformedRow(f"line {line}: bad timestamp {ts_text!r}") from None
        if ts.minute != 0:
            raise MalformedRow(f"line {line}: timestamp {ts_text!r} not on the hour")
        try:
            value = float(value_text)
        except ValueError:
            raise MalformedRow(f"line {line}: bad number {value_text!r}") from None
        if not math.isfinite(value):
            raise MalformedRow(f"line {line}: non-finite consumption {value_text!r}")
        if value < 0:
            raise NegativeConsumption(
                f"line {line}: consumption {value} for building {building_id!r}"
            )
        group = by_building.setdefault(building_id, {})
        if ts in group:
            raise DuplicateTimestamp(
                f"building {building_id!r} has two rows for {format_timestamp(ts)}"
            )
        group[ts] = value

    return {
        building: LoadSeries(
            building,
            tuple(
                LoadRecord(building, ts, group[ts]) for ts in sorted(group)
            ),
        )
        for building, group in by_building.items()
    }


def repair_gaps(series: LoadSeries, max_gap_hours: int = 3) -> LoadSeries:
    """Fill missing hours by linear interpolation between the bracketing values.

    A gap of more than ``max_gap_hours`` missing hours raises GapTooLarge.
    """
    if max_gap_hours < 0:
        raise ValueError("max_gap_hours must be non-negative")
    records = series.records
    if len(records) < 2:
        return series

    repaired: list[LoadRecord] = [records[0]]
    for prev, nxt in zip(records, records[1:]):
        delta = nxt.timestamp - prev.timestamp
        steps = round(delta.total_seconds() / 3600.0)
        missing = steps - 1
        if missing > max_gap_hours:
            raise GapTooLarge(
                f"building {series.building_id!r}: {missing} missing hours between "
                f"{format_timestamp(prev.timestamp)} and {format_timestamp(nxt.timestamp)}",
                gap_start=prev.timestamp,
                gap_end=nxt.timestamp,
            )
        for j in range(1, steps):
            frac = j / steps
            value = prev.consumption + (nxt.consumption - prev.consumption) * frac
            repaired.append(
                LoadRecord(series.building_id, prev.timestamp + j * HOUR, value)
            )
        repaired.append(nxt)
    return LoadSeries(series.building_id, tuple(repaired))


def split_by_months(
    series: LoadSeries, train_months: int, val_months: int, test_months: int
) -> DatasetSplit:
    """Partition a series on calendar-month boundaries.

    The first ``train_months`` distinct months go to train, the next
    ``val_months`` to val, and everything after that to test, so the three
    parts always concatenate back to the input. Test therefore absorbs any
    months beyond the configured counts.
    """
    if min(train_months, val_months, test_months) < 1:
        raise ValueError("all split sizes must be at least one month")
    needed = train_months + val_months + test_months
    groups = [
        tuple(recs)
        for _, recs in itertools.groupby(
            series.records, key=lambda r: (r.timestamp.year, r.timestamp.month)
        )
    ]
    if len(groups) < needed:
        raise InsufficientSpan(
            f"building {series.building_id!r} spans {len(groups)} calendar months, "
            f"need at least {needed}"
        )

    def piece(month_groups) -> LoadSeries:
        return LoadSeries(
            series.building_id,
            tuple(rec for group in month_groups for rec in group),
        )

    return DatasetSplit(
        train=piece(groups[:train_months]),
        val=piece(groups[train_months : train_months + val_months]),
        test=piece(groups[train_months + val_months :]),
    )


def make_windows(series: LoadSeries, n: int, m: int, stride: int = 1) -> list[WindowPair]:
    """Slide an (n observation, m target) window over the series.

    Returns floor((L - n - m) / stride) + 1 windows for L >= n + m, otherwise
    an empty list.
    """
    if n < 1 or m < 1 or stride < 1:
        raise ValueError("n, m and stride must all be at least 1")
    records = series.records
    span = n + m
    if len(records) < span:
        return []
    return [
        WindowPair(tuple(records[i : i + n]), tuple(records[i + n : i + span]))
        for i in range(0, len(records) - span + 1, stride)
    ]


def synth_generate(config: SynthConfig, building_id: str) -> LoadSeries:
    """Generate an hourly series with daily and weekly structure plus noise.

    Deterministic for a fixed (seed, building_id); the building id is folded
    into the RNG stream so one seed yields distinct buildings. Values are
    clamped at zero.
    """
    rng = np.random.default_rng([config.seed, zlib.crc32(building_id.encode("utf-8"))])
    hours = config.days * 24
    h = np.arange(hours)
    # Phases reduced mod the period keep the signal bitwise periodic.
    daily = config.daily_amplitude * np.sin(2.0 * np.pi * (h % 24) / 24.0)
    weekly = config.weekly_amplitude * np.sin(2.0 * np.pi * (h % 168) / 168.0)
    noise = rng.normal(0.0, config.noise_sd, hours) if config.noise_sd > 0 else 0.0
    values = np.maximum(0.0, config.base_load + daily + weekly + noise)
    return LoadSeries(
        building_id,
        tuple(
            LoadRecord(building_id, SYNTH_START + int(i) * HOUR, float(v))
            for i, v in enumerate(values)
        ),
    )
