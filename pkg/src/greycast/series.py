"""Year-indexed positive time series, train/holdout splitting, bundled datasets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .exceptions import ConfigurationError, CsvFormatError

#: Minimum number of calibration points: the design matrix needs at least 3 rows.
MIN_TRAIN_LEN = 4

_FIXTURES = {
    "shanghai-diesel": ("shanghai-diesel.csv", "Diesel fuel consumption of Shanghai", "10^4 t"),
    "germany-co2": ("germany-co2.csv", "Total CO2 emissions of Germany", "Mt"),
    "china-co2": ("china-co2.csv", "CO2 emissions from fuel combustion of China", "Mt"),
}


@dataclass(frozen=True)
class TimeSeries:
    """A labeled sequence of strictly positive observations at consecutive periods.

    ``start_period`` is the period label (typically a calendar year) of the first
    observation. Instances are immutable and safe to share.
    """

    label: str
    start_period: int
    values: tuple[float, ...]
    units: str = ""

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        for i, v in enumerate(vals):
            if not math.isfinite(v) or v <= 0.0:
                raise CsvFormatError(
                    f"series {self.label!r}: value {v!r} at period "
                    f"{self.start_period + i} must be a positive finite number"
                )

    def __len__(self):
        return len(self.values)

    @property
    def periods(self) -> tuple[int, ...]:
        return tuple(range(self.start_period, self.start_period + len(self.values)))

    def to_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class SplitSpec:
    """Leading calibration window plus trailing accuracy-test window."""

    train_len: int
    holdout_len: int = 0

    def validate(self, series: TimeSeries) -> None:
        if self.train_len < MIN_TRAIN_LEN:
            raise ConfigurationError(
                f"train_len={self.train_len} is below the minimum of {MIN_TRAIN_LEN}"
            )
        if self.holdout_len < 0:
            raise ConfigurationError(f"holdout_len={self.holdout_len} must be >= 0")
        if self.train_len + self.holdout_len != len(series):
            raise ConfigurationError(
                f"train_len + holdout_len = {self.train_len} + {self.holdout_len} "
                f"does not equal series length {len(series)}"
            )


def split(series: TimeSeries, spec: SplitSpec) -> tuple[TimeSeries, TimeSeries]:
    """Partition ``series`` into (train, holdout); concatenation equals the input."""
    spec.validate(series)
    train = TimeSeries(
        label=series.label,
        start_period=series.start_period,
        values=series.values[: spec.train_len],
        units=series.units,
    )
    holdout = TimeSeries(
        label=series.label,
        start_period=series.start_period + spec.train_len,
        values=series.values[spec.train_len :],
        units=series.units,
    )
    return train, holdout


def load_fixture(name: str) -> TimeSeries:
    """Load one of the bundled datasets by name."""
    try:
        filename, label, units = _FIXTURES[name]
    except KeyError:
        valid = ", ".join(sorted(_FIXTURES))
        raise LookupError(f"unknown fixture {name!r}; valid names: {valid}") from None
    path = resources.files("greycast.fixtures") / filename
    with resources.as_file(path) as p:
        ts = read_csv(p)
    return TimeSeries(label=label, start_period=ts.start_period, values=ts.values, units=units)


def fixture_names() -> tuple[str, ...]:
    return tuple(sorted(_FIXTURES))


def read_csv(path, label: str | None = None) -> TimeSeries:
    """Parse a ``period,value`` CSV into a TimeSeries.

    Periods must be strictly consecutive integers and values positive reals.
    Errors name the offending line or period.
    """
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != "period,value":
        raise CsvFormatError(f"{path}: expected header 'period,value'")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise CsvFormatError(f"{path}:{lineno}: expected two comma-separated fields")
        try:
            period = int(parts[0])
        except ValueError:
            raise CsvFormatError(f"{path}:{lineno}: period {parts[0]!r} is not an integer") from None
        try:
            value = float(parts[1])
        except ValueError:
            raise CsvFormatError(f"{path}:{lineno}: value {parts[1]!r} is not a number") from None
        if not math.isfinite(value) or value <= 0.0:
            raise CsvFormatError(f"{path}: non-positive value {value} at period {period}")
        rows.append((period, value))
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")
    periods = [p for p, _ in rows]
    for prev, cur in zip(periods, periods[1:]):
        if cur != prev + 1:
            raise CsvFormatError(
                f"{path}: periods must be consecutive (found {prev} followed by {cur})"
            )
    return TimeSeries(
        label=label if label is not None else str(path),
        start_period=periods[0],
        values=tuple(v for _, v in rows),
    )


def write_csv(series: TimeSeries, path) -> None:
    """Write a TimeSeries in the ``period,value`` format at full precision."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("period,value\n")
        for period, value in zip(series.periods, series.values):
            fh.write(f"{period},{value!r}\n")
