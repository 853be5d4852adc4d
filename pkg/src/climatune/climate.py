"""Climate ingestion and the year-indexed sampling temperatures.

Monthly mean daily-maximum temperatures for Tokyo, one row per year,
become two vectors in [0,1]: a pitch temperature from the cosine
dissimilarity of within-year forward differences against the reference
year, and a duration temperature from min-max normalized annual means.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ClimateDataError

MONTHS = ("jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec")

_VALUE_RANGE = (-10.0, 45.0)


@dataclass(frozen=True)
class ClimateTable:
    """Per-year monthly temperature rows, sorted ascending by year."""

    years: tuple[int, ...]
    values: np.ndarray  # (n_years, 12) float64, °C
    provenance: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.values.shape != (len(self.years), 12):
            raise ClimateDataError(
                f"expected ({len(self.years)}, 12) values, got {self.values.shape}"
            )
        if len(set(self.years)) != len(self.years):
            raise ClimateDataError("duplicate years in climate table")
        if any(b <= a for a, b in zip(self.years, self.years[1:])):
            raise ClimateDataError("years must be strictly ascending")
        lo, hi = _VALUE_RANGE
        if not ((self.values >= lo) & (self.values <= hi)).all():
            bad = np.argwhere((self.values < lo) | (self.values > hi))[0]
            raise ClimateDataError(
                f"value {self.values[tuple(bad)]} for {self.years[bad[0]]} "
                f"{MONTHS[bad[1]]} outside plausible range {_VALUE_RANGE}"
            )
        object.__setattr__(self, "_index", {y: i for i, y in enumerate(self.years)})

    def __len__(self) -> int:
        return len(self.years)

    def __contains__(self, year: int) -> bool:
        return year in self._index

    def row(self, year: int) -> np.ndarray:
        try:
            return self.values[self._index[year]]
        except KeyError:
            raise ClimateDataError(
                f"unknown year {year}; table covers {self.years[0]}..{self.years[-1]}"
            ) from None

    def annual_means(self) -> np.ndarray:
        return self.values.mean(axis=1)


def parse_climate_csv(text: str, provenance: str = "") -> ClimateTable:
    """Parse `year,jan,...,dec` CSV text into a ClimateTable.

    Quoted cells and trailing whitespace are tolerated; structural
    problems raise with the offending year and month named.
    """
    rows = [r for r in csv.reader(io.StringIO(text)) if any(cell.strip() for cell in r)]
    if not rows:
        raise ClimateDataError("empty input: header row `year,jan,...,dec` missing")
    header = [cell.strip().lower() for cell in rows[0]]
    if header != ["year", *MONTHS]:
        raise ClimateDataError(f"bad header {rows[0]!r}; expected `year,jan,...,dec`")
    years: list[int] = []
    values: list[list[float]] = []
    seen: set[int] = set()
    for lineno, row in enumerate(rows[1:], start=2):
        cells = [cell.strip() for cell in row]
        try:
            year = int(cells[0])
        except ValueError:
            raise ClimateDataError(f"line {lineno}: non-integer year {cells[0]!r}") from None
        if year in seen:
            raise ClimateDataError(f"line {lineno}: duplicate year {year}")
        seen.add(year)
        if len(cells) != 13:
            missing = MONTHS[min(len(cells) - 1, 11)]
            raise ClimateDataError(
                f"line {lineno}: year {year} has {len(cells) - 1} month cells; "
                f"first absent month is {missing}"
            )
        monthly = []
        for month, cell in zip(MONTHS, cells[1:]):
            if not cell:
                raise ClimateDataError(f"line {lineno}: year {year} is missing {month}")
            try:
                monthly.append(float(cell))
            except ValueError:
                raise ClimateDataError(
                    f"line {lineno}: year {year} {month} is non-numeric: {cell!r}"
                ) from None
        years.append(year)
        values.append(monthly)
    order = np.argsort(years)
    return ClimateTable(
        years=tuple(years[i] for i in order),
        values=np.asarray(values, dtype=np.float64)[order],
        provenance=provenance,
    )


def parse_climate_csv_file(path: str | Path) -> ClimateTable:
    path = Path(path)
    return parse_climate_csv(path.read_text(encoding="utf-8"), provenance=str(path))


def forward_difference(monthly: Sequence[float]) -> np.ndarray:
    """Month-over-month deltas within one year: 12 values in, 11 out."""
    arr = np.asarray(monthly, dtype=np.float64)
    if arr.shape != (12,):
        raise ClimateDataError(f"forward_difference needs 12 values, got shape {arr.shape}")
    return np.diff(arr)


def cosine_similarity(a: Sequence[float], b: Sequence[float]) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ClimateDataError(f"length mismatch: {a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ClimateDataError("cosine similarity of a zero vector is undefined")
    return float(np.dot(a, b) / (na * nb))


def pitch_temperature(table: ClimateTable, year: int, reference_year: Optional[int] = None) -> float:
    """1 minus the forward-difference cosine against the reference year.

    Clamped into [0,1]; the reference year itself is exactly 0.0 rather
    than trusting 1 - cos(v, v) to cancel in floating point.
    """
    ref = table.years[0] if reference_year is None else reference_year
    row = table.row(year)
    if year == ref:
        return 0.0
    sim = cosine_similarity(forward_difference(row), forward_difference(table.row(ref)))
    return float(min(max(1.0 - sim, 0.0), 1.0))


def duration_temperature(table: ClimateTable) -> dict[int, float]:
    """Min-max normalized annual means, keyed by year."""
    means = table.annual_means()
    lo, hi = means.min(), means.max()
    if hi == lo:
        raise ClimateDataError("all annual means equal; normalization is degenerate")
    scaled = (means - lo) / (hi - lo)
    return {year: float(v) for year, v in zip(table.years, scaled)}


@dataclass(frozen=True)
class TemperatureVectors:
    """Both sampling-temperature vectors plus the reference year."""

    reference_year: int
    pitch_temp: dict[int, float]
    duration_temp: dict[int, float]

    def __post_init__(self):
        if set(self.pitch_temp) != set(self.duration_temp):
            raise ClimateDataError("pitch and duration vectors cover different years")
        for name, vec in (("pitch", self.pitch_temp), ("duration", self.duration_temp)):
            for year, v in vec.items():
                if not 0.0 <= v <= 1.0:
                    raise ClimateDataError(f"{name} temperature {v} for {year} outside [0,1]")

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(sorted(self.pitch_temp))

    def __contains__(self, year: int) -> bool:
        return year in self.pitch_temp

    def for_year(self, year: int) -> tuple[float, float]:
        if year not in self.pitch_temp:
            years = self.years
            raise ClimateDataError(f"unknown year {year}; vectors cover {years[0]}..{years[-1]}")
        return self.pitch_temp[year], self.duration_temp[year]

    def to_json(self) -> str:
        # Hand-rolled so every temperature prints with 6 decimal places.
        lines = ["{", f'  "reference_year": {self.reference_year},', '  "years": {']
        years = self.years
        for i, year in enumerate(years):
            p, d = self.pitch_temp[year], self.duration_temp[year]
            comma = "," if i < len(years) - 1 else ""
            lines.append(f'    "{year}": {{"duration": {d:.6f}, "pitch": {p:.6f}}}{comma}')
        lines += ["  }", "}"]
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_json(text: str) -> "TemperatureVectors":
        payload = json.loads(text)
        years = payload["years"]
        return TemperatureVectors(
            reference_year=int(payload["reference_year"]),
            pitch_temp={int(y): float(v["pitch"]) for y, v in years.items()},
            duration_temp={int(y): float(v["duration"]) for y, v in years.items()},
        )


def build_temperature_vectors(
    table: ClimateTable, reference_year: Optional[int] = None
) -> TemperatureVectors:
    ref = table.years[0] if reference_year is None else reference_year
    return TemperatureVectors(
        reference_year=ref,
        pitch_temp={y: pitch_temperature(table, y, ref) for y in table.years},
        duration_temp=duration_temperature(table),
    )


def write_temperatures_json(vectors: TemperatureVectors, path: str | Path) -> None:
    Path(path).write_text(vectors.to_json(), encoding="utf-8")


def read_temperatures_json(path: str | Path) -> TemperatureVectors:
    return TemperatureVectors.from_json(Path(path).read_text(encoding="utf-8"))
