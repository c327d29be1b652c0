"""Annual-maximum series container and CSV ingestion."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class AnnualSeries:
    """Ordered (year, value) observations with optional named covariates.

    Years must be strictly increasing; gaps are allowed and the time index
    t = year - t0 + 1 keeps its calendar spacing across them.
    """

    years: np.ndarray
    values: np.ndarray
    covariates: dict[str, np.ndarray] = field(default_factory=dict)
    name: str = ""
    units: str = ""
    #: override of the time origin year; subsetting (cross-validation folds)
    #: sets this so t keeps the full-record origin
    t0: int | None = None

    def __post_init__(self):
        years = np.asarray(self.years, dtype=int)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "values", values)
        if years.size != values.size or years.size < 1:
            raise ValueError("years and values must be equal-length, nonempty")
        if np.any(np.diff(years) <= 0):
            raise ValueError("years must be strictly increasing")
        for k, v in self.covariates.items():
            arr = np.asarray(v, dtype=float)
            if arr.size != years.size:
                raise ValueError(f"covariate {k!r} length mismatch")
            self.covariates[k] = arr

    @property
    def n(self) -> int:
        return self.years.size

    @property
    def t(self) -> np.ndarray:
        """Time index: year - t0 + 1 (missing years keep their true t)."""
        origin = self.years[0] if self.t0 is None else self.t0
        return (self.years - origin + 1).astype(float)

    def term(self, name: str) -> np.ndarray:
        """Resolve a regressor name: 't', 't2' (= t squared), or a covariate."""
        if name == "t":
            return self.t
        if name == "t2":
            return self.t**2
        if name in self.covariates:
            return self.covariates[name]
        raise KeyError(f"unknown term {name!r}")


def ingest_csv(path) -> AnnualSeries:
    """Read a year,value[,covariate...] CSV into an AnnualSeries.

    Rows with an empty value are skipped; duplicate years and non-numeric
    fields raise a ParseError naming the offending line.
    """
    years: list[int] = []
    values: list[float] = []
    cov_cols: list[str] = []
    cov_data: dict[str, list[float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        header = [h.strip().lower() for h in header]
        if len(header) < 2 or header[0] != "year" or header[1] != "value":
            raise ParseError(f"{path}: header must start with 'year,value'")
        cov_cols = header[2:]
        cov_data = {c: [] for c in cov_cols}
        seen: set[int] = set()
        skipped = 0
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if not row[1].strip():
                skipped += 1
                continue
            try:
                year = int(row[0])
                value = float(row[1])
                covs = [float(row[2 + j]) for j in range(len(cov_cols))]
            except (ValueError, IndexError):
                raise ParseError(f"{path}: bad row at line {lineno}") from None
            if year in seen:
                raise ParseError(f"{path}: duplicate year {year} at line {lineno}")
            seen.add(year)
            years.append(year)
            values.append(value)
            for c, v in zip(cov_cols, covs):
                cov_data[c].append(v)
    if not years:
        raise ParseError(f"{path}: no usable rows")
    order = np.argsort(years)
    return AnnualSeries(
        years=np.asarray(years)[order],
        values=np.asarray(values)[order],
        covariates={c: np.asarray(v)[order] for c, v in cov_data.items()},
    )
