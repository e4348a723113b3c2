"""Survival-data containers, the time-axis partition, and validated CSV ingestion."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DatasetFormatError(ValueError):
    """A dataset file violates the CSV contract (missing columns, bad cells)."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SurvivalDataset:
    """Right-censored observations: times, event indicators and a covariate matrix.

    times[i] is the observed time (event or censoring), events[i] is 1 if the
    event occurred and 0 if censored, covariates is the n x p design matrix.
    Instances are validated and immutable; they can be shared across chains.
    """

    times: np.ndarray
    events: np.ndarray
    covariates: np.ndarray
    feature_names: tuple

    def __post_init__(self):
        times = np.ascontiguousarray(self.times, dtype=float)
        events = np.ascontiguousarray(self.events, dtype=int)
        covariates = np.ascontiguousarray(self.covariates, dtype=float)
        if covariates.ndim != 2:
            raise ValueError("covariates must be a 2-D matrix")
        n, p = covariates.shape
        if n < 2:
            raise ValueError(f"need at least 2 subjects, got {n}")
        if p < 1:
            raise ValueError("need at least 1 covariate column")
        if times.shape != (n,) or events.shape != (n,):
            raise ValueError("times/events length must match covariate rows")
        if not np.all(np.isfinite(times)) or np.any(times <= 0):
            raise ValueError("all times must be strictly positive and finite")
        if not np.isin(events, (0, 1)).all():
            raise ValueError("events must be 0 (censored) or 1 (event)")
        if not np.all(np.isfinite(covariates)):
            raise ValueError("covariate matrix contains non-finite entries")
        names = tuple(str(s) for s in self.feature_names)
        if len(names) != p:
            raise ValueError("feature_names length must equal covariate columns")
        object.__setattr__(self, "times", _frozen(times))
        object.__setattr__(self, "events", _frozen(events))
        object.__setattr__(self, "covariates", _frozen(covariates))
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.covariates.shape[0]

    @property
    def p(self) -> int:
        return self.covariates.shape[1]


@dataclass(frozen=True)
class TimePartition:
    """Finite partition 0 = c_0 < c_1 < ... < c_K of the time axis."""

    cuts: np.ndarray

    def __post_init__(self):
        cuts = np.ascontiguousarray(self.cuts, dtype=float)
        if cuts.ndim != 1 or cuts.size < 2:
            raise ValueError("cuts must contain at least (0, c_1)")
        if cuts[0] != 0.0:
            raise ValueError("the partition must start at 0")
        if not np.all(np.isfinite(cuts)) or np.any(np.diff(cuts) <= 0):
            raise ValueError("cuts must be finite and strictly increasing")
        object.__setattr__(self, "cuts", _frozen(cuts))

    @property
    def K(self) -> int:
        return self.cuts.size - 1


@dataclass(frozen=True)
class IntervalSets:
    """Risk sets, failure sets and event counts per partition interval.

    risk_sets[k] holds the 0-based subject indices still at risk at the start
    of interval k+1; failure_sets[k] the subjects whose event falls inside it.
    interval_index[i] is the 1-based interval containing subject i's time.
    """

    risk_sets: tuple
    failure_sets: tuple
    d_counts: np.ndarray
    interval_index: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "d_counts", _frozen(np.asarray(self.d_counts, dtype=int)))
        object.__setattr__(self, "interval_index", _frozen(np.asarray(self.interval_index, dtype=int)))

    @property
    def K(self) -> int:
        return len(self.risk_sets)


def build_partition(data: SurvivalDataset, K: int) -> TimePartition:
    """Quantile-based partition with K intervals covering all observed times.

    Interior cuts are the empirical time quantiles at levels j/K; the last cut
    sits just above max(T) so every observation falls inside an interval.
    Duplicate or degenerate interior cuts are collapsed (reducing K) with a
    warning, never an error.
    """
    if K < 1:
        raise ValueError("K must be a positive integer")
    t_max = float(data.times.max())
    upper = t_max * (1.0 + 1e-6)
    if K > 1:
        interior = np.quantile(data.times, np.arange(1, K) / K)
        interior = np.unique(interior)
        # A quantile at or beyond max(T) would leave the final interval empty.
        interior = interior[(interior > 0.0) & (interior < t_max)]
    else:
        interior = np.empty(0)
    if interior.size < K - 1:
        warnings.warn(
            f"partition collapsed from K={K} to K={interior.size + 1} "
            "(duplicate or degenerate time quantiles)",
            stacklevel=2,
        )
    cuts = np.concatenate([[0.0], interior, [upper]])
    return TimePartition(cuts)


def interval_sets(data: SurvivalDataset, partition: TimePartition) -> IntervalSets:
    """Assign subjects to intervals and build risk/failure sets.

    Intervals are left-closed/right-open [c_{k-1}, c_k); a time exactly equal
    to the final cut is assigned to the last interval. Times beyond the final
    cut are an error, never silently binned.
    """
    cuts = partition.cuts
    K = partition.K
    idx = np.searchsorted(cuts, data.times, side="right")
    idx = np.where(data.times == cuts[-1], K, idx)
    if np.any(idx > K):
        bad = int(np.argmax(idx > K))
        raise ValueError(
            f"subject {bad} has time {data.times[bad]} beyond the final cut {cuts[-1]}"
        )
    risk_sets = tuple(np.flatnonzero(idx >= k) for k in range(1, K + 1))
    failure_sets = tuple(
        np.flatnonzero((idx == k) & (data.events == 1)) for k in range(1, K + 1)
    )
    d_counts = np.array([fs.size for fs in failure_sets])
    return IntervalSets(risk_sets, failure_sets, d_counts, idx)


def load_dataset(path, format: str = "csv") -> SurvivalDataset:
    """Read a survival dataset from a `time,status,<features...>` CSV file."""
    if format != "csv":
        raise ValueError(f"unsupported format {format!r}")
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetFormatError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        if header[:2] != ["time", "status"]:
            raise DatasetFormatError(
                f"{path}: header must start with 'time,status', got {header[:2]}"
            )
        feature_names = header[2:]
        if not feature_names:
            raise DatasetFormatError(f"{path}: no feature columns after time,status")
        times, events, rows = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DatasetFormatError(
                    f"{path}: row {lineno} has {len(row)} cells, expected {len(header)}"
                )
            times.append(_parse_cell(row[0], path, lineno, "time"))
            events.append(_parse_status(row[1], path, lineno))
            rows.append(
                [_parse_cell(c, path, lineno, name) for c, name in zip(row[2:], feature_names)]
            )
    if len(times) < 2:
        raise DatasetFormatError(f"{path}: need at least 2 data rows")
    times = np.array(times)
    for i, t in enumerate(times):
        if not np.isfinite(t) or t <= 0:
            raise DatasetFormatError(f"{path}: row {i + 2}, column 'time': non-positive time {t}")
    covariates = np.array(rows)
    bad = np.argwhere(~np.isfinite(covariates))
    if bad.size:
        i, j = bad[0]
        raise DatasetFormatError(
            f"{path}: row {i + 2}, column {feature_names[j]!r}: non-finite value"
        )
    return SurvivalDataset(times, np.array(events), covariates, tuple(feature_names))


def write_dataset(data: SurvivalDataset, path) -> None:
    """Write a dataset as CSV; floats use shortest round-trip decimal text."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "status", *data.feature_names])
        for i in range(data.n):
            writer.writerow(
                [repr(float(data.times[i])), int(data.events[i])]
                + [repr(float(x)) for x in data.covariates[i]]
            )


def _parse_cell(cell: str, path, lineno: int, column: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise DatasetFormatError(
            f"{path}: row {lineno}, column {column!r}: non-numeric cell {cell!r}"
        ) from None


def _parse_status(cell: str, path, lineno: int) -> int:
    value = _parse_cell(cell, path, lineno, "status")
    if value not in (0.0, 1.0):
        raise DatasetFormatError(
            f"{path}: row {lineno}, column 'status': value {cell!r} outside {{0,1}}"
        )
    return int(value)
