"""Ordered bivariate series: construction, CSV round-trip and validation."""

from __future__ import annotations

import csv
import enum
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class SeriesError(ValueError):
    """Raised when a series (or the file it came from) breaks an invariant."""


class Kind(str, enum.Enum):
    OBSERVED = "observed"
    DEMEANED_NULL = "demeaned-null"
    PERMUTED_NULL = "permuted-null"
    BOOTSTRAP_REPLICATE = "bootstrap-replicate"
    SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class SeriesProvenance:
    kind: Kind = Kind.OBSERVED
    seed: int | None = None
    parent_digest: str | None = None


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise SeriesError(f"expected a 1-d sequence, got shape {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Pairs ``(t_i, y_i)`` in time order.

    Arrays are copied on construction and made read-only, so instances can be
    shared between workers. Ordering and finiteness are checked by
    :func:`validate`, not here.
    """

    t: np.ndarray
    y: np.ndarray
    provenance: SeriesProvenance = field(default_factory=SeriesProvenance)

    def __post_init__(self):
        t = _frozen_array(self.t)
        y = _frozen_array(self.y)
        if t.shape != y.shape:
            raise SeriesError(f"length mismatch: len(t)={t.size}, len(y)={y.size}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return int(self.y.size)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return np.array_equal(self.t, other.t) and np.array_equal(self.y, other.y)

    __hash__ = None

    def with_y(self, y, provenance: SeriesProvenance) -> "TimeSeries":
        return TimeSeries(self.t, y, provenance)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.t.tobytes())
        h.update(self.y.tobytes())
        return h.hexdigest()


def validate(series: TimeSeries, min_segment: int = 3) -> None:
    if min_segment < 1:
        raise SeriesError(f"min_segment must be positive, got {min_segment}")
    if series.t.size != series.y.size:
        raise SeriesError(f"length mismatch: len(t)={series.t.size}, len(y)={series.y.size}")
    if not (np.all(np.isfinite(series.t)) and np.all(np.isfinite(series.y))):
        raise SeriesError("series contains non-finite values")
    if np.any(np.diff(series.t) < 0):
        i = int(np.argmax(np.diff(series.t) < 0))
        raise SeriesError(f"t is not non-decreasing at position {i + 1}")
    if series.n < 2 * min_segment:
        raise SeriesError(
            f"series too short: n={series.n} < 2*min_segment={2 * min_segment}"
        )


def load_csv(path) -> TimeSeries:
    """Read a ``t,y`` CSV file and return it sorted by ``t`` (stable)."""
    path = Path(path)
    if not path.is_file():
        raise SeriesError(f"{path}: no such file")
    ts, ys = [], []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "y"]:
            raise SeriesError(f"{path}: line 1: expected header 't,y', got {header!r}")
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise SeriesError(f"{path}: line {line}: expected 2 fields, got {len(row)}")
            try:
                t, y = float(row[0]), float(row[1])
            except ValueError:
                raise SeriesError(f"{path}: line {line}: cannot parse {row!r}") from None
            if not (math.isfinite(t) and math.isfinite(y)):
                raise SeriesError(f"{path}: line {line}: non-finite value in {row!r}")
            ts.append(t)
            ys.append(y)
    if len(ts) < 2:
        raise SeriesError(f"{path}: need at least 2 data rows, got {len(ts)}")
    order = np.argsort(np.asarray(ts), kind="stable")
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    return TimeSeries(
        np.asarray(ts)[order],
        np.asarray(ys)[order],
        SeriesProvenance(Kind.OBSERVED, parent_digest=digest),
    )


def write_csv(series: TimeSeries, path) -> None:
    """Write the canonical form: header ``t,y`` and round-trip float reprs."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "y"])
        for t, y in zip(series.t.tolist(), series.y.tolist()):
            w.writerow([repr(t), repr(y)])
