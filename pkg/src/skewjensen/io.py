"""Histogram ingestion and serialization.

Smoothing keeps every bin at or above ``epsilon``: bins below the floor
are set to it and the remaining bins are rescaled to carry the rest of
the unit mass.  Floored bins therefore stay exactly at ``epsilon`` and
re-applying the smoothing is a no-op.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigurationError, DomainError, ParseError

# I = 0.3 R + 0.596 G + 0.11 B; the weights sum to 1.006.
INTENSITY_WEIGHTS = (0.3, 0.596, 0.11)


@dataclass(frozen=True)
class IngestionConfig:
    epsilon: float = 1e-9
    normalization_tol: float = 1e-9
    bins: int = 256

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigurationError("smoothing epsilon must be positive")
        if not self.normalization_tol > 0:
            raise ConfigurationError("normalization tolerance must be positive")
        if self.bins < 2:
            raise ConfigurationError("need at least 2 histogram bins")


def smooth(row, config: IngestionConfig = IngestionConfig()) -> np.ndarray:
    """Normalize ``row`` and floor every bin at ``config.epsilon``."""
    x = np.asarray(row, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise DomainError("a histogram needs at least 2 bins")
    if not np.all(np.isfinite(x)):
        raise DomainError("histogram entries must be finite")
    if np.any(x < 0):
        i = int(np.nonzero(x < 0)[0][0])
        raise DomainError(f"negative entry {float(x[i])!r} in bin {i}")
    total = x.sum()
    if total <= 0:
        raise DomainError("degenerate histogram: all bins are zero")
    eps = config.epsilon
    if eps * x.size >= 1.0:
        raise ConfigurationError("smoothing epsilon too large for this bin count")
    if abs(total - 1.0) > config.normalization_tol:
        x = x / total
    low = x < eps
    if not low.any():
        return x
    free = ~low
    out = np.empty_like(x)
    out[low] = eps
    out[free] = x[free] * ((1.0 - eps * low.sum()) / x[free].sum())
    return out


def parse_rows(text: str, source: str = "<input>") -> List[List[float]]:
    rows = []
    reader = csv.reader(_io.StringIO(text))
    for lineno, fields in enumerate(reader, start=1):
        if not fields or all(not f.strip() for f in fields):
            continue
        if fields[0].lstrip().startswith("#"):
            continue
        row = []
        for col, f in enumerate(fields, start=1):
            try:
                row.append(float(f))
            except ValueError:
                raise ParseError(f"{source}:{lineno}:{col}: cannot parse {f.strip()!r} as a number") from None
        rows.append(row)
    return rows


def _read_matrix(path) -> Tuple[List[List[float]], str]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        if isinstance(data, dict):
            data = data.get("histograms", data.get("points"))
        if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
            raise ParseError(f"{path}: expected a JSON array of number arrays")
        rows = []
        for i, r in enumerate(data, start=1):
            try:
                rows.append([float(v) for v in r])
            except (TypeError, ValueError):
                raise ParseError(f"{path}: row {i} holds a non-numeric entry") from None
        return rows, str(path)
    return parse_rows(text, str(path)), str(path)


def _check_widths(rows, source, expected=None):
    for i, r in enumerate(rows, start=1):
        if expected is None:
            expected = len(r)
        if len(r) != expected:
            raise ParseError(f"{source}: row {i} has {len(r)} columns, expected {expected}")


def load_matrix(path) -> np.ndarray:
    """Read a numeric CSV/JSON table without any histogram processing."""
    rows, source = _read_matrix(path)
    if not rows:
        raise ParseError(f"{source}: no data rows")
    _check_widths(rows, source)
    return np.asarray(rows, dtype=float)


def load_histograms(path, config: IngestionConfig = IngestionConfig()) -> List[np.ndarray]:
    """Load one histogram per row, smoothed and normalized."""
    rows, source = _read_matrix(path)
    if not rows:
        raise ParseError(f"{source}: no data rows")
    _check_widths(rows, source)
    out = []
    for i, r in enumerate(rows, start=1):
        if len(r) < 2:
            raise ParseError(f"{source}: row {i} has fewer than 2 bins")
        try:
            out.append(smooth(r, config))
        except DomainError as exc:
            raise ParseError(f"{source}: row {i}: {exc}") from None
    return out


def load_labeled(path, config: IngestionConfig = IngestionConfig()):
    """Labeled CSV: integer class label first, histogram bins after."""
    rows, source = _read_matrix(path)
    if not rows:
        raise ParseError(f"{source}: no data rows")
    _check_widths(rows, source)
    labels, hists = [], []
    for i, r in enumerate(rows, start=1):
        if len(r) < 3:
            raise ParseError(f"{source}: row {i} needs a label and at least 2 bins")
        if r[0] != int(r[0]):
            raise ParseError(f"{source}:{i}:1: class label {r[0]!r} is not an integer")
        labels.append(int(r[0]))
        try:
            hists.append(smooth(r[1:], config))
        except DomainError as exc:
            raise ParseError(f"{source}: row {i}: {exc}") from None
    return np.asarray(hists), np.asarray(labels, dtype=int)


def fmt(x: float) -> str:
    """Shortest decimal that round-trips to the same double."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def format_rows(rows: Iterable[Sequence[float]]) -> str:
    return "".join(",".join(fmt(v) for v in r) + "\n" for r in rows)


def save_histograms(path, hists: Iterable[Sequence[float]]) -> None:
    Path(path).write_text(format_rows(hists))


def to_json(obj) -> str:
    """Deterministic JSON; non-finite floats are written as strings."""
    def clean(o):
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        if isinstance(o, np.ndarray):
            return [clean(v) for v in o.tolist()]
        if isinstance(o, (np.integer,)):
            return int(o)
        if isinstance(o, (float, np.floating)):
            o = float(o)
            return o if math.isfinite(o) else fmt(o)
        return o
    return json.dumps(clean(obj), indent=2) + "\n"


def intensity_histogram(pixels, config: IngestionConfig = IngestionConfig(),
                        smoothed: bool = True) -> np.ndarray:
    """Intensity histogram of RGB pixels with channels in [0, 255].

    ``I = 0.3 R + 0.596 G + 0.11 B`` is binned into ``config.bins`` equal
    bins over [0, 255].  The weights sum to 1.006, so white reaches 256.53;
    intensities above 255 land in the top bin.
    """
    px = np.asarray(pixels, dtype=float)
    if px.ndim == 1 and px.size == 3:
        px = px[None, :]
    if px.ndim != 2 or px.shape[1] != 3 or px.shape[0] == 0:
        raise DomainError("pixels must be a non-empty list of (R, G, B) triples")
    if np.any(~np.isfinite(px)) or np.any(px < 0) or np.any(px > 255):
        raise DomainError("RGB channels must lie in [0, 255]")
    intensity = px @ np.asarray(INTENSITY_WEIGHTS)
    width = 255.0 / config.bins
    idx = np.minimum(np.floor(intensity / width).astype(int), config.bins - 1)
    counts = np.bincount(idx, minlength=config.bins).astype(float)
    hist = counts / counts.sum()
    return smooth(hist, config) if smoothed else hist
