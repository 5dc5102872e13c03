"""Peak extraction, spacing statistics and trace I/O."""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import signal
from scipy.ndimage import median_filter

from .materials import AF, E_CHARGE, H_PLANCK, MEV
from .set_orthodox import Trace

DERIVATIVE, CURRENT = "derivative", "current"

X_UNITS = {"mv": 1.0, "v": 1e3, "uv": 1e-3}
Y_UNITS = {"pa": 1.0, "fa": 1e-3, "na": 1e3, "ua": 1e6, "a": 1e12}


class InsufficientDataError(ValueError):
    """Too few points or peaks for the requested analysis."""


class TraceParseError(ValueError):
    """Malformed trace file."""


@dataclass(frozen=True)
class PeakSet:
    positions: np.ndarray  # mV
    heights: np.ndarray = field(default=None, repr=False)
    widths: np.ndarray = field(default=None, repr=False)  # mV at half prominence

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.size > 1 and not np.all(np.diff(pos) > 0):
            raise ValueError("peak positions must be strictly increasing")
        object.__setattr__(self, "positions", pos)
        for name in ("heights", "widths"):
            value = getattr(self, name)
            value = np.full(pos.size, np.nan) if value is None else np.asarray(value, float)
            object.__setattr__(self, name, value)

    def __len__(self):
        return self.positions.size

    @property
    def spacings(self) -> np.ndarray:
        return np.diff(self.positions)

    @property
    def first_gap(self) -> float | None:
        return float(self.spacings[0]) if len(self) >= 2 else None

    @property
    def mean_spacing(self) -> float | None:
        """Mean spacing after the first gap (needs three peaks)."""
        return float(np.mean(self.spacings[1:])) if len(self) >= 3 else None

    @property
    def first_gap_ratio(self) -> float | None:
        return self.first_gap / self.mean_spacing if len(self) >= 3 else None

    def select(self, mask) -> "PeakSet":
        mask = np.asarray(mask, dtype=bool)
        return PeakSet(self.positions[mask], self.heights[mask], self.widths[mask])

    def to_dict(self) -> dict:
        def nums(a):
            return [None if not math.isfinite(v) else float(v) for v in a]

        return {
            "count": len(self),
            "positions_mV": nums(self.positions),
            "spacings_mV": nums(self.spacings),
            "mean_spacing_mV": self.mean_spacing,
            "first_gap_mV": self.first_gap,
            "first_gap_ratio": self.first_gap_ratio,
            "widths_mV": nums(self.widths),
        }


def detection_signal(trace: Trace, kind: str = DERIVATIVE, detrend_window: float | None = None):
    """Signal that peak detection runs on.

    ``kind`` is ``"derivative"`` for |dI/dV| by central differences or
    ``"current"`` for the raw current.  ``detrend_window`` (mV) subtracts a
    moving median from the current first.
    """
    x, y = trace.x_values, trace.y_values
    if detrend_window:
        step = float(np.median(np.diff(x)))
        size = max(3, int(round(detrend_window / step)) | 1)
        y = y - median_filter(y, size=size, mode="nearest")
    if kind == DERIVATIVE:
        return np.abs(np.gradient(y, x))
    if kind == CURRENT:
        return y
    raise ValueError(f"unknown detection signal {kind!r}")


def _refine(x, s, i):
    """Vertex of the parabola through samples i-1, i, i+1."""
    if i <= 0 or i >= len(s) - 1:
        return x[i]
    y0, y1, y2 = s[i - 1], s[i], s[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0:
        return x[i]
    delta = float(np.clip(0.5 * (y0 - y2) / denom, -1.0, 1.0))
    if delta >= 0:
        return x[i] + delta * (x[i + 1] - x[i])
    return x[i] + delta * (x[i] - x[i - 1])


def find_peaks(
    trace: Trace,
    min_prominence: float = 0.1,
    min_separation: float = 1.0,
    kind: str = DERIVATIVE,
    detrend_window: float | None = None,
) -> PeakSet:
    """Locate peaks in the detection signal of ``trace``.

    ``min_prominence`` is a fraction of the signal's full range and
    ``min_separation`` is in mV.  Flat-topped maxima are reported from the
    leftmost plateau sample, then refined by parabolic interpolation.
    """
    if len(trace) < 3:
        raise InsufficientDataError("trace needs at least 3 points")
    if not min_prominence > 0 or not min_separation > 0:
        raise ValueError("min_prominence and min_separation must be positive")
    x = trace.x_values
    s = detection_signal(trace, kind, detrend_window)
    span = float(np.ptp(s))
    if span == 0.0 or not np.isfinite(span):
        return PeakSet(np.empty(0))
    step = float(np.median(np.diff(x)))
    distance = max(1, int(math.floor(min_separation / step)))
    idx, props = signal.find_peaks(
        s, prominence=min_prominence * span, distance=distance, plateau_size=1
    )
    if idx.size == 0:
        return PeakSet(np.empty(0))
    left = props["left_edges"]
    positions = np.array([_refine(x, s, i) for i in left])
    widths = signal.peak_widths(s, idx, rel_height=0.5)[0] * step
    order = np.argsort(positions)
    return PeakSet(positions[order], s[left][order], widths[order])


def fast_features(
    trace: Trace,
    max_width: float = 2.0,
    min_prominence: float = 0.05,
    min_separation: float = 1.0,
    detrend_window: float | None = None,
) -> PeakSet:
    """Derivative peaks narrower than ``max_width`` mV at half prominence.

    Slow Coulomb-blockade flanks give broad derivative maxima and are
    dropped; charge jumps give features a few samples wide.
    """
    peaks = find_peaks(trace, min_prominence, min_separation, DERIVATIVE, detrend_window)
    return peaks.select(peaks.widths <= max_width)


@dataclass(frozen=True)
class SpacingStats:
    mean: float  # mV, over spacings after the first
    stddev: float  # mV
    first_gap: float  # mV
    ratio: float

    def to_dict(self) -> dict:
        return {
            "mean_mV": self.mean,
            "stddev_mV": self.stddev,
            "first_gap_mV": self.first_gap,
            "ratio": self.ratio,
        }


def spacing_stats(peaks: PeakSet) -> SpacingStats:
    """First gap and the mean/stddev of the spacings that follow it."""
    if len(peaks) < 3:
        raise InsufficientDataError(f"need at least 3 peaks, got {len(peaks)}")
    rest = peaks.spacings[1:]
    mean = float(np.mean(rest))
    first = float(peaks.spacings[0])
    return SpacingStats(mean, float(np.std(rest)), first, first / mean)


def capacitance_from_period(period: float) -> float:
    """Gate capacitance e / dV_g in aF for a CB period in mV."""
    if not period > 0:
        raise ValueError(f"period must be positive, got {period}")
    return E_CHARGE / (period * 1e-3) / AF


def energy_to_frequency(energy: float) -> float:
    """Photon frequency E/h in THz for an energy in meV."""
    if not energy > 0:
        raise ValueError(f"energy must be positive, got {energy}")
    return energy * MEV / H_PLANCK / 1e12


def _unit_scale(name: str, table: dict, default: float) -> float:
    suffix = name.strip().lower().rsplit("_", 1)[-1]
    return table.get(suffix, default)


def import_trace(
    path: str | Path,
    x_scale: float | None = None,
    y_scale: float | None = None,
) -> Trace:
    """Read a two-column CSV trace.

    Lines starting with ``#`` carry metadata (``# {json}``).  An optional
    header row names the columns; a unit suffix such as ``_mv``/``_v`` or
    ``_pa``/``_na`` sets the conversion to mV and pA unless ``x_scale`` or
    ``y_scale`` are given explicitly.  Unsorted data is sorted with a warning.
    """
    meta: dict = {}
    xs, ys = [], []
    header = None
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                body = text[1:].strip()
                if body.startswith("{"):
                    try:
                        meta.update(json.loads(body))
                    except json.JSONDecodeError as exc:
                        raise TraceParseError(f"{path}:{lineno}: bad metadata JSON: {exc}") from None
                continue
            row = next(csv.reader([text]))
            if len(row) != 2:
                raise TraceParseError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError:
                if header is None and not xs:
                    header = [c.strip() for c in row]
                    continue
                raise TraceParseError(f"{path}:{lineno}: non-numeric value in {row!r}") from None
            xs.append(x)
            ys.append(y)
    if len(xs) < 3:
        raise InsufficientDataError(f"{path}: need at least 3 data points, got {len(xs)}")
    if x_scale is None:
        x_scale = _unit_scale(header[0], X_UNITS, 1.0) if header else 1.0
    if y_scale is None:
        y_scale = _unit_scale(header[1], Y_UNITS, 1.0) if header else 1.0
    x = np.array(xs) * x_scale
    y = np.array(ys) * y_scale
    if not np.all(np.diff(x) > 0):
        order = np.argsort(x, kind="stable")
        x, y = x[order], y[order]
        if np.any(np.diff(x) == 0):
            raise TraceParseError(f"{path}: duplicate x values")
        warnings.warn(f"{path}: x values were not ascending; sorted", stacklevel=2)
    if header:
        meta.setdefault("columns", header)
    return Trace(x, y, meta)


def export_trace(trace: Trace, path: str | Path, x_name: str = "v_g_mv") -> None:
    """Write ``trace`` as CSV: a JSON metadata comment, a header, then rows."""
    with open(path, "w", newline="") as fh:
        if trace.metadata:
            fh.write("# " + json.dumps(trace.metadata, sort_keys=True, default=float) + "\n")
        fh.write(f"{x_name},current_pa\n")
        for x, y in zip(trace.x_values, trace.y_values):
            fh.write(f"{float(x)!r},{float(y)!r}\n")


def trace_to_dict(trace: Trace) -> dict:
    return {
        "metadata": trace.metadata,
        "x_mV": trace.x_values.tolist(),
        "current_pA": trace.y_values.tolist(),
    }


def cb_period(trace: Trace, v_max: float = 0.0, min_separation: float = 50.0) -> float | None:
    """Mean spacing of current maxima below ``v_max`` (slow CB oscillation)."""
    mask = trace.x_values < v_max
    if mask.sum() < 3:
        return None
    part = Trace(trace.x_values[mask], trace.y_values[mask])
    peaks = find_peaks(part, 0.3, min_separation, CURRENT)
    if len(peaks) < 2:
        return None
    return float(np.mean(peaks.spacings))


def sweep_summary(
    trace: Trace,
    min_prominence: float = 0.05,
    min_separation: float = 1.0,
    max_width: float = 2.0,
    detrend_window: float | None = None,
) -> dict:
    """CB period, fast-feature positions and their spacing statistics."""
    fast = fast_features(trace, max_width, min_prominence, min_separation, detrend_window)
    positive = fast.select(fast.positions > 0)
    summary = {
        "cb_period_mV": cb_period(trace),
        "fast_features_negative": int(np.sum(fast.positions < 0)),
        "fast_features_positive": len(positive),
        "onset_mV": float(positive.positions[0]) if len(positive) else None,
        "peaks": positive.to_dict(),
        "stats": None,
    }
    if len(positive) >= 3:
        summary["stats"] = spacing_stats(positive).to_dict()
    return summary
