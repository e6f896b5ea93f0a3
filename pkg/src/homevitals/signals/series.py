"""Signal containers: uniformly sampled series, beat-interval event series,
per-subject channel bundles, window specs, and spectra.

All containers are immutable; arrays are copied on construction and marked
read-only, so operations downstream can share them safely across threads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from ..errors import DegenerateInput, FormatError, InputError

IBI_MIN_S = 0.3
IBI_MAX_S = 2.0


class Channel(Enum):
    EDA = "EDA"
    BVP = "BVP"
    ST = "ST"
    PPG = "PPG"
    DERIVED = "DERIVED"


#: Fixed wristband sampling rates; PPG (external loader) and DERIVED are free.
WRISTBAND_RATES_HZ = {Channel.EDA: 4.0, Channel.BVP: 64.0, Channel.ST: 4.0}

DEFAULT_PPG_RATE_HZ = 125.0


def _as_float_array(values: Sequence[float] | np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).copy()
    if arr.ndim != 1:
        raise InputError(f"{what} must be one-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise InputError(f"{what} contains NaN or Inf")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SampleSeries:
    """A uniformly sampled signal. Sample i lives at start_ms + round(1000*i/rate_hz)."""

    channel: Channel
    rate_hz: float
    start_ms: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.rate_hz <= 0:
            raise InputError(f"rate_hz must be positive, got {self.rate_hz}")
        expected = WRISTBAND_RATES_HZ.get(self.channel)
        if expected is not None and self.rate_hz != expected:
            raise InputError(
                f"{self.channel.value} is a wristband channel sampled at "
                f"{expected} Hz, got {self.rate_hz} Hz"
            )
        object.__setattr__(self, "values", _as_float_array(self.values, "values"))
        object.__setattr__(self, "start_ms", int(self.start_ms))

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def duration_s(self) -> float:
        return len(self) / self.rate_hz

    @property
    def end_ms(self) -> int:
        return self.start_ms + int(round(1000.0 * len(self) / self.rate_hz))

    def timestamps_ms(self) -> np.ndarray:
        idx = np.arange(len(self), dtype=np.float64)
        return (self.start_ms + np.rint(1000.0 * idx / self.rate_hz)).astype(np.int64)

    def with_values(self, values: np.ndarray, channel: Channel | None = None) -> "SampleSeries":
        """New series sharing rate and origin; used by pure DSP transforms."""
        return SampleSeries(
            channel=channel if channel is not None else self.channel,
            rate_hz=self.rate_hz,
            start_ms=self.start_ms,
            values=values,
        )

    def slice_samples(self, start_idx: int, stop_idx: int) -> "SampleSeries":
        if not 0 <= start_idx <= stop_idx <= len(self):
            raise InputError(
                f"slice [{start_idx}:{stop_idx}] out of range for length {len(self)}"
            )
        offset_ms = int(round(1000.0 * start_idx / self.rate_hz))
        return SampleSeries(
            channel=self.channel,
            rate_hz=self.rate_hz,
            start_ms=self.start_ms + offset_ms,
            values=self.values[start_idx:stop_idx],
        )


@dataclass(frozen=True)
class IbiSeries:
    """Inter-beat-interval events: (epoch ms of the beat, interval seconds)."""

    t_ms: np.ndarray
    ibi_s: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t_ms, dtype=np.int64).copy()
        v = _as_float_array(self.ibi_s, "ibi_s")
        if t.shape != v.shape:
            raise InputError("t_ms and ibi_s must have equal length")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise InputError("IBI event times must be strictly increasing")
        if v.size and (v.min() < IBI_MIN_S or v.max() > IBI_MAX_S):
            raise InputError(
                f"IBI outside physiological bound [{IBI_MIN_S}, {IBI_MAX_S}] s"
            )
        t.setflags(write=False)
        object.__setattr__(self, "t_ms", t)
        object.__setattr__(self, "ibi_s", v)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[int, float]]) -> "IbiSeries":
        if not pairs:
            return cls(np.empty(0, dtype=np.int64), np.empty(0))
        t, v = zip(*pairs)
        return cls(np.asarray(t, dtype=np.int64), np.asarray(v, dtype=np.float64))

    def __len__(self) -> int:
        return int(self.t_ms.size)

    def __iter__(self) -> Iterator[tuple[int, float]]:
        return ((int(t), float(v)) for t, v in zip(self.t_ms, self.ibi_s))

    def between(self, start_ms: int, end_ms: int) -> "IbiSeries":
        """Events with start_ms <= t < end_ms."""
        mask = (self.t_ms >= start_ms) & (self.t_ms < end_ms)
        return IbiSeries(self.t_ms[mask], self.ibi_s[mask])


@dataclass(frozen=True)
class ChannelBundle:
    """Time-aligned multi-rate signal set for one subject session."""

    subject_id: str
    eda: SampleSeries
    bvp: SampleSeries
    st: SampleSeries
    ibi: IbiSeries
    session_start_ms: int

    def __post_init__(self) -> None:
        if not self.subject_id:
            raise InputError("subject_id must be non-empty")
        for name, series in (("eda", self.eda), ("bvp", self.bvp), ("st", self.st)):
            if series.start_ms != self.session_start_ms:
                raise InputError(
                    f"{name} starts at {series.start_ms}, expected session origin "
                    f"{self.session_start_ms}"
                )
        object.__setattr__(self, "session_start_ms", int(self.session_start_ms))

    @property
    def duration_s(self) -> float:
        """Common covered duration: the shortest uniform channel."""
        return min(self.eda.duration_s, self.bvp.duration_s, self.st.duration_s)


@dataclass(frozen=True)
class WindowSpec:
    """Running-window geometry; defaults are 90 s length with 45 s overlap."""

    length_s: float = 90.0
    overlap_s: float = 45.0

    def __post_init__(self) -> None:
        if self.length_s <= 0:
            raise InputError("window length must be positive")
        if self.overlap_s < 0 or self.overlap_s >= self.length_s:
            raise InputError("overlap must satisfy 0 <= overlap < length")

    @property
    def step_s(self) -> float:
        return self.length_s - self.overlap_s


@dataclass(frozen=True)
class Window:
    """One analysis window over a bundle; channel slices reference bundle data."""

    index: int
    start_ms: int
    end_ms: int
    bundle: ChannelBundle = field(repr=False)

    def _slice(self, series: SampleSeries) -> SampleSeries:
        rate = series.rate_hz
        rel_start_ms = self.start_ms - series.start_ms
        start_idx = int(round(rel_start_ms * rate / 1000.0))
        count = int(round((self.end_ms - self.start_ms) * rate / 1000.0))
        return series.slice_samples(start_idx, start_idx + count)

    @property
    def eda(self) -> SampleSeries:
        return self._slice(self.bundle.eda)

    @property
    def bvp(self) -> SampleSeries:
        return self._slice(self.bundle.bvp)

    @property
    def st(self) -> SampleSeries:
        return self._slice(self.bundle.st)

    @property
    def ibi(self) -> IbiSeries:
        return self.bundle.ibi.between(self.start_ms, self.end_ms)

    @property
    def midpoint_ms(self) -> int:
        return (self.start_ms + self.end_ms) // 2


@dataclass(frozen=True)
class Spectrum:
    """One-sided magnitude spectrum."""

    freqs_hz: np.ndarray
    magnitudes: np.ndarray

    def __post_init__(self) -> None:
        f = _as_float_array(self.freqs_hz, "freqs_hz")
        m = _as_float_array(self.magnitudes, "magnitudes")
        if f.shape != m.shape:
            raise InputError("freqs_hz and magnitudes must have equal length")
        if f.size > 1 and not np.all(np.diff(f) > 0):
            raise InputError("freqs_hz must be strictly increasing")
        if m.size and m.min() < 0:
            raise InputError("magnitudes must be non-negative")
        object.__setattr__(self, "freqs_hz", f)
        object.__setattr__(self, "magnitudes", m)

    def __len__(self) -> int:
        return int(self.freqs_hz.size)


@dataclass(frozen=True)
class FilterConfig:
    """Low-pass design parameters: order and cutoff as a fraction of Nyquist.

    The default targets 8 Hz on a 125 Hz PPG stream, which keeps pulse
    morphology through the second harmonic at high heart rates.
    """

    order_n: int = 4
    cutoff_wn: float = 8.0 / (DEFAULT_PPG_RATE_HZ / 2.0)

    def __post_init__(self) -> None:
        if self.order_n < 1:
            raise InputError("filter order must be a positive integer")
        if not 0.0 < self.cutoff_wn < 1.0:
            # Deferred to butterworth_lowpass for the (0,1) open-interval check
            # would hide misconfiguration; fail fast here instead.
            from ..errors import ConfigError

            raise ConfigError(
                f"cutoff_wn must lie in (0, 1) as a fraction of Nyquist, got {self.cutoff_wn}"
            )

    @classmethod
    def for_rate(cls, rate_hz: float, cutoff_hz: float = 8.0, order_n: int = 4) -> "FilterConfig":
        return cls(order_n=order_n, cutoff_wn=cutoff_hz / (rate_hz / 2.0))


def _format_float(v: float) -> str:
    # repr is the shortest representation that round-trips float64 exactly,
    # so no value is ever written with fewer meaningful digits than it has.
    return repr(float(v))


def save_series_csv(series: SampleSeries, path: str | Path) -> None:
    """Write `t_ms,value` rows, one per sample."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_ms", "value"])
        for t, v in zip(series.timestamps_ms(), series.values):
            writer.writerow([int(t), _format_float(v)])


def load_series_csv(
    path: str | Path,
    channel: Channel = Channel.PPG,
    rate_hz: float | None = None,
) -> SampleSeries:
    """Read a `t_ms,value` CSV; timestamps must agree with the declared rate.

    rate_hz defaults to the wristband rate for EDA/BVP/ST and 125 Hz for PPG.
    """
    if rate_hz is None:
        rate_hz = WRISTBAND_RATES_HZ.get(channel, DEFAULT_PPG_RATE_HZ)
    t_ms: list[int] = []
    values: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t_ms", "value"]:
            raise FormatError(f"{path}: expected header 't_ms,value', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise FormatError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            t_ms.append(int(row[0]))
            values.append(float(row[1]))
    if not values:
        raise DegenerateInput(f"{path}: no samples")
    start_ms = t_ms[0]
    series = SampleSeries(channel=channel, rate_hz=rate_hz, start_ms=start_ms, values=values)
    expected = series.timestamps_ms()
    actual = np.asarray(t_ms, dtype=np.int64)
    if np.abs(expected - actual).max() > 1:
        bad = int(np.abs(expected - actual).argmax())
        raise FormatError(
            f"{path}: timestamps inconsistent with rate {rate_hz} Hz "
            f"(row {bad}: got {actual[bad]}, expected {expected[bad]})"
        )
    return series


def save_ibi_csv(ibi: IbiSeries, path: str | Path) -> None:
    """Write `t_ms,ibi_s` rows, one per beat event."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_ms", "ibi_s"])
        for t, v in ibi:
            writer.writerow([t, _format_float(v)])


def load_ibi_csv(path: str | Path) -> IbiSeries:
    pairs: list[tuple[int, float]] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t_ms", "ibi_s"]:
            raise FormatError(f"{path}: expected header 't_ms,ibi_s', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise FormatError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            pairs.append((int(row[0]), float(row[1])))
    return IbiSeries.from_pairs(pairs)
