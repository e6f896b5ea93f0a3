"""Paced replay of a session into a sink, plus wristband battery accounting."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from ..errors import CapacityExceeded, InputError
from ..signals import ChannelBundle

#: Sink signature: (channel name, timestamp ms, value). Exceptions abort the
#: stream and are reported with the count of samples already delivered.
Sink = Callable[[str, int, float], None]


@dataclass
class StreamReport:
    sent: dict[str, int] = field(default_factory=dict)
    wall_seconds: float = 0.0
    max_jitter_ms: float = 0.0
    error_position: int | None = None
    error: str | None = None

    @property
    def total_sent(self) -> int:
        return sum(self.sent.values())


def stream_session(bundle: ChannelBundle, sink: Sink, speedup: float = 1.0) -> StreamReport:
    """Replay every sample and beat event in timestamp order, paced at
    wall-clock time divided by speedup; per-channel rates are preserved."""
    if speedup < 1.0:
        raise InputError("speedup must be >= 1")
    channels = [
        ("EDA", bundle.eda.timestamps_ms(), bundle.eda.values),
        ("BVP", bundle.bvp.timestamps_ms(), bundle.bvp.values),
        ("ST", bundle.st.timestamps_ms(), bundle.st.values),
        ("IBI", bundle.ibi.t_ms, bundle.ibi.ibi_s),
    ]
    names: list[str] = []
    t_all: list[np.ndarray] = []
    v_all: list[np.ndarray] = []
    for name, t_ms, values in channels:
        names.extend([name] * len(t_ms))
        t_all.append(np.asarray(t_ms, dtype=np.int64))
        v_all.append(np.asarray(values, dtype=np.float64))
    t_merged = np.concatenate(t_all)
    v_merged = np.concatenate(v_all)
    order = np.argsort(t_merged, kind="stable")

    report = StreamReport(sent={name: 0 for name, _, _ in channels})
    if order.size == 0:
        return report
    t0_ms = int(t_merged[order[0]])
    wall_start = time.monotonic()
    sent = 0
    for k in order:
        target_wall = (int(t_merged[k]) - t0_ms) / 1000.0 / speedup
        while True:
            lag = target_wall - (time.monotonic() - wall_start)
            if lag <= 0.002:
                break
            time.sleep(min(lag, 0.05))
        jitter_ms = ((time.monotonic() - wall_start) - target_wall) * 1000.0
        report.max_jitter_ms = max(report.max_jitter_ms, jitter_ms)
        name = names[k]
        try:
            sink(name, int(t_merged[k]), float(v_merged[k]))
        except Exception as exc:  # report partial progress, never raise
            report.error_position = sent
            report.error = str(exc)
            break
        sent += 1
        report.sent[name] += 1
    report.wall_seconds = time.monotonic() - wall_start
    return report


class CapacityMode(Enum):
    STREAMING = "streaming"
    RECORDING = "recording"


@dataclass(frozen=True)
class CapacityModel:
    """Wristband battery: hours of continuous operation per mode."""

    streaming_hours: float = 20.0
    recording_hours: float = 30.0

    def hours_for(self, mode: CapacityMode) -> float:
        return self.streaming_hours if mode is CapacityMode.STREAMING else self.recording_hours


def capacity_check(
    duration_h: float,
    mode: CapacityMode | str = CapacityMode.STREAMING,
    model: CapacityModel | None = None,
) -> float:
    """Remaining battery fraction after a session of duration_h (linear drain)."""
    mode = CapacityMode(mode)
    model = model or CapacityModel()
    if duration_h < 0:
        raise InputError("duration must be non-negative")
    capacity = model.hours_for(mode)
    if duration_h > capacity:
        raise CapacityExceeded(
            f"{duration_h} h exceeds the {capacity} h {mode.value} capacity"
        )
    return 1.0 - duration_h / capacity
