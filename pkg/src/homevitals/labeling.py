"""Cortisol-anchored stress labels.

Each analysis window maps to the nearest cortisol timepoint at-or-after its
midpoint (cortisol lags the stressor), and is labeled stressed when that
sample's concentration rises at least a threshold fraction above the
subject's T1 baseline. The rule object also offers an at-or-before mapping
so alternative lag assumptions can be swapped without touching callers.
"""

from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import BaselineMissing, FormatError, InputError
from .signals import Window

log = logging.getLogger(__name__)

TIMEPOINT_SPACING_MS = 20 * 60 * 1000
TIMEPOINT_SPACING_TOLERANCE_MS = 60 * 1000


class Timepoint(Enum):
    T1 = "T1"
    T2 = "T2"
    T3 = "T3"
    T4 = "T4"
    T5 = "T5"


TIMEPOINTS = tuple(Timepoint)


class StressState(Enum):
    NOT_STRESSED = 0
    STRESSED = 1


class Phase(Enum):
    WAITING = "Waiting"
    PRE_STRESS = "PreStress"
    ANTICIPATORY_STRESS = "AnticipatoryStress"
    STRESS = "Stress"
    RECOVERY_1 = "Recovery1"
    RECOVERY_2 = "Recovery2"


@dataclass(frozen=True)
class CortisolSample:
    subject_id: str
    timepoint: Timepoint
    t_ms: int
    concentration_ugdl: float

    def __post_init__(self) -> None:
        if not self.subject_id:
            raise InputError("subject_id must be non-empty")
        if self.concentration_ugdl < 0:
            raise InputError("concentration must be non-negative")


@dataclass(frozen=True)
class SessionTimeline:
    """Phase boundaries in epoch ms; recording spans PreStress..Recovery1."""

    boundaries: tuple[tuple[Phase, int], ...]

    def __post_init__(self) -> None:
        times = [t for _, t in self.boundaries]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise InputError("phase boundaries must be strictly increasing")

    def start_of(self, phase: Phase) -> int:
        for p, t in self.boundaries:
            if p == phase:
                return t
        raise InputError(f"phase {phase} not in timeline")

    def end_of(self, phase: Phase) -> int:
        found = False
        for p, t in self.boundaries:
            if found:
                return t
            found = p == phase
        raise InputError(f"phase {phase} has no successor boundary")

    @property
    def recording_span_ms(self) -> tuple[int, int]:
        return self.start_of(Phase.PRE_STRESS), self.end_of(Phase.RECOVERY_1)


@dataclass(frozen=True)
class StressLabel:
    window_index: int
    label: StressState
    source_timepoint: Timepoint


@dataclass(frozen=True)
class LabelRule:
    """Stressed when concentration >= baseline * (1 + threshold)."""

    threshold: float = 0.10
    mapping: str = "at_or_after"

    def __post_init__(self) -> None:
        if self.threshold < 0:
            raise InputError("threshold must be non-negative")
        if self.mapping not in ("at_or_after", "at_or_before"):
            raise InputError(f"unknown mapping {self.mapping!r}")


def check_session_samples(samples: Sequence[CortisolSample]) -> list[CortisolSample]:
    """Validate one subject's samples: unique timepoints, ~20 min spacing."""
    if not samples:
        raise InputError("no cortisol samples")
    subjects = {s.subject_id for s in samples}
    if len(subjects) != 1:
        raise InputError(f"samples span multiple subjects: {sorted(subjects)}")
    seen = [s.timepoint for s in samples]
    if len(set(seen)) != len(seen):
        raise InputError("duplicate timepoints for subject")
    ordered = sorted(samples, key=lambda s: list(Timepoint).index(s.timepoint))
    for a, b in zip(ordered, ordered[1:]):
        gap = b.t_ms - a.t_ms
        if abs(gap - TIMEPOINT_SPACING_MS) > TIMEPOINT_SPACING_TOLERANCE_MS:
            raise InputError(
                f"{a.timepoint.value}->{b.timepoint.value} gap {gap / 60000:.1f} min "
                "is not 20 min +- 60 s"
            )
    return ordered


def label_windows(
    samples: Sequence[CortisolSample],
    windows: Sequence[Window],
    rule: LabelRule | None = None,
) -> list[StressLabel]:
    """One label per window; windows past the last sample map to it."""
    rule = rule or LabelRule()
    ordered = check_session_samples(samples)
    if len(ordered) < 2:
        raise InputError("need at least 2 cortisol samples per subject")
    baseline = next((s for s in ordered if s.timepoint == Timepoint.T1), None)
    if baseline is None:
        raise BaselineMissing("subject has no T1 baseline sample")

    labels: list[StressLabel] = []
    for w in windows:
        mid = w.midpoint_ms
        if rule.mapping == "at_or_after":
            anchor = next((s for s in ordered if s.t_ms >= mid), ordered[-1])
        else:
            candidates = [s for s in ordered if s.t_ms <= mid]
            anchor = candidates[-1] if candidates else ordered[0]
        stressed = anchor.concentration_ugdl >= baseline.concentration_ugdl * (
            1.0 + rule.threshold
        )
        labels.append(
            StressLabel(
                window_index=w.index,
                label=StressState.STRESSED if stressed else StressState.NOT_STRESSED,
                source_timepoint=anchor.timepoint,
            )
        )
    return labels


def labels_to_targets(labels: Sequence[StressLabel]) -> np.ndarray:
    return np.asarray([l.label.value for l in labels], dtype=np.int64)


@dataclass(frozen=True)
class CortisolSummary:
    mean_ugdl: float
    sd_ugdl: float
    n: int
    degenerate: bool


def summarize_cortisol(
    samples: Iterable[CortisolSample],
) -> dict[Timepoint, CortisolSummary]:
    """Population mean and sample standard deviation per timepoint."""
    by_tp: dict[Timepoint, list[float]] = {tp: [] for tp in TIMEPOINTS}
    for s in samples:
        by_tp[s.timepoint].append(s.concentration_ugdl)
    out: dict[Timepoint, CortisolSummary] = {}
    for tp, values in by_tp.items():
        if not values:
            warnings.warn(f"no cortisol samples at {tp.value}; omitted", stacklevel=2)
            continue
        arr = np.asarray(values)
        degenerate = arr.size < 2
        out[tp] = CortisolSummary(
            mean_ugdl=float(arr.mean()),
            sd_ugdl=0.0 if degenerate else float(arr.std(ddof=1)),
            n=int(arr.size),
            degenerate=degenerate,
        )
    return out


CORTISOL_CSV_HEADER = ["subject_id", "timepoint", "t_ms", "concentration_ugdl"]


def save_cortisol_csv(samples: Sequence[CortisolSample], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CORTISOL_CSV_HEADER)
        for s in samples:
            writer.writerow(
                [s.subject_id, s.timepoint.value, s.t_ms, repr(float(s.concentration_ugdl))]
            )


def load_cortisol_csv(path: str | Path) -> list[CortisolSample]:
    out: list[CortisolSample] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CORTISOL_CSV_HEADER:
            raise FormatError(f"{path}: expected header {','.join(CORTISOL_CSV_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise FormatError(f"{path}:{lineno}: expected 4 columns")
            out.append(
                CortisolSample(row[0], Timepoint(row[1]), int(row[2]), float(row[3]))
            )
    return out
