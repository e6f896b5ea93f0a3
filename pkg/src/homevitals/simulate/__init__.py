"""Synthetic data generation and paced replay."""

from .bp_records import (
    BpMode,
    BpRecord,
    BpUnit,
    LONG_TERM_UNIT_S,
    LONG_TERM_UNITS,
    PPG_RATE_HZ,
    SHORT_TERM_UNIT_S,
    segment_targets,
    simulate_bp_records,
)
from .profiles import (
    COHORT_CORTISOL_MEANS_UGDL,
    COHORT_CORTISOL_T1_SD_UGDL,
    SessionScript,
    SyntheticProfile,
    default_session_script,
    default_session_timeline,
    generate_cohort,
)
from .streaming import (
    CapacityMode,
    CapacityModel,
    StreamReport,
    capacity_check,
    stream_session,
)
from .stress_session import simulate_session, stress_envelope

__all__ = [
    "BpMode",
    "BpRecord",
    "BpUnit",
    "CapacityMode",
    "CapacityModel",
    "COHORT_CORTISOL_MEANS_UGDL",
    "COHORT_CORTISOL_T1_SD_UGDL",
    "LONG_TERM_UNITS",
    "LONG_TERM_UNIT_S",
    "PPG_RATE_HZ",
    "SHORT_TERM_UNIT_S",
    "SessionScript",
    "StreamReport",
    "SyntheticProfile",
    "capacity_check",
    "default_session_script",
    "default_session_timeline",
    "generate_cohort",
    "segment_targets",
    "simulate_bp_records",
    "simulate_session",
    "stream_session",
    "stress_envelope",
]
