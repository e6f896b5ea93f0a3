"""Signal containers, DSP primitives, windowing, and CSV formats."""

from .dsp import (
    PREPROCESS_STEPS,
    butter_lowpass_coefficients,
    butterworth_lowpass,
    derivative,
    detect_peaks,
    detrend,
    minmax_normalize,
    modulo_mean_correct,
    preprocess_ppg,
    single_pass_filter,
    spectrum,
    zero_phase_filter,
)
from .series import (
    DEFAULT_PPG_RATE_HZ,
    IBI_MAX_S,
    IBI_MIN_S,
    WRISTBAND_RATES_HZ,
    Channel,
    ChannelBundle,
    FilterConfig,
    IbiSeries,
    SampleSeries,
    Spectrum,
    Window,
    WindowSpec,
    load_ibi_csv,
    load_series_csv,
    save_ibi_csv,
    save_series_csv,
)
from .windows import hr_series_bpm, instantaneous_hr, make_windows

__all__ = [
    "Channel",
    "ChannelBundle",
    "DEFAULT_PPG_RATE_HZ",
    "FilterConfig",
    "IBI_MAX_S",
    "IBI_MIN_S",
    "IbiSeries",
    "PREPROCESS_STEPS",
    "SampleSeries",
    "Spectrum",
    "WRISTBAND_RATES_HZ",
    "Window",
    "WindowSpec",
    "butter_lowpass_coefficients",
    "butterworth_lowpass",
    "derivative",
    "detect_peaks",
    "detrend",
    "hr_series_bpm",
    "instantaneous_hr",
    "load_ibi_csv",
    "load_series_csv",
    "make_windows",
    "minmax_normalize",
    "modulo_mean_correct",
    "preprocess_ppg",
    "save_ibi_csv",
    "save_series_csv",
    "single_pass_filter",
    "spectrum",
    "zero_phase_filter",
]
