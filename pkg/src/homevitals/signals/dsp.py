"""DSP primitives for the preprocessing pipeline and feature extractors.

The low-pass filter is designed from the analog Butterworth prototype via the
bilinear transform and applied forward-backward for zero phase, so detected
peak timings are not shifted. Coefficient application delegates to
scipy.signal.lfilter when scipy is importable (identical output, much faster);
otherwise a pure-Python direct-form II transposed loop is used.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..errors import ConfigError, DegenerateInput, InputError
from .series import Channel, FilterConfig, SampleSeries, Spectrum

try:  # pragma: no cover - exercised indirectly
    from scipy.signal import lfilter as _scipy_lfilter
except ImportError:  # pragma: no cover
    _scipy_lfilter = None


def detrend(s: SampleSeries) -> SampleSeries:
    """Remove the least-squares line over the sample index.

    Uses the closed-form normal equations rather than a generic solver so a
    constant input maps to exact zeros (no SVD round-off residue).
    """
    n = len(s)
    if n < 2:
        raise DegenerateInput(f"detrend needs at least 2 samples, got {n}")
    x = np.arange(n, dtype=np.float64)
    dx = x - x.mean()
    dy = s.values - s.values.mean()
    slope = float(dx @ dy) / float(dx @ dx)
    return s.with_values(dy - slope * dx)


def minmax_normalize(s: SampleSeries) -> SampleSeries:
    """Affine map of values onto [0, 1]."""
    v = s.values
    if len(s) == 0:
        raise DegenerateInput("cannot normalize an empty series")
    lo, hi = float(v.min()), float(v.max())
    if hi <= lo:
        raise DegenerateInput("constant series has zero range; cannot normalize")
    return s.with_values((v - lo) / (hi - lo))


def modulo_mean_correct(s: SampleSeries) -> SampleSeries:
    """Replace each value v by v - (v mod m) where m is the series mean.

    Defined for non-negative inputs with positive mean (guaranteed after
    minmax_normalize); every output is a non-negative integer multiple of m.
    """
    v = s.values
    if len(s) == 0:
        raise DegenerateInput("cannot modulo-correct an empty series")
    if v.min() < 0:
        raise InputError("modulo_mean_correct requires non-negative values")
    m = float(v.mean())
    if m <= 0:
        raise DegenerateInput("series mean must be positive for modulo correction")
    return s.with_values(v - np.mod(v, m))


def butter_lowpass_coefficients(order_n: int, cutoff_wn: float) -> tuple[np.ndarray, np.ndarray]:
    """Digital low-pass Butterworth (b, a) of the given order.

    cutoff_wn is the -3 dB frequency as a fraction of Nyquist. Poles of the
    unit-cutoff analog prototype are frequency-warped, scaled, and mapped
    through the bilinear transform; the n zeros land at z = -1.
    """
    if order_n < 1:
        raise ConfigError(f"order must be >= 1, got {order_n}")
    if not 0.0 < cutoff_wn < 1.0:
        raise ConfigError(f"cutoff_wn must lie in (0, 1), got {cutoff_wn}")
    # Analog prototype: poles evenly spaced on the left unit semicircle.
    m = np.arange(-order_n + 1, order_n, 2)
    poles = -np.exp(1j * np.pi * m / (2 * order_n))
    gain = 1.0
    # Pre-warp so the discrete cutoff lands where requested (sample rate 2).
    fs = 2.0
    warped = 2.0 * fs * np.tan(np.pi * cutoff_wn / fs)
    poles = warped * poles
    gain *= warped**order_n
    # Bilinear transform.
    fs2 = 2.0 * fs
    z_digital = -np.ones(order_n)
    p_digital = (fs2 + poles) / (fs2 - poles)
    gain = gain * float(np.real(1.0 / np.prod(fs2 - poles)))
    b = gain * np.real(np.poly(z_digital))
    a = np.real(np.poly(p_digital))
    return b, a


def _lfilter_python(b: np.ndarray, a: np.ndarray, x: np.ndarray, zi: np.ndarray) -> np.ndarray:
    # Direct form II transposed; reference implementation for scipy-free installs.
    n_state = max(len(a), len(b)) - 1
    bb = np.zeros(n_state + 1)
    aa = np.zeros(n_state + 1)
    bb[: len(b)] = b
    aa[: len(a)] = a
    z = list(zi)
    y = np.empty_like(x)
    for i, xi in enumerate(x):
        yi = bb[0] * xi + z[0]
        for k in range(n_state - 1):
            z[k] = bb[k + 1] * xi + z[k + 1] - aa[k + 1] * yi
        z[n_state - 1] = bb[n_state] * xi - aa[n_state] * yi
        y[i] = yi
    return y


def single_pass_filter(
    b: np.ndarray, a: np.ndarray, x: np.ndarray, zi: np.ndarray | None = None
) -> np.ndarray:
    """Apply the recursion once, forward, from the given (or zero) state."""
    if zi is None:
        zi = np.zeros(max(len(a), len(b)) - 1)
    if _scipy_lfilter is not None:
        y, _ = _scipy_lfilter(b, a, x, zi=np.asarray(zi, dtype=np.float64))
        return y
    return _lfilter_python(np.asarray(b), np.asarray(a), np.asarray(x, dtype=np.float64), zi)


def _steady_state_zi(b: np.ndarray, a: np.ndarray) -> np.ndarray:
    # State that makes the filter already settled for a unit-step input,
    # i.e. the lfilter_zi construction: solve (I - A) zi = B.
    n = max(len(a), len(b))
    bb = np.zeros(n)
    aa = np.zeros(n)
    bb[: len(b)] = b
    aa[: len(a)] = a
    companion_t = np.zeros((n - 1, n - 1))
    companion_t[:, 0] = -aa[1:] / aa[0]
    companion_t[:-1, 1:] = np.eye(n - 2)
    rhs = bb[1:] - aa[1:] * bb[0]
    return np.linalg.solve(np.eye(n - 1) - companion_t, rhs)


def zero_phase_filter(b: np.ndarray, a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Forward-backward filtering with odd-reflection padding.

    Padding plus steady-state initial conditions suppress the start/end
    transients, which keeps the DC gain at exactly one.
    """
    x = np.asarray(x, dtype=np.float64)
    ntaps = max(len(a), len(b))
    edge = 3 * ntaps
    if x.size <= edge:
        raise DegenerateInput(
            f"need more than {edge} samples to zero-phase filter, got {x.size}"
        )
    ext = np.concatenate((2 * x[0] - x[edge:0:-1], x, 2 * x[-1] - x[-2 : -edge - 2 : -1]))
    zi = _steady_state_zi(b, a)
    y = single_pass_filter(b, a, ext, zi=zi * ext[0])
    y = single_pass_filter(b, a, y[::-1], zi=zi * y[-1])
    return y[::-1][edge:-edge]


def butterworth_lowpass(s: SampleSeries, cfg: FilterConfig | None = None) -> SampleSeries:
    """Zero-phase low-pass Butterworth of cfg.order_n at cfg.cutoff_wn."""
    cfg = cfg or FilterConfig()
    if len(s) <= 3 * cfg.order_n:
        raise DegenerateInput(
            f"series of length {len(s)} too short for order-{cfg.order_n} filtering"
        )
    b, a = butter_lowpass_coefficients(cfg.order_n, cfg.cutoff_wn)
    return s.with_values(zero_phase_filter(b, a, s.values))


#: Canonical step names emitted by preprocess_ppg, in order.
PREPROCESS_STEPS = ("mean-subtract", "concat", "detrend", "normalize", "mod-subtract", "filter")


def preprocess_ppg(
    records: Sequence[SampleSeries],
    cfg: FilterConfig | None = None,
    on_step: Callable[[str], None] | None = None,
) -> SampleSeries:
    """Run the full preprocessing pipeline over per-subject PPG records.

    Steps, in fixed order: per-record mean subtraction, concatenation,
    linear detrend, min-max normalization to [0,1], subtraction of the
    value-modulo-mean remainder, zero-phase Butterworth low-pass.
    """
    if not records:
        raise DegenerateInput("preprocess_ppg needs at least one record")
    rate = records[0].rate_hz
    emit = on_step or (lambda name: None)

    centered = []
    for i, rec in enumerate(records):
        if len(rec) == 0:
            raise DegenerateInput(f"record {i}: empty record")
        if rec.rate_hz != rate:
            raise InputError(f"record {i}: rate {rec.rate_hz} Hz differs from {rate} Hz")
        centered.append(rec.values - rec.values.mean())
    emit("mean-subtract")

    combined = SampleSeries(
        channel=Channel.PPG if records[0].channel == Channel.PPG else records[0].channel,
        rate_hz=rate,
        start_ms=records[0].start_ms,
        values=np.concatenate(centered),
    )
    emit("concat")

    try:
        combined = detrend(combined)
        emit("detrend")
        combined = minmax_normalize(combined)
        emit("normalize")
        combined = modulo_mean_correct(combined)
        emit("mod-subtract")
        combined = butterworth_lowpass(combined, cfg)
        emit("filter")
    except (DegenerateInput, InputError) as exc:
        raise type(exc)(f"preprocess_ppg over {len(records)} record(s): {exc}") from exc
    return combined


def derivative(s: SampleSeries, order: int = 1) -> SampleSeries:
    """Central finite differences scaled by the sampling rate; one-sided at the ends."""
    if order not in (1, 2):
        raise InputError(f"derivative order must be 1 or 2, got {order}")
    n = len(s)
    if n < order + 1:
        raise DegenerateInput(f"derivative of order {order} needs {order + 1} samples, got {n}")
    v = s.values
    r = s.rate_hz
    out = np.empty(n)
    if order == 1:
        out[1:-1] = (v[2:] - v[:-2]) * (r / 2.0)
        out[0] = (v[1] - v[0]) * r
        out[-1] = (v[-1] - v[-2]) * r
    else:
        if n >= 3:
            out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) * (r * r)
            out[0] = (v[2] - 2.0 * v[1] + v[0]) * (r * r)
            out[-1] = (v[-1] - 2.0 * v[-2] + v[-3]) * (r * r)
        else:  # n == 2 cannot support a second difference
            raise DegenerateInput("second derivative needs at least 3 samples")
    return s.with_values(out, channel=Channel.DERIVED)


def spectrum(s: SampleSeries) -> Spectrum:
    """One-sided magnitude spectrum of the mean-removed series."""
    n = len(s)
    if n < 8:
        raise DegenerateInput(f"spectrum needs at least 8 samples, got {n}")
    centered = s.values - s.values.mean()
    mags = np.abs(np.fft.rfft(centered))
    freqs = np.fft.rfftfreq(n, d=1.0 / s.rate_hz)
    return Spectrum(freqs_hz=freqs, magnitudes=mags)


def detect_peaks(s: SampleSeries, min_dist_s: float = 0.0, threshold_k: float = 0.5) -> list[int]:
    """Indices of strict local maxima above mean + threshold_k * std.

    Candidates closer than min_dist_s are thinned greedily, keeping the
    larger peak (earlier index wins ties).
    """
    v = s.values
    n = len(s)
    if n < 3:
        raise DegenerateInput(f"peak detection needs at least 3 samples, got {n}")
    threshold = v.mean() + threshold_k * v.std()
    core = (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:]) & (v[1:-1] > threshold)
    candidates = np.flatnonzero(core) + 1
    if candidates.size == 0 or min_dist_s <= 0:
        return [int(i) for i in candidates]
    min_gap = min_dist_s * s.rate_hz
    # Largest first; index order breaks amplitude ties deterministically.
    order = sorted(candidates, key=lambda i: (-v[i], i))
    kept: list[int] = []
    for idx in order:
        if all(abs(idx - j) >= min_gap for j in kept):
            kept.append(int(idx))
    return sorted(kept)
