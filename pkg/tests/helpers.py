"""Shared builders for synthetic windows and bundles used across test modules."""

import numpy as np

from homevitals.signals import (
    Channel,
    ChannelBundle,
    IbiSeries,
    SampleSeries,
    WindowSpec,
    make_windows,
)


def make_bundle(
    duration_s=90.0,
    subject="S00",
    eda=None,
    bvp=None,
    st=None,
    ibi_pairs=None,
    start_ms=0,
):
    """Bundle with given channel arrays, or neutral constants when omitted."""
    n4 = int(round(duration_s * 4))
    n64 = int(round(duration_s * 64))
    if eda is None:
        eda = np.full(n4, 2.0)
    if bvp is None:
        bvp = np.zeros(n64)
    if st is None:
        st = np.full(n4, 33.0)
    if ibi_pairs is None:
        ibi_pairs = [(start_ms + int(t * 1000), 0.8) for t in np.arange(0.4, duration_s, 0.8)]
    return ChannelBundle(
        subject_id=subject,
        eda=SampleSeries(Channel.EDA, 4.0, start_ms, eda),
        bvp=SampleSeries(Channel.BVP, 64.0, start_ms, bvp),
        st=SampleSeries(Channel.ST, 4.0, start_ms, st),
        ibi=IbiSeries.from_pairs(ibi_pairs),
        session_start_ms=start_ms,
    )


def single_window(**kwargs):
    bundle = make_bundle(**kwargs)
    return make_windows(bundle, WindowSpec(90.0, 45.0))[0]


def pulse_wave(duration_s, rate_hz, freq_hz, sharpness=4.0, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    t = np.arange(int(duration_s * rate_hz)) / rate_hz
    v = np.exp(sharpness * (np.cos(2 * np.pi * freq_hz * t) - 1))
    if noise:
        v = v + noise * rng.normal(size=t.size)
    return v
