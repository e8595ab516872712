"""Shape diagnostics for inversion curves: envelopes, revival lobes, local frequency."""

from __future__ import annotations

import numpy as np
from scipy.ndimage import uniform_filter1d
from scipy.signal import find_peaks

__all__ = ["envelope", "revival_lobes", "local_frequency", "peak_to_peak"]


def _window(times, width):
    dt = times[1] - times[0]
    if not np.allclose(np.diff(times), dt, rtol=1e-9, atol=0):
        raise ValueError("envelope needs a uniform time grid")
    return max(3, int(round(width / dt)) | 1)


def envelope(times, values, width=1.0):
    """Windowed RMS of ``values`` about their moving average."""
    times, values = np.asarray(times), np.asarray(values)
    n = _window(times, width)
    resid = values - uniform_filter1d(values, n, mode="nearest")
    return np.sqrt(np.maximum(uniform_filter1d(resid**2, n, mode="nearest"), 0.0))


def revival_lobes(times, values, width=1.0, collapse_ratio=0.1, factor=3.0):
    """Locate the initial collapse and the lobes that rise out of it.

    The collapse is the first local minimum of the envelope that sits below
    ``collapse_ratio`` times the envelope maximum reached before it; the
    collapsed floor is the mean envelope over one window centred there.
    Lobes are maximal runs after that minimum where the envelope exceeds
    ``factor * floor`` for at least one window width.

    Returns
    -------
    dict with ``floor``, ``t_floor``, ``threshold``, ``lobes`` (list of
    ``(t_start, t_end, peak)``) and the envelope itself.
    """
    times = np.asarray(times)
    env = envelope(times, values, width)
    troughs, _ = find_peaks(-env)
    running_max = np.maximum.accumulate(env)
    floor_idx = next(
        (i for i in troughs if env[i] < collapse_ratio * running_max[i]), None
    )
    if floor_idx is None:
        return {"floor": None, "t_floor": None, "threshold": None, "lobes": [], "envelope": env}
    half = _window(times, width) // 2
    floor = float(env[max(0, floor_idx - half): floor_idx + half + 1].mean())
    threshold = factor * floor
    above = env[floor_idx:] > threshold
    lobes = []
    edges = np.flatnonzero(np.diff(np.concatenate([[0], above.astype(int), [0]])))
    min_len = width / (times[1] - times[0])
    for start, stop in zip(edges[::2], edges[1::2]):
        if stop - start >= min_len:
            seg = slice(floor_idx + start, floor_idx + stop)
            lobes.append((times[seg][0], times[seg][-1], float(env[seg].max())))
    return {
        "floor": float(floor),
        "t_floor": float(times[floor_idx]),
        "threshold": float(threshold),
        "lobes": lobes,
        "envelope": env,
    }


def local_frequency(times, values):
    """Oscillation frequency from spacings of successive maxima.

    Returns ``(t_mid, freq)`` with ``freq`` in cycles per unit time.
    """
    times = np.asarray(times)
    peaks, _ = find_peaks(np.asarray(values))
    tp = times[peaks]
    return 0.5 * (tp[1:] + tp[:-1]), 1.0 / np.diff(tp)


def peak_to_peak(times, values, t_lo, t_hi):
    sel = (np.asarray(times) >= t_lo) & (np.asarray(times) <= t_hi)
    v = np.asarray(values)[sel]
    return float(v.max() - v.min())
