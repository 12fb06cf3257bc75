"""Waveform container, WAV I/O and the pre-processing chain
(peak normalization -> silence removal -> resampling)."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

DEFAULT_THRESHOLD_DB = -40.0
DEFAULT_MIN_SILENCE_S = 0.2
WORKING_RATE = 8000

RMS_WINDOW_S = 0.025
RMS_HOP_S = 0.010


@dataclass(frozen=True)
class Waveform:
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))
        if self.samples.ndim != 1:
            raise ValueError("Waveform must be mono (1-D)")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


def read_wav(path) -> Waveform:
    """Read a mono WAV file into floats in [-1, 1]. Stereo input is averaged."""
    rate, data = wavfile.read(path)
    if data.dtype == np.int16:
        x = data / 32768.0
    elif data.dtype == np.int32:
        x = data / 2147483648.0
    elif data.dtype == np.uint8:
        x = (data.astype(np.float64) - 128.0) / 128.0
    else:
        x = data.astype(np.float64)
    if x.ndim == 2:
        x = x.mean(axis=1)
    return Waveform(x, int(rate))


def write_wav(path, w: Waveform) -> None:
    """Write 16-bit PCM mono."""
    pcm = np.round(np.clip(w.samples, -1.0, 1.0) * 32767.0).astype(np.int16)
    wavfile.write(path, w.sample_rate, pcm)


def peak_normalize(w: Waveform) -> Waveform:
    peak = np.max(np.abs(w.samples)) if len(w) else 0.0
    if peak == 0:
        raise ValueError("cannot peak-normalize an all-zero waveform")
    return Waveform(w.samples / peak, w.sample_rate)


def _silent_windows(x: np.ndarray, rate: int, threshold_db: float):
    win = max(1, int(round(RMS_WINDOW_S * rate)))
    hop = max(1, int(round(RMS_HOP_S * rate)))
    if len(x) <= win:
        starts = np.array([0])
        win = len(x)
    else:
        starts = np.arange(0, len(x) - win + 1, hop)
    csum = np.concatenate([[0.0], np.cumsum(x * x)])
    rms = np.sqrt(np.maximum(csum[starts + win] - csum[starts], 0.0) / win)
    level = np.max(np.abs(x)) * 10.0 ** (threshold_db / 20.0)
    return starts, win, rms < level


def trim_silence(w: Waveform, threshold_db: float = DEFAULT_THRESHOLD_DB,
                 min_silence_s: float = DEFAULT_MIN_SILENCE_S) -> Waveform:
    """Delete stretches of silence lasting at least `min_silence_s`.

    Short-time RMS is measured in 25 ms windows every 10 ms. A window is
    silent when its RMS is below `threshold_db` relative to the signal peak.
    Each maximal run of silent windows covers the samples from the start of
    its first window to the end of its last one; runs covering at least
    `min_silence_s` are cut out and the rest is concatenated in order.
    """
    if threshold_db >= 0:
        raise ValueError("threshold_db must be negative")
    if min_silence_s <= 0:
        raise ValueError("min_silence_s must be positive")
    x = w.samples
    if not np.any(x):
        raise ValueError("entire signal is below the silence threshold")
    starts, win, silent = _silent_windows(x, w.sample_rate, threshold_db)
    if silent.all():
        raise ValueError("entire signal is below the silence threshold")
    keep = np.ones(len(x), dtype=bool)
    min_len = min_silence_s * w.sample_rate
    # run boundaries of the silent mask
    edges = np.diff(np.concatenate([[0], silent.astype(np.int8), [0]]))
    for a, b in zip(np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)):
        lo, hi = starts[a], starts[b - 1] + win
        if hi - lo >= min_len:
            keep[lo:hi] = False
    if keep.all():
        return w
    return Waveform(x[keep], w.sample_rate)


def resample(w: Waveform, target_rate: int) -> Waveform:
    """Polyphase resampling with a Kaiser-windowed sinc (beta 8, about 80 dB stopband).

    The output has ``round(len * target / source)`` samples.
    """
    target_rate = int(target_rate)
    if target_rate <= 0:
        raise ValueError("target_rate must be positive")
    if target_rate == w.sample_rate:
        return Waveform(w.samples.copy(), target_rate)
    g = gcd(w.sample_rate, target_rate)
    up, down = target_rate // g, w.sample_rate // g
    y = resample_poly(w.samples, up, down, window=("kaiser", 8.0))
    n_out = int(round(len(w) * target_rate / w.sample_rate))
    if len(y) >= n_out:
        y = y[:n_out]
    else:
        y = np.concatenate([y, np.zeros(n_out - len(y))])
    return Waveform(y, target_rate)


@dataclass(frozen=True)
class PreprocessConfig:
    threshold_db: float = DEFAULT_THRESHOLD_DB
    min_silence_s: float = DEFAULT_MIN_SILENCE_S
    target_rate: int = WORKING_RATE


def preprocess(w: Waveform, cfg: PreprocessConfig = PreprocessConfig()) -> Waveform:
    """normalize -> trim -> resample."""
    w = peak_normalize(w)
    w = trim_silence(w, cfg.threshold_db, cfg.min_silence_s)
    return resample(w, cfg.target_rate)
