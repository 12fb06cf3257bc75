"""Frame-wise spectral features and their statistical-functional summaries.

Three per-frame representations are supported:

* ``spectrogram``  -- log amplitude spectrum, 513 bins
* ``melspectrogram`` -- 128-channel log-mel energies in dB
* ``mfcc`` -- 13 cepstral coefficients (0th dropped) with deltas, 39 values

Each frame matrix is collapsed into one vector per recording by eight
functionals (mean, std, median, skewness, kurtosis, min, max, range), giving
4104, 1024 and 312 values respectively.

Functions that act on a frame accept either a single frame or a stack of
frames along the leading axes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.fft import dct

from .preprocess import Waveform

LOG_FLOOR = 1e-10
FUNCTIONALS = ("mean", "std", "median", "skewness", "kurtosis", "min", "max", "range")


class FeatureKind(str, Enum):
    SPECTROGRAM = "spectrogram"
    MELSPECTROGRAM = "melspectrogram"
    MFCC = "mfcc"

    @property
    def label(self) -> str:
        return {"spectrogram": "Spectrogram", "melspectrogram": "Mel-spectrogram", "mfcc": "MFCCs"}[self.value]


@dataclass(frozen=True)
class FeatureConfig:
    frame_length_ms: float = 100.0
    frame_shift_ms: float = 5.0
    fft_size: int = 1024
    n_mels: int = 128
    n_mfcc: int = 13
    delta_window: int = 9

    def __post_init__(self):
        if self.n_mels < self.n_mfcc + 1:
            raise ValueError("n_mels must be at least n_mfcc + 1")
        if self.delta_window < 3 or self.delta_window % 2 == 0:
            raise ValueError("delta_window must be odd and >= 3")

    def frame_samples(self, rate: int) -> tuple[int, int]:
        length = int(round(self.frame_length_ms * rate / 1000))
        hop = int(round(self.frame_shift_ms * rate / 1000))
        if length > self.fft_size:
            raise ValueError(
                f"frame of {length} samples at {rate} Hz does not fit a {self.fft_size}-point FFT")
        return length, max(hop, 1)

    def frame_dim(self, kind: FeatureKind) -> int:
        kind = FeatureKind(kind)
        if kind is FeatureKind.SPECTROGRAM:
            return self.fft_size // 2 + 1
        if kind is FeatureKind.MELSPECTROGRAM:
            return self.n_mels
        return 3 * self.n_mfcc

    def vector_dim(self, kind: FeatureKind) -> int:
        return len(FUNCTIONALS) * self.frame_dim(kind)

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class FrameMatrix:
    frames: np.ndarray  # T x D
    kind: FeatureKind


@dataclass(frozen=True)
class SampleFeatureVector:
    values: np.ndarray
    kind: FeatureKind


def frame_signal(w: Waveform, cfg: FeatureConfig = FeatureConfig()) -> np.ndarray:
    """Split into overlapping frames without padding; returns a T x L view."""
    length, hop = cfg.frame_samples(w.sample_rate)
    if len(w) < length:
        raise ValueError(
            f"signal of {len(w)} samples is shorter than one frame ({length} samples)")
    return sliding_window_view(w.samples, length)[::hop]


@lru_cache(maxsize=8)
def _hamming(n: int) -> np.ndarray:
    w = np.hamming(n)
    w.setflags(write=False)
    return w


def _spectrum(frames: np.ndarray, cfg: FeatureConfig) -> np.ndarray:
    frames = np.asarray(frames, dtype=np.float64)
    n = frames.shape[-1]
    if n > cfg.fft_size:
        raise ValueError(f"frame of {n} samples exceeds fft_size {cfg.fft_size}")
    return np.fft.rfft(frames * _hamming(n), n=cfg.fft_size)


def amplitude_spectrum(frames, cfg: FeatureConfig = FeatureConfig()) -> np.ndarray:
    return np.abs(_spectrum(frames, cfg))


def log_amplitude_spectrum(frames, cfg: FeatureConfig = FeatureConfig()) -> np.ndarray:
    return np.log(amplitude_spectrum(frames, cfg) + LOG_FLOOR)


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@lru_cache(maxsize=8)
def _mel_filterbank(n_mels: int, fft_size: int, sample_rate: int) -> np.ndarray:
    edges = mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate / 2), n_mels + 2))
    bins = np.arange(fft_size // 2 + 1) * sample_rate / fft_size
    left, center, right = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    up = (bins - left) / (center - left)
    down = (right - bins) / (right - center)
    fb = np.maximum(0.0, np.minimum(up, down))
    fb.setflags(write=False)
    return fb


def mel_filterbank(cfg: FeatureConfig = FeatureConfig(), sample_rate: int = 8000) -> np.ndarray:
    """``n_mels x (fft_size/2 + 1)`` unit-peak triangular filters.

    Centers are equally spaced in mel between 0 Hz and Nyquist; each filter
    rises from the previous center and falls to the next one.
    """
    return _mel_filterbank(cfg.n_mels, cfg.fft_size, int(sample_rate))


def log_mel_spectrogram(frames, cfg: FeatureConfig = FeatureConfig(), sample_rate: int = 8000) -> np.ndarray:
    power = amplitude_spectrum(frames, cfg) ** 2
    energy = power @ mel_filterbank(cfg, sample_rate).T
    return 10.0 * np.log10(energy + LOG_FLOOR)


def cepstrum(log_mel: np.ndarray, cfg: FeatureConfig = FeatureConfig()) -> np.ndarray:
    """Orthonormal DCT-II of log-mel values, keeping coefficients 1..n_mfcc."""
    return dct(np.asarray(log_mel, dtype=np.float64), type=2, norm="ortho", axis=-1)[..., 1:cfg.n_mfcc + 1]


def mfcc(frames, cfg: FeatureConfig = FeatureConfig(), sample_rate: int = 8000) -> np.ndarray:
    return cepstrum(log_mel_spectrogram(frames, cfg, sample_rate), cfg)


def deltas(track: np.ndarray, window: int = 9) -> np.ndarray:
    """Regression deltas along axis 0 with edge replication.

    ``d_t = sum_{n=1..N} n (c_{t+n} - c_{t-n}) / (2 sum n^2)`` with
    ``N = window // 2``.
    """
    track = np.asarray(track, dtype=np.float64)
    half = window // 2
    padded = np.pad(track, [(half, half)] + [(0, 0)] * (track.ndim - 1), mode="edge")
    t = track.shape[0]
    out = np.zeros_like(track)
    for n in range(1, half + 1):
        out += n * (padded[half + n:half + n + t] - padded[half - n:half - n + t])
    return out / (2 * sum(n * n for n in range(1, half + 1)))


def append_deltas(coeffs: np.ndarray, window: int = 9) -> np.ndarray:
    """T x K -> T x 3K as [static, delta, delta-delta]."""
    d1 = deltas(coeffs, window)
    d2 = deltas(d1, window)
    return np.concatenate([coeffs, d1, d2], axis=1)


def apply_functionals(frames) -> np.ndarray:
    """Eight per-column statistics of a T x D matrix, concatenated functional-major.

    Moments are population moments; kurtosis is excess kurtosis. A constant
    column gets skewness and kurtosis 0.
    """
    m = np.asarray(frames.frames if isinstance(frames, FrameMatrix) else frames, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1:
        raise ValueError("expected a non-empty T x D matrix")
    mean = m.mean(axis=0)
    dev = m - mean
    m2 = np.mean(dev ** 2, axis=0)
    m3 = np.mean(dev ** 3, axis=0)
    m4 = np.mean(dev ** 4, axis=0)
    lo, hi = m.min(axis=0), m.max(axis=0)
    flat = hi == lo
    safe = np.where(flat, 1.0, m2)
    skew = np.where(flat, 0.0, m3 / safe ** 1.5)
    kurt = np.where(flat, 0.0, m4 / safe ** 2 - 3.0)
    std = np.where(flat, 0.0, np.sqrt(m2))
    return np.concatenate([mean, std, np.median(m, axis=0), skew, kurt, lo, hi, hi - lo])


def frame_features(w: Waveform, kind, cfg: FeatureConfig = FeatureConfig()) -> FrameMatrix:
    kind = FeatureKind(kind)
    frames = frame_signal(w, cfg)
    if kind is FeatureKind.SPECTROGRAM:
        m = log_amplitude_spectrum(frames, cfg)
    elif kind is FeatureKind.MELSPECTROGRAM:
        m = log_mel_spectrogram(frames, cfg, w.sample_rate)
    else:
        m = append_deltas(mfcc(frames, cfg, w.sample_rate), cfg.delta_window)
    return FrameMatrix(m, kind)


def extract(w: Waveform, kind, cfg: FeatureConfig = FeatureConfig()) -> SampleFeatureVector:
    """Waveform at the working rate -> one functional-aggregated vector."""
    fm = frame_features(w, kind, cfg)
    values = apply_functionals(fm)
    if values.shape != (cfg.vector_dim(fm.kind),) or not np.all(np.isfinite(values)):
        raise ValueError(f"{fm.kind.value}: feature vector violates its dimension/finiteness contract")
    return SampleFeatureVector(values, fm.kind)


def extract_all(w: Waveform, kinds, cfg: FeatureConfig = FeatureConfig()) -> dict:
    """Extract several kinds, sharing the framing and FFT."""
    kinds = [FeatureKind(k) for k in kinds]
    frames = frame_signal(w, cfg)
    power_needed = any(k is not FeatureKind.SPECTROGRAM for k in kinds)
    amp = amplitude_spectrum(frames, cfg)
    out = {}
    if FeatureKind.SPECTROGRAM in kinds:
        out[FeatureKind.SPECTROGRAM] = np.log(amp + LOG_FLOOR)
    if power_needed:
        logmel = 10.0 * np.log10((amp ** 2) @ mel_filterbank(cfg, w.sample_rate).T + LOG_FLOOR)
        if FeatureKind.MELSPECTROGRAM in kinds:
            out[FeatureKind.MELSPECTROGRAM] = logmel
        if FeatureKind.MFCC in kinds:
            out[FeatureKind.MFCC] = append_deltas(cepstrum(logmel, cfg), cfg.delta_window)
    result = {}
    for k in kinds:
        values = apply_functionals(out[k])
        if values.shape != (cfg.vector_dim(k),) or not np.all(np.isfinite(values)):
            raise ValueError(f"{k.value}: feature vector violates its dimension/finiteness contract")
        result[k] = SampleFeatureVector(values, k)
    return result
