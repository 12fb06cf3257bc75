"""The three feature representations, from frames to fixed-length vectors.

Frames are 100 ms long with a 5 ms hop. Each frame gives a 513-bin log
amplitude spectrum, 128 log-mel energies, or 13 MFCCs with
delta and delta-delta tracks.
Eight statistical functionals over time then turn the frame matrix into one
vector per recording, whatever its length.

Run:  python3 docs/examples/03_features.py
"""

import numpy as np

from creakml import FeatureKind, Waveform, extract
from creakml.features import frame_features, frame_signal

rate = 8000
t = np.arange(3 * rate) / rate
rng = np.random.default_rng(0)
# 200 Hz harmonic tone for 1.5 s, then 50 Hz pulses: a crude modal -> creak switch
modal = sum(np.sin(2 * np.pi * 200 * k * t) / k for k in range(1, 10))
pulses = (np.arange(len(t)) % (rate // 50) == 0).astype(float)
creak = np.convolve(pulses, np.hanning(40), mode="same")
x = np.where(t < 1.5, modal, 3 * creak) + 0.01 * rng.standard_normal(len(t))
w = Waveform(x / np.max(np.abs(x)), rate)

print(f"{len(w)} samples -> {frame_signal(w).shape[0]} frames of {frame_signal(w).shape[1]} samples")
for kind in FeatureKind:
    frames = frame_features(w, kind).frames
    vec = extract(w, kind).values
    print(f"{kind.value:15s} frames {frames.shape}, vector {vec.shape}")

# The functionals are eight blocks: mean, std, median, skewness, kurtosis, min, max, range.
mfcc = extract(w, FeatureKind.MFCC).values.reshape(8, 39)
print("\nc1 (spectral tilt) statistics:")
for name, row in zip(["mean", "std", "median", "skew", "kurt", "min", "max", "range"], mfcc):
    print(f"  {name:6s} {row[0]:8.2f}")

# The modal and creaky halves differ clearly in the low cepstral coefficients.
track = frame_features(w, FeatureKind.MFCC).frames
half = track.shape[0] // 2
print("\nmean c1..c4, modal half:", np.round(track[:half, :4].mean(axis=0), 1))
print("mean c1..c4, creak half:", np.round(track[half:, :4].mean(axis=0), 1))
