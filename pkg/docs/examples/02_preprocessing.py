"""Peak normalization, silence removal and resampling on one recording.

Silence is detected with 25 ms RMS windows against a threshold relative to
the peak, and only runs longer than the minimum duration are cut, so short
pauses between words survive. The result is resampled to 8 kHz, where a
100 ms frame fits a 1024-point FFT.

Run:  python3 docs/examples/02_preprocessing.py
"""

import tempfile

import numpy as np

from creakml import PreprocessConfig, SyntheticCorpusSpec, generate_synthetic_corpus, preprocess, read_wav
from creakml.preprocess import peak_normalize, resample, trim_silence

corpus = generate_synthetic_corpus(SyntheticCorpusSpec(n_per_class=1, duration_s=10.0, seed=2),
                                   tempfile.mkdtemp())
raw = read_wav(corpus.manifest_path.parent / corpus.entries[1].path)
silence = sum(s.stop - s.start for s in corpus.segments[1] if s.kind == "silence")
print(f"raw: {raw.duration:.2f} s at {raw.sample_rate} Hz, {silence / raw.sample_rate:.2f} s annotated silence")

norm = peak_normalize(raw)
print(f"peak after normalization: {np.max(np.abs(norm.samples)):.3f}")

for threshold in (-30.0, -40.0, -50.0):
    trimmed = trim_silence(norm, threshold_db=threshold)
    print(f"trim at {threshold:.0f} dB: {trimmed.duration:.2f} s remain")

w8k = resample(trim_silence(norm), 8000)
print(f"resampled: {len(w8k)} samples at {w8k.sample_rate} Hz")

# preprocess() is the same chain in one call.
same = preprocess(raw, PreprocessConfig())
print("one-call chain matches:", np.array_equal(same.samples, w8k.samples))
