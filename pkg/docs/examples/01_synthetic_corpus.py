"""Generate a small synthetic corpus and look at what was written.

Each recording alternates modal sentences with short pauses. A fraction of
every sentence (the tail) is rendered with creaky phonation: a slow,
irregular pulse train around 40-70 Hz instead of 180-220 Hz. Low-creak
speakers get a small fraction, high-creak speakers a large one, and the two
listener ratings are derived from that fraction.

Run:  python3 docs/examples/01_synthetic_corpus.py [OUTDIR]
"""

import sys
import tempfile
from pathlib import Path

import numpy as np

from creakml import SyntheticCorpusSpec, balance_classes, generate_synthetic_corpus
from creakml.corpus import binarize_all
from creakml.preprocess import read_wav

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp()) / "corpus"
spec = SyntheticCorpusSpec(n_per_class=4, duration_s=8.0, seed=11)
corpus = generate_synthetic_corpus(spec, out)
print(f"wrote {len(corpus.entries)} recordings to {out}")

print("\nspeaker  creak%  ratings   label")
for entry, f, label in zip(corpus.entries, corpus.creak_fractions, corpus.intended):
    print(f"{entry.speaker_id}    {100 * f:5.1f}   {entry.rating_a:.1f} {entry.rating_b:.1f}   {label.name}")

# The manifest is all the rest of the pipeline needs.
samples, dropped = binarize_all(corpus.entries)
balanced = balance_classes(samples, seed=0)
print(f"\n{len(samples)} labelled, {dropped} ambiguous, {len(balanced)} after balancing")

# How much of the first high-creak recording is actually creaky?
first_high = corpus.intended.index(max(corpus.intended))
w = read_wav(out / corpus.entries[first_high].path)
segs = corpus.segments[first_high]
creak = sum(s.stop - s.start for s in segs if s.kind == "creak")
speech = sum(s.stop - s.start for s in segs if s.kind != "silence")
print(f"{corpus.entries[first_high].path}: {w.duration:.1f} s, "
      f"{100 * creak / speech:.0f}% of voiced samples creaky, peak {np.max(np.abs(w.samples)):.2f}")
