"""Labeled recordings: manifest I/O, rating binarization, class balancing and
a deterministic synthetic creaky-speech corpus.

The manifest is a CSV file with the header ``path,speaker_id,rating_a,rating_b``.
Each row is one recording of one speaker rated by two listeners on a 0..4
Likert scale with 0.5 steps.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .preprocess import Waveform, write_wav

logger = logging.getLogger(__name__)

MANIFEST_HEADER = ("path", "speaker_id", "rating_a", "rating_b")
RATING_GRID = tuple(0.5 * k for k in range(9))
LABEL_THRESHOLD = 2.0


class ManifestError(ValueError):
    """Raised for unreadable or invalid manifest content."""


class CreakLabel(IntEnum):
    LOW = 0
    HIGH = 1


def _check_rating(value: float, where: str) -> float:
    if not math.isfinite(value) or not 0.0 <= value <= 4.0 or value * 2 != round(value * 2):
        raise ManifestError(f"{where}: rating {value!r} is not on the 0..4 grid with step 0.5")
    return float(value)


@dataclass(frozen=True)
class RecordingManifestEntry:
    path: str
    speaker_id: str
    rating_a: float
    rating_b: float

    def __post_init__(self):
        if not self.speaker_id:
            raise ManifestError(f"{self.path}: empty speaker_id")
        _check_rating(self.rating_a, self.speaker_id)
        _check_rating(self.rating_b, self.speaker_id)

    @property
    def mean_rating(self) -> float:
        return (self.rating_a + self.rating_b) / 2


@dataclass(frozen=True)
class LabeledSample:
    entry: RecordingManifestEntry
    mean_rating: float
    label: CreakLabel

    @property
    def speaker_id(self) -> str:
        return self.entry.speaker_id


def load_manifest(path) -> list[RecordingManifestEntry]:
    """Read a manifest CSV.

    Relative recording paths are resolved against the manifest's directory.
    Raises `ManifestError` for a bad header, malformed rows, off-grid ratings
    or a speaker that appears twice, and `FileNotFoundError` if the file is
    missing.
    """
    path = Path(path)
    base = path.parent
    entries: list[RecordingManifestEntry] = []
    seen: dict[str, int] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != MANIFEST_HEADER:
            raise ManifestError(f"{path}: expected header {','.join(MANIFEST_HEADER)}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 4:
                raise ManifestError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            rec_path, speaker, ra, rb = (cell.strip() for cell in row)
            try:
                rating_a, rating_b = float(ra), float(rb)
            except ValueError:
                raise ManifestError(f"{path}:{lineno}: non-numeric rating") from None
            where = f"{path}:{lineno}"
            _check_rating(rating_a, where)
            _check_rating(rating_b, where)
            if not speaker:
                raise ManifestError(f"{where}: empty speaker_id")
            if speaker in seen:
                raise ManifestError(f"{where}: duplicate speaker {speaker!r} (first on line {seen[speaker]})")
            seen[speaker] = lineno
            if not Path(rec_path).is_absolute():
                rec_path = str(base / rec_path)
            entries.append(RecordingManifestEntry(rec_path, speaker, rating_a, rating_b))
    return entries


def write_manifest(entries, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_HEADER)
        for e in entries:
            writer.writerow([e.path, e.speaker_id, f"{e.rating_a:.1f}", f"{e.rating_b:.1f}"])
    return path


def binarize(entry: RecordingManifestEntry) -> LabeledSample | None:
    """Low if the rater mean is below 2, High if above, None at exactly 2."""
    m = entry.mean_rating
    if m < LABEL_THRESHOLD:
        return LabeledSample(entry, m, CreakLabel.LOW)
    if m > LABEL_THRESHOLD:
        return LabeledSample(entry, m, CreakLabel.HIGH)
    return None


def binarize_all(entries) -> tuple[list[LabeledSample], int]:
    """Binarize every entry; returns the samples and the number excluded."""
    samples = []
    excluded = 0
    for e in entries:
        s = binarize(e)
        if s is None:
            excluded += 1
        else:
            samples.append(s)
    if excluded:
        logger.info("excluded %d recording(s) with mean rating exactly %.1f", excluded, LABEL_THRESHOLD)
    return samples, excluded


def balance_classes(samples, seed: int) -> list[LabeledSample]:
    """Downsample the majority class to the size of the minority class.

    The dropped samples are picked uniformly without replacement from a
    generator seeded with `seed`. Surviving samples keep their input order.
    """
    samples = list(samples)
    low = [i for i, s in enumerate(samples) if s.label == CreakLabel.LOW]
    high = [i for i, s in enumerate(samples) if s.label == CreakLabel.HIGH]
    if not low or not high:
        raise ValueError(f"cannot balance: {len(low)} Low and {len(high)} High samples")
    n = min(len(low), len(high))
    rng = np.random.default_rng(seed)
    keep = set(low) | set(high)
    for group in (low, high):
        if len(group) > n:
            dropped = rng.choice(group, size=len(group) - n, replace=False)
            keep.difference_update(int(i) for i in dropped)
    return [s for i, s in enumerate(samples) if i in keep]


# ---------------------------------------------------------------------------
# Synthetic corpus
# ---------------------------------------------------------------------------

FORMANTS_HZ = (500.0, 1500.0, 2500.0, 3500.0)
BANDWIDTHS_HZ = (80.0, 120.0, 160.0, 200.0)
MODAL_F0_HZ = (180.0, 220.0)
MODAL_JITTER = 0.02
CREAK_F0_HZ = (40.0, 70.0)
CREAK_JITTER = 0.20
CREAK_AMPLITUDE = 0.7
SILENCE_S = (0.3, 0.8)
SENTENCE_S = (1.5, 3.5)
NOISE_FLOOR = 1e-4


@dataclass(frozen=True)
class SyntheticCorpusSpec:
    n_per_class: int = 45
    sample_rate: int = 16000
    duration_s: float = 20.0
    creak_fraction_low: tuple[float, float] = (0.0, 0.2)
    creak_fraction_high: tuple[float, float] = (0.5, 0.9)
    seed: int = 7

    def __post_init__(self):
        if self.n_per_class < 1:
            raise ValueError("n_per_class must be at least 1")
        if self.sample_rate < 8000:
            raise ValueError("sample_rate must be at least 8000 Hz")
        if self.duration_s < 2 * SENTENCE_S[0]:
            raise ValueError(f"duration_s must be at least {2 * SENTENCE_S[0]} s")
        lo, hi = self.creak_fraction_low, self.creak_fraction_high
        for name, (a, b) in (("low", lo), ("high", hi)):
            if not 0.0 <= a <= b <= 1.0:
                raise ValueError(f"creak_fraction_{name} must be an interval within [0, 1]")
        if not lo[1] < hi[0]:
            raise ValueError("creak fraction intervals must satisfy low.max < high.min")


@dataclass(frozen=True)
class Segment:
    start: int
    stop: int
    kind: str  # "modal", "creak" or "silence"


@dataclass
class SyntheticCorpus:
    manifest_path: Path
    entries: list[RecordingManifestEntry]
    intended: list[CreakLabel]
    creak_fractions: list[float]
    segments: list[list[Segment]] = field(repr=False)


def rosenberg_pulse(n: int, open_frac: float = 0.4, close_frac: float = 0.16) -> np.ndarray:
    """One period (n samples) of a Rosenberg glottal flow pulse."""
    t = np.arange(n) / n
    tp, tn = open_frac, close_frac
    g = np.zeros(n)
    rise = t <= tp
    g[rise] = 0.5 * (1 - np.cos(np.pi * t[rise] / tp))
    fall = (t > tp) & (t <= tp + tn)
    g[fall] = np.cos(0.5 * np.pi * (t[fall] - tp) / tn)
    return g


def formant_filter(sample_rate: int) -> np.ndarray:
    """Denominator coefficients of the fixed 4-formant all-pole filter."""
    a = np.array([1.0])
    for f, bw in zip(FORMANTS_HZ, BANDWIDTHS_HZ):
        r = math.exp(-math.pi * bw / sample_rate)
        theta = 2 * math.pi * f / sample_rate
        a = np.convolve(a, [1.0, -2 * r * math.cos(theta), r * r])
    return a


def _pulse_train(n: int, sr: int, rng, n_modal: int) -> tuple[np.ndarray, int]:
    """Glottal flow derivative for `n` samples: modal pulses, then creaky ones.

    Phonation switches at the first pulse boundary at or after `n_modal`, so
    the flow stays continuous; returns the source and the switch position.
    """
    out = np.zeros(n + sr // 20)
    f0_modal = rng.uniform(*MODAL_F0_HZ)
    f0_creak = rng.uniform(*CREAK_F0_HZ)
    pos, switch = 0, n
    while pos < n:
        creak = pos >= n_modal
        if creak and switch == n:
            switch = pos
        f0, jitter, amp = ((f0_creak, CREAK_JITTER, CREAK_AMPLITUDE) if creak
                           else (f0_modal, MODAL_JITTER, 1.0))
        period = max(2, int(round(sr / f0 * (1 + rng.uniform(-jitter, jitter)))))
        out[pos:pos + period] += amp * rosenberg_pulse(period)
        pos += period
    # radiation at the lips: first difference of the flow
    return np.diff(out[: n + 1]), switch


def _render_sentence(n: int, sr: int, rng, creak_fraction: float, a: np.ndarray):
    n_creak = int(round(creak_fraction * n))
    source, n_modal = _pulse_train(n, sr, rng, n - n_creak)
    speech = lfilter([1.0], a, source)
    ramp = min(int(0.02 * sr), n // 4)
    env = np.ones(n)
    if ramp:
        env[:ramp] = np.linspace(0, 1, ramp)
        env[-ramp:] = np.linspace(1, 0, ramp)
    return speech * env, n_modal


def likert_ratings(f: float, spec: SyntheticCorpusSpec) -> tuple[float, float]:
    """Map a creak fraction monotonically onto two grid ratings.

    Fractions at or below the midpoint between the class intervals map below
    2, the rest above 2, so that `binarize` recovers the intended class.
    """
    cut = (spec.creak_fraction_low[1] + spec.creak_fraction_high[0]) / 2
    if f <= cut:
        score = 2.0 * f / cut if cut > 0 else 0.0
        lo, hi = 0.0, 1.5
    else:
        score = 2.0 + 2.0 * (f - cut) / (1.0 - cut)
        lo, hi = 2.5, 4.0
    a = min(max(math.floor(score * 2) / 2, lo), hi)
    b = min(max(math.ceil(score * 2) / 2, lo), hi)
    return a, b


def synthesize_recording(spec: SyntheticCorpusSpec, creak_fraction: float, rng):
    """Render one recording; returns the waveform and its segment annotation."""
    sr = spec.sample_rate
    total = int(round(spec.duration_s * sr))
    a = formant_filter(sr)
    x = np.zeros(total)
    segments: list[Segment] = []
    pos = int(round(rng.uniform(*SILENCE_S) * sr))
    segments.append(Segment(0, pos, "silence"))
    while True:
        n = int(round(rng.uniform(*SENTENCE_S) * sr))
        gap = int(round(rng.uniform(*SILENCE_S) * sr))
        room = total - pos - int(SILENCE_S[0] * sr)
        if n > room:
            if len(segments) > 1:
                break
            n = room  # every recording gets at least one (shortened) sentence
        speech, n_modal = _render_sentence(n, sr, rng, creak_fraction, a)
        x[pos:pos + n] = speech
        segments.append(Segment(pos, pos + n_modal, "modal"))
        if n_modal < n:
            segments.append(Segment(pos + n_modal, pos + n, "creak"))
        pos += n
        end = min(pos + gap, total)
        segments.append(Segment(pos, end, "silence"))
        pos = end
    if pos < total:
        segments.append(Segment(pos, total, "silence"))
    x = 0.8 * x / np.max(np.abs(x))
    x += NOISE_FLOOR * rng.standard_normal(total)
    return Waveform(np.clip(x, -1.0, 1.0), sr), segments


def generate_synthetic_corpus(spec: SyntheticCorpusSpec, out_dir) -> SyntheticCorpus:
    """Write ``2 * n_per_class`` WAV files, ``manifest.csv`` and ``annotations.json``.

    Recording ``i`` draws everything from ``default_rng([seed, i])`` so the
    output is byte-identical across runs with the same spec.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n_total = 2 * spec.n_per_class
    entries, intended, fractions, all_segments = [], [], [], []
    for i in range(n_total):
        label = CreakLabel.LOW if i % 2 == 0 else CreakLabel.HIGH
        interval = spec.creak_fraction_low if label == CreakLabel.LOW else spec.creak_fraction_high
        rng = np.random.default_rng([spec.seed, i])
        f = float(rng.uniform(*interval))
        wave, segments = synthesize_recording(spec, f, rng)
        name = f"spk{i + 1:03d}.wav"
        write_wav(out_dir / name, wave)
        ra, rb = likert_ratings(f, spec)
        entries.append(RecordingManifestEntry(name, f"S{i + 1:03d}", ra, rb))
        intended.append(label)
        fractions.append(f)
        all_segments.append(segments)
    manifest = write_manifest(entries, out_dir / "manifest.csv")
    annotations = {
        e.speaker_id: {
            "path": e.path,
            "creak_fraction": f,
            "label": lab.name,
            "segments": [[s.start, s.stop, s.kind] for s in segs],
        }
        for e, f, lab, segs in zip(entries, fractions, intended, all_segments)
    }
    (out_dir / "annotations.json").write_text(json.dumps(annotations, indent=1) + "\n")
    logger.info("wrote %d recordings and %s", n_total, manifest)
    return SyntheticCorpus(manifest, load_manifest(manifest), intended, fractions, all_segments)
