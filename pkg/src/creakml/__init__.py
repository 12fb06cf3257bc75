"""Classify continuous speech into low vs. high amount of creaky voice.

Pipeline: peak normalization and silence removal, frame-wise spectral
features summarized by statistical functionals, and classical classifiers
evaluated with leave-one-speaker-out cross-validation.
"""

from .corpus import (CreakLabel, LabeledSample, RecordingManifestEntry, SyntheticCorpusSpec,
                     balance_classes, binarize, generate_synthetic_corpus, load_manifest)
from .features import FeatureConfig, FeatureKind, extract
from .preprocess import PreprocessConfig, Waveform, preprocess, read_wav

__version__ = "0.1.0"

__all__ = [
    "CreakLabel", "FeatureConfig", "FeatureKind", "LabeledSample", "PreprocessConfig",
    "RecordingManifestEntry", "SyntheticCorpusSpec", "Waveform", "balance_classes", "binarize",
    "extract", "generate_synthetic_corpus", "load_manifest", "preprocess", "read_wav",
]
