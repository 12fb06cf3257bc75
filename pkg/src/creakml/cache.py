"""On-disk feature cache: one ``.npz`` per (recording, feature kind, config)."""

from __future__ import annotations

import hashlib
import os
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .features import FeatureConfig, FeatureKind
from .preprocess import PreprocessConfig

CACHE_ENV = "CREAKML_CACHE_DIR"


def config_hash(fcfg: FeatureConfig, pcfg: PreprocessConfig) -> str:
    blob = repr((sorted(asdict(fcfg).items()), sorted(asdict(pcfg).items()))).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def resolve_cache_dir(default) -> Path:
    return Path(os.environ.get(CACHE_ENV) or default)


class FeatureCache:
    def __init__(self, root, fcfg: FeatureConfig, pcfg: PreprocessConfig):
        self.root = Path(root)
        self.chash = config_hash(fcfg, pcfg)

    def _file(self, recording, kind: FeatureKind) -> Path:
        path = Path(recording).resolve()
        st = path.stat()
        # size and mtime make a rewritten recording miss the cache
        key = f"{path}|{st.st_size}|{st.st_mtime_ns}|{FeatureKind(kind).value}|{self.chash}"
        digest = hashlib.sha256(key.encode()).hexdigest()[:24]
        return self.root / f"{FeatureKind(kind).value}-{digest}.npz"

    def get(self, recording, kind):
        f = self._file(recording, kind)
        if not f.exists():
            return None
        with np.load(f, allow_pickle=False) as z:
            if str(z["kind"]) != FeatureKind(kind).value or str(z["config"]) != self.chash:
                return None
            values = z["values"]
            if values.shape != (int(z["dim"]),):
                return None
            return values

    def put(self, recording, kind, values: np.ndarray) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        f = self._file(recording, kind)
        tmp = f.with_name(f.name + f".{os.getpid()}.tmp.npz")
        np.savez(tmp, kind=FeatureKind(kind).value, dim=len(values), config=self.chash,
                 recording=str(recording), values=np.asarray(values, dtype=np.float64))
        os.replace(tmp, f)
        return f
