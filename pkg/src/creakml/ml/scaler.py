from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STD_FLOOR = 1e-8


@dataclass(frozen=True)
class ZScoreScaler:
    """Column-wise standardization with statistics from training rows only.

    `source_rows` records which row ids contributed to the statistics, so
    callers can audit that no held-out data leaked into them.
    """

    mean: np.ndarray
    std: np.ndarray
    source_rows: tuple = ()

    def transform(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.mean.shape[0]:
            raise ValueError(f"expected {self.mean.shape[0]} features, got {x.shape[-1]}")
        return (x - self.mean) / self.std


def fit_scaler(x_train, row_ids=None) -> ZScoreScaler:
    x = np.asarray(x_train, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("fit_scaler needs a non-empty 2-D matrix")
    mean = x.mean(axis=0)
    std = np.maximum(x.std(axis=0), STD_FLOOR)
    rows = tuple(range(x.shape[0])) if row_ids is None else tuple(int(r) for r in row_ids)
    if len(rows) != x.shape[0]:
        raise ValueError("row_ids must have one id per training row")
    return ZScoreScaler(mean, std, rows)


def transform(scaler: ZScoreScaler, x) -> np.ndarray:
    return scaler.transform(x)
