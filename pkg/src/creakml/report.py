"""Accuracy grid (classifier rows x feature columns) and its rendering."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .evaluation import aggregate, round_half_up
from .features import FeatureKind
from .ml import ClassifierKind

PLUS_MINUS = "±"


@dataclass(frozen=True)
class Cell:
    mean: float
    std: float

    def text(self, bold=False) -> str:
        m = f"{self.mean:.1f}"
        return f"**{m}**{PLUS_MINUS}{self.std:.1f}" if bold else f"{m}{PLUS_MINUS}{self.std:.1f}"


@dataclass
class ExperimentReport:
    """Cells are keyed by (classifier, feature); None marks a failed cell.

    Averages are always recomputed from the cell means.
    """

    classifiers: list
    features: list
    cells: dict = field(default_factory=dict)

    def __post_init__(self):
        self.classifiers = [ClassifierKind(c) for c in self.classifiers]
        self.features = [FeatureKind(f) for f in self.features]
        self.cells = {(ClassifierKind(c), FeatureKind(f)): v for (c, f), v in self.cells.items()}

    def set(self, classifier, feature, cell):
        self.cells[(ClassifierKind(classifier), FeatureKind(feature))] = cell

    def missing(self):
        return [(c, f) for c in self.classifiers for f in self.features if (c, f) not in self.cells]

    def _mean_of(self, cells):
        if any(c is None for c in cells):
            return None
        return sum(c.mean for c in cells) / len(cells)

    def row_average(self, classifier):
        c = ClassifierKind(classifier)
        return self._mean_of([self.cells[(c, f)] for f in self.features])

    def column_average(self, feature):
        f = FeatureKind(feature)
        return self._mean_of([self.cells[(c, f)] for c in self.classifiers])

    def best(self):
        done = {k: v for k, v in self.cells.items() if v is not None}
        if not done:
            return set()
        top = max(v.mean for v in done.values())
        return {k for k, v in done.items() if v.mean == top}

    @property
    def complete(self) -> bool:
        return not self.missing() and all(v is not None for v in self.cells.values())

    @classmethod
    def from_runs(cls, runs, classifiers=None, features=None, failed=()):
        """Build from RunResults; `failed` lists (classifier, feature) cells that errored."""
        groups: dict = {}
        for r in runs:
            groups.setdefault((ClassifierKind(r.classifier), FeatureKind(r.feature)), []).append(r)
        failed = {(ClassifierKind(c), FeatureKind(f)) for c, f in failed}
        keys = set(groups) | failed
        if classifiers is None:
            classifiers = [c for c in ClassifierKind if any(k[0] == c for k in keys)]
        if features is None:
            features = [f for f in FeatureKind if any(k[1] == f for k in keys)]
        rep = cls(classifiers, features)
        for k, rs in groups.items():
            rep.cells[k] = Cell(*aggregate(rs))
        for k in failed:
            rep.cells[k] = None
        return rep


def _avg_text(v) -> str:
    return "--" if v is None else f"{round_half_up(v):.1f}"


def render_report(report: ExperimentReport, fmt: str = "markdown") -> str:
    """Markdown table (with averages, best cell in bold) or CSV of the cells."""
    missing = report.missing()
    if missing:
        names = ", ".join(f"{c.value}/{f.value}" for c, f in missing)
        raise ValueError(f"report grid is incomplete: missing {names}")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["classifier", "feature", "mean", "std"])
        for c in report.classifiers:
            for f in report.features:
                cell = report.cells[(c, f)]
                if cell is None:
                    w.writerow([c.value, f.value, "failed", "failed"])
                else:
                    w.writerow([c.value, f.value, f"{cell.mean:.1f}", f"{cell.std:.1f}"])
        return buf.getvalue()
    if fmt != "markdown":
        raise ValueError(f"unknown report format {fmt!r}")
    best = report.best()
    header = [""] + [f.label for f in report.features] + ["Average over features"]
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for c in report.classifiers:
        row = [c.label]
        for f in report.features:
            cell = report.cells[(c, f)]
            row.append("failed" if cell is None else cell.text(bold=(c, f) in best))
        row.append(_avg_text(report.row_average(c)))
        lines.append("| " + " | ".join(row) + " |")
    bottom = ["Average over classifiers"] + [_avg_text(report.column_average(f)) for f in report.features]
    lines.append("| " + " | ".join(bottom + ["--"]) + " |")
    return "\n".join(lines) + "\n"
