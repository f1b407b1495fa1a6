"""Confusion matrices and precision/recall/F1 classification reports."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # rows = true class, columns = predicted class
    class_labels: tuple

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValueError(f"confusion counts must be square, got shape {counts.shape}")
        if (counts < 0).any():
            raise ValueError("confusion counts must be non-negative")
        labels = tuple(self.class_labels) if self.class_labels is not None else tuple(
            str(i) for i in range(len(counts)))
        if len(labels) != len(counts):
            raise ValueError("one class label per row is required")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "class_labels", labels)

    @property
    def total(self):
        return int(self.counts.sum())

    def to_dict(self):
        return {"class_labels": list(self.class_labels), "counts": self.counts.tolist()}


def confusion(true_labels, predicted_labels, k, class_labels=None):
    true_labels = np.asarray(true_labels, dtype=int)
    predicted_labels = np.asarray(predicted_labels, dtype=int)
    if true_labels.shape != predicted_labels.shape:
        raise DataError(f"label vectors differ in length ({len(true_labels)} vs {len(predicted_labels)})")
    for name, arr in (("true", true_labels), ("predicted", predicted_labels)):
        bad = np.flatnonzero((arr < 0) | (arr >= k))
        if bad.size:
            raise DataError(f"{name} label {arr[bad[0]]} at index {bad[0]} is outside [0, {k})")
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (true_labels, predicted_labels), 1)
    return ConfusionMatrix(counts, class_labels)


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ClassificationReport:
    per_class: dict
    accuracy: float
    macro_avg: ClassScores
    weighted_avg: ClassScores
    warnings: tuple = field(default=())

    def to_dict(self):
        def scores(s):
            return {"precision": s.precision, "recall": s.recall, "f1": s.f1, "support": s.support}
        return {
            "per_class": {k: scores(v) for k, v in self.per_class.items()},
            "accuracy": self.accuracy,
            "macro_avg": scores(self.macro_avg),
            "weighted_avg": scores(self.weighted_avg),
            "warnings": list(self.warnings),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def _safe_div(num, den):
    return np.divide(num, den, out=np.zeros_like(num, dtype=np.float64), where=den > 0)


def report(cm):
    """Per-class precision/recall/F1 plus accuracy and macro/weighted averages.

    A zero denominator yields 0 and a message in ``warnings``.
    """
    counts = cm.counts.astype(np.float64)
    total = counts.sum()
    if total <= 0:
        raise DataError("cannot report on an empty confusion matrix")
    tp = np.diag(counts)
    predicted = counts.sum(axis=0)
    support = counts.sum(axis=1)
    precision = _safe_div(tp, predicted)
    recall = _safe_div(tp, support)
    f1 = _safe_div(2 * precision * recall, precision + recall)

    warnings = []
    for i, label in enumerate(cm.class_labels):
        if predicted[i] == 0:
            warnings.append(f"precision of {label!r} is undefined (never predicted); set to 0")
        if support[i] == 0:
            warnings.append(f"recall of {label!r} is undefined (no samples); set to 0")

    per_class = {
        label: ClassScores(float(precision[i]), float(recall[i]), float(f1[i]), int(support[i]))
        for i, label in enumerate(cm.class_labels)
    }
    w = support / total
    macro = ClassScores(float(precision.mean()), float(recall.mean()), float(f1.mean()), int(total))
    weighted = ClassScores(float(w @ precision), float(w @ recall), float(w @ f1), int(total))
    return ClassificationReport(per_class, float(tp.sum() / total), macro, weighted, tuple(warnings))


def render_text(rep, digits=2):
    """Aligned plain-text table: Precision, Recall, F1-Score, Support rows."""
    names = list(rep.per_class) + ["accuracy", "macro avg", "weighted avg"]
    width = max(len(n) for n in names)
    head = f"{'':>{width}}  {'Precision':>9}  {'Recall':>9}  {'F1-Score':>9}  {'Support':>9}"
    lines = [head, ""]

    def row(name, s):
        return (f"{name:>{width}}  {s.precision:>9.{digits}f}  {s.recall:>9.{digits}f}"
                f"  {s.f1:>9.{digits}f}  {s.support:>9d}")

    for name, s in rep.per_class.items():
        lines.append(row(name, s))
    lines.append("")
    total = rep.macro_avg.support
    lines.append(f"{'accuracy':>{width}}  {'':>9}  {'':>9}  {rep.accuracy:>9.{digits}f}  {total:>9d}")
    lines.append(row("macro avg", rep.macro_avg))
    lines.append(row("weighted avg", rep.weighted_avg))
    return "\n".join(lines) + "\n"
