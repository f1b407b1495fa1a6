import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from sklearn.metrics import classification_report, confusion_matrix

from roadsense.errors import DataError
from roadsense.evaluation import ConfusionMatrix, confusion, render_text, report

# Matrices consistent with the published confusion-matrix narratives and reports.
CAMERA_LABELS = ("pavement", "asphalt_damaged", "asphalt", "gravel_damaged", "gravel")
CAMERA_COUNTS = [
    [120, 0, 0, 0, 0],
    [0, 112, 8, 0, 0],
    [0, 10, 110, 0, 0],
    [0, 0, 0, 120, 0],
    [0, 0, 0, 4, 116],
]
CAMERA_TABLE = {
    "pavement": (1.00, 1.00, 1.00, 120),
    "asphalt_damaged": (0.92, 0.93, 0.93, 120),
    "asphalt": (0.93, 0.92, 0.92, 120),
    "gravel_damaged": (0.97, 1.00, 0.98, 120),
    "gravel": (1.00, 0.97, 0.98, 120),
}
ACCEL_LABELS = ("gravel_damaged", "pavement", "asphalt_damaged", "asphalt", "gravel")
ACCEL_COUNTS = [
    [54, 0, 0, 0, 6],
    [0, 60, 0, 0, 0],
    [0, 0, 57, 3, 0],
    [0, 0, 4, 56, 0],
    [6, 0, 0, 0, 54],
]
ACCEL_TABLE = {
    "gravel_damaged": (0.90, 0.90, 0.90, 60),
    "pavement": (1.00, 1.00, 1.00, 60),
    "asphalt_damaged": (0.93, 0.95, 0.94, 60),
    "asphalt": (0.95, 0.93, 0.94, 60),
    "gravel": (0.90, 0.90, 0.90, 60),
}


def test_confusion_hand_count():
    cm = confusion([0, 0, 1], [0, 1, 1], 2)
    assert cm.counts.tolist() == [[1, 1], [0, 1]]


def test_confusion_perfect():
    labels = np.repeat(np.arange(5), 60)
    assert np.array_equal(confusion(labels, labels, 5).counts, np.diag([60] * 5))


def test_confusion_out_of_range_names_index():
    with pytest.raises(DataError, match="index 2"):
        confusion([0, 1, 5], [0, 1, 1], 5)
    with pytest.raises(DataError):
        confusion([0, 1], [0], 5)


def test_confusion_matches_sklearn(rng):
    t, p = rng.integers(0, 5, 500), rng.integers(0, 5, 500)
    assert np.array_equal(confusion(t, p, 5).counts, confusion_matrix(t, p, labels=range(5)))


def _rounded(s):
    return (round(s.precision, 2), round(s.recall, 2), round(s.f1, 2), s.support)


@pytest.mark.parametrize("labels, counts, table, macro", [
    (CAMERA_LABELS, CAMERA_COUNTS, CAMERA_TABLE, (0.96, 0.96, 0.96, 600)),
    (ACCEL_LABELS, ACCEL_COUNTS, ACCEL_TABLE, (0.94, 0.94, 0.94, 300)),
], ids=["camera", "acceleration"])
def test_published_reports(labels, counts, table, macro):
    rep = report(ConfusionMatrix(np.array(counts), labels))
    assert {k: _rounded(v) for k, v in rep.per_class.items()} == table
    assert _rounded(rep.macro_avg) == macro
    assert _rounded(rep.weighted_avg) == macro
    assert not rep.warnings


def test_gravel_row_recall():
    rep = report(ConfusionMatrix(np.array(ACCEL_COUNTS), ACCEL_LABELS))
    assert rep.per_class["gravel"].recall == pytest.approx(0.90)
    assert rep.per_class["pavement"].recall == 1.0


def test_diagonal_report():
    rep = report(ConfusionMatrix(np.diag([3, 4, 5]), None))
    assert rep.accuracy == 1.0
    for s in list(rep.per_class.values()) + [rep.macro_avg, rep.weighted_avg]:
        assert (s.precision, s.recall, s.f1) == (1.0, 1.0, 1.0)


def test_zero_denominators_flagged():
    rep = report(ConfusionMatrix(np.array([[2, 0], [1, 0]]), ("a", "b")))
    assert rep.per_class["b"].precision == 0.0 and rep.per_class["b"].f1 == 0.0
    assert any("'b'" in w for w in rep.warnings)
    with pytest.raises(DataError):
        report(ConfusionMatrix(np.zeros((2, 2)), ("a", "b")))


matrices = st.integers(2, 6).flatmap(lambda k: arrays(np.int64, (k, k), elements=st.integers(0, 50)))


@settings(max_examples=200)
@given(matrices)
def test_report_matches_sklearn(counts):
    if counts.sum() == 0:
        return
    k = len(counts)
    true, pred = np.nonzero(np.ones_like(counts))
    reps = counts.reshape(-1)
    y_true, y_pred = np.repeat(true, reps), np.repeat(pred, reps)
    ref = classification_report(y_true, y_pred, labels=range(k), output_dict=True, zero_division=0)
    rep = report(ConfusionMatrix(counts, None))
    for i in range(k):
        s = rep.per_class[str(i)]
        r = ref[str(i)]
        assert (s.precision, s.recall, s.f1) == pytest.approx((r["precision"], r["recall"], r["f1-score"]), abs=1e-12)
        assert s.support == r["support"]
    for ours, key in ((rep.macro_avg, "macro avg"), (rep.weighted_avg, "weighted avg")):
        r = ref[key]
        assert (ours.precision, ours.recall, ours.f1) == pytest.approx(
            (r["precision"], r["recall"], r["f1-score"]), abs=1e-12)


@settings(max_examples=200)
@given(matrices)
def test_weighted_recall_equals_accuracy(counts):
    if counts.sum() == 0:
        return
    rep = report(ConfusionMatrix(counts, None))
    assert abs(rep.weighted_avg.recall - rep.accuracy) <= 1e-12
    # exact in rationals
    total = int(counts.sum())
    support = counts.sum(axis=1)
    weighted = sum(Fraction(int(s), total) * Fraction(int(counts[i, i]), int(s)) for i, s in enumerate(support) if s)
    assert weighted == Fraction(int(np.trace(counts)), total)


@given(matrices, st.randoms())
def test_permutation_invariance(counts, random):
    if counts.sum() == 0:
        return
    k = len(counts)
    labels = tuple(f"c{i}" for i in range(k))
    perm = list(range(k))
    random.shuffle(perm)
    a = report(ConfusionMatrix(counts, labels))
    b = report(ConfusionMatrix(counts[np.ix_(perm, perm)], tuple(labels[i] for i in perm)))
    assert a.accuracy == pytest.approx(b.accuracy, abs=1e-12)
    for key in labels:
        assert a.per_class[key] == b.per_class[key]
    for x, y in ((a.macro_avg, b.macro_avg), (a.weighted_avg, b.weighted_avg)):
        assert (x.precision, x.recall, x.f1) == pytest.approx((y.precision, y.recall, y.f1), abs=1e-12)


@given(matrices)
def test_f1_between_precision_and_recall(counts):
    if counts.sum() == 0:
        return
    for s in report(ConfusionMatrix(counts, None)).per_class.values():
        if s.precision == 0 or s.recall == 0:
            assert s.f1 == 0
        else:
            assert min(s.precision, s.recall) - 1e-12 <= s.f1 <= max(s.precision, s.recall) + 1e-12


def test_equal_supports_macro_equals_weighted():
    rep = report(ConfusionMatrix(np.array(ACCEL_COUNTS), ACCEL_LABELS))
    assert rep.macro_avg.precision == pytest.approx(rep.weighted_avg.precision, abs=1e-15)


def test_render_text_layout():
    text = render_text(report(ConfusionMatrix(np.array(CAMERA_COUNTS), CAMERA_LABELS)))
    lines = text.splitlines()
    assert lines[0].split() == ["Precision", "Recall", "F1-Score", "Support"]
    assert lines[2].split() == ["pavement", "1.00", "1.00", "1.00", "120"]
    assert lines[-3].split() == ["accuracy", "0.96", "600"]
    assert lines[-2].split() == ["macro", "avg", "0.96", "0.96", "0.96", "600"]
    assert len({len(line) for line in lines if line}) == 1


def test_report_json():
    rep = report(ConfusionMatrix(np.array(ACCEL_COUNTS), ACCEL_LABELS))
    doc = json.loads(rep.to_json())
    assert doc["per_class"]["gravel"]["support"] == 60
    assert doc["accuracy"] == pytest.approx(281 / 300)
