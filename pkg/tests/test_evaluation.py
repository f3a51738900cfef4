import numpy as np
import pytest
from conftest import slow_best_matching

from qubofit.errors import LengthMismatch
from qubofit.evaluation import (
    Labeling,
    label_points,
    labeling_from_dict,
    labeling_to_dict,
    misclassification,
    report_csv_line,
    single_model_error,
)
from qubofit.geometry import Point2D, fit_minimal
from qubofit.preference import PreferenceMatrix, build_preference
from qubofit.solver import ModelSelection


def test_labeling_validation():
    with pytest.raises(ValueError):
        Labeling(np.array([0, 3]), {0: 5})
    lab = Labeling(np.array([-1, 0]), {0: 5})
    assert lab.cluster_models == {0: 5}


def test_label_points_disjoint_cover():
    entries = np.array([[1, 0], [1, 0], [0, 1]], dtype=np.uint8)
    pref = PreferenceMatrix(entries)
    lab = label_points(pref, ModelSelection((0, 1), 0.0))
    assert lab.labels.tolist() == [0, 0, 1]
    assert lab.cluster_models == {0: 0, 1: 1}


def test_label_points_orphans_and_unselected():
    entries = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=np.uint8)
    pref = PreferenceMatrix(entries)
    lab = label_points(pref, ModelSelection((0,), 0.0))
    assert lab.labels.tolist() == [0, -1, -1]
    lab = label_points(pref, ModelSelection((), 0.0))
    assert lab.labels.tolist() == [-1, -1, -1]


def test_label_points_overlap_resolved_by_residual():
    # point 1 is claimed by both lines; the nearer one (x-axis, 0.01 away)
    # must win over the tilted line (0.02 away by construction)
    x_axis = fit_minimal("line", (Point2D(0.0, 0.0, -1), Point2D(1.0, 0.0, -2)))
    shifted = fit_minimal("line", (Point2D(0.0, 0.03, -1), Point2D(1.0, 0.03, -2)))
    pts = [Point2D(0.5, 0.01, 0), Point2D(2.0, 0.0, 1), Point2D(3.0, 0.03, 2)]
    pref = build_preference(pts, [x_axis, shifted], 0.1)
    assert pref.entries.tolist() == [[1, 1], [1, 1], [1, 1]]
    lab = label_points(pref, ModelSelection((0, 1), 0.0))
    assert lab.labels.tolist() == [0, 0, 1]


def test_label_points_overlap_without_refs_uses_lowest_index():
    entries = np.array([[1, 1]], dtype=np.uint8)
    pref = PreferenceMatrix(entries)
    lab = label_points(pref, ModelSelection((0, 1), 0.0))
    assert lab.labels.tolist() == [0]


def test_zero_error_up_to_renaming():
    gt = [0, 0, 1, 1, 2, 2]
    pred = [2, 2, 0, 0, 1, 1]
    report = misclassification(np.array(pred), np.array(gt))
    assert report.error_percent == 0.0
    assert sorted(report.matched_pairs) == [(0, 1), (1, 2), (2, 0)]


def test_one_swapped_point_of_ten():
    gt = [0] * 5 + [1] * 5
    pred = [0] * 5 + [1] * 4 + [0]
    report = misclassification(np.array(pred), np.array(gt))
    assert report.error_percent == pytest.approx(10.0)
    assert report.error_percent == pytest.approx(slow_best_matching(pred, gt))


def test_all_unassigned_is_total_error():
    gt = [0, 1, 2, 0]
    report = misclassification(np.array([-1, -1, -1, -1]), np.array(gt))
    assert report.error_percent == 100.0
    assert report.matched_pairs == ()


def test_matching_equals_brute_force():
    rng = np.random.default_rng(61)
    for _ in range(40):
        n = int(rng.integers(4, 40))
        pred = rng.integers(-1, 5, size=n)
        gt = rng.integers(0, 5, size=n)
        report = misclassification(pred, gt)
        assert report.error_percent == pytest.approx(slow_best_matching(pred, gt))


def test_permutation_invariance():
    rng = np.random.default_rng(62)
    for _ in range(30):
        n = int(rng.integers(5, 30))
        pred = rng.integers(0, 4, size=n)
        gt = rng.integers(0, 4, size=n)
        base = misclassification(pred, gt).error_percent
        perm_p = rng.permutation(4)
        perm_g = rng.permutation(4)
        assert misclassification(perm_p[pred], perm_g[gt]).error_percent == pytest.approx(base)


def unique_best_matchings(pred, gt):
    """Number of injective cluster matchings attaining the best score."""
    import itertools

    pred = np.asarray(pred)
    gt = np.asarray(gt)
    p_ids = sorted({int(c) for c in pred if c >= 0})
    g_ids = sorted({int(c) for c in gt if c >= 0})
    small, large, flipped = (p_ids, g_ids, False)
    if len(p_ids) > len(g_ids):
        small, large, flipped = (g_ids, p_ids, True)
    scores = []
    for chosen in itertools.permutations(large, len(small)):
        matched = 0
        for a, b in zip(small, chosen):
            pa, ga = (b, a) if flipped else (a, b)
            matched += int(np.sum((pred == pa) & (gt == ga)))
        scores.append(matched)
    return scores.count(max(scores))


def test_flipping_a_matched_point_never_helps():
    # Holds when the optimal matching is unique. Under a tied matching a
    # flip can break the tie the other way and lower the error, so tied
    # instances are skipped.
    rng = np.random.default_rng(63)
    done = 0
    while done < 30:
        n = int(rng.integers(6, 25))
        pred = rng.integers(0, 3, size=n)
        gt = rng.integers(0, 3, size=n)
        if unique_best_matchings(pred, gt) != 1:
            continue
        report = misclassification(pred, gt)
        matched = dict(report.matched_pairs)
        candidates = [
            i for i in range(n) if pred[i] in matched and matched[pred[i]] == gt[i]
        ]
        if not candidates:
            continue
        i = int(rng.choice(candidates))
        flipped = pred.copy()
        flipped[i] = (pred[i] + 1) % 3
        assert misclassification(flipped, gt).error_percent >= report.error_percent - 1e-12
        done += 1


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        misclassification(np.array([0, 1]), np.array([0]))
    with pytest.raises(LengthMismatch):
        misclassification(np.array([]), np.array([]))


def test_single_model_error_cases():
    assert single_model_error([0, 1, 2], [3, 4], [0, 1, 2]) == 0.0
    assert single_model_error([], [0, 1, 2, 3], [0, 1, 2, 3]) == 100.0
    assert single_model_error(list(range(19)), [19], list(range(20))) == pytest.approx(5.0)
    with pytest.raises(LengthMismatch):
        single_model_error([0, 1], [1, 2], [0])
    with pytest.raises(LengthMismatch):
        single_model_error([0], [1], [7])
    with pytest.raises(LengthMismatch):
        single_model_error([], [], [])


def test_csv_line_format():
    report = misclassification(np.array([0, 0]), np.array([1, 1]))
    line = report_csv_line(report, "star5", "qumf", 3, 20, 2, 1)
    assert line == "star5,qumf,3,20,2,1,0.000000"


def test_labeling_dict_round_trip():
    lab = Labeling(np.array([0, -1, 1]), {0: 4, 1: 9})
    back = labeling_from_dict(labeling_to_dict(lab))
    assert back.labels.tolist() == [0, -1, 1]
    assert back.cluster_models == {0: 4, 1: 9}
