import numpy as np
import pytest

from qubofit.errors import IndexOutOfRange
from qubofit.geometry import Point2D, fit_minimal, residual
from qubofit.preference import (
    PreferenceMatrix,
    build_preference,
    consensus_size,
    preference_from_csv,
    preference_from_json,
    preference_to_csv,
    preference_to_json,
    restrict_columns,
)


def axis_lines():
    x_axis = fit_minimal("line", (Point2D(0.0, 0.0, -1), Point2D(1.0, 0.0, -2)))
    y_axis = fit_minimal("line", (Point2D(0.0, 0.0, -1), Point2D(0.0, 1.0, -2)))
    return [x_axis, y_axis]


def random_instance(rng, n=None, m=None):
    n = n or int(rng.integers(2, 12))
    m = m or int(rng.integers(2, 9))
    pts = [
        Point2D(float(x), float(y), i)
        for i, (x, y) in enumerate(rng.normal(size=(n, 2)))
    ]
    models = []
    while len(models) < m:
        a, b = rng.normal(size=(2, 2))
        models.append(
            fit_minimal(
                "line",
                (Point2D(float(a[0]), float(a[1]), -1), Point2D(float(b[0]), float(b[1]), -2)),
            )
        )
    return pts, models


def test_two_point_two_line_example():
    pts = [Point2D(0.0, 0.0, 0), Point2D(0.0, 5.0, 1)]
    pref = build_preference(pts, axis_lines(), 0.1)
    assert pref.entries.tolist() == [[1, 1], [0, 1]]
    assert consensus_size(pref, 0) == 1
    assert consensus_size(pref, 1) == 2
    assert pref.row(0).tolist() == [1, 1]
    assert pref.column(0).tolist() == [1, 0]


def test_threshold_is_strict():
    pts = [Point2D(0.0, 0.1, 0)]
    x_axis = axis_lines()[0]
    assert residual(x_axis, pts[0]) == pytest.approx(0.1, abs=1e-15)
    pref = build_preference(pts, [x_axis], 0.1)
    assert pref.entries[0, 0] == 0
    pref = build_preference(pts, [x_axis], 0.1 + 1e-9)
    assert pref.entries[0, 0] == 1


def test_matrix_matches_scalar_residuals_exactly():
    rng = np.random.default_rng(21)
    for _ in range(30):
        pts, models = random_instance(rng)
        eps = float(rng.uniform(0.05, 2.0))
        pref = build_preference(pts, models, eps)
        for i, p in enumerate(pts):
            for j, h in enumerate(models):
                assert pref.entries[i, j] == (1 if residual(h, p) < eps else 0)


def test_epsilon_monotonicity():
    rng = np.random.default_rng(22)
    for _ in range(30):
        pts, models = random_instance(rng)
        e1, e2 = sorted(rng.uniform(0.01, 2.0, size=2))
        p1 = build_preference(pts, models, float(e1)).entries
        p2 = build_preference(pts, models, float(e2)).entries
        assert np.all(p1 <= p2)


def test_empty_columns_and_orphan_rows():
    entries = np.array([[1, 0, 0], [0, 0, 0]], dtype=np.uint8)
    pref = PreferenceMatrix(entries)
    assert pref.empty_columns() == [1, 2]
    assert pref.orphan_rows() == [1]


def test_drop_empty_columns():
    pts = [Point2D(0.0, 0.0, 0)]
    models = axis_lines() + [
        fit_minimal("line", (Point2D(5.0, 0.0, -1), Point2D(5.0, 1.0, -2)))
    ]
    pref = build_preference(pts, models, 0.1, drop_empty=True)
    assert pref.m == 2
    assert pref.models is not None and len(pref.models) == 2


def test_restrict_columns_subsets():
    rng = np.random.default_rng(23)
    pts, models = random_instance(rng, n=8, m=6)
    pref = build_preference(pts, models, 0.5)
    sub = restrict_columns(pref, [4, 1])
    assert sub.m == 2
    assert np.array_equal(sub.entries[:, 0], pref.entries[:, 4])
    assert np.array_equal(sub.entries[:, 1], pref.entries[:, 1])
    assert sub.models == (pref.models[4], pref.models[1])
    assert sub.points == pref.points


def test_restrict_columns_union():
    # Restricting to a union keeps exactly the columns kept by either half.
    rng = np.random.default_rng(27)
    pts, models = random_instance(rng, n=10, m=9)
    pref = build_preference(pts, models, 0.4)
    left, right = [0, 3, 5], [5, 7, 1]
    union = sorted(set(left) | set(right))
    sub = restrict_columns(pref, union)
    halves = {pref.models[j] for j in left} | {pref.models[j] for j in right}
    assert set(sub.models) == halves
    for pos, j in enumerate(union):
        assert np.array_equal(sub.entries[:, pos], pref.entries[:, j])


@pytest.mark.parametrize("cols", [[], [0, 0], [99], [-1]])
def test_restrict_columns_rejects(cols):
    pref = PreferenceMatrix(np.ones((2, 3), dtype=np.uint8))
    with pytest.raises(IndexOutOfRange):
        restrict_columns(pref, cols)


def test_validation_rejects_bad_entries():
    with pytest.raises(ValueError):
        PreferenceMatrix(np.array([[0, 2]], dtype=np.uint8))
    with pytest.raises(ValueError):
        PreferenceMatrix(np.zeros(3, dtype=np.uint8))
    with pytest.raises(ValueError):
        build_preference([Point2D(0, 0, 0)], axis_lines(), -1.0)


def test_json_round_trip(tmp_path):
    rng = np.random.default_rng(24)
    pts, models = random_instance(rng, n=5, m=4)
    pref = build_preference(pts, models, 0.4)
    path = tmp_path / "pref.json"
    preference_to_json(pref, path)
    back = preference_from_json(path, points=pts)
    assert np.array_equal(back.entries, pref.entries)
    assert back.models == pref.models
    assert back.points == pref.points


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(25)
    pref = PreferenceMatrix(rng.integers(0, 2, size=(6, 5), dtype=np.uint8))
    path = tmp_path / "pref.csv"
    preference_to_csv(pref, path)
    back = preference_from_csv(path)
    assert np.array_equal(back.entries, pref.entries)
