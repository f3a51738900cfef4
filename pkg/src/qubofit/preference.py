"""Binary preference-consensus matrix relating points to model hypotheses.

Entry (i, j) is 1 exactly when point i lies strictly inside the inlier
band of model j. Columns are model consensus sets, rows are per-point
preference sets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import IndexOutOfRange
from .geometry import ModelHypothesis, Point2D, model_from_dict, model_to_dict


@dataclass(frozen=True)
class PreferenceMatrix:
    """n x m binary matrix plus references to the points and models behind it.

    ``models`` / ``points`` may be None for matrices loaded from bare
    interop formats; operations needing residual lookups degrade to
    index-based tie-breaking in that case.
    """

    entries: np.ndarray
    models: tuple[ModelHypothesis, ...] | None = None
    points: tuple[Point2D, ...] | None = None

    def __post_init__(self):
        entries = np.ascontiguousarray(self.entries, dtype=np.uint8)
        if entries.ndim != 2:
            raise ValueError("entries must be a 2-D array")
        if not np.isin(entries, (0, 1)).all():
            raise ValueError("entries must be binary")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        if self.models is not None:
            object.__setattr__(self, "models", tuple(self.models))
            if len(self.models) != entries.shape[1]:
                raise ValueError("model count must equal column count")
        if self.points is not None:
            object.__setattr__(self, "points", tuple(self.points))
            if len(self.points) != entries.shape[0]:
                raise ValueError("point count must equal row count")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self.entries[:, j]

    def row(self, i: int) -> np.ndarray:
        return self.entries[i, :]

    def empty_columns(self) -> list[int]:
        """Indices of models with empty consensus (diagnostic)."""
        return [int(j) for j in np.flatnonzero(self.entries.sum(axis=0) == 0)]

    def orphan_rows(self) -> list[int]:
        """Indices of points covered by no model (diagnostic)."""
        return [int(i) for i in np.flatnonzero(self.entries.sum(axis=1) == 0)]


def _residual_matrix(points: Sequence[Point2D], models: Sequence[ModelHypothesis]) -> np.ndarray:
    # Elementwise ops with the same evaluation order as geometry.residual,
    # so vectorized and scalar residuals agree bit for bit.
    x = np.array([p.x for p in points], dtype=np.float64)[:, None]
    y = np.array([p.y for p in points], dtype=np.float64)[:, None]
    out = np.empty((len(points), len(models)), dtype=np.float64)
    lines = [j for j, mh in enumerate(models) if mh.family == "line"]
    circles = [j for j, mh in enumerate(models) if mh.family == "circle"]
    if lines:
        abc = np.array([[models[j].params.a, models[j].params.b, models[j].params.c] for j in lines])
        out[:, lines] = np.abs(x * abc[:, 0] + y * abc[:, 1] + abc[:, 2])
    if circles:
        cx = np.array([models[j].params.cx for j in circles])
        cy = np.array([models[j].params.cy for j in circles])
        rr = np.array([models[j].params.r for j in circles])
        out[:, circles] = np.abs(np.hypot(x - cx, y - cy) - rr)
    return out


def build_preference(
    points: Sequence[Point2D],
    models: Sequence[ModelHypothesis],
    epsilon: float,
    drop_empty: bool = False,
) -> PreferenceMatrix:
    """Build the preference matrix for an inlier threshold.

    The inequality is strict: a residual exactly equal to ``epsilon``
    leaves the entry at 0. Models with empty consensus keep their
    all-zero column unless ``drop_empty`` is set.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if len(points) < 1 or len(models) < 1:
        raise ValueError("need at least one point and one model")
    entries = (_residual_matrix(points, models) < epsilon).astype(np.uint8)
    pref = PreferenceMatrix(entries, tuple(models), tuple(points))
    if drop_empty:
        keep = [j for j in range(pref.m) if j not in set(pref.empty_columns())]
        if keep and len(keep) < pref.m:
            pref = restrict_columns(pref, keep)
    return pref


def consensus_size(pref: PreferenceMatrix, j: int) -> int:
    """Number of points in model j's consensus set."""
    if not 0 <= j < pref.m:
        raise IndexOutOfRange(f"column {j} out of range for m={pref.m}")
    return int(pref.entries[:, j].sum())


def restrict_columns(pref: PreferenceMatrix, cols: Sequence[int]) -> PreferenceMatrix:
    """Sub-matrix keeping all rows and the given columns, in the given order."""
    cols = [int(j) for j in cols]
    if not cols:
        raise IndexOutOfRange("column subset must be nonempty")
    if len(set(cols)) != len(cols):
        raise IndexOutOfRange("column subset contains duplicates")
    if min(cols) < 0 or max(cols) >= pref.m:
        raise IndexOutOfRange(f"column subset out of range for m={pref.m}")
    models = None if pref.models is None else tuple(pref.models[j] for j in cols)
    return PreferenceMatrix(pref.entries[:, cols], models, pref.points)


# --- serialization -----------------------------------------------------

def preference_to_json(pref: PreferenceMatrix, path: str | Path) -> None:
    """Dense row-major JSON with model parameter records."""
    payload = {
        "n": pref.n,
        "m": pref.m,
        "entries": [int(v) for v in pref.entries.reshape(-1)],
        "models": None if pref.models is None else [model_to_dict(mh) for mh in pref.models],
    }
    Path(path).write_text(json.dumps(payload) + "\n")


def preference_from_json(path: str | Path, points: Sequence[Point2D] | None = None) -> PreferenceMatrix:
    payload = json.loads(Path(path).read_text())
    entries = np.array(payload["entries"], dtype=np.uint8).reshape(payload["n"], payload["m"])
    models = payload.get("models")
    if models is not None:
        models = tuple(model_from_dict(r) for r in models)
    return PreferenceMatrix(entries, models, None if points is None else tuple(points))


def preference_to_csv(pref: PreferenceMatrix, path: str | Path) -> None:
    """0/1 CSV, one row per point; model references are not included."""
    np.savetxt(path, pref.entries, fmt="%d", delimiter=",")


def preference_from_csv(path: str | Path) -> PreferenceMatrix:
    entries = np.loadtxt(path, dtype=np.uint8, delimiter=",", ndmin=2)
    return PreferenceMatrix(entries)
