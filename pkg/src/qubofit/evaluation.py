"""Point labeling from a model selection plus clustering error metrics.

Misclassification uses the best one-to-one matching between predicted
and ground-truth clusters, so the metric is invariant to how either side
numbers its clusters. Unassigned points (label -1) can never match.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import LengthMismatch
from .geometry import residual
from .preference import PreferenceMatrix
from .solver import ModelSelection


@dataclass(frozen=True)
class Labeling:
    """Per-point cluster ids; cluster c is model cluster_models[c]."""

    labels: np.ndarray
    cluster_models: dict[int, int]

    def __post_init__(self):
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=np.int64))
        present = {int(c) for c in self.labels if c >= 0}
        if not present <= set(self.cluster_models):
            raise ValueError("label refers to an unknown cluster")


@dataclass(frozen=True)
class EvalReport:
    error_percent: float
    matched_pairs: tuple[tuple[int, int], ...]
    confusion: np.ndarray
    pred_ids: tuple[int, ...]
    gt_ids: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "error_percent": self.error_percent,
            "matched_pairs": [list(p) for p in self.matched_pairs],
            "confusion": self.confusion.tolist(),
            "pred_ids": list(self.pred_ids),
            "gt_ids": list(self.gt_ids),
        }


def label_points(pref: PreferenceMatrix, sel: ModelSelection) -> Labeling:
    """Assign each point to one selected model's cluster, or -1 to none.

    A point claimed by several selected models goes to the one with the
    smallest residual when the matrix carries its points and models;
    otherwise, and on residual ties, to the lowest model index.
    """
    selected = list(sel.selected)
    labels = np.full(pref.n, -1, dtype=np.int64)
    cluster_models = {c: j for c, j in enumerate(selected)}
    if not selected:
        return Labeling(labels, cluster_models)
    sub = pref.entries[:, selected]
    counts = sub.sum(axis=1)
    have_refs = pref.models is not None and pref.points is not None
    for i in np.flatnonzero(counts > 0):
        covering = np.flatnonzero(sub[i])
        if covering.size == 1:
            labels[i] = covering[0]
            continue
        if have_refs:
            point = pref.points[i]
            labels[i] = min(
                covering,
                key=lambda c: (residual(pref.models[selected[c]], point), selected[c]),
            )
        else:
            labels[i] = min(covering, key=lambda c: selected[c])
    return Labeling(labels, cluster_models)


def _as_labels(value) -> np.ndarray:
    if isinstance(value, Labeling):
        return value.labels
    return np.asarray(value, dtype=np.int64)


def misclassification(pred, gt_labels) -> EvalReport:
    """Percent of points mislabeled under the best cluster matching.

    Builds the predicted-vs-truth contingency table over non-negative
    labels and matches clusters one-to-one to maximize agreement; every
    point outside a matched pair counts as an error.
    """
    p = _as_labels(pred)
    g = _as_labels(gt_labels)
    if p.shape != g.shape or p.ndim != 1 or p.size == 0:
        raise LengthMismatch("label arrays must be equal-length and nonempty")
    pred_ids = sorted({int(c) for c in p if c >= 0})
    gt_ids = sorted({int(c) for c in g if c >= 0})
    confusion = np.zeros((len(pred_ids), len(gt_ids)), dtype=np.int64)
    p_index = {c: r for r, c in enumerate(pred_ids)}
    g_index = {c: r for r, c in enumerate(gt_ids)}
    for pc, gc in zip(p, g):
        if pc >= 0 and gc >= 0:
            confusion[p_index[int(pc)], g_index[int(gc)]] += 1
    matched = 0
    pairs: list[tuple[int, int]] = []
    if confusion.size:
        rows, cols = linear_sum_assignment(confusion, maximize=True)
        for r, c in zip(rows, cols):
            matched += int(confusion[r, c])
            pairs.append((pred_ids[r], gt_ids[c]))
    error = 100.0 * (p.size - matched) / p.size
    return EvalReport(error, tuple(sorted(pairs)), confusion, tuple(pred_ids), tuple(gt_ids))


def single_model_error(inliers, outliers, gt_inlier_ids) -> float:
    """Percent of points whose inlier/outlier call disagrees with truth."""
    ins, outs, gt = set(inliers), set(outliers), set(gt_inlier_ids)
    if ins & outs:
        raise LengthMismatch("inliers and outliers overlap")
    universe = ins | outs
    if not universe:
        raise LengthMismatch("no points to score")
    if not gt <= universe:
        raise LengthMismatch("ground-truth ids outside the point set")
    wrong = len(ins - gt) + len(outs & gt)
    return 100.0 * wrong / len(universe)


def report_csv_line(
    report: EvalReport, dataset: str, method: str, seed: int, m: int, n: int, k: int
) -> str:
    return f"{dataset},{method},{seed},{m},{n},{k},{report.error_percent:.6f}"


def labeling_to_dict(labeling: Labeling) -> dict:
    return {
        "labels": [int(c) for c in labeling.labels],
        "cluster_models": {str(c): int(j) for c, j in labeling.cluster_models.items()},
    }


def labeling_from_dict(payload: dict) -> Labeling:
    return Labeling(
        np.asarray(payload["labels"], dtype=np.int64),
        {int(c): int(j) for c, j in payload["cluster_models"].items()},
    )
