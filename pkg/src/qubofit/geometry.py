"""2D parametric model families: lines and circles.

Both families sit behind one hypothesis interface giving minimal-sample
instantiation and point residuals. Lines use the normalized implicit form
``a*x + b*y + c = 0`` with ``a**2 + b**2 = 1``, so the residual is the
orthogonal point-to-line distance; circle residuals are radial distances.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import DegenerateSample

MINIMAL_ARITY = {"line": 2, "circle": 3}

# Minimal samples whose defining determinant magnitude falls below this
# are rejected as degenerate.
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float
    id: int


@dataclass(frozen=True)
class LineModel:
    """Implicit line with unit normal (a, b).

    Canonical sign convention: the first component of (a, b) that is
    nonzero (beyond a 1e-12 tolerance) is positive, so a geometric line
    maps to exactly one parameter triple.
    """

    a: float
    b: float
    c: float


@dataclass(frozen=True)
class CircleModel:
    cx: float
    cy: float
    r: float


@dataclass(frozen=True)
class ModelHypothesis:
    """A parametric model plus the ids of the points that instantiated it."""

    family: str
    params: LineModel | CircleModel
    source_ids: tuple[int, ...]


def _canonical_line(a: float, b: float, c: float) -> LineModel:
    norm = math.hypot(a, b)
    if norm < DEGENERACY_TOL:
        raise DegenerateSample("line normal has zero length")
    a, b, c = a / norm, b / norm, c / norm
    if a < -DEGENERACY_TOL or (abs(a) <= DEGENERACY_TOL and b < 0.0):
        a, b, c = -a, -b, -c
    return LineModel(a, b, c)


def _fit_line(p: Point2D, q: Point2D) -> LineModel:
    dx = q.x - p.x
    dy = q.y - p.y
    if math.hypot(dx, dy) < DEGENERACY_TOL:
        raise DegenerateSample("coincident points do not define a line")
    # Offset from the midpoint keeps the fit independent of point order.
    mx = (p.x + q.x) / 2.0
    my = (p.y + q.y) / 2.0
    a, b = -dy, dx
    return _canonical_line(a, b, -(a * mx + b * my))


def _fit_circle(p1: Point2D, p2: Point2D, p3: Point2D) -> CircleModel:
    # Perpendicular-bisector system; its determinant vanishes iff the
    # points are collinear.
    ax, ay = p2.x - p1.x, p2.y - p1.y
    bx, by = p3.x - p1.x, p3.y - p1.y
    det = ax * by - ay * bx
    if abs(det) < DEGENERACY_TOL:
        raise DegenerateSample("collinear points do not define a circle")
    a2 = (ax * ax + ay * ay) / 2.0
    b2 = (bx * bx + by * by) / 2.0
    ux = (a2 * by - ay * b2) / det
    uy = (ax * b2 - a2 * bx) / det
    cx, cy = p1.x + ux, p1.y + uy
    r = (
        math.hypot(p1.x - cx, p1.y - cy)
        + math.hypot(p2.x - cx, p2.y - cy)
        + math.hypot(p3.x - cx, p3.y - cy)
    ) / 3.0
    return CircleModel(cx, cy, r)


def fit_minimal(family: str, points: Sequence[Point2D]) -> ModelHypothesis:
    """Instantiate a model from exactly its family's minimal sample.

    Raises DegenerateSample when the points do not determine a unique
    model (coincident points for lines, collinear for circles).
    """
    if family not in MINIMAL_ARITY:
        raise ValueError(f"unknown model family {family!r}")
    arity = MINIMAL_ARITY[family]
    if len(points) != arity:
        raise ValueError(f"{family} needs exactly {arity} points, got {len(points)}")
    if family == "line":
        params: LineModel | CircleModel = _fit_line(points[0], points[1])
    else:
        params = _fit_circle(points[0], points[1], points[2])
    return ModelHypothesis(family, params, tuple(p.id for p in points))


def residual(model: ModelHypothesis, point: Point2D) -> float:
    """Nonnegative distance of a point from the model."""
    p = model.params
    if model.family == "line":
        return abs(p.a * point.x + p.b * point.y + p.c)
    return abs(math.hypot(point.x - p.cx, point.y - p.cy) - p.r)


# --- serialization -----------------------------------------------------

def model_to_dict(model: ModelHypothesis) -> dict:
    p = model.params
    if model.family == "line":
        params = {"a": p.a, "b": p.b, "c": p.c}
    else:
        params = {"cx": p.cx, "cy": p.cy, "r": p.r}
    return {"family": model.family, "params": params, "source_ids": list(model.source_ids)}


def model_from_dict(record: dict) -> ModelHypothesis:
    family = record["family"]
    params = record["params"]
    if family == "line":
        model: LineModel | CircleModel = LineModel(params["a"], params["b"], params["c"])
    elif family == "circle":
        model = CircleModel(params["cx"], params["cy"], params["r"])
    else:
        raise ValueError(f"unknown model family {family!r}")
    return ModelHypothesis(family, model, tuple(int(i) for i in record["source_ids"]))


def save_points(path: str | Path, points: Sequence[Point2D], gt_labels=None) -> None:
    """Write a point set as JSON, optionally with ground-truth labels."""
    payload: dict = {"points": [{"id": p.id, "x": p.x, "y": p.y} for p in points]}
    if gt_labels is not None:
        if len(gt_labels) != len(points):
            raise ValueError("gt_labels length must match point count")
        payload["gt_labels"] = [int(l) for l in gt_labels]
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def load_points(path: str | Path) -> tuple[list[Point2D], list[int] | None]:
    payload = json.loads(Path(path).read_text())
    points = [Point2D(float(r["x"]), float(r["y"]), int(r["id"])) for r in payload["points"]]
    points.sort(key=lambda p: p.id)
    if [p.id for p in points] != list(range(len(points))):
        raise ValueError("point ids must be unique and contiguous from 0")
    labels = payload.get("gt_labels")
    if labels is not None:
        labels = [int(l) for l in labels]
    return points, labels
