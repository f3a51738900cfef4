"""Synthetic star datasets and random hypothesis pools.

The star generator places k vertices on the unit circle and connects
vertex i to vertex i+q, where q is the largest skip not exceeding k//2
that is coprime with k (for k=5 this draws the pentagram). Points are
sampled uniformly along the segments and jittered with isotropic
Gaussian noise. Hypothesis pools mix the ground-truth lines with models
fit to random minimal samples, then shuffle so position reveals nothing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DegenerateSample, ExhaustedRedraws, InvalidSpec
from .geometry import (
    MINIMAL_ARITY,
    ModelHypothesis,
    Point2D,
    fit_minimal,
    model_from_dict,
    model_to_dict,
    residual,
)
from .seeding import rng_for

MAX_REDRAWS = 1000

# Distinct stream tags so a shared raw seed cannot alias the two stages.
_STAR_STREAM = 1
_POOL_STREAM = 2


@dataclass(frozen=True)
class SyntheticSpec:
    n: int
    k: int = 5
    noise_sigma: float = 0.0075
    seed: int = 0
    family: str = "line"


@dataclass(frozen=True)
class HypothesisPoolSpec:
    m: int
    include_ground_truth: bool = True
    seed: int = 0


def _star_segments(k: int) -> list[tuple[np.ndarray, np.ndarray]]:
    # k < 3 has no star polygon; fall back to crossing unit segments.
    if k == 1:
        return [(np.array([-1.0, 0.0]), np.array([1.0, 0.0]))]
    if k == 2:
        return [
            (np.array([-1.0, 0.0]), np.array([1.0, 0.0])),
            (np.array([0.0, -1.0]), np.array([0.0, 1.0])),
        ]
    skip = k // 2
    while math.gcd(k, skip) != 1:
        skip -= 1
    angles = 2.0 * math.pi * np.arange(k) / k
    verts = np.column_stack([np.cos(angles), np.sin(angles)])
    return [(verts[i], verts[(i + skip) % k]) for i in range(k)]


def _segment_line(a: np.ndarray, b: np.ndarray) -> ModelHypothesis:
    # Synthetic endpoints are not dataset points; negative ids mark that.
    return fit_minimal(
        "line",
        (Point2D(float(a[0]), float(a[1]), -1), Point2D(float(b[0]), float(b[1]), -2)),
    )


def generate_star(
    spec: SyntheticSpec,
) -> tuple[list[Point2D], list[int], list[ModelHypothesis]]:
    """Sample points along a k-armed star; returns (points, labels, models).

    Labels give each point's generating segment. Positions are uniform
    along the segment plus isotropic Gaussian jitter, redrawn until the
    point sits within 4*sigma of its own line and at least 4*sigma from
    every other one, so structure memberships never overlap: the data
    a disjoint-cover objective presumes (no outliers, no points shared
    between structures).
    """
    if spec.family != "line":
        raise InvalidSpec(f"unsupported family {spec.family!r}")
    if spec.k < 1:
        raise InvalidSpec("k must be >= 1")
    if spec.n < 2 * spec.k:
        raise InvalidSpec("need at least two points per structure")
    if spec.noise_sigma < 0:
        raise InvalidSpec("noise_sigma must be nonnegative")

    segments = _star_segments(spec.k)
    models = [_segment_line(a, b) for a, b in segments]
    sep = 4.0 * spec.noise_sigma
    base, extra = divmod(spec.n, spec.k)
    rng = rng_for(spec.seed, _STAR_STREAM)
    points: list[Point2D] = []
    labels: list[int] = []
    for idx, (a, b) in enumerate(segments):
        count = base + (1 if idx < extra else 0)
        others = [models[j] for j in range(spec.k) if j != idx]
        for _ in range(count):
            for attempt in range(MAX_REDRAWS):
                t = rng.random()
                xy = a + t * (b - a) + rng.normal(0.0, spec.noise_sigma, size=2)
                candidate = Point2D(float(xy[0]), float(xy[1]), len(points))
                # 1e-12 slack keeps noiseless points (residual ~ float dust)
                # from failing their own-line check.
                if residual(models[idx], candidate) > sep + 1e-12:
                    continue
                if all(residual(h, candidate) > sep for h in others):
                    break
            else:
                raise InvalidSpec("structures too entangled to separate points")
            points.append(candidate)
            labels.append(idx)
    return points, labels, models


def sample_hypotheses(
    points: Sequence[Point2D],
    gt_models: Sequence[ModelHypothesis],
    spec: HypothesisPoolSpec,
) -> list[ModelHypothesis]:
    """Build a shuffled pool of m hypotheses.

    Ground-truth models (when included) are joined by models fit to
    uniform random minimal samples of the points; degenerate samples are
    redrawn, up to MAX_REDRAWS consecutive failures.
    """
    k = len(gt_models) if spec.include_ground_truth else 0
    if spec.m < max(k, 1):
        raise InvalidSpec("pool too small")
    family = gt_models[0].family if gt_models else "line"
    arity = MINIMAL_ARITY[family]
    if len(points) < arity:
        raise InvalidSpec("not enough points for a minimal sample")

    rng = rng_for(spec.seed, _POOL_STREAM)
    pool: list[ModelHypothesis] = list(gt_models) if spec.include_ground_truth else []
    failures = 0
    while len(pool) < spec.m:
        picks = rng.choice(len(points), size=arity, replace=False)
        try:
            pool.append(fit_minimal(family, [points[i] for i in picks]))
        except DegenerateSample:
            failures += 1
            if failures >= MAX_REDRAWS:
                raise ExhaustedRedraws(
                    f"{failures} consecutive degenerate samples"
                ) from None
            continue
        failures = 0
    order = rng.permutation(spec.m)
    return [pool[i] for i in order]


def save_models(path: str | Path, models: Sequence[ModelHypothesis]) -> None:
    payload = {"models": [model_to_dict(h) for h in models]}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_models(path: str | Path) -> list[ModelHypothesis]:
    payload = json.loads(Path(path).read_text())
    return [model_from_dict(rec) for rec in payload["models"]]
