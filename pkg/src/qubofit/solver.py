"""Multi-model fitting orchestration.

``qumf`` solves one QUBO built from the whole preference matrix.
``dequmf`` handles large pools by repeatedly partitioning the columns,
solving each group against all points, and keeping only the columns its
group's solution selected, until one directly solvable problem remains.
``extract_single_model`` reduces a selection to the single model with the
largest consensus for single-structure data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .annealer import AnnealConfig, SampleSet, sample_exhaustive, sample_sa
from .errors import EmptySelection, StalledPruning
from .geometry import ModelHypothesis, model_to_dict
from .preference import PreferenceMatrix, consensus_size, restrict_columns
from .qubo import build_mmf_qubo, reduce_forced
from .seeding import derive_seed, substream

BACKENDS = ("sa", "exhaustive")


@dataclass(frozen=True)
class DecompositionConfig:
    subproblem_size: int = 40
    partition_seed: int = 0

    def __post_init__(self):
        if self.subproblem_size < 2:
            raise ValueError("subproblem_size must be >= 2")


@dataclass(frozen=True)
class SolveConfig:
    penalty: float = 1.1
    backend: str = "sa"
    anneal: AnnealConfig = field(default_factory=AnnealConfig)
    decomposition: DecompositionConfig | None = None

    def __post_init__(self):
        if self.penalty <= 0:
            raise ValueError("penalty must be positive")
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}")


@dataclass(frozen=True)
class ModelSelection:
    """Selected column indices with the energy of that selection.

    ``iterations`` counts pruning rounds (0 for a direct solve);
    ``history`` records the surviving column count after each round.
    """

    selected: tuple[int, ...]
    final_energy: float
    iterations: int = 0
    history: tuple[int, ...] = ()

    def to_dict(self, models: Sequence[ModelHypothesis] | None = None) -> dict:
        payload = {
            "selected": list(self.selected),
            "energy": self.final_energy,
            "iterations": self.iterations,
            "history": list(self.history),
        }
        if models is not None:
            payload["models"] = [model_to_dict(models[j]) for j in self.selected]
        return payload


def _sample_backend(qubo, cfg: SolveConfig, anneal: AnnealConfig) -> SampleSet:
    if cfg.backend == "exhaustive":
        return sample_exhaustive(qubo)
    return sample_sa(qubo, anneal)


def qumf(
    pref: PreferenceMatrix,
    cfg: SolveConfig,
    return_samples: bool = False,
):
    """Solve the full set-cover QUBO in one sweep.

    Isolated models are clamped beforehand; the reported energy is always
    on the parent problem's scale.
    """
    if cfg.decomposition is not None:
        raise ValueError("qumf does not take a decomposition; use dequmf")
    qubo = build_mmf_qubo(pref, cfg.penalty)
    reduction = reduce_forced(pref, qubo)
    samples = None
    if reduction.reduced.dim == 0:
        full = reduction.expand(np.zeros(0))
    else:
        samples = _sample_backend(reduction.reduced, cfg, cfg.anneal)
        full = reduction.expand(samples.best_assignment)
    selection = ModelSelection(
        selected=tuple(int(j) for j in np.flatnonzero(full == 1.0)),
        final_energy=qubo.energy(full),
    )
    return (selection, samples) if return_samples else selection


def column_partition(m: int, size: int, seed) -> list[np.ndarray]:
    """Seeded random partition of 0..m-1 into groups of the given size.

    All groups have exactly ``size`` members except possibly the last.
    ``seed`` may be an int or a numpy SeedSequence.
    """
    if m <= size:
        raise ValueError("partition needs more columns than the group size")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(m)
    return [perm[start : start + size] for start in range(0, m, size)]


def _subproblem_config(cfg: SolveConfig, round_index: int, group_index: int) -> AnnealConfig:
    # Distinct anneal streams per (round, group); deterministic for a
    # fixed config regardless of solve order.
    derived = derive_seed(cfg.anneal.seed, 1 + round_index, group_index)
    return AnnealConfig(
        num_anneals=cfg.anneal.num_anneals,
        sweeps_per_anneal=cfg.anneal.sweeps_per_anneal,
        beta_start=cfg.anneal.beta_start,
        beta_end=cfg.anneal.beta_end,
        seed=derived,
    )


def dequmf(pref: PreferenceMatrix, cfg: SolveConfig) -> ModelSelection:
    """Iteratively prune the column pool down to one solvable problem.

    Each round partitions the surviving columns afresh, solves every
    group's sub-matrix (all rows, the group's columns), and discards
    columns not selected by their group's solution. Raises StalledPruning
    if a round removes nothing.
    """
    if cfg.decomposition is None:
        raise ValueError("dequmf requires a decomposition config")
    size = cfg.decomposition.subproblem_size
    base_cfg = SolveConfig(cfg.penalty, cfg.backend, cfg.anneal, None)
    survivors = np.arange(pref.m)
    history: list[int] = []
    round_index = 0
    while survivors.size > size:
        current = restrict_columns(pref, survivors)
        groups = column_partition(
            survivors.size, size, substream(cfg.decomposition.partition_seed, round_index)
        )
        keep: list[int] = []
        for gi, group in enumerate(groups):
            sub = restrict_columns(current, group)
            sub_cfg = SolveConfig(
                cfg.penalty, cfg.backend, _subproblem_config(cfg, round_index, gi), None
            )
            sub_sel = qumf(sub, sub_cfg)
            keep.extend(int(survivors[group[p]]) for p in sub_sel.selected)
        if len(keep) == survivors.size:
            raise StalledPruning(survivors)
        if not keep:
            # Every group selected nothing: no column is worth keeping.
            return ModelSelection((), 0.0, round_index + 1, tuple(history) + (0,))
        survivors = np.array(sorted(keep))
        history.append(survivors.size)
        round_index += 1
    final = qumf(restrict_columns(pref, survivors), base_cfg)
    return ModelSelection(
        selected=tuple(int(survivors[p]) for p in final.selected),
        final_energy=final.final_energy,
        iterations=round_index,
        history=tuple(history),
    )


def extract_single_model(
    pref: PreferenceMatrix, selection: ModelSelection
) -> tuple[int, list[int], list[int]]:
    """Keep only the selected model with the largest consensus set.

    Returns (model index, inlier point ids, outlier point ids); points
    outside the winner's consensus are outliers. Consensus ties go to the
    lowest model index.
    """
    if not selection.selected:
        raise EmptySelection("selection contains no models")
    winner = max(selection.selected, key=lambda j: (consensus_size(pref, j), -j))
    mask = pref.entries[:, winner] == 1
    ids = [p.id for p in pref.points] if pref.points is not None else list(range(pref.n))
    inliers = [ids[i] for i in np.flatnonzero(mask)]
    outliers = [ids[i] for i in np.flatnonzero(~mask)]
    return winner, inliers, outliers
