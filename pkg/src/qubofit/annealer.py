"""Samplers over QUBO problems.

Two backends: multi-anneal simulated annealing (Metropolis single-flip
sweeps over a geometric inverse-temperature schedule) and exhaustive
enumeration as a global-optimum oracle for small instances. Both return a
SampleSet whose lowest-energy member is the answer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, TooLarge
from .qubo import Qubo, as_assignment
from .seeding import rng_for

EXHAUSTIVE_GUARD = 25
ENERGY_TOL = 1e-9


@dataclass(frozen=True)
class AnnealConfig:
    """Schedule and replication parameters for one sampling run.

    Anneal k draws its initial state and acceptance randomness from a
    substream keyed by (seed, k), so serial and concurrent execution are
    bit-identical.
    """

    num_anneals: int = 100
    sweeps_per_anneal: int = 1000
    beta_start: float = 0.1
    beta_end: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.num_anneals < 1:
            raise ValueError("num_anneals must be >= 1")
        if self.sweeps_per_anneal < 1:
            raise ValueError("sweeps_per_anneal must be >= 1")
        if not 0 < self.beta_start < self.beta_end:
            raise ValueError("need 0 < beta_start < beta_end")


@dataclass(frozen=True)
class SampleSet:
    """Aggregated sampler output, sorted by energy then lexicographic bits."""

    assignments: tuple[np.ndarray, ...]
    energies: tuple[float, ...]
    multiplicities: tuple[int, ...]
    best: int = 0

    @property
    def best_assignment(self) -> np.ndarray:
        return self.assignments[self.best]

    @property
    def best_energy(self) -> float:
        return self.energies[self.best]

    @property
    def num_reads(self) -> int:
        return sum(self.multiplicities)


def _aggregate(qubo: Qubo, finals: list[np.ndarray]) -> SampleSet:
    counts: dict[tuple[int, ...], int] = {}
    for z in finals:
        key = tuple(int(b) for b in z)
        counts[key] = counts.get(key, 0) + 1
    rows = []
    for key, mult in counts.items():
        z = np.array(key, dtype=np.float64)
        rows.append((qubo.energy(z), key, z, mult))
    rows.sort(key=lambda r: (r[0], r[1]))
    return SampleSet(
        assignments=tuple(r[2] for r in rows),
        energies=tuple(r[0] for r in rows),
        multiplicities=tuple(r[3] for r in rows),
        best=0,
    )


def _anneal_kernel(quad, linear, bits, betas, uniforms, trace):
    # Single anneal: fixed 0..d-1 flip order per sweep, one uniform per
    # attempt. Local field h tracks quad @ bits incrementally.
    d = bits.size
    h = np.dot(quad, bits)
    energy = np.dot(bits, h) + np.dot(linear, bits)
    best = energy
    for t in range(betas.size):
        beta = betas[t]
        for i in range(d):
            delta = 1.0 - 2.0 * bits[i]
            diff = delta * (quad[i, i] + linear[i] + 2.0 * (h[i] - quad[i, i] * bits[i]))
            if diff <= 0.0 or uniforms[t, i] < np.exp(-beta * diff):
                bits[i] += delta
                energy += diff
                for j in range(d):
                    h[j] += delta * quad[j, i]
                if energy < best:
                    best = energy
        trace[t] = best


_compiled_kernel = None


def _kernel():
    global _compiled_kernel
    if _compiled_kernel is None:
        import numba

        _compiled_kernel = numba.njit(cache=True)(_anneal_kernel)
    return _compiled_kernel


def sample_sa(qubo: Qubo, config: AnnealConfig, return_traces: bool = False):
    """Run independent anneals and collect the final state of each.

    Returns a SampleSet; with ``return_traces`` also an array of shape
    (num_anneals, sweeps) holding the best-so-far energy at the end of
    every sweep, in anneal order.
    """
    if qubo.dim < 1:
        raise DimensionMismatch("sampler needs at least one variable")
    kernel = _kernel()
    betas = np.geomspace(config.beta_start, config.beta_end, config.sweeps_per_anneal)
    traces = np.empty((config.num_anneals, config.sweeps_per_anneal))
    finals = []
    for k in range(config.num_anneals):
        rng = rng_for(config.seed, k)
        bits = rng.integers(0, 2, size=qubo.dim).astype(np.float64)
        uniforms = rng.random((config.sweeps_per_anneal, qubo.dim))
        kernel(qubo.quadratic, qubo.linear, bits, betas, uniforms, traces[k])
        finals.append(bits)
    result = _aggregate(qubo, finals)
    return (result, traces) if return_traces else result


def sample_exhaustive(qubo: Qubo, chunk_bits: int = 16) -> SampleSet:
    """Enumerate all assignments; exact global optimum for small problems.

    Ties break toward the lexicographically smallest bit vector. Only the
    optimum is retained; its multiplicity counts the number of optimal
    assignments.
    """
    d = qubo.dim
    if d > EXHAUSTIVE_GUARD:
        raise TooLarge(f"exhaustive enumeration refuses d={d} > {EXHAUSTIVE_GUARD}")
    if d == 0:
        empty = np.zeros(0, dtype=np.float64)
        return SampleSet((empty,), (qubo.offset,), (1,), 0)

    # Enumeration index i maps to bits with z_0 as the most significant
    # bit, so increasing i is lexicographic order over assignments.
    shifts = np.arange(d - 1, -1, -1, dtype=np.uint64)
    best_energy = np.inf
    best_index = 0
    ties = 0
    chunk = 1 << min(chunk_bits, d)
    for start in range(0, 1 << d, chunk):
        idx = np.arange(start, min(start + chunk, 1 << d), dtype=np.uint64)
        bits = ((idx[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.float64)
        energies = ((bits @ qubo.quadratic) * bits).sum(axis=1) + bits @ qubo.linear + qubo.offset
        local_min = energies.min()
        if local_min < best_energy:
            best_energy = local_min
            best_index = start + int(np.argmin(energies))
            ties = int((energies == local_min).sum())
        elif local_min == best_energy:
            ties += int((energies == local_min).sum())
    best_bits = ((np.uint64(best_index) >> shifts) & np.uint64(1)).astype(np.float64)
    return SampleSet((best_bits,), (qubo.energy(best_bits),), (ties,), 0)


def optimal_solution_probability(qubo: Qubo, config: AnnealConfig, reference_energy: float) -> float:
    """Fraction of anneals whose final state reaches the known optimum."""
    result = sample_sa(qubo, config)
    hits = sum(
        mult
        for energy, mult in zip(result.energies, result.multiplicities)
        if energy <= reference_energy + ENERGY_TOL
    )
    return hits / config.num_anneals


def sample_set_to_json(result: SampleSet, path: str | Path) -> None:
    payload = {
        "samples": [
            {
                "bits": "".join(str(int(b)) for b in z),
                "energy": float(e),
                "multiplicity": int(mult),
            }
            for z, e, mult in zip(result.assignments, result.energies, result.multiplicities)
        ],
        "best": result.best,
    }
    Path(path).write_text(json.dumps(payload) + "\n")


def sample_set_from_json(path: str | Path) -> SampleSet:
    payload = json.loads(Path(path).read_text())
    assignments = []
    energies = []
    mults = []
    for rec in payload["samples"]:
        assignments.append(as_assignment([int(ch) for ch in rec["bits"]]))
        energies.append(float(rec["energy"]))
        mults.append(int(rec["multiplicity"]))
    return SampleSet(tuple(assignments), tuple(energies), tuple(mults), int(payload["best"]))
