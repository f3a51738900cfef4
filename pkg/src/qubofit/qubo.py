"""QUBO objective for disjoint set cover over a preference matrix.

Minimizing the number of selected models subject to covering every point
exactly once becomes, with the coverage constraint folded in as a squared
penalty, an unconstrained quadratic over binary variables:

    quadratic = penalty * (P^T P)
    linear    = 1 - 2 * penalty * (column consensus sizes)

For any binary selection z the identity

    energy(z) + penalty * n == (#selected) + penalty * ||P z - 1||^2

holds, so among feasible covers the energy ordering is the model-count
ordering.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch
from .preference import PreferenceMatrix

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class Qubo:
    """Symmetric quadratic coefficients, linear coefficients, constant offset.

    The offset is reported as part of every energy so reduced problems
    stay on the same energy scale as their parent.
    """

    quadratic: np.ndarray
    linear: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        quad = np.ascontiguousarray(self.quadratic, dtype=np.float64)
        lin = np.ascontiguousarray(self.linear, dtype=np.float64)
        if quad.ndim != 2 or quad.shape[0] != quad.shape[1]:
            raise ValueError("quadratic matrix must be square")
        if lin.shape != (quad.shape[0],):
            raise DimensionMismatch("linear vector length must match matrix dimension")
        if not (np.isfinite(quad).all() and np.isfinite(lin).all() and np.isfinite(self.offset)):
            raise ValueError("coefficients must be finite")
        if quad.size and np.abs(quad - quad.T).max() > SYMMETRY_TOL:
            raise ValueError("quadratic matrix must be symmetric")
        quad.setflags(write=False)
        lin.setflags(write=False)
        object.__setattr__(self, "quadratic", quad)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return self.quadratic.shape[0]

    def energy(self, bits) -> float:
        """Objective value of a binary assignment."""
        z = as_assignment(bits, self.dim)
        return float(z @ self.quadratic @ z + self.linear @ z + self.offset)


def as_assignment(bits, dim: int | None = None) -> np.ndarray:
    """Validate and convert a binary vector to a float64 array."""
    z = np.asarray(bits, dtype=np.float64).reshape(-1)
    if dim is not None and z.shape != (dim,):
        raise DimensionMismatch(f"assignment length {z.size} != {dim}")
    if not np.isin(z, (0.0, 1.0)).all():
        raise ValueError("assignment entries must be 0 or 1")
    return z


def build_mmf_qubo(pref: PreferenceMatrix, penalty: float) -> Qubo:
    """Disjoint set cover as a QUBO with the given penalty weight."""
    if penalty <= 0:
        raise ValueError("penalty must be positive")
    dense = pref.entries.astype(np.float64)
    quad = penalty * (dense.T @ dense)
    linear = 1.0 - 2.0 * penalty * dense.sum(axis=0)
    return Qubo(quad, linear, 0.0)


@dataclass(frozen=True)
class Reduction:
    """Result of clamping must-select variables to 1.

    ``kept`` maps reduced variable index -> original index; any optimum of
    ``reduced``, extended with ones at ``forced_ones``, attains the parent
    optimum.
    """

    forced_ones: tuple[int, ...]
    kept: tuple[int, ...]
    reduced: Qubo

    def expand(self, bits) -> np.ndarray:
        """Lift a reduced assignment back to the parent's variables."""
        z = as_assignment(bits, len(self.kept))
        full = np.zeros(len(self.forced_ones) + len(self.kept), dtype=np.float64)
        full[list(self.forced_ones)] = 1.0
        full[list(self.kept)] = z
        return full


def reduce_forced(pref: PreferenceMatrix, qubo: Qubo) -> Reduction:
    """Clamp isolated models that can only lower the energy.

    A model sharing no points with any other model has a zero off-diagonal
    row in P^T P, so its contribution decouples: selecting it changes the
    energy by exactly quadratic[i, i] + linear[i]. When that change is
    <= 0 (always the case for nonempty consensus and penalty > 1) the
    variable is 1 at some global optimum and can be removed from the
    search. Empty-consensus models are never forced.
    """
    if qubo.dim != pref.m:
        raise DimensionMismatch("qubo dimension must equal preference column count")
    overlap = pref.entries.astype(np.int64).T @ pref.entries.astype(np.int64)
    off_diag = overlap - np.diag(np.diag(overlap))
    isolated = (off_diag.sum(axis=1) == 0) & (np.diag(overlap) > 0)
    gain = np.diag(qubo.quadratic) + qubo.linear
    forced = np.flatnonzero(isolated & (gain <= 0.0))
    kept = np.array([j for j in range(qubo.dim) if j not in set(forced.tolist())], dtype=np.int64)

    ones = np.zeros(qubo.dim)
    ones[forced] = 1.0
    # Fold the clamped block into the offset and the kept linear terms.
    offset = float(qubo.offset + ones @ qubo.quadratic @ ones + qubo.linear @ ones)
    quad = qubo.quadratic[np.ix_(kept, kept)]
    linear = qubo.linear[kept] + 2.0 * (qubo.quadratic[np.ix_(kept, forced)] @ np.ones(len(forced)))
    return Reduction(
        tuple(int(j) for j in forced),
        tuple(int(j) for j in kept),
        Qubo(quad, linear, offset),
    )


# --- serialization -----------------------------------------------------

def qubo_to_json(qubo: Qubo, path: str | Path) -> None:
    """Upper-triangle coefficient list; floats keep full precision."""
    triples = []
    for i in range(qubo.dim):
        for j in range(i, qubo.dim):
            val = qubo.quadratic[i, j]
            if val != 0.0:
                triples.append([i, j, float(val)])
    payload = {
        "d": qubo.dim,
        "q": triples,
        "s": [float(v) for v in qubo.linear],
        "offset": qubo.offset,
    }
    Path(path).write_text(json.dumps(payload) + "\n")


def qubo_from_json(path: str | Path) -> Qubo:
    payload = json.loads(Path(path).read_text())
    dim = int(payload["d"])
    quad = np.zeros((dim, dim))
    for i, j, val in payload["q"]:
        quad[int(i), int(j)] = val
        quad[int(j), int(i)] = val
    return Qubo(quad, np.array(payload["s"], dtype=np.float64), float(payload["offset"]))
