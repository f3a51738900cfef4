"""Shared helpers: slow reference oracles and random instance factories.

The oracles deliberately avoid the package's vectorized code paths so
they can catch errors in them: energies via explicit Python loops,
minima via lexicographic enumeration, cluster matching via permutations.
"""

from __future__ import annotations

import itertools

import numpy as np

from qubofit.preference import PreferenceMatrix
from qubofit.qubo import Qubo


def slow_energy(quad, linear, offset, bits) -> float:
    total = float(offset)
    d = len(bits)
    for i in range(d):
        total += float(linear[i]) * bits[i]
        for j in range(d):
            total += bits[i] * float(quad[i][j]) * bits[j]
    return total


def slow_minimum(qubo: Qubo):
    """Lexicographic scan; returns (energy, first best bits, tie count)."""
    best_e = None
    best_bits = None
    ties = 0
    for bits in itertools.product((0, 1), repeat=qubo.dim):
        e = slow_energy(qubo.quadratic, qubo.linear, qubo.offset, bits)
        if best_e is None or e < best_e - 1e-12:
            best_e, best_bits, ties = e, bits, 1
        elif abs(e - best_e) <= 1e-12:
            ties += 1
    return best_e, np.array(best_bits, dtype=np.float64), ties


def slow_best_matching(pred, gt) -> float:
    """Error percent by trying every injective cluster matching."""
    pred = np.asarray(pred)
    gt = np.asarray(gt)
    p_ids = sorted({int(c) for c in pred if c >= 0})
    g_ids = sorted({int(c) for c in gt if c >= 0})
    best = 0
    small, large, flipped = (p_ids, g_ids, False)
    if len(p_ids) > len(g_ids):
        small, large, flipped = (g_ids, p_ids, True)
    for chosen in itertools.permutations(large, len(small)):
        matched = 0
        for a, b in zip(small, chosen):
            pa, ga = (b, a) if flipped else (a, b)
            matched += int(np.sum((pred == pa) & (gt == ga)))
        best = max(best, matched)
    return 100.0 * (pred.size - best) / pred.size


def random_qubo(rng: np.random.Generator, d: int) -> Qubo:
    raw = rng.normal(size=(d, d))
    quad = (raw + raw.T) / 2.0
    return Qubo(quad, rng.normal(size=d), float(rng.normal()))


def random_pref(rng: np.random.Generator, n: int, m: int) -> PreferenceMatrix:
    return PreferenceMatrix(rng.integers(0, 2, size=(n, m), dtype=np.uint8))
