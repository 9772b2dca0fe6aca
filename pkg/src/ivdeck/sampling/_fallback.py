"""Vectorized NumPy implementation of the record sampler.

Must stay bit-for-bit identical to the compiled kernel. Both realize the
same counter-mode SplitMix64 stream: record i consumes stream words
4i+1 .. 4i+4 (latent index, assignment, take, cure), where word k of the
stream seeded with `key` is finalize(key + k * GOLDEN). A dataset is
therefore a pure function of (seed, record index): chunking the index
range across workers or switching backends cannot change a single byte.

Uniform doubles are (word >> 11) * 2**-53, always strictly below 1.0, so
comparing against a probability of exactly 0.0 or 1.0 never draws the
wrong side. That is what makes lifted deterministic populations realize
their potential outcomes exactly.

Everything stays in explicit uint64 dtype; mixing Python ints into NumPy
scalar arithmetic would silently promote to float64 and corrupt the
stream.
"""

from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U53 = 1.0 / 9007199254740992.0  # 2**-53


def _words(key: np.uint64, counters: np.ndarray) -> np.ndarray:
    z = key + counters * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _unit(words: np.ndarray) -> np.ndarray:
    return (words >> np.uint64(11)).astype(np.float64) * _U53


def sample_records(t, t_star, c, c_star, assign_prob, n, seed, offset=0):
    """Draw records [offset, offset+n) of the stream for one population.

    t, t_star, c, c_star: float64 arrays of per-individual probabilities.
    Returns (latent_u int64, assign uint8, take uint8, cure uint8).
    """
    key = np.uint64(seed & _MASK64)
    with np.errstate(over="ignore"):
        base = np.arange(offset, offset + n, dtype=np.uint64) * np.uint64(4)
        u = (_words(key, base + np.uint64(1)) % np.uint64(len(t))).astype(np.int64)
        assign = _unit(_words(key, base + np.uint64(2))) < assign_prob
        p_take = np.where(assign, t[u], t_star[u])
        take = _unit(_words(key, base + np.uint64(3))) < p_take
        p_cure = np.where(take, c[u], c_star[u])
        cure = _unit(_words(key, base + np.uint64(4))) < p_cure
    return u, assign.astype(np.uint8), take.astype(np.uint8), cure.astype(np.uint8)
