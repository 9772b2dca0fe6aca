"""Shared test utilities: random population builders and independent oracles.

The oracles here are deliberately written against the raw definitions
(pure-int SplitMix64, hand-rolled delta-method error) so the package is
checked by code that does not share its implementation.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from ivdeck import (
    ComplianceKind,
    GeneratorSpec,
    Population,
    classify_stochastic,
    generate_population,
)

_MASK64 = (1 << 64) - 1


def random_defier_free_spec(rng: random.Random, max_n: int = 50) -> GeneratorSpec:
    """Deterministic mix with at least one complier and no defiers."""
    n = rng.randint(1, max_n)
    n_complier = rng.randint(1, n)
    n_always = rng.randint(0, n - n_complier)
    n_never = n - n_complier - n_always
    return GeneratorSpec(
        kind="deterministic_mix",
        n=n,
        seed=rng.getrandbits(32),
        complier=Fraction(n_complier, n),
        always_taker=Fraction(n_always, n),
        never_taker=Fraction(n_never, n),
    )


def random_mixed_spec(rng: random.Random, max_n: int = 50) -> GeneratorSpec:
    """Deterministic mix with at least one complier, defiers allowed."""
    n = rng.randint(1, max_n)
    n_complier = rng.randint(1, n)
    n_defier = rng.randint(0, n - n_complier)
    n_always = rng.randint(0, n - n_complier - n_defier)
    n_never = n - n_complier - n_defier - n_always
    return GeneratorSpec(
        kind="deterministic_mix",
        n=n,
        seed=rng.getrandbits(32),
        complier=Fraction(n_complier, n),
        defier=Fraction(n_defier, n),
        always_taker=Fraction(n_always, n),
        never_taker=Fraction(n_never, n),
    )


def random_defier_free_population(rng: random.Random, max_n: int = 50) -> Population:
    return generate_population(random_defier_free_spec(rng, max_n))


def random_mixed_population(rng: random.Random, max_n: int = 50) -> Population:
    return generate_population(random_mixed_spec(rng, max_n))


def random_monotone_population(
    rng: random.Random, max_n: int = 50, grid_denominator: int = 1000
) -> Population:
    """stochastic_monotone population with at least one strict complier."""
    while True:
        spec = GeneratorSpec(
            kind="stochastic_monotone",
            n=rng.randint(1, max_n),
            seed=rng.getrandbits(32),
            grid_denominator=grid_denominator,
        )
        pop = generate_population(spec)
        if any(
            classify_stochastic(ind).kind is ComplianceKind.COMPLIER for ind in pop
        ):
            return pop


def splitmix_word(key: int, counter: int) -> int:
    """Reference SplitMix64 output word, pure Python ints."""
    z = (key + counter * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def splitmix_unit(word: int) -> float:
    return (word >> 11) * 2.0**-53


def reference_records(params, assign_prob: float, n: int, seed: int, offset: int = 0):
    """Scalar reference implementation of the record sampler.

    params: list of (t, t_star, c, c_star) floats. Returns four lists.
    """
    key = seed & _MASK64
    size = len(params)
    out_u, out_a, out_t, out_c = [], [], [], []
    for i in range(offset, offset + n):
        base = 4 * i
        u = splitmix_word(key, base + 1) % size
        a = int(splitmix_unit(splitmix_word(key, base + 2)) < assign_prob)
        t_prob = params[u][0] if a else params[u][1]
        t = int(splitmix_unit(splitmix_word(key, base + 3)) < t_prob)
        c_prob = params[u][2] if t else params[u][3]
        c = int(splitmix_unit(splitmix_word(key, base + 4)) < c_prob)
        out_u.append(u)
        out_a.append(a)
        out_t.append(t)
        out_c.append(c)
    return out_u, out_a, out_t, out_c


def propagated_se(
    p_cure_assign1: float,
    p_cure_assign0: float,
    p_take_assign1: float,
    p_take_assign0: float,
    p_curetake_assign1: float,
    p_curetake_assign0: float,
    n1: int,
    n0: int,
) -> float:
    """Delta-method standard error of the ratio estimator.

    Evaluated at the exact probabilities with the realized arm sizes;
    p_curetake_assignA is Pr(Cure=1, Take=1 | Assign=A), which fixes the
    within-arm covariance between the cure and take frequencies.
    """
    x, y = float(p_cure_assign1), float(p_cure_assign0)
    u, v = float(p_take_assign1), float(p_take_assign0)
    denominator = u - v
    ratio = (x - y) / denominator
    cov1 = float(p_curetake_assign1) - x * u
    cov0 = float(p_curetake_assign0) - y * v
    arm1 = (x * (1 - x) + ratio**2 * u * (1 - u) - 2 * ratio * cov1) / n1
    arm0 = (y * (1 - y) + ratio**2 * v * (1 - v) - 2 * ratio * cov0) / n0
    return math.sqrt((arm1 + arm0) / denominator**2)
