"""Reproducible population generators.

Three families: deterministic_mix (exact class counts from fractions,
random cure bits), stochastic_random (all four probabilities uniform on
a fixed rational grid), stochastic_monotone (same, but the take pair is
sorted so nobody is a defier). Everything is driven by a named seed;
identical specs produce identical populations.

Generated probabilities live on the grid k/grid_denominator, so
exact-mode identities stay exact and denominators never blow up.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidFractionsError, InvalidParamsError
from .numeric import Prob
from .population import DeterministicIndividual, Population, StochasticIndividual

KINDS = ("deterministic_mix", "stochastic_random", "stochastic_monotone")

#: (take_if_assigned1, take_if_assigned0) per deterministic class, in the
#: order the mix generator emits them
_TAKE_PAIRS = (
    ("complier", 1, 0),
    ("defier", 0, 1),
    ("always_taker", 1, 1),
    ("never_taker", 0, 0),
)


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters for generate_population.

    The class fractions apply to deterministic_mix only and must resolve
    to integer counts of n; whatever they leave unallocated goes to
    never-takers. grid_denominator applies to the stochastic kinds.
    """

    kind: str
    n: int
    seed: int = 0
    complier: Prob = 0
    defier: Prob = 0
    always_taker: Prob = 0
    never_taker: Prob = 0
    grid_denominator: int = 1000
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParamsError(
                "kind must be one of %s, got %r" % ("/".join(KINDS), self.kind)
            )
        if self.n < 1:
            raise InvalidParamsError("n must be >= 1, got %r" % (self.n,))
        if self.grid_denominator < 1:
            raise InvalidParamsError(
                "grid_denominator must be >= 1, got %r" % (self.grid_denominator,)
            )
        total = Fraction(0)
        for label in ("complier", "defier", "always_taker", "never_taker"):
            value = getattr(self, label)
            try:
                value = Fraction(value)
            except (TypeError, ValueError) as exc:
                raise InvalidFractionsError(
                    "%s fraction %r is not a rational number" % (label, value)
                ) from exc
            if value < 0:
                raise InvalidFractionsError(
                    "%s fraction must be >= 0, got %r" % (label, value)
                )
            total += value
        if total > 1:
            raise InvalidFractionsError(
                "class fractions must sum to at most 1, got %s" % (total,)
            )

    def display_name(self) -> str:
        return self.name or "%s-n%d-seed%d" % (self.kind, self.n, self.seed)


def _class_counts(spec: GeneratorSpec) -> dict:
    counts = {}
    for label in ("complier", "defier", "always_taker", "never_taker"):
        share = Fraction(getattr(spec, label)) * spec.n
        if share.denominator != 1:
            raise InvalidFractionsError(
                "%s fraction times n=%d is %s, not an integer; use exact "
                "fractions such as '1/4'" % (label, spec.n, share)
            )
        counts[label] = int(share)
    counts["never_taker"] += spec.n - sum(counts.values())
    return counts


def generate_population(spec: GeneratorSpec) -> Population:
    """Build the population a spec describes; pure function of the spec."""
    rng = random.Random(spec.seed)
    name = spec.display_name()

    if spec.kind == "deterministic_mix":
        counts = _class_counts(spec)
        individuals = []
        for label, take1, take0 in _TAKE_PAIRS:
            for _ in range(counts[label]):
                individuals.append(
                    DeterministicIndividual(
                        take_if_assigned1=take1,
                        take_if_assigned0=take0,
                        cure_if_take1=rng.getrandbits(1),
                        cure_if_take0=rng.getrandbits(1),
                    )
                )
        return Population(tuple(individuals), name=name)

    d = spec.grid_denominator
    grid = lambda: Fraction(rng.randint(0, d), d)  # noqa: E731
    individuals = []
    for _ in range(spec.n):
        if spec.kind == "stochastic_random":
            t, t_star = grid(), grid()
        else:  # stochastic_monotone: sort the take pair, no defiers
            first, second = grid(), grid()
            t, t_star = max(first, second), min(first, second)
        individuals.append(
            StochasticIndividual(t=t, t_star=t_star, c=grid(), c_star=grid())
        )
    return Population(tuple(individuals), name=name)


def defier_mix_spec(n: int, defier_fraction: Prob, seed: int = 0) -> GeneratorSpec:
    """Spec family for violation sweeps, parameterized by defier share.

    The defier fraction must resolve to an integer count; the remaining
    individuals are split deterministically into half compliers, a
    quarter always-takers and the rest never-takers (integer division,
    compliers rounded up so there is always at least one).
    """
    share = Fraction(defier_fraction)
    if not 0 <= share < 1:
        raise InvalidFractionsError(
            "defier fraction must lie in [0, 1), got %s" % (share,)
        )
    n_defier = share * n
    if n_defier.denominator != 1:
        raise InvalidFractionsError(
            "defier fraction %s times n=%d is not an integer" % (share, n)
        )
    n_defier = int(n_defier)
    rest = n - n_defier
    if rest < 1:
        raise InvalidFractionsError(
            "defier fraction %s leaves no room for a complier in n=%d" % (share, n)
        )
    n_complier = (rest + 1) // 2
    n_always = (rest - n_complier) // 2
    n_never = rest - n_complier - n_always
    return GeneratorSpec(
        kind="deterministic_mix",
        n=n,
        seed=seed,
        complier=Fraction(n_complier, n),
        defier=Fraction(n_defier, n),
        always_taker=Fraction(n_always, n),
        never_taker=Fraction(n_never, n),
        name="defier-mix-%s-n%d-seed%d" % (share, n, seed),
    )
