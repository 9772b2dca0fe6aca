"""Individuals, populations, and compliance classification.

A *deterministic* individual carries four binary potential outcomes:
whether they would take the treatment under assignment to each trial arm,
and whether they would be cured with and without taking it. A *stochastic*
individual carries the same four answers as probabilities in [0, 1]; a
probability may be given as the exact proportion of an explicit deck of
0/1 cards. Deterministic populations embed into stochastic ones as the
degenerate case where every probability is 0 or 1 (`lift_deterministic`),
and every operation downstream commutes with that embedding.

All outcome fields are per-individual constants: nothing here may depend
on another individual's assignment or behavior, which is what keeps the
classification and the effect definitions well posed.

Probabilities are `fractions.Fraction` (or int) in exact mode and floats
in Monte Carlo mode; see `ivdeck.numeric` for how tolerances follow suit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, Optional, Sequence, Union

from .errors import InvalidParamsError
from .numeric import Prob, default_tol

_BINARY = (0, 1)


def deck_proportion(cards: Sequence[int]) -> Fraction:
    """Exact proportion of 1-cards in a non-empty deck of 0/1 cards."""
    if len(cards) == 0:
        raise InvalidParamsError("a deck must contain at least one card")
    for card in cards:
        if card not in _BINARY:
            raise InvalidParamsError("deck cards must be 0 or 1, got %r" % (card,))
    return Fraction(sum(cards), len(cards))


@dataclass(frozen=True)
class DeterministicIndividual:
    """Four binary potential outcomes for one individual.

    take_if_assigned1 / take_if_assigned0: would they take the treatment
    under assignment to the treatment / control arm. cure_if_take1 /
    cure_if_take0: would they be cured if they took / did not take it.
    """

    take_if_assigned1: int
    take_if_assigned0: int
    cure_if_take1: int
    cure_if_take0: int

    def __post_init__(self):
        for name in (
            "take_if_assigned1",
            "take_if_assigned0",
            "cure_if_take1",
            "cure_if_take0",
        ):
            value = getattr(self, name)
            if value not in _BINARY:
                raise InvalidParamsError("%s must be 0 or 1, got %r" % (name, value))
            if isinstance(value, bool):
                object.__setattr__(self, name, int(value))


@dataclass(frozen=True)
class StochasticIndividual:
    """Counterfactual take/cure probabilities for one individual.

    t / t_star: probability of taking the treatment if assigned to the
    treatment / control arm. c / c_star: probability of cure if the
    treatment is / is not taken.
    """

    t: Prob
    t_star: Prob
    c: Prob
    c_star: Prob

    def __post_init__(self):
        for name in ("t", "t_star", "c", "c_star"):
            value = getattr(self, name)
            if isinstance(value, bool):
                value = int(value)
                object.__setattr__(self, name, value)
            if not isinstance(value, (int, float, Fraction)):
                raise InvalidParamsError(
                    "%s must be a number in [0, 1], got %r" % (name, value)
                )
            if not 0 <= value <= 1:
                raise InvalidParamsError(
                    "%s must lie in [0, 1], got %r" % (name, value)
                )

    @classmethod
    def from_decks(
        cls,
        take_if_assigned1: Sequence[int],
        take_if_assigned0: Sequence[int],
        cure_if_take1: Sequence[int],
        cure_if_take0: Sequence[int],
    ) -> "StochasticIndividual":
        """Build from explicit decks; each probability is the exact
        proportion of 1-cards in the corresponding deck."""
        return cls(
            deck_proportion(take_if_assigned1),
            deck_proportion(take_if_assigned0),
            deck_proportion(cure_if_take1),
            deck_proportion(cure_if_take0),
        )


Individual = Union[DeterministicIndividual, StochasticIndividual]


class SubpopulationType(Enum):
    """The four behavior types of deterministic individuals, determined by
    the (take_if_assigned0, take_if_assigned1) pair."""

    COMPLIER = "complier"
    DEFIER = "defier"
    ALWAYS_TAKER = "always_taker"
    NEVER_TAKER = "never_taker"


class ComplianceKind(Enum):
    """Sign of the degree of compliance for stochastic individuals."""

    COMPLIER = "complier"
    DEFIER = "defier"
    INDIFFERENT_TAKER = "indifferent_taker"


@dataclass(frozen=True)
class GeneralComplianceClass:
    """Stochastic compliance class, with the exact-corner sub-flags.

    is_always_taker / is_never_taker can only be set on indifferent
    takers: they mark t = t_star = 1 and t = t_star = 0 respectively
    (up to the classification tolerance).
    """

    kind: ComplianceKind
    is_always_taker: bool = False
    is_never_taker: bool = False


@dataclass(frozen=True)
class Population:
    """Ordered, homogeneous, non-empty collection of individuals.

    The index is the identity: "individual i" anywhere in this package
    means position i here.
    """

    individuals: tuple
    name: str = ""

    def __post_init__(self):
        individuals = tuple(self.individuals)
        object.__setattr__(self, "individuals", individuals)
        if not individuals:
            raise InvalidParamsError("a population must contain at least one individual")
        first = type(individuals[0])
        if first not in (DeterministicIndividual, StochasticIndividual):
            raise InvalidParamsError(
                "individuals must be DeterministicIndividual or StochasticIndividual"
            )
        for ind in individuals:
            if type(ind) is not first:
                raise InvalidParamsError(
                    "a population must be homogeneous; mixing deterministic "
                    "and stochastic individuals is not allowed"
                )

    @property
    def kind(self) -> str:
        """"deterministic" or "stochastic"."""
        if isinstance(self.individuals[0], DeterministicIndividual):
            return "deterministic"
        return "stochastic"

    def __len__(self) -> int:
        return len(self.individuals)

    def __iter__(self) -> Iterator[Individual]:
        return iter(self.individuals)

    def __getitem__(self, i: int) -> Individual:
        return self.individuals[i]


def require_kind(pop: Population, kind: str, what: str) -> None:
    """Raise InvalidParamsError unless the population has the given kind."""
    if pop.kind != kind:
        raise InvalidParamsError(
            "%s requires a %s population, got a %s one" % (what, kind, pop.kind)
        )


def classify_deterministic(ind: DeterministicIndividual) -> SubpopulationType:
    """Map the take pair to its behavior type.

    The four (take_if_assigned0, take_if_assigned1) pairs partition the
    sixteen deterministic types: (0,1) complier, (1,0) defier,
    (1,1) always-taker, (0,0) never-taker.
    """
    pair = (ind.take_if_assigned0, ind.take_if_assigned1)
    return {
        (0, 1): SubpopulationType.COMPLIER,
        (1, 0): SubpopulationType.DEFIER,
        (1, 1): SubpopulationType.ALWAYS_TAKER,
        (0, 0): SubpopulationType.NEVER_TAKER,
    }[pair]


def degree_of_compliance(ind: StochasticIndividual) -> Prob:
    """t - t_star: how much assignment shifts this individual's take
    probability. Positive for compliers, negative for defiers."""
    return ind.t - ind.t_star


def classify_stochastic(
    ind: StochasticIndividual, tol: Optional[Prob] = None
) -> GeneralComplianceClass:
    """Classify by the sign of the degree of compliance.

    tol defaults to 0 for exact inputs and 1e-12 once floats are
    involved. |degree| <= tol is an indifferent taker; the always/never
    sub-flags mark the two degenerate corners t = t_star = 1 and
    t = t_star = 0 (again up to tol).
    """
    if tol is None:
        tol = default_tol(ind.t, ind.t_star)
    if tol < 0:
        raise InvalidParamsError("tol must be >= 0, got %r" % (tol,))
    dc = degree_of_compliance(ind)
    if dc > tol:
        return GeneralComplianceClass(ComplianceKind.COMPLIER)
    if dc < -tol:
        return GeneralComplianceClass(ComplianceKind.DEFIER)
    return GeneralComplianceClass(
        ComplianceKind.INDIFFERENT_TAKER,
        is_always_taker=bool(ind.t >= 1 - tol and ind.t_star >= 1 - tol),
        is_never_taker=bool(ind.t <= tol and ind.t_star <= tol),
    )


def lift_deterministic(pop: Population) -> Population:
    """Embed a deterministic population as degenerate probabilities.

    The image uses exact Fractions 0 and 1, so everything computed on it
    stays exact. Classification commutes with the embedding: compliers
    lift to compliers (degree 1), defiers to defiers (degree -1),
    always/never-takers to indifferent takers with the matching flag.
    """
    require_kind(pop, "deterministic", "lift_deterministic")
    lifted = tuple(
        StochasticIndividual(
            Fraction(ind.take_if_assigned1),
            Fraction(ind.take_if_assigned0),
            Fraction(ind.cure_if_take1),
            Fraction(ind.cure_if_take0),
        )
        for ind in pop
    )
    return Population(lifted, name=pop.name)


def as_float(pop: Population) -> Population:
    """Copy of a stochastic population with every probability a float.
    Deterministic populations are returned unchanged (already exact)."""
    if pop.kind == "deterministic":
        return pop
    converted = tuple(
        StochasticIndividual(
            float(ind.t), float(ind.t_star), float(ind.c), float(ind.c_star)
        )
        for ind in pop
    )
    return Population(converted, name=pop.name)


@dataclass(frozen=True)
class ValidationReport:
    """Result of checking the taker-behavior assumptions on a population.

    counts holds one entry per compliance class; for stochastic mode the
    always_taker/never_taker entries count the flagged subsets of the
    indifferent takers.
    """

    mode: str
    n: int
    counts: Dict[str, int]
    exists_complier: bool
    no_defiers: bool

    @property
    def complier_count(self) -> int:
        return self.counts["complier"]

    @property
    def defier_count(self) -> int:
        return self.counts["defier"]

    @property
    def satisfied(self) -> bool:
        """Both assumptions hold: identification applies."""
        return self.exists_complier and self.no_defiers

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "n": self.n,
            "counts": dict(self.counts),
            "exists_complier": self.exists_complier,
            "no_defiers": self.no_defiers,
            "satisfied": self.satisfied,
        }


def validate_assumptions(
    pop: Population, mode: Optional[str] = None, tol: Optional[Prob] = None
) -> ValidationReport:
    """Count compliance classes and flag the two identification assumptions.

    mode defaults to the population's kind. A deterministic population may
    be validated in stochastic mode (it is lifted first); the reverse is
    rejected. The flags are exists_complier and no_defiers; in stochastic
    mode they refer to the sign of the degree of compliance.
    """
    if mode is None:
        mode = pop.kind
    if mode not in ("deterministic", "stochastic"):
        raise InvalidParamsError("mode must be deterministic or stochastic, got %r" % (mode,))

    if mode == "deterministic":
        require_kind(pop, "deterministic", "deterministic validation")
        counts = {t.value: 0 for t in SubpopulationType}
        for ind in pop:
            counts[classify_deterministic(ind).value] += 1
    else:
        spop = lift_deterministic(pop) if pop.kind == "deterministic" else pop
        counts = {
            "complier": 0,
            "defier": 0,
            "indifferent_taker": 0,
            "always_taker": 0,
            "never_taker": 0,
        }
        for ind in spop:
            cls = classify_stochastic(ind, tol=tol)
            counts[cls.kind.value] += 1
            if cls.is_always_taker:
                counts["always_taker"] += 1
            if cls.is_never_taker:
                counts["never_taker"] += 1

    return ValidationReport(
        mode=mode,
        n=len(pop),
        counts=counts,
        exists_complier=counts["complier"] > 0,
        no_defiers=counts["defier"] == 0,
    )
