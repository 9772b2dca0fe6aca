"""Causal estimands defined directly on potential outcomes.

Deterministic populations get the individual effect (ITE), its population
mean (ATE), and the complier-local mean (LATE). Stochastic populations get
the probabilistic ITE and the compliance-weighted average DATE, which
reduces to LATE on lifted deterministic populations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import DefiersPresentWarning, NoCompliersError
from .numeric import Prob, default_tol, exact_div, jsonable
from .population import (
    DeterministicIndividual,
    Population,
    StochasticIndividual,
    SubpopulationType,
    classify_deterministic,
    degree_of_compliance,
    require_kind,
)


@dataclass(frozen=True)
class EffectReport:
    """An estimand value plus the pieces it was assembled from.

    For LATE: numerator_detail is the summed complier ITE, denominator_detail
    the complier count. For DATE: the compliance-weighted ITE sum and the
    total positive compliance. n_contributing counts the individuals with
    nonzero weight.
    """

    value: Prob
    numerator_detail: Prob
    denominator_detail: Prob
    n_contributing: int

    def to_dict(self) -> dict:
        return {
            "value": jsonable(self.value),
            "numerator_detail": jsonable(self.numerator_detail),
            "denominator_detail": jsonable(self.denominator_detail),
            "n_contributing": self.n_contributing,
        }


def ite_deterministic(ind: DeterministicIndividual) -> int:
    """cure_if_take1 - cure_if_take0: 1 if taking helps this individual,
    -1 if it harms, 0 if it makes no difference."""
    return ind.cure_if_take1 - ind.cure_if_take0


def ate(pop: Population) -> Fraction:
    """Population mean of the ITE, exact.

    Computed both as the mean of individual effects and as the difference
    of the would-be-cured proportions; the two are the same sum regrouped,
    and disagreement would mean corrupted state, so it is checked here.
    """
    require_kind(pop, "deterministic", "ate")
    n = len(pop)
    mean_ite = Fraction(sum(ite_deterministic(ind) for ind in pop), n)
    prop_diff = Fraction(sum(ind.cure_if_take1 for ind in pop), n) - Fraction(
        sum(ind.cure_if_take0 for ind in pop), n
    )
    if mean_ite != prop_diff:  # pragma: no cover - regrouping a finite sum
        raise AssertionError("mean-of-effects and proportion-difference forms disagree")
    return mean_ite


def _compliers(pop: Population) -> list:
    return [
        ind
        for ind in pop
        if classify_deterministic(ind) is SubpopulationType.COMPLIER
    ]


def late(pop: Population) -> EffectReport:
    """Mean ITE over the compliers, exact.

    Raises NoCompliersError when the population has no compliers; the
    defining denominator would be zero.
    """
    require_kind(pop, "deterministic", "late")
    compliers = _compliers(pop)
    if not compliers:
        raise NoCompliersError("LATE is undefined: the population has no compliers")
    numerator = sum(ite_deterministic(ind) for ind in compliers)
    denominator = len(compliers)
    return EffectReport(
        value=Fraction(numerator, denominator),
        numerator_detail=numerator,
        denominator_detail=denominator,
        n_contributing=denominator,
    )


def late_from_complier_rates(pop: Population) -> Fraction:
    """LATE computed the other way round: as the difference between the
    would-be-cured-if-taking and would-be-cured-if-not-taking proportions
    within the complier subpopulation. Equals late(pop).value exactly."""
    require_kind(pop, "deterministic", "late_from_complier_rates")
    compliers = _compliers(pop)
    if not compliers:
        raise NoCompliersError("LATE is undefined: the population has no compliers")
    k = len(compliers)
    rate_take1 = Fraction(sum(ind.cure_if_take1 for ind in compliers), k)
    rate_take0 = Fraction(sum(ind.cure_if_take0 for ind in compliers), k)
    return rate_take1 - rate_take0


def ite_stochastic(ind: StochasticIndividual) -> Prob:
    """c - c_star: the shift in cure probability caused by taking."""
    return ind.c - ind.c_star


def date(pop: Population, tol: Optional[Prob] = None) -> EffectReport:
    """Degree-of-compliance-weighted average treatment effect.

    Weights are DC_i / sum of positive DC, running over the individuals
    with DC_i > tol; indifferent takers carry zero weight by definition.
    Defiers do not invalidate the value (their weight is zero too) but
    they break identification, so their presence raises
    DefiersPresentWarning. Raises NoCompliersError when nobody has
    positive compliance.

    On a lifted deterministic population every complier has DC = 1, so the
    weights are uniform over compliers and DATE collapses to LATE.
    """
    require_kind(pop, "stochastic", "date")
    if tol is None:
        tol = default_tol(*(v for ind in pop for v in (ind.t, ind.t_star)))
    degrees = [degree_of_compliance(ind) for ind in pop]
    if any(dc < -tol for dc in degrees):
        warnings.warn(
            "population contains defiers; DATE is computed over the "
            "positively compliant individuals but is not identified",
            DefiersPresentWarning,
            stacklevel=2,
        )
    contributing = [
        (dc, ite_stochastic(ind)) for dc, ind in zip(degrees, pop) if dc > tol
    ]
    if not contributing:
        raise NoCompliersError(
            "DATE is undefined: no individual has positive degree of compliance"
        )
    denominator = sum(dc for dc, _ in contributing)
    numerator = sum(dc * ite for dc, ite in contributing)
    return EffectReport(
        value=exact_div(numerator, denominator),
        numerator_detail=numerator,
        denominator_detail=denominator,
        n_contributing=len(contributing),
    )
