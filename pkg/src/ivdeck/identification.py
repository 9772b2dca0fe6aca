"""The ratio estimand on observables and the identification checks.

Identification means: a quantity defined on unobservable potential
outcomes (LATE, DATE) equals a quantity computed purely from observable
arm-conditional rates. The two verifiers below compute both sides
independently and report the gap, which is exactly zero whenever the
taker-behavior assumptions hold and the arithmetic is rational.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

from .bayesnet import Observables, build_net, closed_form_observables
from .effects import date, late
from .errors import (
    DefiersPresentWarning,
    InvalidParamsError,
    NegativeProportionError,
    NoCompliersError,
    WeakInstrumentError,
)
from .numeric import FLOAT_WEAK_TOL, Prob, default_tol, exact_div, jsonable
from .population import (
    Population,
    ValidationReport,
    require_kind,
    validate_assumptions,
)


def iv_estimand(
    p_cure_assign1: Prob,
    p_cure_assign0: Prob,
    p_take_assign1: Prob,
    p_take_assign0: Prob,
    weak_tol: Optional[Prob] = None,
) -> Prob:
    """(cure-rate difference) / (take-rate difference) between the arms.

    weak_tol defaults to 0 for exact inputs and 1e-9 for floats; a
    take-rate difference within it raises WeakInstrumentError rather than
    returning an exploding ratio. The value is intentionally not clamped:
    under assumption violations it can leave [-1, 1], and seeing that is
    the point of the violation sweeps.
    """
    rates = (p_cure_assign1, p_cure_assign0, p_take_assign1, p_take_assign0)
    for value in rates:
        if not 0 <= value <= 1:
            raise InvalidParamsError("rates must lie in [0, 1], got %r" % (value,))
    if weak_tol is None:
        weak_tol = default_tol(*rates, float_tol=FLOAT_WEAK_TOL)
    if weak_tol < 0:
        raise InvalidParamsError("weak_tol must be >= 0, got %r" % (weak_tol,))
    denominator = p_take_assign1 - p_take_assign0
    if abs(denominator) <= weak_tol:
        raise WeakInstrumentError(denominator, weak_tol)
    return exact_div(p_cure_assign1 - p_cure_assign0, denominator)


@dataclass(frozen=True)
class SubpopulationShares:
    """Defier-free class proportions recovered from take rates alone."""

    never_taker: Prob
    always_taker: Prob
    complier: Prob

    def to_dict(self) -> dict:
        return {
            "never_taker": jsonable(self.never_taker),
            "always_taker": jsonable(self.always_taker),
            "complier": jsonable(self.complier),
        }


def subpopulation_proportions_from_observables(
    p_take_assign1: Prob, p_take_assign0: Prob
) -> SubpopulationShares:
    """Recover class shares from the two take rates, assuming no defiers.

    With no defiers, nobody assigned to treatment refuses it except
    never-takers and nobody assigned to control takes it except
    always-takers, so shares are 1 - take rate in the treatment arm,
    the take rate in the control arm, and the remainder for compliers.
    A negative remainder contradicts the premise and raises
    NegativeProportionError.
    """
    for value in (p_take_assign1, p_take_assign0):
        if not 0 <= value <= 1:
            raise InvalidParamsError("take rates must lie in [0, 1], got %r" % (value,))
    complier = p_take_assign1 - p_take_assign0
    if complier < 0:
        raise NegativeProportionError(
            "take rate is higher under control (%r) than under treatment (%r); "
            "impossible without defiers" % (p_take_assign0, p_take_assign1)
        )
    return SubpopulationShares(
        never_taker=1 - p_take_assign1,
        always_taker=p_take_assign0,
        complier=complier,
    )


@dataclass(frozen=True)
class IdentificationReport:
    """Both sides of an identification identity plus the assumption audit.

    estimand_lhs is the potential-outcome side (LATE or DATE), estimand_rhs
    the observable side (ratio over closed-form rates). Either is None when
    undefined (no compliers / weak instrument), and abs_gap is None with
    them. applicable says whether the assumptions the identity relies on
    actually hold; when it is False a nonzero gap refutes nothing.
    """

    mode: str
    assign_prob: Prob
    estimand_lhs: Optional[Prob]
    estimand_rhs: Optional[Prob]
    abs_gap: Optional[Prob]
    assumptions: ValidationReport
    applicable: bool
    observables: Observables

    @property
    def identity_holds(self) -> bool:
        """True when both sides exist and agree exactly."""
        return self.abs_gap == 0

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "assign_prob": jsonable(self.assign_prob),
            "estimand_lhs": jsonable(self.estimand_lhs),
            "estimand_rhs": jsonable(self.estimand_rhs),
            "abs_gap": jsonable(self.abs_gap),
            "applicable": self.applicable,
            "identity_holds": self.identity_holds,
            "assumptions": self.assumptions.to_dict(),
            "observables": self.observables.to_dict(),
        }


def _report(
    mode: str,
    pop: Population,
    assign_prob: Prob,
    lhs: Optional[Prob],
    assumptions: ValidationReport,
) -> IdentificationReport:
    net = build_net(pop, assign_prob)
    observables = closed_form_observables(net)
    try:
        rhs = iv_estimand(*observables)
    except WeakInstrumentError:
        rhs = None
    gap = abs(lhs - rhs) if lhs is not None and rhs is not None else None
    return IdentificationReport(
        mode=mode,
        assign_prob=assign_prob,
        estimand_lhs=lhs,
        estimand_rhs=rhs,
        abs_gap=gap,
        assumptions=assumptions,
        applicable=assumptions.satisfied,
        observables=observables,
    )


def verify_late_identification(
    pop: Population, assign_prob: Prob
) -> IdentificationReport:
    """Check LATE = ratio estimand for a deterministic population.

    The left side comes from potential outcomes (late), the right side
    from the observable rates of the lifted population's net. With at
    least one complier and no defiers the gap is exactly zero; the report
    never raises for assumption violations, it records them.
    """
    require_kind(pop, "deterministic", "verify_late_identification")
    assumptions = validate_assumptions(pop, mode="deterministic")
    try:
        lhs: Optional[Prob] = late(pop).value
    except NoCompliersError:
        lhs = None
    return _report("deterministic", pop, assign_prob, lhs, assumptions)


def verify_date_identification(
    pop: Population, assign_prob: Prob, tol: Optional[Prob] = None
) -> IdentificationReport:
    """Check DATE = ratio estimand for a stochastic population.

    Same shape as the deterministic check with the starred assumptions:
    somebody has positive degree of compliance and nobody has negative.
    The defier warning date() would emit is suppressed here because the
    report carries the violation as data.
    """
    require_kind(pop, "stochastic", "verify_date_identification")
    assumptions = validate_assumptions(pop, mode="stochastic", tol=tol)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DefiersPresentWarning)
            lhs: Optional[Prob] = date(pop, tol=tol).value
    except NoCompliersError:
        lhs = None
    return _report("stochastic", pop, assign_prob, lhs, assumptions)
