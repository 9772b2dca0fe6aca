"""Exception and warning types shared across the package."""


class IVDeckError(Exception):
    """Base class for every error this package raises deliberately."""


class InvalidParamsError(IVDeckError, ValueError):
    """An argument is outside its documented domain."""


class InvalidFractionsError(InvalidParamsError):
    """Generator class fractions are negative, sum past 1, or do not
    resolve to integer counts for the requested population size."""


class NoCompliersError(IVDeckError):
    """LATE/DATE requested for a population without a single (positively)
    compliant individual: the defining denominator is zero."""


class WeakInstrumentError(IVDeckError):
    """The take-rate difference between arms is within the weak-instrument
    tolerance, so the ratio estimand is unusable."""

    def __init__(self, denominator, weak_tol):
        self.denominator = denominator
        self.weak_tol = weak_tol
        super().__init__(
            "take-rate difference %r is within weak-instrument tolerance %r"
            % (denominator, weak_tol)
        )


class DegenerateAssignmentError(IVDeckError):
    """Assignment probability is 0 or 1; the instrument never varies."""


class ZeroConditionProbabilityError(IVDeckError):
    """A conditional was requested given an event of probability zero."""


class NegativeProportionError(IVDeckError):
    """Observed take rates imply a negative subpopulation share, which
    contradicts the defier-free premise they were decomposed under."""


class EmptyGroupError(IVDeckError):
    """A dataset has no records in one assignment arm, so arm-conditional
    frequencies are undefined."""


class MissingLatentTagsError(IVDeckError):
    """An audit needs per-record latent indices but the dataset carries none."""


class ParseError(IVDeckError, ValueError):
    """A file could not be parsed; the message names the location."""


class SchemaViolationError(ParseError):
    """The file parsed but violates the population schema; the message
    names the offending field."""


class DefiersPresentWarning(UserWarning):
    """Emitted when DATE is computed for a population containing defiers.

    The value is still well defined (weights run over the positively
    compliant individuals only) but it is no longer identified from
    observables, so callers get a report they can turn into an error.
    """
