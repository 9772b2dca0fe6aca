"""Helpers for the dual numeric regime.

Every quantity in this package is either exact (int or fractions.Fraction,
used when verifying identities that must hold with zero tolerance) or a
float (used by Monte Carlo paths). Operations infer the regime from their
inputs: as soon as a float is involved, tolerances switch from 0 to a
small positive default and arithmetic degrades to floating point.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Prob = Union[int, float, Fraction]

#: default tolerance once floats are involved (classification, identity gaps)
FLOAT_TOL = 1e-12
#: default weak-instrument tolerance once floats are involved
FLOAT_WEAK_TOL = 1e-9


def is_exact(value: Prob) -> bool:
    """True when the value participates in exact rational arithmetic."""
    return not isinstance(value, float)


def default_tol(*values: Prob, float_tol: float = FLOAT_TOL) -> Prob:
    """0 when every input is exact, else `float_tol`."""
    return 0 if all(is_exact(v) for v in values) else float_tol


def exact_div(num: Prob, den: Prob) -> Prob:
    """num/den, staying in Fraction arithmetic when both sides are exact.

    Plain `/` on two ints would silently produce a float, which is exactly
    the mode error this helper exists to prevent.
    """
    if is_exact(num) and is_exact(den):
        return Fraction(num, den)
    return num / den


def jsonable(value):
    """Represent a numeric value losslessly in JSON: whole Fractions
    become ints, other Fractions "num/den" strings, ints and floats
    pass through."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return int(value)
        return "%d/%d" % (value.numerator, value.denominator)
    return value
