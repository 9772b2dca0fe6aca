from fractions import Fraction

import pytest

from ivdeck import DeterministicIndividual, Population, StochasticIndividual


@pytest.fixture
def det_oracle_pop() -> Population:
    """N=4: two compliers (effects 1 and 0), a never-taker, an always-taker.

    Worked out by hand: ATE 1/4, LATE 1/2, observable rates
    (1/2, 1/4, 3/4, 1/4), estimand 1/2, class shares (1/4, 1/4, 1/2).
    """
    return Population(
        (
            DeterministicIndividual(1, 0, 1, 0),
            DeterministicIndividual(1, 0, 0, 0),
            DeterministicIndividual(0, 0, 0, 0),
            DeterministicIndividual(1, 1, 1, 1),
        ),
        name="det-oracle-4",
    )


@pytest.fixture
def stoch_oracle_pop() -> Population:
    """N=2: a full complier with cure shift 4/5 - 1/5, and a coin flipper.

    Worked out by hand: DATE 3/5, observable rates
    (13/20, 7/20, 3/4, 1/4), estimand 3/5.
    """
    return Population(
        (
            StochasticIndividual(1, 0, Fraction(4, 5), Fraction(1, 5)),
            StochasticIndividual(
                Fraction(1, 2), Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)
            ),
        ),
        name="stoch-oracle-2",
    )


@pytest.fixture
def defier_quarter_pop() -> Population:
    """N=4 with a 25% defier share; LATE is 1 but the estimand is 3."""
    return Population(
        (
            DeterministicIndividual(1, 0, 1, 0),
            DeterministicIndividual(1, 0, 1, 0),
            DeterministicIndividual(0, 1, 0, 1),
            DeterministicIndividual(0, 0, 0, 0),
        ),
        name="defier-quarter",
    )
