"""Exact discrete inference on the four-node trial net.

Nodes: U (latent individual index, uniform on 0..N-1), Assign (Bernoulli
with a constant probability strictly inside (0, 1)), Take (depends on U
and Assign), Cure (depends on U and Take only). There is no U-Assign edge
and no Assign-Cure edge, so the joint always factors as

    Pr(U) * Pr(Assign) * Pr(Take | U, Assign) * Pr(Cure | U, Take)

with Pr(Take=1 | U=i, Assign=a) = t_i if a else t*_i and
Pr(Cure=1 | U=i, Take=k) = c_i if k else c*_i.

Two query routes ship on purpose. `event_prob`/`conditional` enumerate the
8N joint states and are the reference oracle; `closed_form_observables`
is the fast path obtained by expanding those sums, and their agreement is
a permanent regression target. With Fraction parameters everything here
is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterator, Mapping, NamedTuple, Optional, Tuple

from .errors import (
    DegenerateAssignmentError,
    InvalidParamsError,
    ZeroConditionProbabilityError,
)
from .numeric import Prob, exact_div, is_exact, jsonable
from .population import Population, lift_deterministic

#: observable variables a query may mention
OBSERVABLES = ("assign", "take", "cure")

JointFn = Callable[[int, int, int, int], Prob]


@dataclass(frozen=True)
class CausalNet:
    """The net's free parameters: assignment probability plus one
    (t, t_star, c, c_star) row per individual."""

    assign_prob: Prob
    params: Tuple[Tuple[Prob, Prob, Prob, Prob], ...]
    name: str = ""

    def __post_init__(self):
        params = tuple(tuple(row) for row in self.params)
        object.__setattr__(self, "params", params)
        if not 0 < self.assign_prob < 1:
            raise DegenerateAssignmentError(
                "assign_prob must lie strictly inside (0, 1), got %r"
                % (self.assign_prob,)
            )
        if not params:
            raise InvalidParamsError("a net needs at least one individual")
        for i, row in enumerate(params):
            if len(row) != 4:
                raise InvalidParamsError(
                    "params[%d] must be (t, t_star, c, c_star)" % i
                )
            for value in row:
                if not 0 <= value <= 1:
                    raise InvalidParamsError(
                        "params[%d] entries must lie in [0, 1], got %r" % (i, value)
                    )

    @property
    def n(self) -> int:
        return len(self.params)

    @property
    def exact(self) -> bool:
        """True when every parameter is exact (no floats)."""
        return is_exact(self.assign_prob) and all(
            is_exact(v) for row in self.params for v in row
        )


def build_net(pop: Population, assign_prob: Prob) -> CausalNet:
    """Net for a population; deterministic populations are lifted first."""
    spop = lift_deterministic(pop) if pop.kind == "deterministic" else pop
    return CausalNet(
        assign_prob=assign_prob,
        params=tuple((ind.t, ind.t_star, ind.c, ind.c_star) for ind in spop),
        name=pop.name,
    )


def _check_binary(name: str, value: int) -> None:
    if value not in (0, 1):
        raise InvalidParamsError("%s must be 0 or 1, got %r" % (name, value))


def joint_prob(net: CausalNet, u: int, a: int, t: int, c: int) -> Prob:
    """Pr(U=u, Assign=a, Take=t, Cure=c) via the factorization."""
    if not 0 <= u < net.n:
        raise IndexError("individual index %r out of range [0, %d)" % (u, net.n))
    _check_binary("a", a)
    _check_binary("t", t)
    _check_binary("c", c)
    t_i, ts_i, c_i, cs_i = net.params[u]
    p_u = exact_div(1, net.n) if net.exact else 1.0 / net.n
    p_a = net.assign_prob if a else 1 - net.assign_prob
    p_take1 = t_i if a else ts_i
    p_t = p_take1 if t else 1 - p_take1
    p_cure1 = c_i if t else cs_i
    p_c = p_cure1 if c else 1 - p_cure1
    return p_u * p_a * p_t * p_c


def states(net: CausalNet) -> Iterator[Tuple[int, int, int, int]]:
    """All 8N joint states (u, a, t, c)."""
    return product(range(net.n), (0, 1), (0, 1), (0, 1))


def joint_rows(net: CausalNet, joint: Optional[JointFn] = None):
    """(u, a, t, c, probability) for every joint state, in state order."""
    fn = joint if joint is not None else lambda u, a, t, c: joint_prob(net, u, a, t, c)
    for u, a, t, c in states(net):
        yield u, a, t, c, fn(u, a, t, c)


def event_prob(
    net: CausalNet,
    assignment: Mapping[str, int],
    joint: Optional[JointFn] = None,
) -> Prob:
    """Probability of a partial assignment, by summing matching states.

    Keys may be the observables plus "u" (used by the factorization
    checks); values are 0/1, or an index for "u".
    """
    for key in assignment:
        if key not in OBSERVABLES and key != "u":
            raise InvalidParamsError("unknown variable %r in event" % (key,))
    fn = joint if joint is not None else lambda u, a, t, c: joint_prob(net, u, a, t, c)
    want_u = assignment.get("u")
    want_a = assignment.get("assign")
    want_t = assignment.get("take")
    want_c = assignment.get("cure")
    total: Prob = 0
    for u, a, t, c in states(net):
        if want_u is not None and u != want_u:
            continue
        if want_a is not None and a != want_a:
            continue
        if want_t is not None and t != want_t:
            continue
        if want_c is not None and c != want_c:
            continue
        total = total + fn(u, a, t, c)
    return total


@dataclass(frozen=True)
class ObservableQuery:
    """A conditional query Pr(event | condition) over the observables."""

    event: Mapping[str, int]
    condition: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        event = dict(self.event)
        condition = dict(self.condition)
        object.__setattr__(self, "event", event)
        object.__setattr__(self, "condition", condition)
        if not event:
            raise InvalidParamsError("query event must not be empty")
        for mapping, label in ((event, "event"), (condition, "condition")):
            for key, value in mapping.items():
                if key not in OBSERVABLES:
                    raise InvalidParamsError(
                        "%s variable must be one of %s, got %r"
                        % (label, "/".join(OBSERVABLES), key)
                    )
                _check_binary("%s[%s]" % (label, key), value)
        overlap = set(event) & set(condition)
        if overlap:
            raise InvalidParamsError(
                "event and condition must be disjoint, both mention %s"
                % ", ".join(sorted(overlap))
            )

    def __hash__(self):
        return hash(
            (tuple(sorted(self.event.items())), tuple(sorted(self.condition.items())))
        )


def conditional(
    net: CausalNet, query: ObservableQuery, joint: Optional[JointFn] = None
) -> Prob:
    """Pr(event | condition) by exact enumeration.

    Raises ZeroConditionProbabilityError when the condition has
    probability zero.
    """
    if query.condition:
        denominator = event_prob(net, query.condition, joint=joint)
        if denominator == 0:
            raise ZeroConditionProbabilityError(
                "condition %r has probability zero" % (dict(query.condition),)
            )
    else:
        denominator = 1
    numerator = event_prob(net, {**query.event, **query.condition}, joint=joint)
    return exact_div(numerator, denominator) if denominator != 1 else numerator


class Observables(NamedTuple):
    """The four arm-conditional rates the ratio estimand is built from."""

    p_cure_assign1: Prob
    p_cure_assign0: Prob
    p_take_assign1: Prob
    p_take_assign0: Prob

    def to_dict(self) -> dict:
        return {name: jsonable(value) for name, value in self._asdict().items()}


def closed_form_observables(net: CausalNet) -> Observables:
    """The four rates via the expanded sums, no enumeration.

    Marginalizing the factored joint gives
        Pr(Cure=1 | Assign=1) = mean_i(c_i t_i + c*_i (1 - t_i))
        Pr(Cure=1 | Assign=0) = mean_i(c_i t*_i + c*_i (1 - t*_i))
        Pr(Take=1 | Assign=a) = mean_i(t_i) or mean_i(t*_i)
    None of them involves assign_prob: it cancels against the condition.
    """
    n = net.n
    sum_cure1: Prob = 0
    sum_cure0: Prob = 0
    sum_take1: Prob = 0
    sum_take0: Prob = 0
    for t_i, ts_i, c_i, cs_i in net.params:
        sum_cure1 = sum_cure1 + c_i * t_i + cs_i * (1 - t_i)
        sum_cure0 = sum_cure0 + c_i * ts_i + cs_i * (1 - ts_i)
        sum_take1 = sum_take1 + t_i
        sum_take0 = sum_take0 + ts_i
    return Observables(
        p_cure_assign1=exact_div(sum_cure1, n),
        p_cure_assign0=exact_div(sum_cure0, n),
        p_take_assign1=exact_div(sum_take1, n),
        p_take_assign0=exact_div(sum_take0, n),
    )


def enumerated_observables(
    net: CausalNet, joint: Optional[JointFn] = None
) -> Observables:
    """The same four rates via full enumeration (the oracle route)."""
    return Observables(
        p_cure_assign1=conditional(
            net, ObservableQuery({"cure": 1}, {"assign": 1}), joint=joint
        ),
        p_cure_assign0=conditional(
            net, ObservableQuery({"cure": 1}, {"assign": 0}), joint=joint
        ),
        p_take_assign1=conditional(
            net, ObservableQuery({"take": 1}, {"assign": 1}), joint=joint
        ),
        p_take_assign0=conditional(
            net, ObservableQuery({"take": 1}, {"assign": 0}), joint=joint
        ),
    )


@dataclass(frozen=True)
class MarkovReport:
    """Deviations found when checking the factorization structure.

    u_marginal_deviation: max |Pr(U=i | Assign=a) - Pr(U=i)| (the latent
    mix must not react to assignment). screening_deviation: max difference
    in Pr(Cure=1 | Take, U) across the two assignment arms (Take and U
    screen Cure off from Assign). Both are exactly zero for any joint
    that actually factors through the net.
    """

    u_marginal_deviation: Prob
    screening_deviation: Prob
    n_checks: int

    @property
    def max_abs_deviation(self) -> Prob:
        return max(self.u_marginal_deviation, self.screening_deviation)

    @property
    def holds(self) -> bool:
        return self.max_abs_deviation == 0

    def to_dict(self) -> dict:
        return {
            "u_marginal_deviation": jsonable(self.u_marginal_deviation),
            "screening_deviation": jsonable(self.screening_deviation),
            "max_abs_deviation": jsonable(self.max_abs_deviation),
            "n_checks": self.n_checks,
            "holds": self.holds,
        }


def verify_markov_factorization(
    net: CausalNet, joint: Optional[JointFn] = None
) -> MarkovReport:
    """Check the two structural independencies against a joint.

    joint defaults to the net's own factored joint (for which both
    deviations are identically zero; this is the self-test). Passing a
    foreign joint function turns this into a detector: any dependence of
    the latent mix or of Cure on Assign shows up as a positive deviation.
    Conditionals are only compared where both conditioning events have
    positive probability.
    """
    u_dev: Prob = 0
    screen_dev: Prob = 0
    checks = 0

    for i in range(net.n):
        p_u = event_prob(net, {"u": i}, joint=joint)
        for a in (0, 1):
            p_a = event_prob(net, {"assign": a}, joint=joint)
            if p_a == 0:
                continue
            cond = exact_div(event_prob(net, {"u": i, "assign": a}, joint=joint), p_a)
            u_dev = max(u_dev, abs(cond - p_u))
            checks += 1

    for i in range(net.n):
        for take in (0, 1):
            rates = []
            for a in (0, 1):
                base = event_prob(net, {"u": i, "take": take, "assign": a}, joint=joint)
                if base == 0:
                    continue
                top = event_prob(
                    net, {"u": i, "take": take, "assign": a, "cure": 1}, joint=joint
                )
                rates.append(exact_div(top, base))
            if len(rates) == 2:
                screen_dev = max(screen_dev, abs(rates[0] - rates[1]))
                checks += 1

    return MarkovReport(
        u_marginal_deviation=u_dev,
        screening_deviation=screen_dev,
        n_checks=checks,
    )


def net_to_dict(net: CausalNet) -> dict:
    """JSON-ready description; Fractions become {"num", "den"} objects."""

    def encode(value: Prob):
        if isinstance(value, Fraction):
            return {"num": value.numerator, "den": value.denominator}
        return value

    return {
        "name": net.name,
        "n": net.n,
        "assign_prob": encode(net.assign_prob),
        "params": [
            {"t": encode(t), "t_star": encode(ts), "c": encode(c), "c_star": encode(cs)}
            for t, ts, c, cs in net.params
        ],
    }
