"""Population file I/O.

The schema is a small JSON object:

    {
      "name": "...",
      "kind": "deterministic" | "stochastic",
      "individuals": [
        {"take_if_assigned1": 0/1, "take_if_assigned0": 0/1,
         "cure_if_take1": 0/1, "cure_if_take0": 0/1},            # deterministic
        {"t": P, "t_star": P, "c": P, "c_star": P},              # stochastic
      ]
    }

where a probability P may be a number, a decimal or fraction string
("0.8", "4/5"), an exact {"num": 4, "den": 5} object, or an explicit
deck {"deck": [1, 1, 0]} whose value is the proportion of 1-cards.
In rational mode every form loads exactly (JSON number literals are
parsed as decimal Fractions, never through a float); in float mode
everything becomes a float. Saving writes Fractions as {"num", "den"}
so a rational round trip is lossless.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Union

from .errors import ParseError, SchemaViolationError
from .numeric import Prob
from .population import DeterministicIndividual, Population, StochasticIndividual

MODES = ("rational", "float")

_DET_FIELDS = (
    "take_if_assigned1",
    "take_if_assigned0",
    "cure_if_take1",
    "cure_if_take0",
)
_STOCH_FIELDS = ("t", "t_star", "c", "c_star")


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ParseError("mode must be %s, got %r" % ("/".join(MODES), mode))


def parse_probability(value, mode: str = "rational", where: str = "value") -> Prob:
    """Parse one probability in any accepted form; `where` names the
    field in error messages."""
    _check_mode(mode)
    try:
        parsed = _parse_probability_value(value, where)
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, SchemaViolationError):
            raise
        raise SchemaViolationError(
            "%s: could not parse probability %r" % (where, value)
        ) from exc
    if not 0 <= parsed <= 1:
        raise SchemaViolationError(
            "%s: probability %s lies outside [0, 1]" % (where, parsed)
        )
    return float(parsed) if mode == "float" else parsed


def _parse_probability_value(value, where: str) -> Union[Fraction, int]:
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # floats only appear via direct API calls; files are parsed with
        # parse_float=Fraction. Read through the shortest decimal, which
        # is what the caller typed.
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, dict):
        if set(value) == {"num", "den"}:
            num, den = value["num"], value["den"]
            if not isinstance(num, int) or not isinstance(den, int):
                raise SchemaViolationError(
                    "%s: num and den must be integers" % (where,)
                )
            return Fraction(num, den)
        if set(value) == {"deck"}:
            cards = value["deck"]
            if not isinstance(cards, list) or not cards:
                raise SchemaViolationError(
                    "%s: deck must be a non-empty list of 0/1" % (where,)
                )
            if any(card not in (0, 1) for card in cards):
                raise SchemaViolationError(
                    "%s: deck cards must be 0 or 1" % (where,)
                )
            return Fraction(sum(cards), len(cards))
        raise SchemaViolationError(
            "%s: probability objects need keys {num, den} or {deck}, got %s"
            % (where, sorted(value))
        )
    raise SchemaViolationError(
        "%s: unsupported probability type %s" % (where, type(value).__name__)
    )


def format_probability(value: Prob):
    """JSON form of a probability; exact values stay exact."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return value.numerator
        return {"num": value.numerator, "den": value.denominator}
    return value


def population_from_dict(data, mode: str = "rational") -> Population:
    """Build a Population from parsed JSON, naming any offending field."""
    _check_mode(mode)
    if not isinstance(data, dict):
        raise SchemaViolationError("top level must be an object")
    kind = data.get("kind")
    if kind not in ("deterministic", "stochastic"):
        raise SchemaViolationError(
            "kind: must be 'deterministic' or 'stochastic', got %r" % (kind,)
        )
    name = data.get("name", "")
    if not isinstance(name, str):
        raise SchemaViolationError("name: must be a string, got %r" % (name,))
    individuals = data.get("individuals")
    if not isinstance(individuals, list) or not individuals:
        raise SchemaViolationError("individuals: must be a non-empty list")

    parsed = []
    for i, entry in enumerate(individuals):
        where = "individuals[%d]" % i
        if not isinstance(entry, dict):
            raise SchemaViolationError("%s: must be an object" % where)
        if kind == "deterministic":
            fields = {}
            for field in _DET_FIELDS:
                if field not in entry:
                    raise SchemaViolationError("%s.%s: missing" % (where, field))
                value = entry[field]
                if isinstance(value, bool):
                    value = int(value)
                if value not in (0, 1):
                    raise SchemaViolationError(
                        "%s.%s: must be 0 or 1, got %r" % (where, field, value)
                    )
                fields[field] = value
            parsed.append(DeterministicIndividual(**fields))
        else:
            fields = {}
            for field in _STOCH_FIELDS:
                if field not in entry:
                    raise SchemaViolationError("%s.%s: missing" % (where, field))
                fields[field] = parse_probability(
                    entry[field], mode=mode, where="%s.%s" % (where, field)
                )
            parsed.append(StochasticIndividual(**fields))
    return Population(tuple(parsed), name=name)


def population_to_dict(pop: Population) -> dict:
    data = {"name": pop.name, "kind": pop.kind, "individuals": []}
    for ind in pop:
        if pop.kind == "deterministic":
            data["individuals"].append(
                {field: getattr(ind, field) for field in _DET_FIELDS}
            )
        else:
            data["individuals"].append(
                {
                    field: format_probability(getattr(ind, field))
                    for field in _STOCH_FIELDS
                }
            )
    return data


def load_population(path, mode: str = "rational") -> Population:
    """Load a population file; ParseError names the location on failure."""
    _check_mode(mode)
    parse_float = Fraction if mode == "rational" else float
    try:
        with open(path) as handle:
            data = json.load(handle, parse_float=parse_float)
    except json.JSONDecodeError as exc:
        raise ParseError(
            "%s: invalid JSON at line %d column %d: %s"
            % (path, exc.lineno, exc.colno, exc.msg)
        ) from exc
    try:
        return population_from_dict(data, mode=mode)
    except SchemaViolationError as exc:
        raise SchemaViolationError("%s: %s" % (path, exc)) from exc


def save_population(pop: Population, path) -> None:
    """Write a population file that loads back equal in rational mode."""
    with open(path, "w") as handle:
        json.dump(population_to_dict(pop), handle, indent=2)
        handle.write("\n")
