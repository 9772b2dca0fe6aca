"""Command line interface.

Subcommands: generate, effects, identify, simulate, verify, sweep.
Exit codes: 0 success, 1 check/estimand failure, 2 usage, 3 assumption
violation under --strict, 4 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
import warnings
from fractions import Fraction

import numpy as np

from .bayesnet import (
    build_net,
    closed_form_observables,
    enumerated_observables,
    joint_prob,
    joint_rows,
    states,
    verify_markov_factorization,
)
from .effects import ate, date, ite_deterministic, ite_stochastic, late
from .errors import (
    DefiersPresentWarning,
    InvalidParamsError,
    IVDeckError,
    NoCompliersError,
    ParseError,
    WeakInstrumentError,
)
from .generators import GeneratorSpec, defier_mix_spec, generate_population
from .identification import (
    iv_estimand,
    verify_date_identification,
    verify_late_identification,
)
from .numeric import is_exact, jsonable
from .population import (
    as_float,
    classify_deterministic,
    classify_stochastic,
    degree_of_compliance,
    lift_deterministic,
    validate_assumptions,
)
from .popio import load_population, population_to_dict
from .trial import (
    bias_sweep,
    empirical_conditionals,
    iv_estimate,
    latent_class_audit,
    simulate_trial,
    write_dataset,
)
from . import sampling

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_ASSUMPTIONS = 3
EXIT_IO = 4


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--mode",
        choices=("rational", "float"),
        default="rational",
        help="numeric regime: exact rationals (default) or floats",
    )
    common.add_argument(
        "--assign-prob",
        default="1/2",
        metavar="P",
        help="assignment probability, a fraction or decimal in (0, 1)",
    )
    common.add_argument("--seed", type=int, default=0, help="RNG seed")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument(
        "--format",
        choices=("json", "csv", "table"),
        default="table",
        help="output format for reports and tables",
    )
    common.add_argument(
        "--strict",
        action="store_true",
        help="exit 3 when the identification assumptions are violated",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="ivdeck",
        description="Potential-outcome populations: effects, identification, simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="generate a population file")
    p.add_argument("--kind", required=True, choices=("deterministic_mix", "stochastic_random", "stochastic_monotone"))
    p.add_argument("--n", type=int, required=True, help="population size")
    p.add_argument("--complier", default="0", help="complier fraction (deterministic_mix)")
    p.add_argument("--defier", default="0", help="defier fraction")
    p.add_argument("--always-taker", default="0", help="always-taker fraction")
    p.add_argument("--never-taker", default="0", help="never-taker fraction")
    p.add_argument("--grid-denominator", type=int, default=1000, help="probability grid for stochastic kinds")
    p.add_argument("--name", default="", help="population name")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("effects", parents=[common], help="per-individual effects and the aggregates")
    p.add_argument("population", help="population JSON file")
    p.set_defaults(func=_cmd_effects)

    p = sub.add_parser("identify", parents=[common], help="both sides of the identification identity")
    p.add_argument("population", help="population JSON file")
    p.add_argument("--dump-joint", metavar="PATH", help="also write the 8N joint states as CSV")
    p.set_defaults(func=_cmd_identify)

    p = sub.add_parser("simulate", parents=[common], help="simulate a trial to CSV")
    p.add_argument("population", help="population JSON file")
    p.add_argument("--n", type=int, required=True, help="number of records")
    p.add_argument("--no-latent", action="store_true", help="drop the latent_u column")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suite on a population")
    p.add_argument("population", help="population JSON file")
    p.add_argument("--n", type=int, default=2000, help="records for the simulation checks")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="violation sweep over a defier-share family")
    p.add_argument("--defier-fraction", required=True, metavar="START:STOP:STEP",
                   help="inclusive fraction grid, e.g. 0:0.3:0.05")
    p.add_argument("--pop-size", type=int, default=20, help="individuals per population")
    p.add_argument("--n", type=int, default=10000, help="records per simulated trial")
    p.add_argument("--seeds", default="0,1,2,3,4", help="comma-separated seeds for the spread")
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> None:
    sys.exit(cli_main(argv))


def cli_main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        return _fail(exc, EXIT_IO)
    except OSError as exc:
        return _fail(exc, EXIT_IO)
    except InvalidParamsError as exc:
        return _fail(exc, EXIT_USAGE)
    except IVDeckError as exc:
        return _fail(exc, EXIT_FAILURE)


def _fail(exc: Exception, code: int) -> int:
    print("ivdeck: error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
    return code


def _parse_assign_prob(args):
    try:
        value = Fraction(args.assign_prob)
    except (ValueError, ZeroDivisionError):
        raise InvalidParamsError(
            "--assign-prob must be a fraction or decimal, got %r" % (args.assign_prob,)
        )
    if not 0 < value < 1:
        raise InvalidParamsError(
            "--assign-prob must lie strictly inside (0, 1), got %s" % (value,)
        )
    return float(value) if args.mode == "float" else value


def _open_out(args):
    if args.out:
        return open(args.out, "w", newline="")
    return None


def _write(args, text: str) -> None:
    handle = _open_out(args)
    if handle is None:
        sys.stdout.write(text)
    else:
        with handle:
            handle.write(text)


_FRACTION_STR = re.compile(r"-?\d+/\d+\Z")


def _cell(value, fmt: str) -> str:
    if value is None:
        return "-" if fmt == "table" else ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if fmt == "table":
        if isinstance(value, str) and _FRACTION_STR.match(value):
            value = Fraction(value)
        if isinstance(value, (float, Fraction)):
            return "%.6f" % float(value)
    return str(jsonable(value))


def _render_rows(rows, fmt: str) -> str:
    """rows: list of dicts sharing keys, rendered as a table/CSV/JSON."""
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    keys = list(rows[0].keys()) if rows else []
    if fmt == "csv":
        out = []
        out.append(",".join(keys))
        for row in rows:
            out.append(",".join(_cell(row[k], "csv") for k in keys))
        return "\n".join(out) + "\n"
    cells = [[_cell(row[k], "table") for k in keys] for row in rows]
    widths = [
        max([len(k)] + [len(line[i]) for line in cells]) for i, k in enumerate(keys)
    ]
    lines = ["  ".join(k.ljust(w) for k, w in zip(keys, widths)).rstrip()]
    for line in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(line, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _render_mapping(mapping: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(mapping, indent=2) + "\n"
    if fmt == "csv":
        lines = ["key,value"]
        lines += ["%s,%s" % (k, _cell(v, "csv")) for k, v in _flatten(mapping)]
        return "\n".join(lines) + "\n"
    width = max(len(k) for k, _ in _flatten(mapping))
    lines = ["%s  %s" % (k.ljust(width), _cell(v, "table")) for k, v in _flatten(mapping)]
    return "\n".join(lines) + "\n"


def _flatten(mapping: dict, prefix: str = ""):
    for key, value in mapping.items():
        name = prefix + key
        if isinstance(value, dict):
            yield from _flatten(value, name + ".")
        else:
            yield name, value


def _cmd_generate(args) -> int:
    spec = GeneratorSpec(
        kind=args.kind,
        n=args.n,
        seed=args.seed,
        complier=Fraction(args.complier),
        defier=Fraction(args.defier),
        always_taker=Fraction(args.always_taker),
        never_taker=Fraction(args.never_taker),
        grid_denominator=args.grid_denominator,
        name=args.name,
    )
    pop = generate_population(spec)
    if args.mode == "float":
        pop = as_float(pop)
    _write(args, json.dumps(population_to_dict(pop), indent=2) + "\n")
    return EXIT_OK


def _cmd_effects(args) -> int:
    pop = load_population(args.population, mode=args.mode)
    rows = []
    aggregates = {"kind": pop.kind, "n": len(pop)}
    if pop.kind == "deterministic":
        for i, ind in enumerate(pop):
            rows.append(
                {
                    "i": i,
                    "class": classify_deterministic(ind).value,
                    "ite": ite_deterministic(ind),
                }
            )
        aggregates["ate"] = jsonable(ate(pop))
        try:
            aggregates["late"] = jsonable(late(pop).value)
        except NoCompliersError:
            aggregates["late"] = None
            aggregates["note"] = "no compliers: LATE undefined"
    else:
        for i, ind in enumerate(pop):
            cls = classify_stochastic(ind)
            label = cls.kind.value
            if cls.is_always_taker:
                label += "/always"
            if cls.is_never_taker:
                label += "/never"
            rows.append(
                {
                    "i": i,
                    "class": label,
                    "dc": degree_of_compliance(ind),
                    "ite": ite_stochastic(ind),
                }
            )
        try:
            report = date(pop)
            aggregates["date"] = jsonable(report.value)
            aggregates["n_contributing"] = report.n_contributing
        except NoCompliersError:
            aggregates["date"] = None
            aggregates["note"] = "no positive compliance: DATE undefined"

    if args.format == "json":
        _write(args, json.dumps(
            {"individuals": [
                {k: jsonable(v) for k, v in row.items()} for row in rows
            ], "aggregates": aggregates}, indent=2) + "\n")
    elif args.format == "csv":
        # one rectangular table on stdout; the summary goes to stderr so
        # downstream csv consumers see only the per-individual rows
        _write(args, _render_rows(rows, "csv"))
        for key, value in aggregates.items():
            print("%s=%s" % (key, value), file=sys.stderr)
    else:
        body = _render_rows(rows, args.format)
        tail = _render_mapping(aggregates, args.format)
        _write(args, body + "\n" + tail)
    return EXIT_OK


def _dump_joint(net, path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["u", "assign", "take", "cure", "prob"])
        for u, a, t, c, prob in joint_rows(net):
            writer.writerow([u, a, t, c, jsonable(prob)])


def _cmd_identify(args) -> int:
    pop = load_population(args.population, mode=args.mode)
    assign_prob = _parse_assign_prob(args)
    if pop.kind == "deterministic":
        report = verify_late_identification(pop, assign_prob)
    else:
        report = verify_date_identification(pop, assign_prob)
    if args.dump_joint:
        _dump_joint(build_net(pop, assign_prob), args.dump_joint)
    _write(args, _render_mapping(report.to_dict(), args.format))
    if args.strict and not report.applicable:
        print(
            "ivdeck: error: assumptions violated: %s" % (report.assumptions.to_dict(),),
            file=sys.stderr,
        )
        return EXIT_ASSUMPTIONS
    return EXIT_OK


def _cmd_simulate(args) -> int:
    pop = load_population(args.population, mode=args.mode)
    assign_prob = _parse_assign_prob(args)
    ds = simulate_trial(pop, assign_prob, args.n, args.seed)
    if args.no_latent:
        ds = ds.without_latent()

    summary = {
        "n": len(ds),
        "seed": ds.seed,
        "pop_name": ds.pop_name,
        "assign_prob": ds.assign_prob,
        "backend": sampling.BACKEND,
    }
    try:
        rates = empirical_conditionals(ds)
        summary.update(
            {
                "p_cure_assign1": rates.p_cure_assign1,
                "p_cure_assign0": rates.p_cure_assign0,
                "p_take_assign1": rates.p_take_assign1,
                "p_take_assign0": rates.p_take_assign0,
                "n_assign1": rates.n_assign1,
                "n_assign0": rates.n_assign0,
            }
        )
        summary["iv_estimate"] = iv_estimate(ds)
    except IVDeckError as exc:
        summary["estimate_error"] = "%s: %s" % (type(exc).__name__, exc)

    if args.out:
        write_dataset(ds, args.out, include_latent=not args.no_latent)
        sys.stdout.write(_render_mapping(summary, args.format))
    else:
        # CSV to stdout, summary to stderr so pipelines stay clean
        columns = ["assign", "take", "cure"]
        arrays = [ds.assign, ds.take, ds.cure]
        if ds.latent_u is not None:
            columns.append("latent_u")
            arrays.append(ds.latent_u)
        sys.stdout.write(",".join(columns) + "\n")
        for row in zip(*arrays):
            sys.stdout.write(",".join(str(int(v)) for v in row) + "\n")
        sys.stderr.write(_render_mapping(summary, args.format))
    return EXIT_OK


def _check(name: str, passed: bool, detail: str):
    return {"check": name, "passed": bool(passed), "detail": detail}


def _invariant_checks(pop, assign_prob, n, seed, mode):
    exact = mode == "rational" and (
        pop.kind == "deterministic"
        or all(
            is_exact(v)
            for ind in pop
            for v in (ind.t, ind.t_star, ind.c, ind.c_star)
        )
    )
    tol = 0 if exact else 1e-10
    checks = []

    def close(a, b) -> bool:
        return abs(a - b) <= tol

    report = validate_assumptions(pop)
    checks.append(
        _check(
            "assumptions",
            report.satisfied,
            "counts=%s" % (report.counts,),
        )
    )

    net = build_net(pop, assign_prob)
    total = 0
    for u, a, t, c in states(net):
        total = total + joint_prob(net, u, a, t, c)
    checks.append(
        _check("joint-normalization", close(total, 1), "sum=%s" % (jsonable(total),))
    )

    closed = closed_form_observables(net)
    enumerated = enumerated_observables(net)
    agree = all(close(x, y) for x, y in zip(closed, enumerated))
    checks.append(
        _check(
            "closed-forms-vs-enumeration",
            agree,
            "closed=%s" % (closed.to_dict(),),
        )
    )

    markov = verify_markov_factorization(net)
    checks.append(
        _check(
            "markov-factorization",
            markov.max_abs_deviation <= tol,
            "max_deviation=%s over %d checks"
            % (jsonable(markov.max_abs_deviation), markov.n_checks),
        )
    )

    if pop.kind == "deterministic":
        ident = verify_late_identification(pop, assign_prob)
    else:
        ident = verify_date_identification(pop, assign_prob)
    if ident.estimand_lhs is None or ident.estimand_rhs is None:
        checks.append(
            _check(
                "identification-identity",
                False,
                "one side undefined: lhs=%s rhs=%s"
                % (jsonable(ident.estimand_lhs), jsonable(ident.estimand_rhs)),
            )
        )
    else:
        checks.append(
            _check(
                "identification-identity",
                ident.applicable and ident.abs_gap <= (0 if exact else 1e-10),
                "lhs=%s rhs=%s gap=%s applicable=%s"
                % (
                    jsonable(ident.estimand_lhs),
                    jsonable(ident.estimand_rhs),
                    jsonable(ident.abs_gap),
                    ident.applicable,
                ),
            )
        )

    grid = (Fraction(1, 5), Fraction(1, 2), Fraction(4, 5))
    estimands = []
    for p in grid:
        p_val = float(p) if mode == "float" else p
        try:
            estimands.append(iv_estimand(*enumerated_observables(build_net(pop, p_val))))
        except WeakInstrumentError:
            estimands.append(None)
    if any(e is None for e in estimands):
        invariant = all(e is None for e in estimands)
    else:
        invariant = all(close(e, estimands[0]) for e in estimands[1:])
    checks.append(
        _check(
            "assign-prob-invariance",
            invariant,
            "estimands=%s" % ([jsonable(e) for e in estimands],),
        )
    )

    if pop.kind == "deterministic":
        try:
            late_value = late(pop).value
            # the assumptions check already reports defiers; no need for
            # date() to warn about them a second time here
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DefiersPresentWarning)
                date_value = date(lift_deterministic(pop)).value
            checks.append(
                _check(
                    "reduction-date-equals-late",
                    close(late_value, date_value),
                    "late=%s date=%s" % (jsonable(late_value), jsonable(date_value)),
                )
            )
        except NoCompliersError:
            checks.append(
                _check("reduction-date-equals-late", False, "no compliers")
            )

        ds = simulate_trial(pop, assign_prob, n, seed)
        audit = latent_class_audit(ds, pop)
        checks.append(
            _check(
                "latent-class-audit",
                audit.holds,
                "treatment %d/%d control %d/%d"
                % (
                    audit.treatment_nontakers,
                    audit.treatment_never_takers,
                    audit.control_takers,
                    audit.control_always_takers,
                ),
            )
        )

    first = simulate_trial(pop, assign_prob, min(n, 1000), seed)
    second = simulate_trial(pop, assign_prob, min(n, 1000), seed)
    same = all(
        np.array_equal(getattr(first, col), getattr(second, col))
        for col in ("assign", "take", "cure", "latent_u")
    )
    checks.append(
        _check("simulation-determinism", same, "n=%d seed=%d" % (min(n, 1000), seed))
    )
    return checks


def _cmd_verify(args) -> int:
    pop = load_population(args.population, mode=args.mode)
    assign_prob = _parse_assign_prob(args)
    checks = _invariant_checks(pop, assign_prob, args.n, args.seed, args.mode)
    if args.format == "json":
        _write(args, json.dumps(checks, indent=2) + "\n")
    elif args.format == "csv":
        _write(args, _render_rows(checks, "csv"))
    else:
        lines = [
            "%s %s: %s" % ("PASS" if c["passed"] else "FAIL", c["check"], c["detail"])
            for c in checks
        ]
        passed = sum(c["passed"] for c in checks)
        lines.append("%d/%d checks passed" % (passed, len(checks)))
        _write(args, "\n".join(lines) + "\n")
    return EXIT_OK if all(c["passed"] for c in checks) else EXIT_FAILURE


def _parse_grid(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidParamsError(
            "--defier-fraction must look like start:stop:step, got %r" % (text,)
        )
    try:
        start, stop, step = (Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise InvalidParamsError("could not parse grid %r" % (text,))
    if step <= 0:
        raise InvalidParamsError("grid step must be positive, got %s" % (parts[2],))
    values = []
    value = start
    while value <= stop:
        values.append(value)
        value += step
    if not values:
        raise InvalidParamsError("grid %r contains no points" % (text,))
    return values


def _cmd_sweep(args) -> int:
    assign_prob = _parse_assign_prob(args)
    params = _parse_grid(args.defier_fraction)
    try:
        seeds = [int(s) for s in args.seeds.split(",") if s.strip() != ""]
    except ValueError:
        raise InvalidParamsError("--seeds must be comma-separated integers, got %r" % (args.seeds,))

    def factory(fraction):
        return generate_population(defier_mix_spec(args.pop_size, fraction, seed=args.seed))

    rows = bias_sweep(factory, params, assign_prob, args.n, seeds)
    dicts = [row.to_dict() for row in rows]
    if args.format == "json":
        _write(args, json.dumps(dicts, indent=2) + "\n")
    else:
        _write(args, _render_rows(dicts, args.format))
    return EXIT_OK
