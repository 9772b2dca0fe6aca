"""Seeded trial simulation, the sample-based estimator, and audits.

A simulated record is one draw of (latent individual, assignment arm,
realized take, realized cure). Estimation paths read only the observable
columns: they accept a latent-stripped dataset, and the latent tags exist
purely so audits can compare realized behavior against the ground truth
that generated it.
"""

from __future__ import annotations

import json
import statistics
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, List, NamedTuple, Optional, Sequence

import numpy as np

from . import sampling
from .bayesnet import build_net, closed_form_observables
from .effects import date, late
from .errors import (
    DefiersPresentWarning,
    EmptyGroupError,
    InvalidParamsError,
    MissingLatentTagsError,
    NoCompliersError,
    WeakInstrumentError,
)
from .identification import iv_estimand
from .numeric import Prob
from .population import (
    Population,
    SubpopulationType,
    classify_deterministic,
    lift_deterministic,
    require_kind,
)

CSV_COLUMNS = ("assign", "take", "cure")


@dataclass(frozen=True)
class TrialRecord:
    """One realized record; latent_u is None on stripped datasets."""

    assign: int
    take: int
    cure: int
    latent_u: Optional[int] = None


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.asarray(array)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class TrialDataset:
    """Column-oriented realized trial data plus its provenance.

    assign/take/cure are uint8 columns; latent_u is an int64 column or
    None once stripped. seed, pop_name and assign_prob pin down exactly
    how the records were produced.
    """

    assign: np.ndarray
    take: np.ndarray
    cure: np.ndarray
    latent_u: Optional[np.ndarray]
    seed: int
    pop_name: str
    assign_prob: float

    def __post_init__(self):
        object.__setattr__(self, "assign", _readonly(self.assign))
        object.__setattr__(self, "take", _readonly(self.take))
        object.__setattr__(self, "cure", _readonly(self.cure))
        if self.latent_u is not None:
            object.__setattr__(self, "latent_u", _readonly(self.latent_u))
        n = len(self.assign)
        for column in (self.take, self.cure):
            if len(column) != n:
                raise InvalidParamsError("dataset columns must have equal length")
        if self.latent_u is not None and len(self.latent_u) != n:
            raise InvalidParamsError("latent_u must match the other columns")

    def __len__(self) -> int:
        return len(self.assign)

    def record(self, i: int) -> TrialRecord:
        return TrialRecord(
            assign=int(self.assign[i]),
            take=int(self.take[i]),
            cure=int(self.cure[i]),
            latent_u=None if self.latent_u is None else int(self.latent_u[i]),
        )

    def __iter__(self) -> Iterator[TrialRecord]:
        return (self.record(i) for i in range(len(self)))

    def without_latent(self) -> "TrialDataset":
        """The observable view: same columns, latent tags dropped."""
        if self.latent_u is None:
            return self
        return TrialDataset(
            assign=self.assign,
            take=self.take,
            cure=self.cure,
            latent_u=None,
            seed=self.seed,
            pop_name=self.pop_name,
            assign_prob=self.assign_prob,
        )


def simulate_trial(
    pop: Population, assign_prob: Prob, n: int, seed: int
) -> TrialDataset:
    """Draw n records: latent individual uniform, assignment Bernoulli,
    then take and cure from that individual's probabilities at the
    realized antecedents.

    Deterministic populations are lifted first; their draws then realize
    the potential outcomes exactly (degenerate probabilities never lose to
    rounding, see the sampling stream contract). The dataset is a pure
    function of (pop, assign_prob, n, seed).
    """
    if n < 1:
        raise InvalidParamsError("n must be >= 1, got %r" % (n,))
    if not 0 < assign_prob < 1:
        raise InvalidParamsError(
            "assign_prob must lie strictly inside (0, 1), got %r" % (assign_prob,)
        )
    spop = lift_deterministic(pop) if pop.kind == "deterministic" else pop
    t = np.array([float(ind.t) for ind in spop])
    t_star = np.array([float(ind.t_star) for ind in spop])
    c = np.array([float(ind.c) for ind in spop])
    c_star = np.array([float(ind.c_star) for ind in spop])
    latent_u, assign, take, cure = sampling.sample_records(
        t, t_star, c, c_star, float(assign_prob), n, seed
    )
    return TrialDataset(
        assign=assign,
        take=take,
        cure=cure,
        latent_u=latent_u,
        seed=int(seed),
        pop_name=pop.name,
        assign_prob=float(assign_prob),
    )


class EmpiricalConditionals(NamedTuple):
    """Arm-conditional sample frequencies plus the arm sizes."""

    p_cure_assign1: float
    p_cure_assign0: float
    p_take_assign1: float
    p_take_assign0: float
    n_assign1: int
    n_assign0: int


def empirical_conditionals(ds: TrialDataset) -> EmpiricalConditionals:
    """The four observable rates as sample frequencies.

    Raises EmptyGroupError when either arm has no records. Reads only the
    observable columns.
    """
    treated = ds.assign == 1
    n1 = int(treated.sum())
    n0 = len(ds) - n1
    if n1 == 0 or n0 == 0:
        raise EmptyGroupError(
            "both assignment arms need at least one record (n1=%d, n0=%d)" % (n1, n0)
        )
    control = ~treated
    return EmpiricalConditionals(
        p_cure_assign1=float(ds.cure[treated].mean()),
        p_cure_assign0=float(ds.cure[control].mean()),
        p_take_assign1=float(ds.take[treated].mean()),
        p_take_assign0=float(ds.take[control].mean()),
        n_assign1=n1,
        n_assign0=n0,
    )


def iv_estimate(ds: TrialDataset, weak_tol: Optional[float] = None) -> float:
    """The ratio estimand evaluated at the sample frequencies."""
    rates = empirical_conditionals(ds)
    return iv_estimand(
        rates.p_cure_assign1,
        rates.p_cure_assign0,
        rates.p_take_assign1,
        rates.p_take_assign0,
        weak_tol=weak_tol,
    )


@dataclass(frozen=True)
class LatentClassAudit:
    """Set comparisons between realized behavior and latent classes.

    In a defier-free population, the treatment-arm records that do not
    take are exactly the never-takers' records, and the control-arm
    records that do take are exactly the always-takers'. Defiers break
    both equalities, which is how a violation shows up here.
    """

    treatment_nontakers_are_never_takers: bool
    control_takers_are_always_takers: bool
    n_treatment: int
    n_control: int
    treatment_nontakers: int
    treatment_never_takers: int
    control_takers: int
    control_always_takers: int

    @property
    def holds(self) -> bool:
        return (
            self.treatment_nontakers_are_never_takers
            and self.control_takers_are_always_takers
        )

    def to_dict(self) -> dict:
        return {
            "treatment_nontakers_are_never_takers": self.treatment_nontakers_are_never_takers,
            "control_takers_are_always_takers": self.control_takers_are_always_takers,
            "holds": self.holds,
            "n_treatment": self.n_treatment,
            "n_control": self.n_control,
            "treatment_nontakers": self.treatment_nontakers,
            "treatment_never_takers": self.treatment_never_takers,
            "control_takers": self.control_takers,
            "control_always_takers": self.control_always_takers,
        }


def latent_class_audit(ds: TrialDataset, pop: Population) -> LatentClassAudit:
    """Compare realized take behavior per arm against the latent classes.

    Needs the latent tags (MissingLatentTagsError otherwise) and the
    deterministic population that generated the dataset.
    """
    if ds.latent_u is None:
        raise MissingLatentTagsError(
            "the audit needs latent_u tags; this dataset was stripped"
        )
    require_kind(pop, "deterministic", "latent_class_audit")
    classes = [classify_deterministic(ind) for ind in pop]
    never = np.array([cls is SubpopulationType.NEVER_TAKER for cls in classes])
    always = np.array([cls is SubpopulationType.ALWAYS_TAKER for cls in classes])
    record_never = never[ds.latent_u]
    record_always = always[ds.latent_u]

    treated = ds.assign == 1
    control = ~treated
    treatment_nontaker = treated & (ds.take == 0)
    treatment_never = treated & record_never
    control_taker = control & (ds.take == 1)
    control_always = control & record_always

    return LatentClassAudit(
        treatment_nontakers_are_never_takers=bool(
            np.array_equal(treatment_nontaker, treatment_never)
        ),
        control_takers_are_always_takers=bool(
            np.array_equal(control_taker, control_always)
        ),
        n_treatment=int(treated.sum()),
        n_control=int(control.sum()),
        treatment_nontakers=int(treatment_nontaker.sum()),
        treatment_never_takers=int(treatment_never.sum()),
        control_takers=int(control_taker.sum()),
        control_always_takers=int(control_always.sum()),
    )


def write_dataset(ds: TrialDataset, path, include_latent: bool = True) -> None:
    """Write CSV (header assign,take,cure[,latent_u]) plus a JSON sidecar.

    The sidecar lands at <path>.meta.json and records seed, population
    name, assignment probability, length and the stream contract, enough
    to regenerate the file byte for byte.
    """
    path = str(path)
    with_latent = include_latent and ds.latent_u is not None
    columns = CSV_COLUMNS + ("latent_u",) if with_latent else CSV_COLUMNS
    with open(path, "w", newline="") as handle:
        handle.write(",".join(columns) + "\n")
        if with_latent:
            rows = zip(ds.assign, ds.take, ds.cure, ds.latent_u)
        else:
            rows = zip(ds.assign, ds.take, ds.cure)
        handle.writelines(",".join(str(int(v)) for v in row) + "\n" for row in rows)
    sidecar = {
        "seed": ds.seed,
        "pop_name": ds.pop_name,
        "assign_prob": ds.assign_prob,
        "n": len(ds),
        "columns": list(columns),
        "rng": "splitmix64-counter, words 4i+1..4i+4 per record",
        "backend": sampling.BACKEND,
    }
    with open(path + ".meta.json", "w") as handle:
        json.dump(sidecar, handle, indent=2, sort_keys=True)
        handle.write("\n")


def read_dataset(path) -> TrialDataset:
    """Read a CSV written by write_dataset; sidecar metadata is optional."""
    path = str(path)
    with open(path, "r", newline="") as handle:
        header = handle.readline().strip()
        names = tuple(header.split(","))
        if names[:3] != CSV_COLUMNS or names not in (
            CSV_COLUMNS,
            CSV_COLUMNS + ("latent_u",),
        ):
            raise InvalidParamsError(
                "unexpected dataset header %r; want assign,take,cure[,latent_u]"
                % (header,)
            )
        data = np.loadtxt(handle, delimiter=",", dtype=np.int64, ndmin=2)
    if data.shape[0] == 0:
        raise InvalidParamsError("dataset %r has no records" % (path,))
    meta = {"seed": -1, "pop_name": "", "assign_prob": float("nan")}
    try:
        with open(path + ".meta.json") as handle:
            meta.update(json.load(handle))
    except FileNotFoundError:
        pass
    return TrialDataset(
        assign=data[:, 0].astype(np.uint8),
        take=data[:, 1].astype(np.uint8),
        cure=data[:, 2].astype(np.uint8),
        latent_u=data[:, 3] if data.shape[1] == 4 else None,
        seed=int(meta["seed"]),
        pop_name=str(meta["pop_name"]),
        assign_prob=float(meta["assign_prob"]),
    )


@dataclass(frozen=True)
class SweepRow:
    """One parameter point of a violation sweep.

    exact_estimand and exact_effect are None where undefined (weak
    instrument, no compliers); estimates summarizes the Monte Carlo
    spread across seeds.
    """

    param: Prob
    exact_estimand: Optional[Prob]
    exact_effect: Optional[Prob]
    abs_gap: Optional[Prob]
    n_seeds: int
    n_estimates: int
    est_mean: Optional[float]
    est_std: Optional[float]
    est_min: Optional[float]
    est_max: Optional[float]

    def to_dict(self) -> dict:
        from .numeric import jsonable

        return {
            "param": jsonable(self.param),
            "exact_estimand": jsonable(self.exact_estimand),
            "exact_effect": jsonable(self.exact_effect),
            "abs_gap": jsonable(self.abs_gap),
            "n_seeds": self.n_seeds,
            "n_estimates": self.n_estimates,
            "est_mean": self.est_mean,
            "est_std": self.est_std,
            "est_min": self.est_min,
            "est_max": self.est_max,
        }


def bias_sweep(
    pop_factory: Callable[[Prob], Population],
    params: Iterable[Prob],
    assign_prob: Prob,
    n: int,
    seeds: Sequence[int],
    tol: Optional[Prob] = None,
) -> List[SweepRow]:
    """Exact gap and Monte Carlo spread for a family of populations.

    For each parameter: build the population, compute the exact ratio
    estimand (closed forms) and the exact LATE/DATE, their absolute gap,
    and the spread of the sample estimator across the given seeds. Rows
    come back sorted by parameter. Defier warnings are expected here
    (violation is the whole point of a sweep) and suppressed.
    """
    if not seeds:
        raise InvalidParamsError("bias_sweep needs at least one seed")
    rows = []
    for param in sorted(params):
        pop = pop_factory(param)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DefiersPresentWarning)
            try:
                if pop.kind == "deterministic":
                    effect: Optional[Prob] = late(pop).value
                else:
                    effect = date(pop, tol=tol).value
            except NoCompliersError:
                effect = None
            observables = closed_form_observables(build_net(pop, assign_prob))
            try:
                estimand: Optional[Prob] = iv_estimand(*observables)
            except WeakInstrumentError:
                estimand = None
        gap = (
            abs(estimand - effect)
            if estimand is not None and effect is not None
            else None
        )
        estimates = []
        for seed in seeds:
            ds = simulate_trial(pop, assign_prob, n, seed)
            try:
                estimates.append(iv_estimate(ds))
            except (WeakInstrumentError, EmptyGroupError):
                continue
        rows.append(
            SweepRow(
                param=param,
                exact_estimand=estimand,
                exact_effect=effect,
                abs_gap=gap,
                n_seeds=len(seeds),
                n_estimates=len(estimates),
                est_mean=statistics.fmean(estimates) if estimates else None,
                est_std=statistics.stdev(estimates) if len(estimates) > 1 else None,
                est_min=min(estimates) if estimates else None,
                est_max=max(estimates) if estimates else None,
            )
        )
    return rows
