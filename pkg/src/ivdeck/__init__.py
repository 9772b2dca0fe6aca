"""Potential-outcome populations: effects, identification, simulation.

Deterministic individuals carry four binary potential outcomes;
stochastic individuals carry them as probabilities. The package computes
the causal estimands defined directly on those outcomes (ITE, ATE, LATE,
degree of compliance, DATE), verifies with exact rational arithmetic that
they coincide with a ratio of observable rates when the taker-behavior
assumptions hold, and simulates reproducible trials to show the sample
estimator converging to the same number, or diverging from it when the
assumptions break.
"""

from .bayesnet import (
    CausalNet,
    MarkovReport,
    Observables,
    ObservableQuery,
    build_net,
    closed_form_observables,
    conditional,
    enumerated_observables,
    event_prob,
    joint_prob,
    joint_rows,
    net_to_dict,
    states,
    verify_markov_factorization,
)
from .effects import (
    EffectReport,
    ate,
    date,
    ite_deterministic,
    ite_stochastic,
    late,
    late_from_complier_rates,
)
from .errors import (
    DefiersPresentWarning,
    DegenerateAssignmentError,
    EmptyGroupError,
    InvalidFractionsError,
    InvalidParamsError,
    IVDeckError,
    MissingLatentTagsError,
    NegativeProportionError,
    NoCompliersError,
    ParseError,
    SchemaViolationError,
    WeakInstrumentError,
    ZeroConditionProbabilityError,
)
from .generators import GeneratorSpec, defier_mix_spec, generate_population
from .identification import (
    IdentificationReport,
    SubpopulationShares,
    iv_estimand,
    subpopulation_proportions_from_observables,
    verify_date_identification,
    verify_late_identification,
)
from .numeric import Prob, default_tol, exact_div, is_exact
from .popio import (
    load_population,
    parse_probability,
    population_from_dict,
    population_to_dict,
    save_population,
)
from .population import (
    ComplianceKind,
    DeterministicIndividual,
    GeneralComplianceClass,
    Population,
    StochasticIndividual,
    SubpopulationType,
    ValidationReport,
    as_float,
    classify_deterministic,
    classify_stochastic,
    deck_proportion,
    degree_of_compliance,
    lift_deterministic,
    validate_assumptions,
)
from .trial import (
    EmpiricalConditionals,
    LatentClassAudit,
    SweepRow,
    TrialDataset,
    TrialRecord,
    bias_sweep,
    empirical_conditionals,
    iv_estimate,
    latent_class_audit,
    read_dataset,
    simulate_trial,
    write_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "CausalNet",
    "ComplianceKind",
    "DefiersPresentWarning",
    "DegenerateAssignmentError",
    "DeterministicIndividual",
    "EffectReport",
    "EmpiricalConditionals",
    "EmptyGroupError",
    "GeneralComplianceClass",
    "GeneratorSpec",
    "IVDeckError",
    "IdentificationReport",
    "InvalidFractionsError",
    "InvalidParamsError",
    "LatentClassAudit",
    "MarkovReport",
    "MissingLatentTagsError",
    "NegativeProportionError",
    "NoCompliersError",
    "ObservableQuery",
    "Observables",
    "ParseError",
    "Population",
    "Prob",
    "SchemaViolationError",
    "StochasticIndividual",
    "SubpopulationShares",
    "SubpopulationType",
    "SweepRow",
    "TrialDataset",
    "TrialRecord",
    "ValidationReport",
    "WeakInstrumentError",
    "ZeroConditionProbabilityError",
    "as_float",
    "ate",
    "bias_sweep",
    "build_net",
    "classify_deterministic",
    "classify_stochastic",
    "closed_form_observables",
    "conditional",
    "date",
    "deck_proportion",
    "default_tol",
    "defier_mix_spec",
    "degree_of_compliance",
    "empirical_conditionals",
    "enumerated_observables",
    "event_prob",
    "exact_div",
    "generate_population",
    "is_exact",
    "ite_deterministic",
    "ite_stochastic",
    "iv_estimand",
    "iv_estimate",
    "joint_prob",
    "joint_rows",
    "late",
    "late_from_complier_rates",
    "latent_class_audit",
    "lift_deterministic",
    "load_population",
    "net_to_dict",
    "parse_probability",
    "population_from_dict",
    "population_to_dict",
    "save_population",
    "simulate_trial",
    "states",
    "subpopulation_proportions_from_observables",
    "validate_assumptions",
    "verify_date_identification",
    "verify_late_identification",
    "verify_markov_factorization",
    "write_dataset",
]
