"""Tail goodness-of-fit testing via a Hill-like statistic on upper order statistics."""

__version__ = "0.1.0"

from .conditions import (
    ConditionReport,
    EpsilonEstimate,
    MonotoneGrid,
    check_condition_b,
    check_condition_c,
    check_delta,
    classify_alternative,
    estimate_epsilon,
    grid_evaluations,
)
from .distributions import (
    CATALOG,
    Distribution,
    Exponential,
    Frechet,
    Gumbel,
    LogNormal,
    Normal,
    Pareto,
    TransformedDistribution,
    Uniform,
    Weibull,
    invert_cdf,
    parse_spec,
    to_infinite_endpoint,
    transform_sample,
)
from .errors import DataError, NotInConditionClass, UsageError
from .simulation import (
    EtaExperiment,
    EtaResult,
    KScheduleReport,
    RepRecord,
    SimulationConfig,
    SimulationResult,
    child_seed,
    eta_q_experiment,
    k_from_rule,
    parse_k_rule,
    records_to_csv,
    renyi_tail_oracle,
    sample_tail_conditional,
    simulate_null,
    simulate_power,
    validate_k_schedule,
)
from .tail_statistic import (
    TailSlice,
    TestReport,
    hill_estimator,
    p_values,
    r_statistic,
    run_test,
    select_top_k,
    z_statistic,
)

__all__ = [
    "CATALOG",
    "ConditionReport",
    "DataError",
    "Distribution",
    "EpsilonEstimate",
    "EtaExperiment",
    "EtaResult",
    "Exponential",
    "Frechet",
    "Gumbel",
    "KScheduleReport",
    "LogNormal",
    "MonotoneGrid",
    "Normal",
    "NotInConditionClass",
    "Pareto",
    "RepRecord",
    "SimulationConfig",
    "SimulationResult",
    "TailSlice",
    "TestReport",
    "TransformedDistribution",
    "Uniform",
    "UsageError",
    "Weibull",
    "check_condition_b",
    "check_condition_c",
    "check_delta",
    "child_seed",
    "classify_alternative",
    "estimate_epsilon",
    "eta_q_experiment",
    "grid_evaluations",
    "hill_estimator",
    "invert_cdf",
    "k_from_rule",
    "p_values",
    "parse_k_rule",
    "parse_spec",
    "r_statistic",
    "records_to_csv",
    "renyi_tail_oracle",
    "run_test",
    "sample_tail_conditional",
    "select_top_k",
    "simulate_null",
    "simulate_power",
    "to_infinite_endpoint",
    "transform_sample",
    "validate_k_schedule",
    "z_statistic",
]
