"""Distributionally robust detector thresholds from moments."""

from ._drtune import (
    AttackPolicy,
    DomainError,
    LtiSystem,
    MomentSequence,
    NoiseFamily,
    NoiseModel,
    NumericalError,
    ReachBound,
    ThresholdResult,
    chebyshev_bound,
    chi_squared_moments,
    chi_squared_threshold,
    closed_form_threshold,
    empirical_false_alarm_rate,
    estimate_moments,
    is_feasible,
    markov_bound,
    noise_threshold,
    oracle_worst_case,
    reach_bound,
    simulate,
    solve_dare,
    tune_threshold,
    worst_case_probability,
    zero_alarm_attack,
)

__all__ = [name for name in dir() if not name.startswith("_")]
