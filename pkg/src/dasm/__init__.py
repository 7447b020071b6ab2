"""Stable matching with affiliates and dichotomous preferences."""

from .blocking import (
    GAMMA,
    InvalidTuple,
    PotentialBlockingTuple,
    enumerate_potential_tuples,
    find_blocking_tuple,
    is_blocking,
    is_stable,
    swapped_matching,
)
from .generator import GenParams, ParamOutOfRange, generate
from .ilp import DimensionMismatch, IlpModel, LinearConstraint, build_model, check_matching, export_lp
from .io import dumps_instance, loads_instance, loads_matching, validate_instance
from .model import (
    EPS,
    ONE,
    STANDARD_LAMBDAS,
    ZERO,
    AgentId,
    EmployerScore,
    Instance,
    InstanceError,
    Lambda,
    Matching,
    is_valid_matching,
    prefers,
    valuation_applicant,
    valuation_employer,
)
from .oracle import InstanceTooLarge, StabilityReport, cross_check, enumerate_matchings, stable_set
from .reserved import ReservedProblem, greedy_maximal, greedy_reserved, is_maximal, is_reserved_b_matching
from .solver import Algorithm, build_priority_graphs, priority_match, smart_priority_match, solve

__version__ = "0.1.0"
