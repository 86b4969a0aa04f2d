"""Exact hitting/return-time statistics for finite measure-preserving systems.

Core objects: cyclic systems with marked subsets, staircase hitting laws and
their stamp-machine realizations, odometer tower stampings that realize any
admissible continuous concave target as a weak limit of hitting CDFs, and a
Monte Carlo engine cross-validated against the exact computations.
"""

from .conditions import (
    CReport,
    RationalF,
    Violation,
    check_class_f,
    check_conditions_c,
    check_inequality_i,
    to_rational_f,
)
from .curves import (
    StepCDF,
    TargetF,
    cdf_from_builtin,
    levy_distance,
    sup_distance,
    tail_integral,
    value_at,
)
from .cyclic import (
    CyclicSystem,
    KacTown,
    gap_counts,
    hitting_cdf,
    hitting_times,
    kac_expectation,
    kac_town,
    make_cyclic,
    return_cdf,
)
from .errors import InvariantError, SchemaError
from .montecarlo import (
    BernoulliSpec,
    CyclicSpec,
    EmpiricalCDF,
    MarkovSpec,
    RotationSpec,
    ks_distance,
    simulate_hitting,
)
from .odometer import (
    RealizationStage,
    RealizationTrace,
    TowerStamping,
    plan_tower,
    realize,
    stamp_tower,
    subtower_exactness_check,
)
from .rationalize import (
    StarBudget,
    check_star,
    rationalize_step,
    rationalize_target,
    star_budget,
)
from .stamps import Stamp, StampParams, build_system, derive_params, make_stamp, verify_roundtrip

__version__ = "0.1.0"

__all__ = [
    "BernoulliSpec",
    "CReport",
    "CyclicSpec",
    "CyclicSystem",
    "EmpiricalCDF",
    "InvariantError",
    "KacTown",
    "MarkovSpec",
    "RationalF",
    "RealizationStage",
    "RealizationTrace",
    "RotationSpec",
    "SchemaError",
    "Stamp",
    "StampParams",
    "StarBudget",
    "StepCDF",
    "TargetF",
    "TowerStamping",
    "Violation",
    "build_system",
    "cdf_from_builtin",
    "check_class_f",
    "check_conditions_c",
    "check_inequality_i",
    "check_star",
    "derive_params",
    "gap_counts",
    "hitting_cdf",
    "hitting_times",
    "kac_expectation",
    "kac_town",
    "ks_distance",
    "levy_distance",
    "make_cyclic",
    "make_stamp",
    "plan_tower",
    "rationalize_step",
    "rationalize_target",
    "realize",
    "return_cdf",
    "simulate_hitting",
    "stamp_tower",
    "star_budget",
    "subtower_exactness_check",
    "sup_distance",
    "tail_integral",
    "to_rational_f",
    "value_at",
    "verify_roundtrip",
]
