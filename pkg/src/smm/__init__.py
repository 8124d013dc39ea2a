"""Information-theoretically secure distributed matrix multiplication.

A user splits private matrices into blocks, hides them inside random
matrix polynomials, and ships one evaluation to each of N servers; any
l colluding servers learn exactly nothing, yet the user decodes the
product from the answers by interpolation.  Three schemes are provided
(one-sided with a public B, fully secure, and an aligned 8-server
variant), together with an exhaustive leakage auditor, exact rate
calculators, and a local or TCP execution harness.
"""

from .errors import (
    AuditBudgetError,
    ConfigurationError,
    DimensionError,
    FeasibilityError,
    FieldMismatchError,
    InsufficientAnswersError,
    ProtocolError,
    SmmError,
    WorkerError,
)
from .field import DEFAULT_MODULUS, FieldElement, PrimeField, default_points, make_rng
from .linalg import (
    COL_WISE,
    ROW_WISE,
    FieldMatrix,
    PartitionSpec,
    crop,
    matmul,
    pad_cols,
    pad_rows,
    partition,
    scalar_axpy,
    stack,
)
from .interp import EvaluationSet, evaluate_poly, interpolate_all, interpolate_subset
from .schemes import (
    ALIGNED,
    FULLY_SECURE,
    ONE_SIDED,
    AnswerSet,
    PlanValidation,
    SchemeParams,
    SchemePlan,
    Share,
    ShareSet,
    achievable_rate,
    decode,
    encode,
    encode_with_keys,
    plan_aligned_8_1,
    plan_from_text,
    plan_fully_secure,
    plan_one_sided,
    plan_to_text,
    r_ceil,
    r_floor,
    server_compute,
    validate_exponent_plan,
)
from .audit import (
    AuditReport,
    SetVerdict,
    audit_collusion_count_boundary,
    audit_fully_secure,
    audit_one_sided,
    audit_plan,
    audit_views,
)
from .rates import (
    FIX_ELL,
    FIX_N,
    RatePoint,
    fully_secure_rate,
    one_sided_capacity,
    rate_point,
    sweep_table,
    to_csv,
)
from .harness import (
    JobSpec,
    LocalFleet,
    TranscriptLog,
    WorkerRegistry,
    WorkerServer,
    adversary_view,
    captured_shares,
    run_distributed,
    run_local,
)

__version__ = "0.1.0"

__all__ = [
    "AuditBudgetError", "ConfigurationError", "DimensionError",
    "FeasibilityError", "FieldMismatchError", "InsufficientAnswersError",
    "ProtocolError", "SmmError", "WorkerError",
    "DEFAULT_MODULUS", "FieldElement", "PrimeField", "default_points", "make_rng",
    "COL_WISE", "ROW_WISE", "FieldMatrix", "PartitionSpec", "crop", "matmul",
    "pad_cols", "pad_rows", "partition", "scalar_axpy", "stack",
    "EvaluationSet", "evaluate_poly", "interpolate_all", "interpolate_subset",
    "ALIGNED", "FULLY_SECURE", "ONE_SIDED", "AnswerSet", "PlanValidation",
    "SchemeParams", "SchemePlan", "Share", "ShareSet", "achievable_rate",
    "decode", "encode", "encode_with_keys", "plan_aligned_8_1", "plan_from_text",
    "plan_fully_secure", "plan_one_sided", "plan_to_text", "r_ceil", "r_floor",
    "server_compute", "validate_exponent_plan",
    "AuditReport", "SetVerdict", "audit_collusion_count_boundary",
    "audit_fully_secure", "audit_one_sided", "audit_plan", "audit_views",
    "FIX_ELL", "FIX_N", "RatePoint", "fully_secure_rate",
    "one_sided_capacity", "rate_point", "sweep_table", "to_csv",
    "JobSpec", "LocalFleet", "TranscriptLog", "WorkerRegistry", "WorkerServer",
    "adversary_view", "captured_shares", "run_distributed", "run_local",
]
