"""Iteration engine: thresholds, sampling plans, carry-over, run metrics."""

from labelcascade.cascade.audit import (
    AmplificationReport,
    PrecisionAudit,
    amplification_ratio,
    precision_audit,
    wilson_interval,
)
from labelcascade.cascade.config import CascadeConfig, load_cascade_config
from labelcascade.cascade.engine import (
    CascadeEngine,
    ExhaustivePlan,
    IterationReport,
    SamplingPlan,
    assemble_training_set,
    plan_iteration,
)
from labelcascade.cascade.thresholds import (
    Partition,
    ThresholdPair,
    apply_thresholds,
    compute_lower_threshold,
    compute_threshold_pair,
    compute_upper_threshold,
)

__all__ = [
    "AmplificationReport",
    "CascadeConfig",
    "CascadeEngine",
    "ExhaustivePlan",
    "IterationReport",
    "Partition",
    "PrecisionAudit",
    "SamplingPlan",
    "ThresholdPair",
    "amplification_ratio",
    "apply_thresholds",
    "assemble_training_set",
    "compute_lower_threshold",
    "compute_threshold_pair",
    "compute_upper_threshold",
    "load_cascade_config",
    "plan_iteration",
    "precision_audit",
    "wilson_interval",
]
