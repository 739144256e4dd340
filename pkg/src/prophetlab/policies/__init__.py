"""Online policies."""
from .base import Observation, OnlinePolicy, threshold_exceeds
from .classic import (
    AlwaysFirst,
    CatchMaxThenPair,
    FixedThreshold,
    PerBlockThreshold,
    PickElements,
    RandomizedThresholdPolicy,
    RandomMaximalSet,
    SecretaryPolicy,
    eor_threshold_policy,
    fixed_threshold_policy,
    per_block_threshold_policy,
    secretary_policy,
)
from .optimal import OptimalPolicy, optimal_policy
from .reductions import (
    EorToRoe,
    ReductionParams,
    RoeToEor,
    SingleSampleRoeToEor,
    build_eor_to_roe,
    build_roe_to_eor,
    build_single_sample,
    core_subroutine,
    eor_to_roe,
    roe_to_eor,
    single_sample_roe_to_eor,
    truncated_instance,
)

__all__ = [n for n in dir() if not n.startswith("_")]
