"""Freeway weaving-area cooperative lane changing: microscopic traffic
simulator, multi-agent PPO trainer and evaluation metrics."""

from ._core import (
    OBSERVATION_SIZE,
    ConfigError,
    DataError,
    DomainError,
    Episode,
    MetricsRecord,
    PolicyNet,
    RunConfig,
    StructuralError,
    WorldFault,
    clipped_objective,
    compute_gae,
    config,
    default_config,
    emission_rate,
    headway_penalty,
    idm_acceleration,
    lane_reward,
    load_config,
    run_episode,
    safe_accel_bound,
    train,
)
from ._core import __version__

__all__ = [
    "OBSERVATION_SIZE",
    "ConfigError",
    "DataError",
    "DomainError",
    "Episode",
    "MetricsRecord",
    "PolicyNet",
    "RunConfig",
    "StructuralError",
    "WorldFault",
    "clipped_objective",
    "compute_gae",
    "config",
    "default_config",
    "emission_rate",
    "headway_penalty",
    "idm_acceleration",
    "lane_reward",
    "load_config",
    "run_episode",
    "safe_accel_bound",
    "train",
    "__version__",
]
