"""Multi-cell drone base station network simulator."""

from ._dbsim import (  # noqa: F401
    ConfigError,
    DomainError,
    NoDataError,
    ScenarioConfig,
    __version__,
    candidate_angles,
    elevation_angle_deg,
    euclidean_distance,
    ground_distance,
    jain_index,
    los_probability,
    max_turn_angle,
    noise_power_watt,
    path_loss_db,
    percentile,
    received_power_watt,
    run,
    run_batch,
)
