"""Single-base-station location spoofing detection over Rician fading MIMO channels."""
from .adversary import (
    AttackStrategy,
    RoadGeometry,
    attack_at,
    beam_objective,
    build_attack,
    directional_beamformer,
    kl_divergence,
    optimal_beam_direction,
    optimal_location,
    optimal_power,
)
from .channel import RicianChannelSpec, los_component, sample_channel
from .detection import (
    GaussianObservationModel,
    ScenarioParams,
    alt_model,
    log_likelihood,
    log_lrt,
    null_model,
    sample_observation,
    statistic_threshold,
    test_statistic,
)
from .errors import (
    ConfigError,
    DegenerateDetectorError,
    InfeasibleScenarioError,
    InvalidArgumentError,
    LsdsError,
    NumericalError,
)
from .geometry import (
    PathLossModel,
    PolarLocation,
    UlaConfig,
    euclidean_distance,
    path_loss_gain,
    steering_vector,
)
from .metrics import (
    DetectionMetrics,
    RocCurve,
    closed_form_rates,
    deflection,
    min_total_error,
    monte_carlo_min_total_error,
    monte_carlo_rates,
    monte_carlo_sweep,
    q_function,
    q_inverse,
    roc_curve,
)

__version__ = "0.1.0"
