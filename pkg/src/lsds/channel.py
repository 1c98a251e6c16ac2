"""Rician MIMO channels built from ULA steering vectors."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .geometry import DSRC_CARRIER_HZ, SPEED_OF_LIGHT, UlaConfig, steering_vector


def los_power_fraction(k_factor: float) -> float:
    """K / (1 + K), with the pure-LOS limit handled for K = inf."""
    if math.isinf(k_factor):
        return 1.0
    return k_factor / (1.0 + k_factor)


def scattered_power_fraction(k_factor: float) -> float:
    if math.isinf(k_factor):
        return 0.0
    return 1.0 / (1.0 + k_factor)


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples, variance split evenly over I/Q."""
    std = math.sqrt(variance / 2.0)
    return std * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


@dataclass(frozen=True)
class RicianChannelSpec:
    k_factor: float
    rx_array: UlaConfig
    tx_array: UlaConfig
    bearing_at_bs: float
    tx_pointing_angle: float
    carrier_hz: float = DSRC_CARRIER_HZ
    speed: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if not self.k_factor >= 0:
            raise InvalidArgumentError(f"Rician K must be >= 0, got {self.k_factor}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.rx_array.n, self.tx_array.n


def los_component(spec: RicianChannelSpec) -> np.ndarray:
    """Rank-one LOS matrix r^T t (receive response times transmit response)."""
    r = steering_vector(
        spec.rx_array.n, spec.rx_array.tau(spec.carrier_hz, spec.speed), spec.bearing_at_bs
    )
    t = steering_vector(
        spec.tx_array.n, spec.tx_array.tau(spec.carrier_hz, spec.speed), spec.tx_pointing_angle
    )
    return np.outer(r, t)


def sample_channel(spec: RicianChannelSpec, rng: np.random.Generator) -> np.ndarray:
    los = los_component(spec)
    scattered = complex_normal(rng, los.shape)
    return (
        math.sqrt(los_power_fraction(spec.k_factor)) * los
        + math.sqrt(scattered_power_fraction(spec.k_factor)) * scattered
    )
