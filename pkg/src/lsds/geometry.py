"""Polar geometry, uniform linear array responses and path loss.

Everything is expressed in a polar frame centred on the base station.
Bearings live in [0, pi]: a ULA cannot tell theta from -theta, so any
other angle is folded back into that range on construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

SPEED_OF_LIGHT = 3.0e8
DSRC_CARRIER_HZ = 5.9e9


def fold_bearing(theta: float) -> float:
    """Map an arbitrary angle onto its ULA-equivalent bearing in [0, pi]."""
    wrapped = math.remainder(float(theta), 2.0 * math.pi)  # (-pi, pi]
    return abs(wrapped)


@dataclass(frozen=True)
class PolarLocation:
    d: float
    theta: float

    def __post_init__(self):
        if not (self.d > 0 and math.isfinite(self.d)):
            raise InvalidArgumentError(f"distance must be positive and finite, got {self.d}")
        if not math.isfinite(self.theta):
            raise InvalidArgumentError(f"bearing must be finite, got {self.theta}")
        object.__setattr__(self, "theta", fold_bearing(self.theta))

    def to_cartesian(self) -> tuple[float, float]:
        return self.d * math.cos(self.theta), self.d * math.sin(self.theta)


@dataclass(frozen=True)
class UlaConfig:
    """A uniform linear array.

    ``spacing`` is the inter-element distance in metres and ``orientation``
    the pointing angle of the array (psi in the vehicle's frame).
    """

    n: int
    spacing: float = SPEED_OF_LIGHT / (2.0 * DSRC_CARRIER_HZ)
    orientation: float = math.pi / 2

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidArgumentError(f"element count must be an integer >= 1, got {self.n}")
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise InvalidArgumentError(f"element spacing must be positive, got {self.spacing}")
        object.__setattr__(self, "n", int(self.n))

    def tau(self, carrier_hz: float = DSRC_CARRIER_HZ, speed: float = SPEED_OF_LIGHT) -> float:
        """Phase advance per element, 2 pi f0 rho / c."""
        value = 2.0 * math.pi * carrier_hz * self.spacing / speed
        if not (value > 0 and math.isfinite(value)):
            raise InvalidArgumentError(f"phase constant must be positive and finite, got {value}")
        return value


@dataclass(frozen=True)
class PathLossModel:
    f0: float = DSRC_CARRIER_HZ
    c: float = SPEED_OF_LIGHT
    d0: float = 1.0
    eta: float = 2.0

    def __post_init__(self):
        for name in ("f0", "c", "d0"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidArgumentError(f"{name} must be positive, got {value}")
        if not math.isfinite(self.eta):
            raise InvalidArgumentError(f"path-loss exponent must be finite, got {self.eta}")


def steering_vector(n: int, tau: float, angle: float) -> np.ndarray:
    """Array response ``exp(j k tau cos(angle))`` for k = 0..n-1."""
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"steering vector needs n >= 1, got {n}")
    if not math.isfinite(tau):
        raise InvalidArgumentError(f"tau must be finite, got {tau}")
    k = np.arange(int(n))
    return np.exp(1j * k * tau * math.cos(angle))


def path_loss_gain(model: PathLossModel, d: float) -> float:
    if not d > 0:
        raise InvalidArgumentError(f"distance must be positive, got {d}")
    ref = (model.c / (4.0 * math.pi * model.f0 * model.d0)) ** 2
    return ref * (model.d0 / d) ** model.eta


def euclidean_distance(a: PolarLocation, b: PolarLocation) -> float:
    if a == b:
        return 0.0
    sq = a.d**2 + b.d**2 - 2.0 * a.d * b.d * math.cos(a.theta - b.theta)
    return math.sqrt(max(sq, 0.0))
