"""Observation models under both hypotheses and the likelihood ratio test.

A single pilot (s = 1) observed at the BS is complex Gaussian with a
scaled-identity covariance under either hypothesis, so each model is just
a mean vector and one variance. All likelihood work is done in the log
domain; thresholds are carried as ``ln_lambda``.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import (
    RicianChannelSpec,
    complex_normal,
    los_component,
    los_power_fraction,
    scattered_power_fraction,
)
from .errors import InvalidArgumentError
from .geometry import PathLossModel, PolarLocation, UlaConfig, path_loss_gain, steering_vector

COV_RTOL = 1e-9
MEAN_SCALES = ("derived", "literal")


@dataclass(frozen=True, eq=False)
class GaussianObservationModel:
    """CN(mean, cov_scale * I)."""

    mean: np.ndarray
    cov_scale: float

    def __post_init__(self):
        mean = np.array(self.mean, dtype=complex).reshape(-1)
        mean.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        if not (self.cov_scale > 0 and math.isfinite(self.cov_scale)):
            raise InvalidArgumentError(f"cov_scale must be positive, got {self.cov_scale}")
        object.__setattr__(self, "cov_scale", float(self.cov_scale))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def same_as(self, other: "GaussianObservationModel", atol: float = 1e-12) -> bool:
        return (
            self.dim == other.dim
            and np.allclose(self.mean, other.mean, rtol=0, atol=atol)
            and math.isclose(self.cov_scale, other.cov_scale, rel_tol=COV_RTOL)
        )


@dataclass(frozen=True)
class ScenarioParams:
    """Every constant that defines one verification scenario.

    Powers and variances are linear. ``mean_scale`` selects how the
    legitimate mean is normalised: ``"derived"`` uses the matched-beam
    gain sqrt(N_L); ``"literal"`` reproduces the sqrt(N_B) factor as
    printed in the original closed form. ``pilots`` > 1 averages that many
    independent pilot observations per decision.
    """

    claimed: PolarLocation
    bs_array: UlaConfig = field(default_factory=lambda: UlaConfig(4))
    leg_array: UlaConfig = field(default_factory=lambda: UlaConfig(3))
    mal_array: UlaConfig = field(default_factory=lambda: UlaConfig(3))
    k_leg: float = 10 ** 0.1
    k_mal: float = 10 ** 0.1
    noise_leg: float = 1.0
    noise_mal: float = 1.0
    p_leg: float = 1.0
    path_loss: PathLossModel = field(default_factory=PathLossModel)
    falsehood_radius: float = 10.0
    mean_scale: str = "derived"
    pilots: int = 1

    def __post_init__(self):
        for name in ("noise_leg", "noise_mal", "p_leg", "falsehood_radius"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidArgumentError(f"{name} must be strictly positive, got {value}")
        for name in ("k_leg", "k_mal"):
            if not getattr(self, name) >= 0:
                raise InvalidArgumentError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.mean_scale not in MEAN_SCALES:
            raise InvalidArgumentError(f"mean_scale must be one of {MEAN_SCALES}")
        if int(self.pilots) != self.pilots or self.pilots < 1:
            raise InvalidArgumentError(f"pilots must be a positive integer, got {self.pilots}")

    def replace(self, **changes) -> "ScenarioParams":
        return dataclasses.replace(self, **changes)

    def gain(self, d: float) -> float:
        return path_loss_gain(self.path_loss, d)

    @property
    def snr_leg(self) -> float:
        """Average legitimate SNR, P_L g(d_L) / sigma_L^2."""
        return self.p_leg * self.gain(self.claimed.d) / self.noise_leg

    def with_snr(self, snr: float) -> "ScenarioParams":
        """Copy with P_L chosen so the legitimate average SNR equals ``snr`` (linear)."""
        return self.replace(p_leg=snr * self.noise_leg / self.gain(self.claimed.d))

    def tau(self, array: UlaConfig) -> float:
        return array.tau(self.path_loss.f0, self.path_loss.c)

    def leg_channel(self) -> RicianChannelSpec:
        return RicianChannelSpec(
            self.k_leg, self.bs_array, self.leg_array, self.claimed.theta,
            self.leg_array.orientation, self.path_loss.f0, self.path_loss.c,
        )

    def mal_channel(self, attacker_loc: PolarLocation) -> RicianChannelSpec:
        return RicianChannelSpec(
            self.k_mal, self.bs_array, self.mal_array, attacker_loc.theta,
            self.mal_array.orientation, self.path_loss.f0, self.path_loss.c,
        )


def null_model(params: ScenarioParams) -> GaussianObservationModel:
    """Observation model when the vehicle really is at its claimed location."""
    rx_power = params.p_leg * params.gain(params.claimed.d)
    amplitude = math.sqrt(rx_power * los_power_fraction(params.k_leg))
    if params.mean_scale == "literal":
        r = steering_vector(params.bs_array.n, params.tau(params.bs_array), params.claimed.theta)
        mean = amplitude * math.sqrt(params.bs_array.n) * r
    else:
        # matched transmit beam b = t^H / |t|, so H_o b = sqrt(N_L) r^T
        t = steering_vector(
            params.leg_array.n, params.tau(params.leg_array), params.leg_array.orientation
        )
        b = t.conj() / np.linalg.norm(t)
        mean = amplitude * (los_component(params.leg_channel()) @ b)
    cov = rx_power * scattered_power_fraction(params.k_leg) + params.noise_leg
    return GaussianObservationModel(mean, cov / params.pilots)


def alt_model(
    params: ScenarioParams,
    attacker_loc: PolarLocation,
    p_mal: float,
    beamformer: np.ndarray,
) -> GaussianObservationModel:
    """Observation model for a spoofer at ``attacker_loc`` using ``beamformer``."""
    p = np.asarray(beamformer, dtype=complex).reshape(-1)
    if p.shape[0] != params.mal_array.n:
        raise InvalidArgumentError(
            f"beamformer length {p.shape[0]} != attacker array size {params.mal_array.n}"
        )
    if abs(np.linalg.norm(p) - 1.0) > 1e-9:
        raise InvalidArgumentError(f"beamformer must be unit norm, got {np.linalg.norm(p)}")
    if not p_mal > 0:
        raise InvalidArgumentError(f"attacker power must be positive, got {p_mal}")
    rx_power = p_mal * params.gain(attacker_loc.d)
    amplitude = math.sqrt(rx_power * los_power_fraction(params.k_mal))
    mean = amplitude * (los_component(params.mal_channel(attacker_loc)) @ p)
    cov = rx_power * scattered_power_fraction(params.k_mal) + params.noise_mal
    return GaussianObservationModel(mean, cov / params.pilots)


def sample_observation(
    model: GaussianObservationModel, rng: np.random.Generator, size: int | None = None
) -> np.ndarray:
    """Draw one observation, or ``size`` of them stacked along axis 0."""
    shape = (model.dim,) if size is None else (size, model.dim)
    return model.mean + complex_normal(rng, shape, model.cov_scale)


def _check_dims(model: GaussianObservationModel, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=complex)
    if y.shape[-1:] != (model.dim,):
        raise InvalidArgumentError(f"observation length {y.shape[-1:]} != model dim {model.dim}")
    return y


def log_likelihood(model: GaussianObservationModel, y) -> np.ndarray | float:
    y = _check_dims(model, y)
    resid = np.sum(np.abs(y - model.mean) ** 2, axis=-1)
    return -model.dim * math.log(math.pi * model.cov_scale) - resid / model.cov_scale


def log_lrt(null: GaussianObservationModel, alt: GaussianObservationModel, y):
    """ln f(y|H1) - ln f(y|H0); valid for unequal covariances too."""
    if null.dim != alt.dim:
        raise InvalidArgumentError("null and alternative models differ in dimension")
    return log_likelihood(alt, y) - log_likelihood(null, y)


def _require_equal_cov(null: GaussianObservationModel, alt: GaussianObservationModel) -> None:
    if null.dim != alt.dim:
        raise InvalidArgumentError("null and alternative models differ in dimension")
    if not math.isclose(null.cov_scale, alt.cov_scale, rel_tol=COV_RTOL):
        raise InvalidArgumentError(
            f"linear test statistic needs equal covariances "
            f"({null.cov_scale} vs {alt.cov_scale}); use log_lrt instead"
        )


def test_statistic(null: GaussianObservationModel, alt: GaussianObservationModel, y):
    """T(y) = 2 Re{(m1 - m0)^H y} / sigma^2, the sufficient statistic when R0 = R1."""
    _require_equal_cov(null, alt)
    y = _check_dims(null, y)
    diff = alt.mean - null.mean
    return 2.0 * np.real(y @ diff.conj()) / null.cov_scale


test_statistic.__test__ = False  # keep pytest from collecting the imported name


def statistic_threshold(
    null: GaussianObservationModel, alt: GaussianObservationModel, ln_lambda: float
) -> float:
    """Threshold on ``test_statistic`` equivalent to log-LRT threshold ``ln_lambda``."""
    _require_equal_cov(null, alt)
    diff = alt.mean - null.mean
    offset = np.real(np.vdot(diff, alt.mean + null.mean)) / null.cov_scale
    return ln_lambda + float(offset)
