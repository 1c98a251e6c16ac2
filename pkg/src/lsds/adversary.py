"""The spoofer's best response: where to stand, how loud to transmit, where to beam.

The attacker knows the scenario statistics and the LOS geometry but not the
channel realisation. Its beamformer is restricted to a directional
(steering-vector) shape, so the search is one-dimensional in the beam angle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .channel import los_power_fraction
from .detection import GaussianObservationModel, ScenarioParams, null_model
from .errors import InfeasibleScenarioError, InvalidArgumentError
from .geometry import PolarLocation, euclidean_distance, steering_vector

GRID_POINTS = 2048
REFINE_XTOL = 1e-7


@dataclass(frozen=True, eq=False)
class AttackStrategy:
    location: PolarLocation
    tx_power: float
    beam_direction: float
    beamformer: np.ndarray


@dataclass(frozen=True)
class RoadGeometry:
    """Discretised on-road positions available to the attacker."""

    candidates: tuple[PolarLocation, ...]

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if not self.candidates:
            raise InvalidArgumentError("road geometry needs at least one candidate location")

    @classmethod
    def segment(cls, start: PolarLocation, end: PolarLocation, n: int) -> "RoadGeometry":
        """``n`` evenly spaced points on the straight road between two locations."""
        if n < 1:
            raise InvalidArgumentError("segment needs n >= 1")
        (x0, y0), (x1, y1) = start.to_cartesian(), end.to_cartesian()
        pts = []
        for s in np.linspace(0.0, 1.0, n):
            x, y = x0 + s * (x1 - x0), y0 + s * (y1 - y0)
            pts.append(PolarLocation(math.hypot(x, y), math.atan2(y, x)))
        return cls(tuple(pts))


def optimal_location(road: RoadGeometry, claimed: PolarLocation, r_m: float) -> PolarLocation:
    """Feasible road point with the smallest bearing offset from the claimed location.

    Ties go to the smaller range offset, then to the earlier candidate.
    """
    feasible = [
        (abs(loc.theta - claimed.theta), abs(loc.d - claimed.d), i, loc)
        for i, loc in enumerate(road.candidates)
        if euclidean_distance(loc, claimed) >= r_m
    ]
    if not feasible:
        raise InfeasibleScenarioError(
            f"no road candidate lies at least {r_m} m from the claimed location"
        )
    return min(feasible, key=lambda item: item[:3])[3]


def optimal_power(params: ScenarioParams, attacker_loc: PolarLocation) -> float:
    """Transmit power that matches the attacker's average SNR to the legitimate one."""
    return (
        params.p_leg * params.gain(params.claimed.d) * params.noise_mal
        / (params.gain(attacker_loc.d) * params.noise_leg)
    )


def directional_beamformer(n_m: int, tau_m: float, phi: float) -> np.ndarray:
    return steering_vector(n_m, tau_m, phi) / math.sqrt(n_m)


def _array_gains(params: ScenarioParams, phis: np.ndarray) -> np.ndarray:
    """t_M p(phi) for each beam angle: the scalar gain of the rank-one LOS link."""
    n_m = params.mal_array.n
    tau = params.tau(params.mal_array)
    u = math.cos(params.mal_array.orientation) + np.cos(np.atleast_1d(phis))
    k = np.arange(n_m)
    return np.exp(1j * tau * np.outer(u, k)).sum(axis=1) / math.sqrt(n_m)


def beam_objective(
    params: ScenarioParams, attacker_loc: PolarLocation, p_mal: float, phis
) -> np.ndarray:
    """Distance |m0 - m1(phi)| between the two hypothesis means, vectorised over phi.

    G_o = r_M^T t_M is rank one, so m1(phi) = c (t_M p(phi)) r_M and the
    norm expands into O(N_B + N_M) work per angle.
    """
    m0 = null_model(params).mean
    r_m = steering_vector(params.bs_array.n, params.tau(params.bs_array), attacker_loc.theta)
    c = math.sqrt(p_mal * params.gain(attacker_loc.d) * los_power_fraction(params.k_mal))
    a = _array_gains(params, phis)
    cross = np.vdot(r_m, m0)
    sq = (
        np.vdot(m0, m0).real
        + c**2 * np.abs(a) ** 2 * params.bs_array.n
        - 2.0 * c * np.real(a.conj() * cross)
    )
    return np.sqrt(np.maximum(sq, 0.0))


def optimal_beam_direction(
    params: ScenarioParams, attacker_loc: PolarLocation, p_mal: float
) -> float:
    """Beam angle in [0, pi] minimising the mean mismatch with the legitimate signal.

    The array factor is multimodal in phi, so a dense grid locates the
    global basin before a bounded scalar refinement polishes it.
    """
    if params.mal_array.n == 1:
        return 0.0
    grid = np.linspace(0.0, math.pi, GRID_POINTS)
    values = beam_objective(params, attacker_loc, p_mal, grid)
    i = int(np.argmin(values))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, GRID_POINTS - 1)]
    res = minimize_scalar(
        lambda phi: float(beam_objective(params, attacker_loc, p_mal, phi)[0]),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": REFINE_XTOL},
    )
    if res.success and res.fun <= values[i]:
        return float(res.x)
    return float(grid[i])


def kl_divergence(alt: GaussianObservationModel, null: GaussianObservationModel) -> float:
    """D(alt || null) for two scaled-identity complex Gaussians."""
    if alt.dim != null.dim:
        raise InvalidArgumentError("models differ in dimension")
    x = alt.cov_scale / null.cov_scale - 1.0
    cov_term = alt.dim * (x - math.log1p(x))
    mean_term = float(np.sum(np.abs(null.mean - alt.mean) ** 2)) / null.cov_scale
    return max(cov_term, 0.0) + mean_term


def attack_at(params: ScenarioParams, location: PolarLocation) -> AttackStrategy:
    """Best power and beam for an attacker whose location is already fixed."""
    power = optimal_power(params, location)
    phi = optimal_beam_direction(params, location, power)
    p = directional_beamformer(params.mal_array.n, params.tau(params.mal_array), phi)
    return AttackStrategy(location, power, phi, p)


def build_attack(params: ScenarioParams, road: RoadGeometry) -> AttackStrategy:
    location = optimal_location(road, params.claimed, params.falsehood_radius)
    return attack_at(params, location)
