"""Detection-rate calculations: closed form for equal covariances, Monte Carlo otherwise.

Monte Carlo work is split into fixed-size chunks, each drawing from its own
substream derived from the root seed and the chunk index. Counts are summed,
so results do not depend on how many workers process the chunks.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import erfc, erfcinv

from .detection import (
    COV_RTOL,
    GaussianObservationModel,
    log_lrt,
    sample_observation,
)
from .errors import DegenerateDetectorError, InvalidArgumentError

CHUNK_TRIALS = 16384
ALPHA_GRID_EDGE = 1e-4
UNINFORMATIVE_Q = 1e-12
_CHUNK_STREAM = 0
_PILOT_STREAM = 1

SeedLike = int | np.random.SeedSequence | np.random.Generator


@dataclass(frozen=True)
class DetectionMetrics:
    alpha: float
    beta: float
    ln_lambda: float
    alpha_stderr: float = 0.0
    beta_stderr: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidArgumentError(f"{name} must lie in [0, 1], got {value}")

    @property
    def total_error(self) -> float:
        return 1.0 - self.beta + self.alpha

    @property
    def total_error_stderr(self) -> float:
        # H0 and H1 draws are independent
        return math.hypot(self.alpha_stderr, self.beta_stderr)


@dataclass(frozen=True, eq=False)
class RocCurve:
    """ROC points ordered by increasing threshold (so decreasing alpha)."""

    alpha: np.ndarray
    beta: np.ndarray
    thresholds: np.ndarray
    method: str
    alpha_stderr: np.ndarray = field(default=None)
    beta_stderr: np.ndarray = field(default=None)
    uninformative: bool = False

    def __post_init__(self):
        zeros = np.zeros_like(self.alpha, dtype=float)
        if self.alpha_stderr is None:
            object.__setattr__(self, "alpha_stderr", zeros)
        if self.beta_stderr is None:
            object.__setattr__(self, "beta_stderr", zeros.copy())

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.alpha.tolist(), self.beta.tolist()))

    def area(self) -> float:
        """Trapezoidal area under the curve, closed with the (0,0) and (1,1) corners."""
        a = np.concatenate(([1.0], self.alpha, [0.0]))
        b = np.concatenate(([1.0], self.beta, [0.0]))
        order = np.argsort(a, kind="stable")
        return float(trapezoid(b[order], a[order]))


def q_function(x):
    """Gaussian upper-tail probability."""
    out = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out


def q_inverse(p):
    out = math.sqrt(2.0) * erfcinv(2.0 * np.asarray(p, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def equal_covariance(null: GaussianObservationModel, alt: GaussianObservationModel) -> bool:
    return math.isclose(null.cov_scale, alt.cov_scale, rel_tol=COV_RTOL)


def is_uninformative(q: float) -> bool:
    """Deflection small enough that the spoofer is, numerically, a perfect impersonator."""
    return q <= UNINFORMATIVE_Q


def deflection(null: GaussianObservationModel, alt: GaussianObservationModel) -> float:
    """(m1 - m0)^H R0^-1 (m1 - m0) for equal covariances."""
    if null.dim != alt.dim:
        raise InvalidArgumentError("models differ in dimension")
    if not equal_covariance(null, alt):
        raise InvalidArgumentError(
            f"deflection needs equal covariances ({null.cov_scale} vs {alt.cov_scale})"
        )
    return float(np.sum(np.abs(alt.mean - null.mean) ** 2)) / null.cov_scale


def _closed_form_arrays(q: float, ln_lambda):
    s = math.sqrt(2.0 * q)
    ln_lambda = np.asarray(ln_lambda, dtype=float)
    return q_function((ln_lambda + q) / s), q_function((ln_lambda - q) / s)


def closed_form_rates(q: float, ln_lambda: float) -> DetectionMetrics:
    if not q > 0:
        raise DegenerateDetectorError(
            "deflection is zero: the spoofer is indistinguishable and rates are undefined"
        )
    alpha, beta = _closed_form_arrays(q, ln_lambda)
    return DetectionMetrics(float(alpha), float(beta), float(ln_lambda))


def min_total_error(q: float) -> float:
    """min over thresholds of 1 - beta + alpha; the optimum sits at ln_lambda = 0."""
    if q < 0:
        raise InvalidArgumentError(f"deflection must be >= 0, got {q}")
    if q == 0:
        return 1.0
    return 2.0 * q_function(math.sqrt(q / 2.0))


def as_seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(int(seed.integers(2**63)))
    return np.random.SeedSequence(int(seed))


def substream(root: np.random.SeedSequence, *key: int) -> np.random.SeedSequence:
    """Counter-derived child of ``root``; stateless, unlike ``SeedSequence.spawn``."""
    return np.random.SeedSequence(entropy=root.entropy, spawn_key=tuple(root.spawn_key) + key)


def _count_chunk(args) -> tuple[np.ndarray, np.ndarray]:
    null, alt, thresholds, n, ss = args
    rng = np.random.default_rng(ss)
    llr0 = np.sort(log_lrt(null, alt, sample_observation(null, rng, n)))
    llr1 = np.sort(log_lrt(null, alt, sample_observation(alt, rng, n)))
    # strict exceedance: log_lrt > ln_lambda
    c0 = n - np.searchsorted(llr0, thresholds, side="right")
    c1 = n - np.searchsorted(llr1, thresholds, side="right")
    return c0.astype(np.int64), c1.astype(np.int64)


def monte_carlo_sweep(
    null: GaussianObservationModel,
    alt: GaussianObservationModel,
    ln_lambdas,
    trials: int,
    seed: SeedLike,
    workers: int = 1,
) -> list[DetectionMetrics]:
    """Empirical false-positive and detection rates at every threshold from one sample set."""
    if trials < 1:
        raise InvalidArgumentError(f"trials must be >= 1, got {trials}")
    thresholds = np.atleast_1d(np.asarray(ln_lambdas, dtype=float))
    root = as_seed_sequence(seed)
    sizes = [CHUNK_TRIALS] * (trials // CHUNK_TRIALS)
    if trials % CHUNK_TRIALS:
        sizes.append(trials % CHUNK_TRIALS)
    jobs = [
        (null, alt, thresholds, n, substream(root, _CHUNK_STREAM, i)) for i, n in enumerate(sizes)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_count_chunk, jobs))
    else:
        results = [_count_chunk(job) for job in jobs]
    c0 = sum(r[0] for r in results)
    c1 = sum(r[1] for r in results)
    out = []
    for t, k0, k1 in zip(thresholds, c0, c1):
        a, b = k0 / trials, k1 / trials
        out.append(
            DetectionMetrics(
                float(a), float(b), float(t),
                math.sqrt(a * (1 - a) / trials), math.sqrt(b * (1 - b) / trials),
            )
        )
    return out


def monte_carlo_rates(
    null: GaussianObservationModel,
    alt: GaussianObservationModel,
    ln_lambda: float,
    trials: int,
    seed: SeedLike,
    workers: int = 1,
) -> DetectionMetrics:
    return monte_carlo_sweep(null, alt, [ln_lambda], trials, seed, workers)[0]


def monte_carlo_min_total_error(
    null: GaussianObservationModel,
    alt: GaussianObservationModel,
    trials: int,
    seed: SeedLike,
    workers: int = 1,
) -> DetectionMetrics:
    """Rates at ln_lambda = 0, the threshold minimising 1 - beta + alpha for any pair of densities."""
    return monte_carlo_rates(null, alt, 0.0, trials, seed, workers)


def alpha_grid(n_points: int) -> np.ndarray:
    return np.linspace(1.0 - ALPHA_GRID_EDGE, ALPHA_GRID_EDGE, n_points)


def roc_thresholds(q: float, n_points: int) -> np.ndarray:
    """ln_lambda values whose closed-form false-positive rates are evenly spaced."""
    return math.sqrt(2.0 * q) * q_inverse(alpha_grid(n_points)) - q


def _pilot_thresholds(null, alt, n_points, root) -> np.ndarray:
    rng = np.random.default_rng(substream(root, _PILOT_STREAM))
    llr = log_lrt(null, alt, sample_observation(null, rng, 10_000))
    t = np.quantile(llr, 1.0 - alpha_grid(n_points))
    if np.ptp(t) == 0:
        return np.linspace(-1.0, 1.0, n_points)
    return t


def roc_curve(
    null: GaussianObservationModel,
    alt: GaussianObservationModel,
    n_points: int = 50,
    method: str = "closed-form",
    trials: int = 10_000,
    seed: SeedLike = 0,
    workers: int = 1,
    thresholds=None,
) -> RocCurve:
    """Sweep the log-LRT threshold and collect (alpha, beta) pairs.

    Equal covariances get thresholds placed analytically so the points are
    spread evenly in alpha; otherwise they come from quantiles of an
    independent pilot sample under H0.
    """
    if n_points < 2:
        raise InvalidArgumentError("an ROC curve needs at least two points")
    if method not in ("closed-form", "monte-carlo"):
        raise InvalidArgumentError(f"unknown ROC method {method!r}")
    equal = equal_covariance(null, alt)
    q = deflection(null, alt) if equal else None
    uninformative = equal and is_uninformative(q)
    root = as_seed_sequence(seed)

    if thresholds is None:
        if uninformative:
            thresholds = np.linspace(-1.0, 1.0, n_points)
        elif equal:
            thresholds = roc_thresholds(q, n_points)
        else:
            thresholds = _pilot_thresholds(null, alt, n_points, root)
    thresholds = np.sort(np.asarray(thresholds, dtype=float))

    if method == "closed-form":
        if not equal:
            raise InvalidArgumentError("closed-form rates need equal covariances; use monte-carlo")
        if uninformative:
            diag = alpha_grid(n_points)
            return RocCurve(diag, diag.copy(), thresholds, method, uninformative=True)
        alpha, beta = _closed_form_arrays(q, thresholds)
        return RocCurve(np.asarray(alpha), np.asarray(beta), thresholds, method)

    rates = monte_carlo_sweep(null, alt, thresholds, trials, root, workers)
    return RocCurve(
        np.array([r.alpha for r in rates]),
        np.array([r.beta for r in rates]),
        thresholds,
        method,
        np.array([r.alpha_stderr for r in rates]),
        np.array([r.beta_stderr for r in rates]),
        uninformative=uninformative,
    )
