"""Scenario configs, experiment runners and result files.

Configs are flat YAML mappings whose key names carry their units
(``k_leg_db``, ``theta_l_rad``, ``d_l_m`` ...). Decibel and pi-fraction
values are converted exactly once, here, at the parse boundary.
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
import math
import re
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np
import yaml

from . import adversary, metrics
from .detection import GaussianObservationModel, ScenarioParams, alt_model, null_model
from .errors import ConfigError, InvalidArgumentError, NumericalError
from .geometry import (
    DSRC_CARRIER_HZ,
    SPEED_OF_LIGHT,
    PathLossModel,
    PolarLocation,
    UlaConfig,
    euclidean_distance,
)

log = logging.getLogger(__name__)

KINDS = ("roc", "sweep-nm", "sweep-km", "sweep-snr", "single")
METHODS = ("closed-form", "monte-carlo", "both")
SWEEP_COLUMNS = [
    "sweep_value", "alpha", "alpha_stderr", "beta", "beta_stderr",
    "min_total_error", "mte_stderr", "method",
]
ROC_COLUMNS = [
    "snr_leg_db", "theta_offset_rad", "theta_m_rad", "q", "ln_lambda",
    "alpha", "alpha_stderr", "beta", "beta_stderr", "method", "note",
]
SINGLE_COLUMNS = SWEEP_COLUMNS[1:] + ["ln_lambda", "q", "kl_divergence"]
DEFAULT_TRIALS = {"roc": 10_000}
DEFAULT_SWEEP_TRIALS = 100_000


# ---------------------------------------------------------------------------
# value parsers

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_PI_RE = re.compile(rf"^\s*({_NUM})?\s*\*?\s*pi\s*(?:/\s*({_NUM}))?\s*$", re.IGNORECASE)


def parse_angle(value) -> float:
    """Radians as a plain number, or a pi multiple such as ``pi/3``, ``0.45pi``, ``3*pi/4``."""
    if isinstance(value, bool):
        raise ValueError("expected an angle")
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip()
    m = _PI_RE.match(text)
    if m:
        coef = float(m.group(1)) if m.group(1) else 1.0
        denom = float(m.group(2)) if m.group(2) else 1.0
        return coef * math.pi / denom
    return float(text)


def parse_float(value) -> float:
    if isinstance(value, bool):
        raise ValueError("expected a number")
    out = float(value)
    if math.isnan(out):
        raise ValueError("NaN is not allowed")
    return out


def parse_int(value) -> int:
    if isinstance(value, bool) or float(value) != int(float(value)):
        raise ValueError("expected an integer")
    return int(float(value))


def db_to_linear(db: float) -> float:
    return 0.0 if db == -math.inf else 10.0 ** (db / 10.0)


def _list_of(parser: Callable) -> Callable:
    def parse(value):
        if not isinstance(value, (list, tuple)):
            value = [value]
        if not value:
            raise ValueError("list must not be empty")
        return [parser(v) for v in value]
    return parse


def _choice(*options: str) -> Callable:
    def parse(value):
        if value not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return value
    return parse


_REQUIRED = object()

# key -> (parser, default)
CONFIG_KEYS: dict[str, tuple[Callable, Any]] = {
    "n_bs": (parse_int, _REQUIRED),
    "n_leg": (parse_int, _REQUIRED),
    "n_mal": (parse_int, None),
    "theta_l_rad": (parse_angle, _REQUIRED),
    "d_l_m": (parse_float, 100.0),
    "k_leg_db": (parse_float, _REQUIRED),
    "k_mal_db": (parse_float, None),
    "noise_leg_db": (parse_float, _REQUIRED),
    "noise_mal_db": (parse_float, None),
    "snr_leg_db": (parse_float, None),
    "p_leg_db": (parse_float, None),
    "carrier_hz": (parse_float, DSRC_CARRIER_HZ),
    "speed_mps": (parse_float, SPEED_OF_LIGHT),
    "ref_distance_m": (parse_float, 1.0),
    "pathloss_exp": (parse_float, 2.0),
    "spacing_bs_m": (parse_float, None),
    "spacing_leg_m": (parse_float, None),
    "spacing_mal_m": (parse_float, None),
    "psi_bs_rad": (parse_angle, math.pi / 2),
    "psi_leg_rad": (parse_angle, math.pi / 2),
    "psi_mal_rad": (parse_angle, math.pi / 2),
    "falsehood_radius_m": (parse_float, 10.0),
    "mean_scale": (_choice("derived", "literal"), "derived"),
    "pilots": (parse_int, 1),
    "theta_m_rad": (parse_angle, None),
    "d_m_m": (parse_float, None),
    "road_theta_rad": (_list_of(parse_angle), None),
    "road_d_m": (_list_of(parse_float), None),
    "snr_values_db": (_list_of(parse_float), None),
    "theta_offsets_rad": (_list_of(parse_angle), None),
    "sweep_values": (_list_of(parse_float), None),
    "n_points": (parse_int, 12),
    "ln_lambda": (parse_float, 0.0),
    "trials": (parse_int, None),
    "seed": (parse_int, 0),
    "method": (_choice(*METHODS), "both"),
    "workers": (parse_int, 1),
}


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    scenario: ScenarioParams
    attacker: PolarLocation | None = None
    road: adversary.RoadGeometry | None = None
    sweep: tuple[float, ...] = ()
    snr_values_db: tuple[float, ...] = ()
    theta_offsets: tuple[float, ...] = ()
    n_points: int = 12
    ln_lambda: float = 0.0
    trials: int = DEFAULT_SWEEP_TRIALS
    seed: int = 0
    method: str = "both"
    workers: int = 1
    config_hash: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.kind.startswith("sweep") and not self.sweep:
            raise ConfigError("sweep experiments need a non-empty sweep_values list", key="sweep_values")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1", key="trials")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}", key="method")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1", key="workers")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer", key="seed")


def _read_flat_yaml(text: str) -> tuple[dict, dict[str, int]]:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"malformed config: {exc}", line=mark.line + 1 if mark else None) from exc
    if node is None:
        return {}, {}
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError("config must be a flat key: value mapping", line=node.start_mark.line + 1)
    lines: dict[str, int] = {}
    for key_node, value_node in node.value:
        key = str(key_node.value)
        line = key_node.start_mark.line + 1
        if key in lines:
            raise ConfigError(f"duplicate key {key!r}", line=line, key=key)
        if isinstance(value_node, yaml.MappingNode):
            raise ConfigError(f"nested mappings are not allowed ({key!r})", line=line, key=key)
        lines[key] = line
    return {str(k): v for k, v in data.items()}, lines


def parse_config(text: str, kind: str, overrides: dict | None = None) -> ExperimentConfig:
    """Validate a flat YAML scenario and assemble an ``ExperimentConfig``.

    ``overrides`` (trials, seed, method, workers from the command line) win
    over values in the file.
    """
    raw, lines = _read_flat_yaml(text)
    values: dict[str, Any] = {}
    for key, value in raw.items():
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r}", line=lines.get(key), key=key)
        parser, _ = CONFIG_KEYS[key]
        try:
            values[key] = parser(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", line=lines.get(key), key=key) from exc
    for key, (_, default) in CONFIG_KEYS.items():
        if key not in values:
            if default is _REQUIRED:
                raise ConfigError(f"missing required field {key!r}", key=key)
            values[key] = default
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    def fail(msg, key):
        return ConfigError(msg, line=lines.get(key), key=key)

    if (values["snr_leg_db"] is None) == (values["p_leg_db"] is None):
        raise ConfigError("give exactly one of 'snr_leg_db' or 'p_leg_db'", key="snr_leg_db")

    f0, c = values["carrier_hz"], values["speed_mps"]
    half_wave = c / (2.0 * f0)
    try:
        path_loss = PathLossModel(f0, c, values["ref_distance_m"], values["pathloss_exp"])
        bs = UlaConfig(values["n_bs"], values["spacing_bs_m"] or half_wave, values["psi_bs_rad"])
        leg = UlaConfig(values["n_leg"], values["spacing_leg_m"] or half_wave, values["psi_leg_rad"])
        mal = UlaConfig(
            values["n_mal"] or values["n_leg"],
            values["spacing_mal_m"] or half_wave,
            values["psi_mal_rad"],
        )
        k_mal_db = values["k_mal_db"] if values["k_mal_db"] is not None else values["k_leg_db"]
        noise_mal_db = (
            values["noise_mal_db"] if values["noise_mal_db"] is not None else values["noise_leg_db"]
        )
        scenario = ScenarioParams(
            claimed=PolarLocation(values["d_l_m"], values["theta_l_rad"]),
            bs_array=bs,
            leg_array=leg,
            mal_array=mal,
            k_leg=db_to_linear(values["k_leg_db"]),
            k_mal=db_to_linear(k_mal_db),
            noise_leg=db_to_linear(values["noise_leg_db"]),
            noise_mal=db_to_linear(noise_mal_db),
            p_leg=db_to_linear(values["p_leg_db"]) if values["p_leg_db"] is not None else 1.0,
            path_loss=path_loss,
            falsehood_radius=values["falsehood_radius_m"],
            mean_scale=values["mean_scale"],
            pilots=values["pilots"],
        )
        if values["snr_leg_db"] is not None:
            scenario = scenario.with_snr(db_to_linear(values["snr_leg_db"]))
    except InvalidArgumentError as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc

    attacker = None
    if values["theta_m_rad"] is not None:
        d_m = values["d_m_m"] if values["d_m_m"] is not None else scenario.claimed.d
        try:
            attacker = PolarLocation(d_m, values["theta_m_rad"])
        except InvalidArgumentError as exc:
            raise fail(f"invalid attacker location: {exc}", "theta_m_rad") from exc
    road = None
    if values["road_theta_rad"] is not None:
        thetas = values["road_theta_rad"]
        dists = values["road_d_m"] or [scenario.claimed.d] * len(thetas)
        if len(dists) != len(thetas):
            raise fail("road_d_m and road_theta_rad must have equal length", "road_d_m")
        try:
            road = adversary.RoadGeometry(tuple(PolarLocation(d, t) for d, t in zip(dists, thetas)))
        except InvalidArgumentError as exc:
            raise fail(f"invalid road: {exc}", "road_theta_rad") from exc
    if kind != "roc" and attacker is None and road is None:
        raise ConfigError("missing required field 'theta_m_rad' (or a road_theta_rad list)", key="theta_m_rad")
    if kind == "roc" and attacker is None and values["theta_offsets_rad"] is None and road is None:
        raise ConfigError(
            "missing required field 'theta_offsets_rad' (or theta_m_rad / road)",
            key="theta_offsets_rad",
        )

    sweep = tuple(values["sweep_values"] or ())
    if kind == "sweep-nm":
        bad = [v for v in sweep if v != int(v) or v < 1]
        if bad:
            raise fail(f"antenna counts must be positive integers, got {bad}", "sweep_values")

    trials = values["trials"]
    if trials is None:
        trials = DEFAULT_TRIALS.get(kind, DEFAULT_SWEEP_TRIALS)
    snr_values = values["snr_values_db"]
    if snr_values is None:
        snr_values = [10.0 * math.log10(scenario.snr_leg)]
    return ExperimentConfig(
        kind=kind,
        scenario=scenario,
        attacker=attacker,
        road=road,
        sweep=sweep,
        snr_values_db=tuple(snr_values),
        theta_offsets=tuple(values["theta_offsets_rad"] or ()),
        n_points=values["n_points"],
        ln_lambda=values["ln_lambda"],
        trials=trials,
        seed=values["seed"],
        method=values["method"],
        workers=values["workers"],
        config_hash=hashlib.sha256(text.encode()).hexdigest(),
    )


def load_config(path: str | Path, kind: str, overrides: dict | None = None) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, kind, overrides)


# ---------------------------------------------------------------------------
# results


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def add(self, **row) -> None:
        self.rows.append(row)

    def column(self, name: str, **where) -> list:
        return [
            r[name] for r in self.rows if all(r.get(k) == v for k, v in where.items())
        ]

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=self.columns, lineterminator="\n")
            writer.writeheader()
            for row in self.rows:
                writer.writerow({k: _fmt(row.get(k)) for k in self.columns})


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            capture_output=True, text=True, timeout=5, cwd=Path(__file__).parent,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return out.stdout.strip() or "unknown"


def write_outputs(table: ResultTable, config: ExperimentConfig, out: str | Path, runtime: float) -> Path:
    """CSV at ``out`` plus a ``<out>.meta.json`` sidecar; returns the sidecar path."""
    out = Path(out)
    table.write_csv(out)
    meta = {
        "kind": config.kind,
        "seed": config.seed,
        "trials": config.trials,
        "method": config.method,
        "config_sha256": config.config_hash,
        "git_describe": git_describe(),
        "runtime_s": runtime,
        "summary": table.summary,
        "warnings": table.warnings,
    }
    sidecar = out.with_name(out.name + ".meta.json")
    sidecar.write_text(json.dumps(meta, indent=2, default=_json_default) + "\n")
    return sidecar


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


# ---------------------------------------------------------------------------
# scenario evaluation


@dataclass(frozen=True, eq=False)
class PointResult:
    attack: adversary.AttackStrategy
    null: GaussianObservationModel
    alt: GaussianObservationModel
    q: float | None
    closed_form: metrics.DetectionMetrics | None
    closed_form_mte: float | None
    monte_carlo: metrics.DetectionMetrics | None


def resolve_attack(
    params: ScenarioParams,
    attacker: PolarLocation | None,
    road: adversary.RoadGeometry | None,
    warnings: list[str] | None = None,
) -> adversary.AttackStrategy:
    """Explicit attacker coordinates bypass the road search; otherwise search the road."""
    if attacker is not None:
        dist = euclidean_distance(attacker, params.claimed)
        if dist < params.falsehood_radius and warnings is not None:
            msg = (
                f"explicit attacker location is {dist:.3g} m from the claim, "
                f"inside the {params.falsehood_radius} m falsehood radius"
            )
            log.warning(msg)
            warnings.append(msg)
        return adversary.attack_at(params, attacker)
    if road is None:
        raise ConfigError("no attacker location or road geometry given")
    return adversary.build_attack(params, road)


def evaluate_point(
    params: ScenarioParams,
    attack: adversary.AttackStrategy,
    method: str,
    trials: int,
    seed,
    ln_lambda: float = 0.0,
) -> PointResult:
    null = null_model(params)
    alt = alt_model(params, attack.location, attack.tx_power, attack.beamformer)
    q = metrics.deflection(null, alt) if metrics.equal_covariance(null, alt) else None
    cf = cf_mte = None
    if method in ("closed-form", "both") and q is not None:
        if metrics.is_uninformative(q):
            # Lambda == 1 everywhere; strict exceedance never fires
            cf = metrics.DetectionMetrics(0.0, 0.0, ln_lambda)
            cf_mte = 1.0
        else:
            cf = metrics.closed_form_rates(q, ln_lambda)
            cf_mte = metrics.min_total_error(q)
    mc = None
    if method in ("monte-carlo", "both"):
        mc = metrics.monte_carlo_rates(null, alt, ln_lambda, trials, seed)
    return PointResult(attack, null, alt, q, cf, cf_mte, mc)


def _sweep_params(config: ExperimentConfig, value: float) -> ScenarioParams:
    base = config.scenario
    if config.kind == "sweep-nm":
        return base.replace(mal_array=UlaConfig(int(value), base.mal_array.spacing, base.mal_array.orientation))
    if config.kind == "sweep-km":
        return base.replace(k_mal=db_to_linear(value))
    if config.kind == "sweep-snr":
        return base.with_snr(db_to_linear(value))
    raise ValueError(config.kind)


def _sweep_job(args) -> tuple[PointResult, list[str]]:
    config, index, value = args
    warnings: list[str] = []
    params = _sweep_params(config, value)
    attack = resolve_attack(params, config.attacker, config.road, warnings)
    seed = metrics.substream(np.random.SeedSequence(config.seed), index)
    return evaluate_point(params, attack, config.method, config.trials, seed), warnings


def _run_sweep(config: ExperimentConfig) -> ResultTable:
    table = ResultTable(list(SWEEP_COLUMNS))
    jobs = [(config, i, v) for i, v in enumerate(config.sweep)]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_sweep_job, jobs))
    else:
        results = [_sweep_job(job) for job in jobs]

    uninformative = []
    for (_, _, value), (res, warnings) in zip(jobs, results):
        for w in warnings:
            if w not in table.warnings:
                table.warnings.append(w)
        if res.closed_form is not None:
            table.add(
                sweep_value=value, alpha=res.closed_form.alpha, alpha_stderr=0.0,
                beta=res.closed_form.beta, beta_stderr=0.0,
                min_total_error=res.closed_form_mte, mte_stderr=0.0, method="closed-form",
            )
            if metrics.is_uninformative(res.q):
                uninformative.append(value)
        if res.monte_carlo is not None:
            mc = res.monte_carlo
            table.add(
                sweep_value=value, alpha=mc.alpha, alpha_stderr=mc.alpha_stderr,
                beta=mc.beta, beta_stderr=mc.beta_stderr,
                min_total_error=mc.total_error, mte_stderr=mc.total_error_stderr,
                method="monte-carlo",
            )
    if config.method == "closed-form" and not any(r.closed_form for r, _ in results):
        raise InvalidArgumentError(
            "closed-form rates need equal covariances at some sweep point; use monte-carlo"
        )

    summary: dict[str, Any] = {"sweep": config.kind, "argmax": {}}
    for method in ("closed-form", "monte-carlo"):
        errs = table.column("min_total_error", method=method)
        if errs:
            vals = table.column("sweep_value", method=method)
            summary["argmax"][method] = vals[int(np.argmax(errs))]
    summary["beam_direction"] = [r.attack.beam_direction for r, _ in results]
    summary["attacker_power"] = [r.attack.tx_power for r, _ in results]
    if uninformative:
        summary["uninformative_points"] = uninformative
    table.summary = summary
    return table


def run_sweep_nm(config: ExperimentConfig) -> ResultTable:
    """Minimum total error against the attacker's antenna count."""
    return _run_sweep(_as_kind(config, "sweep-nm"))


def run_sweep_km(config: ExperimentConfig) -> ResultTable:
    """Minimum total error against the malicious channel's K-factor (values in dB)."""
    return _run_sweep(_as_kind(config, "sweep-km"))


def run_sweep_snr(config: ExperimentConfig) -> ResultTable:
    """Minimum total error against the legitimate average SNR (values in dB)."""
    return _run_sweep(_as_kind(config, "sweep-snr"))


def _as_kind(config: ExperimentConfig, kind: str) -> ExperimentConfig:
    if config.kind == kind:
        return config
    return dataclasses.replace(config, kind=kind)


def run_single(config: ExperimentConfig) -> ResultTable:
    """One scenario with full diagnostics in ``summary``."""
    table = ResultTable(list(SINGLE_COLUMNS))
    params = config.scenario
    attack = resolve_attack(params, config.attacker, config.road, table.warnings)
    res = evaluate_point(
        params, attack, config.method, config.trials,
        metrics.substream(np.random.SeedSequence(config.seed), 0), config.ln_lambda,
    )
    q = res.q
    if q is not None and metrics.is_uninformative(q):
        q = 0.0
    kl = adversary.kl_divergence(res.alt, res.null)
    if res.closed_form is not None:
        cf = res.closed_form
        table.add(
            alpha=cf.alpha, alpha_stderr=0.0, beta=cf.beta, beta_stderr=0.0,
            min_total_error=res.closed_form_mte, mte_stderr=0.0, method="closed-form",
            ln_lambda=config.ln_lambda, q=q, kl_divergence=kl,
        )
    if res.monte_carlo is not None:
        mc = res.monte_carlo
        table.add(
            alpha=mc.alpha, alpha_stderr=mc.alpha_stderr, beta=mc.beta, beta_stderr=mc.beta_stderr,
            min_total_error=mc.total_error, mte_stderr=mc.total_error_stderr, method="monte-carlo",
            ln_lambda=config.ln_lambda, q=q, kl_divergence=kl,
        )
    table.summary = {
        "attacker_d_m": attack.location.d,
        "attacker_theta_rad": attack.location.theta,
        "attacker_power": attack.tx_power,
        "beam_direction_rad": attack.beam_direction,
        "deflection_q": q,
        "kl_divergence": kl,
        "min_total_error_closed_form": res.closed_form_mte,
        "uninformative": q is not None and q == 0.0,
        "cov_null": res.null.cov_scale,
        "cov_alt": res.alt.cov_scale,
    }
    return table


def _roc_targets(config: ExperimentConfig) -> list[tuple[float, float | None, PolarLocation | None]]:
    """(snr_db, offset, explicit location) for every curve to draw."""
    claimed = config.scenario.claimed
    targets = []
    for snr_db in config.snr_values_db:
        if config.theta_offsets:
            for off in config.theta_offsets:
                theta = claimed.theta - off if claimed.theta - off >= 0 else claimed.theta + off
                targets.append((snr_db, off, PolarLocation(claimed.d, theta)))
        else:
            targets.append((snr_db, None, config.attacker))
    return targets


def run_roc(config: ExperimentConfig) -> ResultTable:
    """Closed-form and/or Monte Carlo ROC points for each (SNR, attacker bearing) pair.

    Explicit offsets place the attacker at the claimed range, ``offset``
    radians closer to broadside-zero than the claimed bearing.
    """
    table = ResultTable(list(ROC_COLUMNS))
    root = np.random.SeedSequence(config.seed)
    curves = []
    for index, (snr_db, off, location) in enumerate(_roc_targets(config)):
        params = config.scenario.with_snr(db_to_linear(snr_db))
        attack = resolve_attack(params, location, config.road, table.warnings)
        null = null_model(params)
        alt = alt_model(params, attack.location, attack.tx_power, attack.beamformer)
        equal = metrics.equal_covariance(null, alt)
        q = metrics.deflection(null, alt) if equal else None
        uninformative = q is not None and metrics.is_uninformative(q)
        offset = off if off is not None else abs(attack.location.theta - params.claimed.theta)
        seed = metrics.substream(root, index)
        thresholds = None
        if equal and not uninformative:
            thresholds = metrics.roc_thresholds(q, config.n_points)
        methods = []
        if config.method in ("closed-form", "both"):
            if equal:
                methods.append("closed-form")
            elif config.method == "closed-form":
                raise InvalidArgumentError(
                    "closed-form ROC needs equal covariances (K_M = K_L, sigma_M = sigma_L)"
                )
        if config.method in ("monte-carlo", "both"):
            methods.append("monte-carlo")
        summary = {"snr_leg_db": snr_db, "theta_offset_rad": offset, "q": q,
                   "uninformative": uninformative}
        by_method = {}
        for method in methods:
            curve = metrics.roc_curve(
                null, alt, config.n_points, method, config.trials, seed, 1, thresholds
            )
            by_method[method] = curve
            note = "uninformative" if curve.uninformative else ""
            for i in range(len(curve.thresholds)):
                table.add(
                    snr_leg_db=snr_db, theta_offset_rad=offset,
                    theta_m_rad=attack.location.theta,
                    q=0.0 if uninformative else q,
                    ln_lambda=float(curve.thresholds[i]),
                    alpha=float(curve.alpha[i]), alpha_stderr=float(curve.alpha_stderr[i]),
                    beta=float(curve.beta[i]), beta_stderr=float(curve.beta_stderr[i]),
                    method=method, note=note,
                )
            summary[f"auc_{method}"] = curve.area()
        if {"closed-form", "monte-carlo"} <= by_method.keys() and not uninformative:
            cf, mc = by_method["closed-form"], by_method["monte-carlo"]
            # binomial spread of the closed-form rate, so z stays finite at 0 or 1
            se = np.sqrt(np.maximum(cf.beta * (1.0 - cf.beta), 1e-300) / config.trials)
            summary["max_beta_z"] = float(np.max(np.abs(mc.beta - cf.beta) / se))
        curves.append(summary)
    table.summary = {"curves": curves}
    return table


RUNNERS = {
    "roc": run_roc,
    "sweep-nm": run_sweep_nm,
    "sweep-km": run_sweep_km,
    "sweep-snr": run_sweep_snr,
    "single": run_single,
}


def run_experiment(config: ExperimentConfig, out: str | Path | None = None) -> ResultTable:
    start = time.perf_counter()
    table = RUNNERS[config.kind](config)
    for row in table.rows:
        for key in ("alpha", "beta"):
            value = row.get(key)
            if value is not None and not 0.0 <= value <= 1.0:
                raise NumericalError(f"{key} = {value} outside [0, 1]")
        for key in ("alpha_stderr", "beta_stderr", "mte_stderr", "min_total_error"):
            value = row.get(key)
            if value is not None and not (math.isfinite(value) and value >= 0.0):
                raise NumericalError(f"{key} = {value} is not a finite non-negative number")
    if out is not None:
        write_outputs(table, config, out, time.perf_counter() - start)
    return table
