"""Run configuration: every interaction hyperparameter in one place,
loadable from a JSON file and overridable per CLI flag."""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path

from .closeness import ClosenessParams
from .engine import EngineConfig
from .errors import ParameterError, ParseError

_JSON_KEYS = {
    "dataset": "dataset",
    "projection": "projection",
    "k": "k",
    "thetaIn": "theta_in",
    "thetaOut": "theta_out",
    "marginFraction": "margin_fraction",
    "alphaFraction": "alpha_fraction",
    "gridResolution": "grid_resolution",
    "bandwidthFactor": "bandwidth_factor",
    "pauseThresholdMs": "pause_threshold_ms",
    "seed": "seed",
    "outputDir": "output_dir",
}


@dataclass
class RunConfig:
    dataset: str | None = None
    projection: str | None = None
    k: int = 15
    theta_in: float = 0.35
    theta_out: float = 0.5
    margin_fraction: float = 0.2
    alpha_fraction: float = 0.15
    grid_resolution: int = 64
    bandwidth_factor: float = 0.25
    pause_threshold_ms: int = 500
    seed: int = 0
    output_dir: str = "runs"

    def validate(self) -> None:
        if self.k < 1:
            raise ParameterError(f"k must be >= 1, got {self.k}")
        if not 0.0 <= self.theta_in < 1.0:
            raise ParameterError(f"thetaIn must be in [0, 1), got {self.theta_in}")
        if not 0.0 <= self.theta_out <= 1.0:
            raise ParameterError(f"thetaOut must be in [0, 1], got {self.theta_out}")
        if not 0.0 < self.alpha_fraction < 1.0:
            raise ParameterError(f"alphaFraction must be in (0, 1), got {self.alpha_fraction}")
        if not self.margin_fraction > 0:
            raise ParameterError(f"marginFraction must be > 0, got {self.margin_fraction}")
        if self.grid_resolution < 8:
            raise ParameterError(f"gridResolution must be >= 8, got {self.grid_resolution}")
        if not self.bandwidth_factor > 0:
            raise ParameterError(f"bandwidthFactor must be > 0, got {self.bandwidth_factor}")
        if self.pause_threshold_ms < 0:
            raise ParameterError("pauseThresholdMs must be >= 0")

    def closeness_params(self) -> ClosenessParams:
        return ClosenessParams(theta_in=self.theta_in, theta_out=self.theta_out)

    def engine_config(self) -> EngineConfig:
        return EngineConfig(
            margin_fraction=self.margin_fraction,
            alpha_fraction=self.alpha_fraction,
            grid_resolution=self.grid_resolution,
            bandwidth_factor=self.bandwidth_factor,
            pause_threshold_ms=self.pause_threshold_ms,
        )

    def to_json_dict(self) -> dict:
        snake = asdict(self)
        return {json_key: snake[attr] for json_key, attr in _JSON_KEYS.items()}


def load_config(path: str | Path) -> RunConfig:
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid config JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ParseError(f"{path}: config must be a JSON object")
    kwargs = {}
    for key, value in payload.items():
        attr = _JSON_KEYS.get(key)
        if attr is None:
            raise ParameterError(f"{path}: unknown config key {key!r}")
        kwargs[attr] = value
    config = RunConfig(**kwargs)
    config.validate()
    return config
