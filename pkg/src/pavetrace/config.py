"""Run configuration: one small TOML file covers every tunable.

Everything has a default matching the survey protocol the pipeline was
built around (500 ms sampling, 20 to 50 kph, the published IRI line and
distress weights), so an empty config is valid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

try:  # 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .distress import WeightTable, weights_from_config
from .model import GRAVITY_MPS2
from .roughness import IriModel


@dataclass(frozen=True)
class Config:
    gravity_mps2: float = GRAVITY_MPS2
    cadence_ms: int = 500
    speed_gate_kph: tuple[float, float] = (20.0, 50.0)
    boxplot_k: float = 1.5
    alpha: float = 0.05
    offroute_warn_m: float = 30.0
    iri_model: IriModel = field(default_factory=IriModel)
    weights: WeightTable = field(default_factory=WeightTable)

    def __post_init__(self):
        if self.gravity_mps2 <= 0:
            raise ValueError("gravity_mps2 must be positive")
        if self.cadence_ms <= 0:
            raise ValueError("cadence_ms must be positive")
        lo, hi = self.speed_gate_kph
        if not 0 <= lo < hi:
            raise ValueError(f"speed gate must satisfy 0 <= lo < hi, got {self.speed_gate_kph}")
        if self.boxplot_k <= 0:
            raise ValueError("boxplot_k must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        if self.offroute_warn_m <= 0:
            raise ValueError("offroute_warn_m must be positive")


def config_from_dict(raw: Mapping[str, Any]) -> Config:
    known = {
        "gravity_mps2",
        "cadence_ms",
        "speed_gate_kph",
        "boxplot_k",
        "alpha",
        "offroute_warn_m",
        "iri_model",
        "distress_weights",
    }
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown config key(s): {sorted(unknown)}")

    kwargs: dict[str, Any] = {}
    for key in ("gravity_mps2", "boxplot_k", "alpha", "offroute_warn_m"):
        if key in raw:
            kwargs[key] = float(raw[key])
    if "cadence_ms" in raw:
        kwargs["cadence_ms"] = int(raw["cadence_ms"])
    if "speed_gate_kph" in raw:
        gate = raw["speed_gate_kph"]
        if not isinstance(gate, (list, tuple)) or len(gate) != 2:
            raise ValueError(f"speed_gate_kph must be a [lo, hi] pair, got {gate!r}")
        kwargs["speed_gate_kph"] = (float(gate[0]), float(gate[1]))
    if "iri_model" in raw:
        section = raw["iri_model"]
        extra = set(section) - {"slope", "intercept"}
        if extra:
            raise ValueError(f"unknown iri_model key(s): {sorted(extra)}")
        kwargs["iri_model"] = IriModel(
            slope=float(section.get("slope", IriModel().slope)),
            intercept=float(section.get("intercept", IriModel().intercept)),
        )
    if "distress_weights" in raw:
        kwargs["weights"] = weights_from_config(raw["distress_weights"])
    return Config(**kwargs)


def load_config(path: str) -> Config:
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    return config_from_dict(raw)
