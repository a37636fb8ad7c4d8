"""Experiment configuration: JSON schema, defaults and the effective-config echo."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .noise import NoiseModel, format_time, parse_time

SUITES = ("trace-sweep", "visibility", "knots", "oracle")
PREPS = ("direct", "bell", "flip")

_NUM = {"type": "number"}
_PURITY = {"type": "number", "exclusiveMinimum": 0, "maximum": 1}

NOISE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "depol_1q": _PURITY,
        "depol_2q": _PURITY,
        "coherent_eps": _NUM,
        "coherent_kind": {"enum": ["zz", "control_rz", "target_rx"]},
        "drift": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "sigma_per_day": {"type": "number", "minimum": 0},
                "epoch": {"type": "string"},
                "seed": {"type": "integer", "minimum": 0},
            },
        },
        "readout_flip": {"type": "number", "minimum": 0, "exclusiveMaximum": 0.5},
        "pair_profile": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "additionalProperties": False,
                "properties": {"depol_2q": _PURITY, "coherent_eps": _NUM},
            },
        },
        "local_depolarizing": {"type": "boolean"},
    },
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "dqc1bench experiment configuration",
    "type": "object",
    "additionalProperties": False,
    "required": ["suite"],
    "properties": {
        "suite": {"enum": list(SUITES)},
        "seed": {"type": "integer", "minimum": 0},
        "shots": {"type": "integer", "minimum": 0, "description": "0 = exact (infinite-shot) expectations"},
        "trials": {"type": "integer", "minimum": 1},
        "grid": {"type": "integer", "minimum": 2},
        "now": {"type": ["string", "null"]},
        "out": {"type": ["string", "null"]},
        "noise": NOISE_SCHEMA,
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_mixed": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
                "l": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
                "prep": {"enum": list(PREPS)},
                "restrict_widths": {"type": "boolean"},
            },
        },
        "knots": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "words": {"type": ["array", "null"], "items": {"type": "string"}},
                "k_max": {"type": "integer", "minimum": 0},
                "generators": {"type": "array", "items": {"enum": ["S12", "S23", "S12inv", "S23inv"]}},
                "qubit_pairs": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "prep": {"enum": list(PREPS)},
                "phase_exponent": {"type": "integer"},
            },
        },
    },
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    n_mixed: tuple[int, ...] = (1, 3)
    l: tuple[int, ...] = (0, 1, 2, 3, 4, 5)
    prep: str = "direct"
    restrict_widths: bool = True


@dataclass(frozen=True)
class KnotSpec:
    words: tuple[str, ...] | None = None
    k_max: int = 9
    generators: tuple[str, ...] = ("S12", "S23")
    qubit_pairs: tuple[str, ...] = ("Q1-Q0",)
    prep: str = "flip"
    phase_exponent: int = 2


@dataclass(frozen=True)
class ExperimentConfig:
    suite: str
    seed: int = 0
    shots: int = 4096
    trials: int = 12
    grid: int = 25
    now: str | None = None
    out: str | None = None
    noise: NoiseModel = field(default_factory=NoiseModel)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    knots: KnotSpec = field(default_factory=KnotSpec)

    @property
    def timestamp(self):
        """Injected run time; without one, the drift epoch (zero elapsed days)."""
        return self.noise.drift.epoch if self.now is None else parse_time(self.now)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "shots": self.shots,
            "trials": self.trials,
            "grid": self.grid,
            "now": format_time(self.timestamp),
            "out": self.out,
            "noise": self.noise.to_dict(),
            "sweep": {
                "n_mixed": list(self.sweep.n_mixed),
                "l": list(self.sweep.l),
                "prep": self.sweep.prep,
                "restrict_widths": self.sweep.restrict_widths,
            },
            "knots": {
                "words": None if self.knots.words is None else list(self.knots.words),
                "k_max": self.knots.k_max,
                "generators": list(self.knots.generators),
                "qubit_pairs": list(self.knots.qubit_pairs),
                "prep": self.knots.prep,
                "phase_exponent": self.knots.phase_exponent,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def _error_message(err: jsonschema.ValidationError) -> str:
    where = "/".join(str(p) for p in err.absolute_path) or "<root>"
    return f"invalid config at '{where}': {err.message}"


def validate(raw: dict) -> None:
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        raise ConfigError(_error_message(errors[0]))


def from_dict(raw: dict) -> ExperimentConfig:
    """Validate ``raw`` against the schema and fill in defaults."""
    validate(raw)
    raw = dict(raw)
    try:
        noise = NoiseModel.from_dict(raw.pop("noise", {}))
        sweep = raw.pop("sweep", {})
        knots = raw.pop("knots", {})
        sweep = SweepSpec(**{k: tuple(v) if isinstance(v, list) else v for k, v in sweep.items()})
        knots = KnotSpec(**{k: tuple(v) if isinstance(v, list) else v for k, v in knots.items()})
        cfg = ExperimentConfig(noise=noise, sweep=sweep, knots=knots, **raw)
        parse_time(cfg.now)
        parse_time(cfg.noise.drift.epoch)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    if cfg.timestamp < cfg.noise.drift.epoch:
        raise ConfigError("invalid config at 'now': timestamp is before noise.drift.epoch")
    # the effective config carries the resolved timestamp so its echo round-trips
    return cfg.replace(now=format_time(cfg.timestamp))


def load(path) -> ExperimentConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return from_dict(raw)


def default_config(suite: str) -> ExperimentConfig:
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}")
    return from_dict({"suite": suite})


def schema_json() -> str:
    return json.dumps(CONFIG_SCHEMA, indent=2) + "\n"
