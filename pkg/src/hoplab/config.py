"""Experiment configuration: JSON schema validation and resolved objects.

Configs are flat JSON with one section per concern.  Validation is strict:
unknown keys are rejected and missing required keys are reported by name, so
a typo never silently changes an experiment.
"""

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .laws import EntryLaw, InitialLaw, SeedSpec
from .network import ModelParams, TimeGrid

_SECTION_KEYS = {
    "model": {"n", "leak", "noise"},
    "entry_law": {"kind", "sigma", "ratio"},
    "initial_law": {"kind", "value", "low", "high"},
    "grid": {"times", "substeps"},
    "tolerances": {"action_tol", "series_tol", "quad_tol", "fluct_var_tol"},
    "compare": {"pairs", "coord"},
    "moments": {"cases", "sizes", "y_law", "direct_budget"},
    "lemma": {"pairs", "n_letters"},
    "chaos": {"coord_pairs", "time"},
    "longtime": {"window"},
}

_TOP_KEYS = {"seed", "replicas", "coords", "threads"} | set(_SECTION_KEYS)

DEFAULT_TOLERANCES = {
    "action_tol": 1e-10,
    "series_tol": 1e-12,
    "quad_tol": 1e-10,
    "fluct_var_tol": 1e-12,
}

# Required top-level keys per CLI command.
REQUIRED_KEYS = {
    "simulate": ("seed", "model", "entry_law", "initial_law", "grid", "replicas", "coords"),
    "limit-sample": ("seed", "model", "entry_law", "initial_law", "grid", "replicas", "coords"),
    "compare-cov": (
        "seed",
        "model",
        "entry_law",
        "initial_law",
        "grid",
        "replicas",
        "coords",
        "compare",
    ),
    "moments-verify": ("entry_law", "moments"),
    "lemma-scan": ("entry_law", "lemma"),
    "chaos": ("seed", "model", "entry_law", "initial_law", "grid", "replicas", "coords", "chaos"),
    "longtime": (
        "seed",
        "model",
        "entry_law",
        "initial_law",
        "grid",
        "replicas",
        "coords",
        "longtime",
    ),
}


def _check_keys(section: str, data: dict, allowed: set) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"section {section!r} must be an object")
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown key {sorted(unknown)[0]!r} in section {section!r}")


def _require(data: dict, section: str, key: str):
    if key not in data:
        raise ConfigError(f"missing required key {key!r} in section {section!r}")
    return data[key]


@dataclass
class ExperimentConfig:
    """A validated configuration plus the raw dict it came from."""

    raw: dict
    command: str

    @property
    def seed(self) -> int:
        return int(self.raw["seed"])

    @property
    def seed_spec(self) -> SeedSpec:
        return SeedSpec(root=self.seed)

    @property
    def replicas(self) -> int:
        return int(self.raw["replicas"])

    @property
    def coords(self) -> tuple:
        return tuple(int(c) for c in self.raw["coords"])

    @property
    def threads(self) -> int:
        return int(self.raw.get("threads", 1))

    @property
    def tolerances(self) -> dict:
        merged = dict(DEFAULT_TOLERANCES)
        merged.update(self.raw.get("tolerances", {}))
        return merged

    def entry_law(self) -> EntryLaw:
        data = self.raw["entry_law"]
        kwargs = {"kind": _require(data, "entry_law", "kind"), "sigma": _require(data, "entry_law", "sigma")}
        if "ratio" in data:
            kwargs["ratio"] = data["ratio"]
        return EntryLaw(**kwargs)

    def initial_law(self, data: dict | None = None) -> InitialLaw:
        data = self.raw["initial_law"] if data is None else data
        kind = _require(data, "initial_law", "kind")
        kwargs = {"kind": kind}
        for key in ("value", "low", "high"):
            if key in data:
                kwargs[key] = data[key]
        return InitialLaw(**kwargs)

    def grid(self) -> TimeGrid:
        data = self.raw["grid"]
        return TimeGrid(
            times=tuple(_require(data, "grid", "times")),
            substeps=int(data.get("substeps", 1)),
        )

    def model_params(self) -> ModelParams:
        model = self.raw["model"]
        return ModelParams(
            n=int(_require(model, "model", "n")),
            leak=float(_require(model, "model", "leak")),
            noise=float(model.get("noise", 0.0)),
            entry_law=self.entry_law(),
            initial_law=self.initial_law(),
            grid=self.grid(),
        )

    def section(self, name: str) -> dict:
        return self.raw[name]


def validate_config(raw: dict, command: str) -> ExperimentConfig:
    """Strictly validate a raw config dict for one command."""
    if command not in REQUIRED_KEYS:
        raise ConfigError(f"unknown command {command!r}")
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown key {sorted(unknown)[0]!r} at the top level")
    for key in REQUIRED_KEYS[command]:
        if key not in raw:
            raise ConfigError(f"missing required key {key!r} for command {command!r}")
    for name, allowed in _SECTION_KEYS.items():
        if name in raw:
            _check_keys(name, raw[name], allowed)
    if "moments" in raw and "y_law" in raw["moments"]:
        _check_keys("moments.y_law", raw["moments"]["y_law"], _SECTION_KEYS["initial_law"])
    cfg = ExperimentConfig(raw=raw, command=command)
    # Materialize the validated objects now so errors surface as exit code 2.
    if "entry_law" in raw:
        cfg.entry_law()
    if "initial_law" in raw:
        cfg.initial_law()
    if "grid" in raw:
        cfg.grid()
    if "model" in raw:
        cfg.model_params()
    return cfg


def load_config(path, command: str, seed_override: int | None = None) -> ExperimentConfig:
    """Read a config (or a manifest wrapping one) from disk and validate it."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if isinstance(raw, dict) and "config" in raw and "command" in raw:
        raw = raw["config"]  # a manifest re-run
    if seed_override is not None:
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")
        raw = dict(raw)
        raw["seed"] = int(seed_override)
    return validate_config(raw, command)
