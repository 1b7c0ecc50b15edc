"""Pipeline configuration and the flat ``section.key = value`` config file."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigurationError
from .pso import SwarmConfig
from .regressors.lstm import BilstmConfig
from .vmd import VmdConfig

MODEL_CHOICES = ("bilstm", "gbt")


@dataclass(frozen=True)
class PipelineConfig:
    data: str = "embedded"  # "embedded", "synthetic:<rows>" or a CSV path
    vmd: VmdConfig = field(default_factory=VmdConfig)
    pso: SwarmConfig = field(default_factory=SwarmConfig)
    bilstm: BilstmConfig = field(default_factory=BilstmConfig)
    model: str = "bilstm"
    split_fraction: float = 0.8
    tuning_epochs: int = 100
    final_epochs: int = 500
    gbt_rounds: int = 100
    baselines_on_expanded: bool = False
    seed: int = 0
    output_dir: str = "results"

    def __post_init__(self):
        if self.model not in MODEL_CHOICES:
            raise ConfigurationError(f"model must be one of {MODEL_CHOICES}, got {self.model!r}")
        if not 0 < self.split_fraction < 1:
            raise ConfigurationError("split_fraction must lie in (0, 1)")
        if not 1 <= self.tuning_epochs <= self.final_epochs:
            raise ConfigurationError("need 1 <= tuning_epochs <= final_epochs")
        if self.gbt_rounds < 0:
            raise ConfigurationError("gbt_rounds must be >= 0")

    @property
    def model_label(self):
        return "VMD-PSO-BiLSTM" if self.model == "bilstm" else "VMD-PSO-GBT"

    def fast(self):
        """Reduced swarm and epochs for quick runs; outputs keep the same schema."""
        return replace(
            self,
            pso=replace(self.pso, population=4, iterations=3),
            tuning_epochs=30,
            final_epochs=100,
        )

    def to_dict(self):
        return dataclasses.asdict(self)

    def digest(self):
        payload = json.dumps(self.to_dict(), sort_keys=True, default=str)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


_SECTIONS = {"vmd": VmdConfig, "pso": SwarmConfig, "bilstm": BilstmConfig}


def _coerce(raw, current, key):
    if isinstance(current, bool):
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigurationError(f"{key}: expected a boolean, got {raw!r}")
    try:
        if isinstance(current, int):
            return int(raw)
        if isinstance(current, float):
            return float(raw)
    except ValueError:
        raise ConfigurationError(f"{key}: cannot parse {raw!r}") from None
    return raw


def parse_config_text(text):
    """Parse ``section.key = value`` lines; ``#`` starts a comment."""
    entries = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or "." not in key:
            raise ConfigurationError(f"line {lineno}: expected 'section.key = value'")
        entries[key.strip()] = value.strip()
    return entries


def apply_overrides(cfg, entries):
    nested = {name: {} for name in _SECTIONS}
    top = {}
    top_fields = {f.name for f in fields(PipelineConfig)} - set(_SECTIONS)
    for key, raw in entries.items():
        section, _, name = key.partition(".")
        if section in _SECTIONS:
            sub = getattr(cfg, section)
            if name not in {f.name for f in fields(sub)}:
                raise ConfigurationError(f"unknown config key {key!r}")
            nested[section][name] = _coerce(raw, getattr(sub, name), key)
        elif section == "pipeline" and name in top_fields:
            top[name] = _coerce(raw, getattr(cfg, name), key)
        else:
            raise ConfigurationError(f"unknown config key {key!r}")
    try:
        for section, values in nested.items():
            if values:
                top[section] = replace(getattr(cfg, section), **values)
        return replace(cfg, **top)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc


def load_config(path, base=None):
    text = Path(path).read_text(encoding="utf-8")
    return apply_overrides(base or PipelineConfig(), parse_config_text(text))


def dump_config(cfg):
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if f.name in _SECTIONS:
            lines.extend(f"{f.name}.{sf.name} = {getattr(value, sf.name)}" for sf in fields(value))
        else:
            lines.append(f"pipeline.{f.name} = {value}")
    return "\n".join(lines) + "\n"
