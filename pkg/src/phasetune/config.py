"""Experiment configuration file: a single versioned JSON document.

Every block is optional and falls back to documented defaults; unknown keys
are rejected. See README for the schema.
"""

import json
import os
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigurationError
from .models import EnergyParams, TimingParams
from .optimizer import TuningParams
from .phase import DEFAULT_THETA
from .runtime import DEFAULT_INTERVAL_INSTRUCTIONS, OverheadParams
from .space import DesignSpace, DesignSpaceSpec, preset
from .thermal import ThermalParams
from .trace import SegmentSpec, segments_from_dicts

SCHEMA_VERSION = 1


@dataclass
class TraceSource:
    file: Optional[str] = None
    synthetic: Optional[list[SegmentSpec]] = None
    seed: int = 7


@dataclass
class ExperimentConfig:
    raw: dict
    space_spec: DesignSpaceSpec
    timing: TimingParams
    energy: EnergyParams
    thermal: ThermalParams
    tuning: TuningParams
    overhead: OverheadParams
    theta: float
    interval_instructions: int
    trace: TraceSource
    output_dir: str

    _space: Optional[DesignSpace] = field(default=None, repr=False)

    @property
    def space(self) -> DesignSpace:
        if self._space is None:
            self._space = DesignSpace(self.space_spec)
        return self._space


def _build(cls, block: dict, name: str):
    try:
        return cls(**block)
    except TypeError as exc:
        raise ConfigurationError(f"config block '{name}': {exc}") from None


def _space_from_block(block: dict) -> DesignSpaceSpec:
    if "preset" in block:
        extra = set(block) - {"preset"}
        if extra:
            raise ConfigurationError(f"space preset cannot be combined with {sorted(extra)}")
        return preset(block["preset"])
    known = {"sizes", "lines", "assocs", "freqs", "predicate", "base"}
    extra = set(block) - known
    if extra:
        raise ConfigurationError(f"unknown space keys {sorted(extra)}")
    kwargs = {k: tuple(v) if isinstance(v, list) else v
              for k, v in block.items() if k != "base"}
    spec = DesignSpaceSpec(**kwargs)
    if "base" in block:
        from .phase import config_from_dict
        spec.base = config_from_dict(block["base"])
    return spec


def _trace_from_block(block: dict) -> TraceSource:
    known = {"file", "synthetic", "seed"}
    extra = set(block) - known
    if extra:
        raise ConfigurationError(f"unknown trace keys {sorted(extra)}")
    if "file" in block and "synthetic" in block:
        raise ConfigurationError("trace block must give either 'file' or 'synthetic', not both")
    src = TraceSource(file=block.get("file"), seed=block.get("seed", 7))
    if "synthetic" in block:
        src.synthetic = segments_from_dicts(block["synthetic"])
    return src


_BLOCKS = ("schema_version", "space", "timing", "energy", "thermal", "tuning",
           "overhead", "phase", "trace", "output_dir")


def parse_config(doc: dict) -> ExperimentConfig:
    extra = set(doc) - set(_BLOCKS)
    if extra:
        raise ConfigurationError(f"unknown config keys {sorted(extra)}")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigurationError(f"unsupported schema_version {version}")

    phase_block = dict(doc.get("phase", {}))
    extra = set(phase_block) - {"theta", "interval_instructions"}
    if extra:
        raise ConfigurationError(f"unknown phase keys {sorted(extra)}")

    return ExperimentConfig(
        raw=doc,
        space_spec=_space_from_block(dict(doc.get("space", {"preset": "full"}))),
        timing=_build(TimingParams, doc.get("timing", {}), "timing"),
        energy=_build(EnergyParams, doc.get("energy", {}), "energy"),
        thermal=_build(ThermalParams, doc.get("thermal", {}), "thermal"),
        tuning=_build(TuningParams, doc.get("tuning", {}), "tuning"),
        overhead=_build(OverheadParams, doc.get("overhead", {}), "overhead"),
        theta=phase_block.get("theta", DEFAULT_THETA),
        interval_instructions=phase_block.get("interval_instructions",
                                              DEFAULT_INTERVAL_INSTRUCTIONS),
        trace=_trace_from_block(dict(doc.get("trace", {}))),
        output_dir=doc.get("output_dir", "out"),
    )


def load_config(path: Optional[str]) -> ExperimentConfig:
    """Parse the config file; with no path, all defaults apply."""
    if path is None:
        return parse_config({})
    if not os.path.exists(path):
        raise ConfigurationError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigurationError(f"config file {path} must contain a JSON object")
    return parse_config(doc)
