"""Analytic timing and energy models over cache stats and a system config."""

import math
from dataclasses import dataclass
from typing import Optional

from .cachesim import CacheStats
from .errors import ConfigurationError
from .space import SystemConfig
from . import thermal


@dataclass
class TimingParams:
    ipc_base: float = 2.0          # instructions/cycle with no misses
    mem_latency_s: float = 100e-9  # main-memory latency, wall clock
    issue_width: float = 4.0

    def __post_init__(self):
        if not 0 < self.ipc_base <= self.issue_width:
            raise ConfigurationError("require 0 < ipc_base <= issue_width")
        if self.mem_latency_s <= 0:
            raise ConfigurationError("mem_latency_s must be positive")


@dataclass
class EnergyParams:
    e_instr_j: float = 4e-10        # core dynamic energy per instruction at (f_max, v_max)
    e_access_base_j: float = 1.5e-10  # cache access energy at size_ref, 1 way
    size_ref_bytes: int = 32 * 1024
    size_exponent: float = 0.5      # access energy ~ (size/size_ref)^alpha
    way_factor: float = 0.15        # +beta per extra way
    e_miss_per_byte_j: float = 2e-11  # line transfer energy per byte on a miss
    p_leak_w: float = 0.3           # leakage power at v_max
    v_min: float = 0.9
    v_max: float = 1.3
    f_min_hz: float = 800e6
    f_max_hz: float = 2e9

    def __post_init__(self):
        for name in ("e_instr_j", "e_access_base_j", "size_exponent", "way_factor",
                     "e_miss_per_byte_j", "p_leak_w"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0")
        if self.v_min > self.v_max:
            raise ConfigurationError("v_min must not exceed v_max")
        if self.f_min_hz > self.f_max_hz:
            raise ConfigurationError("f_min_hz must not exceed f_max_hz")


@dataclass(frozen=True)
class ObjectiveVector:
    exec_time_s: float
    energy_j: float
    peak_temp_c: float

    def edp(self) -> float:
        return self.energy_j * self.exec_time_s

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.exec_time_s, self.energy_j, self.peak_temp_c)


def voltage(freq_hz: float, params: EnergyParams) -> float:
    """Supply voltage at a frequency, linear between the (f, v) endpoints."""
    if freq_hz < params.f_min_hz or freq_hz > params.f_max_hz:
        raise ConfigurationError(f"frequency {freq_hz} outside [{params.f_min_hz}, {params.f_max_hz}]")
    if params.f_max_hz == params.f_min_hz:
        return params.v_max
    frac = (freq_hz - params.f_min_hz) / (params.f_max_hz - params.f_min_hz)
    return params.v_min + (params.v_max - params.v_min) * frac


def cycle_count(stats: CacheStats, config: SystemConfig, instr_count: int,
                params: TimingParams) -> float:
    """Base-IPC cycles plus a per-miss penalty of ceil(latency * f) cycles."""
    penalty = math.ceil(params.mem_latency_s * config.freq_hz)
    return instr_count / params.ipc_base + stats.total_misses * penalty


def exec_time(stats: CacheStats, config: SystemConfig, instr_count: int,
              params: TimingParams) -> float:
    return cycle_count(stats, config, instr_count, params) / config.freq_hz


def cache_access_energy(cache, params: EnergyParams) -> float:
    """Per-access energy; grows with size and associativity."""
    scale = (cache.size_bytes / params.size_ref_bytes) ** params.size_exponent
    return params.e_access_base_j * scale * (1.0 + params.way_factor * (cache.assoc_ways - 1))


def energy(stats: CacheStats, config: SystemConfig, exec_time_s: float,
           instr_count: int, params: EnergyParams) -> float:
    """Total joules: core dynamic + cache access/transfer + leakage.

    v_ref is v_max; core dynamic scales with (V/v_ref)^2, leakage with V/v_ref.
    """
    v = voltage(config.freq_hz, params)
    v_ratio = v / params.v_max if params.v_max else 1.0
    e_core = instr_count * params.e_instr_j * v_ratio * v_ratio
    e_cache = (stats.i_accesses * cache_access_energy(config.icache, params)
               + stats.i_misses * config.icache.line_bytes * params.e_miss_per_byte_j
               + stats.d_accesses * cache_access_energy(config.dcache, params)
               + stats.d_misses * config.dcache.line_bytes * params.e_miss_per_byte_j)
    e_static = params.p_leak_w * v_ratio * exec_time_s
    return e_core + e_cache + e_static


def objective_vector(stats: CacheStats, config: SystemConfig, instr_count: int,
                     timing: TimingParams, energy_params: EnergyParams,
                     thermal_params: "thermal.ThermalParams",
                     initial_temp_c: Optional[float] = None) -> ObjectiveVector:
    """(time, energy, peak temperature) for one segment under one config.

    Temperature integrates the segment's average power from initial_temp_c
    (ambient when not given).
    """
    t = exec_time(stats, config, instr_count, timing)
    e = energy(stats, config, t, instr_count, energy_params)
    if t > 0:
        power = e / t
        start = thermal.ThermalState(
            initial_temp_c if initial_temp_c is not None else thermal_params.t_ambient_c)
        peak, _, _, _ = thermal.run_profile([(power, t)], thermal_params, start)
    else:
        peak = initial_temp_c if initial_temp_c is not None else thermal_params.t_ambient_c
    return ObjectiveVector(t, e, peak)
