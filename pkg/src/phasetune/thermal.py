"""Single-node lumped RC thermal model with a closed-form stepper."""

import math
from dataclasses import dataclass
from typing import Optional, TextIO

from .errors import ConfigurationError, PhasetuneError


@dataclass
class ThermalParams:
    r_conv_k_per_w: float = 4.0
    c_j_per_k: float = 0.05     # R*C = 0.2 s by default
    t_ambient_c: float = 45.0
    sample_dt_s: float = 0.010

    def __post_init__(self):
        if self.r_conv_k_per_w <= 0 or self.c_j_per_k <= 0 or self.sample_dt_s <= 0:
            raise ConfigurationError("thermal R, C, and sample_dt must be positive")

    @property
    def tau_s(self) -> float:
        return self.r_conv_k_per_w * self.c_j_per_k


@dataclass
class ThermalState:
    temp_c: float


def steady_state(power_w: float, params: ThermalParams) -> float:
    """Equilibrium temperature: ambient + P*R, exactly."""
    if power_w < 0:
        raise PhasetuneError(f"negative power {power_w}")
    return params.t_ambient_c + power_w * params.r_conv_k_per_w


def step(state: ThermalState, power_w: float, dt_s: float, params: ThermalParams) -> ThermalState:
    """Exact exponential relaxation toward steady state over dt (no Euler drift)."""
    if dt_s <= 0:
        raise PhasetuneError(f"non-positive dt {dt_s}")
    t_ss = steady_state(power_w, params)
    return ThermalState(t_ss + (state.temp_c - t_ss) * math.exp(-dt_s / params.tau_s))


def run_profile(power_series: list[tuple[float, float]], params: ThermalParams,
                initial: Optional[ThermalState] = None):
    """Integrate a (power_w, duration_s) series.

    Returns (peak_c, mean_c, final ThermalState, samples) where samples is
    a (time_s, temp_c) list taken every sample_dt plus segment endpoints,
    and mean is the exact time-weighted average temperature.
    """
    state = ThermalState(initial.temp_c if initial is not None else params.t_ambient_c)
    samples: list[tuple[float, float]] = [(0.0, state.temp_c)]
    peak = state.temp_c
    integral = 0.0
    total_time = 0.0
    tau = params.tau_s
    now = 0.0
    for power_w, duration_s in power_series:
        if duration_s <= 0:
            raise PhasetuneError(f"non-positive segment duration {duration_s}")
        t_ss = steady_state(power_w, params)
        t0 = state.temp_c
        # interior samples; temperature within a segment is monotone so the
        # endpoints bound the peak
        t = params.sample_dt_s
        while t < duration_s:
            temp = t_ss + (t0 - t_ss) * math.exp(-t / tau)
            samples.append((now + t, temp))
            t += params.sample_dt_s
        end_temp = t_ss + (t0 - t_ss) * math.exp(-duration_s / tau)
        samples.append((now + duration_s, end_temp))
        peak = max(peak, t0, end_temp)
        # closed-form integral of T(t) over the segment
        integral += t_ss * duration_s + (t0 - t_ss) * tau * (1.0 - math.exp(-duration_s / tau))
        total_time += duration_s
        now += duration_s
        state = ThermalState(end_temp)
    mean = integral / total_time if total_time > 0 else state.temp_c
    return peak, mean, state, samples


def write_series_csv(samples: list[tuple[float, float]], stream: TextIO) -> None:
    stream.write("time_s,temp_c\n")
    for t, temp in samples:
        stream.write(f"{t!r},{temp!r}\n")
