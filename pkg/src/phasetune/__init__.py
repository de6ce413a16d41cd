"""Trace-driven simulator and multi-objective phase tuner for configurable
caches and dynamic frequency scaling."""

__version__ = "0.1.0"

from .cachesim import CachePairSim, CacheStats, simulate, stats_per_interval
from .models import EnergyParams, ObjectiveVector, TimingParams
from .optimizer import Evaluation, TuningParams, tune_phase
from .phase import PhaseHistoryTable, PhaseStats, classify, phase_distance
from .runtime import OverheadParams, RunReport, run
from .space import (CacheConfig, DesignSpace, DesignSpaceSpec, SystemConfig,
                    base_config, enumerate_space, preset, validate)
from .thermal import ThermalParams, ThermalState, run_profile, steady_state, step
from .trace import SegmentSpec, Trace, generate_synthetic, parse_trace, split_intervals
