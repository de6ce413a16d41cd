"""End-to-end tuning loop over a trace.

Intervals are characterized under the base configuration, clustered into
phases, and each phase occurrence either reuses the history table's best
configuration or is characterized by the optimizer; the chosen config is
then "executed" through the cache simulator, timing/energy models, and the
thermal node. Per-evaluation characterization time and reconfiguration
delays are book-kept, not simulated.
"""

import random
from dataclasses import dataclass, field
from typing import Optional

from . import models, thermal
from .cachesim import CachePairSim, stats_per_interval
from .errors import TuningError
from .models import EnergyParams, ObjectiveVector, TimingParams
from .optimizer import TuningParams, tune_phase
from .phase import (DEFAULT_THETA, PhaseHistoryEntry, PhaseHistoryTable,
                    PhaseStats, classify)
from .space import DesignSpace, SystemConfig, base_config
from .trace import Trace, split_intervals

DEFAULT_INTERVAL_INSTRUCTIONS = 100_000


@dataclass
class OverheadParams:
    char_interval_s: float = 0.010       # wall time charged per evaluated config
    dfs_transition_s: float = 18.24e-6   # frequency switch delay
    cache_switch_s: float = 0.0

    def __post_init__(self):
        if min(self.char_interval_s, self.dfs_transition_s, self.cache_switch_s) < 0:
            raise TuningError("overhead durations must be >= 0")


def tuning_overhead(evaluations: int, reconfigurations: int, overheads: OverheadParams) -> float:
    """Characterization time plus switch delays."""
    if evaluations < 0 or reconfigurations < 0:
        raise TuningError("counts must be >= 0")
    return (evaluations * overheads.char_interval_s
            + reconfigurations * (overheads.dfs_transition_s + overheads.cache_switch_s))


@dataclass
class SegmentEvaluator:
    """Objective vector for a config on one fixed trace segment.

    Cold caches per candidate; temperature integrates the segment's average
    power from a fixed starting temperature. Picklable for parallel maps.
    """

    kinds: list[int]
    addrs: list[int]
    instr_count: int
    timing: TimingParams
    energy_params: EnergyParams
    thermal_params: thermal.ThermalParams
    initial_temp_c: Optional[float] = None

    def __call__(self, config: SystemConfig) -> ObjectiveVector:
        sim = CachePairSim(config.icache, config.dcache)
        stats = sim.run(self.kinds, self.addrs)
        return models.objective_vector(stats, config, self.instr_count, self.timing,
                                       self.energy_params, self.thermal_params,
                                       self.initial_temp_c)


@dataclass
class PhaseResult:
    occurrence: int
    phase_id: int
    interval_start: int
    interval_stop: int           # exclusive
    instructions: int
    config: SystemConfig
    config_index: int
    objectives: ObjectiveVector
    feasible: bool
    reused: bool
    fresh_evaluations: int


@dataclass
class RunReport:
    phases: list[PhaseResult] = field(default_factory=list)
    execution_time_s: float = 0.0
    total_energy_j: float = 0.0
    peak_temp_c: float = 0.0
    evaluations_performed: int = 0
    reconfiguration_count: int = 0
    tuning_overhead_s: float = 0.0
    total_time_s: float = 0.0    # execution + tuning overhead
    total_edp: float = 0.0
    temperature_samples: list = field(default_factory=list)
    failed: bool = False
    error: str = ""


def _interval_phase_stats(trace: Trace, intervals, base: SystemConfig,
                          timing: TimingParams):
    """Per-interval (PhaseStats, weight) under the base configuration."""
    per_interval = stats_per_interval(trace, intervals, base.icache, base.dcache)
    stats_list: list[PhaseStats] = []
    weights: list[float] = []
    for iv, st in zip(intervals, per_interval):
        cycles = models.cycle_count(st, base, iv.instruction_count, timing)
        ipc = iv.instruction_count / cycles if cycles > 0 else 0.0
        stats_list.append(PhaseStats(st.imr, st.dmr, ipc))
        weights.append(float(st.total_accesses) or 1.0)
    return stats_list, weights


def _occurrences(phases, n_intervals: int) -> list[tuple[int, int, int]]:
    """Maximal runs of consecutive intervals in the same phase: (local_phase, start, stop)."""
    owner = [0] * n_intervals
    for p in phases:
        for idx in p.member_intervals:
            owner[idx] = p.id
    runs = []
    start = 0
    for i in range(1, n_intervals + 1):
        if i == n_intervals or owner[i] != owner[start]:
            runs.append((owner[start], start, i))
            start = i
    return runs


def _execute_segment(trace: Trace, intervals, config: SystemConfig,
                     timing: TimingParams, energy_params: EnergyParams,
                     thermal_params: thermal.ThermalParams,
                     state: thermal.ThermalState):
    """Run a phase occurrence under its chosen config, one interval at a time."""
    sim = CachePairSim(config.icache, config.dcache)
    power_series = []
    time_s = 0.0
    energy_j = 0.0
    instructions = 0
    for iv in intervals:
        kinds, addrs = iv.slice_of(trace)
        st = sim.run(kinds, addrs)
        t = models.exec_time(st, config, iv.instruction_count, timing)
        e = models.energy(st, config, t, iv.instruction_count, energy_params)
        if t > 0:
            power_series.append((e / t, t))
        time_s += t
        energy_j += e
        instructions += iv.instruction_count
    if power_series:
        peak, _, state, samples = thermal.run_profile(power_series, thermal_params, state)
    else:
        peak, samples = state.temp_c, []
    return ObjectiveVector(time_s, energy_j, peak), state, samples, instructions


def run(trace: Trace, space: DesignSpace, *, timing: TimingParams,
        energy_params: EnergyParams, thermal_params: thermal.ThermalParams,
        tuning: TuningParams, overheads: OverheadParams,
        theta: float = DEFAULT_THETA,
        interval_instructions: int = DEFAULT_INTERVAL_INSTRUCTIONS,
        history: Optional[PhaseHistoryTable] = None) -> RunReport:
    """Tune and execute a whole trace; deterministic for a fixed seed.

    The history table is updated in place so characterizations persist
    across calls. A characterization failure yields a partial report with
    failed=True.
    """
    if history is None:
        history = PhaseHistoryTable()
    report = RunReport()
    intervals = split_intervals(trace, interval_instructions)
    if not intervals:
        report.peak_temp_c = thermal_params.t_ambient_c
        return report

    base = base_config(space.spec)
    stats_list, weights = _interval_phase_stats(trace, intervals, base, timing)
    phases = classify(stats_list, theta, timing.issue_width, weights)

    state = thermal.ThermalState(thermal_params.t_ambient_c)
    applied = base
    peak = thermal_params.t_ambient_c
    sim_time = 0.0
    try:
        for occ_no, (local_id, start, stop) in enumerate(_occurrences(phases, len(intervals))):
            centroid = phases[local_id].stats
            match = history.most_similar(centroid, timing.issue_width)
            if match is not None and match[2] <= theta:
                phase_id, entry, _ = match
                chosen = entry.best_config
                reused = True
                fresh = 0
                feasible = True
            else:
                phase_id = history.next_id()
                seg_kinds = trace.kinds[intervals[start].start:intervals[stop - 1].stop]
                seg_addrs = trace.addrs[intervals[start].start:intervals[stop - 1].stop]
                seg_instr = sum(iv.instruction_count for iv in intervals[start:stop])
                evaluator = SegmentEvaluator(seg_kinds, seg_addrs, seg_instr, timing,
                                             energy_params, thermal_params, state.temp_c)
                result = tune_phase(centroid, evaluator, space, tuning, history,
                                    timing.issue_width,
                                    seed=random.Random(f"{tuning.seed}:{phase_id}").randrange(2**63),
                                    phase_id=phase_id)
                history.store(phase_id, PhaseHistoryEntry(centroid, result.archive,
                                                          result.best.config))
                chosen = result.best.config
                reused = False
                fresh = result.evaluations_performed
                feasible = result.feasible

            objectives, state, samples, instr = _execute_segment(
                trace, intervals[start:stop], chosen, timing, energy_params,
                thermal_params, state)
            if reused and tuning.temp_threshold_c is not None:
                feasible = objectives.peak_temp_c <= tuning.temp_threshold_c
            for t, temp in samples:
                report.temperature_samples.append((sim_time + t, temp))
            sim_time += objectives.exec_time_s
            peak = max(peak, objectives.peak_temp_c)
            if chosen != applied:
                report.reconfiguration_count += 1
                applied = chosen
            report.phases.append(PhaseResult(
                occ_no, phase_id, start, stop, instr, chosen, space.index_of(chosen),
                objectives, feasible, reused, fresh))
            report.execution_time_s += objectives.exec_time_s
            report.total_energy_j += objectives.energy_j
            report.evaluations_performed += fresh
    except TuningError as exc:
        report.failed = True
        report.error = str(exc)

    report.peak_temp_c = peak
    report.tuning_overhead_s = tuning_overhead(report.evaluations_performed,
                                               report.reconfiguration_count, overheads)
    report.total_time_s = report.execution_time_s + report.tuning_overhead_s
    report.total_edp = report.total_energy_j * report.total_time_s
    return report
