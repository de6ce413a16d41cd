"""Ground-truth searches and parameter studies around the tuner."""

from dataclasses import dataclass
from multiprocessing import Pool
from typing import Optional

from .errors import ConfigurationError
from .optimizer import (Evaluation, TuningParams, non_dominated, select_best,
                        tune_phase)
from .phase import PhaseStats
from .space import (CacheConfig, DesignSpace, DesignSpaceSpec, SystemConfig,
                    base_config, validate)

# External reference measurement, for qualitative comparison of the sweep
# ranking only; never asserted (our energy/thermal coefficients are not
# calibrated to it).
REFERENCE_IMPACT_C = (("line_bytes", 17.5), ("assoc_ways", 15.8), ("size_bytes", 2.0))


def evaluate_all(evaluator, configs: list[SystemConfig], jobs: int = 1):
    """Objective vectors for every config, in input order."""
    if jobs > 1:
        with Pool(jobs) as pool:
            return pool.map(evaluator, configs, chunksize=32)
    return [evaluator(c) for c in configs]


def exhaustive_pareto(evaluator, space: DesignSpace, jobs: int = 1) -> list[Evaluation]:
    """Evaluate the entire space; exact non-dominated set sorted by index."""
    objs = evaluate_all(evaluator, list(space), jobs)
    evals = [Evaluation(cfg, obj, i) for i, (cfg, obj) in enumerate(zip(space, objs))]
    return sorted(non_dominated(evals), key=lambda e: e.index)


BASELINE_KINDS = ("dfs-only", "cache-only")


def baseline(kind: str, evaluator, space: DesignSpace, priority: str,
             temp_threshold_c: Optional[float] = None) -> tuple[Evaluation, bool, int]:
    """Single-knob exhaustive reference.

    dfs-only sweeps the frequency set with base caches; cache-only sweeps
    cache pairs at the base frequency. Returns (best under the priority,
    feasible flag, evaluation count).
    """
    if kind not in BASELINE_KINDS:
        raise ConfigurationError(f"baseline kind must be one of {BASELINE_KINDS}")
    base = base_config(space.spec)
    if kind == "dfs-only":
        candidates = [SystemConfig(base.icache, base.dcache, f) for f in space.spec.freqs]
    else:
        from .space import cache_configs
        caches = cache_configs(space.spec)
        candidates = [SystemConfig(ic, dc, base.freq_hz) for ic in caches for dc in caches]
    candidates = [c for c in candidates if validate(c, space.spec)[0]]
    objs = evaluate_all(evaluator, candidates)
    evals = [Evaluation(c, o, space.index_of(c)) for c, o in zip(candidates, objs)]
    front = sorted(non_dominated(evals), key=lambda e: e.index)
    best, feasible = select_best(front, priority, temp_threshold_c)
    return best, feasible, len(candidates)


@dataclass
class SweepRow:
    parameter: str   # "base", "size_bytes", "line_bytes", "assoc_ways", "reference"
    value: object
    peak_temp_c: float
    delta_c: float


def temp_impact_sweep(evaluator, spec: DesignSpaceSpec) -> tuple[list[SweepRow], list[str]]:
    """Peak temperature when each cache parameter is varied alone (both caches).

    Returns the rows (base first) and the parameters ranked by largest
    absolute temperature change from base.
    """
    base = base_config(spec)
    base_temp = evaluator(base).peak_temp_c
    rows = [SweepRow("base", None, base_temp, 0.0)]
    max_delta: dict[str, float] = {}
    axes = (("size_bytes", spec.sizes), ("line_bytes", spec.lines), ("assoc_ways", spec.assocs))
    for param, values in axes:
        max_delta[param] = 0.0
        for value in values:
            variant = SystemConfig(
                CacheConfig(**{**_cache_fields(base.icache), param: value}),
                CacheConfig(**{**_cache_fields(base.dcache), param: value}),
                base.freq_hz)
            if variant == base:
                continue
            if not variant.icache.geometry_ok() or not variant.dcache.geometry_ok():
                continue
            temp = evaluator(variant).peak_temp_c
            delta = temp - base_temp
            rows.append(SweepRow(param, value, temp, delta))
            max_delta[param] = max(max_delta[param], abs(delta))
    ranking = sorted(max_delta, key=lambda p: -max_delta[p])
    return rows, ranking


def _cache_fields(c: CacheConfig) -> dict:
    return {"size_bytes": c.size_bytes, "line_bytes": c.line_bytes, "assoc_ways": c.assoc_ways}


@dataclass
class ParamSweepRow:
    population: int
    generations: int
    archive_size: int
    evaluations: int
    budget_pct: float
    edp: float
    overhead_s: float


def param_sweep(stats: PhaseStats, evaluator, space: DesignSpace,
                grid: list[tuple[int, int, int]], seed: int = 1,
                char_interval_s: float = 0.010) -> list[ParamSweepRow]:
    """Tuner budget study: evaluations, space coverage, and achieved EDP per
    (population, generations, archive_size) triple, with a fixed seed."""
    rows = []
    for s, g, a in grid:
        params = TuningParams(population=s, generations=g, archive_size=a,
                              priority="S", seed=seed)
        result = tune_phase(stats, evaluator, space, params)
        rows.append(ParamSweepRow(
            s, g, a, result.evaluations_performed,
            100.0 * result.evaluations_performed / len(space),
            result.best.objectives.edp(),
            result.evaluations_performed * char_interval_s))
    return rows
