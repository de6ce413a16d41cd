"""Strength-Pareto phase characterization.

Per generation a fresh uniform-random population is drawn (no crossover or
mutation), fitness is computed from dominance strengths over population +
carried archive, and the archive keeps the non-dominated set, truncated by
nearest-neighbor density or topped up with the fittest dominated points to
stay at capacity. The returned best is selected from the non-dominated set
of every evaluation the run performed, under a priority objective and an
optional peak-temperature ceiling.
"""

import math
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .errors import PhasetuneError, TuningError
from .models import ObjectiveVector
from .phase import PhaseHistoryTable, PhaseStats
from .space import DesignSpace, SystemConfig

PRIORITIES = ("S", "N", "T", "X")  # EDP, energy, temperature, execution time


@dataclass
class TuningParams:
    population: int = 20
    generations: int = 3
    archive_size: int = 5
    priority: str = "S"
    temp_threshold_c: Optional[float] = None
    seed: int = 1

    def __post_init__(self):
        if self.population < 1 or self.generations < 1 or self.archive_size < 1:
            raise PhasetuneError("population, generations, and archive_size must be >= 1")
        if self.priority not in PRIORITIES:
            raise PhasetuneError(f"priority must be one of {PRIORITIES}")


@dataclass(frozen=True)
class Evaluation:
    config: SystemConfig
    objectives: ObjectiveVector
    index: int  # stable index in the design space


@dataclass
class FitnessRecord:
    strength: int
    fitness: int


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """a dominates b: no worse in every minimized objective, better in one."""
    at = a.as_tuple()
    bt = b.as_tuple()
    if not all(math.isfinite(v) for v in at + bt):
        raise PhasetuneError("non-finite objective value")
    return all(x <= y for x, y in zip(at, bt)) and any(x < y for x, y in zip(at, bt))


def strength(e: Evaluation, union: list[Evaluation]) -> int:
    """Number of union members e dominates."""
    return sum(1 for other in union if dominates(e.objectives, other.objectives))


def fitness(e: Evaluation, union: list[Evaluation]) -> FitnessRecord:
    """Sum of dominators' strengths; 0 means non-dominated within the union."""
    r = sum(strength(other, union) for other in union if dominates(other.objectives, e.objectives))
    return FitnessRecord(strength(e, union), r)


def fitness_all(union: list[Evaluation]) -> list[FitnessRecord]:
    """One pairwise pass over the union (m*(m-1) dominance checks)."""
    m = len(union)
    dom = [[False] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            if i != j:
                dom[i][j] = dominates(union[i].objectives, union[j].objectives)
    strengths = [sum(row) for row in dom]
    records = []
    for j in range(m):
        r = sum(strengths[i] for i in range(m) if dom[i][j])
        records.append(FitnessRecord(strengths[j], r))
    return records


def non_dominated(evals: Iterable[Evaluation]) -> list[Evaluation]:
    pool = list(evals)
    return [e for e in pool
            if not any(dominates(o.objectives, e.objectives) for o in pool)]


def _nn_truncate(front: list[Evaluation], a_size: int) -> list[Evaluation]:
    """Drop the densest points: repeatedly remove the member with the smallest
    nearest-neighbor distance in per-objective min-max normalized space
    (first such member on ties)."""
    work = list(front)
    while len(work) > a_size:
        cols = list(zip(*(e.objectives.as_tuple() for e in work)))
        lo = [min(c) for c in cols]
        span = [(max(c) - min(c)) or 1.0 for c in cols]
        pts = [tuple((v - l) / s for v, l, s in zip(e.objectives.as_tuple(), lo, span))
               for e in work]
        nn = []
        for i, p in enumerate(pts):
            d = min(math.dist(p, q) for j, q in enumerate(pts) if j != i)
            nn.append(d)
        work.pop(nn.index(min(nn)))
    return work


def update_archive(population: list[Evaluation], archive: list[Evaluation], a_size: int,
                   context: Iterable[Evaluation] = ()) -> list[Evaluation]:
    """Next-generation archive from population + previous archive.

    Keeps the non-dominated members of the deduplicated union; over capacity
    it truncates by nearest-neighbor density, under capacity it adds the
    lowest-fitness dominated members until min(a_size, |union|). Extra
    `context` evaluations participate in dominance filtering only.
    """
    union: list[Evaluation] = []
    seen = set()
    for e in list(population) + list(archive):
        if e.config not in seen:
            seen.add(e.config)
            union.append(e)
    ctx = [e for e in context if e.config not in seen]
    records = fitness_all(union)
    front = [e for e, rec in zip(union, records)
             if rec.fitness == 0
             and not any(dominates(o.objectives, e.objectives) for o in ctx)]
    if len(front) > a_size:
        return _nn_truncate(front, a_size)
    front_cfgs = {e.config for e in front}
    rest = sorted(
        ((rec.fitness, e.index, e) for e, rec in zip(union, records) if e.config not in front_cfgs),
        key=lambda t: (t[0], t[1]),
    )
    return front + [e for _, _, e in rest[: a_size - len(front)]]


_PRIORITY_KEYS: dict[str, Callable[[Evaluation], float]] = {
    "S": lambda e: e.objectives.edp(),
    "N": lambda e: e.objectives.energy_j,
    "T": lambda e: e.objectives.peak_temp_c,
    "X": lambda e: e.objectives.exec_time_s,
}


def select_best(archive: list[Evaluation], priority: str,
                temp_threshold_c: Optional[float] = None) -> tuple[Evaluation, bool]:
    """Best member under the priority objective among those below the
    temperature threshold; ties by lower EDP then lower config index.
    With no feasible member, falls back to the coolest one, flagged."""
    if not archive:
        raise PhasetuneError("select_best on an empty archive")
    key = _PRIORITY_KEYS[priority]
    feasible = [e for e in archive
                if temp_threshold_c is None or e.objectives.peak_temp_c <= temp_threshold_c]
    if feasible:
        best = min(feasible, key=lambda e: (key(e), e.objectives.edp(), e.index))
        return best, True
    best = min(archive, key=lambda e: (e.objectives.peak_temp_c, e.objectives.edp(), e.index))
    return best, False


@dataclass
class TuneResult:
    best: Evaluation
    feasible: bool
    archive: list[Evaluation]          # bounded, what the history stores
    front: list[Evaluation]            # non-dominated set of all evaluations
    evaluations_performed: int         # fresh evaluator calls


def tune_phase(stats: PhaseStats, evaluator: Callable[[SystemConfig], ObjectiveVector],
               space: DesignSpace, params: TuningParams,
               history: Optional[PhaseHistoryTable] = None, issue_width: float = 4.0,
               seed: Optional[int] = None, phase_id=None) -> TuneResult:
    """Characterize one phase over the design space.

    Generation 0 seeds the archive from the most similar previously seen
    phase (its configs re-evaluated for this phase); later generations carry
    the archive forward. Evaluator calls are memoized per config, so fresh
    evaluations stay within population x generations + seed-archive size.
    """
    rng = random.Random(params.seed if seed is None else seed)
    memo: dict[int, Evaluation] = {}
    fresh = 0

    def evaluate(idx: int) -> Evaluation:
        nonlocal fresh
        ev = memo.get(idx)
        if ev is None:
            cfg = space.config_at(idx)
            try:
                obj = evaluator(cfg)
            except Exception as exc:
                raise TuningError(f"evaluator failed: {exc}", phase_id=phase_id, config=cfg) from exc
            ev = Evaluation(cfg, obj, idx)
            memo[idx] = ev
            fresh += 1
        return ev

    archive: list[Evaluation] = []
    if history is not None and len(history) > 0:
        _, msp, _ = history.most_similar(stats, issue_width)
        archive = [evaluate(space.index_of(ev.config)) for ev in msp.archive]

    n = len(space)
    for _ in range(params.generations):
        picks = rng.sample(range(n), min(params.population, n))
        population = [evaluate(i) for i in picks]
        archive = update_archive(population, archive, params.archive_size,
                                 context=memo.values())

    front = sorted(non_dominated(memo.values()), key=lambda e: e.index)
    best, feasible = select_best(front, params.priority, params.temp_threshold_c)
    if all(e.config != best.config for e in archive):
        # the stored archive must contain the chosen configuration
        archive = [best] + archive[: params.archive_size - 1]
    return TuneResult(best, feasible, archive, front, fresh)
