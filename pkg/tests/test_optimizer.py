import math
import random

import pytest

import phasetune.optimizer as opt
from phasetune.errors import PhasetuneError, TuningError
from phasetune.models import ObjectiveVector
from phasetune.optimizer import (Evaluation, TuningParams, dominates, fitness,
                                 fitness_all, non_dominated, select_best,
                                 strength, tune_phase, update_archive)
from phasetune.phase import PhaseHistoryEntry, PhaseHistoryTable, PhaseStats
from phasetune.space import DesignSpace, DesignSpaceSpec


def _space(n_freqs=2, sizes=(8 * 1024,), lines=(16, 32), assocs=(1, 2)):
    freqs = tuple(800_000_000 + 200_000_000 * i for i in range(n_freqs))
    return DesignSpace(DesignSpaceSpec(sizes=sizes, lines=lines, assocs=assocs, freqs=freqs))


def _vec(t, e, temp):
    return ObjectiveVector(float(t), float(e), float(temp))


def _evals(vectors):
    space = _space(n_freqs=7, sizes=(8 * 1024, 16 * 1024, 32 * 1024), lines=(16, 32, 64),
                   assocs=(1, 2, 4))
    assert len(space) >= len(vectors)
    return [Evaluation(space.config_at(i), _vec(*v), i) for i, v in enumerate(vectors)]


def _random_table(space, rng, temp_lo=55.0, temp_hi=95.0):
    return [_vec(rng.uniform(0.5e-3, 3e-3), rng.uniform(0.5e-3, 3e-3),
                 rng.uniform(temp_lo, temp_hi)) for _ in range(len(space))]


STATS = PhaseStats(0.05, 0.1, 2.0)


# --- dominance -----------------------------------------------------------

def test_dominates_one_strict_rest_equal():
    assert dominates(_vec(1, 2, 3), _vec(2, 2, 3))


def test_dominates_tradeoff_neither():
    a, b = _vec(1, 2, 3), _vec(2, 1, 3)
    assert not dominates(a, b) and not dominates(b, a)


def test_dominates_equal_is_false():
    a = _vec(1, 2, 3)
    assert not dominates(a, _vec(1, 2, 3))


def test_dominates_rejects_non_finite():
    with pytest.raises(PhasetuneError):
        dominates(_vec(math.nan, 1, 1), _vec(1, 1, 1))


# --- strength / fitness ---------------------------------------------------

def test_strength_chain():
    union = _evals([(1, 1, 1), (2, 2, 2), (3, 3, 3)])
    assert [strength(e, union) for e in union] == [2, 1, 0]


def test_strength_singleton_and_identical():
    single = _evals([(1, 1, 1)])
    assert strength(single[0], single) == 0
    same = _evals([(2, 2, 2), (2, 2, 2), (2, 2, 2)])
    assert [strength(e, same) for e in same] == [0, 0, 0]


def test_fitness_chain():
    union = _evals([(1, 1, 1), (2, 2, 2), (3, 3, 3)])
    assert [fitness(e, union).fitness for e in union] == [0, 2, 3]


def test_fitness_zero_iff_non_dominated():
    rng = random.Random(33)
    space = _space(n_freqs=7, sizes=(8 * 1024, 16 * 1024), lines=(16, 32), assocs=(1, 2))
    for _ in range(30):
        k = rng.randrange(2, 30)
        union = [Evaluation(space.config_at(i), _vec(rng.uniform(1, 3), rng.uniform(1, 3),
                                                     rng.uniform(1, 3)), i)
                 for i in range(k)]
        nd = {e.index for e in non_dominated(union)}
        for e in union:
            assert (fitness(e, union).fitness == 0) == (e.index in nd)


def brute_force_strength_fitness(union):
    """Independent dominance counter: tuple comparisons only."""
    tuples = [e.objectives.as_tuple() for e in union]

    def dom(x, y):
        return x != y and all(a <= b for a, b in zip(x, y))

    s = [sum(1 for y in tuples if dom(x, y)) for x in tuples]
    r = [sum(s[i] for i, x in enumerate(tuples) if dom(x, y)) for y in tuples]
    return s, r


def test_fitness_matches_brute_force_on_random_unions():
    rng = random.Random(99)
    space = _space(n_freqs=7, sizes=(8 * 1024, 16 * 1024, 32 * 1024), lines=(16, 32, 64),
                   assocs=(1, 2, 4))
    for _ in range(50):
        k = rng.randrange(1, 51)
        union = [Evaluation(space.config_at(i),
                            _vec(rng.randrange(1, 6), rng.randrange(1, 6), rng.randrange(1, 6)), i)
                 for i in range(k)]
        want_s, want_r = brute_force_strength_fitness(union)
        recs = fitness_all(union)
        assert [rec.strength for rec in recs] == want_s
        assert [rec.fitness for rec in recs] == want_r
        for e, ws, wr in zip(union, want_s, want_r):
            assert strength(e, union) == ws
            assert fitness(e, union).fitness == wr


def test_fitness_pass_is_quadratic(monkeypatch):
    union = _evals([(i, 10 - i, 5) for i in range(10)])
    calls = []
    real = opt.dominates

    def counting(a, b):
        calls.append(1)
        return real(a, b)

    monkeypatch.setattr(opt, "dominates", counting)
    fitness_all(union)
    assert len(calls) == 10 * 9


# --- archive update -------------------------------------------------------

def test_update_archive_keeps_small_non_dominated_union():
    union = _evals([(1, 3, 2), (2, 1, 3), (3, 2, 1)])
    out = update_archive(union, [], a_size=5)
    assert {e.index for e in out} == {0, 1, 2}


def test_update_archive_keeps_dominating_point():
    evals = _evals([(1, 1, 1), (2, 2, 2), (5, 1, 1)])
    out = update_archive(evals[1:], [evals[0]], a_size=1)
    assert [e.index for e in out] == [0]


def test_update_archive_dedups_by_config():
    e = _evals([(1, 2, 3)])[0]
    out = update_archive([e], [e], a_size=5)
    assert out == [e]


def _truncation_oracle(front, a_size):
    work = list(front)
    while len(work) > a_size:
        tuples = [e.objectives.as_tuple() for e in work]
        mins = [min(col) for col in zip(*tuples)]
        maxs = [max(col) for col in zip(*tuples)]
        norm = [tuple((v - lo) / ((hi - lo) or 1.0) for v, lo, hi in zip(t, mins, maxs))
                for t in tuples]
        nn = [min(math.sqrt(sum((a - b) ** 2 for a, b in zip(norm[i], norm[j])))
                  for j in range(len(norm)) if j != i)
              for i in range(len(norm))]
        work.pop(nn.index(min(nn)))
    return work


def test_update_archive_truncates_by_density():
    # 7 mutually non-dominating points, two of them crowded together
    vectors = [(1, 7, 4), (2, 6, 4), (2.05, 5.95, 4), (3, 5, 4), (4, 4, 4), (5, 2, 4), (6, 1, 4)]
    front = _evals(vectors)
    out = update_archive(front, [], a_size=5)
    assert len(out) == 5
    assert set(e.index for e in out) <= set(e.index for e in front)
    for a in out:
        for b in out:
            if a is not b:
                assert not dominates(a.objectives, b.objectives)
    want = _truncation_oracle(front, 5)
    assert [e.index for e in out] == [e.index for e in want]


def test_update_archive_truncation_matches_oracle_randomized():
    rng = random.Random(7)
    space = _space(n_freqs=7, sizes=(8 * 1024, 16 * 1024, 32 * 1024), lines=(16, 32, 64),
                   assocs=(1, 2, 4))
    for _ in range(30):
        k = rng.randrange(6, 16)
        # random anti-chain: points on a simplex-ish shell are usually non-dominating;
        # filter to the non-dominated subset to be sure
        cand = [Evaluation(space.config_at(i),
                           _vec(rng.uniform(1, 2), rng.uniform(1, 2), rng.uniform(1, 2)), i)
                for i in range(k)]
        front = non_dominated(cand)
        if len(front) < 4:
            continue
        a_size = max(2, len(front) - 3)
        got = update_archive(front, [], a_size)
        want = _truncation_oracle(front, a_size)
        assert [e.index for e in got] == [e.index for e in want]


def test_update_archive_fills_to_capacity_with_fittest():
    union = _evals([(1, 1, 1), (2, 2, 2), (3, 3, 3), (4, 4, 4)])
    out = update_archive(union, [], a_size=3)
    assert [e.index for e in out] == [0, 1, 2]  # front + lowest-fitness dominated


def test_update_archive_result_size():
    union = _evals([(1, 1, 1), (2, 2, 2), (3, 3, 3)])
    for a_size in (1, 2, 3, 5):
        out = update_archive(union, [], a_size)
        assert len(out) == min(a_size, len(union))


def test_update_archive_context_filters_front():
    union = _evals([(2, 2, 2), (3, 1, 3)])
    dominator = _evals([(9, 9, 9), (9, 9, 9), (1, 2, 2)])[2]  # index 2, dominates only (2,2,2)
    out = update_archive(union, [], a_size=1, context=[dominator])
    # (2,2,2) is pruned by the context; (3,1,3) is not dominated by it
    assert [e.index for e in out] == [1]


# --- selection ------------------------------------------------------------

def test_select_best_threshold_filters():
    archive = _evals([(1, 1, 70), (2, 2, 60)])
    best, feasible = select_best(archive, "T", 65.0)
    assert best.index == 1 and feasible


def test_select_best_edp_priority():
    archive = _evals([(1, 1, 70), (2, 2, 60)])
    best, feasible = select_best(archive, "S", None)
    assert best.index == 0 and feasible


def test_select_best_all_infeasible_falls_back_to_coolest():
    archive = _evals([(1, 1, 70), (2, 2, 75)])
    best, feasible = select_best(archive, "S", 65.0)
    assert best.index == 0 and not feasible


def test_select_best_tie_breaks_by_edp_then_index():
    archive = _evals([(2, 3, 50), (2, 2, 50), (2, 2, 50)])
    best, _ = select_best(archive, "X", None)  # all tie on time
    assert best.index == 1  # lower EDP wins, then lower index


def test_select_best_priority_objectives():
    archive = _evals([(1, 9, 80), (9, 1, 70), (5, 5, 40), (2, 2, 60)])
    assert select_best(archive, "X", None)[0].index == 0
    assert select_best(archive, "N", None)[0].index == 1
    assert select_best(archive, "T", None)[0].index == 2
    assert select_best(archive, "S", None)[0].index == 3  # EDP 4 is minimal


def test_select_best_empty_archive_errors():
    with pytest.raises(PhasetuneError):
        select_best([], "S", None)


# --- the tuner ------------------------------------------------------------

def test_tune_single_config_space():
    space = _space(n_freqs=1, sizes=(8 * 1024,), lines=(16,), assocs=(1,))
    assert len(space) == 1
    calls = []

    def evaluator(cfg):
        calls.append(cfg)
        return _vec(1e-3, 1e-3, 50)

    result = tune_phase(STATS, evaluator, space, TuningParams(population=4, generations=2, seed=3))
    assert result.best.config == space.config_at(0)
    assert len(calls) == 1 == result.evaluations_performed


def test_tune_eight_config_space_energy_priority():
    space = _space(n_freqs=2, sizes=(8 * 1024,), lines=(16,), assocs=(1, 2))
    assert len(space) == 8
    rng = random.Random(5)
    table = _random_table(space, rng)
    seen = []

    def evaluator(cfg):
        seen.append(cfg)
        return table[space.index_of(cfg)]

    params = TuningParams(population=4, generations=2, archive_size=5, priority="N", seed=11)
    result = tune_phase(STATS, evaluator, space, params)

    evaluated = [Evaluation(c, table[space.index_of(c)], space.index_of(c)) for c in seen]
    nd = non_dominated(evaluated)
    assert result.best.objectives.energy_j == min(e.objectives.energy_j for e in nd)
    assert not any(dominates(e.objectives, result.best.objectives) for e in evaluated)
    assert result.best.objectives.energy_j == min(e.objectives.energy_j for e in result.front)


def test_tune_budget_and_memoization():
    space = _space(n_freqs=7, sizes=(8 * 1024, 16 * 1024, 32 * 1024), lines=(16, 32, 64),
                   assocs=(1, 2, 4))
    rng = random.Random(1)
    table = _random_table(space, rng)
    calls = []

    def evaluator(cfg):
        calls.append(cfg)
        return table[space.index_of(cfg)]

    params = TuningParams(population=20, generations=3, seed=2)
    result = tune_phase(STATS, evaluator, space, params)
    assert result.evaluations_performed == len(calls) == len(set(calls))
    assert result.evaluations_performed <= 60


def test_tune_deterministic():
    space = _space(n_freqs=3)
    table = _random_table(space, random.Random(8))

    def run():
        r = tune_phase(STATS, lambda c: table[space.index_of(c)], space,
                       TuningParams(population=5, generations=3, seed=21))
        return (r.best.index, [e.index for e in r.archive], [e.index for e in r.front],
                r.evaluations_performed)

    assert run() == run()


def test_tune_threshold_compliance_over_evaluated_set():
    space = _space(n_freqs=7, sizes=(8 * 1024, 16 * 1024), lines=(16, 32), assocs=(1, 2))
    for seed in range(10):
        rng = random.Random(1000 + seed)
        table = _random_table(space, rng, temp_lo=70.0, temp_hi=95.0)
        seen = []

        def evaluator(cfg):
            seen.append(cfg)
            return table[space.index_of(cfg)]

        params = TuningParams(population=10, generations=2, priority="N",
                              temp_threshold_c=82.0, seed=seed)
        result = tune_phase(STATS, evaluator, space, params)
        any_feasible = any(table[space.index_of(c)].peak_temp_c <= 82.0 for c in seen)
        if any_feasible:
            assert result.feasible
            assert result.best.objectives.peak_temp_c <= 82.0
        else:
            assert not result.feasible


def test_tune_archive_invariants():
    space = _space(n_freqs=5, sizes=(8 * 1024, 16 * 1024), lines=(16, 32), assocs=(1, 2))
    table = _random_table(space, random.Random(3))
    evaluated = []

    def evaluator(cfg):
        evaluated.append(cfg)
        return table[space.index_of(cfg)]

    params = TuningParams(population=8, generations=3, archive_size=4, seed=9)
    result = tune_phase(STATS, evaluator, space, params)
    assert len(result.archive) <= 4
    assert any(e.config == result.best.config for e in result.archive)
    # the front is exactly the non-dominated subset of everything evaluated
    all_evals = [Evaluation(c, table[space.index_of(c)], space.index_of(c)) for c in set(evaluated)]
    want = sorted(non_dominated(all_evals), key=lambda e: e.index)
    assert [e.index for e in result.front] == [e.index for e in want]


def test_tune_seeds_archive_from_most_similar_phase():
    space = _space(n_freqs=3)
    table = _random_table(space, random.Random(14))
    history = PhaseHistoryTable()
    seed_evals = [Evaluation(space.config_at(i), table[i], i) for i in (0, 2, 4)]
    history.store(0, PhaseHistoryEntry(PhaseStats(0.05, 0.1, 2.0), seed_evals,
                                       seed_evals[0].config))
    history.store(1, PhaseHistoryEntry(PhaseStats(0.9, 0.9, 0.1),
                                       [seed_evals[1]], seed_evals[1].config))
    calls = []

    def evaluator(cfg):
        calls.append(cfg)
        return table[space.index_of(cfg)]

    params = TuningParams(population=4, generations=2, seed=5)
    result = tune_phase(STATS, evaluator, space, params, history=history)
    # the similar phase's 3 archive configs are re-evaluated for this phase
    assert {space.index_of(c) for c in calls} >= {0, 2, 4}
    assert result.evaluations_performed <= 4 * 2 + 3


def test_tune_evaluator_failure_reports_phase_and_config():
    space = _space(n_freqs=2)

    def evaluator(cfg):
        raise RuntimeError("boom")

    with pytest.raises(TuningError) as exc:
        tune_phase(STATS, evaluator, space, TuningParams(seed=1), phase_id=7)
    assert exc.value.phase_id == 7
    assert exc.value.config is not None


def test_tune_full_coverage_returns_priority_optimum():
    space = _space(n_freqs=2, sizes=(8 * 1024, 16 * 1024), lines=(16, 32), assocs=(1, 2))
    n = len(space)
    table = _random_table(space, random.Random(77))

    def evaluator(cfg):
        return table[space.index_of(cfg)]

    for q, key in (("S", lambda v: v.edp()), ("N", lambda v: v.energy_j),
                   ("T", lambda v: v.peak_temp_c), ("X", lambda v: v.exec_time_s)):
        params = TuningParams(population=n, generations=1, archive_size=5, priority=q, seed=4)
        result = tune_phase(STATS, evaluator, space, params)
        assert result.evaluations_performed == n
        assert key(result.best.objectives) == min(key(v) for v in table)
