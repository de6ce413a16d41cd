"""Command-line front end.

Subcommands: enumerate, tune, exhaustive, baseline, sweep-temp,
sweep-params, compare. Exit codes: 0 success, 1 runtime failure,
2 usage/config error. Outputs are byte-identical for identical config
and seed.
"""

import argparse
import json
import os
import sys
from dataclasses import asdict

from . import experiment, report, runtime, trace as trace_mod
from .config import ExperimentConfig, load_config
from .errors import ConfigurationError, PhasetuneError, TraceParseError
from .optimizer import PRIORITIES, select_best
from .phase import PhaseHistoryTable, config_to_dict
from .runtime import SegmentEvaluator
from .space import base_config
from .thermal import write_series_csv

ENV_OUT = "PHASETUNE_OUT"
ENV_JOBS = "PHASETUNE_JOBS"


def _out_dir(args, cfg: ExperimentConfig) -> str:
    out = args.out or os.environ.get(ENV_OUT) or cfg.output_dir
    os.makedirs(out, exist_ok=True)
    return out


def _jobs(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    return max(1, int(os.environ.get(ENV_JOBS, "1")))


def _apply_overrides(cfg: ExperimentConfig, args) -> None:
    if getattr(args, "priority", None):
        cfg.tuning.priority = args.priority
    if getattr(args, "threshold", None) is not None:
        cfg.tuning.temp_threshold_c = args.threshold
    if getattr(args, "seed", None) is not None:
        cfg.tuning.seed = args.seed


def _build_trace(cfg: ExperimentConfig, args) -> trace_mod.Trace:
    path = getattr(args, "trace", None)
    synthetic = getattr(args, "synthetic", None)
    if path and synthetic:
        raise ConfigurationError("give either --trace or --synthetic, not both")
    if path:
        with open(path, encoding="utf-8") as fh:
            return trace_mod.parse_trace(fh)
    if synthetic:
        with open(synthetic, encoding="utf-8") as fh:
            script = trace_mod.segments_from_dicts(json.load(fh))
        return trace_mod.generate_synthetic(script, cfg.trace.seed)
    if cfg.trace.file:
        with open(cfg.trace.file, encoding="utf-8") as fh:
            return trace_mod.parse_trace(fh)
    if cfg.trace.synthetic:
        return trace_mod.generate_synthetic(cfg.trace.synthetic, cfg.trace.seed)
    raise ConfigurationError("no trace source: pass --trace/--synthetic or set the config trace block")


def _resolved_doc(cfg: ExperimentConfig) -> dict:
    spec = cfg.space_spec
    return {
        "schema_version": 1,
        "space": {
            "sizes": list(spec.sizes), "lines": list(spec.lines),
            "assocs": list(spec.assocs), "freqs": list(spec.freqs),
            "predicate": spec.predicate,
            "base": config_to_dict(spec.base) if spec.base else None,
        },
        "timing": asdict(cfg.timing),
        "energy": asdict(cfg.energy),
        "thermal": asdict(cfg.thermal),
        "tuning": asdict(cfg.tuning),
        "overhead": asdict(cfg.overhead),
        "phase": {"theta": cfg.theta, "interval_instructions": cfg.interval_instructions},
        "output_dir": cfg.output_dir,
    }


def _whole_trace_evaluator(cfg: ExperimentConfig, tr: trace_mod.Trace) -> SegmentEvaluator:
    return SegmentEvaluator(tr.kinds, tr.addrs, tr.instruction_count(),
                            cfg.timing, cfg.energy, cfg.thermal)


def _write(path: str, writer) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer(fh)


def cmd_enumerate(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    path = os.path.join(out, "space.csv")
    _write(path, lambda fh: report.write_space_csv(cfg.space, fh))
    print(f"{len(cfg.space)} configurations -> {path}")
    return 0


def cmd_tune(args) -> int:
    cfg = load_config(args.config)
    _apply_overrides(cfg, args)
    tr = _build_trace(cfg, args)
    out = _out_dir(args, cfg)

    history = PhaseHistoryTable()
    if args.history and os.path.exists(args.history):
        with open(args.history, encoding="utf-8") as fh:
            history = PhaseHistoryTable.from_json(fh)

    rep = runtime.run(tr, cfg.space, timing=cfg.timing, energy_params=cfg.energy,
                      thermal_params=cfg.thermal, tuning=cfg.tuning,
                      overheads=cfg.overhead, theta=cfg.theta,
                      interval_instructions=cfg.interval_instructions, history=history)

    doc = report.run_report_to_doc(rep, _resolved_doc(cfg))
    _write(os.path.join(out, "report.json"), lambda fh: report.write_json(doc, fh))
    _write(os.path.join(out, "phases.csv"), lambda fh: report.write_phases_csv(rep, fh))
    _write(os.path.join(out, "temperature.csv"),
           lambda fh: write_series_csv(rep.temperature_samples, fh))
    if args.history:
        _write(args.history, history.to_json)

    t = doc["totals"]
    print(f"phases={len(rep.phases)} evaluations={t['evaluations_performed']} "
          f"exec_time_s={t['execution_time_s']:.6g} energy_j={t['total_energy_j']:.6g} "
          f"peak_temp_c={t['peak_temp_c']:.4f} overhead_s={t['tuning_overhead_s']:.6g}")
    if rep.failed:
        print(f"tuning failed: {rep.error}", file=sys.stderr)
        return 1
    return 0


def cmd_exhaustive(args) -> int:
    cfg = load_config(args.config)
    _apply_overrides(cfg, args)
    tr = _build_trace(cfg, args)
    out = _out_dir(args, cfg)
    evaluator = _whole_trace_evaluator(cfg, tr)
    front = experiment.exhaustive_pareto(evaluator, cfg.space, jobs=_jobs(args))
    best_per_priority = {}
    for q in PRIORITIES:
        best, _ = select_best(front, q, cfg.tuning.temp_threshold_c)
        best_per_priority[q] = report.evaluation_doc(best)
    doc = {
        "schema_version": 1,
        "config": _resolved_doc(cfg),
        "evaluations": len(cfg.space),
        "front": [report.evaluation_doc(ev) for ev in front],
        "best_per_priority": best_per_priority,
    }
    _write(os.path.join(out, "exhaustive.json"), lambda fh: report.write_json(doc, fh))
    _write(os.path.join(out, "pareto.csv"), lambda fh: report.write_front_csv(front, fh))
    print(f"front size {len(front)} of {len(cfg.space)} configurations")
    return 0


def cmd_baseline(args) -> int:
    cfg = load_config(args.config)
    _apply_overrides(cfg, args)
    tr = _build_trace(cfg, args)
    out = _out_dir(args, cfg)
    evaluator = _whole_trace_evaluator(cfg, tr)
    best, feasible, count = experiment.baseline(args.kind, evaluator, cfg.space,
                                                cfg.tuning.priority,
                                                cfg.tuning.temp_threshold_c)
    doc = {
        "schema_version": 1,
        "config": _resolved_doc(cfg),
        "kind": args.kind,
        "priority": cfg.tuning.priority,
        "evaluations": count,
        "feasible": feasible,
        "best": report.evaluation_doc(best),
    }
    name = f"baseline_{args.kind.replace('-', '_')}.json"
    _write(os.path.join(out, name), lambda fh: report.write_json(doc, fh))
    o = best.objectives
    print(f"{args.kind}: {count} evaluations, best config index {best.index}, "
          f"time={o.exec_time_s:.6g}s energy={o.energy_j:.6g}J temp={o.peak_temp_c:.4f}C")
    return 0


def cmd_sweep_temp(args) -> int:
    cfg = load_config(args.config)
    tr = _build_trace(cfg, args)
    out = _out_dir(args, cfg)
    evaluator = _whole_trace_evaluator(cfg, tr)
    rows, ranking = experiment.temp_impact_sweep(evaluator, cfg.space_spec)

    def writer(fh):
        import csv
        w = csv.writer(fh)
        w.writerow(["parameter", "value", "peak_temp_c", "delta_c"])
        for r in rows:
            w.writerow([r.parameter, r.value if r.value is not None else "",
                        repr(r.peak_temp_c), repr(r.delta_c)])
        for param, delta in experiment.REFERENCE_IMPACT_C:
            w.writerow(["reference", param, "", repr(delta)])

    path = os.path.join(out, "sweep_temp.csv")
    _write(path, writer)
    print(f"measured impact ranking: {' > '.join(ranking)}")
    ref = " > ".join(p for p, _ in experiment.REFERENCE_IMPACT_C)
    deltas = ", ".join(f"{p}={d}C" for p, d in experiment.REFERENCE_IMPACT_C)
    print(f"reference ranking (not asserted): {ref} ({deltas})")
    print(f"table -> {path}")
    return 0


DEFAULT_GRID = ((5, 1, 5), (10, 2, 5), (20, 3, 5), (30, 3, 5), (40, 5, 5))


def _parse_grid(text: str):
    grid = []
    for part in text.split(";"):
        s, g, a = (int(v) for v in part.split(","))
        grid.append((s, g, a))
    return grid


def cmd_sweep_params(args) -> int:
    cfg = load_config(args.config)
    _apply_overrides(cfg, args)
    tr = _build_trace(cfg, args)
    out = _out_dir(args, cfg)
    grid = _parse_grid(args.grid) if args.grid else list(DEFAULT_GRID)

    # characterize the dominant phase (most member intervals, lowest id on ties)
    intervals = trace_mod.split_intervals(tr, cfg.interval_instructions)
    base = base_config(cfg.space_spec)
    stats_list, weights = runtime._interval_phase_stats(tr, intervals, base, cfg.timing)
    phases = runtime.classify(stats_list, cfg.theta, cfg.timing.issue_width, weights)
    dominant = max(phases, key=lambda p: (len(p.member_intervals), -p.id))
    first = dominant.member_intervals[0]
    seg = intervals[first]
    evaluator = SegmentEvaluator(tr.kinds[seg.start:seg.stop], tr.addrs[seg.start:seg.stop],
                                 seg.instruction_count, cfg.timing, cfg.energy, cfg.thermal)

    rows = experiment.param_sweep(dominant.stats, evaluator, cfg.space, grid,
                                  seed=cfg.tuning.seed,
                                  char_interval_s=cfg.overhead.char_interval_s)

    def writer(fh):
        import csv
        w = csv.writer(fh)
        w.writerow(["population", "generations", "archive_size", "evaluations",
                    "budget_pct", "edp", "overhead_s"])
        for r in rows:
            w.writerow([r.population, r.generations, r.archive_size, r.evaluations,
                        repr(r.budget_pct), repr(r.edp), repr(r.overhead_s)])

    path = os.path.join(out, "sweep_params.csv")
    _write(path, writer)
    print(f"{len(rows)} parameter triples -> {path}")
    return 0


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    with open(args.run, encoding="utf-8") as fh:
        run_doc = json.load(fh)
    with open(args.against, encoding="utf-8") as fh:
        ref_doc = json.load(fh)
    priority = run_doc.get("config", {}).get("tuning", {}).get("priority", "S")
    run_totals = report.totals_from_doc(run_doc, priority)
    ref_totals = report.totals_from_doc(ref_doc, priority)
    ratios = {k: (run_totals[k] / ref_totals[k] if ref_totals[k] else float("inf"))
              for k in run_totals}
    doc = {"schema_version": 1, "priority": priority, "run": run_totals,
           "reference": ref_totals, "ratios": ratios}
    _write(os.path.join(out, "compare.json"), lambda fh: report.write_json(doc, fh))
    for k in sorted(ratios):
        print(f"{k}: {ratios[k]:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasetune",
        description="Trace-driven phase tuning over cache geometry and clock frequency")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tracey=True):
        p.add_argument("--config", help="experiment config JSON (defaults apply if omitted)")
        p.add_argument("--out", help=f"output directory (or ${ENV_OUT})")
        p.add_argument("--jobs", type=int, help=f"worker processes (or ${ENV_JOBS})")
        if tracey:
            p.add_argument("--trace", help="trace file")
            p.add_argument("--synthetic", help="synthetic segment script JSON")
            p.add_argument("--priority", choices=PRIORITIES)
            p.add_argument("--threshold", type=float, help="peak temperature ceiling, deg C")
            p.add_argument("--seed", type=int)

    p = sub.add_parser("enumerate", help="list the design space")
    common(p, tracey=False)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("tune", help="phase-tune a trace")
    common(p)
    p.add_argument("--history", help="phase history JSON, read if present and persisted")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("exhaustive", help="evaluate every configuration")
    common(p)
    p.set_defaults(func=cmd_exhaustive)

    p = sub.add_parser("baseline", help="single-knob exhaustive baseline")
    common(p)
    p.add_argument("--kind", choices=experiment.BASELINE_KINDS, required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("sweep-temp", help="per-parameter temperature impact")
    common(p)
    p.set_defaults(func=cmd_sweep_temp)

    p = sub.add_parser("sweep-params", help="tuner budget/quality sweep")
    common(p)
    p.add_argument("--grid", help="semicolon-separated population,generations,archive triples")
    p.set_defaults(func=cmd_sweep_params)

    p = sub.add_parser("compare", help="normalized ratios between two reports")
    common(p, tracey=False)
    p.add_argument("--run", required=True, help="tune report JSON")
    p.add_argument("--against", required=True, help="reference report JSON")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, TraceParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PhasetuneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
