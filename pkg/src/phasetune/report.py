"""Deterministic JSON/CSV emission for run reports and experiment tables."""

import csv
import json
from typing import TextIO

from .optimizer import Evaluation
from .phase import config_to_dict, evaluation_to_dict
from .runtime import RunReport

PHASE_CSV_FIELDS = [
    "occurrence", "phase_id", "interval_start", "interval_stop", "instructions",
    "reused", "fresh_evaluations", "feasible", "config_index",
    "icache_size", "icache_line", "icache_ways",
    "dcache_size", "dcache_line", "dcache_ways", "freq_hz",
    "exec_time_s", "energy_j", "edp", "peak_temp_c",
]


def run_report_to_doc(report: RunReport, resolved_config: dict) -> dict:
    return {
        "schema_version": 1,
        "config": resolved_config,
        "failed": report.failed,
        "error": report.error,
        "totals": {
            "execution_time_s": report.execution_time_s,
            "total_energy_j": report.total_energy_j,
            "total_edp": report.total_edp,
            "peak_temp_c": report.peak_temp_c,
            "tuning_overhead_s": report.tuning_overhead_s,
            "total_time_s": report.total_time_s,
            "evaluations_performed": report.evaluations_performed,
            "reconfiguration_count": report.reconfiguration_count,
        },
        "phases": [
            {
                "occurrence": p.occurrence,
                "phase_id": p.phase_id,
                "interval_start": p.interval_start,
                "interval_stop": p.interval_stop,
                "instructions": p.instructions,
                "reused": p.reused,
                "fresh_evaluations": p.fresh_evaluations,
                "feasible": p.feasible,
                "config_index": p.config_index,
                "config": config_to_dict(p.config),
                "objectives": {
                    "exec_time_s": p.objectives.exec_time_s,
                    "energy_j": p.objectives.energy_j,
                    "edp": p.objectives.edp(),
                    "peak_temp_c": p.objectives.peak_temp_c,
                },
            }
            for p in report.phases
        ],
    }


def write_json(doc: dict, stream: TextIO) -> None:
    json.dump(doc, stream, indent=2, sort_keys=True)
    stream.write("\n")


def write_phases_csv(report: RunReport, stream: TextIO) -> None:
    w = csv.writer(stream)
    w.writerow(PHASE_CSV_FIELDS)
    for p in report.phases:
        w.writerow([
            p.occurrence, p.phase_id, p.interval_start, p.interval_stop, p.instructions,
            int(p.reused), p.fresh_evaluations, int(p.feasible), p.config_index,
            p.config.icache.size_bytes, p.config.icache.line_bytes, p.config.icache.assoc_ways,
            p.config.dcache.size_bytes, p.config.dcache.line_bytes, p.config.dcache.assoc_ways,
            p.config.freq_hz,
            repr(p.objectives.exec_time_s), repr(p.objectives.energy_j),
            repr(p.objectives.edp()), repr(p.objectives.peak_temp_c),
        ])


def write_space_csv(space, stream: TextIO) -> None:
    w = csv.writer(stream)
    w.writerow(["index", "icache_size", "icache_line", "icache_ways",
                "dcache_size", "dcache_line", "dcache_ways", "freq_hz"])
    for i, cfg in enumerate(space):
        w.writerow([i, cfg.icache.size_bytes, cfg.icache.line_bytes, cfg.icache.assoc_ways,
                    cfg.dcache.size_bytes, cfg.dcache.line_bytes, cfg.dcache.assoc_ways,
                    cfg.freq_hz])


def evaluation_doc(ev: Evaluation) -> dict:
    doc = evaluation_to_dict(ev)
    doc["objectives"]["edp"] = ev.objectives.edp()
    return doc


def write_front_csv(front: list[Evaluation], stream: TextIO) -> None:
    w = csv.writer(stream)
    w.writerow(["config_index", "exec_time_s", "energy_j", "edp", "peak_temp_c"])
    for ev in front:
        w.writerow([ev.index, repr(ev.objectives.exec_time_s), repr(ev.objectives.energy_j),
                    repr(ev.objectives.edp()), repr(ev.objectives.peak_temp_c)])


def totals_from_doc(doc: dict, priority: str) -> dict:
    """(time, energy, edp, temp) out of a tune report, baseline, or exhaustive doc."""
    if "totals" in doc:
        t = doc["totals"]
        return {"exec_time_s": t["execution_time_s"], "energy_j": t["total_energy_j"],
                "edp": t["execution_time_s"] * t["total_energy_j"],
                "peak_temp_c": t["peak_temp_c"]}
    if "best" in doc:
        o = doc["best"]["objectives"]
        return {"exec_time_s": o["exec_time_s"], "energy_j": o["energy_j"],
                "edp": o["edp"], "peak_temp_c": o["peak_temp_c"]}
    if "best_per_priority" in doc:
        o = doc["best_per_priority"][priority]["objectives"]
        return {"exec_time_s": o["exec_time_s"], "energy_j": o["energy_j"],
                "edp": o["edp"], "peak_temp_c": o["peak_temp_c"]}
    raise ValueError("unrecognized report document (no totals/best/best_per_priority)")
