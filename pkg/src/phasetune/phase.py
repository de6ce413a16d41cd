"""Phase classification, the phase distance metric, and the history table."""

import json
import math
from dataclasses import dataclass, field
from typing import Optional, TextIO

from .errors import PhasetuneError
from .models import ObjectiveVector
from .space import CacheConfig, SystemConfig

DEFAULT_THETA = 0.1


@dataclass(frozen=True)
class PhaseStats:
    imr: float
    dmr: float
    ipc: float  # raw, up to issue width


@dataclass
class Phase:
    id: int
    stats: PhaseStats              # weighted centroid over member intervals
    member_intervals: list[int] = field(default_factory=list)


def phase_distance(a: PhaseStats, b: PhaseStats, issue_width: float = 4.0) -> float:
    """Euclidean distance over (imr, dmr, ipc/issue_width)."""
    di = a.imr - b.imr
    dd = a.dmr - b.dmr
    dp = (a.ipc - b.ipc) / issue_width
    return math.sqrt(di * di + dd * dd + dp * dp)


def classify(interval_stats: list[PhaseStats], theta: float = DEFAULT_THETA,
             issue_width: float = 4.0, weights: Optional[list[float]] = None) -> list[Phase]:
    """Leader clustering: join the nearest phase within theta, else found a new one.

    Centroids update incrementally as weighted means (weights default to 1,
    the runtime passes interval access counts). Deterministic in input order.
    """
    if theta < 0:
        raise PhasetuneError("theta must be >= 0")
    if weights is None:
        weights = [1.0] * len(interval_stats)
    phases: list[Phase] = []
    # accumulators: weighted sums per phase
    sums: list[tuple[float, float, float, float]] = []
    for idx, stats in enumerate(interval_stats):
        best = None
        best_d = None
        for p in phases:
            d = phase_distance(stats, p.stats, issue_width)
            if best_d is None or d < best_d:
                best, best_d = p, d
        if best is not None and best_d <= theta:
            w_imr, w_dmr, w_ipc, w = sums[best.id]
            w_new = weights[idx]
            w_imr += stats.imr * w_new
            w_dmr += stats.dmr * w_new
            w_ipc += stats.ipc * w_new
            w += w_new
            sums[best.id] = (w_imr, w_dmr, w_ipc, w)
            best.stats = PhaseStats(w_imr / w, w_dmr / w, w_ipc / w)
            best.member_intervals.append(idx)
        else:
            w = weights[idx]
            phases.append(Phase(len(phases), stats, [idx]))
            sums.append((stats.imr * w, stats.dmr * w, stats.ipc * w, w))
    return phases


@dataclass
class PhaseHistoryEntry:
    stats: PhaseStats
    archive: list  # of optimizer.Evaluation
    best_config: SystemConfig

    def __post_init__(self):
        if all(ev.config != self.best_config for ev in self.archive):
            raise PhasetuneError("best_config is not a member of the stored archive")


class PhaseHistoryTable:
    """Phase id -> (stats, archive, best config); single writer, JSON-persistable."""

    def __init__(self):
        self.entries: dict[int, PhaseHistoryEntry] = {}

    def __len__(self) -> int:
        return len(self.entries)

    def next_id(self) -> int:
        return max(self.entries, default=-1) + 1

    def store(self, phase_id: int, entry: PhaseHistoryEntry) -> None:
        self.entries[phase_id] = entry  # last writer wins

    def lookup(self, phase_id: int) -> Optional[PhaseHistoryEntry]:
        return self.entries.get(phase_id)

    def most_similar(self, stats: PhaseStats, issue_width: float = 4.0):
        """(phase_id, entry, distance) minimizing the phase distance; ties -> lowest id."""
        best = None
        for pid in sorted(self.entries):
            d = phase_distance(stats, self.entries[pid].stats, issue_width)
            if best is None or d < best[2]:
                best = (pid, self.entries[pid], d)
        return best

    def to_json(self, stream: TextIO) -> None:
        doc = {"schema_version": 1, "phases": []}
        for pid in sorted(self.entries):
            e = self.entries[pid]
            doc["phases"].append({
                "id": pid,
                "stats": {"imr": e.stats.imr, "dmr": e.stats.dmr, "ipc": e.stats.ipc},
                "archive": [evaluation_to_dict(ev) for ev in e.archive],
                "best_config": config_to_dict(e.best_config),
            })
        json.dump(doc, stream, indent=2, sort_keys=True)
        stream.write("\n")

    @classmethod
    def from_json(cls, stream: TextIO) -> "PhaseHistoryTable":
        from .optimizer import Evaluation

        doc = json.load(stream)
        table = cls()
        for p in doc.get("phases", []):
            stats = PhaseStats(**p["stats"])
            archive = [
                Evaluation(
                    config=config_from_dict(a["config"]),
                    objectives=ObjectiveVector(**a["objectives"]),
                    index=a["index"],
                )
                for a in p["archive"]
            ]
            table.store(p["id"], PhaseHistoryEntry(stats, archive, config_from_dict(p["best_config"])))
        return table


def config_to_dict(cfg: SystemConfig) -> dict:
    return {
        "icache": {"size_bytes": cfg.icache.size_bytes, "line_bytes": cfg.icache.line_bytes,
                   "assoc_ways": cfg.icache.assoc_ways},
        "dcache": {"size_bytes": cfg.dcache.size_bytes, "line_bytes": cfg.dcache.line_bytes,
                   "assoc_ways": cfg.dcache.assoc_ways},
        "freq_hz": cfg.freq_hz,
    }


def config_from_dict(d: dict) -> SystemConfig:
    return SystemConfig(CacheConfig(**d["icache"]), CacheConfig(**d["dcache"]), d["freq_hz"])


def evaluation_to_dict(ev) -> dict:
    return {
        "config": config_to_dict(ev.config),
        "objectives": {
            "exec_time_s": ev.objectives.exec_time_s,
            "energy_j": ev.objectives.energy_j,
            "peak_temp_c": ev.objectives.peak_temp_c,
        },
        "index": ev.index,
    }
