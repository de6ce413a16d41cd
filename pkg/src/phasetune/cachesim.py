"""Trace-driven set-associative L1 pair with exact per-set LRU.

Write policy is write-allocate / write-back: writes count as accesses and
can miss. L1 connects straight to main memory; eviction traffic is not
modeled (nothing downstream consumes it).
"""

from dataclasses import dataclass

from .errors import ConfigurationError
from .space import CacheConfig
from .trace import KIND_IFETCH, Trace


@dataclass
class CacheStats:
    i_accesses: int = 0
    i_misses: int = 0
    d_accesses: int = 0
    d_misses: int = 0

    @property
    def imr(self) -> float:
        return self.i_misses / self.i_accesses if self.i_accesses else 0.0

    @property
    def dmr(self) -> float:
        return self.d_misses / self.d_accesses if self.d_accesses else 0.0

    @property
    def total_misses(self) -> int:
        return self.i_misses + self.d_misses

    @property
    def total_accesses(self) -> int:
        return self.i_accesses + self.d_accesses

    def add(self, other: "CacheStats") -> "CacheStats":
        return CacheStats(
            self.i_accesses + other.i_accesses,
            self.i_misses + other.i_misses,
            self.d_accesses + other.d_accesses,
            self.d_misses + other.d_misses,
        )


class _Cache:
    """One set-associative cache. Each set is a tag list, MRU at the end."""

    __slots__ = ("line_shift", "set_mask", "ways", "sets")

    def __init__(self, config: CacheConfig):
        if not config.geometry_ok():
            raise ConfigurationError(f"invalid cache geometry: {config}")
        self.line_shift = config.line_bytes.bit_length() - 1
        self.set_mask = config.set_count - 1
        self.ways = config.assoc_ways
        self.sets = [[] for _ in range(config.set_count)]

    def reset(self) -> None:
        for s in self.sets:
            s.clear()

    def run(self, addrs: list[int]) -> int:
        """Feed addresses through; returns miss count."""
        misses = 0
        shift = self.line_shift
        mask = self.set_mask
        ways = self.ways
        sets = self.sets
        for addr in addrs:
            block = addr >> shift
            s = sets[block & mask]
            try:
                s.remove(block)
                s.append(block)
            except ValueError:
                misses += 1
                s.append(block)
                if len(s) > ways:
                    del s[0]
        return misses


class CachePairSim:
    """Mutable simulator instance routing fetches to icache, data to dcache."""

    def __init__(self, icache: CacheConfig, dcache: CacheConfig):
        self.icache = _Cache(icache)
        self.dcache = _Cache(dcache)

    def reset(self) -> None:
        self.icache.reset()
        self.dcache.reset()

    def run(self, kinds: list[int], addrs: list[int]) -> CacheStats:
        """Simulate one segment, reusing whatever cache state is present."""
        i_addrs: list[int] = []
        d_addrs: list[int] = []
        iap = i_addrs.append
        dap = d_addrs.append
        for k, a in zip(kinds, addrs):
            if k == KIND_IFETCH:
                iap(a)
            else:
                dap(a)
        # Interleaving between the two caches does not matter: they share
        # no state, so per-cache access order alone fixes the outcome.
        i_misses = self.icache.run(i_addrs)
        d_misses = self.dcache.run(d_addrs)
        return CacheStats(len(i_addrs), i_misses, len(d_addrs), d_misses)


def simulate(kinds: list[int], addrs: list[int], icache: CacheConfig, dcache: CacheConfig,
             cold_start: bool = True, sim: CachePairSim | None = None) -> CacheStats:
    """One-shot segment simulation; pass sim with cold_start=False to reuse state."""
    if sim is None:
        sim = CachePairSim(icache, dcache)
    elif cold_start:
        sim.reset()
    return sim.run(kinds, addrs)


def stats_per_interval(trace: Trace, intervals, icache: CacheConfig,
                       dcache: CacheConfig) -> list[CacheStats]:
    """Per-interval stats with cache state persisting across boundaries."""
    sim = CachePairSim(icache, dcache)
    out = []
    for iv in intervals:
        kinds, addrs = iv.slice_of(trace)
        out.append(sim.run(kinds, addrs))
    return out
