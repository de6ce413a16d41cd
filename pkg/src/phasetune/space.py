"""Tunable configuration space: cache geometries x clock frequencies."""

from dataclasses import dataclass
from typing import Callable, Optional

from .errors import ConfigurationError


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True, order=True)
class CacheConfig:
    size_bytes: int
    line_bytes: int
    assoc_ways: int

    @property
    def set_count(self) -> int:
        return self.size_bytes // (self.line_bytes * self.assoc_ways)

    def geometry_ok(self) -> bool:
        """True when size/line/ways are powers of two and yield >= 1 set."""
        if not (_is_pow2(self.size_bytes) and _is_pow2(self.line_bytes) and _is_pow2(self.assoc_ways)):
            return False
        sets = self.size_bytes // (self.line_bytes * self.assoc_ways)
        return sets >= 1 and self.size_bytes % (self.line_bytes * self.assoc_ways) == 0


@dataclass(frozen=True, order=True)
class SystemConfig:
    icache: CacheConfig
    dcache: CacheConfig
    freq_hz: int


# Named cross-product filters a DesignSpaceSpec can opt into. "same_line"
# constrains both caches to a shared line size (27 icache x 9 dcache x 7
# freq = 1701 on the default ranges).
PREDICATES: dict[str, Callable[[SystemConfig], bool]] = {
    "same_line": lambda c: c.icache.line_bytes == c.dcache.line_bytes,
}

DEFAULT_SIZES = (8 * 1024, 16 * 1024, 32 * 1024)
DEFAULT_LINES = (16, 32, 64)
DEFAULT_ASSOCS = (1, 2, 4)
DEFAULT_FREQS = tuple(range(800_000_000, 2_000_000_001, 200_000_000))

BASE_CACHE = CacheConfig(32 * 1024, 64, 4)
BASE_FREQ_HZ = 2_000_000_000


@dataclass
class DesignSpaceSpec:
    sizes: tuple = DEFAULT_SIZES
    lines: tuple = DEFAULT_LINES
    assocs: tuple = DEFAULT_ASSOCS
    freqs: tuple = DEFAULT_FREQS
    predicate: Optional[str] = None
    base: Optional[SystemConfig] = None

    def __post_init__(self):
        for name, values in (("sizes", self.sizes), ("lines", self.lines),
                             ("assocs", self.assocs), ("freqs", self.freqs)):
            if not values:
                raise ConfigurationError(f"design space parameter set '{name}' is empty")
        for name, values in (("sizes", self.sizes), ("lines", self.lines), ("assocs", self.assocs)):
            if any(not _is_pow2(int(v)) for v in values):
                raise ConfigurationError(f"design space '{name}' values must be powers of two: {values}")
        if any(int(f) <= 0 for f in self.freqs):
            raise ConfigurationError("frequencies must be positive")
        if self.predicate is not None and self.predicate not in PREDICATES:
            raise ConfigurationError(f"unknown validity predicate '{self.predicate}'")
        self.sizes = tuple(sorted(int(v) for v in self.sizes))
        self.lines = tuple(sorted(int(v) for v in self.lines))
        self.assocs = tuple(sorted(int(v) for v in self.assocs))
        self.freqs = tuple(sorted(int(v) for v in self.freqs))


def preset(name: str) -> DesignSpaceSpec:
    """Built-in spaces: 'full' (5103 configs) and 'reduced' (1701, shared line size)."""
    if name == "full":
        return DesignSpaceSpec()
    if name == "reduced":
        return DesignSpaceSpec(predicate="same_line")
    raise ConfigurationError(f"unknown design-space preset '{name}'")


def cache_configs(spec: DesignSpaceSpec) -> list[CacheConfig]:
    """All geometrically valid cache configs, in (size, line, ways) order."""
    out = []
    for size in spec.sizes:
        for line in spec.lines:
            for ways in spec.assocs:
                c = CacheConfig(size, line, ways)
                if c.geometry_ok():
                    out.append(c)
    return out


class DesignSpace:
    """Deterministic enumeration of a DesignSpaceSpec with stable indices."""

    def __init__(self, spec: DesignSpaceSpec):
        self.spec = spec
        pred = PREDICATES[spec.predicate] if spec.predicate else None
        caches = cache_configs(spec)
        configs = []
        for ic in caches:
            for dc in caches:
                for f in spec.freqs:
                    cfg = SystemConfig(ic, dc, f)
                    if pred is None or pred(cfg):
                        configs.append(cfg)
        if not configs:
            raise ConfigurationError("design space is empty after applying constraints")
        self._configs = configs
        self._index = {cfg: i for i, cfg in enumerate(configs)}

    def __len__(self) -> int:
        return len(self._configs)

    def __iter__(self):
        return iter(self._configs)

    def config_at(self, index: int) -> SystemConfig:
        return self._configs[index]

    def index_of(self, config: SystemConfig) -> int:
        try:
            return self._index[config]
        except KeyError:
            raise ConfigurationError(f"config not in design space: {config}") from None

    def __contains__(self, config: SystemConfig) -> bool:
        return config in self._index


def enumerate_space(spec: DesignSpaceSpec) -> list[SystemConfig]:
    return list(DesignSpace(spec))


def base_config(spec: DesignSpaceSpec) -> SystemConfig:
    """The fixed reference configuration: spec override or 32K/64B/4-way at 2 GHz."""
    cfg = spec.base or SystemConfig(BASE_CACHE, BASE_CACHE, BASE_FREQ_HZ)
    ok, reason = validate(cfg, spec)
    if not ok:
        raise ConfigurationError(f"base configuration invalid for this space: {reason}")
    return cfg


def validate(config: SystemConfig, spec: DesignSpaceSpec) -> tuple[bool, str]:
    """Check config membership in the spec's sets; returns (ok, reason)."""
    for label, cache in (("icache", config.icache), ("dcache", config.dcache)):
        if cache.size_bytes not in spec.sizes:
            return False, f"{label} size not in spec"
        if cache.line_bytes not in spec.lines:
            return False, f"{label} line size not in spec"
        if not cache.geometry_ok():
            return False, f"{label} set count < 1"
        if cache.assoc_ways not in spec.assocs:
            return False, f"{label} associativity not in spec"
    if config.freq_hz not in spec.freqs:
        return False, "frequency not in spec"
    if spec.predicate and not PREDICATES[spec.predicate](config):
        return False, f"rejected by predicate '{spec.predicate}'"
    return True, "ok"
