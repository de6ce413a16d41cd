"""Memory-access traces: parsing, synthetic generation, interval splitting.

Trace text format, one record per line:

    <I|D> <R|W> <0x-prefixed hex address>

`I` records are instruction fetches and must be reads. Lines starting
with `#` are comments. UTF-8, LF line endings.
"""

import random
from dataclasses import dataclass
from typing import Iterable, NamedTuple, TextIO

from .errors import ConfigurationError, TraceParseError

KIND_IFETCH = 0
KIND_DREAD = 1
KIND_DWRITE = 2

_KIND_NAMES = {KIND_IFETCH: ("I", "R"), KIND_DREAD: ("D", "R"), KIND_DWRITE: ("D", "W")}

DEFAULT_ADDRESS_BITS = 32


class MemAccess(NamedTuple):
    kind: int  # KIND_IFETCH / KIND_DREAD / KIND_DWRITE
    addr: int


class Trace:
    """Immutable access sequence stored as parallel kind/address lists."""

    __slots__ = ("kinds", "addrs")

    def __init__(self, kinds: list[int], addrs: list[int]):
        self.kinds = kinds
        self.addrs = addrs

    def __len__(self) -> int:
        return len(self.kinds)

    def __iter__(self):
        return (MemAccess(k, a) for k, a in zip(self.kinds, self.addrs))

    def instruction_count(self) -> int:
        return sum(1 for k in self.kinds if k == KIND_IFETCH)

    def __eq__(self, other) -> bool:
        return isinstance(other, Trace) and self.kinds == other.kinds and self.addrs == other.addrs


@dataclass(frozen=True)
class Interval:
    """Contiguous [start, stop) slice of a trace."""

    index: int
    start: int
    stop: int
    instruction_count: int

    def slice_of(self, trace: Trace) -> tuple[list[int], list[int]]:
        return trace.kinds[self.start:self.stop], trace.addrs[self.start:self.stop]


def parse_trace(stream: Iterable[str], address_bits: int = DEFAULT_ADDRESS_BITS) -> Trace:
    """One MemAccess per well-formed line; empty stream gives an empty trace."""
    limit = 1 << address_bits
    kinds: list[int] = []
    addrs: list[int] = []
    for line_no, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise TraceParseError(f"expected 3 fields, got {len(parts)}", line_no)
        kind, rw, addr_s = parts
        if kind not in ("I", "D"):
            raise TraceParseError(f"invalid access kind {kind!r}", line_no)
        if rw not in ("R", "W"):
            raise TraceParseError(f"invalid read/write flag {rw!r}", line_no)
        if kind == "I" and rw != "R":
            raise TraceParseError("instruction fetch must be a read", line_no)
        if not addr_s.lower().startswith("0x"):
            raise TraceParseError(f"address must be 0x-prefixed hex: {addr_s!r}", line_no)
        try:
            addr = int(addr_s, 16)
        except ValueError:
            raise TraceParseError(f"bad hex address {addr_s!r}", line_no) from None
        if addr < 0 or addr >= limit:
            raise TraceParseError(f"address {addr_s} outside {address_bits}-bit range", line_no)
        if kind == "I":
            kinds.append(KIND_IFETCH)
        else:
            kinds.append(KIND_DREAD if rw == "R" else KIND_DWRITE)
        addrs.append(addr)
    return Trace(kinds, addrs)


def serialize_trace(trace: Trace, stream: TextIO) -> None:
    for k, a in zip(trace.kinds, trace.addrs):
        kind, rw = _KIND_NAMES[k]
        stream.write(f"{kind} {rw} 0x{a:x}\n")


@dataclass
class SegmentSpec:
    """One synthetic-phase segment: a code loop plus strided/random data traffic."""

    instructions: int
    working_set_bytes: int
    stride_bytes: int = 16
    code_bytes: int = 4096
    data_every: int = 2      # one data access per this many instructions
    write_every: int = 4     # every Nth data access is a write
    jump_prob: float = 0.1   # chance a data access jumps to a random spot in the working set

    def __post_init__(self):
        if self.instructions <= 0:
            raise ConfigurationError("segment instruction count must be positive")
        if self.working_set_bytes <= 0:
            raise ConfigurationError("segment working set must be positive")
        if self.stride_bytes <= 0 or self.code_bytes <= 0:
            raise ConfigurationError("segment stride and code size must be positive")


CODE_BASE = 0x0010_0000
DATA_BASE = 0x1000_0000


def generate_synthetic(script: list[SegmentSpec], seed: int) -> Trace:
    """Deterministic trace for (script, seed); empty script gives an empty trace."""
    rng = random.Random(seed)
    kinds: list[int] = []
    addrs: list[int] = []
    for seg in script:
        pos = 0
        data_count = 0
        for i in range(seg.instructions):
            kinds.append(KIND_IFETCH)
            addrs.append(CODE_BASE + (i * 4) % seg.code_bytes)
            if i % seg.data_every == 0:
                if rng.random() < seg.jump_prob:
                    pos = rng.randrange(seg.working_set_bytes)
                else:
                    pos = (pos + seg.stride_bytes) % seg.working_set_bytes
                data_count += 1
                write = data_count % seg.write_every == 0
                kinds.append(KIND_DWRITE if write else KIND_DREAD)
                addrs.append(DATA_BASE + pos)
    return Trace(kinds, addrs)


def segments_from_dicts(raw: list[dict]) -> list[SegmentSpec]:
    return [SegmentSpec(**d) for d in raw]


def split_intervals(trace: Trace, interval_instructions: int) -> list[Interval]:
    """Tile the trace into intervals of exactly N instruction fetches (last may be short).

    An interval closes right after its Nth fetch; a fetch-free trace is a
    single interval, and a trailing run of data accesses forms a final
    interval with instruction_count 0.
    """
    if interval_instructions <= 0:
        raise ConfigurationError("interval_instructions must be positive")
    if len(trace) == 0:
        return []
    intervals: list[Interval] = []
    start = 0
    instr = 0
    for pos, kind in enumerate(trace.kinds):
        if kind == KIND_IFETCH:
            instr += 1
            if instr == interval_instructions:
                intervals.append(Interval(len(intervals), start, pos + 1, instr))
                start = pos + 1
                instr = 0
    if start < len(trace) or not intervals:
        intervals.append(Interval(len(intervals), start, len(trace), instr))
    return intervals
