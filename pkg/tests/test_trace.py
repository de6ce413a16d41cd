import io

import pytest

from phasetune.cachesim import CachePairSim
from phasetune.errors import ConfigurationError, TraceParseError
from phasetune.space import CacheConfig
from phasetune.trace import (KIND_DREAD, KIND_DWRITE, KIND_IFETCH, SegmentSpec,
                             Trace, generate_synthetic, parse_trace,
                             serialize_trace, split_intervals)


def test_parse_single_record():
    tr = parse_trace(io.StringIO("I R 0x400000\n"))
    assert tr.kinds == [KIND_IFETCH] and tr.addrs == [0x400000]


def test_parse_order_preserved():
    tr = parse_trace(io.StringIO("D W 0x10\nD R 0x10\n"))
    assert tr.kinds == [KIND_DWRITE, KIND_DREAD]
    assert tr.addrs == [0x10, 0x10]


def test_parse_invalid_kind_reports_line():
    with pytest.raises(TraceParseError) as exc:
        parse_trace(io.StringIO("X R 0x10\n"))
    assert exc.value.line_no == 1


def test_parse_error_line_number_skips_comments():
    with pytest.raises(TraceParseError) as exc:
        parse_trace(io.StringIO("# header\nI R 0x4\nI W 0x8\n"))
    assert exc.value.line_no == 3


def test_parse_empty_stream_is_empty_trace():
    assert len(parse_trace(io.StringIO(""))) == 0


def test_parse_rejects_wide_address():
    with pytest.raises(TraceParseError):
        parse_trace(io.StringIO("D R 0x100000000\n"))  # 2^32, out of 32-bit range


def test_parse_rejects_bad_hex():
    with pytest.raises(TraceParseError):
        parse_trace(io.StringIO("D R 0xZZ\n"))


def test_round_trip():
    text = "I R 0x400000\nD W 0x10\nD R 0xfff0\n"
    tr = parse_trace(io.StringIO(text))
    out = io.StringIO()
    serialize_trace(tr, out)
    assert out.getvalue() == text
    assert parse_trace(io.StringIO(out.getvalue())) == tr


def _alternating_trace(n_instr: int) -> Trace:
    # I fetch, then a data read after every fetch
    kinds, addrs = [], []
    for i in range(n_instr):
        kinds.append(KIND_IFETCH)
        addrs.append(0x1000 + 4 * i)
        kinds.append(KIND_DREAD)
        addrs.append(0x2000 + 4 * i)
    return Trace(kinds, addrs)


def test_split_250_instructions_by_100():
    tr = _alternating_trace(250)
    ivs = split_intervals(tr, 100)
    assert [iv.instruction_count for iv in ivs] == [100, 100, 50]
    # concatenation reproduces the trace
    assert [a for iv in ivs for a in iv.slice_of(tr)[1]] == tr.addrs
    assert ivs[0].stop == ivs[1].start and ivs[1].stop == ivs[2].start


def test_split_interval_larger_than_trace():
    tr = _alternating_trace(30)
    ivs = split_intervals(tr, 1000)
    assert len(ivs) == 1 and ivs[0].instruction_count == 30


def test_split_no_instruction_fetches():
    tr = Trace([KIND_DREAD] * 5, list(range(5)))
    ivs = split_intervals(tr, 100)
    assert len(ivs) == 1
    assert ivs[0].instruction_count == 0
    assert ivs[0].stop - ivs[0].start == 5


def test_split_trailing_data_accesses_form_final_interval():
    kinds = [KIND_IFETCH, KIND_IFETCH, KIND_DREAD, KIND_DREAD]
    tr = Trace(kinds, [0, 4, 8, 12])
    ivs = split_intervals(tr, 2)
    assert len(ivs) == 2
    assert ivs[0].instruction_count == 2 and ivs[1].instruction_count == 0
    assert sum(iv.stop - iv.start for iv in ivs) == len(tr)


def test_split_rejects_nonpositive_interval():
    with pytest.raises(ConfigurationError):
        split_intervals(_alternating_trace(5), 0)


def test_synthetic_deterministic():
    script = [SegmentSpec(instructions=100_000, working_set_bytes=4096)]
    assert generate_synthetic(script, 7) == generate_synthetic(script, 7)


def test_synthetic_seed_changes_output():
    script = [SegmentSpec(instructions=10_000, working_set_bytes=4096)]
    assert generate_synthetic(script, 7) != generate_synthetic(script, 8)


def test_synthetic_empty_script():
    assert len(generate_synthetic([], 7)) == 0


def test_synthetic_zero_length_segment_rejected():
    with pytest.raises(ConfigurationError):
        SegmentSpec(instructions=0, working_set_bytes=4096)


def test_synthetic_working_sets_separate_miss_rates():
    # 64 KB working set misses more than 4 KB under a 32 KB dcache
    script = [SegmentSpec(instructions=50_000, working_set_bytes=4 * 1024),
              SegmentSpec(instructions=50_000, working_set_bytes=64 * 1024)]
    tr = generate_synthetic(script, 7)
    icfg = dcfg = CacheConfig(32 * 1024, 64, 4)
    split = len(tr.kinds) // 2  # segments are equal-length by construction
    seg1 = Trace(tr.kinds[:split], tr.addrs[:split])
    seg2 = Trace(tr.kinds[split:], tr.addrs[split:])
    sim = CachePairSim(icfg, dcfg)
    s1 = sim.run(seg1.kinds, seg1.addrs)
    s2 = sim.run(seg2.kinds, seg2.addrs)
    assert s2.dmr > s1.dmr


def test_synthetic_segments_have_equal_access_counts():
    # data accesses are emitted on a fixed instruction cadence
    script = [SegmentSpec(instructions=50_000, working_set_bytes=4 * 1024),
              SegmentSpec(instructions=50_000, working_set_bytes=64 * 1024)]
    tr = generate_synthetic(script, 7)
    assert tr.instruction_count() == 100_000
    assert len(tr) % 2 == 0
