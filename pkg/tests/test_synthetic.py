from __future__ import annotations

import pytest

from streamcc import (
    ConformanceEngine,
    StreamSpec,
    cyclic_sequence_net,
    generate_log,
    peak_concurrent_cases,
    replay,
)


class TestCyclicSequenceNet:
    def test_structure(self):
        net = cyclic_sequence_net(4)
        assert len(net.places) == 4
        assert len(net.transitions) == 4
        assert net.label("t2") == "A2"
        assert net.initial_marking == net.final_marking

    def test_conformant_laps(self):
        net = cyclic_sequence_net(4)
        marking = net.initial_marking
        for i in range(8):  # two full laps
            marking = net.fire(marking, f"t{i % 4}")
        assert net.is_final(marking)

    def test_rejects_tiny(self):
        with pytest.raises(ValueError):
            cyclic_sequence_net(1)


class TestGenerateLog:
    def test_deterministic_for_seed(self):
        spec = StreamSpec(cases=20, open_cases=5)
        a = generate_log(spec, seed=3)
        b = generate_log(spec, seed=3)
        assert a == b
        c = generate_log(spec, seed=4)
        assert a != c

    def test_noise_free_stream_is_fully_conformant(self):
        spec = StreamSpec(cases=15, open_cases=4, noise_probability=0.0)
        log = generate_log(spec, seed=1)
        net = cyclic_sequence_net(10)
        engine = ConformanceEngine(net)
        outcomes = list(engine.process_stream(replay(log)))
        assert all(o.effective_cost == 0 for o in outcomes)
        assert engine.search_count == 0

    def test_noisy_stream_has_nonconformant_cases(self):
        spec = StreamSpec(cases=30, open_cases=6, noise_probability=0.8)
        log = generate_log(spec, seed=2)
        net = cyclic_sequence_net(10)
        engine = ConformanceEngine(net)
        outcomes = list(engine.process_stream(replay(log)))
        assert any(o.effective_cost > 0 for o in outcomes)

    def test_open_case_pool_is_respected(self):
        spec = StreamSpec(cases=50, open_cases=12, noise_probability=0.0)
        log = generate_log(spec, seed=5)
        assert peak_concurrent_cases(log) >= 12

    def test_timestamps_strictly_increase(self):
        log = generate_log(StreamSpec(cases=10, open_cases=3), seed=6)
        stamps = [e.timestamp for e in log.events]
        assert stamps == sorted(stamps)
        assert len(set(stamps)) == len(stamps)

    def test_long_fraction_creates_tail(self):
        spec = StreamSpec(
            cases=60, open_cases=10, long_fraction=0.2, long_length=40, noise_probability=0.0
        )
        log = generate_log(spec, seed=7)
        lengths = {}
        for event in log.events:
            lengths[event.case_id] = lengths.get(event.case_id, 0) + 1
        assert max(lengths.values()) >= 30

    def test_rejects_unknown_noise_kind(self):
        with pytest.raises(ValueError):
            StreamSpec(kinds=("alien", "chaos"))
