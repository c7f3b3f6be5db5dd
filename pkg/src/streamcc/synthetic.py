"""Deterministic synthetic models and event streams for experiments.

The reference model is a cyclic sequence of uniquely labeled steps, so
conformant traces of any length exist and every deviation stays local.
Streams interleave a configurable number of concurrently open cases and
inject bounded, well-separated noise edits per case.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import datetime, timedelta

from .petri import PetriNet
from .streams import Event, EventLog

ALIEN_ACTIVITY = "ZZ"  # never part of a generated model's alphabet

NOISE_KINDS = ("alien", "skip", "duplicate", "swap")


def cyclic_sequence_net(steps: int = 10, label_prefix: str = "A") -> PetriNet:
    """A cycle of ``steps`` uniquely labeled transitions.

    Transition ``t<i>`` (label ``<prefix><i>``) moves the token from place
    ``s<i>`` to ``s<i+1 mod steps>``; the initial and final markings both
    put one token on ``s0``, completed laps end where they started.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    places = [f"s{i}" for i in range(steps)]
    transitions = {f"t{i}": f"{label_prefix}{i}" for i in range(steps)}
    arcs = []
    for i in range(steps):
        arcs.append((f"s{i}", f"t{i}"))
        arcs.append((f"t{i}", f"s{(i + 1) % steps}"))
    return PetriNet.build(
        places=places,
        transitions=transitions,
        arcs=arcs,
        initial={"s0": 1},
        final={"s0": 1},
        name=f"cycle{steps}",
    )


@dataclass(frozen=True)
class StreamSpec:
    """Shape of a generated stream; all randomness comes from the seed."""

    cases: int = 100
    open_cases: int = 10
    base_length: int = 10
    length_jitter: int = 2
    long_fraction: float = 0.0
    long_length: int = 40
    noise_probability: float = 0.3
    max_edits: int = 2
    min_gap: int = 6
    kinds: tuple[str, ...] = ("alien", "skip", "duplicate", "swap")
    model_steps: int = 10
    start: datetime = datetime(2021, 10, 1, 8, 0, 0)
    step_seconds: int = 30

    def __post_init__(self) -> None:
        if self.cases < 1 or self.open_cases < 1:
            raise ValueError("cases and open_cases must be >= 1")
        unknown = set(self.kinds) - set(NOISE_KINDS)
        if unknown:
            raise ValueError(f"unknown noise kinds {sorted(unknown)}")


def _case_trace(spec: StreamSpec, rng: random.Random) -> list[str]:
    if spec.long_fraction > 0 and rng.random() < spec.long_fraction:
        length = max(2, round(rng.gauss(spec.long_length, spec.length_jitter)))
    else:
        length = max(2, round(rng.gauss(spec.base_length, spec.length_jitter / 2)))
    trace = [f"A{i % spec.model_steps}" for i in range(length)]
    if rng.random() >= spec.noise_probability:
        return trace
    edits = rng.randint(1, spec.max_edits)
    positions: list[int] = []
    for _ in range(edits * 4):
        if len(positions) >= edits:
            break
        pos = rng.randrange(0, len(trace) - 1)
        if all(abs(pos - p) >= spec.min_gap for p in positions):
            positions.append(pos)
    for pos in sorted(positions, reverse=True):
        kind = rng.choice(spec.kinds)
        if kind == "alien":
            trace.insert(pos, ALIEN_ACTIVITY)
        elif kind == "skip":
            del trace[pos]
        elif kind == "duplicate":
            trace.insert(pos, trace[pos])
        elif kind == "swap" and pos + 1 < len(trace):
            trace[pos], trace[pos + 1] = trace[pos + 1], trace[pos]
    return trace


def generate_log(spec: StreamSpec, seed: int = 0) -> EventLog:
    """Generate an interleaved event log for ``cyclic_sequence_net(spec.model_steps)``."""
    rng = random.Random(seed)
    width = len(str(spec.cases))
    traces = {
        f"c{str(i).zfill(width)}": _case_trace(spec, rng) for i in range(1, spec.cases + 1)
    }
    backlog = list(traces)
    open_pool: list[str] = []
    cursor: dict[str, int] = {}
    events: list[Event] = []
    clock = spec.start
    while backlog or open_pool:
        while backlog and len(open_pool) < spec.open_cases:
            case = backlog.pop(0)
            open_pool.append(case)
            cursor[case] = 0
        case = rng.choice(open_pool)
        position = cursor[case]
        activity = traces[case][position]
        events.append(Event(len(events) + 1, case, activity, clock))
        clock += timedelta(seconds=spec.step_seconds)
        cursor[case] = position + 1
        if cursor[case] >= len(traces[case]):
            open_pool.remove(case)
    return EventLog(tuple(events))


def peak_concurrent_cases(log: EventLog) -> int:
    """Largest number of cases simultaneously between first and last event."""
    first: dict[str, int] = {}
    last: dict[str, int] = {}
    for position, event in enumerate(log.events):
        first.setdefault(event.case_id, position)
        last[event.case_id] = position
    delta = [0] * (len(log.events) + 1)
    for case, opened in first.items():
        delta[opened] += 1
        delta[last[case] + 1] -= 1
    peak = 0
    current = 0
    for change in delta:
        current += change
        peak = max(peak, current)
    return peak
