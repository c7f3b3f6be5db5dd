"""Bounded-memory policies for online conformance checking.

One engine processes one event stream sequentially under one of four
policies: the infinite-memory baseline, bounded states per case (limit
w), bounded multi-state cases (limit n, with a summary repository for
forgotten cases), or both limits combined. Forgotten prefixes leave a
summary state behind carrying the marking they reached and their
cumulative cost, so later events of the same case resume from that
position instead of being penalized for the missing prefix.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

from .alignment import (
    AlignmentState,
    DEFAULT_COST_MODEL,
    DEFAULT_SEARCH_BUDGET,
    CostModel,
    EventRef,
    MoveKind,
    PrefixAlignment,
    SummaryState,
    extend_model_semantics,
    shortest_path_prefix_alignment,
)
from .errors import SearchBudgetExceeded
from .petri import ActivityLabel, PetriNet
from .streams import StreamEvent


class Policy(Enum):
    BASELINE = "baseline"
    BOUNDED_STATES = "bounded_states"
    BOUNDED_CASES = "bounded_cases"
    COMBINED = "combined"


class Method(Enum):
    """Which computation produced a prefix-alignment update."""

    MODEL_SEMANTICS = "model-semantics"
    SHORTEST_PATH = "shortest-path"


@dataclass(frozen=True)
class PolicyConfig:
    policy: Policy
    w: int | None = None
    n: int | None = None
    cost_model: CostModel = DEFAULT_COST_MODEL

    def __post_init__(self) -> None:
        needs_w = self.policy in (Policy.BOUNDED_STATES, Policy.COMBINED)
        needs_n = self.policy in (Policy.BOUNDED_CASES, Policy.COMBINED)
        if needs_w and (self.w is None or self.w < 1):
            raise ValueError(f"{self.policy.value} requires a state limit w >= 1")
        if needs_n and (self.n is None or self.n < 1):
            raise ValueError(f"{self.policy.value} requires a case limit n >= 1")
        if not needs_w and self.w is not None:
            raise ValueError(f"{self.policy.value} does not accept a state limit")
        if not needs_n and self.n is not None:
            raise ValueError(f"{self.policy.value} does not accept a case limit")

    @property
    def label(self) -> str:
        if self.policy is Policy.BASELINE:
            return "baseline"
        if self.policy is Policy.BOUNDED_STATES:
            return f"bounded-states-w{self.w}"
        if self.policy is Policy.BOUNDED_CASES:
            return f"bounded-cases-n{self.n}"
        return f"combined-w{self.w}-n{self.n}"


@dataclass
class CaseRecord:
    """A case tracked in the multi-state store.

    ``event_count`` counts the events observed since the case entered (or
    re-entered) the store; ``last_update`` is the arrival index of its
    most recent event.
    """

    case_id: str
    prefix_alignment: PrefixAlignment
    last_update: int
    event_count: int = 0

    @property
    def effective_cost(self) -> float:
        return self.prefix_alignment.fitness_cost


class CaseStore:
    """Multi-state case storage (the policies' D_C), optionally capacity-bounded."""

    def __init__(self, capacity: int | None = None) -> None:
        if capacity is not None and capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._records: dict[str, CaseRecord] = {}

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, case_id: str) -> bool:
        return case_id in self._records

    def get(self, case_id: str) -> CaseRecord | None:
        return self._records.get(case_id)

    def add(self, record: CaseRecord) -> None:
        if self.capacity is not None and record.case_id not in self._records:
            if len(self._records) >= self.capacity:
                raise ValueError(f"store is at capacity {self.capacity}")
        self._records[record.case_id] = record

    def pop(self, case_id: str) -> CaseRecord:
        return self._records.pop(case_id)

    def records(self) -> Iterator[CaseRecord]:
        """Records in admission order (the forgetting scan order)."""
        return iter(self._records.values())

    def case_ids(self) -> tuple[str, ...]:
        return tuple(self._records)


class SummaryRepository:
    """Single-state summaries of forgotten cases (the policies' R_C)."""

    def __init__(self) -> None:
        self._summaries: dict[str, SummaryState] = {}

    def __len__(self) -> int:
        return len(self._summaries)

    def __contains__(self, case_id: str) -> bool:
        return case_id in self._summaries

    def get(self, case_id: str) -> SummaryState | None:
        return self._summaries.get(case_id)

    def put(self, case_id: str, summary: SummaryState) -> None:
        self._summaries[case_id] = summary

    def pop(self, case_id: str) -> SummaryState | None:
        return self._summaries.pop(case_id, None)

    def items(self) -> Iterator[tuple[str, SummaryState]]:
        return iter(self._summaries.items())


@dataclass(frozen=True)
class EventOutcome:
    """Per-event result reported by an engine."""

    case_id: str
    activity: ActivityLabel
    arrival_index: int
    effective_cost: float
    conformant: bool
    method: Method
    residual_cost: float


def effective_cost(record: CaseRecord) -> float:
    """Carried cost of the forgotten prefix plus the retained states' cost."""
    return record.prefix_alignment.fitness_cost


def stored_state_count(store: CaseStore, repo: SummaryRepository | None = None) -> int:
    """Total states held in memory; summaries count one state each."""
    total = sum(r.prefix_alignment.state_count for r in store.records())
    if repo is not None:
        total += len(repo)
    return total


def truncate_states(pa: PrefixAlignment, w: int) -> PrefixAlignment:
    """Forget the earliest states in excess of ``w``, leaving a summary.

    The summary absorbs any prior summary's carried cost plus the costs of
    the forgotten moves, and records the marking the forgotten prefix
    reached. For w=1 the single most recent state is kept next to the
    summary, so a truncated alignment never shrinks below two slots.
    """
    if w < 1:
        raise ValueError("state limit w must be >= 1")
    if pa.state_count <= w:
        return pa
    keep = max(w - 1, 1)
    if len(pa.states) <= keep:
        return pa
    dropped = pa.states[:-keep]
    survivors = pa.states[-keep:]
    carried = pa.summary.kappa_o if pa.summary is not None else 0.0
    summary = SummaryState(
        kappa_o=carried + sum(s.move_cost for s in dropped),
        carry_marking=dropped[-1].marking_after,
    )
    renumbered = tuple(
        AlignmentState(s.move, s.move_cost, s.marking_after, i + 1)
        for i, s in enumerate(survivors)
    )
    return PrefixAlignment(
        base_marking=summary.carry_marking, states=renumbered, summary=summary
    )


def _forgetting_class(record: CaseRecord) -> tuple[bool, int]:
    """(is compliant monuple, preference class 2..4) for one record."""
    pa = record.prefix_alignment
    summary = pa.summary
    monuple = (
        record.event_count == 1
        and summary is None
        and len(pa.states) == 1
        and pa.states[0].move.kind is MoveKind.SYNCHRONOUS
    )
    if summary is not None and summary.kappa_o > 0:
        preference = 2
    elif pa.fitness_cost == 0:
        preference = 3
    else:
        preference = 4
    return monuple, preference


def select_forget_victim(store: CaseStore) -> str:
    """Pick the case to forget, in a single pass over the store.

    Preference order: (1) a compliant monuple (single event explained by
    one synchronous move from the initial marking) ends the scan
    immediately; (2) cases whose forgotten prefix already carries cost;
    (3) fully conformant cases; (4) cases whose retained states are not
    fitting. Ties fall to the least recently updated case, then the
    smallest case id.
    """
    if len(store) == 0:
        raise ValueError("cannot select a victim from an empty store")
    best: tuple[int, int, str] | None = None
    for record in store.records():
        monuple, preference = _forgetting_class(record)
        if monuple:
            return record.case_id
        rank = (preference, record.last_update, record.case_id)
        if best is None or rank < best:
            best = rank
    assert best is not None
    return best[2]


class ConformanceEngine:
    """Processes one event stream sequentially under one policy.

    Engines for different configurations are independent; all produced
    values are plain immutable data.

    With ``use_forgetting_index`` (the default) the engine keeps an
    incremental index of forgetting preferences so eviction does not
    rescan the whole store on every orphan event; it selects exactly the
    case :func:`select_forget_victim` would. Disable it to route every
    eviction through the plain single-pass scan instead.
    """

    def __init__(
        self,
        net: PetriNet,
        config: PolicyConfig | None = None,
        *,
        search_budget: int = DEFAULT_SEARCH_BUDGET,
        use_forgetting_index: bool = True,
    ) -> None:
        self.net = net
        self.config = config or PolicyConfig(Policy.BASELINE)
        self.search_budget = search_budget
        bounded_cases = self.config.policy in (Policy.BOUNDED_CASES, Policy.COMBINED)
        self.store = CaseStore(capacity=self.config.n if bounded_cases else None)
        self.repo = SummaryRepository()
        self.events_processed = 0
        self.search_count = 0
        self.extension_count = 0
        self._indexing = bounded_cases and use_forgetting_index
        # index state: monuples in admission order; per-class heaps of
        # (last_update, case_id) with lazy invalidation via _index_state
        self._monuples: dict[str, None] = {}
        self._class_heaps: dict[int, list[tuple[int, str]]] = {2: [], 3: [], 4: []}
        self._index_state: dict[str, tuple[int, int]] = {}

    @property
    def stored_state_count(self) -> int:
        return stored_state_count(self.store, self.repo)

    def residual_cost(self, case_id: str) -> float:
        """Carried cost of the case's forgotten prefix (0 when nothing was forgotten)."""
        record = self.store.get(case_id)
        if record is not None:
            summary = record.prefix_alignment.summary
            return summary.kappa_o if summary is not None else 0.0
        summary = self.repo.get(case_id)
        if summary is None:
            raise KeyError(case_id)
        return summary.kappa_o

    def process_stream(self, events: Iterable[StreamEvent]) -> Iterator[EventOutcome]:
        for event in events:
            yield self.process(event.case_id, event.activity, event.arrival_index)

    def process(
        self, case_id: str, activity: ActivityLabel, event_ref: EventRef | None = None
    ) -> EventOutcome:
        index = self.events_processed
        policy = self.config.policy
        bounded_cases = policy in (Policy.BOUNDED_CASES, Policy.COMBINED)

        record = self.store.get(case_id)
        if record is None:
            summary = self.repo.pop(case_id) if bounded_cases else None
            if bounded_cases and len(self.store) >= self.config.n:
                self._evict_one()
            pa = (
                PrefixAlignment.from_summary(summary)
                if summary is not None
                else PrefixAlignment.empty(self.net.initial_marking)
            )
            record = CaseRecord(case_id, pa, last_update=index)
            self.store.add(record)

        pa, method = self._compute(record.prefix_alignment, case_id, activity, event_ref)
        if policy in (Policy.BOUNDED_STATES, Policy.COMBINED):
            pa = truncate_states(pa, self.config.w)
        record.prefix_alignment = pa
        record.last_update = index
        record.event_count += 1
        if self._indexing:
            self._index_record(record)
        self.events_processed = index + 1

        cost = pa.fitness_cost
        residual = pa.summary.kappa_o if pa.summary is not None else 0.0
        return EventOutcome(
            case_id=case_id,
            activity=activity,
            arrival_index=index,
            effective_cost=cost,
            conformant=cost == 0,
            method=method,
            residual_cost=residual,
        )

    def _compute(
        self,
        pa: PrefixAlignment,
        case_id: str,
        activity: ActivityLabel,
        event_ref: EventRef | None,
    ) -> tuple[PrefixAlignment, Method]:
        extended = extend_model_semantics(
            self.net, pa, activity, event_ref, self.config.cost_model
        )
        if extended is not None:
            self.extension_count += 1
            return extended, Method.MODEL_SEMANTICS

        # Recompute from the alignment's base marking over the events still
        # recoverable from the retained states; forgotten events are gone,
        # but base_marking is the carry-forward marking in that case.
        trace = pa.log_projection() + ((activity, event_ref),)
        try:
            fresh = shortest_path_prefix_alignment(
                self.net,
                pa.base_marking,
                trace,
                self.config.cost_model,
                budget=self.search_budget,
            )
        except SearchBudgetExceeded as exc:
            raise SearchBudgetExceeded(exc.budget, case_id) from exc
        self.search_count += 1
        if pa.summary is not None:
            fresh = fresh.with_summary(pa.summary)
        return fresh, Method.SHORTEST_PATH

    def _evict_one(self) -> None:
        victim_id = self._pick_victim() if self._indexing else select_forget_victim(self.store)
        victim = self.store.pop(victim_id)
        if self._indexing:
            self._unindex(victim_id)
        pa = victim.prefix_alignment
        self.repo.put(
            victim_id,
            SummaryState(kappa_o=pa.fitness_cost, carry_marking=pa.current_marking),
        )

    # -- forgetting index --------------------------------------------------

    def _index_record(self, record: CaseRecord) -> None:
        monuple, preference = _forgetting_class(record)
        case_id = record.case_id
        if monuple:
            self._monuples[case_id] = None
        else:
            self._monuples.pop(case_id, None)
        self._index_state[case_id] = (preference, record.last_update)
        heapq.heappush(self._class_heaps[preference], (record.last_update, case_id))

    def _unindex(self, case_id: str) -> None:
        self._monuples.pop(case_id, None)
        self._index_state.pop(case_id, None)

    def _pick_victim(self) -> str:
        """Same choice as :func:`select_forget_victim`, via the index.

        Monuples are kept in admission order (their status is decided when
        their single event is processed, immediately after admission), so
        the first one matches the scan's early stop. Otherwise the lowest
        non-empty preference class yields its least recently updated case;
        stale heap entries are discarded lazily.
        """
        if self._monuples:
            return next(iter(self._monuples))
        for preference in (2, 3, 4):
            heap = self._class_heaps[preference]
            while heap:
                last_update, case_id = heap[0]
                if self._index_state.get(case_id) == (preference, last_update):
                    return case_id
                heapq.heappop(heap)
        raise RuntimeError("forgetting index out of sync with a non-empty store")
