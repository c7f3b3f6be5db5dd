"""Experiment harness: policies vs the infinite-memory baseline.

A reference pass records the baseline's effective cost at every arrival
index; each policy then replays the same stream and is compared per
event window. Window statistics cover the cases touched in the window,
each at its last event of the window, so both engines are compared at
identical arrival indices.
"""

from __future__ import annotations

import json
import math
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from .alignment import DEFAULT_COST_MODEL, DEFAULT_SEARCH_BUDGET, CostModel
from .errors import EmptyWindow, ParseError, SearchBudgetExceeded
from .petri import PetriNet
from .pnml import load_model
from .policies import (
    CaseRecord,
    CaseStore,
    ConformanceEngine,
    Policy,
    PolicyConfig,
)
from .streams import StreamEvent, parse_csv_log, parse_xes_log, replay, replicate_events
from .synthetic import StreamSpec, generate_log

COMPARISON_NOTE = (
    "per window: cases touched in the window, each at its last event of the "
    "window; policy and baseline compared at identical arrival indices"
)


def rmse(pairs: Iterable[tuple[float, float]]) -> float:
    """Root-mean-square difference between paired policy and baseline costs."""
    pairs = list(pairs)
    if not pairs:
        raise EmptyWindow("rmse over an empty window")
    return math.sqrt(sum((a - b) ** 2 for a, b in pairs) / len(pairs))


def f1(pairs: Iterable[tuple[bool, bool]]) -> float:
    """F1 of non-conformance labels, baseline as ground truth.

    Pairs are (policy says non-conformant, baseline says non-conformant).
    When neither actual nor predicted positives exist the score is 1 by
    convention.
    """
    pairs = list(pairs)
    if not pairs:
        raise EmptyWindow("f1 over an empty window")
    tp = sum(1 for p, b in pairs if p and b)
    fp = sum(1 for p, b in pairs if p and not b)
    fn = sum(1 for p, b in pairs if not p and b)
    denominator = 2 * tp + fp + fn
    if denominator == 0:
        return 1.0
    return 2 * tp / denominator


def classify_case(record: CaseRecord) -> bool:
    """True when the case is conformant, i.e. its effective cost is zero."""
    return record.effective_cost == 0


def avg_states_per_case(store: CaseStore) -> float:
    """Mean number of non-summary states over the multi-state cases."""
    counts = [len(r.prefix_alignment.states) for r in store.records()]
    if not counts:
        return 0.0
    return sum(counts) / len(counts)


@dataclass(frozen=True)
class WindowStats:
    window_index: int
    events_in_window: int
    max_stored_states: int
    rmse_fitness: float
    f1_classification: float
    apte_us: float


@dataclass(frozen=True)
class PolicyRun:
    config: PolicyConfig
    label: str
    windows: tuple[WindowStats, ...]
    search_count: int
    extension_count: int
    error: str | None = None


@dataclass(frozen=True)
class ExperimentResult:
    runs: tuple[PolicyRun, ...]
    events_total: int
    window_size: int
    replication: int


def reference_costs(
    net: PetriNet,
    events: Sequence[StreamEvent],
    cost_model: CostModel = DEFAULT_COST_MODEL,
    search_budget: int = DEFAULT_SEARCH_BUDGET,
) -> list[float]:
    """Baseline effective cost after processing each event, by arrival index."""
    engine = ConformanceEngine(
        net, PolicyConfig(Policy.BASELINE, cost_model=cost_model), search_budget=search_budget
    )
    return [
        engine.process(ev.case_id, ev.activity, ev.arrival_index).effective_cost
        for ev in events
    ]


def _measured_pass(
    net: PetriNet,
    events: Sequence[StreamEvent],
    config: PolicyConfig,
    ref_costs: Sequence[float],
    window_size: int,
    search_budget: int,
    replication: int,
) -> PolicyRun:
    engine = ConformanceEngine(net, config, search_budget=search_budget)
    windows: list[WindowStats] = []
    window_start = 0
    peak_states = 0
    elapsed_ns = 0
    last_in_window: dict[str, tuple[int, float]] = {}
    error: str | None = None

    def close_window(end: int) -> None:
        nonlocal window_start, peak_states, elapsed_ns, last_in_window
        count = end - window_start
        pairs = [(cost, ref_costs[idx]) for idx, cost in last_in_window.values()]
        windows.append(
            WindowStats(
                window_index=len(windows),
                events_in_window=count,
                max_stored_states=peak_states,
                rmse_fitness=rmse(pairs),
                f1_classification=f1([(p > 0, b > 0) for p, b in pairs]),
                apte_us=elapsed_ns / count / 1000.0,
            )
        )
        window_start = end
        peak_states = 0
        elapsed_ns = 0
        last_in_window = {}

    try:
        for index, event in enumerate(events):
            started = time.perf_counter_ns()
            outcome = engine.process(event.case_id, event.activity, index)
            elapsed_ns += time.perf_counter_ns() - started
            peak_states = max(peak_states, engine.stored_state_count)
            last_in_window[event.case_id] = (index, outcome.effective_cost)
            if (index + 1) % window_size == 0 or index + 1 == len(events):
                close_window(index + 1)
    except SearchBudgetExceeded as exc:
        error = str(exc)

    run = PolicyRun(
        config=config,
        label=config.label,
        windows=tuple(windows),
        search_count=engine.search_count,
        extension_count=engine.extension_count,
        error=error,
    )
    if replication > 1 and error is None:
        means = measure_apte(net, config, events, replication, window_size, search_budget)
        run = replace(
            run,
            windows=tuple(
                replace(w, apte_us=means[i]) if i < len(means) else w
                for i, w in enumerate(run.windows)
            ),
        )
    return run


def measure_apte(
    net: PetriNet,
    config: PolicyConfig,
    events: Sequence[StreamEvent],
    k: int,
    window_size: int,
    search_budget: int = DEFAULT_SEARCH_BUDGET,
) -> list[float]:
    """Mean per-event processing time (microseconds) per window, over k replications.

    One engine processes the k-fold replicated stream back to back; each
    replication contributes its own timing of every window of the
    original stream, and the mean over replications is reported.
    """
    if k < 1:
        raise ValueError("replication count must be >= 1")
    base_length = len(events)
    engine = ConformanceEngine(net, config, search_budget=search_budget)
    sums: dict[int, int] = {}
    counts: dict[int, int] = {}
    for index, event in enumerate(replicate_events(events, k)):
        window = (index % base_length) // window_size
        started = time.perf_counter_ns()
        engine.process(event.case_id, event.activity, index)
        sums[window] = sums.get(window, 0) + time.perf_counter_ns() - started
        counts[window] = counts.get(window, 0) + 1
    return [sums[w] / counts[w] / 1000.0 for w in sorted(sums)]


def evaluate_policies(
    net: PetriNet,
    events: Sequence[StreamEvent],
    policies: Sequence[PolicyConfig],
    *,
    window_size: int = 1000,
    replication: int = 1,
    search_budget: int = DEFAULT_SEARCH_BUDGET,
    reference_search_budget: int | None = None,
    reference_cost_model: CostModel = DEFAULT_COST_MODEL,
    jobs: int = 1,
) -> ExperimentResult:
    """Run every policy over the stream and compare it to the baseline.

    A policy run that exhausts its search budget is reported with its
    completed windows and an error; other policies are unaffected. A
    budget failure in the reference pass itself propagates (the
    reference defaults to ``search_budget`` unless given its own).
    """
    if window_size < 1:
        raise ValueError("window_size must be >= 1")
    events = list(events)
    if not events:
        raise ValueError("empty stream")
    refs = reference_costs(
        net,
        events,
        reference_cost_model,
        search_budget if reference_search_budget is None else reference_search_budget,
    )
    if jobs > 1 and len(policies) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(
                    _measured_pass, net, events, config, refs, window_size, search_budget, replication
                )
                for config in policies
            ]
            runs = tuple(f.result() for f in futures)
    else:
        runs = tuple(
            _measured_pass(net, events, config, refs, window_size, search_budget, replication)
            for config in policies
        )
    return ExperimentResult(
        runs=runs, events_total=len(events), window_size=window_size, replication=replication
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """Parsed experiment description (see README for the JSON format)."""

    model_path: Path
    policies: tuple[PolicyConfig, ...]
    log_path: Path | None = None
    synthetic: StreamSpec | None = None
    synthetic_seed: int = 0
    final_marking: tuple[tuple[str, int], ...] | None = None
    window_size: int = 1000
    replication: int = 1
    output_dir: Path = Path("streamcc-out")
    search_budget: int = DEFAULT_SEARCH_BUDGET

    def __post_init__(self) -> None:
        if self.window_size < 1:
            raise ValueError("window_size must be >= 1")
        if self.replication < 1:
            raise ValueError("replication must be >= 1")
        if (self.log_path is None) == (self.synthetic is None):
            raise ValueError("exactly one of 'log' and 'synthetic' must be given")
        if not self.policies:
            raise ValueError("at least one policy is required")

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        base = Path(path).parent
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read experiment config {path}: {exc}") from exc
        if not isinstance(payload, dict):
            raise ParseError("experiment config must be a JSON object")
        try:
            policies = tuple(
                _policy_from_json(entry) for entry in payload.get("policies", [])
            )
            synthetic = payload.get("synthetic")
            spec = None
            seed = 0
            if synthetic is not None:
                synthetic = dict(synthetic)
                seed = int(synthetic.pop("seed", 0))
                if "kinds" in synthetic:
                    synthetic["kinds"] = tuple(synthetic["kinds"])
                spec = StreamSpec(**synthetic)
            final = payload.get("final_marking")
            return cls(
                model_path=base / payload["model"],
                policies=policies,
                log_path=(base / payload["log"]) if "log" in payload else None,
                synthetic=spec,
                synthetic_seed=seed,
                final_marking=tuple(sorted((str(k), int(v)) for k, v in final.items()))
                if final
                else None,
                window_size=int(payload.get("window_size", 1000)),
                replication=int(payload.get("replication", 1)),
                # input paths resolve against the config file; outputs
                # land relative to the invoking directory
                output_dir=Path(payload.get("output_dir", "streamcc-out")),
                search_budget=int(payload.get("search_budget", DEFAULT_SEARCH_BUDGET)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"invalid experiment config {path}: {exc}") from exc


def _policy_from_json(entry: dict) -> PolicyConfig:
    name = str(entry.get("policy", "")).replace("-", "_")
    try:
        policy = Policy(name)
    except ValueError as exc:
        raise ValueError(f"unknown policy {entry.get('policy')!r}") from exc
    w = entry.get("w")
    n = entry.get("n")
    return PolicyConfig(policy, w=int(w) if w is not None else None, n=int(n) if n is not None else None)


def load_experiment_inputs(config: ExperimentConfig) -> tuple[PetriNet, list[StreamEvent]]:
    net = load_model(
        config.model_path,
        final_marking=dict(config.final_marking) if config.final_marking else None,
    )
    if config.log_path is not None:
        if config.log_path.suffix.lower() == ".xes":
            log = parse_xes_log(config.log_path)
        else:
            log = parse_csv_log(config.log_path)
    else:
        log = generate_log(config.synthetic, config.synthetic_seed)
    return net, list(replay(log))


def run_experiment(config: ExperimentConfig, *, jobs: int = 1) -> ExperimentResult:
    """Load the configured model and stream, evaluate every policy."""
    net, events = load_experiment_inputs(config)
    return evaluate_policies(
        net,
        events,
        config.policies,
        window_size=config.window_size,
        replication=config.replication,
        search_budget=config.search_budget,
        jobs=jobs,
    )


def write_results(
    result: ExperimentResult, output_dir: str | Path, config_echo: dict | None = None
) -> list[Path]:
    """Write one CSV per policy plus a JSON run manifest; returns the paths."""
    outdir = Path(output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for run in result.runs:
        path = outdir / f"{run.label}.csv"
        lines = ["window,events,max_states,rmse,f1,apte_us"]
        for w in run.windows:
            lines.append(
                f"{w.window_index},{w.events_in_window},{w.max_stored_states},"
                f"{w.rmse_fitness:.6g},{w.f1_classification:.6g},{w.apte_us:.3f}"
            )
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)
    manifest = {
        "config": config_echo or {},
        "events_total": result.events_total,
        "window_size": result.window_size,
        "replication": result.replication,
        "comparison": COMPARISON_NOTE,
        "policies": [
            {
                "label": run.label,
                "windows": len(run.windows),
                "search_count": run.search_count,
                "extension_count": run.extension_count,
                "error": run.error,
            }
            for run in result.runs
        ],
        "library_version": _library_version(),
        "environment": {
            "python": platform.python_version(),
            "platform": platform.platform(),
            "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        },
    }
    manifest_path = outdir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    written.append(manifest_path)
    return written


def _library_version() -> str:
    try:
        from importlib.metadata import version

        return version("streamcc")
    except Exception:
        return "unknown"


def config_echo(config: ExperimentConfig) -> dict:
    payload = asdict(config)
    payload["model_path"] = str(config.model_path)
    payload["log_path"] = str(config.log_path) if config.log_path else None
    payload["output_dir"] = str(config.output_dir)
    payload["policies"] = [
        {"policy": p.policy.value, "w": p.w, "n": p.n} for p in config.policies
    ]
    if config.synthetic is not None:
        synthetic = asdict(config.synthetic)
        synthetic["start"] = config.synthetic.start.isoformat()
        synthetic["seed"] = config.synthetic_seed
        payload["synthetic"] = synthetic
    return payload
