"""Memory-bounded online conformance checking of event streams."""

from .alignment import (
    DEFAULT_COST_MODEL,
    DEFAULT_SEARCH_BUDGET,
    AlignmentState,
    CostModel,
    Move,
    MoveKind,
    PrefixAlignment,
    SummaryState,
    extend_model_semantics,
    shortest_path_prefix_alignment,
)
from .errors import (
    EmptyWindow,
    FiringNotEnabled,
    ParseError,
    SearchBudgetExceeded,
    StreamccError,
    TimestampError,
    ValidationError,
)
from .evaluation import (
    ExperimentConfig,
    ExperimentResult,
    PolicyRun,
    WindowStats,
    avg_states_per_case,
    classify_case,
    evaluate_policies,
    f1,
    measure_apte,
    rmse,
    run_experiment,
    write_results,
)
from .petri import ActivityLabel, Marking, PetriNet
from .pnml import load_final_marking_sidecar, load_model, load_pnml, to_pnml
from .policies import (
    CaseRecord,
    CaseStore,
    ConformanceEngine,
    EventOutcome,
    Method,
    Policy,
    PolicyConfig,
    SummaryRepository,
    effective_cost,
    select_forget_victim,
    stored_state_count,
    truncate_states,
)
from .streams import (
    CsvColumns,
    Event,
    EventLog,
    StreamEvent,
    parse_csv_log,
    parse_xes_log,
    replay,
    replicate_events,
    replicate_stream,
)
from .synthetic import StreamSpec, cyclic_sequence_net, generate_log, peak_concurrent_cases

__version__ = "0.1.0"

__all__ = [
    "ActivityLabel",
    "AlignmentState",
    "CaseRecord",
    "CaseStore",
    "ConformanceEngine",
    "CostModel",
    "CsvColumns",
    "DEFAULT_COST_MODEL",
    "DEFAULT_SEARCH_BUDGET",
    "EmptyWindow",
    "Event",
    "EventLog",
    "EventOutcome",
    "ExperimentConfig",
    "ExperimentResult",
    "FiringNotEnabled",
    "Marking",
    "Method",
    "Move",
    "MoveKind",
    "ParseError",
    "PetriNet",
    "Policy",
    "PolicyConfig",
    "PolicyRun",
    "PrefixAlignment",
    "SearchBudgetExceeded",
    "StreamEvent",
    "StreamSpec",
    "StreamccError",
    "SummaryRepository",
    "SummaryState",
    "TimestampError",
    "ValidationError",
    "WindowStats",
    "avg_states_per_case",
    "classify_case",
    "cyclic_sequence_net",
    "effective_cost",
    "evaluate_policies",
    "extend_model_semantics",
    "f1",
    "generate_log",
    "load_final_marking_sidecar",
    "load_model",
    "load_pnml",
    "measure_apte",
    "parse_csv_log",
    "parse_xes_log",
    "peak_concurrent_cases",
    "replay",
    "replicate_events",
    "replicate_stream",
    "rmse",
    "run_experiment",
    "select_forget_victim",
    "shortest_path_prefix_alignment",
    "stored_state_count",
    "to_pnml",
    "truncate_states",
    "write_results",
]
