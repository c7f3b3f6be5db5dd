"""Command-line interface.

Subcommands: ``check`` (replay a log through one policy and report
per-case conformance), ``experiment`` (run a policy-comparison config),
``replay`` (print the ordered stream) and ``validate-model`` (PNML
diagnostics). Exit codes: 0 success, 2 parse/validation problems, 3
search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from collections import Counter
from pathlib import Path
from typing import Sequence

from .alignment import DEFAULT_SEARCH_BUDGET
from .errors import ParseError, SearchBudgetExceeded, StreamccError, ValidationError
from .evaluation import ExperimentConfig, config_echo, run_experiment, write_results
from .petri import Marking, PetriNet
from .pnml import load_model
from .policies import ConformanceEngine, Policy, PolicyConfig
from .streams import CsvColumns, EventLog, parse_csv_log, parse_xes_log, replay

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3

_POLICY_NAMES = ("baseline", "bounded-states", "bounded-cases", "combined")


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except SearchBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StreamccError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamcc",
        description="Memory-bounded online conformance checking of event streams",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="replay a log through one policy")
    check.add_argument("--model", required=True, help="PNML process model")
    check.add_argument("--log", required=True, help="event log (.csv or .xes)")
    check.add_argument("--policy", required=True, choices=_POLICY_NAMES)
    check.add_argument("--w", type=int, default=None, help="state limit per case")
    check.add_argument("--n", type=int, default=None, help="multi-state case limit")
    check.add_argument("--out", default=None, help="output path (default: stdout)")
    check.add_argument("--format", choices=("csv", "json"), default="csv")
    check.add_argument("--budget", type=int, default=DEFAULT_SEARCH_BUDGET)
    _add_column_flags(check)
    check.set_defaults(handler=_cmd_check)

    experiment = sub.add_parser("experiment", help="run a policy-comparison experiment")
    experiment.add_argument("--config", required=True, help="experiment config (JSON)")
    experiment.add_argument("--jobs", type=int, default=1, help="parallel policy runs")
    experiment.add_argument("--seed", type=int, default=None, help="override synthetic-stream seed")
    experiment.set_defaults(handler=_cmd_experiment)

    rep = sub.add_parser("replay", help="print the timestamp-ordered stream")
    rep.add_argument("--log", required=True)
    rep.add_argument("--paced", action="store_true", help="sleep between events")
    _add_column_flags(rep)
    rep.set_defaults(handler=_cmd_replay)

    validate = sub.add_parser("validate-model", help="diagnose a PNML model")
    validate.add_argument("--model", required=True)
    validate.set_defaults(handler=_cmd_validate_model)
    return parser


def _add_column_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--col-case", default="case_id", help="CSV case id column")
    parser.add_argument("--col-activity", default="activity", help="CSV activity column")
    parser.add_argument("--col-timestamp", default="timestamp", help="CSV timestamp column")


def _policy_config(args: argparse.Namespace) -> PolicyConfig:
    policy = Policy(args.policy.replace("-", "_"))
    return PolicyConfig(policy, w=args.w, n=args.n)


def _load_log(args: argparse.Namespace) -> EventLog:
    path = Path(args.log)
    if not path.exists():
        raise ParseError(f"log file not found: {path}")
    if path.suffix.lower() == ".xes":
        return parse_xes_log(path)
    columns = CsvColumns(
        case_id=args.col_case, activity=args.col_activity, timestamp=args.col_timestamp
    )
    return parse_csv_log(path, columns)


def _cmd_check(args: argparse.Namespace) -> int:
    config = _policy_config(args)  # flag validation happens before any file is read
    net = load_model(args.model)
    log = _load_log(args)
    engine = ConformanceEngine(net, config, search_budget=args.budget)

    final_cost: dict[str, float] = {}
    events_per_case: Counter[str] = Counter()
    methods_per_case: dict[str, Counter] = {}
    for outcome in engine.process_stream(replay(log)):
        final_cost[outcome.case_id] = outcome.effective_cost
        events_per_case[outcome.case_id] += 1
        methods_per_case.setdefault(outcome.case_id, Counter())[outcome.method.value] += 1

    rows = []
    for case_id in sorted(final_cost):
        methods = methods_per_case[case_id]
        rows.append(
            {
                "case_id": case_id,
                "events": events_per_case[case_id],
                "effective_cost": final_cost[case_id],
                "conformant": final_cost[case_id] == 0,
                "residual_cost": engine.residual_cost(case_id),
                "model_semantics": methods["model-semantics"],
                "shortest_path": methods["shortest-path"],
            }
        )
    if args.format == "json":
        text = json.dumps({"policy": config.label, "cases": rows}, indent=2) + "\n"
    else:
        lines = ["case_id,events,effective_cost,conformant,residual_cost,model_semantics,shortest_path"]
        for r in rows:
            lines.append(
                f"{r['case_id']},{r['events']},{r['effective_cost']:.6g},"
                f"{str(r['conformant']).lower()},{r['residual_cost']:.6g},"
                f"{r['model_semantics']},{r['shortest_path']}"
            )
        text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out} ({len(rows)} cases, policy {config.label})")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_experiment(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        if config.synthetic is None:
            raise ValueError("--seed applies only to configs with a synthetic stream")
        config = ExperimentConfig(
            **{**_config_kwargs(config), "synthetic_seed": args.seed}
        )
    result = run_experiment(config, jobs=max(1, args.jobs))
    paths = write_results(result, config.output_dir, config_echo(config))
    for run in result.runs:
        status = f"FAILED ({run.error})" if run.error else f"{len(run.windows)} windows"
        print(f"{run.label}: {status}, searches={run.search_count}")
    print(f"wrote {len(paths)} files to {config.output_dir}")
    return EXIT_OK


def _config_kwargs(config: ExperimentConfig) -> dict:
    return {
        "model_path": config.model_path,
        "policies": config.policies,
        "log_path": config.log_path,
        "synthetic": config.synthetic,
        "synthetic_seed": config.synthetic_seed,
        "final_marking": config.final_marking,
        "window_size": config.window_size,
        "replication": config.replication,
        "output_dir": config.output_dir,
        "search_budget": config.search_budget,
    }


def _cmd_replay(args: argparse.Namespace) -> int:
    log = _load_log(args)
    ordered = sorted(enumerate(log.events), key=lambda item: (item[1].timestamp, item[0]))
    previous = None
    for index, (_, event) in enumerate(ordered):
        if args.paced and previous is not None:
            gap = (event.timestamp - previous).total_seconds() * 1e-3
            if gap > 0:
                time.sleep(min(gap, 0.25))
        previous = event.timestamp
        print(f"{index}\t{event.case_id}\t{event.activity}\t{event.timestamp.isoformat()}")
    return EXIT_OK


def _cmd_validate_model(args: argparse.Namespace) -> int:
    net = load_model(args.model)
    silent = sorted(t for t in net.transitions if net.is_silent(t))
    print(f"model: {net.name or Path(args.model).stem}")
    print(f"places: {len(net.places)}")
    print(f"transitions: {len(net.transitions)} ({len(silent)} silent)")
    print(f"arcs: {len(net.arcs)}")
    print(f"initial marking: {net.initial_marking}")
    print(f"final marking: {net.final_marking if net.final_marking.entries else '(not set)'}")
    if silent:
        print(f"silent transitions: {', '.join(silent)}")

    by_label: dict[str, list[str]] = {}
    for t in sorted(net.transitions):
        label = net.label(t)
        if label is not None:
            by_label.setdefault(label, []).append(t)
    duplicates = {label: ts for label, ts in by_label.items() if len(ts) > 1}
    for label, ts in sorted(duplicates.items()):
        print(f"duplicate label {label!r}: transitions {', '.join(ts)}")
        shared = set(net.preset(ts[0]))
        for t in ts[1:]:
            shared &= set(net.preset(t))
        if shared:
            print(
                f"WARNING: transitions {', '.join(ts)} share label {label!r} and "
                f"input place(s) {', '.join(sorted(shared))}; identical execution "
                "sequences can reach different markings"
            )

    if net.final_marking.entries:
        reachable, explored = _final_marking_reachable(net, limit=10_000)
        if reachable is None:
            print(f"final marking reachable: unknown (budget of {explored} markings explored)")
        else:
            print(f"final marking reachable: {'yes' if reachable else 'no'} ({explored} markings explored)")
    return EXIT_OK


def _final_marking_reachable(net: PetriNet, limit: int) -> tuple[bool | None, int]:
    """Breadth-first reachability of the final marking, bounded by ``limit`` markings."""
    seen: set[Marking] = {net.initial_marking}
    frontier = [net.initial_marking]
    while frontier:
        marking = frontier.pop(0)
        if net.is_final(marking):
            return True, len(seen)
        for t in sorted(net.enabled_transitions(marking)):
            nxt = net.fire(marking, t)
            if nxt not in seen:
                if len(seen) >= limit:
                    return None, len(seen)
                seen.add(nxt)
                frontier.append(nxt)
    return False, len(seen)


if __name__ == "__main__":
    sys.exit(main())
