"""Command line front end.

Every flag can also be set through the environment as
NETCYCLE_<COMMAND>_<FLAG> (dashes become underscores), e.g.
NETCYCLE_RUN_MAX_LEN=6 overrides `netcycle run --max-len`.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import traceback
from pathlib import Path

from . import __version__
from .circuits import (
    EnumerationConfig,
    available_engines,
    enumerate_graph,
    merge_circuits,
)
from .circuits import ComponentCircuits, EnumerationResult
from .datagen import InfeasibleRequest, generate_synthetic
from .ledger import DebtGraph, InvoiceError, ingest_csv, write_invoices_csv
from .pipeline import (
    PipelineConfig,
    RunReport,
    TruncatedInStrictMode,
    circuits_json,
    circuits_lines,
    emit_report_csv,
    plans_json,
    run_pipeline,
    scc_sizes_csv,
)
from .scc import SccPartition, tarjan
from .settlement import plan_per_scc

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2
EXIT_TRUNCATED_STRICT = 3


def _env(command: str, flag: str, fallback, cast=str):
    key = f"NETCYCLE_{command}_{flag}".upper().replace("-", "_")
    raw = os.environ.get(key)
    if raw is None:
        return fallback
    if cast is bool:
        return raw.lower() in ("1", "true", "yes", "on")
    return cast(raw)


def _optional(cast):
    def convert(raw):
        return None if raw in (None, "", "none") else cast(raw)

    return convert


def _add_engine_flags(p: argparse.ArgumentParser, cmd: str) -> None:
    p.add_argument(
        "--engine",
        choices=["auto", "fast", "python"],
        default=_env(cmd, "engine", "auto"),
        help="circuit-search engine (default: compiled kernel when built)",
    )


def _add_enum_flags(p: argparse.ArgumentParser, cmd: str) -> None:
    p.add_argument("--max-len", type=int, default=_env(cmd, "max-len", 8, int),
                   help="circuit length cap (default 8)")
    p.add_argument("--max-circuits", type=_optional(int),
                   default=_env(cmd, "max-circuits", None, _optional(int)),
                   help="stop after this many circuits per component")
    p.add_argument("--time-budget", type=_optional(float),
                   default=_env(cmd, "time-budget", None, _optional(float)),
                   help="wall-clock seconds allowed per component")


def _add_plan_flags(p: argparse.ArgumentParser, cmd: str) -> None:
    p.add_argument("--mode", choices=["auto", "exact", "greedy"],
                   default=_env(cmd, "mode", "auto"))
    p.add_argument("--exact-threshold", type=int,
                   default=_env(cmd, "exact-threshold", 10, int),
                   help="auto mode uses exact search up to this many circuits")


def _load_graph(path: str) -> DebtGraph:
    return DebtGraph.from_json(Path(path).read_text(encoding="utf-8"))


def _load_components(path: str, graph: DebtGraph, partition: SccPartition) -> list[ComponentCircuits]:
    """Read circuits from a structured .json artifact or plain canonical
    lines, grouped per component."""
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".json"):
        payload = json.loads(text)
        return [
            ComponentCircuits(
                entry["scc_index"],
                EnumerationResult(
                    [tuple(c) for c in entry["circuits"]],
                    entry.get("truncated", False),
                    entry.get("truncation_reason"),
                ),
            )
            for entry in payload["components"]
        ]
    groups: dict[int, list[tuple[str, ...]]] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        circuit = tuple(line.strip().split(","))
        groups.setdefault(partition.component_of[circuit[0]], []).append(circuit)
    return [
        ComponentCircuits(idx, EnumerationResult(sorted(cs)))
        for idx, cs in sorted(groups.items())
    ]


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- commands -------------------------------------------------------------


def cmd_ingest(args: argparse.Namespace) -> int:
    with open(args.input, encoding="utf-8", newline="") as fh:
        result = ingest_csv(fh, strict=not args.lenient)
    for reject in result.rejects:
        print(f"rejected {reject.locator}: {reject.reason}", file=sys.stderr)
    _write_or_print(result.graph.to_json(), args.out)
    print(
        f"ingested {result.accepted} invoices into "
        f"{len(result.graph.vertices)} companies / {result.graph.edge_count()} edges "
        f"({len(result.rejects)} rejected)",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_scc(args: argparse.Namespace) -> int:
    partition = tarjan(_load_graph(args.graph))
    _write_or_print(scc_sizes_csv(partition), args.out)
    return EXIT_OK


def cmd_circuits(args: argparse.Namespace) -> int:
    graph = _load_graph(args.graph)
    partition = tarjan(graph)
    cfg = EnumerationConfig(args.max_len, args.max_circuits, args.time_budget)
    per_component = enumerate_graph(graph, partition, cfg, args.engine, args.parallelism)
    merged = merge_circuits(per_component)
    _write_or_print(circuits_lines(merged), args.out)
    if args.json:
        Path(args.json).write_text(circuits_json(per_component, cfg), encoding="utf-8")
    truncated = [i.scc_index for i in per_component if i.result.truncated]
    if truncated:
        print(f"truncated components: {truncated}", file=sys.stderr)
        if not args.lenient:
            return EXIT_TRUNCATED_STRICT
    return EXIT_OK


def cmd_plan(args: argparse.Namespace) -> int:
    graph = _load_graph(args.graph)
    partition = tarjan(graph)
    per_component = _load_components(args.circuits, graph, partition)
    truncated = any(i.result.truncated for i in per_component)
    if truncated and not args.lenient:
        print("refusing to plan from truncated circuits in strict mode", file=sys.stderr)
        return EXIT_TRUNCATED_STRICT
    from .settlement import OptimizerConfig

    plans = plan_per_scc(
        graph, partition, None,
        OptimizerConfig(mode=args.mode, exact_threshold=args.exact_threshold),
        parallelism=args.parallelism, per_component=per_component,
    )
    _write_or_print(plans_json(plans), args.out)
    print(f"grand total netted: {sum(p.total for p in plans)}", file=sys.stderr)
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    cfg = PipelineConfig(
        input=Path(args.input),
        out_dir=Path(args.out_dir),
        max_len=args.max_len,
        max_circuits=args.max_circuits,
        time_budget=args.time_budget,
        mode=args.mode,
        exact_threshold=args.exact_threshold,
        strict=not args.lenient,
        parallelism=args.parallelism,
        engine=args.engine,
        emit_conflicts=args.emit_conflicts,
    )
    report = run_pipeline(cfg)
    json.dump(report.to_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    invoices = generate_synthetic(
        args.companies, args.edges, args.seed, args.min_amount, args.max_amount
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_invoices_csv(fh, invoices)
    else:
        write_invoices_csv(sys.stdout, invoices)
    print(f"generated {len(invoices)} invoices", file=sys.stderr)
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    payload = json.loads(Path(args.report).read_text(encoding="utf-8"))
    _write_or_print(emit_report_csv(RunReport.from_dict(payload)), args.out)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    if args.graph:
        graph = _load_graph(args.graph)
    else:
        from .ledger import ingest

        invoices = generate_synthetic(args.companies, args.edges, args.seed)
        graph = ingest(invoices).graph
    partition = tarjan(graph)
    cfg = EnumerationConfig(args.max_len, args.max_circuits, args.time_budget)
    outputs = {}
    for engine in available_engines():
        best = None
        for _ in range(args.repeat):
            t = time.perf_counter()
            per_component = enumerate_graph(graph, partition, cfg, engine)
            elapsed = time.perf_counter() - t
            best = elapsed if best is None else min(best, elapsed)
        circuits = merge_circuits(per_component)
        outputs[engine] = circuits
        print(f"{engine:>7}: {best:8.3f}s  {len(circuits)} circuits")
    if len(outputs) == 2:
        agree = outputs["fast"] == outputs["python"]
        print(f"engines agree: {agree}")
        if not agree:
            return EXIT_INTERNAL
    return EXIT_OK


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netcycle",
        description="Multilateral debt netting: find circuits of obligations and settle them for maximum effect.",
    )
    parser.add_argument("--version", action="version", version=f"netcycle {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="aggregate an invoice CSV into a debt graph snapshot")
    p.add_argument("--input", required=True, help="invoice CSV")
    p.add_argument("--out", default=_env("ingest", "out", None), help="graph JSON path (default stdout)")
    p.add_argument("--lenient", action="store_true", default=_env("ingest", "lenient", False, bool),
                   help="skip and report bad records instead of aborting")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("scc", help="strongly connected component sizes as CSV")
    p.add_argument("--graph", required=True, help="graph JSON snapshot")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_scc)

    p = sub.add_parser("circuits", help="enumerate elementary circuits, one per line")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", default=None, help="circuit lines path (default stdout)")
    p.add_argument("--json", default=_env("circuits", "json", None),
                   help="also write the structured per-component artifact here")
    p.add_argument("--lenient", action="store_true", default=_env("circuits", "lenient", False, bool))
    p.add_argument("--parallelism", type=int, default=_env("circuits", "parallelism", 1, int))
    _add_enum_flags(p, "circuits")
    _add_engine_flags(p, "circuits")
    p.set_defaults(func=cmd_circuits)

    p = sub.add_parser("plan", help="optimize settlement order for enumerated circuits")
    p.add_argument("--graph", required=True)
    p.add_argument("--circuits", required=True, help="circuits.json or canonical lines file")
    p.add_argument("--out", default=None, help="plans JSON path (default stdout)")
    p.add_argument("--lenient", action="store_true", default=_env("plan", "lenient", False, bool))
    p.add_argument("--parallelism", type=int, default=_env("plan", "parallelism", 1, int))
    _add_plan_flags(p, "plan")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("run", help="full pipeline: ingest, scc, circuits, plan, report")
    p.add_argument("--input", required=True, help="invoice CSV")
    p.add_argument("--out-dir", required=True, help="artifact directory")
    p.add_argument("--lenient", action="store_true", default=_env("run", "lenient", False, bool))
    p.add_argument("--parallelism", type=int, default=_env("run", "parallelism", 1, int))
    p.add_argument("--emit-conflicts", action="store_true",
                   default=_env("run", "emit-conflicts", False, bool),
                   help="also write the per-component circuit conflict graphs")
    _add_enum_flags(p, "run")
    _add_plan_flags(p, "run")
    _add_engine_flags(p, "run")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gen", help="generate a synthetic invoice CSV")
    p.add_argument("--companies", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--seed", type=int, default=_env("gen", "seed", 0, int))
    p.add_argument("--min-amount", type=int, default=_env("gen", "min-amount", 100, int))
    p.add_argument("--max-amount", type=int, default=_env("gen", "max-amount", 10**9, int))
    p.add_argument("--out", default=_env("gen", "out", None), help="CSV path (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("report", help="flatten a report.json into plot-ready CSV")
    p.add_argument("--report", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("bench", help="time the circuit engines against each other")
    p.add_argument("--graph", default=None, help="graph JSON; omit to generate one")
    p.add_argument("--companies", type=int, default=_env("bench", "companies", 2000, int))
    p.add_argument("--edges", type=int, default=_env("bench", "edges", 7000, int))
    p.add_argument("--seed", type=int, default=_env("bench", "seed", 0, int))
    p.add_argument("--repeat", type=int, default=_env("bench", "repeat", 1, int))
    _add_enum_flags(p, "bench")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvoiceError, InfeasibleRequest) as err:
        print(f"input error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as err:
        print(f"input error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except TruncatedInStrictMode as err:
        print(f"truncated: {err}", file=sys.stderr)
        return EXIT_TRUNCATED_STRICT
    except BrokenPipeError:
        return EXIT_OK
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
