"""Batch pipeline: ingest, components, circuits, plans, report.

Each phase writes a plain-file artifact into the output directory, so the
stages can also be run one at a time through the CLI and produce the same
bytes. Wall-clock timings live in their own report section because they
are the one part of a run that cannot be reproducible.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .circuits import ComponentCircuits, EnumerationConfig, enumerate_graph, merge_circuits, resolve_engine
from .ledger import DebtGraph, DensityUndefinedError, IngestResult, density, ingest_csv
from .scc import SccPartition, tarjan
from .settlement import OptimizerConfig, SettlementPlan, build_conflict_graph, plan_per_scc


@dataclass
class PipelineConfig:
    input: Path
    out_dir: Path
    max_len: int = 8
    max_circuits: int | None = None
    time_budget: float | None = None
    mode: str = "auto"
    exact_threshold: int = 10
    strict: bool = True
    parallelism: int = 1
    engine: str = "auto"
    emit_conflicts: bool = False

    def enumeration(self) -> EnumerationConfig:
        return EnumerationConfig(self.max_len, self.max_circuits, self.time_budget)

    def optimizer(self) -> OptimizerConfig:
        return OptimizerConfig(mode=self.mode, exact_threshold=self.exact_threshold)


@dataclass
class RunReport:
    company_count: int = 0
    edge_count: int = 0
    density: str | None = None
    density_float: float | None = None
    scc_count: int = 0
    scc_size_histogram: dict[int, int] = field(default_factory=dict)
    circuit_count: int = 0
    circuits_by_length: dict[int, int] = field(default_factory=dict)
    truncated: bool = False
    per_scc_totals: list[dict] = field(default_factory=list)
    grand_total: int = 0
    settled_steps: int = 0
    skipped_circuits: int = 0
    circuits_to_steps_ratio: float | None = None
    rejected_records: int = 0
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "company_count": self.company_count,
            "edge_count": self.edge_count,
            "density": self.density,
            "density_float": self.density_float,
            "scc_count": self.scc_count,
            "scc_size_histogram": {str(k): v for k, v in sorted(self.scc_size_histogram.items())},
            "circuit_count": self.circuit_count,
            "circuits_by_length": {str(k): v for k, v in sorted(self.circuits_by_length.items())},
            "truncated": self.truncated,
            "per_scc_totals": self.per_scc_totals,
            "grand_total": self.grand_total,
            "settled_steps": self.settled_steps,
            "skipped_circuits": self.skipped_circuits,
            "circuits_to_steps_ratio": self.circuits_to_steps_ratio,
            "rejected_records": self.rejected_records,
            "timings": self.timings,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "RunReport":
        report = cls()
        report.company_count = payload.get("company_count", 0)
        report.edge_count = payload.get("edge_count", 0)
        report.density = payload.get("density")
        report.density_float = payload.get("density_float")
        report.scc_count = payload.get("scc_count", 0)
        report.scc_size_histogram = {int(k): v for k, v in payload.get("scc_size_histogram", {}).items()}
        report.circuit_count = payload.get("circuit_count", 0)
        report.circuits_by_length = {int(k): v for k, v in payload.get("circuits_by_length", {}).items()}
        report.truncated = payload.get("truncated", False)
        report.per_scc_totals = payload.get("per_scc_totals", [])
        report.grand_total = payload.get("grand_total", 0)
        report.settled_steps = payload.get("settled_steps", 0)
        report.skipped_circuits = payload.get("skipped_circuits", 0)
        report.circuits_to_steps_ratio = payload.get("circuits_to_steps_ratio")
        report.rejected_records = payload.get("rejected_records", 0)
        report.timings = payload.get("timings", {})
        return report


class TruncatedInStrictMode(RuntimeError):
    """Enumeration was cut short while strict mode forbids partial plans."""


def scc_sizes_csv(partition: SccPartition) -> str:
    lines = ["component,size"]
    for i, comp in enumerate(partition.components):
        lines.append(f"{i},{len(comp)}")
    return "\n".join(lines) + "\n"


def circuits_lines(circuits: list[tuple[str, ...]]) -> str:
    return "".join(",".join(c) + "\n" for c in circuits)


def circuits_json(per_component: list[ComponentCircuits], cfg: EnumerationConfig) -> str:
    payload = {
        "max_len": cfg.max_len,
        "components": [
            {
                "scc_index": item.scc_index,
                "truncated": item.result.truncated,
                "truncation_reason": item.result.truncation_reason,
                "circuits": [list(c) for c in item.result.circuits],
            }
            for item in per_component
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def plans_json(plans: list[SettlementPlan]) -> str:
    payload = {
        "grand_total": sum(p.total for p in plans),
        "plans": [p.to_dict() for p in plans],
    }
    return json.dumps(payload, indent=2) + "\n"


def emit_report_csv(report: RunReport) -> str:
    """Flat per-length rows with the phase timings repeated on each row,
    ready for plotting circuit counts and cost against the length cap."""
    phases = ["ingest", "scc", "circuits", "plan", "total"]
    header = "length,circuit_count," + ",".join(f"{p}_seconds" for p in phases)
    lines = [header]
    timing_cells = ",".join(f"{report.timings.get(p, 0.0):.6f}" for p in phases)
    for length in sorted(report.circuits_by_length):
        count = report.circuits_by_length[length]
        lines.append(f"{length},{count},{timing_cells}")
    return "\n".join(lines) + "\n"


def build_report(
    graph: DebtGraph,
    partition: SccPartition,
    per_component: list[ComponentCircuits],
    plans: list[SettlementPlan],
    max_len: int,
    rejected: int,
    timings: dict[str, float],
) -> RunReport:
    report = RunReport()
    report.company_count = len(graph.vertices)
    report.edge_count = graph.edge_count()
    try:
        d = density(graph)
        report.density = f"{d.numerator}/{d.denominator}"
        report.density_float = float(d)
    except DensityUndefinedError:
        pass
    report.scc_count = len(partition.components)
    for comp in partition.components:
        report.scc_size_histogram[len(comp)] = report.scc_size_histogram.get(len(comp), 0) + 1
    report.circuits_by_length = {length: 0 for length in range(2, max_len + 1)}
    for item in per_component:
        for c in item.result.circuits:
            report.circuits_by_length[len(c)] = report.circuits_by_length.get(len(c), 0) + 1
        report.truncated = report.truncated or item.result.truncated
    report.circuit_count = sum(report.circuits_by_length.values())
    report.per_scc_totals = [
        {
            "scc_index": p.scc_index,
            "mode": p.mode,
            "total": p.total,
            "steps": len(p.steps),
            "skipped": len(p.skipped),
            "truncated": p.truncated,
        }
        for p in plans
    ]
    report.grand_total = sum(p.total for p in plans)
    report.settled_steps = sum(len(p.steps) for p in plans)
    report.skipped_circuits = sum(len(p.skipped) for p in plans)
    if report.settled_steps:
        report.circuits_to_steps_ratio = report.circuit_count / report.settled_steps
    report.rejected_records = rejected
    report.timings = timings
    return report


def run_pipeline(cfg: PipelineConfig) -> RunReport:
    """Ingest the invoice CSV and run components, circuits and plans,
    writing every artifact under cfg.out_dir.

    Strict mode propagates the first bad record as an error and refuses to
    write plans when enumeration was truncated (TruncatedInStrictMode).
    """
    engine = resolve_engine(cfg.engine)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    timings: dict[str, float] = {}
    t0 = time.perf_counter()

    with open(cfg.input, encoding="utf-8", newline="") as fh:
        result: IngestResult = ingest_csv(fh, strict=cfg.strict)
    graph = result.graph
    (out / "graph.json").write_text(graph.to_json(), encoding="utf-8")
    timings["ingest"] = time.perf_counter() - t0

    t1 = time.perf_counter()
    partition = tarjan(graph)
    (out / "scc_sizes.csv").write_text(scc_sizes_csv(partition), encoding="utf-8")
    timings["scc"] = time.perf_counter() - t1

    t2 = time.perf_counter()
    enum_cfg = cfg.enumeration()
    per_component = enumerate_graph(graph, partition, enum_cfg, engine, cfg.parallelism)
    merged = merge_circuits(per_component)
    (out / "circuits.txt").write_text(circuits_lines(merged), encoding="utf-8")
    (out / "circuits.json").write_text(circuits_json(per_component, enum_cfg), encoding="utf-8")
    timings["circuits"] = time.perf_counter() - t2

    truncated = any(item.result.truncated for item in per_component)
    if truncated and cfg.strict:
        raise TruncatedInStrictMode(
            "circuit enumeration was truncated; re-run lenient or raise the budgets"
        )

    t3 = time.perf_counter()
    plans = plan_per_scc(
        graph, partition, enum_cfg, cfg.optimizer(), engine,
        cfg.parallelism, per_component=per_component,
    )
    (out / "plans.json").write_text(plans_json(plans), encoding="utf-8")
    if cfg.emit_conflicts:
        conflicts = [
            {
                "scc_index": item.scc_index,
                **build_conflict_graph(graph, item.result.circuits).to_dict(),
            }
            for item in per_component
        ]
        (out / "conflicts.json").write_text(json.dumps(conflicts, indent=2) + "\n", encoding="utf-8")
    timings["plan"] = time.perf_counter() - t3
    timings["total"] = time.perf_counter() - t0

    report = build_report(
        graph, partition, per_component, plans, cfg.max_len,
        len(result.rejects), timings,
    )
    (out / "report.json").write_text(
        json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    (out / "report.csv").write_text(emit_report_csv(report), encoding="utf-8")
    return report
