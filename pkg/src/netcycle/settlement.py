"""Settlement ordering: pick the circuit order that nets the most.

A plan settles circuits one by one against live edge weights; a circuit
worth zero at its turn is skipped and recorded. The exact mode searches
orders exhaustively (with optimality-preserving pruning), the greedy mode
takes the largest immediate gain each step. Totals count the per-edge
settled amount times the circuit length.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable

from .circuits import ComponentCircuits, EnumerationConfig, enumerate_graph
from .ledger import (
    Circuit,
    CompanyId,
    DebtGraph,
    circuit_edges,
    circuit_value,
    settle,
)
from .scc import SccPartition


class StalePlanError(RuntimeError):
    """A recorded step no longer matches the graph. `step_index` names it."""

    def __init__(self, step_index: int, expected: int, actual: int):
        super().__init__(
            f"step {step_index}: recorded per-edge amount {expected} "
            f"but the circuit is now worth {actual}"
        )
        self.step_index = step_index


class ExactSearchRefused(RuntimeError):
    """Exact mode was asked to search more circuits than the hard cap."""


@dataclass
class OptimizerConfig:
    """mode: exact, greedy, or auto (exact up to exact_threshold circuits).
    Exact mode refuses outright above exact_hard_cap. tie_break picks among
    equal-total plans: 'balanced' prefers value spread across steps, then
    the smallest circuit sequence; 'canonical' keeps the first one found."""

    mode: str = "auto"
    exact_threshold: int = 10
    exact_hard_cap: int = 12
    tie_break: str = "balanced"

    def __post_init__(self) -> None:
        if self.mode not in ("exact", "greedy", "auto"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.exact_threshold < 1:
            raise ValueError("exact_threshold must be >= 1")
        if self.tie_break not in ("balanced", "canonical"):
            raise ValueError(f"unknown tie_break {self.tie_break!r}")


@dataclass(frozen=True)
class PlanStep:
    circuit: Circuit
    per_edge: int
    amount: int


@dataclass
class SettlementPlan:
    steps: list[PlanStep]
    total: int
    skipped: list[Circuit]
    mode: str
    scc_index: int | None = None
    truncated: bool = False
    truncation_reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "scc_index": self.scc_index,
            "mode": self.mode,
            "steps": [
                {"circuit": list(s.circuit), "per_edge": s.per_edge, "amount": s.amount}
                for s in self.steps
            ],
            "total": self.total,
            "skipped": [list(c) for c in self.skipped],
            "truncated": self.truncated,
            "truncation_reason": self.truncation_reason,
        }


@dataclass
class ConflictGraph:
    """Circuits as nodes; an edge joins two circuits sharing at least one
    debt edge. Shared edges bound both circuits' settle values, so the
    contested amount, the edge weight, is the smaller of the two values."""

    nodes: list[Circuit]
    edges: dict[tuple[int, int], int] = field(default_factory=dict)

    def weight(self, i: int, j: int) -> int | None:
        if i > j:
            i, j = j, i
        return self.edges.get((i, j))

    def to_dict(self) -> dict:
        return {
            "circuits": [list(c) for c in self.nodes],
            "conflicts": [
                {"a": i, "b": j, "contested": w}
                for (i, j), w in sorted(self.edges.items())
            ],
        }


def build_conflict_graph(g: DebtGraph, circuits: list[Circuit]) -> ConflictGraph:
    nodes = sorted(circuits)
    values = [circuit_value(g, c) for c in nodes]
    by_edge: dict[tuple[CompanyId, CompanyId], list[int]] = {}
    for i, c in enumerate(nodes):
        for e in circuit_edges(c):
            by_edge.setdefault(e, []).append(i)
    edges: dict[tuple[int, int], int] = {}
    for holders in by_edge.values():
        for a in range(len(holders)):
            for b in range(a + 1, len(holders)):
                i, j = holders[a], holders[b]
                edges[(i, j)] = min(values[i], values[j])
    return ConflictGraph(nodes, edges)


def _unsettle(g: DebtGraph, circuit: Circuit, x: int) -> None:
    for u, v in circuit_edges(circuit):
        g.add_obligation(u, v, x)


def _exact_order(
    g: DebtGraph, circuits: list[Circuit], cfg: OptimizerConfig
) -> tuple[list[PlanStep], int, list[Circuit]]:
    """Depth-first search over settlement orders on a scratch graph.

    Two optimality-preserving reductions: circuits worth zero are skipped
    the moment they hit zero (weights only decrease, so zero is final), and
    a branch is cut when its running total plus the sum of the remaining
    circuits' current value*length cannot strictly beat the best total.
    """
    order = sorted(circuits)
    k = [len(c) for c in order]
    n = len(order)
    best: dict = {"total": -1, "steps": [], "skipped": [], "key": None}

    def tie_key(steps: list[PlanStep]) -> tuple:
        amounts = tuple(sorted(s.amount for s in steps))
        seq = tuple(s.circuit for s in steps)
        return amounts, seq

    def better(total: int, steps: list[PlanStep]) -> bool:
        if total != best["total"]:
            return total > best["total"]
        if cfg.tie_break == "canonical":
            return False
        amounts, seq = tie_key(steps)
        b_amounts, b_seq = best["key"]
        if amounts != b_amounts:
            return amounts > b_amounts
        return seq < b_seq

    def dfs(remaining: list[int], steps: list[PlanStep], skipped: list[int], total: int) -> None:
        live = []
        forced = list(skipped)
        bound = total
        for i in remaining:
            v = circuit_value(g, order[i])
            if v == 0:
                forced.append(i)
            else:
                live.append((i, v))
                bound += v * k[i]
        if not live:
            if better(total, steps):
                best["total"] = total
                best["steps"] = list(steps)
                best["skipped"] = [order[i] for i in sorted(forced)]
                best["key"] = tie_key(steps)
            return
        if bound < best["total"]:
            return
        for i, v in live:
            rest = [j for j, _ in live if j != i]
            x = settle(g, order[i])
            steps.append(PlanStep(order[i], x, x * k[i]))
            dfs(rest, steps, forced, total + x * k[i])
            steps.pop()
            _unsettle(g, order[i], x)

    dfs(list(range(n)), [], [], 0)
    return best["steps"], best["total"], best["skipped"]


def _greedy_order(
    g: DebtGraph, circuits: list[Circuit]
) -> tuple[list[PlanStep], int, list[Circuit]]:
    """Settle the largest current gain first. A lazy heap works because a
    circuit's value never increases as others settle: a fresh top entry is
    the true maximum. Ties fall to the smaller canonical circuit."""
    order = sorted(circuits)
    heap = []
    for c in order:
        x = circuit_value(g, c)
        heap.append((-x * len(c), c))
    heapq.heapify(heap)
    steps: list[PlanStep] = []
    skipped: list[Circuit] = []
    total = 0
    while heap:
        neg_amount, c = heapq.heappop(heap)
        x = circuit_value(g, c)
        if x == 0:
            skipped.append(c)
            continue
        amount = x * len(c)
        if amount != -neg_amount:
            heapq.heappush(heap, (-amount, c))
            continue
        settle(g, c)
        steps.append(PlanStep(c, x, amount))
        total += amount
    skipped.sort()
    return steps, total, skipped


def optimize_order(
    g: DebtGraph,
    circuits: Iterable[Circuit],
    cfg: OptimizerConfig | None = None,
) -> SettlementPlan:
    """Best settlement order for `circuits` against a scratch copy of g.

    The input graph is never mutated. Exact mode maximizes the replay total
    over all orders; greedy maximizes each immediate step; auto picks exact
    for small circuit sets and greedy beyond cfg.exact_threshold.
    """
    cfg = cfg or OptimizerConfig()
    circuits = list(circuits)
    mode = cfg.mode
    if mode == "auto":
        mode = "exact" if len(circuits) <= cfg.exact_threshold else "greedy"
    if mode == "exact" and len(circuits) > cfg.exact_hard_cap:
        raise ExactSearchRefused(
            f"{len(circuits)} circuits exceeds the exact-mode cap of "
            f"{cfg.exact_hard_cap}; use greedy mode"
        )
    # Only the circuits' own edges matter to the optimizer; a scratch graph
    # of just those edges keeps per-component cost independent of |E|.
    scratch = DebtGraph()
    for c in circuits:
        for u, v in circuit_edges(c):
            if scratch.weight(u, v) == 0:
                w = g.weight(u, v)
                if w > 0:
                    scratch.add_obligation(u, v, w)
    if mode == "exact":
        steps, total, skipped = _exact_order(scratch, circuits, cfg)
    else:
        steps, total, skipped = _greedy_order(scratch, circuits)
    return SettlementPlan(steps=steps, total=total, skipped=skipped, mode=mode)


def plan_for_order(g: DebtGraph, circuits: Iterable[Circuit]) -> SettlementPlan:
    """Plan obtained by settling `circuits` in exactly the given order on a
    scratch copy, skipping any that are worth zero at their turn."""
    scratch = g.copy()
    steps: list[PlanStep] = []
    skipped: list[Circuit] = []
    total = 0
    for c in circuits:
        x = circuit_value(scratch, c)
        if x == 0:
            skipped.append(c)
            continue
        settle(scratch, c)
        steps.append(PlanStep(c, x, x * len(c)))
        total += x * len(c)
    return SettlementPlan(steps=steps, total=total, skipped=skipped, mode="forced")


def replay(g: DebtGraph, plan: SettlementPlan) -> DebtGraph:
    """Apply a plan to the live graph, verifying every recorded amount.

    On any mismatch the graph is restored to its input state and a
    StalePlanError names the failing step.
    """
    snapshot = g.copy()
    for idx, step in enumerate(plan.steps):
        actual = circuit_value(g, step.circuit)
        if actual != step.per_edge:
            g.replace_with(snapshot)
            raise StalePlanError(idx, step.per_edge, actual)
        settle(g, step.circuit)
    return g


def plan_per_scc(
    g: DebtGraph,
    partition: SccPartition,
    enum_cfg: EnumerationConfig | None = None,
    opt_cfg: OptimizerConfig | None = None,
    engine: str | None = None,
    parallelism: int = 1,
    per_component: list[ComponentCircuits] | None = None,
) -> list[SettlementPlan]:
    """One plan per nontrivial component, in component index order.

    Components share no edges, so plans commute and the grand total is the
    sum of plan totals. Pre-enumerated circuits may be passed to avoid
    re-running enumeration; truncation flags carry into the plans.
    """
    opt_cfg = opt_cfg or OptimizerConfig()
    if per_component is None:
        per_component = enumerate_graph(g, partition, enum_cfg, engine, parallelism)

    def run(item: ComponentCircuits) -> SettlementPlan:
        plan = optimize_order(g, item.result.circuits, opt_cfg)
        plan.scc_index = item.scc_index
        plan.truncated = item.result.truncated
        plan.truncation_reason = item.result.truncation_reason
        return plan

    if parallelism > 1 and len(per_component) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            plans = list(pool.map(run, per_component))
    else:
        plans = [run(item) for item in per_component]
    plans.sort(key=lambda p: p.scc_index if p.scc_index is not None else -1)
    return plans
