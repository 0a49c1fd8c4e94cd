"""Elementary circuit enumeration with a circuit-length cap.

Johnson-style search: one pass per start vertex over the subgraph induced
by vertices >= start, so every circuit is found exactly once, in canonical
rotation, from its smallest vertex. Blocked flags plus per-vertex unblock
lists prune dead subtrees; a depth cap bounds circuit length.

When the cap forecloses deeper exploration, the truncation is propagated
like a found circuit so the whole chain unblocks. A vertex therefore gets
blocked only on depth-independent evidence, which is what keeps the capped
search complete for circuits within the cap.

Two engines implement the same search: a compiled kernel (_fastcircuits)
and the pure-Python one in this module. The kernel is picked at import
when present; NETCYCLE_ENGINE=python forces the fallback.
"""

from __future__ import annotations

import os
import time
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .ledger import Circuit, CompanyId, DebtGraph
from .scc import SccPartition, nontrivial_components

try:
    from . import _fastcircuits as _fast
except ImportError:  # extension not built; pure Python only
    _fast = None


def available_engines() -> list[str]:
    return ["fast", "python"] if _fast is not None else ["python"]


def default_engine() -> str:
    if os.environ.get("NETCYCLE_ENGINE") in ("python", "fast"):
        return os.environ["NETCYCLE_ENGINE"]
    return "fast" if _fast is not None else "python"


def resolve_engine(engine: str | None) -> str:
    engine = engine or "auto"
    if engine == "auto":
        return default_engine()
    if engine == "fast" and _fast is None:
        raise RuntimeError("compiled engine requested but netcycle._fastcircuits is not built")
    if engine not in ("fast", "python"):
        raise ValueError(f"unknown engine {engine!r}")
    return engine


@dataclass
class EnumerationConfig:
    """max_len caps circuit length (>= 2). max_circuits is an emit-and-stop
    safety valve; per_scc_time_budget is wall-clock seconds per component.
    Hitting either bound yields a partial result flagged truncated."""

    max_len: int = 8
    max_circuits: int | None = None
    per_scc_time_budget: float | None = None

    def __post_init__(self) -> None:
        if self.max_len < 2:
            raise ValueError("max_len must be >= 2")
        if self.max_circuits is not None and self.max_circuits < 1:
            raise ValueError("max_circuits must be >= 1 when set")
        if self.per_scc_time_budget is not None and self.per_scc_time_budget <= 0:
            raise ValueError("per_scc_time_budget must be positive when set")


@dataclass
class EnumerationResult:
    circuits: list[Circuit]
    truncated: bool = False
    truncation_reason: str | None = None
    engine: str = "python"


@dataclass
class ComponentCircuits:
    """Enumeration output for one strongly connected component."""

    scc_index: int
    result: EnumerationResult


class _Budget:
    __slots__ = ("remaining", "deadline", "reason", "ticks")

    def __init__(self, max_circuits: int | None, time_budget: float | None):
        self.remaining = -1 if max_circuits is None else max_circuits
        self.deadline = None if time_budget is None else time.monotonic() + time_budget
        self.reason: str | None = None
        self.ticks = 0


class _Stop(Exception):
    pass


@dataclass
class EnumeratorState:
    """Search state for one start vertex.

    Vertices on the stack are blocked; blocked_list[v] holds the vertices
    to notify (unblock) once v becomes available again.
    """

    start_vertex: CompanyId
    stack: list[CompanyId] = field(default_factory=list)
    blocked: set[CompanyId] = field(default_factory=set)
    blocked_list: dict[CompanyId, deque[CompanyId]] = field(default_factory=lambda: defaultdict(deque))
    found: list[Circuit] = field(default_factory=list)


def unblock(v: CompanyId, state: EnumeratorState) -> None:
    """Unblock v and, transitively, everything queued on its blocked list.

    Iterative so long cascade chains cannot overflow the interpreter stack.
    Entries that are already unblocked are skipped; lists drain as they are
    processed, so re-entry terminates.
    """
    work = [v]
    while work:
        u = work.pop()
        state.blocked.discard(u)
        queue = state.blocked_list.get(u)
        while queue:
            w = queue.popleft()
            if w in state.blocked:
                work.append(w)


def circuit_search(
    v: CompanyId,
    state: EnumeratorState,
    adj: Mapping[CompanyId, Sequence[CompanyId]],
    cfg: EnumerationConfig,
    budget: _Budget | None = None,
) -> bool:
    """Explore from v; record a circuit whenever a successor closes back to
    the start vertex. Returns True if a circuit was recorded below v or the
    depth cap foreclosed exploration there (both force unblocking); only a
    fully explored, circuit-free subtree blocks v and enrolls it on its
    successors' blocked lists.
    """
    if budget is not None:
        budget.ticks += 1
        if budget.deadline is not None and (budget.ticks & 1023) == 0 and time.monotonic() >= budget.deadline:
            budget.reason = "time_budget"
            raise _Stop
    start = state.start_vertex
    state.stack.append(v)
    state.blocked.add(v)
    found = False
    for w in adj.get(v, ()):
        if w < start:
            continue
        if w == start:
            state.found.append(tuple(state.stack))
            found = True
            if budget is not None and budget.remaining > 0:
                budget.remaining -= 1
                if budget.remaining == 0:
                    budget.reason = "max_circuits"
                    raise _Stop
        elif w not in state.blocked:
            if len(state.stack) >= cfg.max_len:
                # Deepening would exceed the cap: unreliable to conclude
                # "no circuit", so force the unblock path.
                found = True
            elif circuit_search(w, state, adj, cfg, budget):
                found = True
    if found:
        unblock(v, state)
    else:
        for w in adj.get(v, ()):
            if w >= start and v not in state.blocked_list[w]:
                state.blocked_list[w].append(v)
    state.stack.pop()
    return found


def component_adjacency(
    g: DebtGraph, component: Iterable[CompanyId]
) -> dict[CompanyId, list[CompanyId]]:
    """Successor lists restricted to the component, sorted ascending."""
    members = set(component)
    return {
        v: sorted(w for w in g.successors(v) if w in members)
        for v in sorted(members)
    }


def _enumerate_python(
    adj: dict[CompanyId, list[CompanyId]], cfg: EnumerationConfig
) -> tuple[list[Circuit], str | None]:
    budget = _Budget(cfg.max_circuits, cfg.per_scc_time_budget)
    out: list[Circuit] = []
    try:
        for start in adj:
            state = EnumeratorState(start_vertex=start)
            state.found = out
            circuit_search(start, state, adj, cfg, budget)
    except _Stop:
        return out, budget.reason
    return out, None


def _enumerate_fast(
    adj: dict[CompanyId, list[CompanyId]], cfg: EnumerationConfig
) -> tuple[list[Circuit], str | None]:
    verts = list(adj)
    pos = {v: i for i, v in enumerate(verts)}
    indptr = [0]
    indices: list[int] = []
    for v in verts:
        indices.extend(pos[w] for w in adj[v])
        indptr.append(len(indices))
    deadline = 0.0
    if cfg.per_scc_time_budget is not None:
        deadline = time.monotonic() + cfg.per_scc_time_budget
    raw, reason_code = _fast.enumerate_component(
        indptr, indices, len(verts), cfg.max_len,
        -1 if cfg.max_circuits is None else cfg.max_circuits, deadline,
    )
    reasons = {0: None, 1: "max_circuits", 2: "time_budget"}
    return [tuple(verts[i] for i in c) for c in raw], reasons[reason_code]


def enumerate_circuits(
    g: DebtGraph,
    component: Iterable[CompanyId],
    cfg: EnumerationConfig | None = None,
    engine: str | None = None,
) -> EnumerationResult:
    """All elementary circuits of the component's induced subgraph with
    length <= cfg.max_len, each once, canonical rotation, emitted in
    lexicographic order. A hit budget yields a truncated partial result."""
    cfg = cfg or EnumerationConfig()
    engine = resolve_engine(engine)
    adj = component_adjacency(g, component)
    if engine == "fast":
        circuits, reason = _enumerate_fast(adj, cfg)
    else:
        circuits, reason = _enumerate_python(adj, cfg)
    return EnumerationResult(circuits, reason is not None, reason, engine)


def enumerate_graph(
    g: DebtGraph,
    partition: SccPartition,
    cfg: EnumerationConfig | None = None,
    engine: str | None = None,
    parallelism: int = 1,
) -> list[ComponentCircuits]:
    """Enumerate every nontrivial component, in component index order.

    Components share no edges, so they may run in parallel; results are
    merged back by component index either way.
    """
    cfg = cfg or EnumerationConfig()
    jobs = [
        (partition.component_of[comp[0]], comp)
        for comp in nontrivial_components(partition, g)
    ]

    def run(job: tuple[int, list[CompanyId]]) -> ComponentCircuits:
        idx, comp = job
        return ComponentCircuits(idx, enumerate_circuits(g, comp, cfg, engine))

    if parallelism > 1 and len(jobs) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    results.sort(key=lambda r: r.scc_index)
    return results


def merge_circuits(per_component: list[ComponentCircuits]) -> list[Circuit]:
    """Flat, lexicographically sorted circuit list across components."""
    merged: list[Circuit] = []
    for item in per_component:
        merged.extend(item.result.circuits)
    merged.sort()
    return merged
