"""Strongly connected components of the debt graph.

Single-DFS lowlink computation over an explicit stack, so graphs with
hundreds of thousands of vertices never touch the interpreter's recursion
limit. Circuits can only exist inside a component, so downstream stages
run per component.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ledger import CompanyId, DebtGraph


@dataclass
class SccPartition:
    """Disjoint covering of the vertex set into maximal strongly connected
    subgraphs. Components are listed in the order the DFS finishes them
    (reverse topological), each with its members sorted."""

    components: list[list[CompanyId]]
    component_of: dict[CompanyId, int]


def _index_graph(g: DebtGraph) -> tuple[list[CompanyId], list[int], list[int]]:
    """Sorted vertex list plus CSR adjacency over vertex indices.
    Successor indices are ascending, which fixes the DFS visit order."""
    verts = sorted(g.vertices)
    pos = {v: i for i, v in enumerate(verts)}
    indptr = [0]
    indices: list[int] = []
    for v in verts:
        indices.extend(sorted(pos[w] for w in g.successors(v)))
        indptr.append(len(indices))
    return verts, indptr, indices


def tarjan(g: DebtGraph) -> SccPartition:
    """SCC partition in O(|V| + |E|), visiting vertices in ascending id order."""
    verts, indptr, indices = _index_graph(g)
    n = len(verts)

    UNVISITED = -1
    order = [UNVISITED] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components: list[list[CompanyId]] = []
    component_of: dict[CompanyId, int] = {}
    counter = 0

    for root in range(n):
        if order[root] != UNVISITED:
            continue
        # Frames hold (vertex, next successor slot); lowlink merging happens
        # when a frame is resumed after its child completes.
        work: list[tuple[int, int]] = [(root, indptr[root])]
        while work:
            v, ptr = work.pop()
            if ptr == indptr[v]:
                order[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            else:
                # Returning from the child explored in the previous slot.
                child = indices[ptr - 1]
                low[v] = min(low[v], low[child])
            advanced = False
            while ptr < indptr[v + 1]:
                w = indices[ptr]
                ptr += 1
                if order[w] == UNVISITED:
                    work.append((v, ptr))
                    work.append((w, indptr[w]))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], order[w])
            if advanced:
                continue
            if low[v] == order[v]:
                comp_index = len(components)
                members: list[CompanyId] = []
                while True:
                    u = stack.pop()
                    on_stack[u] = False
                    members.append(verts[u])
                    component_of[verts[u]] = comp_index
                    if u == v:
                        break
                members.sort()
                components.append(members)
    return SccPartition(components, component_of)


def nontrivial_components(p: SccPartition, g: DebtGraph) -> list[list[CompanyId]]:
    """Components that can host a circuit: two or more vertices. The debt
    graph has no self-loops, so singletons never do."""
    return [c for c in p.components if len(c) >= 2]
