from __future__ import annotations

import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netcycle import (
    EnumerationConfig,
    available_engines,
    enumerate_circuits,
    enumerate_graph,
    merge_circuits,
    tarjan,
)
from netcycle.circuits import EnumeratorState, circuit_search, unblock
from netcycle.ledger import circuit_edges
from netcycle.oracle import circuits_by_dfs

from conftest import (
    OVERLAP_CIRCUITS,
    complete_digraph,
    graph_of,
    random_graph,
)

ENGINES = available_engines()
per_engine = pytest.mark.parametrize("engine", ENGINES)


def enumerate_whole(g, cfg, engine):
    return merge_circuits(enumerate_graph(g, tarjan(g), cfg, engine))


@per_engine
class TestExamples:
    def test_three_cycle(self, intro_graph, engine):
        res = enumerate_circuits(intro_graph, ["A", "B", "C"], EnumerationConfig(), engine)
        assert res.circuits == [("A", "B", "C")]
        assert not res.truncated

    def test_antiparallel_pair(self, engine):
        g = graph_of([("A", "B", 5), ("B", "A", 3)])
        res = enumerate_circuits(g, ["A", "B"], EnumerationConfig(), engine)
        assert res.circuits == [("A", "B")]

    def test_overlapping_instance_contains_named_circuits(self, overlap_graph, engine):
        res = enumerate_circuits(g=overlap_graph, component=sorted("ABCDEFGH"),
                                 cfg=EnumerationConfig(max_len=8), engine=engine)
        for c in OVERLAP_CIRCUITS:
            assert c in res.circuits
        # the union of the three overlapping circuits necessarily embeds
        # two more cycles (A,B,D and A,B,C,D,E,F); exhaustive search agrees
        assert res.circuits == circuits_by_dfs(overlap_graph, 8)
        assert len(res.circuits) == 5

    def test_complete_digraph_k4_capped_at_three(self, engine):
        g = complete_digraph(4)
        res = enumerate_circuits(g, ["A", "B", "C", "D"], EnumerationConfig(max_len=3), engine)
        # frozen from the exhaustive oracle: 6 two-cycles + 8 three-cycles
        assert res.circuits == circuits_by_dfs(g, 3)
        counts = Counter(len(c) for c in res.circuits)
        assert counts == {2: 6, 3: 8}
        assert len(res.circuits) == 14

    def test_cap_excludes_longer_circuits(self, engine):
        g = complete_digraph(4)
        res = enumerate_circuits(g, ["A", "B", "C", "D"], EnumerationConfig(max_len=3), engine)
        assert all(len(c) <= 3 for c in res.circuits)

    def test_capped_blocking_keeps_shortcut_circuit(self, engine):
        # a->b->c->d->e->a plus the chord a->c: searching a->b->c->d hits the
        # cap at e, and c, d must not stay blocked for the a->c path, or the
        # four-party circuit (a,c,d,e) disappears.
        g = graph_of([
            ("a", "b", 1), ("b", "c", 1), ("c", "d", 1),
            ("d", "e", 1), ("e", "a", 1), ("a", "c", 1),
        ])
        res = enumerate_circuits(g, sorted(g.vertices), EnumerationConfig(max_len=4), engine)
        assert res.circuits == [("a", "c", "d", "e")]


@per_engine
class TestProperties:
    def test_matches_oracle_on_random_graphs(self, engine):
        rng = random.Random(31337)
        for _ in range(150):
            n = rng.randint(2, 10)
            p = rng.uniform(0.1, 0.9) if n <= 7 else rng.uniform(0.05, 0.5)
            g = random_graph(rng, n, p)
            max_len = rng.randint(2, n)
            mine = enumerate_whole(g, EnumerationConfig(max_len=max_len), engine)
            assert mine == circuits_by_dfs(g, max_len)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.integers(4, 9))
    def test_monotone_in_cap(self, engine, seed, n):
        g = random_graph(random.Random(seed), n, 0.35)
        previous: set = set()
        for max_len in range(2, n + 1):
            current = set(enumerate_whole(g, EnumerationConfig(max_len=max_len), engine))
            assert previous <= current
            previous = current

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000))
    def test_elementary_unique_and_sorted(self, engine, seed):
        rng = random.Random(seed)
        g = random_graph(rng, rng.randint(2, 9), 0.4)
        circuits = enumerate_whole(g, EnumerationConfig(max_len=8), engine)
        assert circuits == sorted(circuits)
        assert len(set(circuits)) == len(circuits)
        seen_rotations = set()
        for c in circuits:
            assert len(set(c)) == len(c)
            assert c[0] == min(c)
            for u, v in circuit_edges(c):
                assert g.weight(u, v) > 0
            rotations = frozenset(tuple(c[i:] + c[:i]) for i in range(len(c)))
            assert rotations not in seen_rotations
            seen_rotations.add(rotations)

    def test_containment_in_component(self, engine):
        rng = random.Random(5)
        g = random_graph(rng, 20, 0.12)
        partition = tarjan(g)
        for item in enumerate_graph(g, partition, EnumerationConfig(), engine):
            members = set(partition.components[item.scc_index])
            for c in item.result.circuits:
                assert set(c) <= members


@per_engine
class TestTruncation:
    def test_max_circuits_emits_then_stops(self, engine):
        g = complete_digraph(6)
        res = enumerate_circuits(g, sorted(g.vertices), EnumerationConfig(max_len=6, max_circuits=4), engine)
        assert len(res.circuits) == 4
        assert res.truncated
        assert res.truncation_reason == "max_circuits"

    def test_time_budget(self, engine):
        g = complete_digraph(11, weight=2)
        cfg = EnumerationConfig(max_len=11, per_scc_time_budget=0.02)
        res = enumerate_circuits(g, sorted(g.vertices), cfg, engine)
        assert res.truncated
        assert res.truncation_reason == "time_budget"

    def test_untruncated_result_is_flag_free(self, intro_graph, engine):
        res = enumerate_circuits(intro_graph, ["A", "B", "C"],
                                 EnumerationConfig(max_circuits=100, per_scc_time_budget=60), engine)
        assert not res.truncated
        assert res.truncation_reason is None


def test_engines_emit_identically():
    if len(ENGINES) < 2:
        pytest.skip("only one engine built")
    rng = random.Random(77)
    for _ in range(40):
        g = random_graph(rng, rng.randint(2, 12), rng.uniform(0.1, 0.5))
        cfg = EnumerationConfig(max_len=rng.randint(2, 8))
        outs = [
            merge_circuits(enumerate_graph(g, tarjan(g), cfg, e)) for e in ENGINES
        ]
        assert outs[0] == outs[1]


def test_config_validation():
    with pytest.raises(ValueError):
        EnumerationConfig(max_len=1)
    with pytest.raises(ValueError):
        EnumerationConfig(max_circuits=0)
    with pytest.raises(ValueError):
        EnumerationConfig(per_scc_time_budget=0)


class TestSearchState:
    """Single-start search and unblock, driven directly on small adjacency."""

    def adj(self, edges):
        out: dict[str, list[str]] = {}
        for u, v in edges:
            out.setdefault(u, []).append(v)
        for u in out:
            out[u].sort()
        return out

    def test_records_cycle_and_returns_true(self):
        state = EnumeratorState(start_vertex="A")
        found = circuit_search("A", state, self.adj([("A", "B"), ("B", "C"), ("C", "A")]),
                               EnumerationConfig())
        assert found
        assert state.found == [("A", "B", "C")]
        assert state.stack == []

    def test_dead_path_blocks_and_enrolls(self):
        state = EnumeratorState(start_vertex="A")
        found = circuit_search("A", state, self.adj([("A", "B"), ("B", "C")]),
                               EnumerationConfig())
        assert not found
        assert state.found == []
        # every searched vertex failed and sits on its successors' lists
        assert "B" in state.blocked_list["C"]
        assert "A" in state.blocked_list["B"]
        assert {"A", "B", "C"} <= state.blocked

    def test_cap_forces_unblock_for_other_starts(self):
        edges = [("A", "B"), ("B", "C"), ("C", "D"), ("D", "E"), ("E", "A")]
        state = EnumeratorState(start_vertex="A")
        found = circuit_search("A", state, self.adj(edges), EnumerationConfig(max_len=4))
        assert found  # the cap was hit, which propagates like a find
        assert state.found == []  # but nothing of length <= 4 exists
        assert state.blocked == set()

    def test_unblock_without_cascade(self):
        state = EnumeratorState(start_vertex="A")
        state.blocked.add("v")
        unblock("v", state)
        assert "v" not in state.blocked

    def test_unblock_cascades_through_chain(self):
        state = EnumeratorState(start_vertex="A")
        state.blocked.update({"v", "w", "x"})
        state.blocked_list["v"].append("w")
        state.blocked_list["w"].append("x")
        unblock("v", state)
        assert state.blocked == set()
        assert not state.blocked_list["v"]
        assert not state.blocked_list["w"]

    def test_unblock_skips_already_unblocked(self):
        state = EnumeratorState(start_vertex="A")
        state.blocked.update({"v", "w"})
        state.blocked_list["v"].extend(["u", "w"])  # u is not blocked
        unblock("v", state)
        assert state.blocked == set()
        assert not state.blocked_list["v"]
