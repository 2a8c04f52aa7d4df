from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blowgraph import (
    DualGraph,
    GraphError,
    GraphFormatError,
    Parity,
    VertexClass,
    canonical_code,
    canonical_form,
    classify_vertex,
    format_graph,
    format_line,
    is_isomorphic,
    parse_graph,
    to_dot,
    validate,
)
from blowgraph.graph_core import valency

from conftest import CUSP, STAR_WITH_Q
from strategies import relabelled, trees


def test_parity_flip_is_involution():
    for p in Parity:
        assert p.flip().flip() is p
        assert p.flip() is not p


def test_validate_minimal_tree():
    g = DualGraph.build({"v1": "odd"}, branches={"b1": "v1"})
    assert validate(g) == []


def test_validate_disconnected():
    g = DualGraph.build({"v1": "odd", "v2": "odd"})
    assert validate(g) == ["compact graph disconnected"]


def test_validate_self_loop():
    g = DualGraph.build({"v1": "odd"}, edges=[("v1", "v1")])
    assert validate(g) == ["self-loop at v1"]


def test_validate_cycle_and_references():
    tri = DualGraph.build({"a": "odd", "b": "odd", "c": "odd"}, edges=[("a", "b"), ("b", "c"), ("a", "c")])
    assert validate(tri) == ["compact graph contains a cycle"]
    dangling = DualGraph.build({"a": "odd"}, edges=[("a", "z")], branches={"b1": "y"})
    problems = validate(dangling)
    assert any("unknown vertex z" in p for p in problems)
    assert any("branch b1" in p for p in problems)


def test_validate_repeated_edge_and_duplicate_branch():
    g = DualGraph(
        vertices=(("a", Parity.ODD), ("b", Parity.ODD)),
        edges=(("a", "b"), ("b", "a")),
        branches=(("x", "a"), ("x", "b")),
    )
    problems = validate(g)
    assert "repeated edge a-b" in problems
    assert "duplicate branch x" in problems


def test_free_branches_only_on_empty_graph():
    assert validate(DualGraph.empty(["b1", "b2"])) == []
    g = DualGraph.build({"v1": "odd"}, free_branches=["b1"])
    assert validate(g) == ["free branches alongside exceptional curves"]


def test_valency_examples():
    star = DualGraph.build(
        {"c": "even", "x": "even", "y": "even", "z": "even"}, edges=[("c", "x"), ("c", "y"), ("c", "z")]
    )
    assert valency(star, "c", extended=True) == 3
    leaf = DualGraph.build({"a": "odd", "l": "odd"}, edges=[("a", "l")], branches={"b1": "l", "b2": "l"})
    assert valency(leaf, "l", extended=True) == 3
    assert valency(leaf, "l", extended=False) == 1
    with pytest.raises(GraphError):
        valency(leaf, "nope")


def test_classify_vertex_examples():
    g = parse_graph(STAR_WITH_Q)
    assert classify_vertex(g, "q") is VertexClass.Q
    assert classify_vertex(g, "c") is VertexClass.SPECIAL
    odd_leaf = DualGraph.build({"a": "even", "l": "odd"}, edges=[("a", "l")], branches={"b1": "l", "b2": "l"})
    assert classify_vertex(odd_leaf, "l") is VertexClass.SPECIAL
    path = DualGraph.build({"a": "odd", "m": "even", "z": "odd"}, edges=[("a", "m"), ("m", "z")])
    assert classify_vertex(path, "m") is VertexClass.ORDINARY
    assert classify_vertex(path, "a") is VertexClass.EXTREMAL
    with pytest.raises(GraphError):
        classify_vertex(path, "nope")


def test_canonical_code_examples():
    a = DualGraph.build({"x": "odd"})
    b = DualGraph.build({"v9": "odd"})
    assert canonical_code(a) == canonical_code(b)
    assert canonical_code(a) != canonical_code(DualGraph.build({"x": "even"}))
    p1 = DualGraph.build({"a": "even", "b": "odd", "c": "even"}, edges=[("a", "b"), ("b", "c")])
    p2 = DualGraph.build({"a": "even", "b": "even", "c": "odd"}, edges=[("a", "b"), ("b", "c")])
    assert canonical_code(p1) != canonical_code(p2)


def test_three_path_parity_classes():
    # 8 parity assignments on a 3-path fall into 6 classes up to reflection.
    codes = set()
    for ps in itertools.product(["even", "odd"], repeat=3):
        g = DualGraph.build(dict(zip("abc", ps)), edges=[("a", "b"), ("b", "c")])
        codes.add(canonical_code(g))
    assert len(codes) == 6


def test_is_isomorphic_examples():
    g = parse_graph(CUSP)
    assert not is_isomorphic(g, DualGraph.build({"v": "odd"}))
    two = DualGraph.build({"a": "odd", "b": "even"}, edges=[("a", "b")], branches={"b1": "a", "b2": "b"})
    swapped = DualGraph.build({"a": "odd", "b": "even"}, edges=[("a", "b")], branches={"b2": "a", "b1": "b"})
    assert is_isomorphic(two, swapped, branch_labels=False)
    assert not is_isomorphic(two, swapped, branch_labels=True)


def test_invalid_graph_has_no_code():
    with pytest.raises(GraphError):
        canonical_code(DualGraph.build({"a": "odd", "b": "odd"}))


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_code_invariant_under_relabelling(data):
    g = data.draw(trees())
    h = data.draw(relabelled(g))
    assert canonical_code(g) == canonical_code(h)
    assert canonical_code(g, True) == canonical_code(h, True)
    assert format_graph(canonical_form(g)) == format_graph(canonical_form(h))


@settings(max_examples=100, deadline=None)
@given(trees(max_branches=3, min_branches=2), st.data())
def test_code_branch_relabelling(g, data):
    names = [b for b, _ in g.branches]
    perm = data.draw(st.permutations(names))
    ren = dict(zip(names, perm))
    h = DualGraph(g.vertices, g.edges, tuple((ren[b], v) for b, v in g.branches))
    assert canonical_code(g) == canonical_code(h)
    # With labels kept the codes agree exactly when some automorphism matches the renaming.
    if canonical_code(g, True) != canonical_code(h, True):
        assert ren != {b: b for b in names}


@settings(max_examples=100, deadline=None)
@given(trees())
def test_tree_edge_count(g):
    assert validate(g) == []
    assert len(g.edges) == g.n_vertices - len(g.components())


@settings(max_examples=100, deadline=None)
@given(trees())
def test_q_classification_round_trip(g):
    for v in g.vertex_ids:
        if classify_vertex(g, v) is VertexClass.Q:
            assert g.parity[v] is Parity.EVEN
            assert valency(g, v) == 1


@settings(max_examples=100, deadline=None)
@given(trees())
def test_text_round_trip(g):
    assert parse_graph(format_graph(g)) == g
    assert parse_graph(format_line(g)) == g
    canon = canonical_form(g)
    assert is_isomorphic(canon, g)
    assert format_graph(g, canonical=True) == format_graph(canon)


def test_parse_errors_and_comments():
    g = parse_graph("# header\n\nvertex v1 odd  # trailing\nbranch b1 v1\n")
    assert g.n_vertices == 1 and g.n_branches == 1
    for bad in ["vertex v1 blue", "edge v1", "loop v1 v2", "vertex v-1 odd"]:
        with pytest.raises(GraphFormatError):
            parse_graph(bad)


def test_free_branch_round_trip():
    g = parse_graph("freebranch b1\n")
    assert g.free_branches == ("b1",) and g.is_empty
    assert format_graph(g) == "freebranch b1\n"


def test_canonical_form_renumbers():
    g = parse_graph(CUSP)
    canon = canonical_form(g)
    assert set(canon.vertex_ids) == {"v1", "v2", "v3"}
    assert canon.branch_ids == ("b1",)


def test_dot_export_is_deterministic():
    g = parse_graph(CUSP)
    text = to_dot(g)
    assert text == to_dot(parse_graph(CUSP))
    assert text.startswith("graph G {")
    assert '"E2" [style=filled' in text
    assert '"E1" [style=solid' in text
    assert '"b1" [shape=square' in text
    assert '"E3" -- "b1" [style=bold];' in text
