from __future__ import annotations

from hypothesis import strategies as st

from blowgraph import DualGraph, Parity


@st.composite
def trees(draw, max_vertices=9, max_branches=4, min_branches=0):
    """Random valid dual graphs: a random tree with random parities and branches."""
    n = draw(st.integers(1, max_vertices))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    parities = draw(st.lists(st.sampled_from([Parity.EVEN, Parity.ODD]), min_size=n, max_size=n))
    nb = draw(st.integers(min_branches, max_branches))
    attach = draw(st.lists(st.integers(0, n - 1), min_size=nb, max_size=nb))
    names = [f"u{i}" for i in range(n)]
    return DualGraph(
        vertices=tuple(zip(names, parities)),
        edges=tuple((names[p], names[i + 1]) for i, p in enumerate(parents)),
        branches=tuple((f"c{j}", names[a]) for j, a in enumerate(attach)),
    )


@st.composite
def relabelled(draw, g):
    """``g`` with vertex ids shuffled and renamed."""
    ids = list(g.vertex_ids)
    perm = draw(st.permutations(ids))
    new = {old: f"w{i}_{perm[i]}" for i, old in enumerate(ids)}
    return DualGraph(
        vertices=tuple((new[v], p) for v, p in g.vertices),
        edges=tuple((new[a], new[b]) for a, b in g.edges),
        branches=tuple((b, new[v]) for b, v in g.branches),
        free_branches=g.free_branches,
    )
