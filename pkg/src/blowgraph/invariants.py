"""Corank invariants of branch partitions and the component sets of branch pairs.

For a partition of the branches, delete every curve on a tree path joining two
branches of the same block; the corank of what is left is an invariant. With
the one-block partition this is mu'. For a single pair the surviving
components (those carrying a branch or with nonzero corank) form the set
compared between equivalent germs.

A component is identified by the pair (corank, number of branches), which is
what blow-ups and blow-downs preserve; its shape code is kept for display.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph_core import (
    DualGraph,
    GraphError,
    SubgraphForest,
    _code_unchecked,
    id_key,
    validate,
)
from .gf2 import _rank_rows, graph_rows

__all__ = [
    "Partition",
    "PairSignature",
    "DeltaComponent",
    "DeltaStarSet",
    "path_between",
    "remove_partition_paths",
    "mu_partition",
    "mu_prime",
    "delta_star",
    "pair_signature",
    "compare_delta_star",
    "delta_table",
    "canonical_delta_table",
    "invariant_report",
]


@dataclass(frozen=True)
class Partition:
    blocks: tuple[frozenset[str], ...]

    @classmethod
    def of(cls, blocks: Iterable[Iterable[str]]) -> Partition:
        return cls(tuple(frozenset(b) for b in blocks))

    @classmethod
    def singletons(cls, branches: Iterable[str]) -> Partition:
        return cls.of([b] for b in branches)

    @classmethod
    def single_block(cls, branches: Iterable[str]) -> Partition:
        return cls.of([list(branches)])

    def check(self, branches: Iterable[str]) -> None:
        branches = set(branches)
        seen: set[str] = set()
        for block in self.blocks:
            if not block:
                raise GraphError("partition has an empty block")
            if block & seen:
                raise GraphError("partition blocks overlap")
            seen |= block
        if seen != branches:
            raise GraphError("partition does not cover the branches exactly")


@dataclass(frozen=True)
class PairSignature:
    entries: tuple[tuple[tuple[str, str], int], ...]

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(sorted(v for _, v in self.entries))

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.values)) + "}"


@dataclass(frozen=True)
class DeltaComponent:
    mu: int
    branches: tuple[str, ...]
    shape: str

    @property
    def key(self) -> tuple[int, int]:
        return (self.mu, len(self.branches))

    @property
    def code(self) -> str:
        return f"m{self.mu}b{len(self.branches)}"


@dataclass(frozen=True)
class DeltaStarSet:
    components: tuple[DeltaComponent, ...]

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(sorted(c.code for c in self.components))

    @property
    def keys(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(c.key for c in self.components))

    def __str__(self) -> str:
        return "[" + ",".join(self.codes) + "]"


def _check(g: DualGraph) -> None:
    problems = validate(g)
    if problems:
        raise GraphError("invalid graph: " + "; ".join(problems))


def _tree_path(g: DualGraph, a: str, b: str) -> list[str]:
    parent = {a: None}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        if u == b:
            break
        for w in g.adjacency[u]:
            if w not in parent:
                parent[w] = u
                queue.append(w)
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    return path[::-1]


def path_between(g: DualGraph, b1: str, b2: str) -> list[str]:
    """Curves on the unique extended-graph path between two branches, ends included."""
    _check(g)
    for b in (b1, b2):
        if b not in g.attach:
            raise GraphError(f"branch {b} is unknown or free")
    if b1 == b2:
        raise GraphError("path needs two distinct branches")
    return _tree_path(g, g.attach[b1], g.attach[b2])


def _deleted(g: DualGraph, partition: Partition) -> set[str]:
    gone: set[str] = set()
    for block in partition.blocks:
        attached = sorted((b for b in block if b in g.attach), key=id_key)
        if not attached:
            continue
        # Paths from one member to every other cover the union of pairwise paths in a tree.
        root = g.attach[attached[0]]
        for b in attached[1:]:
            gone.update(_tree_path(g, root, g.attach[b]))
        if len(block) > 1:
            gone.add(root)
    return gone


def remove_partition_paths(g: DualGraph, partition: Partition) -> SubgraphForest:
    _check(g)
    partition.check(g.branch_ids)
    return g.induced(set(g.vertex_ids) - _deleted(g, partition))


def _corank(g: DualGraph) -> int:
    return g.n_vertices - _rank_rows(graph_rows(g))


def mu_partition(g: DualGraph, partition: Partition) -> int:
    return _corank(remove_partition_paths(g, partition))


def mu_prime(g: DualGraph) -> int:
    _check(g)
    if g.n_branches < 1:
        raise GraphError("mu' needs at least one branch")
    return _corank(g.induced(set(g.vertex_ids) - _deleted(g, Partition.single_block(g.branch_ids))))


def _pairs(g: DualGraph) -> list[tuple[str, str]]:
    return list(itertools.combinations(sorted(g.attach, key=id_key), 2))


def pair_signature(g: DualGraph) -> PairSignature:
    """mu of the graph left after deleting the path of each branch pair."""
    _check(g)
    if g.n_branches < 2:
        raise GraphError("pair signature needs at least two branches")
    entries = []
    if g.free_branches:
        # No curves at all: every remainder is empty.
        names = sorted(g.branch_ids, key=id_key)
        return PairSignature(tuple((p, 0) for p in itertools.combinations(names, 2)))
    for b1, b2 in _pairs(g):
        rest = set(g.vertex_ids) - set(_tree_path(g, g.attach[b1], g.attach[b2]))
        entries.append(((b1, b2), _corank(g.induced(rest))))
    return PairSignature(tuple(entries))


def delta_star(g: DualGraph, b1: str, b2: str) -> DeltaStarSet:
    """Surviving components after deleting the path between ``b1`` and ``b2``.

    The two branches themselves are on the path and disappear; other branches
    on deleted curves survive as lone branch components.
    """
    path = path_between(g, b1, b2)
    forest = g.induced(set(g.vertex_ids) - set(path))
    comps = []
    for comp in forest.components():
        sub = forest.induced(comp)
        brs = tuple(sorted((b for v in comp for b in forest.branches_at.get(v, ())), key=id_key))
        m = _corank(sub)
        if brs or m:
            comps.append(DeltaComponent(m, brs, _code_unchecked(sub)))
    for b in forest.cut_branches:
        if b not in (b1, b2):
            comps.append(DeltaComponent(0, (b,), "x"))
    comps.sort(key=lambda c: (c.key, c.shape, c.branches))
    return DeltaStarSet(tuple(comps))


def compare_delta_star(d1: DeltaStarSet, d2: DeltaStarSet) -> bool:
    """True when a bijection of components preserving corank and branch count exists."""
    return d1.keys == d2.keys


def delta_table(g: DualGraph) -> dict[tuple[str, str], DeltaStarSet]:
    """Component sets for every branch pair; free branches leave nothing behind."""
    _check(g)
    if g.free_branches:
        names = sorted(g.branch_ids, key=id_key)
        return {p: DeltaStarSet(()) for p in itertools.combinations(names, 2)}
    return {p: delta_star(g, *p) for p in _pairs(g)}


def canonical_delta_table(g: DualGraph) -> tuple:
    """The pair-to-components table, minimised over all relabelings of branches.

    Each component is recorded as its corank with the set of branches it
    carries, so equal results mean some branch bijection matches every pair's
    components.
    """
    table = delta_table(g)
    names = sorted(g.branch_ids, key=id_key)
    best = None
    for perm in itertools.permutations(range(len(names))):
        sigma = {b: perm[i] for i, b in enumerate(names)}
        rows = []
        for (b1, b2), ds in table.items():
            pair = tuple(sorted((sigma[b1], sigma[b2])))
            comps = tuple(sorted((c.mu, tuple(sorted(sigma[b] for b in c.branches))) for c in ds.components))
            rows.append((pair, comps))
        rows = tuple(sorted(rows))
        if best is None or rows < best:
            best = rows
    return best or ()


def invariant_report(g: DualGraph) -> list[str]:
    """Line-oriented invariant summary used by the command line."""
    lines = [f"mu_prime={mu_prime(g)}"]
    if g.n_branches >= 2:
        sig = pair_signature(g)
        table = delta_table(g)
        for (b1, b2), value in sig.entries:
            lines.append(f"pair {b1} {b2} mu={value} delta=[{','.join(table[(b1, b2)].codes)}]")
        lines.append(f"signature={sig}")
    return lines
