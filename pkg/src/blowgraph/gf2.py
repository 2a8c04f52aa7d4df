"""Linear algebra over the two-element field for intersection matrices.

Rows are stored as Python ints used as bit vectors (bit ``j`` of ``rows[i]``
is entry ``(i, j)``), so one XOR eliminates a whole row at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .graph_core import DualGraph, GraphError, canonical_order, validate

__all__ = [
    "Gf2Matrix",
    "intersection_matrix",
    "rank",
    "det",
    "corank",
    "mu",
    "is_contractible",
    "graph_rows",
]


@dataclass(frozen=True)
class Gf2Matrix:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise ValueError(f"expected {self.n} rows, got {len(self.rows)}")
        limit = 1 << self.n
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError("row has bits outside the matrix")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if (self.rows[i] >> j & 1) != (self.rows[j] >> i & 1):
                    raise ValueError(f"matrix not symmetric at ({i}, {j})")

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]]) -> Gf2Matrix:
        rows = []
        for row in entries:
            bits = 0
            for j, x in enumerate(row):
                if x % 2:
                    bits |= 1 << j
            rows.append(bits)
        return cls(len(rows), tuple(rows))

    def entry(self, i: int, j: int) -> int:
        return self.rows[i] >> j & 1

    def tolist(self) -> list[list[int]]:
        return [[self.entry(i, j) for j in range(self.n)] for i in range(self.n)]


def _rank_rows(rows: Sequence[int]) -> int:
    # Keep a basis indexed by leading bit; each incoming row is reduced against it.
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            pivot = basis.get(top)
            if pivot is None:
                basis[top] = r
                break
            r ^= pivot
    return len(basis)


def rank(m: Gf2Matrix) -> int:
    return _rank_rows(m.rows)


def det(m: Gf2Matrix) -> int:
    """Determinant mod 2; the 0x0 matrix has determinant 1."""
    return 1 if _rank_rows(m.rows) == m.n else 0


def corank(m: Gf2Matrix) -> int:
    return m.n - _rank_rows(m.rows)


def graph_rows(g: DualGraph, order: Sequence[str] | None = None) -> list[int]:
    """Bit rows of the mod-2 intersection matrix in the given vertex order."""
    order = list(order) if order is not None else list(g.vertex_ids)
    index = {v: i for i, v in enumerate(order)}
    rows = [0] * len(order)
    for v, p in g.vertices:
        if p.bit:
            rows[index[v]] |= 1 << index[v]
    for a, b in g.edges:
        i, j = index[a], index[b]
        rows[i] |= 1 << j
        rows[j] |= 1 << i
    return rows


def _check(g: DualGraph) -> None:
    problems = validate(g)
    if problems:
        raise GraphError("invalid graph: " + "; ".join(problems))


def intersection_matrix(g: DualGraph) -> Gf2Matrix:
    """Mod-2 intersection matrix, rows in canonical vertex order.

    Forests are ordered component by component. Branches are not rows.
    """
    _check(g)
    order: list[str] = []
    if g.vertices:
        if len(g.components()) == 1:
            order = canonical_order(g)
        else:
            for comp in g.components():
                order.extend(canonical_order(g.induced(comp)))
    rows = graph_rows(g, order)
    return Gf2Matrix(len(rows), tuple(rows))


def mu(g: DualGraph) -> int:
    """Corank of the intersection matrix; additive over components."""
    _check(g)
    return g.n_vertices - _rank_rows(graph_rows(g))


def is_contractible(g: DualGraph) -> bool:
    """Smooth contractibility: the mod-2 determinant is 1."""
    _check(g)
    return _rank_rows(graph_rows(g)) == g.n_vertices
