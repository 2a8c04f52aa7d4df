"""Dual graphs of good resolutions: parity-weighted trees with branch leaves.

A :class:`DualGraph` holds the compact part (exceptional curves, each with a
self-intersection parity, joined by edges where curves meet) together with the
non-compact part (strict-transform branches, each attached to one curve).
Branches left over after every exceptional curve has been contracted are kept
in ``free_branches``.

Graphs are immutable. Everything here is pure, so graphs can be shared freely
between threads and processes.
"""

from __future__ import annotations

import enum
import re
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

__all__ = [
    "Parity",
    "VertexClass",
    "DualGraph",
    "SubgraphForest",
    "GraphError",
    "GraphFormatError",
    "validate",
    "valency",
    "classify_vertex",
    "canonical_code",
    "canonical_order",
    "canonical_form",
    "is_isomorphic",
    "parse_graph",
    "format_graph",
    "format_line",
    "to_dot",
    "id_key",
]

_TOKEN = re.compile(r"^[A-Za-z0-9_]+$")
_DIGITS = re.compile(r"(\d+)")


class GraphError(ValueError):
    """Raised when an operation receives an invalid graph or unknown id."""


class GraphFormatError(GraphError):
    """Raised on malformed graph text."""


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"

    def flip(self) -> Parity:
        return Parity.ODD if self is Parity.EVEN else Parity.EVEN

    @property
    def bit(self) -> int:
        return 1 if self is Parity.ODD else 0

    @classmethod
    def coerce(cls, value) -> Parity:
        if isinstance(value, Parity):
            return value
        if isinstance(value, bool) or isinstance(value, int):
            return cls.ODD if value % 2 else cls.EVEN
        return cls(str(value).lower())


class VertexClass(enum.Enum):
    Q = "Q"
    EXTREMAL = "extremal"
    SPECIAL = "special"
    ORDINARY = "ordinary"


def id_key(token: str):
    """Natural sort key, so that ``v2`` sorts before ``v10``."""
    parts = _DIGITS.split(token)
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts if p != "")


@dataclass(frozen=True)
class DualGraph:
    """The extended dual graph of a resolution.

    ``vertices`` pairs each exceptional-curve id with its parity, ``edges``
    lists unordered id pairs and ``branches`` lists ``(branch_id, vertex_id)``
    attachments. Sequences are normalised to sorted order on construction, but
    duplicates are kept so that :func:`validate` can report them.
    """

    vertices: tuple[tuple[str, Parity], ...] = ()
    edges: tuple[tuple[str, str], ...] = ()
    branches: tuple[tuple[str, str], ...] = ()
    free_branches: tuple[str, ...] = ()

    def __post_init__(self):
        verts = tuple(sorted(((v, Parity.coerce(p)) for v, p in self.vertices), key=lambda t: id_key(t[0])))
        edges = []
        for e in self.edges:
            a, b = e
            edges.append((a, b) if id_key(a) <= id_key(b) else (b, a))
        edges.sort(key=lambda e: (id_key(e[0]), id_key(e[1])))
        branches = tuple(sorted(((b, v) for b, v in self.branches), key=lambda t: id_key(t[0])))
        free = tuple(sorted(self.free_branches, key=id_key))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "branches", branches)
        object.__setattr__(self, "free_branches", free)

    @classmethod
    def build(
        cls,
        vertices: Mapping[str, object] | Iterable[tuple[str, object]],
        edges: Iterable[tuple[str, str]] = (),
        branches: Mapping[str, str] | Iterable[tuple[str, str]] = (),
        free_branches: Iterable[str] = (),
    ) -> DualGraph:
        """Convenience constructor accepting dicts and parity names."""
        if isinstance(vertices, Mapping):
            vertices = vertices.items()
        if isinstance(branches, Mapping):
            branches = branches.items()
        return cls(
            vertices=tuple((v, Parity.coerce(p)) for v, p in vertices),
            edges=tuple(tuple(e) for e in edges),
            branches=tuple(tuple(b) for b in branches),
            free_branches=tuple(free_branches),
        )

    @classmethod
    def empty(cls, free_branches: Iterable[str] = ()) -> DualGraph:
        return cls(free_branches=tuple(free_branches))

    # -- derived views -----------------------------------------------------

    @cached_property
    def parity(self) -> dict[str, Parity]:
        return dict(self.vertices)

    @cached_property
    def vertex_ids(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.vertices)

    @cached_property
    def adjacency(self) -> dict[str, tuple[str, ...]]:
        adj: dict[str, list[str]] = {v: [] for v in self.vertex_ids}
        for a, b in self.edges:
            if a in adj:
                adj[a].append(b)
            if b in adj and a != b:
                adj[b].append(a)
        return {v: tuple(ns) for v, ns in adj.items()}

    @cached_property
    def attach(self) -> dict[str, str]:
        return dict(self.branches)

    @cached_property
    def branches_at(self) -> dict[str, tuple[str, ...]]:
        at: dict[str, list[str]] = {v: [] for v in self.vertex_ids}
        for b, v in self.branches:
            at.setdefault(v, []).append(b)
        return {v: tuple(bs) for v, bs in at.items()}

    @property
    def branch_ids(self) -> tuple[str, ...]:
        return tuple(sorted([b for b, _ in self.branches] + list(self.free_branches), key=id_key))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_branches(self) -> int:
        return len(self.branches) + len(self.free_branches)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def degree(self, v: str) -> int:
        return len(self.adjacency[v])

    def star_valency(self, v: str) -> int:
        return len(self.adjacency[v]) + len(self.branches_at.get(v, ()))

    def components(self) -> list[tuple[str, ...]]:
        """Vertex sets of the connected components of the compact part."""
        seen: set[str] = set()
        out = []
        for v in self.vertex_ids:
            if v in seen:
                continue
            comp = []
            queue = deque([v])
            seen.add(v)
            while queue:
                u = queue.popleft()
                comp.append(u)
                for w in self.adjacency[u]:
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
            out.append(tuple(sorted(comp, key=id_key)))
        return out

    def induced(self, keep: Iterable[str]) -> SubgraphForest:
        """The subgraph on ``keep``; branches on dropped vertices become cut."""
        keep = set(keep)
        return SubgraphForest(
            vertices=tuple((v, p) for v, p in self.vertices if v in keep),
            edges=tuple(e for e in self.edges if e[0] in keep and e[1] in keep),
            branches=tuple((b, v) for b, v in self.branches if v in keep),
            cut_branches=tuple(b for b, v in self.branches if v not in keep),
        )

    def __str__(self) -> str:
        return format_graph(self)


@dataclass(frozen=True)
class SubgraphForest(DualGraph):
    """What remains of a dual graph after deleting vertices; may be disconnected.

    ``cut_branches`` are branches whose attachment curve was deleted.
    """

    cut_branches: tuple[str, ...] = field(default=())

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "cut_branches", tuple(sorted(self.cut_branches, key=id_key)))


# -- validation -----------------------------------------------------------


def validate(g: DualGraph) -> list[str]:
    """Return one message per violated invariant; empty when ``g`` is valid."""
    problems: list[str] = []
    ids = [v for v, _ in g.vertices]
    known = set(ids)
    for v, n in Counter(ids).items():
        if n > 1:
            problems.append(f"duplicate vertex {v}")
    for tok in ids + [b for b, _ in g.branches] + list(g.free_branches):
        if not isinstance(tok, str) or not _TOKEN.match(tok):
            problems.append(f"invalid id {tok!r}")

    seen_edges: set[tuple[str, str]] = set()
    for a, b in g.edges:
        if a == b:
            problems.append(f"self-loop at {a}")
            continue
        for x in (a, b):
            if x not in known:
                problems.append(f"edge {a}-{b} names unknown vertex {x}")
        if (a, b) in seen_edges:
            problems.append(f"repeated edge {a}-{b}")
        seen_edges.add((a, b))

    names = [b for b, _ in g.branches] + list(g.free_branches)
    for b, n in Counter(names).items():
        if n > 1:
            problems.append(f"duplicate branch {b}")
    for b, v in g.branches:
        if v not in known:
            problems.append(f"branch {b} attached to unknown vertex {v}")

    if g.free_branches and g.vertices and not isinstance(g, SubgraphForest):
        problems.append("free branches alongside exceptional curves")

    if problems:
        return problems

    n_comp = len(g.components())
    if len(seen_edges) != len(ids) - n_comp:
        problems.append("compact graph contains a cycle")
    if n_comp > 1 and not isinstance(g, SubgraphForest):
        problems.append("compact graph disconnected")
    return problems


def _require_valid(g: DualGraph) -> None:
    problems = validate(g)
    if problems:
        raise GraphError("invalid graph: " + "; ".join(problems))


def valency(g: DualGraph, v: str, extended: bool = True) -> int:
    """Number of edges at ``v``; with ``extended`` also count attached branches."""
    if v not in g.parity:
        raise GraphError(f"unknown vertex {v}")
    return g.star_valency(v) if extended else g.degree(v)


def classify_vertex(g: DualGraph, v: str) -> VertexClass:
    if v not in g.parity:
        raise GraphError(f"unknown vertex {v}")
    star = g.star_valency(v)
    if star >= 3:
        return VertexClass.SPECIAL
    if star == 1 and g.parity[v] is Parity.EVEN and g.degree(v) == 1:
        return VertexClass.Q
    if g.degree(v) == 1:
        return VertexClass.EXTREMAL
    return VertexClass.ORDINARY


# -- canonical codes (AHU on the compact tree, branches as labels) ---------


def _label(g: DualGraph, v: str, branch_labels: bool) -> str:
    p = "o" if g.parity[v] is Parity.ODD else "e"
    bs = g.branches_at.get(v, ())
    if branch_labels:
        return p + "{" + ",".join(sorted(bs, key=id_key)) + "}"
    return p + str(len(bs))


def _centers(g: DualGraph, comp: tuple[str, ...]) -> list[str]:
    if len(comp) <= 2:
        return list(comp)
    deg = {v: g.degree(v) for v in comp}
    layer = [v for v in comp if deg[v] <= 1]
    remaining = len(comp)
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            for w in g.adjacency[v]:
                deg[w] -= 1
                if deg[w] == 1:
                    nxt.append(w)
        layer = nxt
    return layer


def _rooted(g: DualGraph, root: str, branch_labels: bool) -> tuple[str, dict[str, str], dict[str, str | None]]:
    """AHU code of the tree rooted at ``root`` plus per-vertex subtree codes."""
    parent: dict[str, str | None] = {root: None}
    order = [root]
    i = 0
    while i < len(order):
        u = order[i]
        i += 1
        for w in g.adjacency[u]:
            if w not in parent:
                parent[w] = u
                order.append(w)
    codes: dict[str, str] = {}
    for u in reversed(order):
        kids = sorted(codes[w] for w in g.adjacency[u] if parent.get(w) == u and w != parent[u])
        codes[u] = _label(g, u, branch_labels) + "(" + "".join(kids) + ")"
    return codes[root], codes, parent


def _component_code(g: DualGraph, comp: tuple[str, ...], branch_labels: bool) -> tuple[str, str]:
    best = None
    for c in _centers(g, comp):
        code = _rooted(g, c, branch_labels)[0]
        if best is None or code < best[0]:
            best = (code, c)
    return best


def canonical_code(g: DualGraph, branch_labels: bool = False) -> str:
    """A string equal for two graphs exactly when they are isomorphic.

    Isomorphisms preserve parities, adjacency and branch attachment. With
    ``branch_labels`` the branch names must also match; without, branches may
    be permuted.
    """
    _require_valid(g)
    return _code_unchecked(g, branch_labels)


def _code_unchecked(g: DualGraph, branch_labels: bool = False) -> str:
    if isinstance(g, SubgraphForest):
        parts = sorted(_component_code(g, comp, branch_labels)[0] for comp in g.components())
        cut = sorted(g.cut_branches, key=id_key) if branch_labels else [str(len(g.cut_branches))]
        return "F[" + "+".join(parts) + "]x{" + ",".join(cut) + "}"
    if not g.vertices:
        free = ",".join(g.free_branches) if branch_labels else str(len(g.free_branches))
        return "E{" + free + "}"
    return _component_code(g, g.vertex_ids, branch_labels)[0]


def canonical_order(g: DualGraph, branch_labels: bool = False) -> list[str]:
    """Vertices of a connected graph in canonical DFS order (root first)."""
    if not g.vertices:
        return []
    if len(g.components()) != 1:
        raise GraphError("canonical_order needs a connected graph")
    _, root = _component_code(g, g.vertex_ids, branch_labels)
    _, codes, parent = _rooted(g, root, branch_labels)
    out = []
    stack = [root]
    while stack:
        u = stack.pop()
        out.append(u)
        kids = [w for w in g.adjacency[u] if parent.get(w) == u]
        kids.sort(key=lambda w: (codes[w], id_key(w)))
        stack.extend(reversed(kids))
    return out


def canonical_form(g: DualGraph, branch_labels: bool = False) -> DualGraph:
    """Relabel vertices ``v1..vn`` in canonical order.

    Branch ids are renamed ``b1..bm`` in attachment order unless
    ``branch_labels`` is set, in which case they are kept.
    """
    _require_valid(g)
    order = canonical_order(g, branch_labels)
    rename = {v: f"v{i + 1}" for i, v in enumerate(order)}
    brename: dict[str, str] = {}
    if branch_labels:
        brename = {b: b for b in g.branch_ids}
    else:
        k = 0
        for v in order:
            for b in sorted(g.branches_at.get(v, ()), key=id_key):
                k += 1
                brename[b] = f"b{k}"
        for b in g.free_branches:
            k += 1
            brename[b] = f"b{k}"
    return DualGraph(
        vertices=tuple((rename[v], p) for v, p in g.vertices),
        edges=tuple((rename[a], rename[b]) for a, b in g.edges),
        branches=tuple((brename[b], rename[v]) for b, v in g.branches),
        free_branches=tuple(brename[b] for b in g.free_branches),
    )


def is_isomorphic(g1: DualGraph, g2: DualGraph, branch_labels: bool = False) -> bool:
    return canonical_code(g1, branch_labels) == canonical_code(g2, branch_labels)


# -- text format and DOT ---------------------------------------------------


def parse_graph(text: str) -> DualGraph:
    """Parse the line-oriented graph format.

    One declaration per line: ``vertex <id> <even|odd>``, ``edge <id> <id>``,
    ``branch <id> <vertex-id>`` or ``freebranch <id>``. ``#`` starts a comment
    and ``;`` separates declarations sharing a line.
    Structural problems are left for :func:`validate`; only syntax is checked.
    """
    vertices, edges, branches, free = [], [], [], []
    decls = [
        (lineno, decl.split())
        for lineno, raw in enumerate(text.splitlines(), 1)
        for decl in raw.split("#", 1)[0].split(";")
    ]
    for lineno, parts in decls:
        if not parts:
            continue
        kind, args = parts[0], parts[1:]
        expected = {"vertex": 2, "edge": 2, "branch": 2, "freebranch": 1}.get(kind)
        if expected is None:
            raise GraphFormatError(f"line {lineno}: unknown declaration {kind!r}")
        if len(args) != expected:
            raise GraphFormatError(f"line {lineno}: {kind} takes {expected} argument(s)")
        for tok in args if kind != "vertex" else args[:1]:
            if not _TOKEN.match(tok):
                raise GraphFormatError(f"line {lineno}: invalid id {tok!r}")
        if kind == "vertex":
            if args[1] not in ("even", "odd"):
                raise GraphFormatError(f"line {lineno}: parity must be even or odd")
            vertices.append((args[0], Parity(args[1])))
        elif kind == "edge":
            edges.append((args[0], args[1]))
        elif kind == "branch":
            branches.append((args[0], args[1]))
        else:
            free.append(args[0])
    return DualGraph(tuple(vertices), tuple(edges), tuple(branches), tuple(free))


def format_graph(g: DualGraph, canonical: bool = False) -> str:
    """Serialise with declarations in sorted order; optionally renumbered."""
    if canonical:
        g = canonical_form(g)
    lines = [f"vertex {v} {p.value}" for v, p in g.vertices]
    lines += [f"edge {a} {b}" for a, b in g.edges]
    lines += [f"branch {b} {v}" for b, v in g.branches]
    lines += [f"freebranch {b}" for b in g.free_branches]
    return "\n".join(lines) + "\n"


def format_line(g: DualGraph, canonical: bool = False) -> str:
    """The same declarations on a single line, separated by ``; ``."""
    return "; ".join(format_graph(g, canonical).splitlines())


def to_dot(g: DualGraph, name: str = "G") -> str:
    """Graphviz source: filled circles for even curves, hollow for odd, boxes for branches."""
    out = [f"graph {name} {{", "  node [shape=circle, label=\"\", width=0.25];"]
    for v, p in g.vertices:
        style = "filled" if p is Parity.EVEN else "solid"
        out.append(f'  "{v}" [style={style}, fillcolor=black, xlabel="{v}"];')
    for b in g.branch_ids:
        out.append(f'  "{b}" [shape=square, label="{b}", width=0.3];')
    for a, b in g.edges:
        out.append(f'  "{a}" -- "{b}";')
    for b, v in g.branches:
        out.append(f'  "{v}" -- "{b}" [style=bold];')
    out.append("}")
    return "\n".join(out) + "\n"
