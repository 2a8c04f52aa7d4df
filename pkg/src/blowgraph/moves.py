"""Blow-ups, blow-downs and the composite moves C1, C2, C3, M1 on dual graphs.

Parity bookkeeping follows two facts about real surfaces: blowing up a point
on a curve flips that curve's parity, and blowing down an odd curve flips the
parity of every curve through the contracted point. Each composite move below
is the net effect of such steps; the tests re-derive C3 and M1 from the
elementary steps.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph_core import (
    DualGraph,
    GraphError,
    Parity,
    _code_unchecked,
    canonical_order,
    id_key,
    validate,
)
from .gf2 import is_contractible

__all__ = [
    "Move",
    "MoveTrace",
    "MoveError",
    "ReductionError",
    "Verdict",
    "BLOWUP_KINDS",
    "CONTRACTION_KINDS",
    "apply",
    "check",
    "blowup_moves",
    "contraction_moves",
    "reduce",
    "is_standard",
    "is_fixpoint",
    "equivalent",
    "random_resolution",
    "random_germ_resolution",
    "replay",
]

BLOWUP_EDGE = "blowup-edge"
BLOWUP_FREE = "blowup-free"
BLOWUP_BRANCH = "blowup-branch"
BLOWUP_ORIGIN = "blowup-origin"
BLOWUP_KINDS = (BLOWUP_EDGE, BLOWUP_FREE, BLOWUP_BRANCH, BLOWUP_ORIGIN)
CONTRACTION_KINDS = ("C1", "C2", "C3", "M1")
_ARITY = {BLOWUP_EDGE: 2, BLOWUP_FREE: 1, BLOWUP_BRANCH: 1, BLOWUP_ORIGIN: 0, "C1": 1, "C2": 1, "C3": 2, "M1": 2}


class MoveError(ValueError):
    """A move was applied where its applicability predicate fails."""


class ReductionError(RuntimeError):
    """Reduction exceeded its step budget."""


@dataclass(frozen=True)
class Move:
    kind: str
    args: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise MoveError(f"unknown move kind {self.kind!r}")
        if len(self.args) != _ARITY[self.kind]:
            raise MoveError(f"{self.kind} takes {_ARITY[self.kind]} argument(s)")

    def __str__(self) -> str:
        return " ".join((self.kind,) + self.args)

    @classmethod
    def parse(cls, text: str) -> Move:
        parts = text.split()
        if not parts:
            raise MoveError("empty move")
        return cls(parts[0], tuple(parts[1:]))

    @property
    def is_blowup(self) -> bool:
        return self.kind in BLOWUP_KINDS


@dataclass
class MoveTrace:
    """Moves with the branch-labelled canonical code reached after each one."""

    steps: list[tuple[Move, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def append(self, move: Move, code: str) -> None:
        self.steps.append((move, code))

    @property
    def moves(self) -> list[Move]:
        return [m for m, _ in self.steps]

    def dumps(self) -> str:
        return "".join(f"{m} code={c}\n" for m, c in self.steps)

    @classmethod
    def loads(cls, text: str) -> MoveTrace:
        trace = cls()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            code = None
            if parts[-1].startswith("code="):
                code = parts.pop()[len("code="):]
            try:
                move = Move(parts[0], tuple(parts[1:]))
            except MoveError as exc:
                raise MoveError(f"line {lineno}: {exc}") from None
            trace.append(move, code)
        return trace


# -- mutable working copy ---------------------------------------------------


class _Work:
    __slots__ = ("parity", "adj", "attach", "free")

    def __init__(self, g: DualGraph):
        self.parity = dict(g.parity)
        self.adj = {v: set(ns) for v, ns in g.adjacency.items()}
        self.attach = dict(g.attach)
        self.free = list(g.free_branches)

    def flip(self, v: str) -> None:
        self.parity[v] = self.parity[v].flip()

    def fresh(self) -> str:
        k = 1
        while f"v{k}" in self.parity:
            k += 1
        return f"v{k}"

    def remove(self, v: str) -> None:
        for w in self.adj.pop(v):
            self.adj[w].discard(v)
        del self.parity[v]

    def link(self, a: str, b: str) -> None:
        self.adj[a].add(b)
        self.adj[b].add(a)

    def freeze(self) -> DualGraph:
        edges = {(a, b) if id_key(a) <= id_key(b) else (b, a) for a, ns in self.adj.items() for b in ns}
        return DualGraph(
            vertices=tuple(self.parity.items()),
            edges=tuple(edges),
            branches=tuple(self.attach.items()),
            free_branches=tuple(self.free),
        )


def _star_neighbors(g: DualGraph, v: str) -> list[tuple[str, str]]:
    """Gamma*-neighbours of ``v`` as ``("v", id)`` or ``("b", id)`` tags."""
    return [("v", w) for w in g.adjacency[v]] + [("b", b) for b in g.branches_at.get(v, ())]


def _is_q(g: DualGraph, v: str) -> bool:
    return g.parity[v] is Parity.EVEN and g.degree(v) == 1 and not g.branches_at.get(v)


# -- applicability ----------------------------------------------------------


def check(g: DualGraph, m: Move) -> str | None:
    """Return the failed applicability predicate, or ``None`` if ``m`` applies."""
    a = m.args
    for v in a if m.kind not in (BLOWUP_BRANCH,) else ():
        if v not in g.parity:
            return f"unknown vertex {v}"
    if m.kind == BLOWUP_EDGE:
        if a[1] not in g.adjacency[a[0]]:
            return f"no edge {a[0]}-{a[1]}"
    elif m.kind == BLOWUP_BRANCH:
        if a[0] not in g.attach:
            return f"branch {a[0]} is not attached"
    elif m.kind == BLOWUP_ORIGIN:
        if g.vertices:
            return "origin blow-up needs an empty exceptional set"
    elif m.kind in ("C1", "C2"):
        v = a[0]
        if g.parity[v] is not Parity.ODD:
            return f"{v} is not odd"
        star = g.star_valency(v)
        if m.kind == "C1" and not (star == 1 or (star == 0 and g.n_vertices == 1 and not g.free_branches)):
            return f"{v} has valency {star} in the extended graph, C1 needs 1"
        if m.kind == "C2" and star != 2:
            return f"{v} has valency {star} in the extended graph, C2 needs 2"
    elif m.kind == "C3":
        v, w = a
        if w not in g.adjacency[v]:
            return f"{v} and {w} are not adjacent"
        for x in (v, w):
            if g.parity[x] is not Parity.EVEN:
                return f"{x} is not even"
            if g.star_valency(x) > 2:
                return f"{x} has valency {g.star_valency(x)} in the extended graph, C3 needs at most 2"
    elif m.kind == "M1":
        q, v = a
        if not _is_q(g, q):
            return f"{q} is not a Q vertex"
        if v not in g.adjacency[q]:
            return f"{v} is not the neighbour of {q}"
        if g.parity[v] is not Parity.ODD:
            return f"{v} is not odd"
    return None


def apply(g: DualGraph, m: Move) -> DualGraph:
    """Apply one move and return the new graph.

    New exceptional curves get the smallest unused id of the form ``v<k>``,
    so replaying a move sequence reproduces the same ids.
    """
    failure = check(g, m)
    if failure is not None:
        raise MoveError(f"{m}: {failure}")
    w = _Work(g)
    a = m.args
    kind = m.kind
    if kind == BLOWUP_EDGE:
        x, y = a
        new = w.fresh()
        w.adj[x].discard(y)
        w.adj[y].discard(x)
        w.parity[new] = Parity.ODD
        w.adj[new] = set()
        w.link(x, new)
        w.link(new, y)
        w.flip(x)
        w.flip(y)
    elif kind == BLOWUP_FREE:
        (v,) = a
        new = w.fresh()
        w.parity[new] = Parity.ODD
        w.adj[new] = set()
        w.link(v, new)
        w.flip(v)
    elif kind == BLOWUP_BRANCH:
        (b,) = a
        v = w.attach[b]
        new = w.fresh()
        w.parity[new] = Parity.ODD
        w.adj[new] = set()
        w.link(v, new)
        w.attach[b] = new
        w.flip(v)
    elif kind == BLOWUP_ORIGIN:
        new = w.fresh()
        w.parity[new] = Parity.ODD
        w.adj[new] = set()
        for b in w.free:
            w.attach[b] = new
        w.free = []
    elif kind in ("C1", "C2"):
        (v,) = a
        _contract(w, g, v)
    elif kind == "C3":
        v, x = a
        outer = []
        for y, other in ((v, x), (x, v)):
            outer.extend(t for t in _star_neighbors(g, y) if t != ("v", other))
        w.remove(v)
        w.remove(x)
        verts = [t[1] for t in outer if t[0] == "v"]
        brs = [t[1] for t in outer if t[0] == "b"]
        if len(verts) == 2:
            w.link(verts[0], verts[1])
        elif len(verts) == 1:
            for b in brs:
                w.attach[b] = verts[0]
        else:
            for b in brs:
                del w.attach[b]
                w.free.append(b)
    elif kind == "M1":
        _, v = a
        w.flip(v)
    return w.freeze()


def _contract(w: _Work, g: DualGraph, v: str) -> None:
    """Blow down the odd curve ``v`` of extended valency at most 2."""
    nbrs = _star_neighbors(g, v)
    w.remove(v)
    verts = [t[1] for t in nbrs if t[0] == "v"]
    brs = [t[1] for t in nbrs if t[0] == "b"]
    for u in verts:
        w.flip(u)
    if len(verts) == 2:
        w.link(verts[0], verts[1])
    elif len(verts) == 1:
        for b in brs:
            w.attach[b] = verts[0]
    else:
        for b in brs:
            del w.attach[b]
            w.free.append(b)


# -- move enumeration ---------------------------------------------------------


def blowup_moves(g: DualGraph) -> list[Move]:
    if not g.vertices:
        return [Move(BLOWUP_ORIGIN)]
    out = [Move(BLOWUP_EDGE, e) for e in g.edges]
    out += [Move(BLOWUP_FREE, (v,)) for v in g.vertex_ids]
    out += [Move(BLOWUP_BRANCH, (b,)) for b, _ in g.branches]
    return out


def contraction_moves(g: DualGraph, kinds: Iterable[str] = CONTRACTION_KINDS) -> list[Move]:
    kinds = set(kinds)
    out = []
    n = g.n_vertices
    for v in g.vertex_ids:
        p = g.parity[v]
        star = g.star_valency(v)
        if p is Parity.ODD:
            if "C1" in kinds and (star == 1 or (star == 0 and n == 1 and not g.free_branches)):
                out.append(Move("C1", (v,)))
            elif "C2" in kinds and star == 2:
                out.append(Move("C2", (v,)))
        elif star <= 2:
            if "C3" in kinds:
                for x in g.adjacency[v]:
                    if id_key(v) < id_key(x) and g.parity[x] is Parity.EVEN and g.star_valency(x) <= 2:
                        out.append(Move("C3", (v, x)))
            if "M1" in kinds and _is_q(g, v):
                (x,) = g.adjacency[v]
                if g.parity[x] is Parity.ODD:
                    out.append(Move("M1", (v, x)))
    return out


def is_fixpoint(g: DualGraph) -> bool:
    """True when none of C1, C2, C3, M1 applies."""
    return not contraction_moves(g)


# -- reduction ---------------------------------------------------------------


def _pick(g: DualGraph, moves: Sequence[Move], rng: random.Random | None) -> Move:
    if rng is not None:
        return rng.choice(list(moves))
    rank = {v: i for i, v in enumerate(canonical_order(g, branch_labels=True))}
    return min(moves, key=lambda m: (tuple(rank[x] for x in m.args), m.kind))


def reduce(
    g: DualGraph,
    rng: random.Random | None = None,
    step_budget: int | None = None,
) -> tuple[DualGraph, MoveTrace]:
    """Reduce a contractible graph to a standard form.

    Contract with C1/C2/C3 until none applies, then apply M1 until none
    applies, and repeat. By default the move touching the vertex with the
    smallest canonical index is taken; pass ``rng`` to choose at random.
    """
    problems = validate(g)
    if problems:
        raise GraphError("invalid graph: " + "; ".join(problems))
    if not is_contractible(g):
        raise MoveError("graph is not smoothly contractible")
    if step_budget is None:
        step_budget = 4 * (g.n_vertices + 1) ** 2 + 16
    trace = MoveTrace()
    steps = 0
    while True:
        cmoves = contraction_moves(g, ("C1", "C2", "C3"))
        phase = cmoves if cmoves else contraction_moves(g, ("M1",))
        if not phase:
            return g, trace
        m = _pick(g, phase, rng)
        g = apply(g, m)
        trace.append(m, _code_unchecked(g, True))
        steps += 1
        if not cmoves:
            # Finish the M1 phase before returning to contractions.
            while True:
                more = contraction_moves(g, ("M1",))
                if not more:
                    break
                m = _pick(g, more, rng)
                g = apply(g, m)
                trace.append(m, _code_unchecked(g, True))
                steps += 1
        if steps > step_budget:
            raise ReductionError(f"reduction exceeded {step_budget} steps")


def _special_paths(g: DualGraph, special: set[str]):
    """Interiors of tree paths joining two special vertices through non-special ones."""
    for s in special:
        for first in g.adjacency[s]:
            prev, cur, interior = s, first, []
            while cur not in special:
                interior.append(cur)
                nxt = [x for x in g.adjacency[cur] if x != prev]
                if len(nxt) != 1:
                    interior = None
                    break
                prev, cur = cur, nxt[0]
            if interior is not None and id_key(s) < id_key(cur):
                yield s, cur, interior


def is_standard(g: DualGraph) -> tuple[bool, list[str]]:
    """Check the four standard-form properties, returning the violated ones.

    P1: every non-special vertex is even. P2: every special vertex adjacent
    to a Q vertex is even. P3: between two special vertices lies at most one
    (even) vertex. P4: the number of Q vertices equals mu'.
    """
    from .invariants import mu_prime

    problems = validate(g)
    if problems:
        raise GraphError("invalid graph: " + "; ".join(problems))
    if not is_contractible(g):
        raise MoveError("graph is not smoothly contractible")
    if g.n_branches < 1:
        raise MoveError("standard forms are defined for germs with at least one branch")
    special = {v for v in g.vertex_ids if g.star_valency(v) >= 3}
    qs = [v for v in g.vertex_ids if _is_q(g, v)]
    violated = []
    if any(g.parity[v] is Parity.ODD for v in g.vertex_ids if v not in special):
        violated.append("P1")
    if any(
        g.parity[v] is Parity.ODD and any(_is_q(g, x) for x in g.adjacency[v]) for v in special
    ):
        violated.append("P2")
    for _, _, interior in _special_paths(g, special):
        if len(interior) > 1 or any(g.parity[x] is Parity.ODD for x in interior):
            violated.append("P3")
            break
    if len(qs) != mu_prime(g):
        violated.append("P4")
    return not violated, violated


# -- bounded equivalence search ---------------------------------------------


@dataclass
class Verdict:
    """Outcome of :func:`equivalent`.

    When ``equivalent`` is true, replaying ``first`` from the first graph and
    ``second`` from the second graph ends in isomorphic graphs.
    """

    equivalent: bool
    depth: int
    first: MoveTrace = field(default_factory=MoveTrace)
    second: MoveTrace = field(default_factory=MoveTrace)
    explored: int = 0

    def __bool__(self) -> bool:
        return self.equivalent


class _Side:
    def __init__(self, g: DualGraph):
        code = _code_unchecked(g)
        self.graph = {code: g}
        self.parent: dict[str, tuple[str, Move] | None] = {code: None}
        self.cost = {code: 0}
        self.levels: dict[int, deque[str]] = {0: deque([code])}
        self.done: set[str] = set()

    def trace(self, code: str) -> MoveTrace:
        chain = []
        while self.parent[code] is not None:
            prev, move = self.parent[code]
            chain.append((move, code))
            code = prev
        out = MoveTrace()
        for move, c in reversed(chain):
            out.append(move, _code_unchecked(self.graph[c], True))
        return out


def equivalent(
    g1: DualGraph,
    g2: DualGraph,
    depth: int = 4,
    node_budget: int = 10**6,
) -> Verdict:
    """Search for a common graph reachable from both inputs.

    Contractions (C1, C2, C3, M1) are free and tried in every order; each
    side may additionally use at most ``depth`` blow-ups. States are
    deduplicated by canonical code with branch names erased. Returns a
    negative verdict when nothing meets within the bounds; distinctness is
    never claimed.
    """
    for g in (g1, g2):
        problems = validate(g)
        if problems:
            raise GraphError("invalid graph: " + "; ".join(problems))
    sides = (_Side(g1), _Side(g2))
    start = next(iter(sides[0].graph))
    if start in sides[1].graph:
        return Verdict(True, 0, explored=2)
    explored = 2

    def meet(code: str, me: int) -> Verdict | None:
        other = sides[1 - me]
        if code not in other.graph:
            return None
        first, second = (sides[0].trace(code), sides[1].trace(code))
        used = max(sides[0].cost[code], sides[1].cost[code])
        return Verdict(True, used, first, second, explored)

    for level in range(depth + 1):
        for me, side in enumerate(sides):
            queue = side.levels.get(level, deque())
            while queue:
                code = queue.popleft()
                if code in side.done:
                    continue
                side.done.add(code)
                g = side.graph[code]
                succ = [(m, 0) for m in contraction_moves(g)]
                if level < depth:
                    succ += [(m, 1) for m in blowup_moves(g)]
                for m, c in succ:
                    h = apply(g, m)
                    hc = _code_unchecked(h)
                    cost = level + c
                    if hc in side.cost and side.cost[hc] <= cost:
                        continue
                    side.graph[hc] = h
                    side.parent[hc] = (code, m)
                    side.cost[hc] = cost
                    side.levels.setdefault(cost, deque()).append(hc)
                    explored += 1
                    found = meet(hc, me)
                    if found is not None:
                        found.explored = explored
                        return found
                    if explored >= node_budget:
                        return Verdict(False, level, explored=explored)
    return Verdict(False, depth, explored=explored)


# -- random resolutions and replay -------------------------------------------


def random_resolution(n: int, steps: int, seed: int) -> DualGraph:
    """A random good resolution: one blow-up at the origin, then ``steps`` more.

    Starts from a single odd curve carrying all ``n`` branches and applies
    uniformly chosen blow-ups at edges, generic points and branch points.
    """
    rng = random.Random(seed)
    g = DualGraph(vertices=(("v1", Parity.ODD),), branches=tuple((f"b{i + 1}", "v1") for i in range(n)))
    for _ in range(steps):
        g = apply(g, rng.choice(blowup_moves(g)))
    return g


def random_germ_resolution(n: int, steps: int, seed: int) -> DualGraph:
    """A random good resolution of an ``n``-branch germ with random tangencies.

    Starting from ``n`` branches through the origin, repeatedly blow up a
    point still shared by several branches (or where a branch meets a
    crossing of two curves). The branches through it are spread over the new
    curve: into groups at distinct generic points, or at its crossings with
    the curves that passed through the point. A lone branch at a generic
    point is separated. After ``steps`` blow-ups every remaining cluster is
    split at the next blow-up, so at most ``steps + n`` curves are created.
    """
    if n < 1:
        raise ValueError("need at least one branch")
    rng = random.Random(seed)
    w = _Work(DualGraph(free_branches=tuple(f"b{i + 1}" for i in range(n))))
    w.free = []
    # Pending clusters: (branches, curves through their common point).
    pending: list[tuple[list[str], tuple[str, ...]]] = [([f"b{i + 1}" for i in range(n)], ())]
    used = 0
    while pending:
        pending.sort(key=lambda c: (c[1], c[0]))
        branches, through = pending.pop(rng.randrange(len(pending)))
        new = w.fresh()
        w.parity[new] = Parity.ODD
        w.adj[new] = set()
        if len(through) == 2:
            w.adj[through[0]].discard(through[1])
            w.adj[through[1]].discard(through[0])
        for v in through:
            w.link(v, new)
            w.flip(v)
        used += 1
        force = used >= steps
        order = branches[:]
        rng.shuffle(order)
        groups: list[list[str]] = []
        for b in order:
            if groups and not force and rng.random() < 0.5:
                rng.choice(groups).append(b)
            else:
                groups.append([b])
        corners = list(through)
        for grp in groups:
            if not force and corners and rng.random() < 0.3:
                v = corners.pop(rng.randrange(len(corners)))
                pending.append((grp, tuple(sorted((v, new), key=id_key))))
            elif len(grp) == 1 and (force or rng.random() < 0.6):
                w.attach[grp[0]] = new
            else:
                pending.append((grp, (new,)))
    return w.freeze()


def replay(g: DualGraph, trace: MoveTrace) -> DualGraph:
    """Apply ``trace`` to ``g``, checking each recorded canonical code."""
    for i, (move, code) in enumerate(trace, 1):
        try:
            g = apply(g, move)
        except MoveError as exc:
            raise MoveError(f"step {i}: {exc}") from None
        if code is not None and _code_unchecked(g, True) != code:
            raise MoveError(f"step {i}: canonical code mismatch after {move}")
    return g

