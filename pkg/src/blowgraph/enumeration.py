"""Standard forms for fixed branch count and mu', their classification, and
the trunk-type placement counts for three branches.

Standard forms are generated from constraints rather than from pictures:
every unlabelled tree with at most ``k + n`` leaves is grown by leaf
addition, branches are distributed over its vertices, and the parities left
free by P1/P2 are tried exhaustively. A candidate is kept when it is
contractible, admits no C1/C2/C3/M1 move and has exactly ``k`` Q vertices
with mu' = k.
"""

from __future__ import annotations

import enum
import itertools
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .graph_core import DualGraph, GraphError, Parity, _code_unchecked, canonical_form, validate
from .gf2 import _rank_rows, is_contractible
from .invariants import canonical_delta_table, delta_table, mu_prime, pair_signature
from .moves import equivalent, is_fixpoint

__all__ = [
    "TrunkType",
    "ClassInfo",
    "ClassificationReport",
    "enumerate_standard",
    "standard_forms_of_size",
    "stable_vmax",
    "classify",
    "trunk_type",
    "upper_bound",
    "type_counts",
    "raw_placements",
    "raw_configurations",
    "written_case_sums",
    "extremal_kinds_ok",
    "class_label",
]


class TrunkType(enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"


# -- unlabelled trees ---------------------------------------------------------


def _tree_code(adj: Sequence[Sequence[int]]) -> str:
    n = len(adj)
    if n == 1:
        return "()"
    deg = [len(a) for a in adj]
    layer = [v for v in range(n) if deg[v] == 1]
    remaining = n
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            for w in adj[v]:
                deg[w] -= 1
                if deg[w] == 1:
                    nxt.append(w)
        layer = nxt

    def enc(v: int, parent: int) -> str:
        return "(" + "".join(sorted(enc(w, v) for w in adj[v] if w != parent)) + ")"

    return min(enc(c, -1) for c in layer)


_TREE_CACHE: dict[tuple[int, int], list[tuple[tuple[int, ...], ...]]] = {}


def _trees(size: int, max_leaves: int) -> list[tuple[tuple[int, ...], ...]]:
    """Unlabelled trees on ``size`` vertices with at most ``max_leaves`` leaves.

    Leaf addition never lowers the leaf count, so pruning on it is safe.
    """
    key = (size, max_leaves)
    if key in _TREE_CACHE:
        return _TREE_CACHE[key]
    if size == 1:
        return [((),)]
    out: dict[str, tuple[tuple[int, ...], ...]] = {}
    for tree in _trees(size - 1, max_leaves):
        for v in range(size - 1):
            adj = [list(a) for a in tree] + [[v]]
            adj[v].append(size - 1)
            if sum(1 for a in adj if len(a) == 1) > max_leaves:
                continue
            code = _tree_code(adj)
            if code not in out:
                out[code] = tuple(tuple(a) for a in adj)
    result = [out[c] for c in sorted(out)]
    _TREE_CACHE[key] = result
    return result


# -- standard forms -------------------------------------------------------------


def extremal_kinds_ok(g: DualGraph) -> bool:
    """Every extremal vertex is of one of the four kinds allowed in a standard form.

    Q; carrying two or more branches; even with one branch next to a vertex
    carrying a branch; even with one branch next to a vertex of degree >= 3.
    """
    for v in g.vertex_ids:
        if g.degree(v) != 1:
            continue
        nb = len(g.branches_at.get(v, ()))
        even = g.parity[v] is Parity.EVEN
        if nb == 0 and even:
            continue
        if nb >= 2:
            continue
        if nb == 1 and even:
            (u,) = g.adjacency[v]
            if g.branches_at.get(u) or g.degree(u) >= 3:
                continue
        return False
    return True


def _graph_from(adj, parities, counts, n: int) -> DualGraph:
    names = [f"v{i + 1}" for i in range(len(adj))]
    branches = []
    k = 0
    for v, c in enumerate(counts):
        for _ in range(c):
            k += 1
            branches.append((f"b{k}", names[v]))
    edges = [(names[a], names[b]) for a in range(len(adj)) for b in adj[a] if a < b]
    return DualGraph(
        vertices=tuple((names[i], Parity.ODD if parities[i] else Parity.EVEN) for i in range(len(adj))),
        edges=tuple(edges),
        branches=tuple(branches),
    )


def _forms_for_tree(args) -> dict[str, DualGraph]:
    adj, n, k = args
    size = len(adj)
    deg = [len(a) for a in adj]
    leaves = [v for v in range(size) if deg[v] <= 1]
    out: dict[str, DualGraph] = {}
    for combo in itertools.combinations_with_replacement(range(size), n):
        counts = [0] * size
        for v in combo:
            counts[v] += 1
        star = [deg[v] + counts[v] for v in range(size)]
        qs = [v for v in range(size) if deg[v] == 1 and counts[v] == 0]
        if len(qs) != k:
            continue
        if size == 1 and star[0] < 3:
            # A lone curve with fewer than three branches always contracts.
            continue
        special = [star[v] >= 3 for v in range(size)]
        # Non-special curves are even; two adjacent ones would admit C3.
        if any(not special[a] and not special[b] for a in range(size) for b in adj[a] if a < b):
            continue
        forced_even = set(qs)
        for q in qs:
            forced_even.update(adj[q])
        free = [v for v in range(size) if special[v] and v not in forced_even]
        base_rows = [0] * size
        for a in range(size):
            for b in adj[a]:
                base_rows[a] |= 1 << b
        for bits in range(1 << len(free)):
            parities = [0] * size
            for i, v in enumerate(free):
                parities[v] = bits >> i & 1
            rows = [base_rows[v] | (parities[v] << v) for v in range(size)]
            if _rank_rows(rows) != size:
                continue
            g = _graph_from(adj, parities, counts, n)
            if mu_prime(g) != k or not extremal_kinds_ok(g) or not is_fixpoint(g):
                continue
            code = _code_unchecked(g)
            if code not in out:
                out[code] = g
    return out


def standard_forms_of_size(n: int, k: int, size: int, workers: int = 1) -> dict[str, DualGraph]:
    """Standard forms with exactly ``size`` exceptional curves, keyed by canonical code."""
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    if size == 0:
        if k == 0 and n <= 2:
            g = DualGraph.empty([f"b{i + 1}" for i in range(n)])
            return {_code_unchecked(g): g}
        return {}
    jobs = [(tree, n, k) for tree in _trees(size, k + n)]
    found: dict[str, DualGraph] = {}
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_forms_for_tree, jobs, chunksize=8))
    else:
        parts = [_forms_for_tree(j) for j in jobs]
    for part in parts:
        for code, g in part.items():
            found.setdefault(code, g)
    return dict(sorted(found.items()))


def enumerate_standard(n: int, k: int, v_max: int, workers: int = 1) -> list[DualGraph]:
    """All standard forms up to isomorphism with ``n`` branches, mu' = k and at most ``v_max`` curves.

    Graphs are returned canonically relabelled, sorted by size then code.
    """
    out = []
    for size in range(v_max + 1):
        for code, g in standard_forms_of_size(n, k, size, workers).items():
            out.append(canonical_form(g))
    return out


def stable_vmax(n: int, k: int, budget: int = 24, workers: int = 1) -> int:
    """Smallest V with enumerate_standard(n, k, V) == enumerate_standard(n, k, V + 2).

    The scan starts at 2k: each Q is a leaf on its own neighbour, so no
    standard form is smaller, and an empty prefix must not count as stable.
    """
    counts: dict[int, int] = {}

    def count(size: int) -> int:
        if size not in counts:
            counts[size] = len(standard_forms_of_size(n, k, size, workers))
        return counts[size]

    for v in range(2 * k, budget + 1):
        if count(v + 1) == 0 and count(v + 2) == 0:
            return v
    raise RuntimeError(f"no stable size bound found up to {budget}")


# -- trunk types ----------------------------------------------------------------


def trunk_type(g: DualGraph) -> TrunkType:
    """Shape of the minimal subtree spanning the attachment curves of three branches."""
    if g.n_branches != 3 or g.free_branches:
        raise GraphError("trunk types are defined for three attached branches")
    problems = validate(g)
    if problems:
        raise GraphError("invalid graph: " + "; ".join(problems))
    from .invariants import _tree_path

    spots = sorted(set(g.attach.values()))
    if len(spots) == 1:
        return TrunkType.A
    if len(spots) == 2:
        return TrunkType.B
    a, b, c = spots
    for x, y, z in ((a, b, c), (b, a, c), (c, a, b)):
        if x in _tree_path(g, y, z):
            return TrunkType.C
    return TrunkType.D


# -- closed forms and placement counts -----------------------------------------------


def upper_bound(k: int) -> Fraction:
    """The headline bound (k^3 - 2k^2 - k + 11) * 2^(k-2) on tribranched standard forms."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return Fraction(k**3 - 2 * k**2 - k + 11) * Fraction(2) ** (k - 2)


def type_counts(k: int) -> tuple[int, int, int]:
    """Per-trunk totals (B, C, D) as stated in closed form, valid for k >= 3."""
    if k < 3:
        raise ValueError("the per-type totals are derived for k >= 3")
    b = 3 * 2**k
    c = (3 * k * k - 11 * k + 13) * 2 ** (k - 1)
    d = (k - 2) * (k * k - 3 * k + 4) * 2 ** (k - 1)
    return b, c, d


def _compositions(total: int, parts: int):
    if total < 0:
        return
    for cut in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cut + (total + parts - 1,):
            out.append(c - prev - 1)
            prev = c
        yield tuple(out)


class _Builder:
    def __init__(self):
        self.vertices: list[tuple[str, Parity]] = []
        self.edges: list[tuple[str, str]] = []
        self.branches: list[tuple[str, str]] = []

    def vertex(self, parity: Parity = Parity.EVEN) -> str:
        name = f"v{len(self.vertices) + 1}"
        self.vertices.append((name, parity))
        return name

    def branch(self, v: str) -> None:
        self.branches.append((f"b{len(self.branches) + 1}", v))

    def q(self, v: str) -> None:
        self.edges.append((v, self.vertex()))

    def arm(self, start: str, end: str, n_q: int, spacers: Sequence[int]) -> None:
        """Chain from ``start`` to ``end`` through ``n_q`` Q-bearing curves.

        ``spacers[i]`` (0 or 1) is the number of plain even curves in the i-th gap.
        """
        stops = [start] + [self.vertex() for _ in range(n_q)] + [end]
        for s in stops[1:-1]:
            self.q(s)
        for (x, y), gap in zip(zip(stops, stops[1:]), spacers):
            for _ in range(gap):
                mid = self.vertex()
                self.edges.append((x, mid))
                x = mid
            self.edges.append((x, y))

    def graph(self) -> DualGraph:
        return DualGraph(tuple(self.vertices), tuple(self.edges), tuple(self.branches))


def _bits(n: int):
    return itertools.product((0, 1), repeat=n)


def raw_configurations(k: int, trunk: TrunkType | str) -> list[DualGraph]:
    """Configurations counted in the case analysis for one trunk type, as graphs.

    Follows the cases exactly as argued for k >= 3: Q vertices on the named
    trunk curves or on the connecting chains, a gap of zero or one even curve
    between consecutive special curves, and both parities for the grey curve.
    No contractibility filtering is applied.
    """
    trunk = TrunkType(trunk)
    if trunk is TrunkType.A:
        if k >= 2:
            raise ValueError("trunk type A only carries k = 0 or k = 1")
        raise ValueError("placement counts are derived for trunk types B, C, D")
    if k < 3:
        raise ValueError("placement counts are derived for k >= 3")
    out = []
    for grey in (Parity.EVEN, Parity.ODD):
        if trunk is TrunkType.B:
            # a: one branch and a Q; b: two branches, grey, optional Q.
            for q_on_b in (True, False):
                middle = k - 2 if q_on_b else k - 1
                for gaps in _bits(middle + 1):
                    bld = _Builder()
                    a, b = bld.vertex(), bld.vertex(grey)
                    bld.branch(a)
                    bld.branch(b)
                    bld.branch(b)
                    bld.q(a)
                    if q_on_b:
                        bld.q(b)
                    bld.arm(a, b, middle, gaps)
                    out.append(bld.graph())
        elif trunk is TrunkType.C:
            # a - c - b with one branch each; c is grey.
            cases = []
            for q_on_c in (False, True):
                rest = k - 2 - q_on_c
                for left, right in _compositions(rest, 2):
                    cases.append((True, q_on_c, left, right))
            cases.append((False, False, k - 1, 0))
            for q_on_b, q_on_c, left, right in cases:
                right_gaps = list(_bits(right + 1)) if q_on_b else [(0,)]
                for lg in _bits(left + 1):
                    for rg in right_gaps:
                        bld = _Builder()
                        a, c, b = bld.vertex(), bld.vertex(grey), bld.vertex()
                        for v in (a, c, b):
                            bld.branch(v)
                        bld.q(a)
                        if q_on_b:
                            bld.q(b)
                        if q_on_c:
                            bld.q(c)
                        bld.arm(a, c, left, lg)
                        bld.arm(c, b, right, rg)
                        out.append(bld.graph())
        else:
            # centre d (grey) with arms to a, b, c carrying one branch each.
            cases = []
            for q_on_d in (False, True):
                for arms in _compositions(k - 3 - q_on_d, 3):
                    cases.append((True, q_on_d, arms))
            for a_arm, b_arm in _compositions(k - 2, 2):
                cases.append((False, False, (a_arm, b_arm, 0)))
            for q_on_c, q_on_d, arms in cases:
                gap_sets = [list(_bits(arms[0] + 1)), list(_bits(arms[1] + 1))]
                gap_sets.append(list(_bits(arms[2] + 1)) if q_on_c else [(0,)])
                for ga, gb, gc in itertools.product(*gap_sets):
                    bld = _Builder()
                    d = bld.vertex(grey)
                    a, b, c = bld.vertex(), bld.vertex(), bld.vertex()
                    for v in (a, b, c):
                        bld.branch(v)
                    bld.q(a)
                    bld.q(b)
                    if q_on_c:
                        bld.q(c)
                    if q_on_d:
                        bld.q(d)
                    bld.arm(a, d, arms[0], ga)
                    bld.arm(b, d, arms[1], gb)
                    bld.arm(c, d, arms[2], gc)
                    out.append(bld.graph())
    return out


def raw_placements(k: int, trunk: TrunkType | str) -> int:
    """Number of configurations produced by :func:`raw_configurations`."""
    return len(raw_configurations(k, trunk))


def written_case_sums(k: int, trunk: TrunkType | str) -> int:
    """Evaluate the per-case sums term by term (not their closed forms)."""
    trunk = TrunkType(trunk)
    if k < 3 or trunk is TrunkType.A:
        raise ValueError("sums are written for trunk types B, C, D and k >= 3")
    if trunk is TrunkType.B:
        inner = 2 ** (k - 1) + 2**k
    elif trunk is TrunkType.C:
        both = sum(2 ** (a + 1) * 2 ** (b + 1) for a, b in _compositions(k - 2, 2))
        both += sum(2 ** (a + 1) * 2 ** (b + 1) for a, b in _compositions(k - 3, 2))
        inner = both + 2**k
    else:
        three = sum(2 ** (a + b + c + 3) for a, b, c in _compositions(k - 3, 3))
        three += sum(2 ** (a + b + c + 3) for a, b, c in _compositions(k - 4, 3))
        inner = three + sum(2 ** (a + 1) * 2 ** (b + 1) for a, b in _compositions(k - 2, 2))
    return 2 * inner


# -- classification --------------------------------------------------------------------


def _invariant_key(g: DualGraph) -> tuple:
    sig = pair_signature(g).values if g.n_branches >= 2 else ()
    return (mu_prime(g), sig, canonical_delta_table(g))


@dataclass
class ClassInfo:
    representative: DualGraph
    members: list[DualGraph]
    mu_prime: int
    signature: tuple[int, ...]
    delta: dict[tuple[str, str], tuple[str, ...]]
    trunk: TrunkType | None
    label: str | None = None


@dataclass
class ClassificationReport:
    classes: list[ClassInfo]
    unresolved: list[tuple[str, str]] = field(default_factory=list)
    depth: int = 0

    @property
    def signatures(self) -> list[tuple[int, ...]]:
        return sorted(c.signature for c in self.classes)

    def summary(self) -> str:
        sigs = ";".join("{" + ",".join(map(str, s)) + "}" for s in self.signatures)
        return f"classes={len(self.classes)} signatures={sigs}"


def _size_key(g: DualGraph):
    return (g.n_vertices, _code_unchecked(g))


def classify(
    graphs: Iterable[DualGraph],
    depth: int = 4,
    node_budget: int = 10**6,
    workers: int = 1,
) -> ClassificationReport:
    """Group graphs by invariants, then merge within a group by bounded search.

    Graphs sharing mu', the pair signature and the branch-relabelled
    component table are joined when :func:`equivalent` finds a common graph
    within ``depth`` blow-ups per side. Groups that stay apart despite equal
    invariants are listed in ``unresolved``.
    """
    graphs = list(graphs)
    if not graphs:
        return ClassificationReport([], [], depth)
    ns = {g.n_branches for g in graphs}
    if len(ns) != 1:
        raise GraphError("classify needs graphs with the same number of branches")
    for g in graphs:
        if not is_contractible(g):
            raise GraphError("classify needs contractible graphs")

    unique: dict[str, DualGraph] = {}
    for g in sorted(graphs, key=_size_key):
        unique.setdefault(_code_unchecked(g), g)
    reps = list(unique.values())
    if workers > 1 and len(reps) > 1:
        with ProcessPoolExecutor(workers) as pool:
            keys = list(pool.map(_invariant_key, reps))
    else:
        keys = [_invariant_key(g) for g in reps]
    cells: dict[tuple, list[DualGraph]] = defaultdict(list)
    for key, g in zip(keys, reps):
        cells[key].append(g)

    classes: list[ClassInfo] = []
    unresolved: list[tuple[str, str]] = []
    for key in sorted(cells, key=repr):
        groups: list[list[DualGraph]] = []
        for g in cells[key]:
            for group in groups:
                if equivalent(group[0], g, depth, node_budget).equivalent:
                    group.append(g)
                    break
            else:
                groups.append([g])
        for i, j in itertools.combinations(range(len(groups)), 2):
            unresolved.append((_code_unchecked(groups[i][0]), _code_unchecked(groups[j][0])))
        for group in groups:
            rep = group[0]
            sig = key[1]
            table = {p: d.codes for p, d in delta_table(rep).items()}
            trunk = trunk_type(rep) if rep.n_branches == 3 and not rep.free_branches else None
            classes.append(ClassInfo(rep, group, key[0], sig, table, trunk, class_label(rep)))
    classes.sort(key=lambda c: (c.mu_prime, c.signature, _size_key(c.representative)))
    return ClassificationReport(classes, unresolved, depth)


# Tribranched classes and their pair-component multisets, as (corank, branch count)
# lists per pair; keyed by mu'. Pair order within a class is irrelevant.
_DOT, _CROSS = (1, 0), (0, 1)
_KNOWN_PATTERNS = {
    0: {
        "A_0": [[_CROSS], [_CROSS], [_CROSS]],
        "B_0": [[_CROSS], [_CROSS], [(1, 1)]],
    },
    1: {
        "A_2": [[_DOT, _CROSS]] * 3,
        "B_4": [[_DOT, _CROSS], [_DOT, _CROSS], [(1, 1)]],
    },
    2: {
        "B_2": [[_DOT, _DOT, _CROSS], [_DOT, _DOT, _CROSS], [_DOT, _CROSS]],
        "B_12": [[_DOT, _DOT, _CROSS], [_DOT, _DOT, _CROSS], [(1, 1)]],
        "C_4": [[_DOT, _CROSS], [_DOT, (1, 1)], [_DOT, _DOT, _CROSS]],
    },
}
_KNOWN_SIGNATURES = {
    (0, (0, 0, 0)): ["A_0"],
    (0, (0, 0, 1)): ["B_0"],
    (1, (1, 1, 1)): ["A_2", "B_4"],
    (1, (0, 1, 1)): ["B_1"],
    (1, (0, 1, 2)): ["C_2"],
    (2, (1, 2, 2)): ["B_2", "B_12", "C_4"],
    (2, (0, 2, 2)): ["B_5"],
    (2, (1, 1, 2)): ["C_1"],
    (2, (0, 2, 3)): ["C_8"],
    (2, (1, 1, 3)): ["D_2"],
}


def _pattern(g: DualGraph) -> list[list[tuple[int, int]]]:
    return sorted(sorted(list(d.keys)) for d in delta_table(g).values())


def class_label(g: DualGraph) -> str | None:
    """Name of the tribranched class (mu' <= 2) whose invariants ``g`` matches, if any."""
    if g.n_branches != 3 or g.free_branches:
        return None
    k = mu_prime(g)
    names = _KNOWN_SIGNATURES.get((k, pair_signature(g).values))
    if not names:
        return None
    if len(names) == 1:
        return names[0]
    mine = _pattern(g)
    for name in names:
        want = sorted(sorted(p) for p in _KNOWN_PATTERNS[k][name])
        if mine == want:
            return name
    return None
