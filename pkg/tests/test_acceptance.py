"""Acceptance checks, one test (or parametrised family) per criterion.

Each check records a pass/fail line through the ``record`` fixture; the
terminal summary prints one line per criterion.
"""

from __future__ import annotations

import functools
import io
import itertools
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from blowgraph import (
    DualGraph,
    Gf2Matrix,
    TrunkType,
    apply,
    classify,
    corank,
    det,
    enumerate_standard,
    equivalent,
    is_contractible,
    is_isomorphic,
    is_standard,
    mu_prime,
    pair_signature,
    parse_graph,
    random_germ_resolution,
    random_resolution,
    raw_placements,
    reduce,
    stable_vmax,
    type_counts,
    upper_bound,
)
from blowgraph.cli import run
from blowgraph.invariants import canonical_delta_table, delta_table
from blowgraph.moves import blowup_moves

from conftest import CUSP

EMPTY_LINE = DualGraph(free_branches=("b1",))


def _classes(n, k, depth=4):
    vmax = stable_vmax(n, k)
    return classify(enumerate_standard(n, k, vmax), depth=depth)


# -- 1. chord counts -------------------------------------------------------------


def test_criterion_1_chord_counts(record):
    start = time.perf_counter()
    counts = {}
    for n in (1, 2, 3):
        out = io.StringIO()
        assert run(["chords", "-n", str(n)], out=out) == 0
        counts[n] = len(out.getvalue().split())
    elapsed = time.perf_counter() - start
    ok = counts == {1: 1, 2: 2, 3: 5} and elapsed < 1.0
    record(1, ok, f"counts={counts} time={elapsed:.2f}s")
    assert counts == {1: 1, 2: 2, 3: 5}
    assert elapsed < 1.0


# -- 2-4. classification for three branches --------------------------------------


def test_criterion_2_mu0(record):
    start = time.perf_counter()
    report = _classes(3, 0)
    elapsed = time.perf_counter() - start
    ok = len(report.classes) == 2 and not report.unresolved and elapsed < 10
    record(2, ok, f"classes={len(report.classes)} time={elapsed:.1f}s")
    assert len(report.classes) == 2
    assert not report.unresolved
    assert elapsed < 10


def _pattern(g):
    return sorted(sorted(d.keys) for d in delta_table(g).values())


def test_criterion_3_mu1(record):
    start = time.perf_counter()
    report = _classes(3, 1, depth=4)
    elapsed = time.perf_counter() - start
    sigs = report.signatures
    ones = [c for c in report.classes if c.signature == (1, 1, 1)]
    patterns = sorted(_pattern(c.representative) for c in ones)
    dot_cross = [[(0, 1), (1, 0)]] * 3
    lone = sorted([[(0, 1), (1, 0)], [(0, 1), (1, 0)], [(1, 1)]])
    separated = len(ones) == 2 and canonical_delta_table(ones[0].representative) != canonical_delta_table(
        ones[1].representative
    )
    ok = (
        len(report.classes) == 4
        and not report.unresolved
        and sigs == sorted([(1, 1, 1), (1, 1, 1), (0, 1, 1), (0, 1, 2)])
        and separated
        and patterns == sorted([dot_cross, lone])
        and elapsed < 120
    )
    record(3, ok, f"classes={len(report.classes)} signatures={sigs} time={elapsed:.1f}s")
    assert len(report.classes) == 4 and not report.unresolved
    assert sigs == sorted([(1, 1, 1), (1, 1, 1), (0, 1, 1), (0, 1, 2)])
    assert separated
    assert patterns == sorted([dot_cross, lone])
    assert elapsed < 120


def test_criterion_4_mu2(record):
    start = time.perf_counter()
    report = _classes(3, 2, depth=4)
    elapsed = time.perf_counter() - start
    want = sorted([(1, 2, 2)] * 3 + [(0, 2, 2), (1, 1, 2), (0, 2, 3), (1, 1, 3)])
    triple = [c.representative for c in report.classes if c.signature == (1, 2, 2)]
    tables = [canonical_delta_table(g) for g in triple]
    pairwise = len(triple) == 3 and len(set(tables)) == 3
    ok = len(report.classes) == 7 and not report.unresolved and report.signatures == want and pairwise and elapsed < 600
    record(4, ok, f"classes={len(report.classes)} time={elapsed:.1f}s")
    assert len(report.classes) == 7 and not report.unresolved
    assert report.signatures == want
    assert pairwise
    assert elapsed < 600


# -- 5. formula suite -------------------------------------------------------------


@pytest.mark.parametrize("trunk", [TrunkType.B, TrunkType.C, TrunkType.D])
@pytest.mark.parametrize("k", range(3, 9))
def test_criterion_5_type_counts_match_enumeration(k, trunk, record):
    formula = dict(zip((TrunkType.B, TrunkType.C, TrunkType.D), type_counts(k)))[trunk]
    counted = raw_placements(k, trunk)
    record(5, counted == formula, f"k={k} {trunk.value}: enumerated {counted} vs formula {formula}")
    assert counted == formula


@pytest.mark.parametrize("k", range(3, 11))
def test_criterion_5_sum_is_twice_bound(k, record):
    total = sum(type_counts(k))
    bound = upper_bound(k)
    ok = Fraction(total) == 2 * bound
    if not ok:
        record(5, False, f"k={k}: type total {total} is not 2*bound {2 * bound}")
    elif k == 3:
        record(5, True, f"finding: type totals equal twice the bound for k=3..10 (k=3: {total} = 2*{bound})")
    else:
        record(5, True)
    assert Fraction(total) == 2 * bound


# -- 6. invariance fuzz -------------------------------------------------------------


def _invariants(g):
    sig = pair_signature(g).values if g.n_branches >= 2 else ()
    return (is_contractible(g), mu_prime(g), sig, canonical_delta_table(g))


def _fuzz_case(make, seed):
    """Return a list of violation strings for one seeded resolution."""
    rng = random.Random(seed)
    n = 1 + seed % 4
    problems = []
    if make is random_resolution:
        g = random_resolution(n, 0, seed)
        extra = rng.randint(0, 24)
    else:
        g = random_germ_resolution(n, rng.randint(0, 12), seed)
        extra = rng.randint(0, max(0, 25 - g.n_vertices))
    ref = _invariants(g)
    if not ref[0]:
        problems.append(f"seed {seed}: det 0 at start")
    for _ in range(extra):
        m = rng.choice(blowup_moves(g))
        g = apply(g, m)
        if _invariants(g) != ref:
            problems.append(f"seed {seed}: {m} changed invariants")
            break
    if g.n_vertices > 25:
        problems.append(f"seed {seed}: {g.n_vertices} blow-ups")
    for order in (None, random.Random(seed)):
        h, trace = reduce(g, rng=order)
        cur = g
        for m, _ in trace:
            cur = apply(cur, m)
            if _invariants(cur) != ref:
                problems.append(f"seed {seed}: {m} changed invariants during reduce")
                break
        ok, violated = is_standard(h)
        q = sum(1 for v in h.vertex_ids if h.degree(v) == 1 and h.parity[v].bit == 0 and not h.branches_at.get(v))
        if not ok or q != ref[1]:
            problems.append(f"seed {seed}: reduce output violates {violated}, Q={q}, mu'={ref[1]}")
    return problems


@pytest.mark.parametrize("make", [random_resolution, random_germ_resolution], ids=["plain", "germ"])
def test_criterion_6_invariance_fuzz(make, record):
    problems = []
    for seed in range(1000):
        problems += _fuzz_case(make, seed)
    record(6, not problems, f"{make.__name__}: 1000 resolutions, {len(problems)} violations")
    assert not problems, problems[:5]


# -- 7. one branch --------------------------------------------------------------


def test_criterion_7_unibranched(record):
    graphs = [parse_graph(CUSP)]
    graphs += [random_resolution(1, random.Random(s).randint(0, 24), s) for s in range(200)]
    graphs += [random_germ_resolution(1, random.Random(s).randint(0, 20), s) for s in range(200)]
    failures = 0
    searched = 0
    for g in graphs:
        h, _ = reduce(g)
        if is_isomorphic(h, EMPTY_LINE):
            continue
        searched += 1
        if not equivalent(h, EMPTY_LINE, depth=6):
            failures += 1
    record(7, failures == 0, f"{len(graphs)} graphs, {searched} needed search, {failures} failures")
    assert failures == 0


# -- 8. two branches --------------------------------------------------------------


def test_criterion_8_bibranched(record):
    pool: dict[int, list[DualGraph]] = {}
    seed = 0
    while sum(len(v) // 2 for k, v in pool.items() if k <= 3) < 200:
        rng = random.Random(10**6 + seed)
        g = random_germ_resolution(2, rng.randint(0, 20), 10**6 + seed)
        pool.setdefault(mu_prime(g), []).append(g)
        seed += 1
    violations = 0
    pairs = 0
    for k, graphs in sorted(pool.items()):
        if k > 3:
            continue
        for g1, g2 in zip(graphs[0::2], graphs[1::2]):
            pairs += 1
            h1, _ = reduce(g1)
            h2, _ = reduce(g2)
            if not is_isomorphic(h1, h2) and not equivalent(h1, h2, depth=6):
                violations += 1
    # Pairs with different mu' must never be joined.
    reps = {k: reduce(v[0])[0] for k, v in pool.items() if k <= 3}
    cross = 0
    for a, b in itertools.combinations(sorted(reps), 2):
        cross += 1
        if is_isomorphic(reps[a], reps[b]) or equivalent(reps[a], reps[b], depth=3):
            violations += 1
    # Unreduced graphs of different mu' must land in different classes.
    sample = [g for k, v in sorted(pool.items()) if k <= 3 for g in v[:10]]
    report = classify(sample, depth=2)
    if len(report.classes) != len({mu_prime(g) for g in sample}) or report.unresolved:
        violations += 1
    record(8, violations == 0 and pairs >= 200, f"{pairs} equal-mu' pairs, {cross} cross pairs, {violations} violations")
    assert pairs >= 200
    assert violations == 0


# -- 9. GF(2) oracle -------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _perms(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))))


def _perm_det(m: np.ndarray) -> int:
    n = m.shape[0]
    if n == 0:
        return 1
    perms = _perms(n)
    # Over GF(2) signs vanish, so det = sum over permutations of the products.
    return int(m[np.arange(n), perms].prod(axis=1).sum() % 2)


def _span_rank(m: np.ndarray) -> int:
    rows = [int("".join(map(str, r[::-1])), 2) if len(r) else 0 for r in m.tolist()]
    span = {0}
    for r in rows:
        span |= {x ^ r for x in span}
    return len(span).bit_length() - 1


def _check_matrix(m: np.ndarray) -> bool:
    g = Gf2Matrix.from_lists(m.tolist())
    return det(g) == _perm_det(m) and corank(g) == m.shape[0] - _span_rank(m)


def _symmetric(n, bits):
    m = np.zeros((n, n), dtype=np.int64)
    iu = np.triu_indices(n)
    m[iu] = bits
    return m | m.T


def test_criterion_9_gf2_oracle(record):
    bad = 0
    total = 0
    for n in range(0, 6):
        size = n * (n + 1) // 2
        for word in range(2**size):
            bits = [(word >> i) & 1 for i in range(size)]
            total += 1
            bad += not _check_matrix(_symmetric(n, bits))
    rng = np.random.default_rng(2024)
    for _ in range(10**4):
        n = int(rng.integers(1, 9))
        bits = rng.integers(0, 2, n * (n + 1) // 2)
        total += 1
        bad += not _check_matrix(_symmetric(n, bits))
    record(9, bad == 0, f"{total} matrices, {bad} disagreements")
    assert bad == 0
