"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 invalid input graph or trace,
3 classification left pairs of graphs unresolved.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path
from typing import Sequence, TextIO

from . import chords as chords_mod
from .enumeration import (
    TrunkType,
    classify,
    enumerate_standard,
    raw_configurations,
    raw_placements,
    stable_vmax,
    trunk_type,
    type_counts,
)
from .gf2 import is_contractible, mu
from .graph_core import (
    DualGraph,
    GraphError,
    format_graph,
    format_line,
    parse_graph,
    to_dot,
    validate,
)
from .invariants import invariant_report, mu_prime
from .moves import MoveError, MoveTrace, ReductionError, equivalent, is_standard, random_germ_resolution, random_resolution, reduce, replay

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_UNRESOLVED = 0, 1, 2, 3

DEFAULTS = {"depth": 4, "node_budget": 10**6, "vmax_budget": 24, "workers": 1}


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def load_config(path: str | None) -> dict[str, int]:
    """Read ``key=value`` lines; unknown keys are a usage error."""
    cfg = dict(DEFAULTS)
    if path is None:
        return cfg
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        key = key.replace("-", "_")
        if not sep or key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: expected one of {', '.join(DEFAULTS)} as key=value")
        try:
            cfg[key] = int(value)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: {key} must be an integer") from None
    return cfg


def _read(source: str | None, stdin: TextIO) -> str:
    if source in (None, "-"):
        return stdin.read()
    try:
        return Path(source).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc.strerror}") from None


def _graph(source: str | None, stdin: TextIO, check: bool = True) -> DualGraph:
    g = parse_graph(_read(source, stdin))
    if check:
        problems = validate(g)
        if problems:
            raise InputError(f"{source or '<stdin>'}: " + "; ".join(problems))
    return g


def _graphs(sources: Sequence[str], stdin: TextIO) -> list[DualGraph]:
    """One graph per file, or graphs on stdin separated by ``---`` lines."""
    if sources:
        return [_graph(s, stdin) for s in sources]
    chunks, cur = [], []
    for line in stdin.read().splitlines():
        if line.strip() == "---":
            chunks.append("\n".join(cur))
            cur = []
        else:
            cur.append(line)
    chunks.append("\n".join(cur))
    out = []
    for i, chunk in enumerate(chunks, 1):
        if not chunk.strip():
            continue
        g = parse_graph(chunk)
        problems = validate(g)
        if problems:
            raise InputError(f"<stdin> graph {i}: " + "; ".join(problems))
        out.append(g)
    return out


def _flag(b: bool) -> str:
    return "true" if b else "false"


def _build_parser() -> _Parser:
    p = _Parser(prog="blowgraph", description="Mod-2 dual graph calculus for real plane-curve germs.")
    p.add_argument("--config", help="key=value file setting depth, node_budget, vmax_budget, workers")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    for name, help_ in [
        ("validate", "check a graph file"),
        ("det", "mod-2 determinant of the intersection matrix"),
        ("mu", "corank of the intersection matrix"),
        ("mu-prime", "corank after deleting all branch paths"),
        ("standard", "check the standard-form properties"),
        ("invariants", "mu', per-pair mu and component codes"),
        ("dot", "Graphviz export"),
    ]:
        s = sub.add_parser(name, help=help_)
        s.add_argument("graph", nargs="?", help="graph file (default: stdin)")

    s = sub.add_parser("reduce", help="reduce to standard form")
    s.add_argument("graph", nargs="?")
    s.add_argument("--trace", help="write the move trace to this file")
    s.add_argument("--seed", type=int, help="choose applicable moves at random with this seed")

    s = sub.add_parser("equivalent", help="bounded search for a common blow-up/down")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--depth", type=int)
    s.add_argument("--node-budget", type=int)

    s = sub.add_parser("enumerate", help="standard forms with n branches and mu' = k")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("-k", type=int, required=True)
    s.add_argument("--vmax", type=int, help="vertex bound (default: found by stabilisation)")
    s.add_argument("--raw", action="store_true", help="three-branch trunk placements instead")
    s.add_argument("--classes", action="store_true", help="group the forms into classes")
    s.add_argument("--depth", type=int)
    s.add_argument("--dot", metavar="DIR", help="write one DOT file per emitted graph")
    s.add_argument("--workers", type=int)

    s = sub.add_parser("classify", help="classify graphs (files, or stdin separated by ---)")
    s.add_argument("graphs", nargs="*")
    s.add_argument("--depth", type=int)
    s.add_argument("--workers", type=int)

    s = sub.add_parser("chords", help="chord diagrams")
    group = s.add_mutually_exclusive_group(required=True)
    group.add_argument("-n", type=int)
    group.add_argument("--class", dest="label")

    s = sub.add_parser("random", help="seeded random good resolution")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--germ", action="store_true", help="let branches stay tangent before separating")

    s = sub.add_parser("replay", help="apply a move trace to a graph")
    s.add_argument("graph")
    s.add_argument("trace")
    return p


def _emit_classes(report, out: TextIO) -> None:
    for c in report.classes:
        trunk = c.trunk.value if c.trunk is not None else "-"
        sig = "{" + ",".join(map(str, c.signature)) + "}"
        out.write(
            f"class {c.label or '-'} mu_prime={c.mu_prime} signature={sig} trunk={trunk} "
            f"members={len(c.members)} graph={format_line(c.representative, canonical=True)}\n"
        )
    for a, b in report.unresolved:
        out.write(f"unresolved {a} {b}\n")
    out.write(report.summary() + "\n")


def _write_dots(directory: str, graphs: Sequence[DualGraph], stem: str) -> None:
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    for i, g in enumerate(graphs, 1):
        (path / f"{stem}{i:03d}.dot").write_text(to_dot(g, f"{stem}{i:03d}"))


def _run(args, cfg, out: TextIO, stdin: TextIO) -> int:
    cmd = args.command
    if cmd == "validate":
        g = _graph(args.graph, stdin)
        out.write(f"valid vertices={g.n_vertices} branches={g.n_branches}\n")
    elif cmd == "det":
        g = _graph(args.graph, stdin)
        c = is_contractible(g)
        out.write(f"det={int(c)} contractible={_flag(c)}\n")
    elif cmd == "mu":
        out.write(f"mu={mu(_graph(args.graph, stdin))}\n")
    elif cmd == "mu-prime":
        g = _graph(args.graph, stdin)
        if g.n_branches < 1:
            raise InputError("mu' needs at least one branch")
        out.write(f"mu_prime={mu_prime(g)}\n")
    elif cmd == "standard":
        g = _graph(args.graph, stdin)
        ok, violated = is_standard(g)
        out.write(f"standard={_flag(ok)} violated={','.join(violated) or '-'}\n")
    elif cmd == "invariants":
        g = _graph(args.graph, stdin)
        if g.n_branches < 1:
            raise InputError("invariants need at least one branch")
        out.write("".join(line + "\n" for line in invariant_report(g)))
    elif cmd == "dot":
        out.write(to_dot(_graph(args.graph, stdin)))
    elif cmd == "reduce":
        g = _graph(args.graph, stdin)
        rng = random.Random(args.seed) if args.seed is not None else None
        h, trace = reduce(g, rng=rng)
        out.write(format_graph(h))
        if args.trace:
            Path(args.trace).write_text(trace.dumps())
    elif cmd == "equivalent":
        g1, g2 = _graph(args.first, stdin), _graph(args.second, stdin)
        depth = args.depth if args.depth is not None else cfg["depth"]
        budget = args.node_budget if args.node_budget is not None else cfg["node_budget"]
        v = equivalent(g1, g2, depth=depth, node_budget=budget)
        out.write(f"equivalent={_flag(v.equivalent)} depth={v.depth} explored={v.explored}\n")
        for tag, trace in (("first", v.first), ("second", v.second)):
            for move, code in trace:
                out.write(f"{tag} {move} code={code}\n")
    elif cmd == "enumerate":
        return _enumerate(args, cfg, out)
    elif cmd == "classify":
        graphs = _graphs(args.graphs, stdin)
        if not graphs:
            raise InputError("no graphs given")
        depth = args.depth if args.depth is not None else cfg["depth"]
        workers = args.workers if args.workers is not None else cfg["workers"]
        report = classify(graphs, depth=depth, node_budget=cfg["node_budget"], workers=workers)
        _emit_classes(report, out)
        return EXIT_UNRESOLVED if report.unresolved else EXIT_OK
    elif cmd == "chords":
        if args.label is not None:
            words = chords_mod.diagrams_for_class(args.label)
        else:
            if args.n < 1:
                raise UsageError("chords: -n must be at least 1")
            words = chords_mod.enumerate_chords(args.n)
        out.write("".join(w + "\n" for w in words))
    elif cmd == "random":
        if args.n < 1 or args.steps < 0:
            raise UsageError("random: need -n >= 1 and --steps >= 0")
        make = random_germ_resolution if args.germ else random_resolution
        out.write(format_graph(make(args.n, args.steps, args.seed)))
    elif cmd == "replay":
        g = _graph(args.graph, stdin)
        trace = MoveTrace.loads(_read(args.trace, stdin))
        out.write(format_graph(replay(g, trace), canonical=not len(trace)))
    return EXIT_OK


def _enumerate(args, cfg, out: TextIO) -> int:
    workers = args.workers if args.workers is not None else cfg["workers"]
    if args.n < 0 or args.k < 0:
        raise UsageError("enumerate: -n and -k must be non-negative")
    if args.raw:
        if args.n != 3 or args.k < 3:
            raise UsageError("enumerate --raw needs -n 3 and -k >= 3")
        graphs = []
        formula = dict(zip((TrunkType.B, TrunkType.C, TrunkType.D), type_counts(args.k)))
        for t in (TrunkType.B, TrunkType.C, TrunkType.D):
            configs = raw_configurations(args.k, t)
            graphs.extend(configs)
            for g in configs:
                out.write(f"trunk={t.value} {format_line(g)}\n")
            out.write(f"type={t.value} raw={raw_placements(args.k, t)} formula={formula[t]}\n")
        if args.dot:
            _write_dots(args.dot, graphs, "raw")
        return EXIT_OK
    vmax = args.vmax if args.vmax is not None else stable_vmax(args.n, args.k, cfg["vmax_budget"], workers)
    forms = enumerate_standard(args.n, args.k, vmax, workers)
    if args.classes:
        depth = args.depth if args.depth is not None else cfg["depth"]
        report = classify(forms, depth=depth, node_budget=cfg["node_budget"], workers=workers)
        _emit_classes(report, out)
        if args.dot:
            _write_dots(args.dot, [c.representative for c in report.classes], "class")
        return EXIT_UNRESOLVED if report.unresolved else EXIT_OK
    for g in forms:
        trunk = trunk_type(g).value if g.n_branches == 3 and not g.free_branches else "-"
        out.write(f"form trunk={trunk} {format_line(g)}\n")
    out.write(f"forms={len(forms)} vmax={vmax}\n")
    if args.dot:
        _write_dots(args.dot, forms, "form")
    return EXIT_OK


def run(argv: Sequence[str], out: TextIO | None = None, err: TextIO | None = None, stdin: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    stdin = stdin or sys.stdin
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        cfg = load_config(args.config)
        return _run(args, cfg, out, stdin)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except (InputError, GraphError, MoveError, ReductionError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except chords_mod.ChordError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


def main(argv: Sequence[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
