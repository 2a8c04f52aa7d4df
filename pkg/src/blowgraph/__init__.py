"""Dual graphs of real plane-curve germ resolutions and their mod-2 calculus."""

from __future__ import annotations

from .chords import ChordDiagram, ChordError, canonical_chord, diagrams_for_class, enumerate_chords
from .enumeration import (
    ClassificationReport,
    TrunkType,
    class_label,
    classify,
    enumerate_standard,
    raw_placements,
    stable_vmax,
    trunk_type,
    type_counts,
    upper_bound,
)
from .gf2 import Gf2Matrix, corank, det, intersection_matrix, is_contractible, mu, rank
from .graph_core import (
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
from .invariants import (
    Partition,
    compare_delta_star,
    delta_star,
    delta_table,
    invariant_report,
    mu_partition,
    mu_prime,
    pair_signature,
    path_between,
)
from .moves import (
    Move,
    MoveError,
    MoveTrace,
    ReductionError,
    Verdict,
    apply,
    equivalent,
    is_fixpoint,
    is_standard,
    random_germ_resolution,
    random_resolution,
    reduce,
    replay,
)

__version__ = "0.1.0"
