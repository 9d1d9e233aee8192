"""Matchings with prescribed colour multiplicities in decomposed graphs.

A graph on ``2n`` vertices whose edge set is the union of ``k`` perfect
matchings carries a natural question: which multiplicity vectors
``(a_1, ..., a_k)`` are met exactly by some matching?  For three colours
every vector summing to at most ``n - 2`` is realizable, and
:func:`trimatch.solver.find_matching` constructs a witness; the bound is
sharp on disjoint K4 blocks, and residue-shift bipartite constructions block
full perfect matchings for essentially every prescribed vector.  A
brute-force oracle and exhaustive conjecture scans cover the open
``n - 1`` cases at desk scale.
"""

from .graphcore import (
    ColouredEdge,
    Distribution,
    Instance,
    InvalidMatching,
    Matching,
    ParseError,
    RangeError,
    TrimatchError,
    distribution,
    parse_instance,
    parse_matching,
    partner,
    serialize_instance,
    serialize_matching,
    validate,
    validate_matching,
)
from .solver import (
    AlternatingPath,
    NoSourceEdge,
    ShiftOutcome,
    SizeError,
    SolveStats,
    UnsupportedColourCount,
    alternating_path,
    find_matching,
    min_alternating_length,
    shift_step,
)
from .constructions import (
    LatinSquare,
    NoShifts,
    NotADecomposition,
    NotDisjoint,
    ShiftVector,
    cayley_table,
    choose_shifts,
    cyclic_construction,
    extend_to_decomposition,
    instance_to_latin,
    k4_construction,
    latin_to_instance,
    random_instance,
)
from .oracle import RealizabilityReport, achievable_distributions, exists_exact
from .conjectures import (
    SearchVerdict,
    canonical_matching,
    check_abelian_hall,
    check_ryser_mult,
    check_three_colour_split,
    compositions,
    cyclic_factorizations,
    enumerate_latin_squares,
    enumerate_triple_instances,
    fixed_point_free_involutions,
    has_non_k4_component,
    merge_verdicts,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
