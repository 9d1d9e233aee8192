"""Exact-multiplicity matchings in three-colour decompositions.

Given a graph on ``2n`` vertices decomposed into three perfect matchings and
any target triple ``(a1, a2, a3)`` with ``a1 + a2 + a3 <= n - 2``, the driver
:func:`find_matching` constructs a matching meeting the target exactly.  The
bound is tight in general: on disjoint unions of K4 blocks no all-odd triple
summing to ``n - 1`` is realizable.

The engine is :func:`shift_step`, which moves one unit of multiplicity from a
source colour to a destination colour while preserving the matching size
``n - 2``.  Write 1 for the source colour, 2 for the destination and 3 for
the remaining colour.  With exactly four vertices unmatched, consider the
maximal alternating path from an unmatched vertex ``x`` whose edges alternate
between colour-2 edges outside the matching and colour-3 edges inside it.
Because colour classes are perfect matchings, the walk is forced, never
revisits a vertex, and always stops after a colour-2 edge, so its length is
odd.  Let ``x`` minimise this length and pick a second unmatched vertex ``z``
distinct from both path endpoints and from ``x``'s colour-3 partner (at most
three of the four unmatched vertices are excluded).  Writing ``y`` for the
colour-2 partner of ``x`` and ``w`` for the colour-3 partner of ``z``:

* ``y`` matched by colour 1: swap that edge for ``xy`` - done.
* ``y`` unmatched: swap any colour-1 edge for ``xy`` - done.
* otherwise ``y`` is matched by colour 3.  Then if ``w`` is unmatched or
  matched by colour 1, remove ``y``'s colour-3 edge plus a colour-1 edge
  (any, resp. ``w``'s) and add ``xy`` and ``zw`` - done.
* remaining case: ``w`` matched by colour 2.  Exchanging ``y``'s colour-3
  edge and ``w``'s colour-2 edge for ``xy`` and ``zw`` keeps the distribution
  but shortens the minimal alternating length by at least two (the new path
  from ``y``'s old partner is a strict subpath).  Iterate; the length is
  positive and drops by two per swap, so at most ``n`` swaps occur.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graphcore import (
    ColouredEdge,
    Distribution,
    Instance,
    InvalidMatching,
    Matching,
    RangeError,
    TrimatchError,
    distribution,
    validate_matching,
)


class UnsupportedColourCount(TrimatchError):
    """The operation is only defined for three-colour instances."""


class SizeError(TrimatchError):
    """The working matching does not have the required size ``n - 2``."""


class NoSourceEdge(TrimatchError):
    """The matching holds no edge of the colour a shift must take from."""


@dataclass(frozen=True)
class AlternatingPath:
    """Maximal alternating path from an unmatched vertex.

    Edges alternate between ``free_colour`` edges outside the matching and
    ``matched_colour`` edges inside it; the first edge always exists (the
    start is unmatched, so its free-colour edge is not in the matching), the
    walk is vertex-repetition free and its length is odd.
    """

    start: int
    edges: tuple[ColouredEdge, ...]
    vertices: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def end(self) -> int:
        return self.vertices[-1]


@dataclass(frozen=True)
class ShiftOutcome:
    """Result of one multiplicity shift plus its internal swap count."""

    result: Matching
    swaps_performed: int


@dataclass
class SolveStats:
    """Optional accumulator for :func:`find_matching` instrumentation."""

    shifts: int = 0
    swaps_total: int = 0
    swaps_max: int = 0
    swaps_per_shift: list[int] = field(default_factory=list)

    def record(self, swaps: int) -> None:
        self.shifts += 1
        self.swaps_total += swaps
        self.swaps_max = max(self.swaps_max, swaps)
        self.swaps_per_shift.append(swaps)


# ---------------------------------------------------------------------------
# Array-backed working state: mate[v] is the matched partner of v (-1 if
# unmatched), mcol[v] the colour of that edge (0 if unmatched), counts[c] the
# number of matching edges of colour c (1-based).
# ---------------------------------------------------------------------------

def _matching_arrays(instance: Instance, m: Matching):
    problems = validate_matching(m, instance)
    if problems:
        raise InvalidMatching("; ".join(problems))
    nv = instance.num_vertices
    mate = [-1] * nv
    mcol = [0] * nv
    counts = [0] * (instance.colour_count + 1)
    for e in m.edges:
        mate[e.u] = e.v
        mate[e.v] = e.u
        mcol[e.u] = e.colour
        mcol[e.v] = e.colour
        counts[e.colour] += 1
    return mate, mcol, counts


def _arrays_to_matching(mate, mcol) -> Matching:
    return Matching(frozenset(
        ColouredEdge(v, mate[v], mcol[v])
        for v in range(len(mate)) if 0 <= v < mate[v]))


def _walk(p_free, mate, mcol, matched_colour, x):
    """Forced alternating walk from unmatched ``x``; returns (vertices, edges)."""
    verts = [x]
    edges = []
    v = x
    bound = len(mate) + 1
    while True:
        u = p_free[v]
        edges.append((v, u))
        verts.append(u)
        if mcol[u] != matched_colour:
            return verts, edges
        w = mate[u]
        edges.append((u, w))
        verts.append(w)
        v = w
        assert len(verts) <= bound, "alternating walk revisited a vertex"


def alternating_path(instance: Instance, m: Matching, start: int,
                     free_colour: int, matched_colour: int) -> AlternatingPath:
    """Maximal alternating path of (free-colour \\ M)- and (matched-colour ∩ M)-edges.

    ``start`` must be unmatched by ``m``; the two colours must be distinct.
    """
    if not 1 <= free_colour <= instance.colour_count:
        raise RangeError(f"colour {free_colour} out of range")
    if not 1 <= matched_colour <= instance.colour_count:
        raise RangeError(f"colour {matched_colour} out of range")
    if free_colour == matched_colour:
        raise ValueError("free and matched colours must differ")
    if not 0 <= start < instance.num_vertices:
        raise RangeError(f"vertex {start} out of range")
    mate, mcol, _ = _matching_arrays(instance, m)
    if mate[start] >= 0:
        raise ValueError(f"vertex {start} is matched; path needs an unmatched start")
    verts, edges = _walk(instance.partners[free_colour - 1], mate, mcol,
                         matched_colour, start)
    assert len(set(verts)) == len(verts)
    coloured = []
    for i, (a, b) in enumerate(edges):
        colour = free_colour if i % 2 == 0 else matched_colour
        coloured.append(ColouredEdge.make(a, b, colour))
    return AlternatingPath(start, tuple(coloured), tuple(verts))


def min_alternating_length(instance: Instance, m: Matching,
                           free_colour: int, matched_colour: int
                           ) -> tuple[int, int]:
    """Minimum alternating-path length over unmatched vertices.

    Returns ``(length, vertex)`` where ``vertex`` is the smallest-id
    unmatched vertex attaining the minimum.  ``m`` must leave at least one
    vertex unmatched.
    """
    mate, mcol, _ = _matching_arrays(instance, m)
    p_free = instance.partners[free_colour - 1]
    if free_colour == matched_colour:
        raise ValueError("free and matched colours must differ")
    best_len = -1
    best_v = -1
    for v in range(instance.num_vertices):
        if mate[v] >= 0:
            continue
        _, edges = _walk(p_free, mate, mcol, matched_colour, v)
        if best_len < 0 or len(edges) < best_len:
            best_len = len(edges)
            best_v = v
    if best_v < 0:
        raise ValueError("matching is perfect; no unmatched vertex to start from")
    return best_len, best_v


def _remove_edge(mate, mcol, counts, v) -> None:
    w = mate[v]
    counts[mcol[v]] -= 1
    mate[v] = mate[w] = -1
    mcol[v] = mcol[w] = 0


def _add_edge(mate, mcol, counts, a, b, colour) -> None:
    assert mate[a] < 0 and mate[b] < 0
    mate[a] = b
    mate[b] = a
    mcol[a] = mcol[b] = colour
    counts[colour] += 1


def _first_edge_vertex(mate, mcol, colour) -> int:
    # Lexicographically smallest edge of the colour: smallest left endpoint.
    for v in range(len(mate)):
        if mcol[v] == colour and mate[v] > v:
            return v
    raise AssertionError("no edge of the requested colour")


def _shift(partners, mate, mcol, counts, c_from, c_to, c_other) -> int:
    """One multiplicity shift on the working arrays; returns the swap count."""
    nv = len(mate)
    n = nv // 2
    p_to = partners[c_to - 1]
    p_other = partners[c_other - 1]
    swaps = 0
    prev_len = -1
    while True:
        unmatched = [v for v in range(nv) if mate[v] < 0]
        assert len(unmatched) == 4

        best_len = -1
        best_x = -1
        best_end = -1
        for x in unmatched:
            length = 0
            v = x
            while True:
                u = p_to[v]
                length += 1
                if mcol[u] != c_other:
                    end = u
                    break
                length += 1
                v = mate[u]
                assert length <= nv
            if best_len < 0 or length < best_len:
                best_len, best_x, best_end = length, x, end
        if prev_len >= 0:
            assert best_len <= prev_len - 2, "potential failed to drop"
        prev_len = best_len

        x, end = best_x, best_end
        y = p_to[x]
        if mcol[y] == c_from:
            _remove_edge(mate, mcol, counts, y)
            _add_edge(mate, mcol, counts, x, y, c_to)
            return swaps
        if mate[y] < 0:
            _remove_edge(mate, mcol, counts,
                         _first_edge_vertex(mate, mcol, c_from))
            _add_edge(mate, mcol, counts, x, y, c_to)
            return swaps

        # y's destination-colour edge is (x, y), not in the matching, so the
        # only remaining possibility is a third-colour edge.
        assert mcol[y] == c_other
        restart = mate[y]
        forbidden = (x, end, p_other[x])
        z = -1
        for u in unmatched:
            if u not in forbidden:
                z = u
                break
        assert z >= 0, "all unmatched vertices excluded"
        w = p_other[z]
        if mate[w] < 0:
            _remove_edge(mate, mcol, counts, y)
            _remove_edge(mate, mcol, counts,
                         _first_edge_vertex(mate, mcol, c_from))
            _add_edge(mate, mcol, counts, x, y, c_to)
            _add_edge(mate, mcol, counts, z, w, c_other)
            return swaps
        if mcol[w] == c_from:
            _remove_edge(mate, mcol, counts, y)
            _remove_edge(mate, mcol, counts, w)
            _add_edge(mate, mcol, counts, x, y, c_to)
            _add_edge(mate, mcol, counts, z, w, c_other)
            return swaps

        # w is matched by the destination colour: distribution-preserving
        # swap that shortens the alternating path, then try again.
        assert mcol[w] == c_to
        _remove_edge(mate, mcol, counts, y)
        _remove_edge(mate, mcol, counts, w)
        _add_edge(mate, mcol, counts, x, y, c_to)
        _add_edge(mate, mcol, counts, z, w, c_other)
        assert mate[restart] < 0
        swaps += 1
        assert swaps <= n, "swap budget exceeded"


def _check_three(instance: Instance) -> None:
    if instance.colour_count != 3:
        raise UnsupportedColourCount(
            f"need exactly 3 colours, instance has {instance.colour_count}")


def shift_step(instance: Instance, m: Matching,
               from_colour: int, to_colour: int) -> ShiftOutcome:
    """Move one unit of multiplicity from ``from_colour`` to ``to_colour``.

    ``m`` must be a valid matching of size ``n - 2`` holding at least one
    edge of the source colour.  The result has the same size and the
    distribution of ``m`` shifted by ``-1`` on the source and ``+1`` on the
    destination.
    """
    _check_three(instance)
    if from_colour == to_colour:
        raise ValueError("source and destination colours must differ")
    for c in (from_colour, to_colour):
        if not 1 <= c <= 3:
            raise RangeError(f"colour {c} out of range 1..3")
    mate, mcol, counts = _matching_arrays(instance, m)
    if len(m) != instance.half_order - 2:
        raise SizeError(
            f"matching has {len(m)} edges, need n-2 = {instance.half_order - 2}")
    if counts[from_colour] == 0:
        raise NoSourceEdge(f"no edge of colour {from_colour} to shift away")
    c_other = 6 - from_colour - to_colour
    swaps = _shift(instance.partners, mate, mcol, counts,
                   from_colour, to_colour, c_other)
    return ShiftOutcome(_arrays_to_matching(mate, mcol), swaps)


def find_matching(instance: Instance, target: Distribution, *,
                  stats: SolveStats | None = None) -> Matching:
    """Construct a matching whose distribution equals ``target`` exactly.

    Requires a three-colour instance and ``sum(target) <= n - 2``.  The
    largest target multiplicity is given the leading role (stable tie-break
    by colour index); the working matching starts from the leading colour
    class minus its two lexicographically-last edges and is shifted towards
    the other two colours, then trimmed down to the requested sum.  All
    choices are deterministic, so equal inputs give equal outputs.
    """
    _check_three(instance)
    if len(target) != 3:
        raise ValueError(f"target must have 3 components, got {len(target)}")
    if any(t < 0 for t in target):
        raise ValueError(f"target must be non-negative, got {target}")
    n = instance.half_order
    total = sum(target)
    if total > n - 2:
        raise RangeError(
            f"target sums to {total}, above the guaranteed bound n-2 = {n - 2}")

    lead = max(range(3), key=lambda i: (target[i], -i))
    rest = [i for i in range(3) if i != lead]
    role1, role2, role3 = lead + 1, rest[0] + 1, rest[1] + 1

    nv = instance.num_vertices
    mate = [-1] * nv
    mcol = [0] * nv
    counts = [0] * 4
    lead_pairs = instance.matchings[lead]       # sorted lexicographically
    for (u, v) in lead_pairs[:n - 2]:
        _add_edge(mate, mcol, counts, u, v, role1)

    for c_to in (role2, role3):
        for _ in range(target[c_to - 1]):
            c_other = 6 - role1 - c_to
            swaps = _shift(instance.partners, mate, mcol, counts,
                           role1, c_to, c_other)
            if stats is not None:
                stats.record(swaps)

    excess = (n - 2) - total
    if excess:
        lead_edges = sorted((v, mate[v]) for v in range(nv)
                            if mcol[v] == role1 and mate[v] > v)
        for (u, _v) in lead_edges[len(lead_edges) - excess:]:
            _remove_edge(mate, mcol, counts, u)

    result = _arrays_to_matching(mate, mcol)
    assert distribution(result, instance) == tuple(target)
    return result
