"""Core types for graphs decomposed into coloured perfect matchings.

An instance is a (multi)graph on ``2n`` vertices whose edge set is the union
of ``k`` perfect matchings, the "colour classes".  Classes are kept apart by
colour, so two classes may contain the same vertex pair (parallel edges of a
multigraph); an edge is identified by the pair *and* its colour.  A matching
selected from an instance is a set of vertex-disjoint coloured edges, and its
distribution is the vector counting how many edges it takes from each colour.

Vertices are the integers ``0 .. 2n-1``.  Bipartite instances place the left
part at ``0 .. n-1`` and the right part at ``n .. 2n-1``.

Serialization is canonical: within a pair ``u < v``, pairs sorted
lexicographically, matchings in colour order.  ``serialize_instance`` and
``parse_instance`` round-trip byte-for-byte on canonical text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple

Pair = tuple[int, int]
Distribution = tuple[int, ...]


class TrimatchError(Exception):
    """Base class for errors raised by this package."""


class RangeError(TrimatchError):
    """An argument is outside its documented range, or a size guard tripped."""


class ParseError(TrimatchError):
    """Malformed serialized text; the message carries line/field context."""


class InvalidMatching(TrimatchError):
    """A matching is inconsistent with its ambient instance."""


class ColouredEdge(NamedTuple):
    """An edge of an instance: vertex pair with ``u < v`` plus its colour."""

    u: int
    v: int
    colour: int

    @classmethod
    def make(cls, a: int, b: int, colour: int) -> "ColouredEdge":
        if a == b:
            raise ValueError(f"loop edge at vertex {a}")
        return cls(a, b, colour) if a < b else cls(b, a, colour)

    @property
    def pair(self) -> Pair:
        return (self.u, self.v)


def _canon_pair(raw) -> Pair:
    try:
        a, b = raw
    except (TypeError, ValueError):
        raise ValueError(f"not a vertex pair: {raw!r}") from None
    a = int(a)
    b = int(b)
    if a == b:
        raise ValueError(f"loop edge at vertex {a}")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Instance:
    """A graph on ``2n`` vertices given as ``k`` coloured perfect matchings.

    ``matchings[i]`` holds the vertex pairs of colour ``i + 1`` (colours are
    1-based).  Construction canonicalizes pair order and checks only shape
    (counts and vertex ranges); semantic invariants such as "every vertex is
    covered exactly once per colour" are reported by :func:`validate`, which
    treats violations as data rather than failures.

    Instances are immutable and safe to share across concurrent readers.
    """

    half_order: int
    colour_count: int
    matchings: tuple[tuple[Pair, ...], ...]
    bipartite: bool = False

    def __post_init__(self) -> None:
        n, k = self.half_order, self.colour_count
        if n < 1:
            raise ValueError(f"half_order must be positive, got {n}")
        if k < 1:
            raise ValueError(f"colour_count must be positive, got {k}")
        if len(self.matchings) != k:
            raise ValueError(
                f"expected {k} matchings, got {len(self.matchings)}")
        canon = []
        for c, pairs in enumerate(self.matchings, start=1):
            pairs = tuple(sorted(_canon_pair(p) for p in pairs))
            if len(pairs) != n:
                raise ValueError(
                    f"matching {c} has {len(pairs)} edges, expected {n}")
            for (u, v) in pairs:
                if not (0 <= u < v < 2 * n):
                    raise ValueError(
                        f"edge ({u},{v}) of colour {c} outside 0..{2*n - 1}")
            canon.append(pairs)
        object.__setattr__(self, "matchings", tuple(canon))
        object.__setattr__(self, "bipartite", bool(self.bipartite))

    @property
    def n(self) -> int:
        return self.half_order

    @property
    def k(self) -> int:
        return self.colour_count

    @property
    def num_vertices(self) -> int:
        return 2 * self.half_order

    @cached_property
    def partners(self) -> tuple[tuple[int, ...], ...]:
        """Per-colour partner table: ``partners[c-1][v]`` is ``v``'s mate.

        Only meaningful on instances where each colour class is a perfect
        matching (i.e. :func:`validate` returns no violations); on invalid
        data later pairs overwrite earlier ones.
        """
        tables = []
        for pairs in self.matchings:
            table = [-1] * (2 * self.half_order)
            for (u, v) in pairs:
                table[u] = v
                table[v] = u
            tables.append(tuple(table))
        return tuple(tables)

    def pairs_of_colour(self, colour: int) -> tuple[Pair, ...]:
        _check_colour(self, colour)
        return self.matchings[colour - 1]

    def summary(self) -> str:
        shape = "bipartite" if self.bipartite else "general"
        return f"{shape} instance, 2n={self.num_vertices}, k={self.colour_count}"


@dataclass(frozen=True)
class Matching:
    """A set of vertex-disjoint coloured edges selected from an instance."""

    edges: frozenset[ColouredEdge] = field(default_factory=frozenset)

    @classmethod
    def from_triples(cls, triples: Iterable) -> "Matching":
        return cls(frozenset(ColouredEdge.make(int(a), int(b), int(c))
                             for (a, b, c) in triples))

    def sorted_edges(self) -> list[ColouredEdge]:
        return sorted(self.edges)

    def covered(self) -> set[int]:
        out: set[int] = set()
        for e in self.edges:
            out.add(e.u)
            out.add(e.v)
        return out

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.sorted_edges())


def _check_colour(instance: Instance, colour: int) -> None:
    if not 1 <= colour <= instance.colour_count:
        raise RangeError(
            f"colour {colour} out of range 1..{instance.colour_count}")


def _check_vertex(instance: Instance, v: int) -> None:
    if not 0 <= v < instance.num_vertices:
        raise RangeError(
            f"vertex {v} out of range 0..{instance.num_vertices - 1}")


def partner(instance: Instance, colour: int, v: int) -> int:
    """The unique vertex matched to ``v`` by the given colour class.

    The partner map of a valid instance is a fixed-point-free involution:
    ``partner(instance, c, partner(instance, c, v)) == v``.
    """
    _check_colour(instance, colour)
    _check_vertex(instance, v)
    return instance.partners[colour - 1][v]


def validate(instance: Instance) -> list[str]:
    """Check instance invariants; returns one message per violation.

    An empty list means the instance is valid.  Checked by full scan, not
    via the partner tables.
    """
    violations: list[str] = []
    n = instance.half_order
    for c, pairs in enumerate(instance.matchings, start=1):
        cover = [0] * (2 * n)
        for (u, v) in pairs:
            cover[u] += 1
            cover[v] += 1
        for v, cnt in enumerate(cover):
            if cnt == 0:
                violations.append(f"vertex {v} uncovered in colour {c}")
            elif cnt > 1:
                times = "twice" if cnt == 2 else f"{cnt} times"
                violations.append(
                    f"vertex {v} covered {times} in colour {c}")
        if instance.bipartite:
            for (u, v) in pairs:
                if (u < n) == (v < n):
                    violations.append(
                        f"edge ({u},{v}) inside part in colour {c}")
    return violations


def validate_matching(m: Matching, instance: Instance) -> list[str]:
    """Check a matching against its ambient instance; messages per violation."""
    violations: list[str] = []
    seen: dict[int, ColouredEdge] = {}
    for e in m.sorted_edges():
        if not 1 <= e.colour <= instance.colour_count:
            violations.append(f"edge ({e.u},{e.v}) has colour {e.colour} "
                              f"out of range 1..{instance.colour_count}")
            continue
        if e.v >= instance.num_vertices or e.u < 0:
            violations.append(f"edge ({e.u},{e.v}) outside vertex range")
            continue
        if e.pair not in instance.matchings[e.colour - 1]:
            violations.append(
                f"edge ({e.u},{e.v}) absent from colour {e.colour}")
        for x in (e.u, e.v):
            if x in seen:
                o = seen[x]
                violations.append(
                    f"vertex {x} used by both ({o.u},{o.v}) and ({e.u},{e.v})")
            seen[x] = e
    return violations


def distribution(m: Matching, instance: Instance) -> Distribution:
    """Colour multiplicity vector ``(|M ∩ M_1|, ..., |M ∩ M_k|)``.

    Raises :class:`InvalidMatching` if ``m`` is not a valid matching of the
    instance.  The result always sums to ``len(m)``.
    """
    problems = validate_matching(m, instance)
    if problems:
        raise InvalidMatching("; ".join(problems))
    counts = [0] * instance.colour_count
    for e in m.edges:
        counts[e.colour - 1] += 1
    return tuple(counts)


# ---------------------------------------------------------------------------
# Serialization.  Instance files and matching files are single-line JSON with
# a fixed key order and a trailing newline; this exact byte form is the
# canonical one used by the command-line tool.
# ---------------------------------------------------------------------------

_SEP = (", ", ": ")


def serialize_instance(instance: Instance) -> str:
    payload = {
        "n": instance.half_order,
        "k": instance.colour_count,
        "bipartite": instance.bipartite,
        "matchings": [[[u, v] for (u, v) in pairs]
                      for pairs in instance.matchings],
    }
    return json.dumps(payload, separators=_SEP) + "\n"


def serialize_matching(m: Matching) -> str:
    payload = {"edges": [[e.u, e.v, e.colour] for e in m.sorted_edges()]}
    return json.dumps(payload, separators=_SEP) + "\n"


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _require_int(obj, what: str) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise ParseError(f"{what} must be an integer, got {obj!r}")
    return obj


def parse_instance(text: str) -> Instance:
    """Parse an instance file.

    Strict about structure, counts and ranges (:class:`ParseError`); pair
    ordering is normalized rather than rejected.
    """
    data = _load_json(text)
    if not isinstance(data, dict):
        raise ParseError("instance file must be a JSON object")
    extra = set(data) - {"n", "k", "bipartite", "matchings"}
    if extra:
        raise ParseError(f"unexpected keys: {sorted(extra)}")
    for key in ("n", "k", "bipartite", "matchings"):
        if key not in data:
            raise ParseError(f"missing key {key!r}")
    n = _require_int(data["n"], "n")
    k = _require_int(data["k"], "k")
    if n < 1 or k < 1:
        raise ParseError(f"n and k must be positive, got n={n}, k={k}")
    if not isinstance(data["bipartite"], bool):
        raise ParseError("bipartite must be a boolean")
    raw = data["matchings"]
    if not isinstance(raw, list) or len(raw) != k:
        raise ParseError(f"matchings must be a list of {k} matchings")
    matchings = []
    for c, entry in enumerate(raw, start=1):
        if not isinstance(entry, list):
            raise ParseError(f"matching {c} must be a list of pairs")
        if len(entry) != n:
            raise ParseError(
                f"matching {c} has {len(entry)} edges, expected {n}")
        pairs = []
        for item in entry:
            if not (isinstance(item, list) and len(item) == 2):
                raise ParseError(
                    f"matching {c}: each edge must be a pair, got {item!r}")
            u = _require_int(item[0], f"matching {c} vertex")
            v = _require_int(item[1], f"matching {c} vertex")
            if u == v:
                raise ParseError(f"matching {c}: loop edge at vertex {u}")
            if not (0 <= u < 2 * n and 0 <= v < 2 * n):
                raise ParseError(
                    f"matching {c}: edge ({u},{v}) outside 0..{2*n - 1}")
            pairs.append((u, v))
        matchings.append(pairs)
    return Instance(n, k, tuple(tuple(p) for p in matchings),
                    bool(data["bipartite"]))


def parse_matching(text: str, instance: Instance) -> Matching:
    """Parse a matching file against its ambient instance."""
    data = _load_json(text)
    if not isinstance(data, dict) or set(data) != {"edges"}:
        raise ParseError('matching file must be {"edges": [...]}')
    if not isinstance(data["edges"], list):
        raise ParseError("edges must be a list")
    triples = []
    for item in data["edges"]:
        if not (isinstance(item, list) and len(item) == 3):
            raise ParseError(f"each edge must be [u, v, colour], got {item!r}")
        u = _require_int(item[0], "edge vertex")
        v = _require_int(item[1], "edge vertex")
        c = _require_int(item[2], "edge colour")
        if u == v:
            raise ParseError(f"loop edge at vertex {u}")
        if not (0 <= u < instance.num_vertices and 0 <= v < instance.num_vertices):
            raise ParseError(
                f"edge ({u},{v}) outside 0..{instance.num_vertices - 1}")
        if not 1 <= c <= instance.colour_count:
            raise ParseError(
                f"colour {c} out of range 1..{instance.colour_count}")
        if (min(u, v), max(u, v)) not in instance.matchings[c - 1]:
            raise ParseError(f"edge ({u},{v}) not present in colour {c}")
        triples.append((u, v, c))
    m = Matching.from_triples(triples)
    if len(m.edges) != len(triples):
        raise ParseError("duplicate edges in matching file")
    overlap = validate_matching(m, instance)
    if overlap:
        raise ParseError("; ".join(overlap))
    return m
