"""Generators for decomposed instances: blockers, K4 blocks, Latin squares.

The cyclic construction shows the solver's ``n - 2`` bound cannot be pushed
to a full perfect matching: over ``Z_n``, pick distinct residues
``x_1, ..., x_k`` with ``a_1 x_1 + ... + a_k x_k != 0 (mod n)`` and join left
``i`` to right ``j`` with colour ``s`` whenever ``i + j = x_s (mod n)``.
Summing endpoint labels of a hypothetical perfect matching with multiplicity
``a_i`` on colour ``i`` gives the weighted shift sum on one hand and
``0 (mod n)`` on the other, so no such matching exists.

Also here: disjoint K4 blocks (tightness of the ``n - 2`` bound), the
Latin-square encoding of complete bipartite decompositions, Cayley tables of
finite abelian groups, extension of partial bipartite decompositions to full
ones, and seeded random instances.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .graphcore import Distribution, Instance, RangeError, TrimatchError

MAX_EXHAUSTIVE_SHIFT_MODULUS = 12


class NoShifts(TrimatchError):
    """No residue vector with the required non-zero weighted sum exists."""


class NotADecomposition(TrimatchError):
    """The instance does not decompose the complete bipartite graph."""


class NotDisjoint(TrimatchError):
    """Two colour classes share a vertex pair where they must not."""


@dataclass(frozen=True)
class ShiftVector:
    """Pairwise distinct residues of ``Z_modulus`` used as colour shifts."""

    modulus: int
    shifts: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError(f"modulus must be positive, got {self.modulus}")
        shifts = tuple(int(x) % self.modulus for x in self.shifts)
        if len(set(shifts)) != len(shifts):
            raise ValueError(f"shifts must be pairwise distinct, got {shifts}")
        object.__setattr__(self, "shifts", shifts)

    def __len__(self) -> int:
        return len(self.shifts)


@dataclass(frozen=True)
class LatinSquare:
    """Order-n square with every symbol once per row and per column.

    Encodes a decomposition of the complete bipartite graph on ``2n``
    vertices into ``n`` perfect matchings: symbol ``s`` in cell ``(i, j)``
    puts the edge from left ``i`` to right ``j`` into colour ``s + 1``.
    """

    order: int
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = self.order
        if n < 1:
            raise ValueError(f"order must be positive, got {n}")
        cells = tuple(tuple(int(x) for x in row) for row in self.cells)
        if len(cells) != n or any(len(row) != n for row in cells):
            raise ValueError(f"cells must be an {n}x{n} array")
        symbols = set(range(n))
        for i, row in enumerate(cells):
            if set(row) != symbols:
                raise ValueError(f"row {i} is not a permutation of 0..{n - 1}")
        for j in range(n):
            if {row[j] for row in cells} != symbols:
                raise ValueError(f"column {j} is not a permutation of 0..{n - 1}")
        object.__setattr__(self, "cells", cells)


def _weighted_sum_ok(n: int, multiplicities, shifts) -> bool:
    if len({x % n for x in shifts}) != len(shifts):
        return False
    return sum(a * x for a, x in zip(multiplicities, shifts)) % n != 0


def choose_shifts(n: int, multiplicities: Distribution) -> ShiftVector:
    """Distinct residues whose multiplicity-weighted sum is non-zero mod n.

    Requires ``0 <= a_i <= n - 1``, ``sum(a_i) = n`` and ``k <= n``.  The
    identity assignment ``x_i = i`` works unless all multiplicities are
    equal; then the all-equal special cases apply, and bounded searches
    remain as a safety net.  Every candidate is verified against the
    postcondition before being returned.

    Raises :class:`NoShifts` when no vector exists (n = k odd, all equal).
    """
    a = tuple(int(x) for x in multiplicities)
    k = len(a)
    if k < 1:
        raise RangeError("need at least one multiplicity")
    if k > n:
        raise RangeError(f"k = {k} exceeds n = {n}")
    if any(x < 0 or x > n - 1 for x in a):
        raise RangeError(f"multiplicities must lie in 0..{n - 1}, got {a}")
    if sum(a) != n:
        raise RangeError(f"multiplicities must sum to n = {n}, got sum {sum(a)}")

    def pack(xs) -> ShiftVector | None:
        xs = tuple(x % n for x in xs)
        return ShiftVector(n, xs) if _weighted_sum_ok(n, a, xs) else None

    identity = pack(range(1, k + 1))
    if identity is not None:
        return identity

    if len(set(a)) > 1:
        # Identity failed, so its weighted sum is 0 mod n; swapping the
        # residues of two adjacent unequal multiplicities changes the sum by
        # their difference, which is non-zero mod n.
        for r in range(k - 1):
            if a[r] != a[r + 1]:
                xs = list(range(1, k + 1))
                xs[r], xs[r + 1] = xs[r + 1], xs[r]
                found = pack(xs)
                if found is not None:
                    return found
                break

    if k == n and len(set(a)) == 1:
        # All shifts of k = n distinct residues use every residue once, so
        # with all multiplicities 1 the weighted sum is n(n-1)/2: zero mod n
        # exactly when n is odd.  (The even case is settled by the identity.)
        raise NoShifts(
            f"any {n} distinct residues mod {n} sum to 0 for uniform multiplicities")

    if k >= 2:
        bumped = pack(list(range(1, k)) + [k + 1])
        if bumped is not None:
            return bumped

    # Safety nets: permutation assignments of 1..k, then (for small n) every
    # tuple of distinct residues.
    for perm in itertools.islice(itertools.permutations(range(1, k + 1)), 40320):
        found = pack(perm)
        if found is not None:
            return found
    if n <= MAX_EXHAUSTIVE_SHIFT_MODULUS:
        for xs in itertools.permutations(range(n), k):
            found = pack(xs)
            if found is not None:
                return found
        raise NoShifts(
            f"no distinct residues mod {n} give a non-zero weighted sum for {a}")
    raise NoShifts(
        f"search exhausted without a valid shift vector for n={n}, a={a}")


def cyclic_construction(n: int, shifts) -> Instance:
    """Bipartite instance on two copies of ``Z_n`` defined by colour shifts.

    Left vertex ``i`` joins right vertex ``n + j`` with colour ``s`` exactly
    when ``i + j = shifts[s-1] (mod n)``.  Each colour class is a perfect
    matching and distinct shifts give pairwise disjoint classes.
    """
    if not isinstance(shifts, ShiftVector):
        shifts = ShiftVector(n, tuple(shifts))
    if shifts.modulus != n:
        raise RangeError(f"shift modulus {shifts.modulus} differs from n = {n}")
    matchings = []
    for x in shifts.shifts:
        matchings.append(tuple(sorted(
            (i, n + ((x - i) % n)) for i in range(n))))
    return Instance(n, len(shifts), tuple(matchings), bipartite=True)


def k4_construction(n: int) -> Instance:
    """Disjoint K4 blocks on consecutive vertex quadruples, three colours.

    Block ``t`` occupies vertices ``4t .. 4t+3`` with the unique
    1-factorization of K4: colour 1 pairs 0-1/2-3, colour 2 pairs 0-2/1-3,
    colour 3 pairs 0-3/1-2 (block-local labels).  Requires ``n`` even.
    """
    if n < 2 or n % 2 != 0:
        raise RangeError(f"K4 blocks need an even n >= 2, got {n}")
    m1, m2, m3 = [], [], []
    for t in range(n // 2):
        b = 4 * t
        m1 += [(b, b + 1), (b + 2, b + 3)]
        m2 += [(b, b + 2), (b + 1, b + 3)]
        m3 += [(b, b + 3), (b + 1, b + 2)]
    return Instance(n, 3, (tuple(m1), tuple(m2), tuple(m3)), bipartite=False)


def latin_to_instance(square: LatinSquare) -> Instance:
    """Complete bipartite decomposition encoded by a Latin square.

    Colour ``s`` holds the edges ``(i, n + j)`` with ``cells[i][j] == s - 1``.
    """
    n = square.order
    matchings: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for i, row in enumerate(square.cells):
        for j, s in enumerate(row):
            matchings[s].append((i, n + j))
    return Instance(n, n, tuple(tuple(sorted(m)) for m in matchings),
                    bipartite=True)


def instance_to_latin(instance: Instance) -> LatinSquare:
    """Inverse of :func:`latin_to_instance`.

    Requires a bipartite instance with ``k = n`` whose colour classes
    partition all ``n^2`` cross pairs; otherwise :class:`NotADecomposition`.
    """
    n = instance.half_order
    if not instance.bipartite:
        raise NotADecomposition("instance is not bipartite")
    if instance.colour_count != n:
        raise NotADecomposition(
            f"need k = n = {n} matchings, got {instance.colour_count}")
    cells = [[-1] * n for _ in range(n)]
    for s, pairs in enumerate(instance.matchings):
        for (u, v) in pairs:
            if not (u < n <= v):
                raise NotADecomposition(f"edge ({u},{v}) does not cross the parts")
            i, j = u, v - n
            if cells[i][j] != -1:
                raise NotADecomposition(
                    f"cell ({i},{j}) covered by colours {cells[i][j] + 1} and {s + 1}")
            cells[i][j] = s
    # k*n = n^2 pairs seen with no collision, hence full coverage.
    return LatinSquare(n, tuple(tuple(row) for row in cells))


def cayley_table(group_spec) -> LatinSquare:
    """Addition table of ``Z_m1 x ... x Z_mr``, elements in lexicographic order."""
    factors = tuple(int(m) for m in group_spec)
    if not factors:
        raise RangeError("group spec must name at least one cyclic factor")
    if any(m < 1 for m in factors):
        raise RangeError(f"factor orders must be positive, got {factors}")
    elements = list(itertools.product(*(range(m) for m in factors)))
    index = {e: i for i, e in enumerate(elements)}
    cells = tuple(
        tuple(index[tuple((x + y) % m for x, y, m in zip(ea, eb, factors))]
              for eb in elements)
        for ea in elements)
    return LatinSquare(len(elements), cells)


def extend_to_decomposition(partial: Instance) -> Instance:
    """Extend disjoint bipartite matchings to a full decomposition.

    The input's ``k`` pairwise disjoint perfect matchings of the complete
    bipartite graph are kept as the first ``k`` colours; the remaining
    ``(n - k)``-regular bipartite graph is peeled into perfect matchings by
    augmenting-path search (smallest-id start preference), which regularity
    guarantees to succeed.
    """
    n = partial.half_order
    if not partial.bipartite:
        raise TrimatchError("extension needs a bipartite instance")
    if partial.colour_count > n:
        raise NotDisjoint(
            f"{partial.colour_count} disjoint matchings cannot fit in K_{{{n},{n}}}")
    seen: dict[tuple[int, int], int] = {}
    for c, pairs in enumerate(partial.matchings, start=1):
        for p in pairs:
            if p in seen:
                raise NotDisjoint(
                    f"pair ({p[0]},{p[1]}) in colours {seen[p]} and {c}")
            seen[p] = c
    if partial.colour_count == n:
        return partial

    remaining = [[j for j in range(n) if (i, n + j) not in seen]
                 for i in range(n)]
    matchings = list(partial.matchings)
    for _ in range(n - partial.colour_count):
        match_of_right = [-1] * n

        def augment(i: int, visited: set[int]) -> bool:
            for j in remaining[i]:
                if j in visited:
                    continue
                visited.add(j)
                if match_of_right[j] < 0 or augment(match_of_right[j], visited):
                    match_of_right[j] = i
                    return True
            return False

        for i in range(n):
            if not augment(i, set()):
                raise AssertionError("regular bipartite graph had no perfect matching")
        new = sorted((i, n + j) for j, i in enumerate(match_of_right))
        for (u, v) in new:
            remaining[u].remove(v - n)
        matchings.append(tuple(new))
    return Instance(n, n, tuple(matchings), bipartite=True)


def random_instance(n: int, k: int = 3, seed: int = 0,
                    bipartite: bool = False) -> Instance:
    """Instance of ``k`` uniformly random perfect matchings, seeded.

    The same seed always produces the same instance; colour classes are
    drawn independently, so repeats across colours are possible.
    """
    if n < 1:
        raise RangeError(f"n must be positive, got {n}")
    if k < 1:
        raise RangeError(f"k must be positive, got {k}")
    rng = random.Random(seed)
    matchings = []
    for _ in range(k):
        if bipartite:
            rights = list(range(n, 2 * n))
            rng.shuffle(rights)
            pairs = [(i, rights[i]) for i in range(n)]
        else:
            verts = list(range(2 * n))
            rng.shuffle(verts)
            pairs = [(verts[2 * i], verts[2 * i + 1]) for i in range(n)]
        matchings.append(tuple(sorted(tuple(sorted(p)) for p in pairs)))
    return Instance(n, k, tuple(matchings), bipartite=bipartite)


# ---------------------------------------------------------------------------
# Latin square file format: {"order": n, "cells": [[...], ...]}
# ---------------------------------------------------------------------------

def serialize_latin_square(square: LatinSquare) -> str:
    import json

    payload = {"order": square.order,
               "cells": [list(row) for row in square.cells]}
    return json.dumps(payload, separators=(", ", ": ")) + "\n"


def parse_latin_square(text: str) -> LatinSquare:
    import json

    from .graphcore import ParseError

    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict) or set(data) != {"order", "cells"}:
        raise ParseError('latin square file must be {"order": ..., "cells": ...}')
    try:
        return LatinSquare(data["order"], tuple(tuple(r) for r in data["cells"]))
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from None
