"""Brute-force ground truth for exact-multiplicity matching questions.

Both entry points run a complete backtracking search over vertices in id
order: at the smallest uncovered vertex, branch on each colour whose partner
is still free and whose remaining capacity allows it, plus on leaving the
vertex unmatched.  Pruning is by per-colour capacity and by the unmatched
budget (a matching of size ``s`` leaves exactly ``2n - 2s`` vertices
uncovered).  Exponential in the worst case, which is why instance sizes are
guarded; results are exact.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .graphcore import (
    ColouredEdge,
    Distribution,
    Instance,
    Matching,
    RangeError,
)

EXISTS_GUARD_VERTICES = 24
REPORT_GUARD_VERTICES = 16
GUARD_ENV_VAR = "TRIMATCH_GUARD_OVERRIDE"


def guard_lifted(override: bool = False) -> bool:
    return override or os.environ.get(GUARD_ENV_VAR) == "1"


def _check_guard(instance: Instance, limit: int, override: bool, what: str) -> None:
    if instance.num_vertices > limit and not guard_lifted(override):
        raise RangeError(
            f"{what} is guarded to 2n <= {limit} vertices "
            f"(instance has {instance.num_vertices}); pass override_guard=True "
            f"or set {GUARD_ENV_VAR}=1 to lift")


def _check_target(instance: Instance, target) -> tuple[int, ...]:
    target = tuple(int(t) for t in target)
    if len(target) != instance.colour_count:
        raise RangeError(
            f"target has {len(target)} components, instance has "
            f"{instance.colour_count} colours")
    if any(t < 0 for t in target):
        raise RangeError(f"target must be non-negative, got {target}")
    if sum(target) > instance.half_order:
        raise RangeError(
            f"target sums to {sum(target)}, above n = {instance.half_order}")
    return target


@dataclass(frozen=True)
class RealizabilityReport:
    """Every distribution realizable by a matching of a fixed size.

    ``achievable`` maps each realizable distribution to a witness matching;
    ``queried`` optionally records a single distribution of interest together
    with its verdict.
    """

    instance_summary: str
    size: int
    achievable: dict[Distribution, Matching]
    queried: Distribution | None = None
    queried_found: bool | None = None

    def distributions(self) -> list[Distribution]:
        return sorted(self.achievable)

    def to_payload(self) -> dict:
        payload = {
            "instance": self.instance_summary,
            "size": self.size,
            "achievable": [list(d) for d in self.distributions()],
        }
        if self.queried is not None:
            payload["queried"] = list(self.queried)
            payload["queried_found"] = self.queried_found
        return payload


def exists_exact(instance: Instance, target: Distribution, *,
                 override_guard: bool = False
                 ) -> tuple[bool, Matching | None]:
    """Decide whether some matching has exactly the target distribution.

    Returns ``(True, witness)`` or ``(False, None)``.  The witness is the
    first matching found in the deterministic search order and always
    satisfies the target.
    """
    target = _check_target(instance, target)
    _check_guard(instance, EXISTS_GUARD_VERTICES, override_guard, "exists_exact")

    nv = instance.num_vertices
    k = instance.colour_count
    partners = instance.partners
    size = sum(target)
    budget = nv - 2 * size
    remaining = list(target)
    covered = [False] * nv
    chosen: list[tuple[int, int, int]] = []

    def search(v: int, skipped: int, placed: int) -> bool:
        if placed == size:
            return True
        while v < nv and covered[v]:
            v += 1
        if v == nv:
            return False
        for c in range(1, k + 1):
            if remaining[c - 1] == 0:
                continue
            u = partners[c - 1][v]
            if u < 0 or covered[u]:
                continue
            covered[v] = covered[u] = True
            remaining[c - 1] -= 1
            chosen.append((v, u, c))
            if search(v + 1, skipped, placed + 1):
                return True
            chosen.pop()
            remaining[c - 1] += 1
            covered[v] = covered[u] = False
        if skipped < budget:
            covered[v] = True
            if search(v + 1, skipped + 1, placed):
                covered[v] = False
                return True
            covered[v] = False
        return False

    if search(0, 0, 0):
        return True, Matching.from_triples(chosen)
    return False, None


def achievable_distributions(instance: Instance, size: int, *,
                             queried: Distribution | None = None,
                             override_guard: bool = False
                             ) -> RealizabilityReport:
    """Enumerate every distribution realized by a matching of exactly ``size``.

    Stores one witness per distribution (the first found in search order).
    """
    if size < 0 or size > instance.half_order:
        raise RangeError(f"size must lie in 0..{instance.half_order}, got {size}")
    if queried is not None:
        queried = _check_target(instance, queried)
        if sum(queried) != size:
            raise RangeError(
                f"queried distribution sums to {sum(queried)}, size is {size}")
    _check_guard(instance, REPORT_GUARD_VERTICES, override_guard,
                 "achievable_distributions")

    nv = instance.num_vertices
    k = instance.colour_count
    partners = instance.partners
    budget = nv - 2 * size
    counts = [0] * k
    covered = [False] * nv
    chosen: list[tuple[int, int, int]] = []
    found: dict[Distribution, Matching] = {}

    def search(v: int, skipped: int, placed: int) -> None:
        if placed == size:
            dist = tuple(counts)
            if dist not in found:
                found[dist] = Matching.from_triples(chosen)
            return
        while v < nv and covered[v]:
            v += 1
        if v == nv:
            return
        for c in range(1, k + 1):
            u = partners[c - 1][v]
            if u < 0 or covered[u]:
                continue
            covered[v] = covered[u] = True
            counts[c - 1] += 1
            chosen.append((v, u, c))
            search(v + 1, skipped, placed + 1)
            chosen.pop()
            counts[c - 1] -= 1
            covered[v] = covered[u] = False
        if skipped < budget:
            covered[v] = True
            search(v + 1, skipped + 1, placed)
            covered[v] = False

    search(0, 0, 0)
    return RealizabilityReport(
        instance_summary=instance.summary(),
        size=size,
        achievable=found,
        queried=queried,
        queried_found=None if queried is None else queried in found,
    )


def format_report(report: RealizabilityReport) -> str:
    """Human-readable table of a realizability report."""
    lines = [f"{report.instance_summary}; matchings of size {report.size}",
             f"{len(report.achievable)} achievable distribution(s):"]
    for dist in report.distributions():
        witness = report.achievable[dist]
        edges = " ".join(f"{e.u}-{e.v}c{e.colour}" for e in witness.sorted_edges())
        lines.append(f"  ({', '.join(map(str, dist))})  e.g. {edges if edges else '(empty)'}")
    if report.queried is not None:
        verdict = "achievable" if report.queried_found else "not achievable"
        lines.append(f"queried ({', '.join(map(str, report.queried))}): {verdict}")
    return "\n".join(lines) + "\n"
