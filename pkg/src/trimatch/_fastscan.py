"""Compiled twin of the three-colour split scan's per-instance decision.

The exhaustive split scan visits tens of millions of instances at its
largest guarded size, far beyond what interpreted per-instance work allows.
This module batches the stream into arrays and decides every (instance,
target) case in compiled code: the same component test and the same
capacity/budget-pruned backtracking search that the pure scan path performs
through :mod:`trimatch.oracle`, only faster.  Candidate failures are
reported back by stream index and re-verified in the interpreter with fresh
oracle calls, so a kernel defect cannot silently inject a counterexample.

Importing this module requires numpy and numba (the ``fast`` extra).
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .conjectures import _raw_triples

_BATCH_ROWS = 8192


@njit(cache=True)
def _exists_target(p2, p3, nv, t1, t2, t3,
                   fmask, fc1, fc2, fc3, fskip, fbranch):
    """Is some matching distributed exactly as (t1, t2, t3)?

    Iterative backtracking over vertices in id order; the canonical first
    colour pairs v with v^1.  Frame arrays are caller-provided scratch.
    """
    need = t1 + t2 + t3
    budget = nv - 2 * need
    full = (1 << nv) - 1
    depth = 0
    fmask[0] = 0
    fc1[0] = 0
    fc2[0] = 0
    fc3[0] = 0
    fskip[0] = 0
    fbranch[0] = 0
    while depth >= 0:
        if fc1[depth] + fc2[depth] + fc3[depth] == need:
            return True
        mask = fmask[depth]
        if mask == full:
            depth -= 1
            continue
        v = 0
        while (mask >> v) & 1:
            v += 1
        b = fbranch[depth]
        moved = False
        while b < 4:
            fbranch[depth] = b + 1
            if b < 3:
                if b == 0:
                    u = v ^ 1
                    cap = t1 - fc1[depth]
                elif b == 1:
                    u = p2[v]
                    cap = t2 - fc2[depth]
                else:
                    u = p3[v]
                    cap = t3 - fc3[depth]
                if cap > 0 and ((mask >> u) & 1) == 0:
                    nd = depth + 1
                    fmask[nd] = mask | (1 << v) | (1 << u)
                    fc1[nd] = fc1[depth] + (1 if b == 0 else 0)
                    fc2[nd] = fc2[depth] + (1 if b == 1 else 0)
                    fc3[nd] = fc3[depth] + (1 if b == 2 else 0)
                    fskip[nd] = fskip[depth]
                    fbranch[nd] = 0
                    depth = nd
                    moved = True
                    break
                b += 1
            else:
                if fskip[depth] < budget:
                    nd = depth + 1
                    fmask[nd] = mask | (1 << v)
                    fc1[nd] = fc1[depth]
                    fc2[nd] = fc2[depth]
                    fc3[nd] = fc3[depth]
                    fskip[nd] = fskip[depth] + 1
                    fbranch[nd] = 0
                    depth = nd
                    moved = True
                break
        if not moved:
            depth -= 1
    return False


@njit(cache=True)
def _has_non_k4(p2, p3, nv, stack):
    seen = 0
    full = (1 << nv) - 1
    while seen != full:
        v0 = 0
        while (seen >> v0) & 1:
            v0 += 1
        comp = 0
        top = 0
        stack[top] = v0
        top += 1
        size = 0
        while top > 0:
            top -= 1
            v = stack[top]
            if (comp >> v) & 1:
                continue
            comp |= 1 << v
            size += 1
            u = v ^ 1
            if ((comp >> u) & 1) == 0:
                stack[top] = u
                top += 1
            u = p2[v]
            if ((comp >> u) & 1) == 0:
                stack[top] = u
                top += 1
            u = p3[v]
            if ((comp >> u) & 1) == 0:
                stack[top] = u
                top += 1
        if size != 4:
            return True
        for v in range(nv):
            if (comp >> v) & 1:
                a = v ^ 1
                b = p2[v]
                c = p3[v]
                if a == b or a == c or b == c:
                    return True
        seen |= comp
    return False


@njit(cache=True)
def _decide_rows(p2s, p3s, nrows, nv, t1s, t2s, t3s, qual_out, fail_out):
    ntargets = t1s.shape[0]
    fmask = np.zeros(nv + 2, np.int64)
    fc1 = np.zeros(nv + 2, np.int64)
    fc2 = np.zeros(nv + 2, np.int64)
    fc3 = np.zeros(nv + 2, np.int64)
    fskip = np.zeros(nv + 2, np.int64)
    fbranch = np.zeros(nv + 2, np.int64)
    stack = np.zeros(3 * nv + 4, np.int64)
    for r in range(nrows):
        p2 = p2s[r]
        p3 = p3s[r]
        fail = np.int64(0)
        if _has_non_k4(p2, p3, nv, stack):
            qual_out[r] = 1
            for t in range(ntargets):
                if not _exists_target(p2, p3, nv, t1s[t], t2s[t], t3s[t],
                                      fmask, fc1, fc2, fc3, fskip, fbranch):
                    fail |= np.int64(1) << t
        else:
            qual_out[r] = 0
        fail_out[r] = fail


def scan_triple_split(n, simple_only, residue, modulus, targets):
    """Compiled counterpart of the pure split-scan job; same result tuple."""
    nv = 2 * n
    if len(targets) > 63:
        raise ValueError("too many targets for the failure bitmask")
    t1s = np.array([t[0] for t in targets], np.int64)
    t2s = np.array([t[1] for t in targets], np.int64)
    t3s = np.array([t[2] for t in targets], np.int64)
    p2s = np.zeros((_BATCH_ROWS, nv), np.int64)
    p3s = np.zeros((_BATCH_ROWS, nv), np.int64)
    qual = np.zeros(_BATCH_ROWS, np.int64)
    failm = np.zeros(_BATCH_ROWS, np.int64)
    indices = np.zeros(_BATCH_ROWS, np.int64)

    scanned = qualifying = cases = 0
    fails = []
    nrows = 0

    def flush():
        nonlocal scanned, qualifying, cases, nrows
        if nrows == 0:
            return
        _decide_rows(p2s, p3s, nrows, nv, t1s, t2s, t3s, qual, failm)
        scanned += nrows
        nqual = int(qual[:nrows].sum())
        qualifying += nqual
        cases += nqual * len(targets)
        if failm[:nrows].any():
            for r in np.nonzero(failm[:nrows])[0]:
                bits = int(failm[r])
                for t in range(len(targets)):
                    if (bits >> t) & 1:
                        fails.append((int(indices[r]), targets[t]))
        nrows = 0

    for idx, (p2, p3) in enumerate(_raw_triples(n, simple_only)):
        if idx % modulus != residue:
            continue
        p2s[nrows, :] = p2
        p3s[nrows, :] = p3
        indices[nrows] = idx
        nrows += 1
        if nrows == _BATCH_ROWS:
            flush()
    flush()
    return scanned, qualifying, cases, fails
