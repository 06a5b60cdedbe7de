"""Held-Karp subset dynamic programs over rooted simple paths.

Shared by the exact oracles and the LP column enumeration: for a root and a
small item set, compute for every subset the cheapest rooted simple path
visiting exactly that subset (any endpoint), with an optimal visiting order
for witness reconstruction.
"""

from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Sequence, Tuple

INF = Fraction(1, 1) * 10**18  # effectively infinite, keeps arithmetic rational


def min_paths(
    root,
    items: Sequence,
    length: Callable[[object, object], Fraction],
) -> Dict[FrozenSet, Tuple[Fraction, Tuple]]:
    """Map each subset of items to (min rooted-path length, optimal order).

    length(u, v) may be asymmetric (directed service metric); paths are
    traversed root -> first -> ... -> last.
    """
    m = len(items)
    full = 1 << m
    # dp[mask][last] = min length of a path from root covering mask, ending at last
    dp = [[None] * m for _ in range(full)]
    parent = [[None] * m for _ in range(full)]
    for i, v in enumerate(items):
        dp[1 << i][i] = Fraction(length(root, v))
    for mask in range(1, full):
        row = dp[mask]
        for last in range(m):
            cur = row[last]
            if cur is None:
                continue
            for nxt in range(m):
                bit = 1 << nxt
                if mask & bit:
                    continue
                cand = cur + Fraction(length(items[last], items[nxt]))
                nmask = mask | bit
                if dp[nmask][nxt] is None or cand < dp[nmask][nxt]:
                    dp[nmask][nxt] = cand
                    parent[nmask][nxt] = last
    out: Dict[FrozenSet, Tuple[Fraction, Tuple]] = {frozenset(): (Fraction(0), ())}
    for mask in range(1, full):
        best_last, best_len = None, None
        for last in range(m):
            val = dp[mask][last]
            if val is not None and (best_len is None or val < best_len):
                best_len, best_last = val, last
        if best_last is None:
            continue
        order = []
        cur, cmask = best_last, mask
        while cur is not None:
            order.append(items[cur])
            prv = parent[cmask][cur]
            cmask &= ~(1 << cur)
            cur = prv
        order.reverse()
        key = frozenset(items[i] for i in range(m) if mask & (1 << i))
        out[key] = (best_len, tuple(order))
    return out


def min_latency_orders(
    root,
    items: Sequence,
    step: Callable[[object, object], Fraction],
    weight: Callable[[object], int],
) -> Dict[FrozenSet, Tuple[Fraction, Tuple]]:
    """Map each subset to (min total weighted latency, optimal serving order).

    step(u, v) is the latency increment when moving from u to serving v
    (edge cost plus v's service time, as configured by the caller). The
    weighted objective sums, over serving steps, step cost times the total
    weight of nodes not yet served, which makes a subset DP sufficient.
    """
    m = len(items)
    full = 1 << m
    wts = [weight(v) for v in items]

    def mask_weight(mask: int) -> int:
        return sum(wts[i] for i in range(m) if mask & (1 << i))

    # Suffix DP: F[mask][first] is the latency contribution of serving the
    # nodes in mask starting at `first`, excluding the step into `first`
    # (whose multiplier depends on nodes served before the suffix).
    F = [[None] * m for _ in range(full)]
    nxt_of = [[None] * m for _ in range(full)]
    for i in range(m):
        F[1 << i][i] = Fraction(0)
    masks_by_size = sorted(range(1, full), key=lambda msk: bin(msk).count("1"))
    for mask in masks_by_size:
        w_mask = mask_weight(mask)
        for u in range(m):
            if mask & (1 << u):
                continue
            best_val, best_first = None, None
            for first in range(m):
                cur = F[mask][first]
                if cur is None:
                    continue
                cand = Fraction(step(items[u], items[first])) * w_mask + cur
                if best_val is None or cand < best_val:
                    best_val, best_first = cand, first
            if best_val is not None:
                nmask = mask | (1 << u)
                if F[nmask][u] is None or best_val < F[nmask][u]:
                    F[nmask][u] = best_val
                    nxt_of[nmask][u] = best_first

    out: Dict[FrozenSet, Tuple[Fraction, Tuple]] = {frozenset(): (Fraction(0), ())}
    for mask in range(1, full):
        w_mask = mask_weight(mask)
        best_val, best_first = None, None
        for first in range(m):
            cur = F[mask][first]
            if cur is None:
                continue
            cand = Fraction(step(root, items[first])) * w_mask + cur
            if best_val is None or cand < best_val:
                best_val, best_first = cand, first
        if best_first is None:
            continue
        order = []
        cur, cmask = best_first, mask
        while cur is not None:
            order.append(items[cur])
            nx = nxt_of[cmask][cur]
            cmask &= ~(1 << cur)
            cur = nx
        key = frozenset(items[i] for i in range(m) if mask & (1 << i))
        out[key] = (best_val, tuple(order))
    return out
