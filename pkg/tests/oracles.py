"""Independent reference implementations used only by the tests.

They are deliberately naive: no shared code with the package beyond the
Instance container, so agreement means something.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def configs_oracle(sizes: list[Fraction], caps: list[int], delta: Fraction) -> set[tuple[int, ...]]:
    """Every count vector with fill in [1 - delta, 1], by Cartesian product."""
    ranges = [range(c + 1) for c in caps]
    out = set()
    for counts in itertools.product(*ranges):
        fill = sum(m * s for m, s in zip(counts, sizes))
        if 1 - delta <= fill <= 1:
            out.add(counts)
    return out


def opt_bins_oracle(items: list[Fraction]) -> int:
    """Minimum bins by DP over item subsets.

    State: set of packed items -> (bins opened, fill of the last bin),
    minimised lexicographically.  Standard exact method for n <= ~15.
    """
    n = len(items)
    if n == 0:
        return 0
    full = (1 << n) - 1
    INF = (n + 1, Fraction(0))
    best = [INF] * (1 << n)
    best[0] = (1, Fraction(0))
    for mask in range(1 << n):
        bins, fill = best[mask]
        if (bins, fill) == INF:
            continue
        for i in range(n):
            if mask >> i & 1:
                continue
            nxt = mask | (1 << i)
            if fill + items[i] <= 1:
                cand = (bins, fill + items[i])
            else:
                cand = (bins + 1, items[i])
            if cand < best[nxt]:
                best[nxt] = cand
    return best[full][0]


def min_cover_oracle(demand: list[int], vectors: list[tuple[int, ...]], max_size: int) -> int | None:
    """Smallest multiset of vectors dominating demand, by trying every multiset."""
    if not any(demand):
        return 0
    for size in range(1, max_size + 1):
        for combo in itertools.combinations_with_replacement(range(len(vectors)), size):
            tot = [0] * len(demand)
            for j in combo:
                for i, m in enumerate(vectors[j]):
                    tot[i] += m
            if all(t >= q for t, q in zip(tot, demand)):
                return size
    return None


def max_fill_oracle(sizes: list[Fraction], caps: list[int]) -> Fraction:
    best = Fraction(0)
    for counts in itertools.product(*[range(c + 1) for c in caps]):
        fill = sum(m * s for m, s in zip(counts, sizes))
        if best < fill <= 1:
            best = fill
    return best
