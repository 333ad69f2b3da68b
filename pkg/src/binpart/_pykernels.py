"""Pure-Python hot kernels.

Reference implementations of the routines compiled in ``_ckernels.pyx``.
Every function works on integer sizes in grid units; both backends must
return identical results for identical inputs.
"""

from __future__ import annotations

import heapq

BACKEND = "python"


def next_fit(sizes, capacity):
    assign = []
    b = -1
    room = 0
    for s in sizes:
        if s > room:
            b += 1
            room = capacity
        room -= s
        assign.append(b)
    return assign


def first_fit(sizes, capacity):
    rooms = []
    assign = []
    for s in sizes:
        for b, room in enumerate(rooms):
            if s <= room:
                rooms[b] = room - s
                assign.append(b)
                break
        else:
            rooms.append(capacity - s)
            assign.append(len(rooms) - 1)
    return assign


def best_fit(sizes, capacity):
    rooms = []
    assign = []
    for s in sizes:
        best = -1
        best_room = capacity + 1
        for b, room in enumerate(rooms):
            # fullest feasible bin == smallest room that still fits; ties -> lowest index
            if s <= room < best_room:
                best = b
                best_room = room
        if best < 0:
            rooms.append(capacity - s)
            assign.append(len(rooms) - 1)
        else:
            rooms[best] -= s
            assign.append(best)
    return assign


def reachable_fills(sizes, caps, capacity):
    """Bounded-knapsack reachability over fills ``0..capacity``.

    Returns ``(best, witness)``: the largest reachable fill and one count
    vector attaining it.
    """
    k = len(sizes)
    # how[t][w] = copies of type t used to first reach w at layer t, -1 if unreachable
    reach = [False] * (capacity + 1)
    reach[0] = True
    how = []
    for t in range(k):
        s = sizes[t]
        cap = min(caps[t], capacity // s)
        layer = [-1] * (capacity + 1)
        new = [False] * (capacity + 1)
        for w in range(capacity + 1):
            if not reach[w]:
                continue
            for m in range(cap + 1):
                x = w + m * s
                if x > capacity:
                    break
                if not new[x]:
                    new[x] = True
                    layer[x] = m
        how.append(layer)
        reach = new
    best = capacity
    while not reach[best]:
        best -= 1
    witness = [0] * k
    w = best
    for t in range(k - 1, -1, -1):
        m = how[t][w]
        witness[t] = m
        w -= m * sizes[t]
    return best, tuple(witness)


def _lower_bound(state, sizes, fmax, col_max):
    total = 0
    h = 0
    for i, q in enumerate(state):
        if q:
            total += q * sizes[i]
            need = -(-q // col_max[i])
            if need > h:
                h = need
    by_size = -(-total // fmax)
    return by_size if by_size > h else h


def cover_search(demand, configs, sizes, max_depth, max_states):
    """Smallest multiset of ``configs`` whose item counts dominate ``demand``.

    Best-first search over clamped residual count vectors.  At each state the
    search only branches on configurations containing the uncovered type with
    the fewest suppliers, which keeps it exact.

    Returns ``(indices, status, expanded)`` where status is ``"ok"``,
    ``"uncoverable"``, ``"depth"`` or ``"budget"``; ``indices`` is ``None``
    unless the status is ``"ok"``.
    """
    k = len(demand)
    start = tuple(demand)
    if not any(start):
        return [], "ok", 0
    col_max = [0] * k
    suppliers = [[] for _ in range(k)]
    fmax = 1
    for j, cfg in enumerate(configs):
        fill = 0
        for i in range(k):
            m = cfg[i]
            if m:
                suppliers[i].append(j)
                if m > col_max[i]:
                    col_max[i] = m
                fill += m * sizes[i]
        if fill > fmax:
            fmax = fill
    for i in range(k):
        if start[i] and not col_max[i]:
            return None, "uncoverable", 0

    h0 = _lower_bound(start, sizes, fmax, col_max)
    if max_depth is not None and h0 > max_depth:
        return None, "depth", 0
    best_g = {start: 0}
    parent = {start: (None, -1)}
    heap = [(h0, 0, 0, start)]
    tick = 1
    expanded = 0
    depth_cut = False
    while heap:
        f, neg_g, _, state = heapq.heappop(heap)
        g = -neg_g
        if best_g.get(state, -1) != g:
            continue
        if not any(state):
            path = []
            while parent[state][0] is not None:
                prev, j = parent[state]
                path.append(j)
                state = prev
            path.reverse()
            return path, "ok", expanded
        expanded += 1
        if expanded > max_states:
            return None, "budget", expanded
        pick = -1
        fewest = len(configs) + 1
        for i in range(k):
            if state[i] and len(suppliers[i]) < fewest:
                fewest = len(suppliers[i])
                pick = i
        g1 = g + 1
        for j in suppliers[pick]:
            cfg = configs[j]
            nxt = tuple(q - m if q > m else 0 for q, m in zip(state, cfg))
            old = best_g.get(nxt)
            if old is not None and old <= g1:
                continue
            f1 = g1 + _lower_bound(nxt, sizes, fmax, col_max)
            if max_depth is not None and f1 > max_depth:
                depth_cut = True
                continue
            best_g[nxt] = g1
            parent[nxt] = (state, j)
            heapq.heappush(heap, (f1, -g1, tick, nxt))
            tick += 1
    return None, ("depth" if depth_cut else "uncoverable"), expanded
