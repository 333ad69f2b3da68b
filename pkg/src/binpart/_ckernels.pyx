# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; mirrors ``_pykernels`` result for result."""

import heapq

from libc.stdlib cimport malloc, free

BACKEND = "cython"


cdef int* _as_buffer(object seq, Py_ssize_t n) except NULL:
    cdef int* buf = <int*>malloc((n if n > 0 else 1) * sizeof(int))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        buf[i] = seq[i]
    return buf


def next_fit(sizes, int capacity):
    cdef Py_ssize_t n = len(sizes), i
    cdef int* s = _as_buffer(sizes, n)
    cdef int b = -1, room = 0
    out = [0] * n
    try:
        for i in range(n):
            if s[i] > room:
                b += 1
                room = capacity
            room -= s[i]
            out[i] = b
    finally:
        free(s)
    return out


def first_fit(sizes, int capacity):
    cdef Py_ssize_t n = len(sizes), i
    cdef int* s = _as_buffer(sizes, n)
    cdef int* rooms = <int*>malloc((n if n > 0 else 1) * sizeof(int))
    cdef int nbins = 0, b, x
    out = [0] * n
    try:
        for i in range(n):
            x = s[i]
            b = 0
            while b < nbins and rooms[b] < x:
                b += 1
            if b == nbins:
                rooms[b] = capacity
                nbins += 1
            rooms[b] -= x
            out[i] = b
    finally:
        free(s)
        free(rooms)
    return out


def best_fit(sizes, int capacity):
    cdef Py_ssize_t n = len(sizes), i
    cdef int* s = _as_buffer(sizes, n)
    cdef int* rooms = <int*>malloc((n if n > 0 else 1) * sizeof(int))
    cdef int nbins = 0, b, x, best, best_room
    out = [0] * n
    try:
        for i in range(n):
            x = s[i]
            best = -1
            best_room = capacity + 1
            for b in range(nbins):
                if x <= rooms[b] and rooms[b] < best_room:
                    best = b
                    best_room = rooms[b]
            if best < 0:
                best = nbins
                rooms[best] = capacity
                nbins += 1
            rooms[best] -= x
            out[i] = best
    finally:
        free(s)
        free(rooms)
    return out


def reachable_fills(sizes, caps, int capacity):
    cdef Py_ssize_t k = len(sizes), t
    cdef int w, m, x, s, cap, best
    cdef int* reach = <int*>malloc((capacity + 1) * sizeof(int))
    cdef int* new = <int*>malloc((capacity + 1) * sizeof(int))
    cdef int* how = <int*>malloc(((k if k > 0 else 1) * (capacity + 1)) * sizeof(int))
    cdef int* tmp
    try:
        for w in range(capacity + 1):
            reach[w] = 0
        reach[0] = 1
        for t in range(k):
            s = sizes[t]
            cap = min(<int>caps[t], capacity // s)
            for w in range(capacity + 1):
                new[w] = 0
                how[t * (capacity + 1) + w] = -1
            for w in range(capacity + 1):
                if not reach[w]:
                    continue
                for m in range(cap + 1):
                    x = w + m * s
                    if x > capacity:
                        break
                    if not new[x]:
                        new[x] = 1
                        how[t * (capacity + 1) + x] = m
            tmp = reach
            reach = new
            new = tmp
        best = capacity
        while not reach[best]:
            best -= 1
        witness = [0] * k
        w = best
        for t in range(k - 1, -1, -1):
            m = how[t * (capacity + 1) + w]
            witness[t] = m
            w -= m * <int>sizes[t]
        return best, tuple(witness)
    finally:
        free(reach)
        free(new)
        free(how)


cdef inline long _ceil_div(long a, long b):
    # operands are non-negative; C division truncates under cdivision
    return (a + b - 1) // b


cdef long _lower_bound(tuple state, int* sizes, long fmax, int* col_max, Py_ssize_t k):
    cdef long total = 0, h = 0, need, q
    cdef Py_ssize_t i
    for i in range(k):
        q = <long>state[i]
        if q:
            total += q * sizes[i]
            need = _ceil_div(q, col_max[i])
            if need > h:
                h = need
    need = _ceil_div(total, fmax)
    return need if need > h else h


def cover_search(demand, configs, sizes, max_depth, long max_states):
    cdef Py_ssize_t k = len(demand), nc = len(configs), i, j, jj
    cdef tuple start = tuple(demand)
    if not any(start):
        return [], "ok", 0
    cdef int* sz = _as_buffer(sizes, k)
    cdef int* col_max = <int*>malloc((k if k > 0 else 1) * sizeof(int))
    cdef int* cm = <int*>malloc(((nc if nc > 0 else 1) * (k if k > 0 else 1)) * sizeof(int))
    cdef long fmax = 1, fill, h0, g, g1, f1, expanded = 0, tick = 1, q, m
    cdef long depth_cap = -1 if max_depth is None else <long>max_depth
    cdef bint depth_cut = False
    cdef Py_ssize_t pick, fewest
    cdef list suppliers = [[] for _ in range(k)]
    cdef list nxt_list
    cdef tuple state, nxt, cfg
    try:
        for i in range(k):
            col_max[i] = 0
        for j in range(nc):
            cfg = tuple(configs[j])
            fill = 0
            for i in range(k):
                cm[j * k + i] = cfg[i]
                if cfg[i]:
                    suppliers[i].append(j)
                    if cfg[i] > col_max[i]:
                        col_max[i] = cfg[i]
                    fill += <long>cfg[i] * sz[i]
            if fill > fmax:
                fmax = fill
        for i in range(k):
            if start[i] and not col_max[i]:
                return None, "uncoverable", 0

        h0 = _lower_bound(start, sz, fmax, col_max, k)
        if depth_cap >= 0 and h0 > depth_cap:
            return None, "depth", 0
        best_g = {start: 0}
        parent = {start: (None, -1)}
        heap = [(h0, 0, 0, start)]
        while heap:
            f, neg_g, _, state = heapq.heappop(heap)
            g = -neg_g
            if best_g.get(state, -1) != g:
                continue
            if not any(state):
                path = []
                while parent[state][0] is not None:
                    prev, jj = parent[state]
                    path.append(jj)
                    state = prev
                path.reverse()
                return path, "ok", expanded
            expanded += 1
            if expanded > max_states:
                return None, "budget", expanded
            pick = -1
            fewest = nc + 1
            for i in range(k):
                if state[i] and len(<list>suppliers[i]) < fewest:
                    fewest = len(<list>suppliers[i])
                    pick = i
            g1 = g + 1
            for jj in suppliers[pick]:
                nxt_list = [0] * k
                for i in range(k):
                    q = <long>state[i]
                    m = cm[jj * k + i]
                    nxt_list[i] = q - m if q > m else 0
                nxt = tuple(nxt_list)
                old = best_g.get(nxt)
                if old is not None and old <= g1:
                    continue
                f1 = g1 + _lower_bound(nxt, sz, fmax, col_max, k)
                if depth_cap >= 0 and f1 > depth_cap:
                    depth_cut = True
                    continue
                best_g[nxt] = g1
                parent[nxt] = (state, jj)
                heapq.heappush(heap, (f1, -g1, tick, nxt))
                tick += 1
        return None, ("depth" if depth_cut else "uncoverable"), expanded
    finally:
        free(sz)
        free(col_max)
        free(cm)
