# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled int64 assignment search; mirrors setupsched._kernel_py exactly.

Callers must pre-check that every partial load fits in 63 bits; the pure
twin is the fallback for anything larger.
"""

from libc.stdint cimport int64_t
from libc.stdlib cimport free, malloc


cdef struct Search:
    int n
    int m
    int K
    int64_t* costs      # n*m, row-major, -1 = infinite
    int64_t* setups     # K*m
    int* cls
    int* order
    int64_t* loads
    int* counts         # m*K
    int64_t best
    int64_t bound


cdef void _dfs_best(Search* s, int d, int64_t running_max) noexcept:
    cdef int j, k, i
    cdef int64_t c, extra, new_load
    if d == s.n:
        s.best = running_max
        return
    j = s.order[d]
    k = s.cls[j]
    for i in range(s.m):
        c = s.costs[j * s.m + i]
        if c < 0:
            continue
        extra = 0
        if s.counts[i * s.K + k] == 0:
            extra = s.setups[k * s.m + i]
            if extra < 0:
                continue
        new_load = s.loads[i] + c + extra
        if new_load >= s.best:
            continue
        s.loads[i] = new_load
        s.counts[i * s.K + k] += 1
        _dfs_best(s, d + 1, new_load if new_load > running_max else running_max)
        s.counts[i * s.K + k] -= 1
        s.loads[i] = new_load - c - extra


cdef bint _dfs_complete(Search* s, int d) noexcept:
    cdef int j, k, i
    cdef int64_t c, extra, new_load
    if d == s.n:
        return True
    j = s.order[d]
    k = s.cls[j]
    for i in range(s.m):
        c = s.costs[j * s.m + i]
        if c < 0:
            continue
        extra = 0
        if s.counts[i * s.K + k] == 0:
            extra = s.setups[k * s.m + i]
            if extra < 0:
                continue
        new_load = s.loads[i] + c + extra
        if new_load > s.bound:
            continue
        s.loads[i] = new_load
        s.counts[i * s.K + k] += 1
        if _dfs_complete(s, d + 1):
            return True
        s.counts[i * s.K + k] -= 1
        s.loads[i] = new_load - c - extra
    return False


cdef int _alloc(Search* s, costs, setups, cls, order, int m) except -1:
    cdef int total_jobs = len(costs)
    cdef int K = len(setups)
    cdef int i, j, k
    s.n = len(order)
    s.m = m
    s.K = K
    s.costs = <int64_t*> malloc(total_jobs * m * sizeof(int64_t))
    s.setups = <int64_t*> malloc((K * m if K else 1) * sizeof(int64_t))
    s.cls = <int*> malloc((total_jobs if total_jobs else 1) * sizeof(int))
    s.order = <int*> malloc((s.n if s.n else 1) * sizeof(int))
    s.loads = <int64_t*> malloc(m * sizeof(int64_t))
    s.counts = <int*> malloc((m * K if K else 1) * sizeof(int))
    if not (s.costs and s.setups and s.cls and s.order and s.loads and s.counts):
        raise MemoryError()
    for j in range(total_jobs):
        row = costs[j]
        for i in range(m):
            s.costs[j * m + i] = row[i]
        s.cls[j] = cls[j]
    for k in range(K):
        row = setups[k]
        for i in range(m):
            s.setups[k * m + i] = row[i]
    for j in range(s.n):
        s.order[j] = order[j]
    return 0


cdef void _release(Search* s) noexcept:
    free(s.costs)
    free(s.setups)
    free(s.cls)
    free(s.order)
    free(s.loads)
    free(s.counts)


def best_value(costs, setups, cls, order, m, seed):
    """Smallest achievable maximum load strictly below ``seed``; -1 if none."""
    cdef Search s
    cdef int i
    _alloc(&s, costs, setups, cls, order, m)
    try:
        for i in range(s.m):
            s.loads[i] = 0
        for i in range(s.m * s.K):
            s.counts[i] = 0
        s.best = seed
        s.bound = 0
        _dfs_best(&s, 0, 0)
        return -1 if s.best == seed else s.best
    finally:
        _release(&s)


def can_complete(costs, setups, cls, order, m, loads, counts, bound):
    """True when the remaining jobs fit with every machine load ≤ bound."""
    cdef Search s
    cdef int i, k
    _alloc(&s, costs, setups, cls, order, m)
    try:
        for i in range(s.m):
            s.loads[i] = loads[i]
        for i in range(s.m):
            for k in range(s.K):
                s.counts[i * s.K + k] = counts[i][k]
        s.best = 0
        s.bound = bound
        return bool(_dfs_complete(&s, 0))
    finally:
        _release(&s)
