# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; behaviour must match reltrace.kernels.pure exactly."""

from libc.stdlib cimport free, malloc, qsort

import numpy as np


cdef int _cmp_i64(const void* a, const void* b) noexcept nogil:
    cdef long long x = (<const long long*> a)[0]
    cdef long long y = (<const long long*> b)[0]
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


cdef bint _bsearch_i64(const long long* arr, Py_ssize_t n, long long key) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) // 2
        if arr[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    return lo < n and arr[lo] == key


def scan_default(unicode text):
    """First occurrence of the default extraction pattern in *text*.

    Same contract as the pure version: ``(major, minor, maintenance,
    start, end)`` or ``None``.
    """
    cdef Py_ssize_t n = len(text)
    cdef Py_ssize_t pos = 0, i, j, k
    cdef Py_UCS4 c0, c2, c4, ch
    cdef long long maint
    cdef Py_ssize_t ndigits

    while True:
        i = text.find(u"PHP/", pos)
        if i == -1:
            return None
        j = i + 4
        # shortest possible tail is "d.d.d"
        if j + 5 > n:
            pos = i + 1
            continue
        c0 = text[j]
        if c0 < u'0' or c0 > u'9':
            pos = i + 1
            continue
        if text[j + 1] != u'.':
            pos = i + 1
            continue
        c2 = text[j + 2]
        if c2 < u'0' or c2 > u'9':
            pos = i + 1
            continue
        if text[j + 3] != u'.':
            pos = i + 1
            continue
        c4 = text[j + 4]
        if c4 < u'0' or c4 > u'9':
            pos = i + 1
            continue
        k = j + 5
        while k < n:
            ch = text[k]
            if ch < u'0' or ch > u'9':
                break
            k += 1
        ndigits = k - (j + 4)
        if ndigits <= 18:
            maint = 0
            for pos in range(j + 4, k):
                maint = maint * 10 + (<long long> text[pos] - <long long> u'0')
            return (<long long> c0 - <long long> u'0',
                    <long long> c2 - <long long> u'0',
                    maint, i, k)
        # maintenance too wide for int64: defer to Python integers
        return (<long long> c0 - <long long> u'0',
                <long long> c2 - <long long> u'0',
                int(text[j + 4:k]), i, k)


def corpus_metrics(long long[::1] major, long long[::1] minor,
                   long long[::1] maint, long long[::1] offsets):
    """Per-sequence chain statistics; see the pure twin for the contract."""
    cdef Py_ssize_t nseq = offsets.shape[0] - 1
    cdef Py_ssize_t total = major.shape[0]
    cdef Py_ssize_t k, s, e, r, t, i, a, b, n, ne, nu
    cdef Py_ssize_t max_r = 0
    cdef long long d, key
    cdef double acc, p_ii
    cdef long long pairs

    if minor.shape[0] != total or maint.shape[0] != total:
        raise ValueError("component arrays must have equal length")

    for k in range(nseq):
        s = <Py_ssize_t> offsets[k]
        e = <Py_ssize_t> offsets[k + 1]
        if s < 0 or e > total or e - s < 2:
            raise ValueError(f"sequence {k} has length {e - s}, need at least 2")
        if e - s > max_r:
            max_r = e - s

    state_counts = np.zeros(nseq, dtype=np.int64)
    downgrades = np.zeros(nseq, dtype=np.int64)
    deltas = np.zeros(nseq, dtype=np.float64)
    comm_pairs = np.zeros(nseq, dtype=np.int64)
    if nseq == 0:
        return state_counts, downgrades, deltas, comm_pairs

    cdef long long[::1] out_states = state_counts
    cdef long long[::1] out_down = downgrades
    cdef double[::1] out_delta = deltas
    cdef long long[::1] out_pairs = comm_pairs

    cdef long long* st_maj = <long long*> malloc(max_r * sizeof(long long))
    cdef long long* st_mnr = <long long*> malloc(max_r * sizeof(long long))
    cdef long long* st_mnt = <long long*> malloc(max_r * sizeof(long long))
    cdef Py_ssize_t* idx = <Py_ssize_t*> malloc(max_r * sizeof(Py_ssize_t))
    cdef long long* f_self = <long long*> malloc(max_r * sizeof(long long))
    cdef long long* f_row = <long long*> malloc(max_r * sizeof(long long))
    cdef long long* edges = <long long*> malloc(max_r * sizeof(long long))
    if (st_maj == NULL or st_mnr == NULL or st_mnt == NULL or idx == NULL
            or f_self == NULL or f_row == NULL or edges == NULL):
        free(st_maj); free(st_mnr); free(st_mnt); free(idx)
        free(f_self); free(f_row); free(edges)
        raise MemoryError()

    with nogil:
        for k in range(nseq):
            s = <Py_ssize_t> offsets[k]
            e = <Py_ssize_t> offsets[k + 1]
            r = e - s

            # state ids in first-appearance order (linear scan; |S| is tiny)
            n = 0
            for t in range(r):
                for i in range(n):
                    if (st_maj[i] == major[s + t] and st_mnr[i] == minor[s + t]
                            and st_mnt[i] == maint[s + t]):
                        break
                else:
                    st_maj[n] = major[s + t]
                    st_mnr[n] = minor[s + t]
                    st_mnt[n] = maint[s + t]
                    i = n
                    n += 1
                idx[t] = i

            for i in range(n):
                f_self[i] = 0
                f_row[i] = 0

            ne = 0
            d = 0
            for t in range(r - 1):
                a = idx[t]
                b = idx[t + 1]
                f_row[a] += 1
                if a == b:
                    f_self[a] += 1
                else:
                    edges[ne] = (<long long> a) * r + b
                    ne += 1
                if (major[s + t + 1] < major[s + t]
                        or (major[s + t + 1] == major[s + t]
                            and (minor[s + t + 1] < minor[s + t]
                                 or (minor[s + t + 1] == minor[s + t]
                                     and maint[s + t + 1] < maint[s + t])))):
                    d += 1

            acc = 0.0
            for i in range(n):
                if f_row[i] > 0:
                    p_ii = (<double> f_self[i]) / (<double> f_row[i])
                else:
                    p_ii = 0.0
                acc += 1.0 - p_ii

            pairs = 0
            if ne > 0:
                qsort(edges, ne, sizeof(long long), _cmp_i64)
                nu = 0
                for t in range(ne):
                    if nu == 0 or edges[t] != edges[nu - 1]:
                        edges[nu] = edges[t]
                        nu += 1
                for t in range(nu):
                    a = <Py_ssize_t> (edges[t] // r)
                    b = <Py_ssize_t> (edges[t] % r)
                    if a < b and _bsearch_i64(edges, nu, (<long long> b) * r + a):
                        pairs += 1

            out_states[k] = n
            out_down[k] = d
            out_delta[k] = acc / n
            out_pairs[k] = pairs

    free(st_maj); free(st_mnr); free(st_mnt); free(idx)
    free(f_self); free(f_row); free(edges)
    return state_counts, downgrades, deltas, comm_pairs
