# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_fallback.py`` for the contracts."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int8_t, int32_t, int64_t, uint32_t

cnp.import_array()

NAME = "cython"


cdef extern from *:
    int __builtin_clz(unsigned int) nogil


cdef inline int _bitlen(uint32_t v) nogil:
    if v == 0:
        return 0
    return 32 - __builtin_clz(v)


def rank(const uint32_t[::1] vecs):
    cdef uint32_t pivot[33]
    cdef Py_ssize_t i, n = vecs.shape[0]
    cdef uint32_t v
    cdef int h, r = 0
    for h in range(33):
        pivot[h] = 0
    with nogil:
        for i in range(n):
            v = vecs[i]
            while v:
                h = _bitlen(v)
                if pivot[h] == 0:
                    pivot[h] = v
                    r += 1
                    break
                v ^= pivot[h]
    return r


def part_sizes(const int8_t[::1] labels, int nparts):
    # four interleaved histograms break the store-to-load chain on runs of equal labels
    cdef int64_t cnt[4][129]
    cdef Py_ssize_t i, n = labels.shape[0], n4 = n - n % 4
    cdef int k
    for k in range(129):
        cnt[0][k] = 0
        cnt[1][k] = 0
        cnt[2][k] = 0
        cnt[3][k] = 0
    with nogil:
        for i in range(0, n4, 4):
            cnt[0][labels[i] + 1] += 1
            cnt[1][labels[i + 1] + 1] += 1
            cnt[2][labels[i + 2] + 1] += 1
            cnt[3][labels[i + 3] + 1] += 1
        for i in range(n4, n):
            cnt[0][labels[i] + 1] += 1
    out = np.zeros(nparts, dtype=np.int64)
    cdef int64_t[::1] o = out
    for k in range(min(nparts, 128)):
        o[k] = cnt[0][k + 1] + cnt[1][k + 1] + cnt[2][k + 1] + cnt[3][k + 1]
    return out


def index_mask(Py_ssize_t size, const int64_t[::1] idx):
    out = np.zeros(size, dtype=bool)
    cdef cnp.npy_bool[::1] m = out
    cdef Py_ssize_t i, n = idx.shape[0]
    for i in range(n):
        if not 0 <= idx[i] < size:
            raise IndexError(f"index {idx[i]} out of range")
    with nogil:
        for i in range(n):
            m[idx[i]] = 1
    return out


def restrict_labels(const int8_t[::1] labels, const int64_t[::1] idx):
    out = np.array(labels, dtype=np.int8, copy=True)
    cdef int8_t[::1] o = out
    cdef Py_ssize_t i, n = idx.shape[0], size = labels.shape[0]
    for i in range(n):
        if not 0 <= idx[i] < size:
            raise IndexError(f"index {idx[i]} out of range")
    with nogil:
        for i in range(n):
            o[idx[i]] = -1
    return out


def classify_pairs(const uint32_t[::1] elems, const int8_t[::1] elem_labels,
                   const int8_t[::1] labels):
    cdef Py_ssize_t a, b, n = elems.shape[0]
    cdef int8_t la, lb, ls, lo, hi
    cdef int64_t c0 = 0, c1 = 0, c2 = 0, c3 = 0
    cdef int64_t va = -1, vb = -1
    with nogil:
        for a in range(n - 1):
            la = elem_labels[a]
            for b in range(a + 1, n):
                lb = elem_labels[b]
                if lb == la:
                    continue
                ls = labels[elems[a] ^ elems[b]]
                if la < lb:
                    lo = la
                    hi = lb
                else:
                    lo = lb
                    hi = la
                if ls == lo:
                    c0 += 1
                elif ls == hi:
                    c1 += 1
                elif ls < 0:
                    c2 += 1
                else:
                    c3 += 1
                    if va < 0:
                        va = elems[a]
                        vb = elems[b]
    counts = np.array([c0, c1, c2, c3], dtype=np.int64)
    violation = None if va < 0 else (int(va), int(vb))
    return counts, violation


def sumset_sweep(const uint32_t[::1] part_elems, const int64_t[::1] offsets, int d):
    cdef Py_ssize_t size = (<Py_ssize_t>1) << d
    first_arr = np.full(size, -1, dtype=np.int32)
    reach_arr = np.empty(size, dtype=np.uint32)
    cdef int32_t[::1] first = first_arr
    cdef uint32_t[::1] reach = reach_arr
    cdef Py_ssize_t nreach = 0, nold, t, i, j, lo, hi
    cdef Py_ssize_t nparts = offsets.shape[0] - 1
    cdef uint32_t p, x
    cdef int hit_t = -1
    cdef uint32_t hit_v = 0
    with nogil:
        for t in range(nparts):
            lo = offsets[t]
            hi = offsets[t + 1]
            for j in range(lo, hi):
                if first[part_elems[j]] >= 0:
                    hit_t = <int>t
                    hit_v = part_elems[j]
                    break
            if hit_t >= 0:
                break
            nold = nreach
            for i in range(nold):
                for j in range(lo, hi):
                    x = reach[i] ^ part_elems[j]
                    if first[x] < 0:
                        first[x] = <int32_t>t
                        reach[nreach] = x
                        nreach += 1
            for j in range(lo, hi):
                p = part_elems[j]
                if first[p] < 0:
                    first[p] = <int32_t>t
                    reach[nreach] = p
                    nreach += 1
    return first_arr, hit_t, int(hit_v)
