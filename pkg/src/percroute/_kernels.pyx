# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: SplitMix64 edge hashing and union-find labelling."""
import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t, uint64_t

cnp.import_array()

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t _mix(uint64_t seed, uint64_t key) noexcept nogil:
    cdef uint64_t z = seed + GAMMA * (key + 1)
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def mix64(uint64_t seed, uint64_t key):
    return _mix(seed, key)


def edge_open(uint64_t seed, uint64_t key, uint64_t limit):
    return _mix(seed, key) <= limit


def open_mask(uint64_t seed, const uint64_t[::1] keys, uint64_t limit):
    cdef Py_ssize_t i, m = keys.shape[0]
    out = np.empty(m, dtype=np.uint8)
    cdef uint8_t[::1] o = out
    with nogil:
        for i in range(m):
            o[i] = _mix(seed, keys[i]) <= limit
    return out


cdef inline int64_t _find(int64_t[::1] parent, int64_t x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def component_labels(Py_ssize_t n_vertices, const int64_t[::1] src,
                     const int64_t[::1] dst, const uint8_t[::1] mask):
    parent_arr = np.arange(n_vertices, dtype=np.int64)
    size_arr = np.ones(n_vertices, dtype=np.int64)
    cdef int64_t[::1] parent = parent_arr
    cdef int64_t[::1] size = size_arr
    cdef Py_ssize_t i, m = src.shape[0]
    cdef int64_t a, b
    with nogil:
        for i in range(m):
            if not mask[i]:
                continue
            a = _find(parent, src[i])
            b = _find(parent, dst[i])
            if a == b:
                continue
            if size[a] < size[b]:
                a, b = b, a
            parent[b] = a
            size[a] += size[b]
        for i in range(n_vertices):
            parent[i] = _find(parent, i)
    return parent_arr
