# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled permutation kernels for canonicalization hot loops.

Mirrors ``_speedups_pure``: apply a fixed set of index permutations to a
short argument tuple and take the lexicographic minimum (``min_permuted``)
or the de-duplicated sorted variants (``all_permuted``). Arities never
exceed 8, so fixed C buffers are enough; the permutation table is flattened
once into a C array via ``make_table``.
"""

from libc.stdlib cimport free, malloc


cdef class PermTable:
    cdef int *flat
    cdef int n
    cdef int arity
    cdef object perms  # original tuple-of-tuples, kept for all_permuted

    def __cinit__(self, perms):
        cdef int i, j
        self.perms = tuple(perms)
        self.n = len(self.perms)
        self.arity = len(self.perms[0]) if self.n else 0
        self.flat = <int *> malloc(self.n * self.arity * sizeof(int))
        if self.flat == NULL:
            raise MemoryError()
        for i in range(self.n):
            for j in range(self.arity):
                self.flat[i * self.arity + j] = self.perms[i][j]

    def __dealloc__(self):
        if self.flat != NULL:
            free(self.flat)


def make_table(perms):
    return PermTable(perms)


def min_permuted(PermTable table, pts):
    cdef int arity = table.arity
    cdef int n = table.n
    cdef int[8] cur
    cdef int[8] best
    cdef int *flat = table.flat
    cdef int i, j, k, cmp

    if len(pts) != arity or arity > 8:
        raise ValueError("arity mismatch")

    for j in range(arity):
        best[j] = pts[j]
    for i in range(n):
        cmp = 0
        for j in range(arity):
            cur[j] = pts[flat[i * arity + j]]
        for j in range(arity):
            if cur[j] < best[j]:
                cmp = -1
                break
            if cur[j] > best[j]:
                cmp = 1
                break
        if cmp < 0:
            for k in range(arity):
                best[k] = cur[k]
    return tuple(best[j] for j in range(arity))


def all_permuted(PermTable table, pts):
    cdef set out = set()
    cdef object perm
    for perm in table.perms:
        out.add(tuple(pts[i] for i in perm))
    return sorted(out)
