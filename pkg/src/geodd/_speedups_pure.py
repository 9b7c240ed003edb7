"""Pure-Python fallback for the permutation kernels.

Same contract as the compiled module built from ``_speedups.pyx``: a table
is made once from a tuple of index permutations, then applied to argument
tuples to get the lexicographic minimum or all distinct variants.
"""

from __future__ import annotations


def make_table(perms):
    return tuple(perms)


def min_permuted(table, pts):
    return min(tuple(pts[i] for i in perm) for perm in table)


def all_permuted(table, pts):
    return sorted({tuple(pts[i] for i in perm) for perm in table})
