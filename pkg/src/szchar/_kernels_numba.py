"""Numba versions of the batched matrix kernels.

Importing this module requires numba; the backend module falls back to the
numpy kernels when the import fails.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def batch_mat_mul(MUL, A, B):
    n = A.shape[0]
    C = np.zeros((n, 4, 4), dtype=np.uint8)
    for t in range(n):
        for i in range(4):
            for j in range(4):
                acc = np.uint8(0)
                for k in range(4):
                    acc ^= MUL[A[t, i, k], B[t, k, j]]
                C[t, i, j] = acc
    return C


@njit(cache=True)
def pack_mats(A, m):
    n = A.shape[0]
    keys = np.zeros(n, dtype=np.uint64)
    for t in range(n):
        key = np.uint64(0)
        shift = 0
        for i in range(4):
            for j in range(4):
                key |= np.uint64(A[t, i, j]) << np.uint64(shift)
                shift += m
        keys[t] = key
    return keys


@njit(cache=True)
def unpack_mats(keys, m):
    n = keys.shape[0]
    mask = np.uint64((1 << m) - 1)
    A = np.zeros((n, 4, 4), dtype=np.uint8)
    for t in range(n):
        shift = np.uint64(0)
        for i in range(4):
            for j in range(4):
                A[t, i, j] = np.uint8((keys[t] >> shift) & mask)
                shift += np.uint64(m)
    return A
