"""Vectorized numpy kernels for batched 4x4 matrix work over small binary fields.

All kernels take a precomputed (q, q) uint8 multiplication table; field
elements are their int encodings.  Shapes follow numpy conventions:
matrices are (N, 4, 4) uint8 arrays.
"""

import numpy as np


def batch_mat_mul(MUL, A, B):
    """Entrywise-batched product C[n] = A[n] B[n] over the table field.

    Parameters
    ----------
    MUL : (q, q) uint8
        multiplication table
    A, B : (N, 4, 4) uint8

    Returns
    -------
    (N, 4, 4) uint8
    """
    Bt = B.transpose(0, 2, 1)
    terms = MUL[A[:, :, None, :], Bt[:, None, :, :]]
    return np.bitwise_xor.reduce(terms, axis=3)


def pack_mats(A, m):
    """Pack (N, 4, 4) matrices into uint64 keys, m bits per entry (m <= 4)."""
    flat = A.reshape(len(A), 16).astype(np.uint64)
    shifts = np.arange(16, dtype=np.uint64) * np.uint64(m)
    return np.bitwise_or.reduce(flat << shifts, axis=1)


def unpack_mats(keys, m):
    """Inverse of pack_mats."""
    keys = np.asarray(keys, dtype=np.uint64)
    mask = np.uint64((1 << m) - 1)
    shifts = np.arange(16, dtype=np.uint64) * np.uint64(m)
    flat = (keys[:, None] >> shifts[None, :]) & mask
    return flat.reshape(len(keys), 4, 4).astype(np.uint8)
