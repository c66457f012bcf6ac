"""Kernel backend selection.

The environment variable SZCHAR_BACKEND picks the implementation:
"numba", "numpy", or "auto" (default: numba when importable, else numpy).
"""

import os

import numpy as np

from . import _kernels_numpy
from .errors import RouteUnsupported, ScaleExceeded

try:
    from . import _kernels_numba

    HAS_NUMBA = True
except ImportError:
    _kernels_numba = None
    HAS_NUMBA = False


def get_backend(name=None):
    """Return the kernel module selected by `name` or SZCHAR_BACKEND."""
    name = name or os.environ.get("SZCHAR_BACKEND", "auto")
    if name == "numpy":
        return _kernels_numpy
    if name == "numba":
        if not HAS_NUMBA:
            raise RouteUnsupported("numba backend requested but numba is not importable")
        return _kernels_numba
    if name == "auto":
        return _kernels_numba if HAS_NUMBA else _kernels_numpy
    raise RouteUnsupported(f"unknown backend {name!r}")


_TABLE_CACHE = {}


def mul_table(F):
    """Dense (q, q) uint8 multiplication table for a field with q <= 256."""
    key = (F.m, F.modulus)
    hit = _TABLE_CACHE.get(key)
    if hit is not None:
        return hit
    if F.q > 256:
        raise ScaleExceeded(f"dense tables need q <= 256, got q = {F.q}")
    table = np.zeros((F.q, F.q), dtype=np.uint8)
    for a in range(F.q):
        for b in range(a, F.q):
            v = F.mul(a, b)
            table[a, b] = v
            table[b, a] = v
    _TABLE_CACHE[key] = table
    return table


def pack_one(mat, m):
    """Pack a single tuple-matrix into its uint64 key."""
    key = 0
    shift = 0
    for row in mat:
        for entry in row:
            key |= entry << shift
            shift += m
    return key


def unpack_one(key, m):
    """Inverse of pack_one."""
    mask = (1 << m) - 1
    entries = [(key >> (m * t)) & mask for t in range(16)]
    return tuple(tuple(entries[4 * i + j] for j in range(4)) for i in range(4))
