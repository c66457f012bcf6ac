import numpy as np
import pytest

from szchar import _backend
from szchar._backend import get_backend, mul_table, pack_one, unpack_one
from szchar._kernels_numpy import batch_mat_mul, pack_mats, unpack_mats
from szchar.chevalley import mat_mul, unipotent
from szchar.errors import RouteUnsupported, ScaleExceeded
from szchar.gf2 import GF2Field


def random_mats(rng, q, count):
    return rng.integers(0, q, size=(count, 4, 4), dtype=np.uint8)


def test_mul_table_matches_field():
    F = GF2Field(3)
    T = mul_table(F)
    for a in range(8):
        for b in range(8):
            assert T[a, b] == F.mul(a, b)


def test_mul_table_rejects_large_fields():
    with pytest.raises(ScaleExceeded):
        mul_table(GF2Field(12))


def test_numpy_batch_mul_matches_scalar_route():
    F = GF2Field(3)
    T = mul_table(F)
    rng = np.random.default_rng(7)
    A = random_mats(rng, 8, 40)
    B = random_mats(rng, 8, 40)
    C = batch_mat_mul(T, A, B)
    for t in range(40):
        a = tuple(tuple(int(x) for x in row) for row in A[t])
        b = tuple(tuple(int(x) for x in row) for row in B[t])
        c = mat_mul(F, a, b)
        assert tuple(tuple(int(x) for x in row) for row in C[t]) == c


def test_pack_unpack_roundtrip():
    rng = np.random.default_rng(11)
    A = random_mats(rng, 8, 100)
    keys = pack_mats(A, 3)
    assert len(set(int(k) for k in keys)) == len(
        {tuple(a.reshape(16)) for a in A}
    )
    back = unpack_mats(keys, 3)
    assert np.array_equal(back, A)


def test_pack_one_matches_batch():
    F = GF2Field(3)
    g = unipotent(F, 1, 1, 1, 0)
    arr = np.array([g], dtype=np.uint8)
    assert pack_one(g, 3) == int(pack_mats(arr, 3)[0])
    assert unpack_one(pack_one(g, 3), 3) == g


def test_backend_selection():
    assert get_backend("numpy") is not None
    with pytest.raises(RouteUnsupported):
        get_backend("nonsense")
    auto = get_backend("auto")
    assert auto is not None
    if not _backend.HAS_NUMBA:
        with pytest.raises(RouteUnsupported):
            get_backend("numba")


@pytest.mark.skipif(not _backend.HAS_NUMBA, reason="numba not installed")
def test_numba_kernels_agree_with_numpy():
    F = GF2Field(3)
    T = mul_table(F)
    nb = get_backend("numba")
    rng = np.random.default_rng(3)
    A = random_mats(rng, 8, 64)
    B = random_mats(rng, 8, 64)
    assert np.array_equal(nb.batch_mat_mul(T, A, B), batch_mat_mul(T, A, B))
    assert np.array_equal(nb.pack_mats(A, 3), pack_mats(A, 3))
    assert np.array_equal(nb.unpack_mats(nb.pack_mats(A, 3), 3), A)
