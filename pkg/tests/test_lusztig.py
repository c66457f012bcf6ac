from fractions import Fraction

import pytest

from szchar.chartab import scalar_product, sz_table
from szchar.cyclotomic import ONE, ZERO, Cyclo
from szchar.errors import TableMismatch
from szchar.groups import context
from szchar.lusztig import (
    WeylData,
    almost_characters,
    dl_characters,
    family_data,
    fourier_matrix,
    root_name,
    roots_of_unity,
    verify_digne_michel,
    weyl_data,
)
from szchar.lusztig import _fourier_derivation
from szchar.shintani import cuspidal_pair


def test_weyl_data_structure():
    wd = weyl_data()
    assert len(wd.elements) == 8
    sizes = sorted(len(o) for o in wd.twisted_classes.values())
    assert sizes == [2, 2, 4]
    assert wd.auto(wd.s) == wd.t and wd.auto(wd.t) == wd.s
    for w in wd.elements:
        assert wd.auto(wd.auto(w)) == w


def test_weyl_extension_values_on_twisted_class_reps():
    wd = weyl_data()
    rt2 = Cyclo.sqrt2()
    values = set()
    for rep, orbit in wd.twisted_classes.items():
        vals = {wd.ext_refl(w) for w in orbit}
        assert len(vals) == 1
        values.add(vals.pop())
    assert values == {ZERO, rt2, -rt2}
    for w in wd.elements:
        assert wd.ext_triv(w) == ONE
        assert wd.ext_sign(w) in (ONE, -ONE)


def test_weyl_extensions_restrict_to_the_characters():
    wd = weyl_data()
    for w in wd.elements:
        tr = wd.char_refl(w)
        assert tr in (Cyclo.rational(2), Cyclo.rational(-2), ZERO)
        det = wd.char_sign(w)
        assert det * det == ONE


@pytest.mark.parametrize("n", [1, 2])
def test_series_combinations(n):
    ctx = context(n)
    combos = dl_characters(n)
    q = ctx.q
    assert combos["1"]("id") == Cyclo.rational(1 + q**2)
    assert combos["wa"]("id") == Cyclo.rational(-(q - 1) * ctx.m1)
    assert combos["wawbwa"]("id") == Cyclo.rational(-(q - 1) * ctx.m2)
    assert scalar_product(combos["1"], combos["1"]) == Cyclo.rational(2)
    assert scalar_product(combos["wa"], combos["wa"]) == Cyclo.rational(4)
    assert scalar_product(combos["wa"], combos["wawbwa"]) == ZERO


def test_series_values_on_tori():
    combos = dl_characters(1)
    assert combos["1"]("t0:1") == Cyclo.rational(2)
    assert combos["wa"]("t2:1") == Cyclo.rational(4)
    assert combos["wa"]("t1:1") == ZERO
    assert combos["wawbwa"]("t1:1") == Cyclo.rational(4)
    assert combos["wawbwa"]("t2:1") == ZERO


@pytest.mark.parametrize("n", [1, 2])
def test_almost_characters(n):
    sz = sz_table(n)
    almost = almost_characters(n)
    assert almost["triv"] == sz.row("triv")
    assert almost["sign"] == sz.row("st")
    w_lab, wbar_lab = cuspidal_pair(n)
    half_rt2 = Cyclo.sqrt2() * Fraction(1, 2)
    assert almost["refl"] == (sz.row(w_lab) + sz.row(wbar_lab)) * half_rt2
    for a in almost.values():
        assert scalar_product(a, a) == ONE


def test_roots_parity_table():
    r1 = roots_of_unity(1)
    assert r1["triv"] == ONE and r1["st"] == ONE
    assert r1["cusp_a"] == Cyclo.zeta(8, 5)
    assert r1["cusp_b"] == Cyclo.zeta(8, 3)
    r2 = roots_of_unity(2)
    assert r2["cusp_a"] == Cyclo.zeta(8, 3)
    assert r2["cusp_b"] == Cyclo.zeta(8, 5)
    zeta0 = Cyclo.zeta(8, 5)
    for r in (r1, r2):
        assert {r["cusp_a"], r["cusp_b"]} == {zeta0, zeta0.conjugate()}


def test_root_name():
    assert root_name(ONE) == "1"
    assert root_name(Cyclo.zeta(8, 5)) == "zeta8^5"
    with pytest.raises(TableMismatch):
        root_name(Cyclo.rational(2))


@pytest.mark.parametrize("n", [1, 2])
def test_digne_michel_identities(n):
    report = verify_digne_michel(n)
    assert report["ok"], report["failures"]
    assert report["sign"] == -1
    assert report["checked"] == 13


@pytest.mark.parametrize("n", [1, 2])
def test_fourier_matrix_is_the_frozen_involution(n):
    m = fourier_matrix(n)
    half_rt2 = Cyclo.sqrt2() * Fraction(1, 2)
    assert m == ((half_rt2, half_rt2), (half_rt2, -half_rt2))
    for i in range(2):
        for j in range(2):
            entry = sum((m[i][k] * m[k][j] for k in range(2)), ZERO)
            assert entry == (ONE if i == j else ZERO)


def test_fourier_scaling_flips_with_parity():
    assert _fourier_derivation(1)[1] == "i"
    assert _fourier_derivation(2)[1] == "-i"


def test_family_data_shape():
    data = family_data(1)
    assert data["families"] == [["triv"], ["st"], ["cusp_a", "cusp_b"]]
    assert data["roots"]["cusp_a"] == "zeta8^5"
    assert data["fourier"]["singleton"] == [[{"N": 1, "terms": [[0, 1, 1]]}]]
    assert len(data["fourier"]["cuspidal"]) == 2
    assert "involution" in data["normalization"]


def test_fresh_weyl_data_builds_clean():
    wd = WeylData()
    assert len(wd.twisted_classes) == 3
