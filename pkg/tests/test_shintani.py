from fractions import Fraction

import pytest

from szchar.chartab import outer_table, scalar_product, sz_table
from szchar.chevalley import mat_frob, mat_inv, mat_mul, mat_order, sigma, unipotent
from szchar.cyclotomic import ONE, Cyclo
from szchar.errors import TorusAmbiguity
from szchar.groups import context, outer_classes, sz_classes
from szchar.shintani import (
    cuspidal_pair,
    lang_solve_unipotent,
    norm_map,
    shintani_descent,
    unipotent_descents,
    verify_centralizer_doubling,
    verify_partner_classes,
    verify_thm41,
)
from szchar.shintani import _lang_solve_full


@pytest.mark.parametrize("n", [1, 2])
def test_witness_substitution(n):
    ctx = context(n)
    szc = sz_classes(n)
    for lab in ("id", "u2", "u4a", "u4b"):
        x, field, emb = _lang_solve_full(szc[lab].rep, n)
        assert field.m == 4 * ctx.m
        lhs = mat_mul(field, mat_inv(field, x), mat_frob(field, x, ctx.m))
        lifted = tuple(tuple(emb[v] for v in row) for row in szc[lab].rep)
        assert lhs == lifted


@pytest.mark.parametrize("n", [1, 2])
def test_partners_live_in_base_field_with_forced_orders(n):
    ctx = context(n)
    F = ctx.F
    szc = sz_classes(n)
    outs = outer_classes(n)
    nm = norm_map(n)
    for lab in ("id", "u2", "u4a", "u4b"):
        h = nm.partners[lab]
        assert all(v < F.q for row in h for v in row)
        square = mat_mul(F, h, sigma(F, h, n))
        assert mat_order(F, square) == szc[lab].order
        assert 2 * mat_order(F, square) == outs[nm.entries[lab]].order


def test_involution_partner_square_is_the_involution_rep():
    ctx = context(1)
    nm = norm_map(1)
    h = nm.partners["u2"]
    square = mat_mul(ctx.F, h, sigma(ctx.F, h, 1))
    assert square == sz_classes(1)["u2"].rep


@pytest.mark.parametrize("n", [1, 2])
def test_unipotent_targets_by_enumeration(n):
    report = verify_partner_classes(n)
    assert report["ok"], report["failures"]


def test_norm_map_parity_of_order_four_targets():
    nm1, nm2 = norm_map(1), norm_map(2)
    assert nm1.entries["u2"] == "out:uab" and nm2.entries["u2"] == "out:uab"
    assert {nm1.entries["u4a"], nm1.entries["u4b"]} == {"out:ua", "out:uaab"}
    assert nm1.entries["u4a"] == "out:ua"
    assert nm2.entries["u4a"] == "out:uaab"


@pytest.mark.parametrize("n", [1, 2])
def test_norm_map_is_a_centralizer_doubling_bijection(n):
    ctx = context(n)
    nm = norm_map(n)
    assert sorted(nm.entries) == sorted(sz_classes(n).labels())
    assert sorted(nm.entries.values()) == sorted(outer_classes(n).labels())
    report = verify_centralizer_doubling(n)
    assert report["ok"] and report["checked"] == ctx.q + 3


def test_frobenius_square_is_the_field_power_map():
    ctx = context(1)
    F = ctx.F
    for rep in (unipotent(F, 1, 1, 1, 0), unipotent(F, 3, 5, 7, 2)):
        assert sigma(F, sigma(F, rep, 1), 1) == mat_frob(F, rep, ctx.m)


def test_descent_refuses_parameter_dependent_torus_rows():
    nm = norm_map(1)
    with pytest.raises(TorusAmbiguity):
        shintani_descent(outer_table(1).row("ext_chi0:1"), nm)


def test_descent_of_constant_and_unipotent_rows():
    nm = norm_map(1)
    sz = sz_table(1)
    sh = unipotent_descents(1)
    assert sh["ext_triv"] == sz.row("triv")
    assert sh["ext_st"] == sz.row("st")
    assert sh["ext_prin"]("id") == Cyclo.rational(2 * 7)
    assert sh["ext_cusp"]("id") == Cyclo.rational(2 * 7)


def test_descent_is_linear():
    nm = norm_map(1)
    out = outer_table(1)
    f = out.row("ext_prin")
    g = out.row("ext_st")
    lhs = shintani_descent(f + g, nm)
    assert lhs == shintani_descent(f, nm) + shintani_descent(g, nm)
    assert shintani_descent(-f, nm) == -shintani_descent(f, nm)


def test_cuspidal_pair_is_oriented_by_the_reference_class():
    ctx = context(1)
    first, second = cuspidal_pair(1)
    table = sz_table(1)
    r0 = "u4a"
    assert table.value(first, r0) == Cyclo.imaginary_unit() * ctx.theta
    assert table.value(second, r0) == -Cyclo.imaginary_unit() * ctx.theta
    assert {first, second} == {"cusp_a", "cusp_b"}


@pytest.mark.parametrize("n", [1, 2])
def test_weil_descent_coefficients(n):
    sz = sz_table(n)
    sh = unipotent_descents(n)
    w_lab, wbar_lab = cuspidal_pair(n)
    half = Fraction(1, 2)
    plus = (ONE + Cyclo.imaginary_unit()) * half
    minus = (ONE - Cyclo.imaginary_unit()) * half
    a = scalar_product(sz.row(w_lab), sh["ext_prin"])
    assert a == (plus if n % 2 else minus)
    assert scalar_product(sz.row(w_lab), sh["ext_cusp"]) == a.conjugate()
    assert scalar_product(sz.row("triv"), sh["ext_prin"]).is_zero()
    assert scalar_product(sz.row("st"), sh["ext_prin"]).is_zero()
    assert scalar_product(sh["ext_prin"], sh["ext_prin"]) == ONE


def test_coefficient_equals_eighth_root_form():
    half = Fraction(1, 2)
    plus = (ONE + Cyclo.imaginary_unit()) * half
    zeta0 = Cyclo.zeta(8, 5)
    assert plus == -(zeta0 * Cyclo.sqrt2() * half)
    assert zeta0 * zeta0.conjugate() == ONE


@pytest.mark.parametrize("n", [1, 2])
def test_descent_identity_report(n):
    report = verify_thm41(n)
    assert report["ok"], report["failures"]
    assert report["checked"] == 21
    assert report["parity"] == ("odd" if n % 2 else "even")


def test_norm_map_jsonable_shape():
    nm = norm_map(1)
    j = nm.to_jsonable()
    assert j["n"] == 1
    assert len(j["entries"]) == 11
    by_class = {e["sz_class"]: e for e in j["entries"]}
    assert by_class["u2"]["outer_class"] == "out:uab"
    assert by_class["u2"]["witness"] is not None
    assert by_class["t0:1"]["witness"] is None


def test_lang_solution_is_deterministic():
    szc = sz_classes(1)
    assert lang_solve_unipotent(szc["u4a"].rep, 1) == lang_solve_unipotent(
        szc["u4a"].rep, 1
    )
