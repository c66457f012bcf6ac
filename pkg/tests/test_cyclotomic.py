from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from szchar.cyclotomic import Cyclo
from szchar.errors import ConductorTooLarge, DegreeMismatch, DivisionByZero, RouteUnsupported


def test_primitive_root_sums_vanish():
    for p in (2, 3, 5, 7, 13):
        total = sum((Cyclo.zeta(p, k) for k in range(p)), Cyclo.rational(0))
        assert total.is_zero()


def test_sqrt2_squares_to_two():
    s = Cyclo.sqrt2()
    assert s * s == 2
    # and it is the positive root
    assert s.to_complex().real > 0


def test_zeta8_power_5_is_minus_one_minus_i_over_sqrt2():
    z = Cyclo.zeta(8, 5)
    i = Cyclo.imaginary_unit()
    assert z == Cyclo.sqrt2() * (Cyclo.rational(-1) - i) * Fraction(1, 2)
    assert z * z.conjugate() == 1


def test_cross_conductor_identities():
    assert Cyclo.zeta(12, 4) == Cyclo.zeta(3, 1)
    assert Cyclo.zeta(12, 3) == Cyclo.imaginary_unit()
    assert Cyclo.zeta(6, 1) == Cyclo.rational(1) + Cyclo.zeta(3, 1)  # -z3^2
    assert Cyclo.zeta(2, 1) == -1


def test_conductor_contraction_is_automatic():
    x = Cyclo.zeta(40, 5)  # a primitive 8th root
    assert x.n == 8
    y = Cyclo.zeta(40, 8)  # a primitive 5th root
    assert y.n == 5


def test_rational_detection():
    x = Cyclo.zeta(5) + Cyclo.zeta(5, 2) + Cyclo.zeta(5, 3) + Cyclo.zeta(5, 4)
    assert x.is_rational() and x.rational_value() == -1
    with pytest.raises(DegreeMismatch):
        Cyclo.zeta(5).rational_value()


def test_algebraic_integer_predicate():
    assert Cyclo.zeta(7).is_algebraic_integer()
    assert not (Cyclo.zeta(7) * Fraction(1, 2)).is_algebraic_integer()
    assert not (Cyclo.sqrt2() * Fraction(1, 2)).is_algebraic_integer()
    assert (Cyclo.sqrt2() * Cyclo.sqrt2() * Fraction(1, 2)).is_algebraic_integer()


def test_galois_and_conjugation():
    z = Cyclo.zeta(13)
    assert z.conjugate() == Cyclo.zeta(13, 12)
    assert z.galois(5) == Cyclo.zeta(13, 5)
    with pytest.raises(DegreeMismatch):
        Cyclo.zeta(10).galois(5)
    real = z + z.conjugate()
    assert real.is_real()
    assert not z.is_real()


def test_division_paths():
    z = Cyclo.zeta(8)
    assert (z / z) == 1
    assert (Cyclo.rational(1) / z) == Cyclo.zeta(8, 7)
    x = Cyclo.rational(1) + Cyclo.zeta(5)
    assert (x / x) == 1
    inv = 1 / x
    assert x * inv == 1
    with pytest.raises(DivisionByZero):
        x / Cyclo.rational(0)
    big = Cyclo.rational(1) + Cyclo.zeta(997)
    with pytest.raises(RouteUnsupported):
        Cyclo.rational(1) / big


def test_conductor_bound_enforced():
    with pytest.raises(ConductorTooLarge):
        Cyclo.zeta(2 * 10**6 + 2)
    with pytest.raises(ConductorTooLarge):
        Cyclo.zeta(999983) * Cyclo.zeta(999979)  # lcm blows past the bound


def test_pow():
    z = Cyclo.zeta(16)
    assert z ** 16 == 1
    assert z ** -3 == Cyclo.zeta(16, 13)
    assert (Cyclo.sqrt2() ** 2) == 2


small_cyclos = st.builds(
    lambda n, pairs: Cyclo(n, dict(pairs)),
    st.sampled_from([1, 3, 4, 5, 8, 12, 40]),
    st.lists(
        st.tuples(st.integers(min_value=0, max_value=39),
                  st.fractions(min_value=-9, max_value=9, max_denominator=4)),
        max_size=4,
    ),
)


@settings(max_examples=120, deadline=None)
@given(small_cyclos, small_cyclos, small_cyclos)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) * c == a * c + b * c
    assert a + (-a) == 0


@settings(max_examples=120, deadline=None)
@given(small_cyclos)
def test_serialization_roundtrip(a):
    assert Cyclo.from_dict(a.to_dict()) == a


@settings(max_examples=60, deadline=None)
@given(small_cyclos)
def test_float_approximation_matches_naive_sum(a):
    # independent numeric route: evaluate the stored terms directly
    with mpmath.workdps(40):
        naive = mpmath.mpc(0)
        for e, c in a.terms.items():
            naive += (mpmath.mpf(c.numerator) / c.denominator) * mpmath.e ** (
                2j * mpmath.pi * e / a.n)
        got = a.to_complex(dps=40)
        assert mpmath.fabs(got - naive) < mpmath.mpf(10) ** -25


@settings(max_examples=60, deadline=None)
@given(small_cyclos, small_cyclos)
def test_product_matches_numeric_product(a, b):
    with mpmath.workdps(40):
        lhs = (a * b).to_complex(dps=40)
        rhs = a.to_complex(dps=40) * b.to_complex(dps=40)
        assert mpmath.fabs(lhs - rhs) < mpmath.mpf(10) ** -20


def test_hash_consistency():
    assert hash(Cyclo.zeta(12, 4)) == hash(Cyclo.zeta(3, 1))
    d = {Cyclo.zeta(8, 2): "i"}
    assert d[Cyclo.imaginary_unit()] == "i"
