"""Exact arithmetic in cyclotomic fields on sparse exponent -> Fraction dictionaries.

Values are stored at a conductor N as integer combinations of N-th roots of
unity, reduced to the standard tensor basis: for each prime power p^nu || N
the p-part of every exponent keeps a top base-p digit of at most p-2.  The
conductor is contracted whenever the support allows it, and conductors
congruent to 2 mod 4 are folded away, so equal values always end up with
identical representations.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

import mpmath

from .errors import ConductorTooLarge, DegreeMismatch, DivisionByZero, RouteUnsupported

CONDUCTOR_BOUND = 10**6

# general division inverts via a product over Galois conjugates; beyond this
# many conjugates we refuse rather than grind
MAX_INVERSION_DEGREE = 64


@lru_cache(maxsize=None)
def _factorization(n):
    """Prime factorization of n as a tuple of (p, p^nu) pairs."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            pk = 1
            while n % d == 0:
                n //= d
                pk *= d
            out.append((d, pk))
        d += 1
    if n > 1:
        out.append((n, n))
    return tuple(out)


@lru_cache(maxsize=None)
def _reduction_data(n):
    # per prime p | n: (p, p^nu, p^(nu-1), CRT idempotent that is 1 mod p^nu
    # and 0 mod n/p^nu)
    data = []
    for p, pnu in _factorization(n):
        rest = n // pnu
        idem = (rest * pow(rest, -1, pnu)) % n if rest > 1 else 1 % n
        data.append((p, pnu, pnu // p, idem))
    return tuple(data)


def _canonicalize(n, terms):
    """Reduce (conductor, exponent dict) to the unique canonical form."""
    terms = {e % n: c for e, c in terms.items() if c}
    while True:
        if n % 2 == 0 and n % 4 and n > 1:
            # fold: the primitive 2M-th roots are negated M-th roots
            m = n // 2
            inv2 = pow(2, -1, m)
            folded = {}
            for e, c in terms.items():
                e2 = (e * inv2) % m
                folded[e2] = folded.get(e2, Fraction(0)) + (c if e % 2 == 0 else -c)
            n, terms = m, folded
        for p, pnu, pl, idem in _reduction_data(n):
            new = {}
            for e, c in terms.items():
                ep = e % pnu
                if ep // pl <= p - 2:
                    new[e] = new.get(e, Fraction(0)) + c
                else:
                    r = ep % pl
                    for j in range(p - 1):
                        e2 = (e + (r + j * pl - ep) * idem) % n
                        new[e2] = new.get(e2, Fraction(0)) - c
            terms = new
        terms = {e: c for e, c in terms.items() if c}
        if not terms:
            return 1, {}
        g = n
        for e in terms:
            g = gcd(g, e)
        if g > 1:
            n //= g
            terms = {e // g: c for e, c in terms.items()}
            continue
        if n % 2 == 0 and n % 4:
            continue
        return n, terms


class Cyclo:
    """An element of a cyclotomic field, held exactly in canonical form."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None, _canonical=False):
        if n < 1:
            raise DegreeMismatch("conductor must be positive")
        if n > CONDUCTOR_BOUND:
            raise ConductorTooLarge(f"conductor {n} exceeds bound {CONDUCTOR_BOUND}")
        if terms is None:
            terms = {}
        if _canonical:
            self.n, self.terms = n, terms
            return
        fixed = {}
        for e, c in terms.items():
            c = c if isinstance(c, Fraction) else Fraction(c)
            if c:
                fixed[e] = fixed.get(e, Fraction(0)) + c
        self.n, self.terms = _canonicalize(n, fixed)

    # ---- constructors -------------------------------------------------

    @classmethod
    def zeta(cls, n, e=1):
        """The root of unity exp(2*pi*i*e/n)."""
        return cls(n, {e: Fraction(1)})

    @classmethod
    def rational(cls, c):
        return cls(1, {0: Fraction(c)})

    @classmethod
    def sqrt2(cls):
        """The positive square root of 2."""
        return cls(8, {1: Fraction(1), 7: Fraction(1)})

    @classmethod
    def imaginary_unit(cls):
        return cls.zeta(4)

    # ---- ring structure ------------------------------------------------

    def _coerced(self, other):
        if isinstance(other, Cyclo):
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclo.rational(other)
        return None

    def _lift_pair(self, other):
        lcm = self.n * other.n // gcd(self.n, other.n)
        if lcm > CONDUCTOR_BOUND:
            raise ConductorTooLarge(f"conductor {lcm} exceeds bound {CONDUCTOR_BOUND}")
        fa = lcm // self.n
        fb = lcm // other.n
        return lcm, {e * fa: c for e, c in self.terms.items()}, {e * fb: c for e, c in other.terms.items()}

    def __add__(self, other):
        other = self._coerced(other)
        if other is None:
            return NotImplemented
        lcm, ta, tb = self._lift_pair(other)
        for e, c in tb.items():
            ta[e] = ta.get(e, Fraction(0)) + c
        return Cyclo(lcm, ta)

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.n, {e: -c for e, c in self.terms.items()}, _canonical=True)

    def __sub__(self, other):
        other = self._coerced(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return Cyclo.rational(0)
            return Cyclo(self.n, {e: v * c for e, v in self.terms.items()}, _canonical=True)
        if not isinstance(other, Cyclo):
            return NotImplemented
        lcm, ta, tb = self._lift_pair(other)
        prod = {}
        for ea, ca in ta.items():
            for eb, cb in tb.items():
                e = (ea + eb) % lcm
                prod[e] = prod.get(e, Fraction(0)) + ca * cb
        return Cyclo(lcm, prod)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return Cyclo.rational(1) / self ** (-k)
        out = Cyclo.rational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                raise DivisionByZero("division by zero")
            return self * (Fraction(1) / c)
        if not isinstance(other, Cyclo):
            return NotImplemented
        if other.is_zero():
            raise DivisionByZero("division by zero")
        if other.is_rational():
            return self * (1 / other.rational_value())
        if len(other.terms) == 1:
            # dividing by c * zeta^e is multiplying by zeta^-e / c
            ((e, c),) = other.terms.items()
            return self * Cyclo(other.n, {(-e) % other.n: 1 / c})
        units = [k for k in range(2, other.n) if gcd(k, other.n) == 1]
        if len(units) + 1 > MAX_INVERSION_DEGREE:
            raise RouteUnsupported(
                f"general inversion at conductor {other.n} is not supported")
        cofactor = Cyclo.rational(1)
        for k in units:
            cofactor = cofactor * other.galois(k)
        norm = other * cofactor
        if not norm.is_rational():  # pragma: no cover
            raise RouteUnsupported("conjugate product failed to land in the rationals")
        return self * cofactor * (1 / norm.rational_value())

    def __rtruediv__(self, other):
        other = self._coerced(other)
        if other is None:
            return NotImplemented
        return other / self

    # ---- structure queries ----------------------------------------------

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_rational(self):
        return self.n == 1

    def rational_value(self):
        """The value as a Fraction (requires is_rational)."""
        if self.n != 1:
            raise DegreeMismatch("value is not rational")
        return self.terms.get(0, Fraction(0))

    def is_algebraic_integer(self):
        """True when every canonical-basis coordinate is a rational integer."""
        return all(c.denominator == 1 for c in self.terms.values())

    def conjugate(self):
        """Complex conjugation."""
        return Cyclo(self.n, {(-e) % self.n: c for e, c in self.terms.items()})

    def is_real(self):
        return self.conjugate() == self

    def galois(self, k):
        """The Galois twist sending every N-th root of unity to its k-th power."""
        if gcd(k, self.n) != 1:
            raise DegreeMismatch(f"{k} is not a unit mod {self.n}")
        return Cyclo(self.n, {(k * e) % self.n: c for e, c in self.terms.items()})

    # ---- conversion -----------------------------------------------------

    def to_complex(self, dps=30):
        """Floating approximation as an mpmath mpc (for display, never for equality)."""
        with mpmath.workdps(dps):
            total = mpmath.mpc(0)
            for e, c in self.terms.items():
                coeff = mpmath.mpf(c.numerator) / c.denominator
                total += coeff * mpmath.e ** (2j * mpmath.pi * e / self.n)
            return total

    def to_dict(self):
        return {
            "N": self.n,
            "terms": [[e, c.numerator, c.denominator] for e, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["N"], {e: Fraction(num, den) for e, num, den in d["terms"]})

    # ---- comparisons ------------------------------------------------------

    def __eq__(self, other):
        other = self._coerced(other)
        if other is None:
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        if self.is_zero():
            return "Cyclo(0)"
        bits = []
        for e, c in sorted(self.terms.items()):
            if e == 0:
                bits.append(str(c))
            elif c == 1:
                bits.append(f"z{self.n}^{e}")
            else:
                bits.append(f"{c}*z{self.n}^{e}")
        return "Cyclo(" + " + ".join(bits) + ")"


ZERO = Cyclo.rational(0)
ONE = Cyclo.rational(1)
