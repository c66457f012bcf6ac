"""Binary field arithmetic on int bitmasks, plus the solvers the rest of the package needs."""

from __future__ import annotations

from functools import lru_cache

from .errors import DegreeMismatch, DivisionByZero, NoSolutionInField, ScaleExceeded

# Moduli we commit to, as bitmasks including the leading term.  Degrees not
# listed fall back to the lexicographically smallest irreducible polynomial.
PUBLISHED_MODULI = {
    1: 0b10,                                       # x
    2: 0b111,                                      # x^2 + x + 1
    3: 0b1011,                                     # x^3 + x + 1
    4: 0b10011,                                    # x^4 + x + 1
    5: 0b100101,                                   # x^5 + x^2 + 1
    10: (1 << 10) | (1 << 3) | 1,                  # x^10 + x^3 + 1
    12: (1 << 12) | (1 << 6) | (1 << 4) | 0b11,    # x^12 + x^6 + x^4 + x + 1
    20: (1 << 20) | (1 << 3) | 1,                  # x^20 + x^3 + 1
}


def poly_deg(f):
    """Degree of a nonzero polynomial bitmask (yields -1 for f == 0)."""
    return f.bit_length() - 1


def poly_mulmod(a, b, mod):
    """Carry-less product of a and b reduced mod the polynomial `mod`."""
    top = 1 << poly_deg(mod)
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= mod
    return r


def poly_gcd(a, b):
    """Polynomial gcd of two bitmasks."""
    while b:
        da, db = poly_deg(a), poly_deg(b)
        if da < db:
            a, b = b, a
            continue
        a ^= b << (da - db)
    return a


def _x_qpower_mod(k, mod):
    # x^(2^k) mod `mod`, by repeated squaring of x.
    r = 0b10
    for _ in range(k):
        r = poly_mulmod(r, r, mod)
    return r


def is_irreducible(f):
    """Rabin irreducibility test for a polynomial bitmask over GF(2)."""
    m = poly_deg(f)
    if m <= 0:
        return False
    if m == 1:
        return True
    if _x_qpower_mod(m, f) != 0b10:
        return False
    for p in _prime_factors(m):
        if poly_gcd(_x_qpower_mod(m // p, f) ^ 0b10, f) != 1:
            return False
    return True


def find_irreducible(m):
    """Lexicographically smallest irreducible polynomial of degree m."""
    if m == 1:
        return 0b10
    for low in range(1, 1 << m, 2):  # constant term must be 1 for m > 1
        f = (1 << m) | low
        if is_irreducible(f):
            return f
    raise NoSolutionInField(f"no irreducible polynomial of degree {m}")  # pragma: no cover


@lru_cache(maxsize=None)
def _prime_factors(n):
    """Sorted tuple of the distinct prime factors of n (trial division)."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return tuple(out)


def _f2_solve(cols, target, m):
    # Solve sum_j x_j * cols[j] = target over GF(2).  Returns (particular,
    # kernel_basis) or None if inconsistent.  Rows are packed as ints with the
    # augmented bit at position m.
    rows = []
    for i in range(m):
        r = 0
        for j in range(m):
            r |= ((cols[j] >> i) & 1) << j
        r |= ((target >> i) & 1) << m
        rows.append(r)
    pivot_of_col = {}
    rank = 0
    for j in range(m):
        piv = None
        for i in range(rank, m):
            if (rows[i] >> j) & 1:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(m):
            if i != rank and (rows[i] >> j) & 1:
                rows[i] ^= rows[rank]
        pivot_of_col[j] = rank
        rank += 1
    aug = 1 << m
    for i in range(rank, m):
        if rows[i] & aug:
            return None
    free_cols = [j for j in range(m) if j not in pivot_of_col]
    x0 = 0
    for j, i in pivot_of_col.items():
        if rows[i] & aug:
            x0 |= 1 << j
    basis = []
    for fc in free_cols:
        v = 1 << fc
        for j, i in pivot_of_col.items():
            if (rows[i] >> fc) & 1:
                v |= 1 << j
        basis.append(v)
    return x0, basis


class GF2Field:
    """The field GF(2^m) with elements represented as int bitmasks."""

    def __init__(self, m, modulus=None):
        if m < 1:
            raise DegreeMismatch("field degree must be positive")
        if modulus is None:
            modulus = PUBLISHED_MODULI.get(m) or find_irreducible(m)
        if poly_deg(modulus) != m:
            raise DegreeMismatch("modulus degree does not match m")
        self.m = m
        self.modulus = modulus
        self.q = 1 << m

    def __eq__(self, other):
        return isinstance(other, GF2Field) and (self.m, self.modulus) == (other.m, other.modulus)

    def __hash__(self):
        return hash((self.m, self.modulus))

    def __repr__(self):
        return f"GF2Field(m={self.m}, modulus={self.modulus:#x})"

    def elements(self):
        """All field elements, ascending."""
        return range(self.q)

    def add(self, a, b):
        return a ^ b

    def mul(self, a, b):
        return poly_mulmod(a, b, self.modulus)

    def sqr(self, a):
        return poly_mulmod(a, a, self.modulus)

    def pow(self, a, e):
        """a^e with e any integer (negative e inverts first)."""
        if e < 0:
            a = self.inv(a)
            e = -e
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.sqr(a)
            e >>= 1
        return r

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0")
        return self.pow(a, self.q - 2)

    def frob(self, a, k=1):
        """The field automorphism a -> a^(2^k)."""
        for _ in range(k % self.m if k >= self.m else k):
            a = self.sqr(a)
        return a

    def trace(self, a):
        """Absolute trace down to GF(2), as 0 or 1."""
        t = 0
        x = a
        for _ in range(self.m):
            t ^= x
            x = self.sqr(x)
        return t  # always lands in {0, 1}

    def trace_sign(self, a):
        """+1 when a has absolute trace 0, else -1."""
        return 1 if self.trace(a) == 0 else -1

    def solve_artin_schreier(self, c, k=1):
        """All x with x^(2^k) + x = c, sorted ascending ([] when unsolvable)."""
        cols = [self.frob(1 << j, k) ^ (1 << j) for j in range(self.m)]
        sol = _f2_solve(cols, c, self.m)
        if sol is None:
            return []
        x0, basis = sol
        if len(basis) > 12:
            raise ScaleExceeded("Artin-Schreier solution space too large to enumerate")
        out = []
        for mask in range(1 << len(basis)):
            v = x0
            i = mask
            j = 0
            while i:
                if i & 1:
                    v ^= basis[j]
                i >>= 1
                j += 1
            out.append(v)
        return sorted(out)

    @lru_cache(maxsize=None)
    def multiplicative_generator(self):
        """Smallest generator of the multiplicative group."""
        n = self.q - 1
        for g in range(2, self.q):
            if all(self.pow(g, n // p) != 1 for p in _prime_factors(n)):
                return g
        raise NoSolutionInField("no generator found")  # pragma: no cover

    def element_order(self, a):
        """Multiplicative order of a nonzero element."""
        if a == 0:
            raise DivisionByZero("0 has no multiplicative order")
        order = self.q - 1
        for p in _prime_factors(order):
            while order % p == 0 and self.pow(a, order // p) == 1:
                order //= p
        return order

    def element_of_order(self, r):
        """A fixed element of multiplicative order r (requires r | q-1)."""
        if r <= 0 or (self.q - 1) % r:
            raise NoSolutionInField(f"no element of order {r} in GF(2^{self.m})")
        return self.pow(self.multiplicative_generator(), (self.q - 1) // r)

    def embedding(self, sub):
        """Embedding of the subfield `sub` into this field, as a lookup list."""
        if self.m % sub.m:
            raise DegreeMismatch(f"GF(2^{sub.m}) is not a subfield of GF(2^{self.m})")
        if sub.m > 16:
            raise ScaleExceeded("embedding table for a subfield this large is not supported")
        if sub == self:
            return list(range(self.q))
        # The subfield image is the kernel of x -> x^(2^sub.m) + x; the embedding
        # sends sub's canonical generator (the class of x) to the smallest root
        # of sub's modulus inside that kernel.
        cols = [self.frob(1 << j, sub.m) ^ (1 << j) for j in range(self.m)]
        _, basis = _f2_solve(cols, 0, self.m)
        if len(basis) != sub.m:
            raise DegreeMismatch("subfield kernel has unexpected dimension")  # pragma: no cover
        root = None
        for mask in sorted(self._span(basis)):
            if mask and self._eval_poly(sub.modulus, mask) == 0:
                root = mask
                break
        if root is None:
            raise NoSolutionInField("subfield modulus has no root here")  # pragma: no cover
        table = [0] * sub.q
        powers = [1]
        for _ in range(sub.m - 1):
            powers.append(self.mul(powers[-1], root))
        for e in range(sub.q):
            v = 0
            for j in range(sub.m):
                if (e >> j) & 1:
                    v ^= powers[j]
            table[e] = v
        return table

    def _span(self, basis):
        out = []
        for mask in range(1 << len(basis)):
            v = 0
            i = mask
            j = 0
            while i:
                if i & 1:
                    v ^= basis[j]
                i >>= 1
                j += 1
            out.append(v)
        return out

    def _eval_poly(self, f, x):
        # Evaluate an F2 polynomial bitmask at a field element (Horner).
        v = 0
        for i in range(poly_deg(f), -1, -1):
            v = self.mul(v, x)
            if (f >> i) & 1:
                v ^= 1
        return v

    def element_to_dict(self, a):
        return {"m": self.m, "bits": format(a, "x"), "modulus": format(self.modulus, "x")}

    def element_from_dict(self, d):
        if int(d["modulus"], 16) != self.modulus or d["m"] != self.m:
            raise DegreeMismatch("serialized element belongs to a different field")
        return int(d["bits"], 16)
