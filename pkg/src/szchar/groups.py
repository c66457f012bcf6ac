"""Group-level data: conjugacy classes, fusion maps, and small-field enumerations.

Covers four interlocking groups for q = 2^(2n+1):

* the twisted subgroup of order q^2 (q-1) (q^2+1) fixed by the square-root
  endomorphism (called "sz" throughout),
* its ambient symplectic group on 4 points ("b2"),
* the Borel subgroup of upper triangular elements,
* the 4 q^2 unipotent subgroup generated by the two involutive root
  elements and the central root plane ("u0").

Outer classes are twisted classes of the coset G.sigma inside the degree-2
extension by the square-root endomorphism.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from ._backend import get_backend, mul_table, pack_one
from .chevalley import (
    IDENTITY,
    J,
    borel_element,
    mat_inv,
    mat_mul,
    mat_order,
    mat_pow,
    sigma,
    torus,
    unipotent,
    unipotent_coords,
    x_a,
    x_ab,
    x_b,
    x_2ab,
)
from .errors import NotInBorel, ScaleExceeded, TableMismatch, TorusAmbiguity
from .gf2 import GF2Field

# ---------------------------------------------------------------------------
# parameter bundle


class Context:
    """All field and size data attached to one exponent n (q = 2 * 4**n)."""

    def __init__(self, n):
        if n < 1:
            raise ScaleExceeded("n must be >= 1")
        self.n = n
        self.theta = 2**n
        self.q = 2 * self.theta**2
        self.m = 2 * n + 1
        self.F = GF2Field(self.m)
        self.gamma = self.F.multiplicative_generator()
        q = self.q
        self.m1 = q + 2 * self.theta + 1
        self.m2 = q - 2 * self.theta + 1
        self.sz_order = q**2 * (q - 1) * (q**2 + 1)
        self.ambient_order = q**4 * (q**2 - 1) * (q**4 - 1)
        self.borel_order = q**4 * (q - 1) ** 2
        self.u0_order = 4 * q**2
        self.e0_reps = orbit_reps(q - 1, (q - 2,))
        self.e1_reps = orbit_reps(self.m1, (self.m1 - 1, q % self.m1))
        self.e2_reps = orbit_reps(self.m2, (self.m2 - 1, q % self.m2))
        self._FF = None
        self._emb = None

    @property
    def FF(self):
        """Degree-4 extension used for norm-equation solving."""
        if self._FF is None:
            self._FF = GF2Field(4 * self.m)
        return self._FF

    @property
    def emb(self):
        """Embedding table of the base field into the degree-4 extension."""
        if self._emb is None:
            self._emb = self.FF.embedding(self.F)
        return self._emb

    def emb_inv(self, a):
        """Pull an extension-field element back to the base field."""
        table = self.emb
        try:
            return table.index(a)
        except ValueError:
            raise TorusAmbiguity(f"element {a} is not in the base field")

    def dlog(self, a):
        """Discrete logarithm base the stored generator."""
        if a == 0:
            raise TorusAmbiguity("0 has no discrete logarithm")
        if not hasattr(self, "_dlog"):
            table = {}
            acc = 1
            for i in range(self.q - 1):
                table[acc] = i
                acc = self.F.mul(acc, self.gamma)
            self._dlog = table
        return self._dlog[a]


@lru_cache(maxsize=None)
def context(n):
    return Context(n)


# ---------------------------------------------------------------------------
# orbit bookkeeping on residue classes


def _unit_closure(modulus, gens):
    units = {1 % modulus}
    frontier = list(units)
    while frontier:
        u = frontier.pop()
        for g in gens:
            v = (u * g) % modulus
            if v not in units:
                units.add(v)
                frontier.append(v)
    return sorted(units)


def orbit_of(modulus, gens, i):
    units = _unit_closure(modulus, gens)
    return sorted({(i * u) % modulus for u in units})


def orbit_rep(modulus, gens, i):
    """Smallest member of the orbit of i under the unit group <gens>."""
    return orbit_of(modulus, gens, i)[0]


def orbit_reps(modulus, gens):
    """Orbit representatives on the nonzero residues, in increasing order."""
    seen = set()
    reps = []
    for i in range(1, modulus):
        if i in seen:
            continue
        orb = orbit_of(modulus, gens, i)
        reps.append(orb[0])
        seen.update(orb)
    return reps


def _canon_sign(modulus, i):
    i %= modulus
    return min(i, (modulus - i) % modulus)


def split_pair_label(q, i, j):
    """Canonical (i, j) representative for an unordered signed pair mod q-1."""
    a = _canon_sign(q - 1, i)
    b = _canon_sign(q - 1, j)
    a, b = sorted((a, b))
    return a, b


# ---------------------------------------------------------------------------
# class records


@dataclass(frozen=True)
class ConjClass:
    label: str
    size: int
    centralizer: int
    order: int
    rep: tuple | None = None
    family: str = ""
    params: tuple = ()


class ClassSet:
    """Validated ordered list of conjugacy classes of one group (or coset)."""

    def __init__(self, name, group_order, classes, coset_order=None):
        self.name = name
        self.group_order = group_order
        self.classes = tuple(classes)
        self.by_label = {}
        total = 0
        for c in self.classes:
            if c.label in self.by_label:
                raise TableMismatch(f"duplicate class label {c.label}")
            if c.size * c.centralizer != group_order:
                raise TableMismatch(
                    f"{name}/{c.label}: size {c.size} x centralizer "
                    f"{c.centralizer} != {group_order}"
                )
            self.by_label[c.label] = c
            total += c.size
        expected = coset_order if coset_order is not None else group_order
        if total != expected:
            raise TableMismatch(f"{name}: class sizes sum to {total}, want {expected}")
        self.coset_order = expected

    def __iter__(self):
        return iter(self.classes)

    def __len__(self):
        return len(self.classes)

    def __getitem__(self, label):
        return self.by_label[label]

    def labels(self):
        return [c.label for c in self.classes]


# ---------------------------------------------------------------------------
# fixed unipotent elements and their classification


def sz_unipotent(ctx, a, b):
    """The fixed unipotent with lower coordinates (a, b)."""
    F, th = ctx.F, ctx.theta
    ta = F.pow(a, th)
    tb = a
    tab = F.add(F.pow(b, th), F.mul(a, ta))
    return unipotent(F, ta, tb, tab, b)


def sz_unipotent_coords(ctx, g):
    """Inverse of sz_unipotent; raises if g is not of the fixed shape."""
    F, th = ctx.F, ctx.theta
    ta, tb, tab, t2ab = unipotent_coords(ctx.F, g)
    a, b = tb, t2ab
    if ta != F.pow(a, th) or tab != F.add(F.pow(b, th), F.mul(a, F.pow(a, th))):
        raise NotInBorel("unipotent is not fixed by the twisting endomorphism")
    return a, b


def u4_side(ctx, a, b):
    """Which of the two order-4 classes contains the fixed unipotent (a, b).

    Returns "u4a" for the class of the (1, 0) element, "u4b" for its inverse
    class.  Requires a != 0.
    """
    F, q = ctx.F, ctx.q
    if a == 0:
        raise TorusAmbiguity("order-4 test needs a nonzero lower coordinate")
    # normalize a to 1 with a torus conjugation, then test solvability of the
    # shifted half-trace equation
    k = (2 * (2 * ctx.theta - 1)) % (q - 1)
    i = 0
    target = F.inv(a)
    step = F.pow(ctx.gamma, k)
    acc = 1
    while acc != target:
        acc = F.mul(acc, step)
        i += 1
        if i >= q:
            raise TorusAmbiguity("no torus normalization found")
    b_norm = F.mul(b, F.pow(ctx.gamma, (2 * i) % (q - 1)))
    sols = F.solve_artin_schreier(b_norm, k=ctx.n + 1)
    return "u4a" if sols else "u4b"


def ovoid_standardizer(ctx, point):
    """An element of the twisted group moving `point` to the base point <e1>.

    `point` is a nonzero 4-vector spanning a fixed point of a unipotent
    element of the twisted group.
    """
    F = ctx.F
    p = tuple(point)
    if p[3] == 0:
        if p[1] != 0 or p[2] != 0:
            raise TorusAmbiguity("vector does not span an ovoid point")
        return IDENTITY
    inv4 = F.inv(p[3])
    p = tuple(F.mul(c, inv4) for c in p)
    a = F.pow(p[2], 2 * ctx.theta)
    bth = F.add(p[1], F.mul(a, F.pow(a, ctx.theta)))
    b = F.pow(bth, 2 * ctx.theta)
    s = mat_mul(F, sz_unipotent(ctx, a, b), J)
    col = tuple(row[0] for row in s)
    # s e1 must span the same line as point
    ratio = None
    for c_s, c_p in zip(col, point):
        if (c_s == 0) != (c_p == 0):
            raise TorusAmbiguity("vector does not span an ovoid point")
        if c_s != 0:
            r = F.mul(c_p, F.inv(c_s))
            if ratio is None:
                ratio = r
            elif ratio != r:
                raise TorusAmbiguity("vector does not span an ovoid point")
    return mat_inv(F, s)


def classify_sz_unipotent(ctx, g):
    """Class label of a nontrivial unipotent element of the twisted group."""
    F = ctx.F
    order = mat_order(F, g, cap=8)
    if order == 2:
        return "u2"
    if order != 4:
        raise TableMismatch(f"unipotent of unexpected order {order}")
    ker = _kernel_vector(F, g)
    s = ovoid_standardizer(ctx, ker)
    h = mat_mul(F, mat_mul(F, s, g), mat_inv(F, s))
    a, b = sz_unipotent_coords(ctx, h)
    return u4_side(ctx, a, b)


def _kernel_vector(F, g):
    """A nonzero vector fixed by the unipotent matrix g."""
    rows = [[g[i][j] if i != j else F.add(g[i][j], 1) for j in range(4)] for i in range(4)]
    # solve (g - 1) v = 0 by gaussian elimination over F
    cols = list(range(4))
    pivots = []
    r = 0
    for c in cols:
        pivot = None
        for i in range(r, 4):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = F.inv(rows[r][c])
        rows[r] = [F.mul(inv, x) for x in rows[r]]
        for i in range(4):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [F.add(rows[i][j], F.mul(f, rows[r][j])) for j in range(4)]
        pivots.append(c)
        r += 1
    free = [c for c in cols if c not in pivots]
    if not free:
        raise TableMismatch("unipotent matrix has no fixed vector")
    v = [0, 0, 0, 0]
    v[free[0]] = 1
    for i, c in enumerate(pivots):
        v[c] = rows[i][free[0]]
    return tuple(v)


# ---------------------------------------------------------------------------
# characteristic polynomials (for semisimple classification)


def _poly_mul(F, p1, p2):
    out = [0] * (len(p1) + len(p2) - 1)
    for i, a in enumerate(p1):
        if a == 0:
            continue
        for j, b in enumerate(p2):
            out[i + j] = F.add(out[i + j], F.mul(a, b))
    return out


def char_poly(F, g):
    """Coefficients (low to high) of det(x I - g) over the field F."""
    entries = [
        [((1 if i == j else 0), g[i][j]) for j in range(4)] for i in range(4)
    ]
    # each entry is the degree-1 polynomial x*lead + const, char 2 absorbs signs
    total = [0] * 5
    import itertools

    for perm in itertools.permutations(range(4)):
        prod = [1]
        for i in range(4):
            lead, const = entries[i][perm[i]]
            prod = _poly_mul(F, prod, [const, lead])
        for d, c in enumerate(prod):
            total[d] = F.add(total[d], c)
    return tuple(total)


def poly_from_roots(F, roots):
    p = [1]
    for r in roots:
        p = _poly_mul(F, p, [r, 1])
    return tuple(p)


@lru_cache(maxsize=None)
def _sz_semisimple_polys(n):
    """Map from characteristic polynomial to torus class label."""
    ctx = context(n)
    F, FF, q = ctx.F, ctx.FF, ctx.q
    table = {}
    emb = ctx.emb
    for i in ctx.e0_reps:
        z1 = F.pow(ctx.gamma, i)
        z2 = F.pow(ctx.gamma, (2 * ctx.theta - 1) * i % (q - 1))
        roots = (z1, z2, F.inv(z2), F.inv(z1))
        table[poly_from_roots(F, roots)] = f"t0:{i}"
    for reps, mod, fam in ((ctx.e1_reps, ctx.m1, "t1"), (ctx.e2_reps, ctx.m2, "t2")):
        mu = FF.element_of_order(mod)
        for j in reps:
            roots = (
                FF.pow(mu, j),
                FF.pow(mu, -j),
                FF.pow(mu, q * j % mod),
                FF.pow(mu, -q * j % mod),
            )
            poly_big = poly_from_roots(FF, roots)
            poly = tuple(ctx.emb_inv(c) for c in poly_big)
            table[poly] = f"{fam}:{j}"
    return table


def classify_sz_element(ctx, g):
    """Conjugacy class label of an arbitrary element of the twisted group."""
    F = ctx.F
    if g == IDENTITY:
        return "id"
    order = mat_order(F, g, cap=ctx.q + 2 * ctx.theta + 2)
    if order in (2, 4):
        return classify_sz_unipotent(ctx, g)
    poly = char_poly(F, g)
    table = _sz_semisimple_polys(ctx.n)
    label = table.get(poly)
    if label is None:
        raise TableMismatch(f"no torus class with characteristic polynomial {poly}")
    return label


# ---------------------------------------------------------------------------
# class sets


@lru_cache(maxsize=None)
def sz_classes(n):
    """Conjugacy classes of the twisted group of order q^2 (q-1) (q^2+1)."""
    ctx = context(n)
    F, q, th = ctx.F, ctx.q, ctx.theta
    order = ctx.sz_order
    out = [
        ConjClass("id", 1, order, 1, IDENTITY, "id"),
        ConjClass(
            "u2", (q - 1) * (q**2 + 1), q**2, 2, sz_unipotent(ctx, 0, 1), "u2"
        ),
        ConjClass(
            "u4a",
            order // (2 * q),
            2 * q,
            4,
            sz_unipotent(ctx, 1, 0),
            "u4",
            (1,),
        ),
        ConjClass(
            "u4b",
            order // (2 * q),
            2 * q,
            4,
            sz_unipotent(ctx, 1, 1),
            "u4",
            (-1,),
        ),
    ]
    for i in ctx.e0_reps:
        rep = torus(F, F.pow(ctx.gamma, i), F.pow(ctx.gamma, (2 * th - 1) * i % (q - 1)))
        out.append(
            ConjClass(
                f"t0:{i}",
                order // (q - 1),
                q - 1,
                (q - 1) // gcd(i, q - 1),
                rep,
                "t0",
                (i,),
            )
        )
    for j in ctx.e1_reps:
        out.append(
            ConjClass(
                f"t1:{j}", order // ctx.m1, ctx.m1, ctx.m1 // gcd(j, ctx.m1), None, "t1", (j,)
            )
        )
    for k in ctx.e2_reps:
        out.append(
            ConjClass(
                f"t2:{k}", order // ctx.m2, ctx.m2, ctx.m2 // gcd(k, ctx.m2), None, "t2", (k,)
            )
        )
    cs = ClassSet("sz", order, out)
    if len(cs) != q + 3:
        raise TableMismatch(f"expected q+3 classes, got {len(cs)}")
    return cs


@lru_cache(maxsize=None)
def outer_classes(n):
    """Twisted classes of the outer coset of the degree-2 extension."""
    ctx = context(n)
    F, q, th = ctx.F, ctx.q, ctx.theta
    big = 2 * ctx.ambient_order
    out = [
        ConjClass("out:id", big // (2 * ctx.sz_order), 2 * ctx.sz_order, 2, IDENTITY, "out:u"),
        ConjClass("out:ua", big // (4 * q), 4 * q, 8, x_a(1), "out:u"),
        ConjClass("out:uab", big // (2 * q**2), 2 * q**2, 4, x_ab(1), "out:u"),
        ConjClass(
            "out:uaab", big // (4 * q), 4 * q, 8, mat_mul(F, x_a(1), x_ab(1)), "out:u"
        ),
    ]
    for i in ctx.e0_reps:
        rep = torus(F, F.pow(ctx.gamma, i), F.pow(ctx.gamma, (2 * th - 1) * i % (q - 1)))
        elt_order = (q - 1) // gcd(2 * i, q - 1)
        out.append(
            ConjClass(
                f"out:t0:{i}", big // (2 * (q - 1)), 2 * (q - 1), 2 * elt_order, rep, "out:t0", (i,)
            )
        )
    for j in ctx.e1_reps:
        out.append(
            ConjClass(
                f"out:t1:{j}",
                big // (2 * ctx.m1),
                2 * ctx.m1,
                2 * (ctx.m1 // gcd(2 * j, ctx.m1)),
                None,
                "out:t1",
                (j,),
            )
        )
    for k in ctx.e2_reps:
        out.append(
            ConjClass(
                f"out:t2:{k}",
                big // (2 * ctx.m2),
                2 * ctx.m2,
                2 * (ctx.m2 // gcd(2 * k, ctx.m2)),
                None,
                "out:t2",
                (k,),
            )
        )
    cs = ClassSet("outer", big, out, coset_order=big // 2)
    if len(cs) != q + 3:
        raise TableMismatch(f"expected q+3 outer classes, got {len(cs)}")
    return cs


@lru_cache(maxsize=None)
def b2_classes(n):
    """Conjugacy classes of the ambient symplectic group."""
    ctx = context(n)
    F, q = ctx.F, ctx.q
    order = ctx.ambient_order
    g = ctx.gamma
    out = [
        ConjClass("id", 1, order, 1, IDENTITY, "id"),
        ConjClass("u2a", order // (q**4 * (q**2 - 1)), q**4 * (q**2 - 1), 2, x_2ab(1), "u2"),
        ConjClass("u2b", order // (q**4 * (q**2 - 1)), q**4 * (q**2 - 1), 2, x_ab(1), "u2"),
        ConjClass("u2c", order // q**4, q**4, 2, unipotent(F, 0, 0, 1, 1), "u2"),
        ConjClass("u4a", order // (2 * q**2), 2 * q**2, 4, unipotent(F, 1, 1, 0, 0), "u4"),
        ConjClass("u4b", order // (2 * q**2), 2 * q**2, 4, unipotent(F, 1, 1, 0, 1), "u4"),
    ]
    half0 = (q - 2) // 2

    def tor(i, j):
        return torus(F, F.pow(g, i), F.pow(g, j))

    for a in range(1, half0 + 1):
        for b in range(a + 1, half0 + 1):
            out.append(
                ConjClass(
                    f"sr1:{a}:{b}",
                    order // (q - 1) ** 2,
                    (q - 1) ** 2,
                    (q - 1) // gcd(gcd(a, b), q - 1),
                    tor(a, b),
                    "sr1",
                    (a, b),
                )
            )
    for i in orbit_reps(q**2 - 1, (q**2 - 2, q)):
        if i % (q + 1) == 0 or i % (q - 1) == 0:
            continue
        out.append(
            ConjClass(
                f"sr2:{i}",
                order // (q**2 - 1),
                q**2 - 1,
                (q**2 - 1) // gcd(i, q**2 - 1),
                None,
                "sr2",
                (i,),
            )
        )
    for a in range(1, half0 + 1):
        for b in range(1, q // 2 + 1):
            out.append(
                ConjClass(
                    f"sr3:{a}:{b}",
                    order // (q**2 - 1),
                    q**2 - 1,
                    ((q - 1) // gcd(a, q - 1)) * ((q + 1) // gcd(b, q + 1)),
                    None,
                    "sr3",
                    (a, b),
                )
            )
    for a in range(1, q // 2 + 1):
        for b in range(a + 1, q // 2 + 1):
            out.append(
                ConjClass(
                    f"sr4:{a}:{b}",
                    order // (q + 1) ** 2,
                    (q + 1) ** 2,
                    (q + 1) // gcd(gcd(a, b), q + 1),
                    None,
                    "sr4",
                    (a, b),
                )
            )
    for i in orbit_reps(q**2 + 1, (q**2, q)):
        out.append(
            ConjClass(
                f"sr5:{i}",
                order // (q**2 + 1),
                q**2 + 1,
                (q**2 + 1) // gcd(i, q**2 + 1),
                None,
                "sr5",
                (i,),
            )
        )
    csn1 = q * (q - 1) * (q**2 - 1)
    for i in range(1, half0 + 1):
        out.append(
            ConjClass(
                f"sn1:{i}", order // csn1, csn1, (q - 1) // gcd(i, q - 1), tor(0, i), "sn1", (i,)
            )
        )
        out.append(
            ConjClass(
                f"sn2:{i}",
                order // csn1,
                csn1,
                (q - 1) // gcd(i, q - 1),
                tor(i, (q - 1 - i) % (q - 1)),
                "sn2",
                (i,),
            )
        )
    cmx1 = q * (q - 1)
    for i in range(1, half0 + 1):
        out.append(
            ConjClass(
                f"mx1:{i}",
                order // cmx1,
                cmx1,
                2 * ((q - 1) // gcd(i, q - 1)),
                mat_mul(F, tor(0, i), x_2ab(1)),
                "mx1",
                (i,),
            )
        )
        out.append(
            ConjClass(
                f"mx2:{i}",
                order // cmx1,
                cmx1,
                2 * ((q - 1) // gcd(i, q - 1)),
                mat_mul(F, tor(i, (q - 1 - i) % (q - 1)), x_ab(1)),
                "mx2",
                (i,),
            )
        )
    csn3 = q * (q + 1) * (q**2 - 1)
    cmx3 = q * (q + 1)
    for i in range(1, q // 2 + 1):
        out.append(
            ConjClass(
                f"sn3:{i}", order // csn3, csn3, (q + 1) // gcd(i, q + 1), None, "sn3", (i,)
            )
        )
        out.append(
            ConjClass(
                f"sn4:{i}", order // csn3, csn3, (q + 1) // gcd(i, q + 1), None, "sn4", (i,)
            )
        )
        out.append(
            ConjClass(
                f"mx3:{i}",
                order // cmx3,
                cmx3,
                2 * ((q + 1) // gcd(i, q + 1)),
                None,
                "mx3",
                (i,),
            )
        )
        out.append(
            ConjClass(
                f"mx4:{i}",
                order // cmx3,
                cmx3,
                2 * ((q + 1) // gcd(i, q + 1)),
                None,
                "mx4",
                (i,),
            )
        )
    cs = ClassSet("b2", order, out)
    if len(cs) != q**2 + 2 * q + 3:
        raise TableMismatch(f"expected q^2+2q+3 classes, got {len(cs)}")
    return cs


@lru_cache(maxsize=None)
def borel_outer_classes(n):
    """Twisted classes of the outer coset of the extended Borel subgroup."""
    ctx = context(n)
    F, q = ctx.F, ctx.q
    big = 2 * ctx.borel_order
    out = [
        ConjClass("bout:id", big // (2 * q**2 * (q - 1)), 2 * q**2 * (q - 1), 2, IDENTITY, "bout:u"),
        ConjClass("bout:ua", big // (4 * q), 4 * q, 8, x_a(1), "bout:u"),
        ConjClass("bout:uab", big // (2 * q**2), 2 * q**2, 4, x_ab(1), "bout:u"),
        ConjClass("bout:uaab", big // (4 * q), 4 * q, 8, mat_mul(F, x_a(1), x_ab(1)), "bout:u"),
    ]
    for l in range(1, q - 1):
        rep = torus(
            F, F.pow(ctx.gamma, l), F.pow(ctx.gamma, (2 * ctx.theta - 1) * l % (q - 1))
        )
        out.append(
            ConjClass(
                f"bout:t0:{l}",
                big // (2 * (q - 1)),
                2 * (q - 1),
                2 * ((q - 1) // gcd(2 * l, q - 1)),
                rep,
                "bout:t0",
                (l,),
            )
        )
    return ClassSet("borel-outer", big, out, coset_order=big // 2)


# ---------------------------------------------------------------------------
# fusion maps


def sz_to_b2(n):
    """Fusion of twisted-subgroup classes into ambient classes."""
    ctx = context(n)
    q, th = ctx.q, ctx.theta
    fusion = {"id": "id", "u2": "u2c", "u4a": "u4b", "u4b": "u4b"}
    for i in ctx.e0_reps:
        a, b = split_pair_label(q, i, (2 * th - 1) * i % (q - 1))
        fusion[f"t0:{i}"] = f"sr1:{a}:{b}"
    for j in ctx.e1_reps:
        idx = orbit_rep(q**2 + 1, (q**2, q), ctx.m2 * j % (q**2 + 1))
        fusion[f"t1:{j}"] = f"sr5:{idx}"
    for k in ctx.e2_reps:
        idx = orbit_rep(q**2 + 1, (q**2, q), ctx.m1 * k % (q**2 + 1))
        fusion[f"t2:{k}"] = f"sr5:{idx}"
    return fusion


def borel_class_mass(n):
    """Total Borel mass of each ambient class: |B meet C| summed per label.

    Used for scalar products against the permutation character of the flag
    action via Frobenius reciprocity.
    """
    ctx = context(n)
    q = ctx.q
    mass = {
        "id": 1,
        "u2a": q**2 - 1,
        "u2b": q**2 - 1,
        "u2c": (q - 1) ** 2 * (2 * q + 1),
        "u4a": q**2 * (q - 1) ** 2 // 2,
        "u4b": q**2 * (q - 1) ** 2 // 2,
    }
    half0 = (q - 2) // 2
    for a in range(1, half0 + 1):
        for b in range(a + 1, half0 + 1):
            mass[f"sr1:{a}:{b}"] = 8 * q**4
    for i in range(1, half0 + 1):
        mass[f"sn1:{i}"] = 4 * q**3
        mass[f"sn2:{i}"] = 4 * q**3
        mass[f"mx1:{i}"] = 4 * q**3 * (q - 1)
        mass[f"mx2:{i}"] = 4 * q**3 * (q - 1)
    total = sum(mass.values())
    if total != ctx.borel_order:
        raise TableMismatch(f"Borel masses sum to {total}, want {ctx.borel_order}")
    return mass


def sz_to_outer(n):
    """Fusion of twisted-subgroup classes into the outer twisted classes.

    A class c maps to the twisted class whose orbit under x -> y x s(y)^{-1}
    contains the elements of c.
    """
    ctx = context(n)
    fusion = {"id": "out:id", "u2": "out:id", "u4a": "out:uab", "u4b": "out:uab"}
    for i in ctx.e0_reps:
        fusion[f"t0:{i}"] = f"out:t0:{i}"
    for j in ctx.e1_reps:
        fusion[f"t1:{j}"] = f"out:t1:{j}"
    for k in ctx.e2_reps:
        fusion[f"t2:{k}"] = f"out:t2:{k}"
    return fusion


def borel_outer_to_outer(n):
    """Fusion of outer Borel twisted classes into the outer twisted classes."""
    ctx = context(n)
    q = ctx.q
    fusion = {
        "bout:id": "out:id",
        "bout:ua": "out:ua",
        "bout:uab": "out:uab",
        "bout:uaab": "out:uaab",
    }
    for l in range(1, q - 1):
        fusion[f"bout:t0:{l}"] = f"out:t0:{min(l, q - 1 - l)}"
    return fusion


@lru_cache(maxsize=None)
def u0_twisted_class_set(n):
    """Twisted classes of the binary-coordinate unipotent subgroup, validated."""
    ctx = context(n)
    u0 = U0Group(ctx)
    orbits = u0.twisted_classes()
    classes = []
    big = 2 * ctx.u0_order
    for label in sorted(orbits):
        rep = orbits[label][0]
        square = u0.mul(rep, u0.sigma(rep))
        elt_order = 2
        acc = square
        while acc != (0, 0, 0, 0):
            acc = u0.mul(acc, square)
            elt_order += 2
        classes.append(
            ConjClass(label, 2 * ctx.q, big // (2 * ctx.q), elt_order, rep, label.split(":")[1])
        )
    return ClassSet("u0-twisted", big, classes, coset_order=ctx.u0_order)


def u0_twisted_to_borel_outer(n):
    """Fusion of the twisted unipotent classes into the outer Borel classes."""
    ctx = context(n)
    F = ctx.F
    fusion = {"tw:id": "bout:id"}
    for u in F.elements():
        if u != 0:
            fusion[f"tw:uab:{u}"] = "bout:uab"
        fusion[f"tw:ua:{u}"] = "bout:ua" if F.trace(u) == 0 else "bout:uaab"
    return fusion


@lru_cache(maxsize=None)
def borel_unipotent_families(n):
    """The unipotent conjugacy classes of the Borel subgroup.

    Sizes partition q^4; validated against a brute-force orbit count in the
    test suite at the enumerable size.
    """
    ctx = context(n)
    F, q = ctx.F, ctx.q
    ab = mat_mul(F, x_a(1), x_b(1))
    fams = [
        ("id", 1, IDENTITY),
        ("u-2ab", q - 1, x_2ab(1)),
        ("u-ab", q - 1, x_ab(1)),
        ("u-ab-2ab", (q - 1) ** 2, mat_mul(F, x_ab(1), x_2ab(1))),
        ("u-a", q * (q - 1), x_a(1)),
        ("u-a-2ab", q * (q - 1) ** 2, mat_mul(F, x_a(1), x_2ab(1))),
        ("u-b", q * (q - 1), x_b(1)),
        ("u-b-2ab", q * (q - 1) ** 2, mat_mul(F, x_b(1), x_2ab(1))),
        ("u-a-b", q**2 * (q - 1) ** 2 // 2, ab),
        ("u-a-b-2ab", q**2 * (q - 1) ** 2 // 2, mat_mul(F, ab, x_2ab(1))),
    ]
    classes = [
        ConjClass(label, size, ctx.borel_order // size, mat_order(F, rep), rep, "u")
        for label, size, rep in fams
    ]
    return ClassSet("borel-unipotent", ctx.borel_order, classes, coset_order=q**4)


def classify_borel_element(ctx, g):
    """Ambient-group class label of an upper triangular element."""
    F, q = ctx.F, ctx.q
    z1, z2 = g[0][0], g[1][1]
    if z1 == 1 and z2 == 1:
        ta, tb, tab, t2ab = unipotent_coords(F, g)
        if ta == 0 and tb == 0:
            if tab == 0 and t2ab == 0:
                return "id"
            if t2ab == 0:
                return "u2b"
            if tab == 0:
                return "u2a"
            return "u2c"
        if tb == 0:
            delta = F.add(t2ab, F.mul(ta, tab))
            return "u2b" if delta == 0 else "u2c"
        if ta == 0:
            delta = F.add(F.mul(tb, t2ab), F.mul(tab, tab))
            return "u2a" if delta == 0 else "u2c"
        rs = F.mul(ta, tb)
        c_norm = F.mul(tab, F.inv(rs))
        d_norm = F.mul(t2ab, F.inv(F.mul(rs, ta)))
        return "u4a" if F.trace(F.add(c_norm, d_norm)) == 0 else "u4b"
    i1 = ctx.dlog(z1)
    i2 = ctx.dlog(z2)
    distinct = len({z1, z2, F.inv(z1), F.inv(z2)}) == 4
    if distinct:
        a, b = split_pair_label(q, i1, i2)
        return f"sr1:{a}:{b}"
    if z1 == 1 or z2 == 1:
        i = _canon_sign(q - 1, i2 if z1 == 1 else i1)
        ord_h = (q - 1) // gcd(i, q - 1)
        semisimple = mat_pow(F, g, ord_h) == IDENTITY
        return f"sn1:{i}" if semisimple else f"mx1:{i}"
    # z1 = z2 or z1 = z2^{-1}, both nontrivial
    i = _canon_sign(q - 1, i1)
    ord_h = (q - 1) // gcd(i, q - 1)
    semisimple = mat_pow(F, g, ord_h) == IDENTITY
    return f"sn2:{i}" if semisimple else f"mx2:{i}"


# ---------------------------------------------------------------------------
# the 4 q^2 subgroup


class U0Group:
    """The subgroup of unipotent elements with binary outer-root coordinates.

    Elements are tuples (da, db, u, v) with da, db in {0, 1} and u, v field
    elements, multiplying by
    (da,db,u,v)(ea,eb,w,z) = (da+ea, db+eb, u+w+db*ea, v+z+db*ea).
    """

    def __init__(self, ctx):
        self.ctx = ctx
        F = ctx.F
        self.elements = [
            (da, db, u, v)
            for da in (0, 1)
            for db in (0, 1)
            for u in F.elements()
            for v in F.elements()
        ]

    def mul(self, e1, e2):
        F = self.ctx.F
        da, db, u, v = e1
        ea, eb, w, z = e2
        cross = F.mul(db, ea)
        return (da ^ ea, db ^ eb, F.add(F.add(u, w), cross), F.add(F.add(v, z), cross))

    def inv(self, e):
        F = self.ctx.F
        da, db, u, v = e
        cross = F.mul(da, db)
        return (da, db, F.add(u, cross), F.add(v, cross))

    def sigma(self, e):
        F, th = self.ctx.F, self.ctx.theta
        da, db, u, v = e
        cross = F.mul(da, db)
        return (db, da, F.add(F.pow(v, th), cross), F.add(F.pow(u, 2 * th), cross))

    def matrix(self, e):
        da, db, u, v = e
        return unipotent(self.ctx.F, da, db, u, v)

    def lam_value(self, k, l, e):
        da, db, u, v = e
        sign = -1 if (k * da + l * db) % 2 else 1
        return sign * self.ctx.F.trace_sign(self.ctx.F.add(u, v))

    def twisted_classes(self):
        """Orbit partition of the outer coset; returns label -> sorted members."""
        F = self.ctx.F
        gens = [(1, 0, 0, 0), (0, 1, 0, 0)] + [
            (0, 0, 1 << b, 0) for b in range(F.m)
        ] + [(0, 0, 0, 1 << b) for b in range(F.m)]
        seen = set()
        orbits = []
        for e in self.elements:
            if e in seen:
                continue
            orbit = {e}
            frontier = [e]
            while frontier:
                x = frontier.pop()
                for y in gens:
                    img = self.mul(self.mul(y, x), self.inv(self.sigma(y)))
                    if img not in orbit:
                        orbit.add(img)
                        frontier.append(img)
            seen.update(orbit)
            orbits.append(sorted(orbit))
        labeled = {}
        th = self.ctx.theta
        for orbit in orbits:
            parities = {(da ^ db) for da, db, _, _ in orbit}
            if len(parities) != 1:
                raise TableMismatch("twisted orbit mixes coset parities")
            invariants = {
                F.add(u, F.pow(v, th)) for da, db, u, v in orbit if (da, db) in ((0, 0), (1, 0))
            }
            if len(invariants) != 1:
                raise TableMismatch("twisted orbit invariant is not constant")
            inv = invariants.pop()
            if parities == {0}:
                label = "tw:id" if inv == 0 else f"tw:uab:{inv}"
            else:
                label = f"tw:ua:{inv}"
            if label in labeled:
                raise TableMismatch(f"duplicate twisted class {label}")
            labeled[label] = orbit
        if len(labeled) != 2 * self.ctx.q:
            raise TableMismatch(f"expected 2q twisted classes, got {len(labeled)}")
        return labeled

    def lam_twisted(self, k):
        """Twisted class function of the diagonal character (k, k): label -> sign."""
        values = {}
        for label, orbit in self.twisted_classes().items():
            vals = {self.lam_value(k, k, e) for e in orbit}
            if len(vals) != 1:
                raise TableMismatch(f"character not constant on twisted class {label}")
            values[label] = vals.pop()
        return values


# ---------------------------------------------------------------------------
# vectorized matrix helpers (enumeration scale only)

_ALPHA_PAIRS = ((0, 1), (0, 2), (1, 3), (2, 3))


def batch_alpha(MUL, mats):
    """Graph-endomorphism image of a batch of matrices via 2x2 minors."""
    out = np.zeros_like(mats)
    for r, (r0, r1) in enumerate(_ALPHA_PAIRS):
        for c, (c0, c1) in enumerate(_ALPHA_PAIRS):
            out[:, r, c] = MUL[mats[:, r0, c0], mats[:, r1, c1]] ^ MUL[
                mats[:, r0, c1], mats[:, r1, c0]
            ]
    return out


def frob_table(F, k):
    """Permutation table of the k-fold squaring map."""
    return np.array([F.frob(a, k) for a in range(F.q)], dtype=np.uint8)


def batch_sigma(ctx, MUL, mats):
    """Twisting endomorphism on a batch: graph map followed by n squarings."""
    return frob_table(ctx.F, ctx.n)[batch_alpha(MUL, mats)]


def batch_inv(mats):
    """Symplectic inverse: reverse both axes and transpose."""
    return np.ascontiguousarray(mats[:, ::-1, ::-1].transpose(0, 2, 1))


# ---------------------------------------------------------------------------
# full enumerations at n = 1


class SzEnumeration:
    """Fully enumerated twisted group with its class partition."""

    def __init__(self, ctx, keys, mats, class_ids, labels):
        self.ctx = ctx
        self.keys = keys
        self.mats = mats
        self.class_ids = class_ids
        self.labels = labels
        self.label_of_id = {i: lab for i, lab in enumerate(labels)}

    def index_of(self, mat):
        key = pack_one(mat, self.ctx.m)
        i = int(np.searchsorted(self.keys, key))
        if i >= len(self.keys) or self.keys[i] != key:
            raise TableMismatch("matrix is not in the enumerated group")
        return i

    def class_label_of(self, mat):
        return self.labels[self.class_ids[self.index_of(mat)]]

    def class_sizes(self):
        sizes = {}
        for cid in self.class_ids:
            lab = self.labels[cid]
            sizes[lab] = sizes.get(lab, 0) + 1
        return sizes


def _closure(backend, MUL, m, gens):
    gen_mats = np.array(gens, dtype=np.uint8)
    all_mats = np.concatenate([np.array([IDENTITY], dtype=np.uint8), gen_mats])
    keys = backend.pack_mats(all_mats, m)
    keys, idx = np.unique(keys, return_index=True)
    all_mats = all_mats[idx]
    frontier = all_mats
    while len(frontier):
        prods = []
        for i in range(len(gen_mats)):
            tiled = np.broadcast_to(gen_mats[i], (len(frontier), 4, 4))
            prods.append(backend.batch_mat_mul(MUL, frontier, np.ascontiguousarray(tiled)))
        cand = np.concatenate(prods)
        cand_keys = backend.pack_mats(cand, m)
        cand_keys, idx = np.unique(cand_keys, return_index=True)
        cand = cand[idx]
        fresh = ~np.isin(cand_keys, keys)
        frontier = cand[fresh]
        if len(frontier):
            keys = np.concatenate([keys, cand_keys[fresh]])
            order = np.argsort(keys)
            keys = keys[order]
            all_mats = np.concatenate([all_mats, frontier])[order]
    return keys, all_mats


def _partition(backend, MUL, m, keys, mats, gen_list, image_fn):
    """Union-find partition of `mats` under x -> image_fn(g, x) for g in gens."""
    n_el = len(mats)
    parent = np.arange(n_el)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for g in gen_list:
        images = image_fn(g)
        img_keys = backend.pack_mats(images, m)
        pos = np.searchsorted(keys, img_keys)
        if not np.array_equal(keys[pos], img_keys):
            raise TableMismatch("conjugation left the enumerated set")
        for i in range(n_el):
            a, b = find(i), find(int(pos[i]))
            if a != b:
                parent[a] = b
    roots = np.array([find(i) for i in range(n_el)])
    _, class_ids = np.unique(roots, return_inverse=True)
    return class_ids


@lru_cache(maxsize=None)
def enumerate_sz(n):
    """Breadth-first enumeration of the twisted group; n = 1 scale only."""
    ctx = context(n)
    if n != 1:
        raise ScaleExceeded("full enumeration is limited to the 29120-element group")
    backend = get_backend()
    F, m = ctx.F, ctx.m
    MUL = mul_table(F)
    gens = [
        sz_unipotent(ctx, 1, 0),
        sz_unipotent(ctx, 0, 1),
        torus(F, ctx.gamma, F.pow(ctx.gamma, 2 * ctx.theta - 1)),
        J,
    ]
    keys, mats = _closure(backend, MUL, m, gens)
    if len(keys) != ctx.sz_order:
        raise TableMismatch(f"enumerated {len(keys)} elements, want {ctx.sz_order}")

    def conj_images(g):
        n_el = len(mats)
        g_arr = np.ascontiguousarray(np.broadcast_to(np.array(g, dtype=np.uint8), (n_el, 4, 4)))
        gi_arr = np.ascontiguousarray(
            np.broadcast_to(np.array(mat_inv(F, g), dtype=np.uint8), (n_el, 4, 4))
        )
        return backend.batch_mat_mul(MUL, backend.batch_mat_mul(MUL, g_arr, mats), gi_arr)

    class_ids = _partition(backend, MUL, m, keys, mats, gens, conj_images)
    n_classes = int(class_ids.max()) + 1
    labels = [None] * n_classes
    cs = sz_classes(n)
    for cid in range(n_classes):
        members = np.nonzero(class_ids == cid)[0]
        rep = tuple(tuple(int(x) for x in row) for row in mats[members[0]])
        label = classify_sz_element(ctx, rep)
        if labels[cid] is not None:
            raise TableMismatch("duplicate class id")
        labels[cid] = label
        if len(members) != cs[label].size:
            raise TableMismatch(
                f"class {label}: enumerated size {len(members)} != {cs[label].size}"
            )
    if sorted(labels) != sorted(cs.labels()):
        raise TableMismatch("enumerated class labels do not match the class data")
    return SzEnumeration(ctx, keys, mats, class_ids, labels)


class BorelEnumeration:
    """All q^4 (q-1)^2 upper triangular elements with precomputed twists."""

    def __init__(self, ctx, keys, mats, sigma_inv_mats, inv_mats, u0_keys):
        self.ctx = ctx
        self.keys = keys
        self.mats = mats
        self.sigma_inv_mats = sigma_inv_mats
        self.inv_mats = inv_mats
        self.u0_keys = u0_keys

    def index_of(self, mat):
        key = pack_one(mat, self.ctx.m)
        i = int(np.searchsorted(self.keys, key))
        if i >= len(self.keys) or self.keys[i] != key:
            raise NotInBorel("matrix is not upper triangular over this field")
        return i


@lru_cache(maxsize=None)
def enumerate_borel(n):
    """Enumerate the Borel subgroup at the 200704-element scale."""
    ctx = context(n)
    if n != 1:
        raise ScaleExceeded("Borel enumeration is limited to the smallest field")
    backend = get_backend()
    F, m, q = ctx.F, ctx.m, ctx.q
    MUL = mul_table(F)
    unis = np.array(
        [
            unipotent(F, ta, tb, tab, t2ab)
            for ta in F.elements()
            for tb in F.elements()
            for tab in F.elements()
            for t2ab in F.elements()
        ],
        dtype=np.uint8,
    )
    tori = np.array(
        [
            torus(F, z1, z2)
            for z1 in range(1, q)
            for z2 in range(1, q)
        ],
        dtype=np.uint8,
    )
    blocks = []
    for t in tori:
        tiled = np.ascontiguousarray(np.broadcast_to(t, (len(unis), 4, 4)))
        blocks.append(backend.batch_mat_mul(MUL, unis, tiled))
    mats = np.concatenate(blocks)
    if len(mats) != ctx.borel_order:
        raise TableMismatch("Borel enumeration has the wrong cardinality")
    keys = backend.pack_mats(mats, m)
    order = np.argsort(keys)
    keys = keys[order]
    if len(np.unique(keys)) != len(keys):
        raise TableMismatch("Borel enumeration repeats an element")
    mats = np.ascontiguousarray(mats[order])
    sigma_mats = batch_sigma(ctx, MUL, mats)
    sigma_inv_mats = batch_inv(sigma_mats)
    inv_mats = batch_inv(mats)
    u0 = U0Group(ctx)
    u0_keys = np.sort(
        np.array([pack_one(u0.matrix(e), m) for e in u0.elements], dtype=np.uint64)
    )
    return BorelEnumeration(ctx, keys, mats, sigma_inv_mats, inv_mats, u0_keys)


@lru_cache(maxsize=None)
def borel_twisted_partition(n):
    """Twisted class ids of every Borel element, plus a label -> id map.

    Twisted conjugation sends x to g x sigma(g)^{-1}; the resulting orbits
    are matched against the outer Borel class data by representative and
    validated against the expected sizes.
    """
    ctx = context(n)
    be = enumerate_borel(n)
    backend = get_backend()
    F, m = ctx.F, ctx.m
    MUL = mul_table(F)
    gens = [
        x_a(1),
        x_a(ctx.gamma),
        x_b(1),
        x_b(ctx.gamma),
        torus(F, ctx.gamma, 1),
        torus(F, 1, ctx.gamma),
    ]

    def twist_images(g):
        n_el = len(be.mats)
        g_arr = np.ascontiguousarray(np.broadcast_to(np.array(g, dtype=np.uint8), (n_el, 4, 4)))
        sg_inv = mat_inv(F, sigma(F, g, ctx.n))
        sg_arr = np.ascontiguousarray(
            np.broadcast_to(np.array(sg_inv, dtype=np.uint8), (n_el, 4, 4))
        )
        return backend.batch_mat_mul(MUL, backend.batch_mat_mul(MUL, g_arr, be.mats), sg_arr)

    class_ids = _partition(backend, MUL, m, be.keys, be.mats, gens, twist_images)
    cset = borel_outer_classes(n)
    label_to_id = {}
    counts = np.bincount(class_ids)
    for c in cset:
        cid = int(class_ids[be.index_of(c.rep)])
        if cid in label_to_id.values():
            raise TableMismatch(f"twisted class of {c.label} collides with another label")
        if int(counts[cid]) != c.size:
            raise TableMismatch(
                f"twisted class {c.label}: enumerated size {int(counts[cid])} != {c.size}"
            )
        label_to_id[c.label] = cid
    if len(label_to_id) != int(class_ids.max()) + 1:
        raise TableMismatch("twisted partition has unmatched classes")
    return class_ids, label_to_id


# ---------------------------------------------------------------------------
# the flag variety (for induction from the Borel subgroup)


def _vec_scale(F, c, v):
    return tuple(F.mul(c, x) for x in v)


def _vec_add(F, u, v):
    return tuple(F.add(a, b) for a, b in zip(u, v))


def _form(F, u, v):
    return F.add(
        F.add(F.mul(u[0], v[3]), F.mul(u[1], v[2])),
        F.add(F.mul(u[2], v[1]), F.mul(u[3], v[0])),
    )


def _mat_vec(F, g, v):
    return tuple(
        F.add(
            F.add(F.mul(g[i][0], v[0]), F.mul(g[i][1], v[1])),
            F.add(F.mul(g[i][2], v[2]), F.mul(g[i][3], v[3])),
        )
        for i in range(4)
    )


def _normalize_line(F, v):
    for c in v:
        if c:
            inv = F.inv(c)
            return _vec_scale(F, inv, v)
    raise TableMismatch("zero vector as a line")


def _plane_key(F, v, w):
    """Canonical reduced basis of the span of v and w."""
    rows = [list(v), list(w)]
    r = 0
    for c in range(4):
        piv = None
        for i in range(r, 2):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][c])
        rows[r] = [F.mul(inv, x) for x in rows[r]]
        for i in range(2):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [F.add(rows[i][j], F.mul(f, rows[r][j])) for j in range(4)]
        r += 1
        if r == 2:
            break
    if r != 2:
        raise TableMismatch("degenerate plane")
    return tuple(rows[0]), tuple(rows[1])


class FlagVariety:
    """Complete isotropic flags (line inside an isotropic plane)."""

    def __init__(self, ctx):
        self.ctx = ctx
        F, q = ctx.F, ctx.q
        lines = []
        seen = set()
        for v in _all_vectors(q):
            if all(c == 0 for c in v):
                continue
            nv = _normalize_line(F, v)
            if nv not in seen:
                seen.add(nv)
                lines.append(nv)
        flags = []
        index = {}
        for v in lines:
            perp_planes = set()
            for w in _all_vectors(q):
                if all(c == 0 for c in w):
                    continue
                if _form(F, v, w) != 0:
                    continue
                try:
                    key = _plane_key(F, v, w)
                except TableMismatch:
                    continue
                perp_planes.add(key)
            for key in sorted(perp_planes):
                index[(v, key)] = len(flags)
                flags.append((v, key))
        expected = (q + 1) ** 2 * (q**2 + 1)
        if len(flags) != expected:
            raise TableMismatch(f"flag variety has {len(flags)} points, want {expected}")
        self.flags = flags
        self.index = index
        self._sigma_perm = None

    def _flag_of(self, g):
        F = self.ctx.F
        v = _mat_vec(F, g, (1, 0, 0, 0))
        w = _mat_vec(F, g, (0, 1, 0, 0))
        nv = _normalize_line(F, v)
        return (nv, _plane_key(F, v, w))

    def completion(self, flag):
        """A symplectic matrix whose first two columns span the flag."""
        F = self.ctx.F
        v, (p1, p2) = flag
        w = p1 if _normalize_line(F, p1) != v else p2
        # adjust w so that the pair (v, w) is a basis of the plane
        if _normalize_line(F, w) == v:
            w = _vec_add(F, p1, p2)
        c4 = _solve_pairings(F, ((v, 1), (w, 0)))
        c3 = _solve_pairings(F, ((v, 0), (w, 1), (c4, 0)))
        g = tuple(tuple(col[i] for col in (v, w, c3, c4)) for i in range(4))
        return g

    def perm_of(self, g):
        F = self.ctx.F
        out = np.empty(len(self.flags), dtype=np.int64)
        for i, (v, (p1, p2)) in enumerate(self.flags):
            iv = _normalize_line(F, _mat_vec(F, g, v))
            key = _plane_key(F, _mat_vec(F, g, p1), _mat_vec(F, g, p2))
            out[i] = self.index[(iv, key)]
        return out

    def sigma_perm(self):
        """Permutation induced by the twisting endomorphism."""
        if self._sigma_perm is None:
            F, n = self.ctx.F, self.ctx.n
            out = np.empty(len(self.flags), dtype=np.int64)
            for i, flag in enumerate(self.flags):
                g = self.completion(flag)
                out[i] = self.index[self._flag_of(sigma(F, g, n))]
            self._sigma_perm = out
        return self._sigma_perm

    def fixed_count_inner(self, g):
        perm = self.perm_of(g)
        return int(np.count_nonzero(perm == np.arange(len(perm))))

    def fixed_count_outer(self, g):
        """Fixed flags of the twisted action: flag -> g . sigma(flag)."""
        comp = self.perm_of(g)[self.sigma_perm()]
        return int(np.count_nonzero(comp == np.arange(len(comp))))


def _all_vectors(q):
    for a in range(q):
        for b in range(q):
            for c in range(q):
                for d in range(q):
                    yield (a, b, c, d)


def _solve_pairings(F, constraints):
    """A vector x with prescribed form pairings against given vectors."""
    rows = [[v[3], v[2], v[1], v[0]] for v, _ in constraints]
    rhs = [t for _, t in constraints]
    # gaussian elimination on the underdetermined system rows . x = rhs
    aug = [row + [r] for row, r in zip(rows, rhs)]
    npiv = 0
    pivots = []
    for c in range(4):
        piv = None
        for i in range(npiv, len(aug)):
            if aug[i][c]:
                piv = i
                break
        if piv is None:
            continue
        aug[npiv], aug[piv] = aug[piv], aug[npiv]
        inv = F.inv(aug[npiv][c])
        aug[npiv] = [F.mul(inv, x) for x in aug[npiv]]
        for i in range(len(aug)):
            if i != npiv and aug[i][c]:
                f = aug[i][c]
                aug[i] = [F.add(aug[i][j], F.mul(f, aug[npiv][j])) for j in range(5)]
        pivots.append(c)
        npiv += 1
    for row in aug[npiv:]:
        if row[4] != 0:
            raise TableMismatch("inconsistent pairing system")
    x = [0, 0, 0, 0]
    for i, c in enumerate(pivots):
        x[c] = aug[i][4]
    return tuple(x)


@lru_cache(maxsize=None)
def flag_variety(n):
    if n != 1:
        raise ScaleExceeded("flag enumeration is limited to the smallest field")
    return FlagVariety(context(n))
