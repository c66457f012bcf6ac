"""Reflection-group data, series combinations, root attachments, and the
Fourier transform of the cuspidal family."""

from fractions import Fraction
from functools import lru_cache

from .chartab import scalar_product, sz_table
from .cyclotomic import ONE, ZERO, Cyclo
from .errors import DerivationMismatch, SignRuleInconclusive, TableMismatch
from .groups import context
from .shintani import cuspidal_pair, unipotent_descents

# ---------------------------------------------------------------------------
# the dihedral reflection group and its halving automorphism


def _mm(a, b):
    """2x2 integer matrix product."""
    return (
        (
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ),
        (
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ),
    )


_H = ((1, 1), (1, -1))


class WeylData:
    """The dihedral group of order 8 as signed permutation matrices, with
    the automorphism swapping its two generators and the preferred
    extensions of the three characters fixed by it."""

    def __init__(self):
        s = ((1, 0), (0, -1))
        t = ((0, 1), (1, 0))
        eye = ((1, 0), (0, 1))
        elements = {eye}
        frontier = [eye]
        while frontier:
            w = frontier.pop()
            for g in (s, t):
                nxt = _mm(w, g)
                if nxt not in elements:
                    elements.add(nxt)
                    frontier.append(nxt)
        if len(elements) != 8:
            raise TableMismatch(f"reflection group has {len(elements)} elements")
        self.s, self.t, self.eye = s, t, eye
        self.elements = sorted(elements)
        if self.auto(s) != t or self.auto(t) != s:
            raise TableMismatch("the halving automorphism must swap the generators")
        for w in self.elements:
            if self.auto(self.auto(w)) != w:
                raise TableMismatch("the halving automorphism must be an involution")
        self.twisted_classes = self._twisted_classes()
        sizes = sorted(len(orbit) for orbit in self.twisted_classes.values())
        if sizes != [2, 2, 4]:
            raise TableMismatch(f"twisted class sizes {sizes}")
        self._check_intertwiner()

    def auto(self, w):
        """Conjugate of w by the normalized Hadamard matrix."""
        hw = _mm(_mm(_H, w), _H)
        if any(v % 2 for row in hw for v in row):
            raise TableMismatch("automorphism image is not integral")
        return tuple(tuple(v // 2 for v in row) for row in hw)

    def _twisted_classes(self):
        seen = set()
        orbits = {}
        for w in self.elements:
            if w in seen:
                continue
            orbit = {w}
            frontier = [w]
            while frontier:
                u = frontier.pop()
                for v in self.elements:
                    nxt = _mm(_mm(v, u), self._inv(self.auto(v)))
                    if nxt not in orbit:
                        orbit.add(nxt)
                        frontier.append(nxt)
            for u in orbit:
                seen.add(u)
            orbits[w] = sorted(orbit)
        return orbits

    @staticmethod
    def _inv(w):
        det = w[0][0] * w[1][1] - w[0][1] * w[1][0]
        if det not in (1, -1):
            raise TableMismatch("element is not invertible over the integers")
        return (
            (w[1][1] * det, -w[0][1] * det),
            (-w[1][0] * det, w[0][0] * det),
        )

    def _check_intertwiner(self):
        """The extension operator must intertwine the natural action with
        its twist by the automorphism, and square to the identity."""
        for v in (self.s, self.t):
            lhs = _mm(v, _H)
            rhs = _mm(_H, self.auto(v))
            if lhs != rhs:
                raise TableMismatch("extension operator fails to intertwine")
        if _mm(_H, _H) != ((2, 0), (0, 2)):
            raise TableMismatch("extension operator does not square to a scalar")

    def twisted_class_of(self, w):
        for rep, orbit in self.twisted_classes.items():
            if w in orbit:
                return rep
        raise TableMismatch("element missing from the twisted partition")

    # -- the three characters fixed by the automorphism and their extensions

    @staticmethod
    def char_triv(w):
        return ONE

    @staticmethod
    def char_sign(w):
        det = w[0][0] * w[1][1] - w[0][1] * w[1][0]
        return Cyclo.rational(det)

    @staticmethod
    def char_refl(w):
        return Cyclo.rational(w[0][0] + w[1][1])

    @staticmethod
    def ext_triv(w):
        return ONE

    @staticmethod
    def ext_sign(w):
        return WeylData.char_sign(w)

    @staticmethod
    def ext_refl(w):
        """Trace of w against -H/sqrt(2), the preferred extension operator."""
        wh = _mm(w, _H)
        return Cyclo.rational(-(wh[0][0] + wh[1][1])) * (Cyclo.sqrt2() * Fraction(1, 2))


@lru_cache(maxsize=None)
def weyl_data():
    return WeylData()


# ---------------------------------------------------------------------------
# series combinations


@lru_cache(maxsize=None)
def dl_characters(n):
    """The three series combinations indexed by the twisted classes, as
    explicit virtual combinations of irreducible rows."""
    ctx = context(n)
    sz = sz_table(n)
    triv = sz.row("triv")
    st = sz.row("st")
    w_lab, wbar_lab = cuspidal_pair(n)
    w_row = sz.row(w_lab)
    wbar_row = sz.row(wbar_lab)
    combos = {
        "1": triv + st,
        "wa": triv - w_row - wbar_row - st,
        "wawbwa": triv + w_row + wbar_row - st,
    }
    q, m1, m2 = ctx.q, ctx.m1, ctx.m2
    expected_norm = {"1": 2, "wa": 4, "wawbwa": 4}
    expected_degree = {"1": 1 + q**2, "wa": -(q - 1) * m1, "wawbwa": -(q - 1) * m2}
    for key, combo in combos.items():
        if scalar_product(combo, combo) != Cyclo.rational(expected_norm[key]):
            raise TableMismatch(f"series combination {key} has the wrong norm")
        if combo("id") != Cyclo.rational(expected_degree[key]):
            raise TableMismatch(f"series combination {key} has the wrong degree")
    for a, b in (("1", "wa"), ("1", "wawbwa"), ("wa", "wawbwa")):
        if not scalar_product(combos[a], combos[b]).is_zero():
            raise TableMismatch(f"series combinations {a} and {b} are not orthogonal")
    szc = sz_table(n).domain
    four = Cyclo.rational(4)
    two = Cyclo.rational(2)
    for c in szc:
        if c.family == "t0":
            checks = ((combos["1"], two), (combos["wa"], ZERO), (combos["wawbwa"], ZERO))
        elif c.family == "t1":
            checks = ((combos["1"], ZERO), (combos["wa"], ZERO), (combos["wawbwa"], four))
        elif c.family == "t2":
            checks = ((combos["1"], ZERO), (combos["wa"], four), (combos["wawbwa"], ZERO))
        else:
            continue
        for combo, want in checks:
            if combo(c.label) != want:
                raise TableMismatch(f"series value at {c.label}")
    return combos


@lru_cache(maxsize=None)
def almost_characters(n):
    """Average the series combinations against the extended characters."""
    wd = weyl_data()
    combos = dl_characters(n)
    class_key = {}
    for rep, orbit in wd.twisted_classes.items():
        for w in orbit:
            class_key[w] = rep
    # name the orbits by membership: the identity orbit, the generator orbit,
    # and the orbit of the length-three element
    combo_of = {}
    for rep, orbit in wd.twisted_classes.items():
        if wd.eye in orbit:
            combo_of[rep] = combos["1"]
        elif wd.s in orbit:
            combo_of[rep] = combos["wa"]
        else:
            combo_of[rep] = combos["wawbwa"]
    eighth = Fraction(1, 8)
    out = {}
    for name, ext in (
        ("triv", wd.ext_triv),
        ("sign", wd.ext_sign),
        ("refl", wd.ext_refl),
    ):
        acc = None
        for w in wd.elements:
            term = combo_of[class_key[w]] * (ext(w) * eighth)
            acc = term if acc is None else acc + term
        out[name] = acc
    sz = sz_table(n)
    w_lab, wbar_lab = cuspidal_pair(n)
    half_rt2 = Cyclo.sqrt2() * Fraction(1, 2)
    if out["triv"] != sz.row("triv"):
        raise TableMismatch("almost character of the trivial class is wrong")
    if out["sign"] != sz.row("st"):
        raise TableMismatch("almost character of the sign class is wrong")
    if out["refl"] != (sz.row(w_lab) + sz.row(wbar_lab)) * half_rt2:
        raise TableMismatch("almost character of the reflection class is wrong")
    for a in out.values():
        for b in out.values():
            want = ONE if a is b else ZERO
            if scalar_product(a, b) != want:
                raise TableMismatch("almost characters are not orthonormal")
    return out


# ---------------------------------------------------------------------------
# roots attached to the unipotent-family irreducibles


@lru_cache(maxsize=None)
def roots_of_unity(n):
    """Eighth roots attached to the four irreducibles in the unipotent family.

    The cuspidal ones are read off the descent coefficient: sqrt(2) times
    the coefficient must be one of the four primitive eighth roots, and the
    attached root is the value itself when its real part is negative and
    minus the value otherwise.
    """
    sz = sz_table(n)
    sh = unipotent_descents(n)
    w_lab, wbar_lab = cuspidal_pair(n)
    zeta0 = Cyclo.zeta(8, 5)
    allowed = (zeta0, zeta0.conjugate())
    flipped = (-zeta0, -zeta0.conjugate())
    roots = {"triv": ONE, "st": ONE}
    for lab in (w_lab, wbar_lab):
        val = Cyclo.sqrt2() * scalar_product(sz.row(lab), sh["ext_prin"])
        if val in allowed:
            roots[lab] = val
        elif val in flipped:
            roots[lab] = -val
        else:
            raise SignRuleInconclusive(
                f"normalized coefficient {val} is not a primitive eighth root"
            )
    if {roots[w_lab], roots[wbar_lab]} != set(allowed):
        raise TableMismatch("cuspidal roots do not form a conjugate pair")
    return roots


def root_name(value):
    """Short display name of an eighth root of unity."""
    if value == ONE:
        return "1"
    for e in range(1, 8):
        if value == Cyclo.zeta(8, e):
            return f"zeta8^{e}"
    raise TableMismatch(f"{value!r} is not an eighth root of unity")


# ---------------------------------------------------------------------------
# the descent identities for the almost characters


def verify_digne_michel(n):
    """Certify that descent sends each extension to the matching almost
    character scaled by the attached roots, resolving the sign left free
    on the reflection class."""
    sz = sz_table(n)
    sh = unipotent_descents(n)
    almost = almost_characters(n)
    roots = roots_of_unity(n)
    w_lab, wbar_lab = cuspidal_pair(n)
    basis = ("triv", "st", w_lab, wbar_lab)
    failures = []
    checked = 0

    def ck(cond, what):
        nonlocal checked
        checked += 1
        if not cond:
            failures.append(what)

    for ext, key in (("ext_triv", "triv"), ("ext_st", "sign")):
        for v in basis:
            lhs = scalar_product(sz.row(v), sh[ext])
            rhs = scalar_product(sz.row(v), almost[key]) * roots[v]
            ck(lhs == rhs, f"{ext} identity at {v}")
    sign = None
    for candidate in (1, -1):
        good = all(
            scalar_product(sz.row(v), sh["ext_prin"] * candidate)
            == scalar_product(sz.row(v), almost["refl"]) * roots[v]
            for v in basis
        )
        if good:
            sign = candidate
            break
    ck(sign is not None, "no sign matches the reflection-class identity")
    if sign is not None:
        checked += len(basis)
    combos = dl_characters(n)
    report = {
        "checked": checked,
        "failures": failures,
        "ok": not failures,
        "sign": sign,
        "open": {
            "wa_degree": str(combos["wa"]("id")),
            "note": "evaluated degree of the wa series; no closed form is committed here",
        },
    }
    return report


# ---------------------------------------------------------------------------
# the Fourier transform of the cuspidal family


def _is_involution(rows):
    for i in range(2):
        for j in range(2):
            entry = sum((rows[i][k] * rows[k][j] for k in range(2)), ZERO)
            if entry != (ONE if i == j else ZERO):
                return False
    return True


@lru_cache(maxsize=None)
def _fourier_derivation(n):
    """Derive the cuspidal Fourier block and the quarter-turn scaling that
    makes it an involution; the scaling flips with the parity of n."""
    sz = sz_table(n)
    sh = unipotent_descents(n)
    roots = roots_of_unity(n)
    w_lab, wbar_lab = cuspidal_pair(n)
    eye = Cyclo.imaginary_unit()
    cols = (w_lab, wbar_lab)
    row1 = tuple(
        scalar_product(sz.row(v), sh["ext_prin"]) / (-roots[v]) for v in cols
    )
    for u_name, u in (("i", eye), ("-i", -eye)):
        row2 = tuple(
            u * scalar_product(sz.row(v), sh["ext_cusp"]) / (-roots[v]) for v in cols
        )
        rows = (row1, row2)
        if _is_involution(rows):
            break
    else:
        raise DerivationMismatch("no quarter-turn scaling yields an involution")
    half_rt2 = Cyclo.sqrt2() * Fraction(1, 2)
    frozen = ((half_rt2, half_rt2), (half_rt2, -half_rt2))
    if rows != frozen:
        raise DerivationMismatch(f"derived Fourier matrix {rows}")
    return rows, u_name


def fourier_matrix(n=1):
    """Fourier transform of the two-element cuspidal family, derived from
    the descent coefficients of the two Weil-type extensions."""
    return _fourier_derivation(n)[0]


def family_data(n=1):
    """Families, attached roots, and Fourier blocks in serializable form."""
    roots = roots_of_unity(n)
    w_lab, wbar_lab = cuspidal_pair(n)
    m, u_name = _fourier_derivation(n)
    return {
        "families": [["triv"], ["st"], [w_lab, wbar_lab]],
        "roots": {k: root_name(v) for k, v in sorted(roots.items())},
        "fourier": {
            "singleton": [[Cyclo.rational(1).to_dict()]],
            "cuspidal": [[v.to_dict() for v in row] for row in m],
        },
        "normalization": (
            "first row scaled by 1, second row by "
            f"{u_name}; scalings chosen so the block is an involution"
        ),
    }
