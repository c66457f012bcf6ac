import numpy as np
import pytest

from szchar import chevalley, groups
from szchar._backend import get_backend, mul_table
from szchar.chevalley import (
    IDENTITY,
    J,
    mat_inv,
    mat_mul,
    mat_order,
    mat_pow,
    sigma,
    torus,
    unipotent,
    x_a,
    x_ab,
    x_b,
    x_2ab,
)
from szchar.errors import ScaleExceeded, TableMismatch


def test_context_basics():
    ctx = groups.context(1)
    assert (ctx.q, ctx.theta, ctx.m) == (8, 2, 3)
    assert ctx.sz_order == 29120
    assert ctx.ambient_order == 1056706560
    assert ctx.borel_order == 200704
    assert ctx.e0_reps == [1, 2, 3]
    assert ctx.e1_reps == [1, 2, 4]
    assert ctx.e2_reps == [1]
    ctx2 = groups.context(2)
    assert ctx2.q == 32
    assert ctx2.sz_order == 32537600
    assert len(ctx2.e0_reps) == 15
    assert len(ctx2.e1_reps) == 10
    assert len(ctx2.e2_reps) == 6


def test_fixed_unipotents_are_fixed_and_multiply():
    for n in (1, 2):
        ctx = groups.context(n)
        F = ctx.F
        pairs = [(a, b) for a in range(5) for b in range(5)]
        if n == 1:
            pairs = [(a, b) for a in F.elements() for b in F.elements()]
        for a, b in pairs:
            s = groups.sz_unipotent(ctx, a, b)
            assert sigma(F, s, n) == s
            assert groups.sz_unipotent_coords(ctx, s) == (a, b)
        for a, b in pairs[:12]:
            for c, d in pairs[:12]:
                lhs = mat_mul(F, groups.sz_unipotent(ctx, a, b), groups.sz_unipotent(ctx, c, d))
                rhs = groups.sz_unipotent(
                    ctx,
                    F.add(a, c),
                    F.add(F.add(b, d), F.mul(a, F.pow(c, 2 * ctx.theta))),
                )
                assert lhs == rhs


def test_order4_square_is_the_involution_rep():
    for n in (1, 2):
        ctx = groups.context(n)
        rho = groups.sz_unipotent(ctx, 1, 0)
        sq = mat_mul(ctx.F, rho, rho)
        assert sq == groups.sz_unipotent(ctx, 0, 1)


def test_u4_side_splits_evenly():
    for n in (1, 2):
        ctx = groups.context(n)
        q = ctx.q
        assert groups.u4_side(ctx, 1, 0) == "u4a"
        sides = {"u4a": 0, "u4b": 0}
        for a in range(1, q):
            for b in ctx.F.elements():
                sides[groups.u4_side(ctx, a, b)] += 1
        assert sides["u4a"] == (q - 1) * q // 2
        assert sides["u4b"] == (q - 1) * q // 2
    ctx1 = groups.context(1)
    assert groups.u4_side(ctx1, 1, 1) == "u4b"


def test_classify_handles_inverse_pairs():
    ctx = groups.context(1)
    F = ctx.F
    rho = groups.sz_unipotent(ctx, 1, 0)
    assert groups.classify_sz_unipotent(ctx, rho) == "u4a"
    assert groups.classify_sz_unipotent(ctx, mat_inv(F, rho)) == "u4b"
    # conjugate out of the Borel subgroup and classify again
    g = mat_mul(F, mat_mul(F, J, rho), J)
    assert groups.classify_sz_unipotent(ctx, g) == "u4a"


def test_char_poly_matches_roots():
    ctx = groups.context(1)
    F, g = ctx.F, ctx.gamma
    h = torus(F, g, F.pow(g, 3))
    roots = (g, F.pow(g, 3), F.pow(g, -3), F.inv(g))
    assert groups.char_poly(F, h) == groups.poly_from_roots(F, roots)
    assert groups.classify_sz_element(ctx, h) == "t0:1"


def test_sz_class_data():
    cs = groups.sz_classes(1)
    assert len(cs) == 11
    assert [c.size for c in cs] == [1, 455, 1820, 1820, 4160, 4160, 4160, 2240, 2240, 2240, 5824]
    assert cs["t1:2"].order == 13
    assert cs["u4a"].order == 4
    cs2 = groups.sz_classes(2)
    assert len(cs2) == 35
    assert sum(c.size for c in cs2) == 32537600


def test_outer_class_data():
    cs = groups.outer_classes(1)
    assert len(cs) == 11
    sizes = {c.label: c.size for c in cs}
    assert sizes["out:id"] == 36288
    assert sizes["out:ua"] == 66044160
    assert sizes["out:uab"] == 16511040
    assert sizes["out:uaab"] == 66044160
    assert sizes["out:t0:1"] == 150958080
    assert sizes["out:t1:1"] == 81285120
    assert sizes["out:t2:1"] == 211341312
    orders = {c.label: c.order for c in cs}
    assert orders["out:id"] == 2
    assert orders["out:ua"] == 8
    assert orders["out:uab"] == 4
    assert orders["out:uaab"] == 8
    groups.outer_classes(2)


def test_outer_unipotent_rep_orders():
    ctx = groups.context(1)
    F = ctx.F
    for label, expected in (("out:id", 2), ("out:ua", 8), ("out:uab", 4), ("out:uaab", 8)):
        rep = groups.outer_classes(1)[label].rep
        sq = mat_mul(F, rep, sigma(F, rep, 1))
        assert 2 * mat_order(F, sq, cap=8) == expected


def test_b2_class_data():
    cs = groups.b2_classes(1)
    assert len(cs) == 83
    sizes = {c.label: c.size for c in cs}
    assert sizes["u2a"] == 4095
    assert sizes["u2b"] == 4095
    assert sizes["u2c"] == 257985
    assert sizes["u4a"] == 8255520
    assert sizes["u4b"] == 8255520
    assert sizes["sr1:1:2"] == 21565440
    assert sizes["sr2:1"] == 16773120
    assert sizes["sr3:1:1"] == 16773120
    assert sizes["sr4:1:2"] == 13045760
    assert sizes["sr5:1"] == 16257024
    assert sizes["sn1:1"] == 299520
    assert sizes["mx1:1"] == 18869760
    assert sizes["sn3:1"] == 232960
    assert sizes["mx3:1"] == 14676480
    fam_counts = {}
    for c in cs:
        fam_counts[c.family] = fam_counts.get(c.family, 0) + 1
    assert fam_counts["sr1"] == 3
    assert fam_counts["sr2"] == 12
    assert fam_counts["sr3"] == 12
    assert fam_counts["sr4"] == 6
    assert fam_counts["sr5"] == 16
    cs2 = groups.b2_classes(2)
    assert len(cs2) == 32**2 + 2 * 32 + 3


def test_sz_to_b2_fusion():
    fus = groups.sz_to_b2(1)
    b2 = groups.b2_classes(1)
    assert fus["id"] == "id"
    assert fus["u2"] == "u2c"
    assert fus["u4a"] == "u4b"
    assert fus["u4b"] == "u4b"
    assert fus["t0:1"] == "sr1:1:3"
    for lab, target in fus.items():
        assert target in b2.by_label
    images = [fus[f"t1:{j}"] for j in (1, 2, 4)] + [fus["t2:1"]]
    assert len(set(images)) == 4
    assert all(t.startswith("sr5:") for t in images)
    fus2 = groups.sz_to_b2(2)
    ctx2 = groups.context(2)
    b2_2 = groups.b2_classes(2)
    for lab, target in fus2.items():
        assert target in b2_2.by_label
    tor_images = [v for k, v in fus2.items() if k.startswith(("t1:", "t2:"))]
    assert len(set(tor_images)) == len(ctx2.e1_reps) + len(ctx2.e2_reps)


def test_fusion_preserves_characteristic_polynomials():
    # the order-(q-1) torus fusion must send each class to the ambient class
    # with the same eigenvalue multiset
    for n in (1, 2):
        ctx = groups.context(n)
        F = ctx.F
        fus = groups.sz_to_b2(n)
        b2 = groups.b2_classes(n)
        for i in ctx.e0_reps:
            target = b2[fus[f"t0:{i}"]]
            rep = groups.sz_classes(n)[f"t0:{i}"].rep
            assert groups.char_poly(F, rep) == groups.char_poly(F, target.rep)


def test_borel_class_mass_sums():
    for n in (1, 2):
        mass = groups.borel_class_mass(n)
        ctx = groups.context(n)
        assert sum(mass.values()) == ctx.borel_order
        b2 = groups.b2_classes(n)
        for lab in mass:
            assert lab in b2.by_label


def test_u0_group_structure():
    ctx = groups.context(1)
    u0 = groups.U0Group(ctx)
    F = ctx.F
    assert len(u0.elements) == 256
    rng = np.random.default_rng(5)
    picks = rng.integers(0, 256, size=40)
    for i in range(0, 40, 2):
        e1 = u0.elements[int(picks[i])]
        e2 = u0.elements[int(picks[i + 1])]
        assert u0.matrix(u0.mul(e1, e2)) == mat_mul(F, u0.matrix(e1), u0.matrix(e2))
        assert u0.mul(e1, u0.inv(e1)) == (0, 0, 0, 0)
        assert u0.matrix(u0.sigma(e1)) == sigma(F, u0.matrix(e1), 1)
        for k, l in ((0, 0), (0, 1), (1, 0), (1, 1)):
            prod = u0.mul(e1, e2)
            assert u0.lam_value(k, l, prod) == u0.lam_value(k, l, e1) * u0.lam_value(k, l, e2)


def test_u0_twisted_classes():
    ctx = groups.context(1)
    u0 = groups.U0Group(ctx)
    tw = u0.twisted_classes()
    assert len(tw) == 16
    assert all(len(orbit) == 16 for orbit in tw.values())
    assert sorted(tw) == sorted(
        ["tw:id"]
        + [f"tw:uab:{u}" for u in range(1, 8)]
        + [f"tw:ua:{u}" for u in range(8)]
    )
    lam = u0.lam_twisted(1)
    assert lam["tw:id"] == 1
    # the diagonal character separates the two halves of the ua family
    assert sum(1 for u in range(8) if lam[f"tw:ua:{u}"] == 1) == 4


def test_u0_twisted_classes_n2():
    ctx = groups.context(2)
    u0 = groups.U0Group(ctx)
    tw = u0.twisted_classes()
    assert len(tw) == 64
    assert all(len(orbit) == 64 for orbit in tw.values())


def test_enumerate_sz_matches_class_data():
    enum = groups.enumerate_sz(1)
    assert len(enum.keys) == 29120
    sizes = enum.class_sizes()
    assert len(sizes) == 11
    cents = sorted(29120 // s for s in sizes.values())
    assert cents == sorted([29120, 64, 16, 16, 7, 7, 7, 13, 13, 13, 5])
    # unipotent members: upper unitriangular matrices
    ctx = enum.ctx
    count_uni = 0
    for mat in enum.mats:
        if (
            mat[0][0] == mat[1][1] == mat[2][2] == mat[3][3] == 1
            and not mat[1][0]
            and not mat[2][0]
            and not mat[2][1]
            and not mat[3][0]
            and not mat[3][1]
            and not mat[3][2]
        ):
            count_uni += 1
    assert count_uni == 64


def test_enumerate_sz_class_membership():
    enum = groups.enumerate_sz(1)
    ctx = enum.ctx
    F = ctx.F
    assert enum.class_label_of(IDENTITY) == "id"
    assert enum.class_label_of(groups.sz_unipotent(ctx, 0, 1)) == "u2"
    assert enum.class_label_of(groups.sz_unipotent(ctx, 1, 0)) == "u4a"
    assert enum.class_label_of(groups.sz_unipotent(ctx, 1, 1)) == "u4b"
    for i in (1, 2, 3):
        rep = torus(F, F.pow(ctx.gamma, i), F.pow(ctx.gamma, 3 * i % 7))
        assert enum.class_label_of(rep) == f"t0:{i}"
    assert enum.class_label_of(J).startswith("u")
    # classification is constant on enumerated classes
    rng = np.random.default_rng(11)
    for cid in range(11):
        members = np.nonzero(enum.class_ids == cid)[0]
        for idx in rng.choice(members, size=min(3, len(members)), replace=False):
            mat = tuple(tuple(int(x) for x in row) for row in enum.mats[int(idx)])
            assert groups.classify_sz_element(ctx, mat) == enum.labels[cid]


def test_enumerate_sz_rejects_large_fields():
    with pytest.raises(ScaleExceeded):
        groups.enumerate_sz(2)


def test_enumerate_borel():
    be = groups.enumerate_borel(1)
    assert len(be.keys) == 200704
    ctx = be.ctx
    F = ctx.F
    rng = np.random.default_rng(3)
    idx = rng.integers(0, len(be.keys), size=25)
    for i in idx:
        mat = tuple(tuple(int(x) for x in row) for row in be.mats[int(i)])
        assert sigma(F, mat_inv(F, mat), 1) == tuple(
            tuple(int(x) for x in row) for row in be.sigma_inv_mats[int(i)]
        )
        assert mat_inv(F, mat) == tuple(tuple(int(x) for x in row) for row in be.inv_mats[int(i)])
    assert len(be.u0_keys) == 256
    assert np.all(np.isin(be.u0_keys, be.keys))


def test_borel_twisted_partition():
    class_ids, label_to_id = groups.borel_twisted_partition(1)
    assert len(label_to_id) == 10
    counts = np.bincount(class_ids)
    sizes = sorted(int(counts[cid]) for cid in label_to_id.values())
    assert sizes == sorted([448, 12544, 3136, 12544] + [28672] * 6)


def test_borel_inner_classification_matches_mass():
    be = groups.enumerate_borel(1)
    ctx = be.ctx
    tally = {}
    for mat in be.mats:
        g = tuple(tuple(int(x) for x in row) for row in mat)
        lab = groups.classify_borel_element(ctx, g)
        tally[lab] = tally.get(lab, 0) + 1
    assert tally == groups.borel_class_mass(1)


def test_batch_helpers_match_scalar():
    ctx = groups.context(1)
    F = ctx.F
    MUL = mul_table(F)
    be = groups.enumerate_borel(1)
    rng = np.random.default_rng(9)
    idx = rng.integers(0, len(be.keys), size=30)
    sample = np.ascontiguousarray(be.mats[idx])
    alpha_batch = groups.batch_alpha(MUL, sample)
    sigma_batch = groups.batch_sigma(ctx, MUL, sample)
    inv_batch = groups.batch_inv(sample)
    for i in range(len(idx)):
        g = tuple(tuple(int(x) for x in row) for row in sample[i])
        assert chevalley.alpha(F, g) == tuple(tuple(int(x) for x in row) for row in alpha_batch[i])
        assert sigma(F, g, 1) == tuple(tuple(int(x) for x in row) for row in sigma_batch[i])
        assert mat_inv(F, g) == tuple(tuple(int(x) for x in row) for row in inv_batch[i])


def test_flag_variety_counts():
    fv = groups.flag_variety(1)
    assert len(fv.flags) == 5265
    assert fv.fixed_count_inner(IDENTITY) == 5265
    assert fv.fixed_count_outer(IDENTITY) == 65


def test_flag_variety_outer_values():
    fv = groups.flag_variety(1)
    outer = groups.outer_classes(1)
    ctx = groups.context(1)
    expected = {
        "out:id": 65,
        "out:ua": 1,
        "out:uab": 1,
        "out:uaab": 1,
        "out:t0:1": 2,
        "out:t0:2": 2,
        "out:t0:3": 2,
    }
    for label, want in expected.items():
        assert fv.fixed_count_outer(outer[label].rep) == want


def test_flag_completion_symplectic():
    fv = groups.flag_variety(1)
    ctx = groups.context(1)
    rng = np.random.default_rng(7)
    for i in rng.integers(0, 5265, size=20):
        g = fv.completion(fv.flags[int(i)])
        assert chevalley.is_symplectic(ctx.F, g)


def test_orbit_reps():
    assert groups.orbit_reps(13, (12, 8)) == [1, 2, 4]
    assert groups.orbit_reps(5, (4, 3)) == [1]
    assert groups.orbit_reps(7, (6,)) == [1, 2, 3]
    assert groups.orbit_rep(65, (64, 8), 60) == 5
    assert groups.split_pair_label(8, 5, 3) == (2, 3)
