import numpy as np
import pytest

from corpus import (
    a3_in_s3_cm,
    a3_s3_tcm,
    extension_tcm_a3_s3_z4,
    extension_tcm_z2_z4_z8,
    mixed_product_tcm,
    s3_commutator_tcm,
    z2_module_cm,
    z2_module_tcm,
)
from gerbe import formulas
from gerbe.cocycles import (
    AbelianObstruction,
    Bundle1Cocycle,
    Coboundary1,
    Coboundary2,
    Gerbe2Cocycle,
    TcmCoboundary2,
    TcmGerbe2Cocycle,
    TwoGerbe3Cocycle,
    apply_coboundary,
    change_structure,
    constant_bundle1,
    constant_cocycle,
    constant_gerbe2,
    constant_two_gerbe3,
    inverse,
    product,
    pullback,
    verify,
)
from gerbe.crossed import CrossedModuleMorphism, TwoCrossedModuleMorphism
from gerbe.groups import GroupHom, cyclic, identity_hom, image, symmetric
from gerbe.nerves import hexagon, hexagon_to_triangle, simplex_boundary, triangle
from gerbe.report import InvariantViolation, StructuralError, UnsupportedOperation
from gerbe.standard import conjugation_cm, group_cm, module_cm

# -- deterministic samplers: gauge images of constant cocycles ----------------


def random_coboundary1(cm, nerve, rng):
    return Coboundary1(
        cm, nerve, {t: int(rng.integers(cm.L.order)) for t in nerve.tuples(1)}
    )


def random_coboundary2(cm, nerve, rng):
    return Coboundary2(
        cm,
        nerve,
        {t: int(rng.integers(cm.M.order)) for t in nerve.tuples(1)},
        {t: int(rng.integers(cm.L.order)) for t in nerve.tuples(2)},
    )


def random_tcm_coboundary(t, nerve, rng):
    return TcmCoboundary2(
        t,
        nerve,
        {v: int(rng.integers(t.M.order)) for v in nerve.tuples(1)},
        {v: int(rng.integers(t.L.order)) for v in nerve.tuples(2)},
    )


def sample_bundle1(cm, nerve, rng):
    base = constant_bundle1(cm, nerve, int(rng.integers(cm.M.order)))
    return apply_coboundary(base, random_coboundary1(cm, nerve, rng))


def sample_gerbe2(cm, nerve, rng):
    values = image(cm.d1).elements
    base = constant_gerbe2(cm, nerve, int(rng.choice(values)))
    return apply_coboundary(base, random_coboundary2(cm, nerve, rng))


def sample_tcm_gerbe2(t, nerve, rng):
    base = constant_cocycle(t, nerve, int(rng.integers(t.N.order)))
    return apply_coboundary(base, random_tcm_coboundary(t, nerve, rng))


# -- constants and trivial cocycles -------------------------------------------


@pytest.mark.parametrize("nerve", [triangle(), simplex_boundary(2), hexagon()])
def test_trivial_cocycles_are_valid(nerve):
    cm = a3_in_s3_cm()
    t = extension_tcm_a3_s3_z4()
    for c in [
        Bundle1Cocycle.trivial(cm, nerve),
        Gerbe2Cocycle.trivial(cm, nerve),
        TcmGerbe2Cocycle.trivial(t, nerve),
        TwoGerbe3Cocycle.trivial(t, nerve),
        AbelianObstruction.trivial(cyclic(4), nerve),
    ]:
        assert verify(c).valid


def test_constant_bundle1_is_valid_for_every_value():
    cm = a3_in_s3_cm()
    nv = triangle()
    for v in range(cm.M.order):
        assert verify(constant_bundle1(cm, nv, v)).valid


def test_constant_cocycle_every_n_value_is_valid():
    t = extension_tcm_a3_s3_z4()
    nv = triangle()
    for v in range(t.N.order):
        c = constant_cocycle(t, nv, v)
        assert verify(c).valid
        assert c.n[(0,)] == v


def test_constant_gerbe2_requires_boundary_image():
    cm = a3_in_s3_cm()
    nv = triangle()
    im = set(image(cm.d1).elements)
    for v in range(cm.M.order):
        if v in im:
            assert verify(constant_gerbe2(cm, nv, v)).valid
        else:
            with pytest.raises(StructuralError):
                constant_gerbe2(cm, nv, v)


def test_constant_two_gerbe3_lifts_through_d2():
    t = extension_tcm_a3_s3_z4()
    nv = simplex_boundary(2)
    c = constant_two_gerbe3(t, nv, 2)
    assert verify(c).valid
    assert c.m[0, 1, 2] != t.M.identity
    with pytest.raises(StructuralError):
        constant_two_gerbe3(t, nv, 1)  # 1 is not a d2 image


# -- samplers produce valid cocycles (gauge invariance of the laws) -----------


@pytest.mark.parametrize("cm", [a3_in_s3_cm(), conjugation_cm(symmetric(3))])
def test_bundle1_gauge_images_are_valid(cm):
    rng = np.random.default_rng(11)
    nv = triangle()
    for _ in range(8):
        assert verify(sample_bundle1(cm, nv, rng)).valid


@pytest.mark.parametrize("cm", [a3_in_s3_cm(), conjugation_cm(symmetric(3))])
def test_gerbe2_gauge_images_are_valid(cm):
    rng = np.random.default_rng(12)
    nv = triangle()
    for _ in range(8):
        assert verify(sample_gerbe2(cm, nv, rng)).valid


@pytest.mark.parametrize(
    "t",
    [s3_commutator_tcm(), a3_s3_tcm(), extension_tcm_a3_s3_z4(), mixed_product_tcm()],
    ids=["commutator", "inclusion", "extension", "mixed"],
)
def test_tcm_gerbe2_gauge_images_are_valid(t):
    rng = np.random.default_rng(13)
    nv = triangle()
    for _ in range(8):
        assert verify(sample_tcm_gerbe2(t, nv, rng)).valid


def test_gauge_cannot_repair_broken_cocycle():
    # the gauge action preserves invalidity, and apply_coboundary refuses
    # to hand back the still-broken result
    cm = conjugation_cm(symmetric(3))
    nv = triangle()
    rng = np.random.default_rng(14)
    c = sample_bundle1(cm, nv, rng)
    broken = Bundle1Cocycle(cm, nv, c.m, {**c.l, (0, 1): cm.L.mul(c.l[0, 1], 1)})
    assert not verify(broken).valid
    with pytest.raises(InvariantViolation):
        apply_coboundary(broken, random_coboundary1(cm, nv, rng))


# -- degree-1 product: formula adjudication ------------------------------------


def test_bundle1_product_closes_for_all_sample_pairs():
    cm = conjugation_cm(symmetric(3))
    nv = triangle()
    rng = np.random.default_rng(21)
    cs = [sample_bundle1(cm, nv, rng) for _ in range(6)]
    for c1 in cs:
        for c2 in cs:
            assert verify(product(c1, c2)).valid


def test_bundle1_product_printed_exponent_fails_closure():
    """With the first-index exponent the boundary law breaks as soon as the
    coboundary image is nonabelian; the second-index exponent always closes.
    A raise here also proves the two forms produce different data, since the
    corrected form closes on every pair."""
    cm = conjugation_cm(symmetric(3))
    nv = triangle()
    rng = np.random.default_rng(22)
    cs = [sample_bundle1(cm, nv, rng) for _ in range(6)]
    bad = 0
    for c1 in cs:
        for c2 in cs:
            product(c1, c2)
            try:
                with formulas.variant("bundle1_product", "printed"):
                    product(c1, c2)
            except InvariantViolation:
                bad += 1
    assert bad > 0


def test_bundle1_product_forms_agree_when_boundary_image_is_abelian():
    cm = a3_in_s3_cm()
    nv = triangle()
    rng = np.random.default_rng(23)
    for _ in range(5):
        c1, c2 = sample_bundle1(cm, nv, rng), sample_bundle1(cm, nv, rng)
        with formulas.variant("bundle1_product", "printed"):
            p_printed = product(c1, c2)
        assert p_printed == product(c1, c2)


def test_bundle1_inverse_is_exact():
    cm = conjugation_cm(symmetric(3))
    nv = triangle()
    rng = np.random.default_rng(24)
    e = Bundle1Cocycle.trivial(cm, nv)
    for _ in range(6):
        c = sample_bundle1(cm, nv, rng)
        inv = inverse(c)
        assert verify(inv).valid
        assert product(c, inv) == e
        assert product(inv, c) == e


# -- 2-crossed degree-2 product: formula adjudication ---------------------------


@pytest.mark.parametrize(
    "t",
    [s3_commutator_tcm(), a3_s3_tcm(), extension_tcm_a3_s3_z4(), mixed_product_tcm()],
    ids=["commutator", "inclusion", "extension", "mixed"],
)
def test_tcm_product_corrected_closes_for_all_sample_pairs(t):
    nv = triangle()
    rng = np.random.default_rng(31)
    cs = [sample_tcm_gerbe2(t, nv, rng) for _ in range(5)]
    for c1 in cs:
        for c2 in cs:
            p = product(c1, c2)
            assert verify(p).valid


def test_tcm_product_printed_form_fails_closure():
    """The printed final factor ^(n_i) l~ has the wrong d1-image whenever the
    derived action of m_ik differs from the d2-twist; commutator structures
    on S3 witness this.  The corrected form closes on every pair, so each
    raise under the printed variant proves the two forms differ."""
    t = s3_commutator_tcm()
    nv = triangle()
    rng = np.random.default_rng(32)
    cs = [sample_tcm_gerbe2(t, nv, rng) for _ in range(5)]
    bad = 0
    for c1 in cs:
        for c2 in cs:
            product(c1, c2)
            try:
                with formulas.variant("tcm_product", "printed"):
                    product(c1, c2)
            except InvariantViolation:
                bad += 1
    assert bad > 0


def test_tcm_product_forms_agree_on_abelian_chain():
    t = extension_tcm_z2_z4_z8()
    nv = triangle()
    rng = np.random.default_rng(33)
    for _ in range(5):
        c1, c2 = sample_tcm_gerbe2(t, nv, rng), sample_tcm_gerbe2(t, nv, rng)
        with formulas.variant("tcm_product", "printed"):
            p_printed = product(c1, c2)
        assert p_printed == product(c1, c2)


def test_tcm_product_trivial_factor_is_neutral():
    t = extension_tcm_a3_s3_z4()
    nv = triangle()
    rng = np.random.default_rng(34)
    e = TcmGerbe2Cocycle.trivial(t, nv)
    for _ in range(4):
        c = sample_tcm_gerbe2(t, nv, rng)
        assert product(c, e) == c
        assert product(e, c) == c


@pytest.mark.parametrize(
    "t",
    [s3_commutator_tcm(), a3_s3_tcm(), extension_tcm_a3_s3_z4(), mixed_product_tcm()],
    ids=["commutator", "inclusion", "extension", "mixed"],
)
def test_tcm_inverse_derived_form_is_exact(t):
    nv = triangle()
    rng = np.random.default_rng(35)
    e = TcmGerbe2Cocycle.trivial(t, nv)
    for _ in range(5):
        c = sample_tcm_gerbe2(t, nv, rng)
        inv = inverse(c)
        assert verify(inv).valid
        assert product(c, inv) == e


def test_tcm_inverse_printed_form_fails_validity():
    t = s3_commutator_tcm()
    nv = triangle()
    rng = np.random.default_rng(36)
    bad = 0
    for _ in range(6):
        c = sample_tcm_gerbe2(t, nv, rng)
        try:
            with formulas.variant("tcm_inverse", "printed"):
                inverse(c)
        except InvariantViolation:
            bad += 1
    assert bad > 0


def test_tcm_inverse_forms_agree_on_abelian_chain():
    t = extension_tcm_z2_z4_z8()
    nv = triangle()
    rng = np.random.default_rng(37)
    for _ in range(5):
        c = sample_tcm_gerbe2(t, nv, rng)
        with formulas.variant("tcm_inverse", "printed"):
            inv_printed = inverse(c)
        assert inv_printed == inverse(c)


def test_formula_defaults_are_the_adjudicated_winners():
    assert formulas.DEFAULTS == {
        "axiom_v": "standard",
        "bundle1_product": "corrected",
        "tcm_product": "corrected",
        "tcm_inverse": "derived",
    }


# -- abelian-reducible products -------------------------------------------------


def test_gerbe2_product_pointwise_when_m_trivial():
    cm = module_cm(cyclic(4))
    nv = simplex_boundary(2)
    rng = np.random.default_rng(41)
    c1, c2 = sample_gerbe2(cm, nv, rng), sample_gerbe2(cm, nv, rng)
    p = product(c1, c2)
    assert verify(p).valid
    assert p.l[0, 1, 2] == (c1.l[0, 1, 2] + c2.l[0, 1, 2]) % 4
    inv = inverse(c1)
    assert product(c1, inv) == Gerbe2Cocycle.trivial(cm, nv)


def test_gerbe2_product_rejected_for_nonabelian_structure():
    cm = a3_in_s3_cm()
    nv = triangle()
    c = Gerbe2Cocycle.trivial(cm, nv)
    with pytest.raises(UnsupportedOperation):
        product(c, c)
    with pytest.raises(UnsupportedOperation):
        inverse(c)


def test_two_gerbe3_product_pointwise_when_m_and_n_trivial():
    t = z2_module_tcm()
    nv = simplex_boundary(3)
    rng = np.random.default_rng(43)
    chain = {v: int(rng.integers(2)) for v in nv.tuples(3)}
    trivial = TwoGerbe3Cocycle.trivial(t, nv)
    data = {}
    for (i, j, k, l) in nv.tuples(4):
        data[i, j, k, l] = (
            chain[i, j, k] + chain[i, k, l] - chain[j, k, l] - chain[i, j, l]
        ) % 2
    c = TwoGerbe3Cocycle(t, nv, trivial.n, trivial.m, data)
    assert verify(c).valid
    assert any(v for v in data.values())
    p = product(c, c)
    assert verify(p).valid
    assert all(v == 0 for v in p.l.values())  # Z2: squares vanish
    assert inverse(c) == c
    with pytest.raises(UnsupportedOperation):
        product(
            TwoGerbe3Cocycle.trivial(a3_s3_tcm(), nv),
            TwoGerbe3Cocycle.trivial(a3_s3_tcm(), nv),
        )


def test_obstruction_cocycles_from_trivialisation_data():
    A = cyclic(6)
    nv = simplex_boundary(3)
    rng = np.random.default_rng(42)
    chain = {t: int(rng.integers(6)) for t in nv.tuples(3)}
    a = {}
    for (i, j, k, l) in nv.tuples(4):
        a[i, j, k, l] = (
            chain[i, j, k] + chain[i, k, l] - chain[j, k, l] - chain[i, j, l]
        ) % 6
    c = AbelianObstruction(A, nv, a)
    assert verify(c).valid
    assert verify(product(c, inverse(c))).valid
    assert product(c, inverse(c)) == AbelianObstruction.trivial(A, nv)
    broken = dict(a)
    broken[0, 1, 2, 3] = (broken[0, 1, 2, 3] + 1) % 6
    report = verify(AbelianObstruction(A, nv, broken))
    assert not report.valid
    assert report.failures[0].law == "cocycle"


# -- coboundaries ---------------------------------------------------------------


def test_identity_coboundaries_act_trivially():
    cm = conjugation_cm(symmetric(3))
    t = extension_tcm_a3_s3_z4()
    nv = triangle()
    rng = np.random.default_rng(51)
    b = sample_bundle1(cm, nv, rng)
    g = sample_gerbe2(cm, nv, rng)
    c = sample_tcm_gerbe2(t, nv, rng)
    eL, eM = cm.L.identity, cm.M.identity
    assert apply_coboundary(b, Coboundary1(cm, nv, {v: eL for v in nv.tuples(1)})) == b
    w2 = Coboundary2(
        cm,
        nv,
        {v: eM for v in nv.tuples(1)},
        {v: eL for v in nv.tuples(2)},
    )
    assert apply_coboundary(g, w2) == g
    wt = TcmCoboundary2(
        t,
        nv,
        {v: t.M.identity for v in nv.tuples(1)},
        {v: t.L.identity for v in nv.tuples(2)},
    )
    assert apply_coboundary(c, wt) == c


def test_gerbe2_gauge_preserves_validity_nonabelian():
    cm = conjugation_cm(symmetric(3))
    nv = simplex_boundary(2)
    rng = np.random.default_rng(52)
    for _ in range(6):
        c = sample_gerbe2(cm, nv, rng)
        moved = apply_coboundary(c, random_coboundary2(cm, nv, rng))
        assert verify(moved).valid


def test_tcm_gauge_preserves_validity():
    t = extension_tcm_a3_s3_z4()
    nv = simplex_boundary(2)
    rng = np.random.default_rng(53)
    for _ in range(6):
        c = sample_tcm_gerbe2(t, nv, rng)
        moved = apply_coboundary(c, random_tcm_coboundary(t, nv, rng))
        assert verify(moved).valid


def test_coboundary_mismatch_is_structural():
    cm = a3_in_s3_cm()
    nv = triangle()
    b = Bundle1Cocycle.trivial(cm, nv)
    other = Coboundary1(cm, hexagon(), {v: 0 for v in hexagon().tuples(1)})
    with pytest.raises(StructuralError):
        apply_coboundary(b, other)
    with pytest.raises(StructuralError):
        apply_coboundary(b, "not a coboundary")


# -- functoriality -----------------------------------------------------------------


def test_pullback_along_refinement_preserves_validity():
    cm = conjugation_cm(symmetric(3))
    t = extension_tcm_a3_s3_z4()
    f = hexagon_to_triangle()
    rng = np.random.default_rng(61)
    b = sample_bundle1(cm, f.target, rng)
    g = sample_gerbe2(cm, f.target, rng)
    c = sample_tcm_gerbe2(t, f.target, rng)
    for original in (b, g, c):
        pulled = pullback(original, f)
        assert pulled.nerve == f.source
        assert verify(pulled).valid
    # data transported along the vertex map: hexagon vertices 0,1 cover 0
    assert pullback(b, f).m[(1,)] == b.m[(0,)]
    assert pullback(g, f).m[3, 4] == g.m[1, 2]


def test_pullback_requires_matching_nerve():
    cm = a3_in_s3_cm()
    f = hexagon_to_triangle()
    c = Bundle1Cocycle.trivial(cm, f.source)
    with pytest.raises(StructuralError):
        pullback(c, f)


def test_change_structure_bundle1_along_inclusion():
    inc = a3_in_s3_cm()
    conj = conjugation_cm(symmetric(3))
    f = CrossedModuleMorphism(inc, conj, lam=inc.d1, kap=identity_hom(inc.M))
    rng = np.random.default_rng(62)
    nv = triangle()
    for _ in range(4):
        c = sample_bundle1(inc, nv, rng)
        mapped = change_structure(c, f)
        assert mapped.structure == conj
        assert verify(mapped).valid
        assert mapped.m == c.m


def test_change_structure_tcm_collapse_to_sign():
    t = s3_commutator_tcm()
    s3 = t.M
    z2 = cyclic(2)
    sign = GroupHom(s3, z2, [0 if s3.label(x) in ("012", "120", "201") else 1 for x in range(6)])
    from gerbe.standard import forced_chain_tcm

    target = forced_chain_tcm()
    f = TwoCrossedModuleMorphism(t, target, lam=sign, mu=sign, nu=GroupHom(t.N, target.N, [0]))
    nv = triangle()
    rng = np.random.default_rng(63)
    for _ in range(4):
        c = sample_tcm_gerbe2(t, nv, rng)
        mapped = change_structure(c, f)
        assert verify(mapped).valid
    with pytest.raises(StructuralError):
        change_structure(TcmGerbe2Cocycle.trivial(target, nv), f)  # wrong source


def test_bundle1_product_is_associative_exactly():
    cm = conjugation_cm(symmetric(3))
    nv = triangle()
    rng = np.random.default_rng(64)
    for _ in range(4):
        a = sample_bundle1(cm, nv, rng)
        b = sample_bundle1(cm, nv, rng)
        c = sample_bundle1(cm, nv, rng)
        assert product(product(a, b), c) == product(a, product(b, c))


def test_pullback_commutes_with_product_and_gauge():
    cm = conjugation_cm(symmetric(3))
    f = hexagon_to_triangle()
    rng = np.random.default_rng(65)
    a = sample_bundle1(cm, f.target, rng)
    b = sample_bundle1(cm, f.target, rng)
    assert pullback(product(a, b), f) == product(pullback(a, f), pullback(b, f))
    w = random_coboundary1(cm, f.target, rng)
    pulled_w = Coboundary1(
        cm, f.source, {v: w.l[f.apply(v)] for v in f.source.tuples(1)}
    )
    assert pullback(apply_coboundary(a, w), f) == apply_coboundary(
        pullback(a, f), pulled_w
    )


def test_change_structure_commutes_with_bundle1_product():
    inc = a3_in_s3_cm()
    conj = conjugation_cm(symmetric(3))
    f = CrossedModuleMorphism(inc, conj, lam=inc.d1, kap=identity_hom(inc.M))
    nv = triangle()
    rng = np.random.default_rng(66)
    a = sample_bundle1(inc, nv, rng)
    b = sample_bundle1(inc, nv, rng)
    assert change_structure(product(a, b), f) == product(
        change_structure(a, f), change_structure(b, f)
    )


# -- structural validation and witnesses ----------------------------------------


def test_missing_and_out_of_range_entries_are_structural():
    cm = a3_in_s3_cm()
    nv = triangle()
    good_m = {t: 0 for t in nv.tuples(1)}
    good_l = {t: 0 for t in nv.tuples(2)}
    with pytest.raises(StructuralError):
        Bundle1Cocycle(cm, nv, {(0,): 0}, good_l)
    with pytest.raises(StructuralError):
        Bundle1Cocycle(cm, nv, {**good_m, (0,): 99}, good_l)
    with pytest.raises(StructuralError):
        Bundle1Cocycle(cm, nv, {**good_m, (7,): 0}, good_l)


def test_verify_reports_witness_tuples():
    cm = conjugation_cm(symmetric(3))
    nv = triangle()
    rng = np.random.default_rng(71)
    c = sample_bundle1(cm, nv, rng)
    tampered = Bundle1Cocycle(cm, nv, {**c.m, (0,): (c.m[(0,)] + 1) % 6}, c.l)
    report = verify(tampered)
    assert not report.valid
    laws = {f.law for f in report.failures}
    assert "boundary" in laws
    witnesses = {f.witness for f in report.failures if f.law == "boundary"}
    assert any(0 in w for w in witnesses)


def test_product_requires_same_nerve_and_structure():
    cm = a3_in_s3_cm()
    c1 = Bundle1Cocycle.trivial(cm, triangle())
    c2 = Bundle1Cocycle.trivial(cm, hexagon())
    with pytest.raises(StructuralError):
        product(c1, c2)
    other = Bundle1Cocycle.trivial(conjugation_cm(symmetric(3)), triangle())
    with pytest.raises(StructuralError):
        product(c1, other)


def test_degenerate_entries_are_pinned_by_the_laws():
    # l_ii = e and l_ji = l_ij^-1 follow from the laws, not from fiat
    cm = conjugation_cm(symmetric(3))
    nv = triangle()
    rng = np.random.default_rng(72)
    c = sample_bundle1(cm, nv, rng)
    for i in range(3):
        assert c.l[i, i] == cm.L.identity
    for (i, j) in nv.tuples(2):
        assert c.l[j, i] == cm.L.inv(c.l[i, j])


def test_key_is_canonical_and_stable():
    cm = z2_module_cm()
    nv = triangle()
    c = Bundle1Cocycle.trivial(cm, nv)
    assert c.key() == (0,) * (len(nv.tuples(1)) + len(nv.tuples(2)))
    c2 = Bundle1Cocycle(cm, nv, c.m, c.l)
    assert c == c2 and c.key() == c2.key()
