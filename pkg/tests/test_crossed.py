import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corpus import (
    a3_in_s3_cm,
    a3_s3_tcm,
    extension_tcm_a3_s3_z4,
    extension_tcm_z2_z4_z8,
    mixed_product_tcm,
    q8_commutator_tcm,
    s3_commutator_tcm,
)
from gerbe import InvariantViolation, StructuralError
from gerbe.crossed import (
    CrossedModule,
    CrossedModuleMorphism,
    TwoCrossedModule,
    TwoCrossedModuleMorphism,
    cm_morphism_verify,
    cm_verify,
    derived_crossed_module,
    gray_compose,
    identity_cm_morphism,
    identity_tcm_morphism,
    peiffer_commutator,
    tcm_derived_action,
    tcm_induced_quotient_cm,
    tcm_morphism_verify,
    tcm_verify,
    two_group_compose_horizontal,
    two_group_compose_vertical,
)
from gerbe.groups import (
    GroupAction,
    GroupHom,
    cyclic,
    dihedral,
    quaternion8,
    symmetric,
    trivial_action,
)
from gerbe.standard import (
    central_quotient_cm,
    commutator_tcm,
    conjugation_cm,
    forced_chain_tcm,
    group_cm,
    inclusion_cm,
    module_cm,
    module_tcm,
)

CMS = [
    module_cm(cyclic(2)),
    module_cm(cyclic(6)),
    group_cm(symmetric(3)),
    conjugation_cm(symmetric(3)),
    conjugation_cm(quaternion8()),
    a3_in_s3_cm(),
    central_quotient_cm(quaternion8(), (0, 4)),
]

TCMS = [
    module_tcm(cyclic(2)),
    forced_chain_tcm(),
    s3_commutator_tcm(),
    q8_commutator_tcm(),
    commutator_tcm(dihedral(4)),
    a3_s3_tcm(),
    extension_tcm_a3_s3_z4(),
    extension_tcm_z2_z4_z8(),
    mixed_product_tcm(),
]


@pytest.mark.parametrize("c", CMS, ids=lambda c: f"L{c.L.order}M{c.M.order}")
def test_stock_crossed_modules_verify(c):
    assert cm_verify(c).valid


@pytest.mark.parametrize(
    "t", TCMS, ids=lambda t: f"L{t.L.order}M{t.M.order}N{t.N.order}"
)
def test_stock_two_crossed_modules_verify(t):
    report = tcm_verify(t)
    assert report.valid, report.failures
    assert report.notes["axiom_v_form"] == "standard"


# -- adjudication of the pairing-product law --------------------------------


def test_axiom_v_printed_form_fails_on_commutator_structure():
    """The printed form repeats {m1,m3}; with m2 = e it forces every pairing
    value to be 2-torsion, which fails in S3 where commutators are 3-cycles."""
    t = s3_commutator_tcm()
    report = tcm_verify(t, axiom_v_form="printed")
    assert not report.valid
    assert any(f.law == "pairing-product-second" for f in report.failures)
    # concrete witness: the failure survives with m2 = identity
    m3 = 2  # a transposition; [m1, m3] has order 3 for a suitable m1
    m1 = 3
    assert t.M.comm(m1, m3) != t.M.identity


def test_axiom_v_standard_form_passes_everywhere():
    for t in TCMS:
        assert tcm_verify(t, axiom_v_form="standard").valid


def test_axiom_v_forms_agree_on_trivial_pairing():
    t = forced_chain_tcm()
    assert tcm_verify(t, axiom_v_form="printed").valid
    assert tcm_verify(t, axiom_v_form="standard").valid


# -- mutation rejection ------------------------------------------------------


def test_cm_verify_rejects_broken_action():
    s3 = symmetric(3)
    c = conjugation_cm(s3)
    act = c.actM.act.copy()
    act[1] = np.roll(act[1], 1)
    broken = CrossedModule(c.L, c.M, c.d1, GroupAction(s3, s3, act))
    report = cm_verify(broken)
    assert not report.valid
    assert report.failures[0].witness


def test_cm_verify_rejects_broken_peiffer():
    # inclusion of a NON-normal subgroup cannot carry the conjugation action;
    # build the tables by hand and watch the equivariance law fail
    z4 = cyclic(4)
    z2 = cyclic(2)
    d1 = GroupHom(z2, z4, [0, 1])  # not a hom: 1+1 = 2 -> 0 forces d1(0)=2
    c = CrossedModule(z2, z4, d1, trivial_action(z4, z2))
    report = cm_verify(c)
    assert not report.valid
    assert any(f.law.startswith("d1.") for f in report.failures)


def test_cm_verify_peiffer_witness():
    s3 = symmetric(3)
    c = CrossedModule(s3, s3, GroupHom(s3, s3, [0] * 6), trivial_action(s3, s3))
    report = cm_verify(c)
    assert not report.valid
    assert any(f.law == "peiffer" for f in report.failures)
    f = next(f for f in report.failures if f.law == "peiffer")
    l, lp = f.witness
    assert s3.conj(l, lp) != lp


def test_tcm_verify_rejects_tampered_pairing():
    t = s3_commutator_tcm()
    pf = t.peiffer.copy()
    pf[2, 3] = (pf[2, 3] + 1) % t.L.order
    broken = TwoCrossedModule(t.L, t.M, t.N, t.d1, t.d2, t.actNM, t.actNL, pf)
    report = tcm_verify(broken)
    assert not report.valid
    laws = {f.law for f in report.failures}
    assert "twisted-conjugation" in laws or "commutator-pairing" in laws


def test_tcm_verify_rejects_broken_complex_condition():
    z2 = cyclic(2)
    from gerbe.groups import identity_hom

    t = TwoCrossedModule(
        z2,
        z2,
        z2,
        identity_hom(z2),
        identity_hom(z2),  # d2 . d1 = id != e
        trivial_action(z2, z2),
        trivial_action(z2, z2),
        np.zeros((2, 2), dtype=np.int64),
    )
    report = tcm_verify(t)
    assert not report.valid
    assert any(f.law == "complex" for f in report.failures)


def test_tcm_structural_rejection():
    t = s3_commutator_tcm()
    with pytest.raises(StructuralError):
        TwoCrossedModule(
            t.L, t.M, t.N, t.d1, t.d2, t.actNM, t.actNL, np.zeros((2, 2), int)
        )


# -- twisted conjugation -----------------------------------------------------


@pytest.mark.parametrize(
    "t", TCMS, ids=lambda t: f"L{t.L.order}M{t.M.order}N{t.N.order}"
)
def test_peiffer_commutator_matches_conjugation(t):
    for m1 in t.M.elements:
        for m2 in t.M.elements:
            assert peiffer_commutator(t, m1, m2) == t.M.conj(m1, m2)


# -- derived action and induced quotient -------------------------------------


@pytest.mark.parametrize(
    "t", TCMS, ids=lambda t: f"L{t.L.order}M{t.M.order}N{t.N.order}"
)
def test_derived_action_yields_crossed_module(t):
    act = tcm_derived_action(t)
    assert act.actor == t.M and act.space == t.L
    c = derived_crossed_module(t)
    assert cm_verify(c).valid


def test_derived_action_is_conjugation_for_commutator_structure():
    t = s3_commutator_tcm()
    act = tcm_derived_action(t)
    for m in t.M.elements:
        for l in t.L.elements:
            assert act(m, l) == t.M.conj(m, l)


def test_derived_action_raises_on_broken_input():
    t = s3_commutator_tcm()
    pf = t.peiffer.copy()
    pf[:, :] = 3  # constant pairing: not even an action
    broken = TwoCrossedModule(t.L, t.M, t.N, t.d1, t.d2, t.actNM, t.actNL, pf)
    with pytest.raises(InvariantViolation):
        tcm_derived_action(broken)


def test_induced_quotient_cm_of_inclusion():
    t = a3_s3_tcm()
    q = tcm_induced_quotient_cm(t)
    assert q.L.order == 2  # S3 / A3
    assert q.M.order == 1
    assert cm_verify(q).valid


def test_induced_quotient_cm_of_extension():
    t = extension_tcm_a3_s3_z4()
    q = tcm_induced_quotient_cm(t)
    assert q.L.order == 2 and q.M.order == 4
    # the induced boundary sends the odd coset to 2
    assert q.d1(0) == 0 and q.d1(1) == 2
    assert cm_verify(q).valid


def test_induced_quotient_cm_abelian_chain():
    t = extension_tcm_z2_z4_z8()
    q = tcm_induced_quotient_cm(t)
    assert q.L.order == 2 and q.M.order == 8
    assert q.d1(1) == 4
    assert cm_verify(q).valid


# -- 2-group compositions ----------------------------------------------------


def test_vertical_composition_and_error():
    c = conjugation_cm(symmetric(3))
    m, l1, l2 = 2, 3, 4
    p = (m, l1)
    q = (c.M.mul(c.d1(l1), m), l2)
    n, l = two_group_compose_vertical(c, p, q)
    assert n == m and l == c.L.mul(l1, l2)
    with pytest.raises(InvariantViolation):
        two_group_compose_vertical(c, p, (m, l2))


def test_horizontal_composition():
    c = a3_in_s3_cm()
    p, q = (2, 1), (3, 2)
    m, l = two_group_compose_horizontal(c, p, q)
    assert m == c.M.mul(2, 3)
    assert l == c.L.mul(1, c.act(2, 2))


@settings(max_examples=60)
@given(st.data())
def test_interchange_law(data):
    """(p1 .v p2) .h (q1 .v q2) == (p1 .h q1) .v (p2 .h q2)."""
    c = a3_in_s3_cm()
    mL, mM = c.L.order, c.M.order
    m1 = data.draw(st.integers(0, mM - 1))
    m2 = data.draw(st.integers(0, mM - 1))
    l1 = data.draw(st.integers(0, mL - 1))
    l2 = data.draw(st.integers(0, mL - 1))
    l1b = data.draw(st.integers(0, mL - 1))
    l2b = data.draw(st.integers(0, mL - 1))
    p1 = (m1, l1)
    p2 = (c.M.mul(c.d1(l1), m1), l1b)
    q1 = (m2, l2)
    q2 = (c.M.mul(c.d1(l2), m2), l2b)
    lhs = two_group_compose_horizontal(
        c, two_group_compose_vertical(c, p1, p2), two_group_compose_vertical(c, q1, q2)
    )
    rhs = two_group_compose_vertical(
        c,
        two_group_compose_horizontal(c, p1, q1),
        two_group_compose_horizontal(c, p2, q2),
    )
    assert lhs == rhs


# -- Gray compositions -------------------------------------------------------


def test_gray_vertical1():
    t = s3_commutator_tcm()
    p = (0, 2, 3)
    q = (0, t.M.mul(t.d1(3), 2), 4)
    assert gray_compose(t, "vertical1", p, q) == (0, 2, t.L.mul(3, 4))
    with pytest.raises(InvariantViolation):
        gray_compose(t, "vertical1", p, (0, 2, 4))


def test_gray_vertical2_and_horizontal():
    t = extension_tcm_a3_s3_z4()
    p = (1, 2, 1)
    q = (t.N.mul(t.d2(2), 1), 3, 2)
    n, m, l = gray_compose(t, "vertical2", p, q)
    assert n == 1 and m == t.M.mul(2, 3)
    assert l == t.L.mul(1, t.derived(2, 2))
    n, m, l = gray_compose(t, "horizontal", (1, 2, 1), (3, 4, 2))
    assert n == t.N.mul(1, 3)
    assert m == t.M.mul(2, t.act_nm(1, 4))
    assert l == t.L.mul(1, t.derived(2, t.act_nl(1, 2)))
    with pytest.raises(StructuralError):
        gray_compose(t, "diagonal", p, q)


def test_gray_vertical2_not_composable():
    t = extension_tcm_a3_s3_z4()
    with pytest.raises(InvariantViolation):
        gray_compose(t, "vertical2", (1, 2, 1), (0, 3, 2))


@settings(max_examples=40)
@given(st.data())
def test_gray_horizontal_associative(data):
    t = extension_tcm_a3_s3_z4()
    cells = []
    for _ in range(3):
        n = data.draw(st.integers(0, t.N.order - 1))
        m = data.draw(st.integers(0, t.M.order - 1))
        l = data.draw(st.integers(0, t.L.order - 1))
        cells.append((n, m, l))
    p, q, r = cells
    lhs = gray_compose(t, "horizontal", gray_compose(t, "horizontal", p, q), r)
    rhs = gray_compose(t, "horizontal", p, gray_compose(t, "horizontal", q, r))
    assert lhs == rhs


# -- morphisms ----------------------------------------------------------------


def test_identity_morphisms_verify():
    assert cm_morphism_verify(identity_cm_morphism(a3_in_s3_cm())).valid
    assert tcm_morphism_verify(identity_tcm_morphism(a3_s3_tcm())).valid


def test_cm_morphism_inclusion_into_conjugation():
    # (A3 -> S3) -> (S3 -> S3): lam = inclusion, kap = id
    inc = a3_in_s3_cm()
    conj = conjugation_cm(symmetric(3))
    lam = inc.d1  # A3 -> S3 inclusion
    kap = GroupHom(inc.M, conj.M, list(range(6)))
    f = CrossedModuleMorphism(inc, conj, lam, kap)
    assert cm_morphism_verify(f).valid


def test_cm_morphism_rejects_broken_square():
    inc = a3_in_s3_cm()
    conj = conjugation_cm(symmetric(3))
    lam = GroupHom(inc.L, conj.L, [0, 0, 0])  # collapses A3
    kap = GroupHom(inc.M, conj.M, list(range(6)))
    report = cm_morphism_verify(CrossedModuleMorphism(inc, conj, lam, kap))
    assert not report.valid
    assert any(f.law == "square" for f in report.failures)


def test_tcm_morphism_sign_collapse():
    # (S3 -> S3 -> 1) -> (Z2 -> Z2 -> 1) by the sign map levelwise
    s = s3_commutator_tcm()
    g = commutator_tcm(cyclic(2))
    s3 = s.M
    odd = [0 if lab in ("012", "120", "201") else 1 for lab in s3.labels]
    sgn = GroupHom(s3, g.M, odd)
    nu = GroupHom(s.N, g.N, [0])
    f = TwoCrossedModuleMorphism(s, g, sgn, sgn, nu)
    assert tcm_morphism_verify(f).valid


def test_tcm_morphism_rejects_non_pairing_preserving():
    s = s3_commutator_tcm()
    t = extension_tcm_a3_s3_z4()
    # levelwise maps that are homs but break the d2 square
    lam = GroupHom(s.L, t.L, [0] * 6)
    mu = GroupHom(s.M, t.M, list(range(6)))
    nu = GroupHom(s.N, t.N, [0])
    report = tcm_morphism_verify(TwoCrossedModuleMorphism(s, t, lam, mu, nu))
    assert not report.valid
